#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "rdjc/algebra.hpp"
#include "rdjc/io.hpp"

namespace rdjc::cli {
namespace {

const std::map<std::string, std::string> preset_commands{
    {"fig1", "ladder"}, {"fig2", "ladder"}, {"fig3a", "spectrum"}, {"fig3b", "spectrum"}, {"fig4", "g2"}};

const std::vector<std::string> commands{"algebra-check", "ladder", "spectrum", "g2"};

struct RunConfig {
    std::string command;
    std::string preset;

    SystemParams params = SystemParams::reference_rates(0.0);
    CutoffPolicy cutoff;
    std::string critical = "limit";

    std::string axis = "lambda";
    double lambda_min = -0.5;
    double lambda_max = 1.0;
    int lambda_points = 301;
    double delta_min = -4.0;
    double delta_max = 4.0;
    int delta_points = 401;
    int rungs = 0;

    std::vector<double> lambdas;
    std::vector<double> deltas;
    std::vector<double> pumps;
    double pump_min = 1e-3;
    double pump_max = 10.0;
    int pump_points = 60;

    double omega_min = -3.0;
    double omega_max = 3.0;
    int omega_points = 2001;
    std::string method = "eigen";
    std::string normalize = "none";
    std::string estimator = "deformed";

    int algebra_n_max = 20;
    double tol = 1e-12;

    std::string out = "out";
    std::vector<std::string> formats{"csv", "json", "svg"};
    int workers = 1;
    bool seedless = false;

    bool wants(const std::string& format) const {
        return std::find(formats.begin(), formats.end(), format) != formats.end();
    }
};

// Reads TOML, or JSON when the text starts with '{'. A run manifest is
// accepted directly: its "config" object is used.
class ConfigFormat : public CLI::ConfigTOML {
public:
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        const std::string text{std::istreambuf_iterator<char>(input), std::istreambuf_iterator<char>()};
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first == std::string::npos || text[first] != '{') {
            std::istringstream toml(text);
            return CLI::ConfigTOML::from_config(toml);
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw CLI::ConversionError(fmt::format("invalid JSON config: {}", e.what()));
        }
        if (j.is_object() && j.contains("schema_version") && j.contains("config")) j = j["config"];
        if (!j.is_object()) throw CLI::ConversionError("JSON config must be an object");
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            item.name = key;
            if (value.is_array())
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            else
                item.inputs.push_back(scalar(value));
            items.push_back(std::move(item));
        }
        return items;
    }

private:
    static std::string scalar(const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_null()) return "nan";
        return v.dump();
    }
};

std::vector<double> checked_list(const std::vector<double>& given, double fallback) {
    return given.empty() ? std::vector<double>{fallback} : given;
}

void add_options(CLI::App& app, RunConfig& c) {
    const auto finite = CLI::Validator(
        [](const std::string& s) {
            double v = 0;
            if (!CLI::detail::lexical_cast(s, v) || !std::isfinite(v)) return std::string("value must be finite");
            return std::string();
        },
        "FINITE");

    app.add_option("--omega-c", c.params.omega_c, "Cavity frequency")->check(finite)->capture_default_str();
    app.add_option("--delta", c.params.delta, "Detuning omega_x - omega_c")->check(finite)->capture_default_str();
    app.add_option("--g", c.params.g, "Emitter-cavity coupling")->check(finite)->capture_default_str();
    app.add_option("--lambda", c.params.lambda, "Parity deformation (>= -1/2)")->check(finite)->capture_default_str();
    app.add_option("--kappa", c.params.kappa, "Cavity loss rate")->check(finite)->capture_default_str();
    app.add_option("--gamma", c.params.gamma, "Emitter decay rate")->check(finite)->capture_default_str();
    app.add_option("--pump", c.params.pump, "Incoherent pump rate")->check(finite)->capture_default_str();
    app.add_option("--nbar", c.params.nbar, "Thermal photon number of the cavity bath")
        ->check(finite)
        ->capture_default_str();

    app.add_option("--cutoff", c.cutoff.initial, "Initial Fock cutoff n_max")->capture_default_str();
    app.add_option("--max-cutoff", c.cutoff.maximum, "Largest Fock cutoff tried")->capture_default_str();
    app.add_option("--top-tolerance", c.cutoff.top_tolerance, "Largest admissible top-level population")
        ->capture_default_str();
    app.add_option("--critical", c.critical, "Handling of lambda = -1/2: limit or strict")
        ->check(CLI::IsMember({"limit", "strict"}))
        ->capture_default_str();

    app.add_option("--axis", c.axis, "Ladder scan axis")
        ->check(CLI::IsMember({"lambda", "delta"}))
        ->capture_default_str();
    app.add_option("--lambda-min", c.lambda_min)->check(finite)->capture_default_str();
    app.add_option("--lambda-max", c.lambda_max)->check(finite)->capture_default_str();
    app.add_option("--lambda-points", c.lambda_points)->capture_default_str();
    app.add_option("--delta-min", c.delta_min)->check(finite)->capture_default_str();
    app.add_option("--delta-max", c.delta_max)->check(finite)->capture_default_str();
    app.add_option("--delta-points", c.delta_points)->capture_default_str();
    app.add_option("--rungs", c.rungs, "Rungs per ladder point (0: 19 along lambda, 3 along delta)")
        ->capture_default_str();

    app.add_option("--lambdas", c.lambdas, "Deformation values (defaults to --lambda)")->delimiter(',');
    app.add_option("--deltas", c.deltas, "Detunings paired with --lambdas for spectra")->delimiter(',');
    app.add_option("--pumps", c.pumps, "Explicit pump grid (overrides the log grid)")->delimiter(',');
    app.add_option("--pump-min", c.pump_min)->check(finite)->capture_default_str();
    app.add_option("--pump-max", c.pump_max)->check(finite)->capture_default_str();
    app.add_option("--pump-points", c.pump_points)->capture_default_str();

    app.add_option("--omega-min", c.omega_min, "Spectrum window, relative to omega_c")->check(finite)
        ->capture_default_str();
    app.add_option("--omega-max", c.omega_max)->check(finite)->capture_default_str();
    app.add_option("--omega-points", c.omega_points)->capture_default_str();
    app.add_option("--method", c.method, "Spectrum method: eigen or discrete")
        ->check(CLI::IsMember({"eigen", "discrete"}))
        ->capture_default_str();
    app.add_option("--normalize", c.normalize, "Spectrum normalization: none or peak")
        ->check(CLI::IsMember({"none", "peak"}))
        ->capture_default_str();
    app.add_option("--estimator", c.estimator, "g2 estimator: deformed or photon-number")
        ->check(CLI::IsMember({"deformed", "photon-number"}))
        ->capture_default_str();

    app.add_option("--algebra-n-max", c.algebra_n_max, "Fock cutoff for algebra-check")->capture_default_str();
    app.add_option("--tol", c.tol, "Residual tolerance for algebra-check")->capture_default_str();

    app.add_option("--out", c.out, "Output directory")->capture_default_str();
    app.add_option("--format", c.formats, "Output formats")
        ->delimiter(',')
        ->check(CLI::IsMember({"csv", "json", "svg"}))
        ->capture_default_str();
    app.add_option("--workers", c.workers, "Worker threads (0: all cores)")->capture_default_str();
    app.add_flag("--seedless", c.seedless, "Accepted for compatibility; every run is deterministic");
    app.add_option("--preset", c.preset, "Named preset: fig1, fig2, fig3a, fig3b, fig4")
        ->check(CLI::IsMember({"fig1", "fig2", "fig3a", "fig3b", "fig4"}))
        ->configurable(false);
}

void validate(const RunConfig& c) {
    c.params.validate();
    c.cutoff.validate();
    if (c.rungs < 0) throw ConfigError(fmt::format("rungs must be >= 0, got {}", c.rungs));
    if (c.workers < 0) throw ConfigError(fmt::format("workers must be >= 0, got {}", c.workers));
    if (c.formats.empty()) throw ConfigError("at least one output format is required");
    for (double l : c.lambdas) {
        SystemParams p = c.params;
        p.lambda = l;
        p.validate();
    }
    for (double d : c.deltas)
        if (!std::isfinite(d)) throw ConfigError("deltas must be finite");
    for (double p : c.pumps)
        if (!std::isfinite(p) || p < 0) throw ConfigError(fmt::format("pump values must be >= 0, got {}", p));

    const auto require_points = [](int n, const char* name) {
        if (n < 1) throw ConfigError(fmt::format("{} must be >= 1, got {}", name, n));
    };
    const auto require_order = [](double lo, double hi, const char* name) {
        if (lo > hi) throw ConfigError(fmt::format("{} range is reversed: {} > {}", name, lo, hi));
    };

    if (c.command == "algebra-check") {
        FockCutoff{c.algebra_n_max};
        if (!(c.tol > 0)) throw ConfigError(fmt::format("tol must be > 0, got {}", c.tol));
    } else if (c.command == "ladder") {
        if (!(c.params.g > 0)) throw ConfigError("ladder output is in units of g and needs g > 0");
        if (c.axis == "lambda") {
            require_points(c.lambda_points, "lambda-points");
            require_order(c.lambda_min, c.lambda_max, "lambda");
            if (c.lambda_max < DeformationParam::lower_bound)
                throw ConfigError("lambda grid lies entirely below lambda = -1/2");
        } else {
            require_points(c.delta_points, "delta-points");
            require_order(c.delta_min, c.delta_max, "delta");
        }
    } else if (c.command == "spectrum") {
        require_points(c.omega_points, "omega-points");
        if (c.omega_points > 1 && !(c.omega_min < c.omega_max))
            throw ConfigError("omega-min must be below omega-max");
        const auto lambdas = checked_list(c.lambdas, c.params.lambda);
        const auto deltas = checked_list(c.deltas, c.params.delta);
        if (deltas.size() != 1 && deltas.size() != lambdas.size())
            throw ConfigError(fmt::format("deltas has {} entries; expected 1 or {} to pair with lambdas",
                                          deltas.size(), lambdas.size()));
    } else if (c.command == "g2") {
        if (c.pumps.empty()) {
            require_points(c.pump_points, "pump-points");
            require_order(c.pump_min, c.pump_max, "pump");
            if (!(c.pump_min > 0)) throw ConfigError("pump-min must be > 0 for the log-spaced grid");
        }
    }
}

std::string tag(double v) { return fmt::format("{:g}", v); }

nlohmann::ordered_json resolved_config(const RunConfig& c) {
    nlohmann::ordered_json j{{"omega-c", c.params.omega_c},
                             {"delta", c.params.delta},
                             {"g", c.params.g},
                             {"lambda", c.params.lambda},
                             {"kappa", c.params.kappa},
                             {"gamma", c.params.gamma},
                             {"pump", c.params.pump},
                             {"nbar", c.params.nbar},
                             {"cutoff", c.cutoff.initial},
                             {"max-cutoff", c.cutoff.maximum},
                             {"top-tolerance", c.cutoff.top_tolerance},
                             {"critical", c.critical},
                             {"axis", c.axis},
                             {"lambda-min", c.lambda_min},
                             {"lambda-max", c.lambda_max},
                             {"lambda-points", c.lambda_points},
                             {"delta-min", c.delta_min},
                             {"delta-max", c.delta_max},
                             {"delta-points", c.delta_points},
                             {"rungs", c.rungs}};
    if (!c.lambdas.empty()) j["lambdas"] = c.lambdas;
    if (!c.deltas.empty()) j["deltas"] = c.deltas;
    if (!c.pumps.empty()) j["pumps"] = c.pumps;
    j["pump-min"] = c.pump_min;
    j["pump-max"] = c.pump_max;
    j["pump-points"] = c.pump_points;
    j["omega-min"] = c.omega_min;
    j["omega-max"] = c.omega_max;
    j["omega-points"] = c.omega_points;
    j["method"] = c.method;
    j["normalize"] = c.normalize;
    j["estimator"] = c.estimator;
    j["algebra-n-max"] = c.algebra_n_max;
    j["tol"] = c.tol;
    j["out"] = c.out;
    j["format"] = c.formats;
    j["workers"] = c.workers;
    j["seedless"] = c.seedless;
    return j;
}

struct Run {
    const RunConfig& config;
    std::ostream& out;
    std::ostream& err;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;

    std::filesystem::path dir() const { return config.out; }

    void emit(const std::string& name, const std::string& content) {
        write_text(dir() / name, content);
        outputs.push_back(name);
    }

    void warn(const std::string& message) {
        fmt::print(err, "warning: {}\n", message);
        warnings.push_back(message);
    }
};

SteadyStateOptions steady_options(const RunConfig& c) {
    return {c.cutoff, c.critical == "strict" ? CriticalPointMode::Strict : CriticalPointMode::OneSidedLimit};
}

int algebra_check(Run& run) {
    const RunConfig& c = run.config;
    const std::vector<double> lambdas =
        c.lambdas.empty() ? std::vector<double>{-0.5, -0.3, 0.0, 0.3, 0.5, 0.9} : c.lambdas;
    std::string csv = "lambda,identity,first_level,last_level,residual,worst_level,passed\n";
    auto reports = nlohmann::ordered_json::array();
    bool all = true;
    fmt::print(run.out, "{:>8}  {:<28} {:>7} {:>12} {:>6}  {}\n", "lambda", "identity", "levels", "residual",
               "worst", "status");
    for (double l : lambdas) {
        const AlgebraReport r = verify_algebra(FockCutoff{c.algebra_n_max}, DeformationParam{l}, c.tol);
        all = all && r.passed();
        auto identities = nlohmann::ordered_json::array();
        for (const auto& id : r.identities) {
            fmt::print(run.out, "{:>8g}  {:<28} {:>3}..{:<3} {:>12.3e} {:>6}  {}\n", l, id.name, id.first_level,
                       id.last_level, id.residual, id.worst_level, id.passed ? "ok" : "FAIL");
            csv += fmt::format("{},{},{},{},{},{},{}\n", format_number(l), id.name, id.first_level, id.last_level,
                               format_number(id.residual), id.worst_level, id.passed ? 1 : 0);
            identities.push_back({{"identity", id.name},
                                  {"first_level", id.first_level},
                                  {"last_level", id.last_level},
                                  {"residual", id.residual},
                                  {"worst_level", id.worst_level},
                                  {"passed", id.passed}});
        }
        reports.push_back({{"lambda", l},
                           {"n_max", r.n_max},
                           {"tolerance", r.tolerance},
                           {"boundary_commutator_residual", r.boundary_commutator_residual},
                           {"passed", r.passed()},
                           {"identities", std::move(identities)}});
    }
    if (c.wants("csv")) run.emit("algebra.csv", csv);
    if (c.wants("json")) run.emit("algebra.json", reports.dump(2) + "\n");
    fmt::print(run.out, "{}\n", all ? "all identities within tolerance" : "identity check FAILED");
    return all ? Success : CheckFailed;
}

PlotSpec ladder_plot(const LadderScan& scan, const std::string& title) {
    PlotSpec plot{title, scan.axis == "lambda" ? "lambda" : "delta / g", "(omega - omega_c) / g", false, {}};
    const std::size_t rungs = scan.points.empty() ? 0 : scan.points.front().doublets.size();
    const bool by_parity = scan.axis == "lambda";
    bool even_listed = false;
    bool odd_listed = false;
    for (std::size_t n = 0; n < rungs; ++n) {
        for (int branch = 0; branch < 2; ++branch) {
            PlotSeries s;
            for (const auto& point : scan.points) {
                const auto& d = point.doublets[n];
                s.x.push_back(point.axis_value);
                s.y.push_back(branch == 0 ? d.from_plus : d.from_minus);
            }
            const auto parity = scan.points.front().doublets[n].parity;
            if (by_parity) {
                const bool even = parity == TransitionParity::Even;
                s.color = even ? "#1f77b4" : "#d62728";
                bool& listed = even ? even_listed : odd_listed;
                s.label = even ? "even transitions" : "odd transitions";
                s.in_legend = !listed;
                listed = true;
            } else {
                s.label = fmt::format("n={} {}", n + 1, branch == 0 ? "+" : "-");
            }
            plot.series.push_back(std::move(s));
        }
    }
    return plot;
}

void emit_ladder(Run& run, const LadderScan& scan, const std::string& stem, const std::string& title) {
    if (run.config.wants("csv")) run.emit(stem + ".csv", ladder_csv(scan));
    if (run.config.wants("json")) run.emit(stem + ".json", to_json(scan).dump(2) + "\n");
    if (run.config.wants("svg")) run.emit(stem + ".svg", render_svg(ladder_plot(scan, title)));
}

int ladder(Run& run) {
    const RunConfig& c = run.config;
    if (c.axis == "lambda") {
        const auto grid = linspace(c.lambda_min, c.lambda_max, c.lambda_points);
        const LadderScan scan = doublets_vs_lambda(c.params, grid, c.rungs == 0 ? 19 : c.rungs);
        emit_ladder(run, scan, "ladder_lambda", fmt::format("Inner doublets, delta = {:g}", c.params.delta));
        fmt::print(run.out, "ladder: {} lambda points x {} rungs\n", scan.points.size(),
                   scan.points.front().doublets.size());
        return Success;
    }
    const auto grid = linspace(c.delta_min, c.delta_max, c.delta_points);
    for (double l : checked_list(c.lambdas, c.params.lambda)) {
        SystemParams p = c.params;
        p.lambda = l;
        const LadderScan scan = doublets_vs_detuning(p, grid, c.rungs == 0 ? 3 : c.rungs);
        emit_ladder(run, scan, "ladder_delta_lambda" + tag(l), fmt::format("Inner doublets, lambda = {:g}", l));
        fmt::print(run.out, "ladder: lambda = {:g}, {} delta points x {} rungs\n", l, scan.points.size(),
                   scan.points.front().doublets.size());
    }
    return Success;
}

int spectrum(Run& run) {
    const RunConfig& c = run.config;
    const auto lambdas = checked_list(c.lambdas, c.params.lambda);
    auto deltas = checked_list(c.deltas, c.params.delta);
    if (deltas.size() == 1) deltas.assign(lambdas.size(), deltas.front());
    std::vector<SpectrumConfig> configs;
    for (std::size_t k = 0; k < lambdas.size(); ++k) configs.push_back({lambdas[k], deltas[k]});

    SpectrumOptions options;
    options.method = c.method == "eigen" ? SpectrumMethod::Eigenmodes : SpectrumMethod::DiscreteTransform;
    options.peak_normalize = c.normalize == "peak";
    const auto omega = linspace(c.omega_min, c.omega_max, c.omega_points);
    const auto spectra = spectra_suite(configs, c.params, omega, steady_options(c), options, c.workers);

    for (std::size_t k = 0; k < spectra.size(); ++k) {
        const auto& s = spectra[k];
        const std::string stem = fmt::format("spectrum_lambda{}_delta{}", tag(configs[k].lambda), tag(configs[k].delta));
        if (c.wants("csv")) run.emit(stem + ".csv", spectrum_csv(s));
        if (c.wants("json")) run.emit(stem + ".json", to_json(s).dump(2) + "\n");
        if (c.wants("svg")) {
            PlotSpec plot{fmt::format("Emission spectrum, lambda = {:g}, delta = {:g}", configs[k].lambda,
                                      configs[k].delta),
                          "(omega - omega_c) / g", "S(omega)", false, {}};
            PlotSeries series;
            series.label = fmt::format("lambda = {:g}", configs[k].lambda);
            series.x = s.omega;
            series.y = s.intensity;
            plot.series.push_back(std::move(series));
            run.emit(stem + ".svg", render_svg(plot));
        }
        if (s.meta.fell_back)
            run.warn(fmt::format("{}: eigenbasis condition {:.3e}; used the discrete transform", stem,
                                 s.meta.eigenbasis_condition));
        fmt::print(run.out, "spectrum: lambda = {:g}, delta = {:g}, n_max = {}, method = {}{}, peaks at [{:.4g}]\n",
                   configs[k].lambda, configs[k].delta, s.meta.n_max, to_string(s.meta.method),
                   s.meta.critical_limit ? " (one-sided limit)" : "",
                   fmt::join(find_peaks(s), ", "));
    }
    return Success;
}

int g2(Run& run) {
    const RunConfig& c = run.config;
    const auto lambdas = checked_list(c.lambdas, c.params.lambda);
    const auto pumps = c.pumps.empty() ? logspace(c.pump_min, c.pump_max, c.pump_points) : c.pumps;
    const auto estimator = c.estimator == "deformed" ? G2Estimator::DeformedField : G2Estimator::PhotonNumber;
    const G2Scan scan = g2_vs_pump(lambdas, pumps, c.params, steady_options(c), estimator, c.workers);
    for (const auto& w : scan.warnings) run.warn(w);

    if (c.wants("csv")) run.emit("g2.csv", g2_csv(scan));
    if (c.wants("json")) run.emit("g2.json", to_json(scan).dump(2) + "\n");
    if (c.wants("svg")) {
        PlotSpec plot{"Zero-delay second-order correlation", "P / g", "g2(0)", true, {}};
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            PlotSeries s;
            s.label = fmt::format("lambda = {:g}", lambdas[i]);
            for (std::size_t j = 0; j < pumps.size(); ++j) {
                s.x.push_back(pumps[j]);
                s.y.push_back(scan.records[i * pumps.size() + j].g2);
            }
            plot.series.push_back(std::move(s));
        }
        run.emit("g2.svg", render_svg(plot));
    }
    int largest = 0;
    for (const auto& r : scan.records) largest = std::max(largest, r.n_max);
    fmt::print(run.out, "g2: {} lambda x {} pump points, estimator {}, largest n_max {}\n", lambdas.size(),
               pumps.size(), to_string(estimator), largest);
    return Success;
}

// The preset has to be known before parsing so its file can be queued as the
// lowest-priority config.
std::string scan_preset(const std::vector<std::string>& args) {
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--preset" && k + 1 < args.size()) return args[k + 1];
        if (args[k].rfind("--preset=", 0) == 0) return args[k].substr(9);
    }
    return {};
}

bool names_command(const std::vector<std::string>& args) {
    return std::any_of(args.begin(), args.end(), [](const std::string& a) {
        return std::find(commands.begin(), commands.end(), a) != commands.end();
    });
}

}  // namespace

std::filesystem::path preset_directory() {
    if (const char* env = std::getenv("RDJC_PRESET_DIR"); env != nullptr && *env != '\0') return env;
    return RDJC_PRESET_DIR;
}

int run(const std::vector<std::string>& input, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args = input;
    const std::string preset = scan_preset(args);
    const auto preset_command = preset_commands.find(preset);
    if (preset_command != preset_commands.end()) {
        // Preset values sit below --config values, which sit below flags.
        if (!names_command(args)) args.push_back(preset_command->second);
        args.push_back("--config");
        args.push_back((preset_directory() / (preset + ".toml")).string());
    }

    RunConfig config;
    CLI::App app{"Parity-deformed Jaynes-Cummings emitter-cavity simulator", "rdjc"};
    app.set_version_flag("--version", std::string(RDJC_VERSION));
    app.config_formatter(std::make_shared<ConfigFormat>());
    app.set_config("--config", "", "TOML config file or a previous run's manifest.json")
        ->expected(1, 2)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.allow_config_extras(CLI::config_extras_mode::error);
    add_options(app, config);
    app.require_subcommand(1);
    for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
             {"algebra-check", "Check the deformed commutation relations on a truncated Fock space"},
             {"ladder", "Inner Rabi doublets along lambda or detuning"},
             {"spectrum", "Cavity emission spectra"},
             {"g2", "Steady-state g2(0) against pump rate"}})
        app.add_subcommand(name, help)->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Success : ConfigFailure;
    }
    config.command = app.get_subcommands().front()->get_name();
    if (preset_command != preset_commands.end() && preset_command->second != config.command) {
        fmt::print(err, "error: preset {} drives the {} subcommand, not {}\n", preset, preset_command->second,
                   config.command);
        return ConfigFailure;
    }

    Run state{config, out, err, {}, {}};
    try {
        validate(config);
        const auto start = std::chrono::steady_clock::now();
        std::filesystem::create_directories(state.dir());
        int code = Success;
        if (config.command == "algebra-check")
            code = algebra_check(state);
        else if (config.command == "ladder")
            code = ladder(state);
        else if (config.command == "spectrum")
            code = spectrum(state);
        else
            code = g2(state);
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        nlohmann::ordered_json manifest{{"schema_version", manifest_schema_version},
                                        {"code_version", code_version()},
                                        {"command", config.command},
                                        {"preset", preset.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(preset)},
                                        {"config", resolved_config(config)},
                                        {"outputs", state.outputs},
                                        {"warnings", state.warnings}};
        write_text(state.dir() / "manifest.json", manifest.dump(2) + "\n");
        write_text(state.dir() / "timing.json",
                   nlohmann::ordered_json{{"command", config.command}, {"elapsed_seconds", elapsed}}.dump(2) + "\n");
        fmt::print(err, "{} finished in {:.3f} s\n", config.command, elapsed);
        return code;
    } catch (const ConfigError& e) {
        fmt::print(err, "config error: {}\n", e.what());
        return ConfigFailure;
    } catch (const PhysicsValidityError& e) {
        fmt::print(err, "physics validity error: {}\n", e.what());
        return PhysicsFailure;
    } catch (const NumericalError& e) {
        fmt::print(err, "numerical error: {}\n", e.what());
        return NumericalFailure;
    } catch (const IoError& e) {
        fmt::print(err, "I/O error: {}\n", e.what());
        return IoFailure;
    } catch (const std::filesystem::filesystem_error& e) {
        fmt::print(err, "I/O error: {}\n", e.what());
        return IoFailure;
    }
}

}  // namespace rdjc::cli
