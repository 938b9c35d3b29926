#include "rdjc/io.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

namespace rdjc {
namespace {

// nlohmann writes NaN as null; keep that but make the intent explicit.
nlohmann::ordered_json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

nlohmann::ordered_json numbers(const std::vector<double>& values) {
    auto out = nlohmann::ordered_json::array();
    for (double v : values) out.push_back(number(v));
    return out;
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    return fmt::format("{:.17g}", value);
}

std::string ladder_csv(const LadderScan& scan) {
    std::string out = fmt::format("{},rung,parity,omega_plus,omega_minus,splitting,rabi\n", scan.axis);
    for (const auto& point : scan.points)
        for (const auto& d : point.doublets)
            out += fmt::format("{},{},{},{},{},{},{}\n", format_number(point.axis_value), d.rung,
                               to_string(d.parity), format_number(d.from_plus), format_number(d.from_minus),
                               format_number(d.splitting()), format_number(d.rabi));
    return out;
}

std::string spectrum_csv(const SpectrumResult& spectrum) {
    std::string out = "omega,intensity\n";
    for (std::size_t k = 0; k < spectrum.omega.size(); ++k)
        out += fmt::format("{},{}\n", format_number(spectrum.omega[k]), format_number(spectrum.intensity[k]));
    return out;
}

std::string g2_csv(const G2Scan& scan) {
    std::string out = "lambda,pump,g2,mean_photons,n_max,cutoff_valid,critical_limit\n";
    for (const auto& r : scan.records)
        out += fmt::format("{},{},{},{},{},{},{}\n", format_number(r.lambda), format_number(r.pump),
                           format_number(r.g2), format_number(r.mean_photons), r.n_max,
                           r.cutoff_valid ? 1 : 0, r.critical_limit ? 1 : 0);
    return out;
}

nlohmann::ordered_json to_json(const SystemParams& p) {
    return {{"omega_c", p.omega_c}, {"delta", p.delta}, {"g", p.g},         {"lambda", p.lambda},
            {"kappa", p.kappa},     {"gamma", p.gamma}, {"pump", p.pump}, {"nbar", p.nbar}};
}

nlohmann::ordered_json to_json(const CutoffPolicy& policy) {
    return {{"initial", policy.initial}, {"maximum", policy.maximum}, {"top_tolerance", policy.top_tolerance}};
}

nlohmann::ordered_json to_json(const ScanMetadata& meta) {
    nlohmann::ordered_json j{{"code_version", meta.code_version},
                             {"params", to_json(meta.params)},
                             {"method", meta.method}};
    if (meta.cutoff_policy_used) j["cutoff_policy"] = to_json(meta.cutoff);
    return j;
}

nlohmann::ordered_json to_json(const LadderScan& scan) {
    auto points = nlohmann::ordered_json::array();
    for (const auto& point : scan.points) {
        auto doublets = nlohmann::ordered_json::array();
        for (const auto& d : point.doublets)
            doublets.push_back({{"rung", d.rung},
                                {"parity", to_string(d.parity)},
                                {"omega_plus", d.from_plus},
                                {"omega_minus", d.from_minus},
                                {"splitting", d.splitting()},
                                {"rabi", d.rabi}});
        points.push_back({{scan.axis, point.axis_value}, {"doublets", std::move(doublets)}});
    }
    return {{"axis", scan.axis}, {"meta", to_json(scan.meta)}, {"points", std::move(points)}};
}

nlohmann::ordered_json to_json(const SpectrumResult& spectrum) {
    const auto& m = spectrum.meta;
    return {{"meta",
             {{"code_version", code_version()},
              {"params", to_json(m.params)},
              {"effective_lambda", m.effective_lambda},
              {"n_max", m.n_max},
              {"cutoff_valid", m.cutoff_valid},
              {"critical_limit", m.critical_limit},
              {"method", to_string(m.method)},
              {"fell_back", m.fell_back},
              {"normalization", m.normalization},
              {"mean_photons", m.mean_photons},
              {"eigenbasis_condition", number(m.eigenbasis_condition)}}},
            {"omega", numbers(spectrum.omega)},
            {"intensity", numbers(spectrum.intensity)}};
}

nlohmann::ordered_json to_json(const G2Scan& scan) {
    auto records = nlohmann::ordered_json::array();
    for (const auto& r : scan.records)
        records.push_back({{"lambda", r.lambda},
                           {"pump", r.pump},
                           {"g2", number(r.g2)},
                           {"mean_photons", r.mean_photons},
                           {"n_max", r.n_max},
                           {"cutoff_valid", r.cutoff_valid},
                           {"critical_limit", r.critical_limit},
                           {"defined", r.defined}});
    return {{"meta", to_json(scan.meta)},
            {"estimator", to_string(scan.estimator)},
            {"lambdas", numbers(scan.lambdas)},
            {"pumps", numbers(scan.pumps)},
            {"records", std::move(records)},
            {"warnings", scan.warnings}};
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw IoError(fmt::format("cannot create directory {}: {}", path.parent_path().string(), ec.message()));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
    out << content;
    out.flush();
    if (!out) throw IoError(fmt::format("failed while writing {}", path.string()));
}

}  // namespace rdjc
