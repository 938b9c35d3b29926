#include "rdjc/scans.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace rdjc {
namespace {

void require_grid(std::span<const double> grid, const char* name) {
    if (grid.empty()) throw ConfigError(fmt::format("{} grid is empty", name));
    for (double v : grid)
        if (!std::isfinite(v)) throw ConfigError(fmt::format("{} grid contains a non-finite value", name));
}

void require_rungs(int n_rungs) {
    if (n_rungs < 1) throw ConfigError(fmt::format("number of rungs must be >= 1, got {}", n_rungs));
}

std::vector<DoubletRecord> ladder_row(const SystemParams& p, int n_rungs) {
    if (!(p.g > 0)) throw ConfigError("ladder scans report frequencies in units of g and need g > 0");
    std::vector<DoubletRecord> row;
    row.reserve(static_cast<std::size_t>(n_rungs));
    for (int n = 1; n <= n_rungs; ++n) {
        const Doublet d = inner_doublet(n, p);
        row.push_back({n, transition_parity(n), (d.from_plus - p.omega_c) / p.g,
                       (d.from_minus - p.omega_c) / p.g, generalized_rabi(n, p) / p.g});
    }
    return row;
}

ScanMetadata metadata(const SystemParams& p, std::string method) {
    return {code_version(), p, std::move(method)};
}

}  // namespace

std::string code_version() { return RDJC_VERSION; }

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw ConfigError("grid needs at least one point");
    if (n == 1) return {lo};
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
    v.back() = hi;
    return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
    if (!(lo > 0) || !(hi > 0)) throw ConfigError("log-spaced grid bounds must be positive");
    std::vector<double> v = linspace(std::log10(lo), std::log10(hi), n);
    for (double& x : v) x = std::pow(10.0, x);
    v.front() = lo;
    if (n > 1) v.back() = hi;
    return v;
}

LadderScan doublets_vs_lambda(const SystemParams& base, std::span<const double> lambdas, int n_rungs) {
    require_grid(lambdas, "lambda");
    require_rungs(n_rungs);
    LadderScan scan{"lambda", {}, metadata(base, "closed-form")};
    for (const double lambda : lambdas) {
        // Grids may overshoot the admissible range; the closed forms clamp at -1/2.
        SystemParams p = base;
        p.lambda = std::max(lambda, DeformationParam::lower_bound);
        scan.points.push_back({p.lambda, ladder_row(p, n_rungs)});
    }
    return scan;
}

LadderScan doublets_vs_detuning(const SystemParams& base, std::span<const double> deltas, int n_rungs) {
    require_grid(deltas, "delta");
    require_rungs(n_rungs);
    LadderScan scan{"delta", {}, metadata(base, "closed-form")};
    for (const double delta : deltas) {
        SystemParams p = base;
        p.delta = delta * base.g;
        scan.points.push_back({delta, ladder_row(p, n_rungs)});
    }
    return scan;
}

std::vector<SpectrumConfig> reference_spectrum_configs() {
    return {{0.0, 0.0}, {0.5, 0.0}, {-0.5, 0.0}, {0.0, 0.7}, {0.9, 0.7}};
}

std::vector<SpectrumResult> spectra_suite(std::span<const SpectrumConfig> configs, const SystemParams& rates,
                                          std::span<const double> omega, const SteadyStateOptions& steady,
                                          const SpectrumOptions& options, int workers) {
    if (configs.empty()) throw ConfigError("spectrum suite has no configurations");
    std::vector<SpectrumResult> out(configs.size());
    parallel_for(configs.size(), workers, [&](std::size_t i) {
        SystemParams p = rates;
        p.lambda = configs[i].lambda;
        p.delta = configs[i].delta;
        out[i] = emission_spectrum(p, omega, steady, options);
    });
    for (const auto& s : out)
        if (!s.meta.cutoff_valid)
            throw PhysicsValidityError(fmt::format(
                "spectrum at lambda = {}, delta = {}: cutoff n_max = {} never reached the top-level "
                "tolerance",
                s.meta.params.lambda, s.meta.params.delta, s.meta.n_max));
    return out;
}

G2Scan g2_vs_pump(std::span<const double> lambdas, std::span<const double> pumps, const SystemParams& rates,
                  const SteadyStateOptions& steady, G2Estimator estimator, int workers) {
    require_grid(lambdas, "lambda");
    require_grid(pumps, "pump");
    G2Scan scan{{lambdas.begin(), lambdas.end()}, {pumps.begin(), pumps.end()}, {}, {}, estimator,
                metadata(rates, "steady-state sector solve")};
    scan.meta.cutoff_policy_used = true;
    scan.meta.cutoff = steady.cutoff;
    scan.records.resize(lambdas.size() * pumps.size());
    std::vector<std::string> notes(scan.records.size());

    parallel_for(scan.records.size(), workers, [&](std::size_t k) {
        SystemParams p = rates;
        p.lambda = lambdas[k / pumps.size()];
        p.pump = pumps[k % pumps.size()];
        const SteadyState ss = solve_steady_state(p, steady);
        const OperatorMatrix a = cavity_annihilation(ss.cutoff, ss.params.deformation());
        G2Record rec{p.lambda, p.pump, std::numeric_limits<double>::quiet_NaN(),
                     ss.rho.expectation(a.adjoint() * a).real(), ss.cutoff.n_max(), ss.cutoff_valid,
                     ss.critical_limit, false};
        try {
            rec.g2 = g2_zero(ss, estimator).value;
            rec.defined = true;
        } catch (const UndefinedStatisticsError& e) {
            notes[k] = fmt::format("lambda = {}, P = {}: {}", p.lambda, p.pump, e.what());
        }
        scan.records[k] = rec;
    });

    for (auto& n : notes)
        if (!n.empty()) scan.warnings.push_back(std::move(n));
    for (const auto& r : scan.records)
        if (!r.cutoff_valid)
            throw PhysicsValidityError(fmt::format(
                "g2 scan point lambda = {}, P = {}: cutoff n_max = {} never reached the top-level tolerance",
                r.lambda, r.pump, r.n_max));
    return scan;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace rdjc
