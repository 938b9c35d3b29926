#pragma once

// Parameter sweeps behind the ladder, spectrum and photon-statistics figures.
// Ladder scans use the closed forms and need no cutoff; spectrum and g2 scans
// solve the master equation per point and refuse to return points whose
// cutoff never validated.

#include <algorithm>
#include <atomic>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "rdjc/spectrum.hpp"

namespace rdjc {

std::string code_version();

/// n evenly spaced points over [lo, hi]; n = 1 yields {lo}.
std::vector<double> linspace(double lo, double hi, int n);
/// n log-spaced points over [lo, hi], lo > 0.
std::vector<double> logspace(double lo, double hi, int n);

struct ScanMetadata {
    std::string code_version;
    SystemParams params;
    std::string method;
    bool cutoff_policy_used = false;
    CutoffPolicy cutoff{};
};

/// One inner doublet, expressed relative to omega_c in units of g.
struct DoubletRecord {
    int rung;
    TransitionParity parity;
    double from_plus;
    double from_minus;
    double rabi;  ///< R_n in units of g

    double splitting() const { return from_plus - from_minus; }
};

struct LadderPoint {
    double axis_value;
    std::vector<DoubletRecord> doublets;
};

struct LadderScan {
    std::string axis;  ///< "lambda" or "delta"
    std::vector<LadderPoint> points;
    ScanMetadata meta;
};

LadderScan doublets_vs_lambda(const SystemParams& base, std::span<const double> lambdas,
                              int n_rungs = 19);

/// delta grid in units of g; lambda from `base`.
LadderScan doublets_vs_detuning(const SystemParams& base, std::span<const double> deltas,
                                int n_rungs = 3);

struct SpectrumConfig {
    double lambda;
    double delta;
};

/// (0, 0), (0.5, 0), (-0.5, 0), (0, 0.7), (0.9, 0.7).
std::vector<SpectrumConfig> reference_spectrum_configs();

/// One spectrum per config at the rates in `rates` (lambda and delta overridden).
std::vector<SpectrumResult> spectra_suite(std::span<const SpectrumConfig> configs,
                                          const SystemParams& rates,
                                          std::span<const double> omega,
                                          const SteadyStateOptions& steady = {},
                                          const SpectrumOptions& options = {}, int workers = 1);

struct G2Record {
    double lambda;
    double pump;
    double g2;  ///< NaN when undefined
    double mean_photons;
    int n_max;
    bool cutoff_valid;
    bool critical_limit;
    bool defined;
};

struct G2Scan {
    std::vector<double> lambdas;
    std::vector<double> pumps;
    /// lambda-major: records[i * pumps.size() + j] is (lambdas[i], pumps[j]).
    std::vector<G2Record> records;
    std::vector<std::string> warnings;
    G2Estimator estimator;
    ScanMetadata meta;
};

G2Scan g2_vs_pump(std::span<const double> lambdas, std::span<const double> pumps,
                  const SystemParams& rates, const SteadyStateOptions& steady = {},
                  G2Estimator estimator = G2Estimator::DeformedField, int workers = 1);

int resolve_workers(int requested);

/// Runs f(i) for i in [0, n) on up to `workers` threads. Results must be
/// written by index; the first exception by index is rethrown.
template <typename F>
void parallel_for(std::size_t n, int workers, F&& f) {
    const auto threads = static_cast<std::size_t>(std::max(1, std::min<int>(resolve_workers(workers), static_cast<int>(n))));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace rdjc
