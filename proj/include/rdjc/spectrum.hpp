#pragma once

// Cavity emission spectrum and zero-delay photon statistics.
//
// Quantum regression: C(tau) = <a^dagger(tau) a(0)> = Tr[a^dagger exp(L tau)(a rho_ss)].
// a rho_ss lives in the coherence sector m = -1, so only that block of L is
// ever diagonalised. With C(tau) = sum_k r_k exp(mu_k tau) and
// C(-tau) = C(tau)^*, the two-sided transform is
//
//   S(omega) = 2 Re sum_k r_k / (i omega - mu_k).

#include <span>
#include <string>
#include <vector>

#include "rdjc/dynamics.hpp"

namespace rdjc {

struct CorrelationResult {
    std::vector<double> tau;
    std::vector<complex> values;
    int n_max;
    PropagationMethod method;
    bool fell_back;
    bool critical_limit;
};

CorrelationResult correlation(const SteadyState& state, std::span<const double> tau,
                              const PropagationOptions& options = {});

CorrelationResult correlation(const SystemParams& p, const SteadyStateOptions& steady,
                              std::span<const double> tau, const PropagationOptions& options = {});

enum class SpectrumMethod { Eigenmodes, DiscreteTransform };

std::string to_string(SpectrumMethod method);

struct SpectrumOptions {
    SpectrumMethod method = SpectrumMethod::Eigenmodes;
    bool peak_normalize = false;
    /// Eigenbasis condition number above which the eigenmode path falls back.
    double max_condition = 1e10;
    // Discrete-transform path: uniform step, and the correlation is followed
    // until |C| stays below decay_tolerance * C(0) over a window of
    // decay_window time units (or max_time is hit).
    double time_step = 0.02;
    double decay_tolerance = 1e-9;
    double decay_window = 50.0;
    double max_time = 2e4;
    /// Fraction of the record tapered by a half-cosine window.
    double taper_fraction = 0.1;
};

struct SpectrumMetadata {
    SystemParams params;
    /// lambda actually used (shifted in the critical limit).
    double effective_lambda;
    int n_max;
    bool cutoff_valid;
    bool critical_limit;
    SpectrumMethod method;
    bool fell_back;
    std::string normalization;  ///< "arbitrary" or "peak"
    double mean_photons;
    double eigenbasis_condition;  ///< NaN on the discrete path
};

/// omega is measured from omega_c in units of g; intensity is arbitrary units.
struct SpectrumResult {
    std::vector<double> omega;
    std::vector<double> intensity;
    SpectrumMetadata meta;
};

/// 2001 points over [-3g, 3g] around omega_c.
std::vector<double> default_omega_grid();

SpectrumResult emission_spectrum(const SystemParams& p, std::span<const double> omega,
                                 const SteadyStateOptions& steady = {},
                                 const SpectrumOptions& options = {});

SpectrumResult emission_spectrum(const SteadyState& state, std::span<const double> omega,
                                 const SpectrumOptions& options = {});

/// Strict interior local maxima above rel_threshold times the global maximum.
std::vector<double> find_peaks(const SpectrumResult& s, double rel_threshold = 0.02);

enum class G2Estimator {
    /// <a^dagger a^dagger a a> / <a^dagger a>^2 with the deformed field.
    DeformedField,
    /// <N (N - 1)> / <N>^2 with the photon-number operator.
    PhotonNumber,
};

std::string to_string(G2Estimator estimator);

/// Throws UndefinedStatisticsError when the denominator expectation is below 1e-14.
double g2_zero(const DensityMatrix& rho, FockCutoff cutoff, DeformationParam lambda,
               G2Estimator estimator = G2Estimator::DeformedField);

struct G2Result {
    double value;
    double mean_photons;  ///< <a^dagger a>
    int n_max;
    bool cutoff_valid;
    bool critical_limit;
};

G2Result g2_zero(const SystemParams& p, const SteadyStateOptions& steady = {},
                 G2Estimator estimator = G2Estimator::DeformedField);

G2Result g2_zero(const SteadyState& state, G2Estimator estimator = G2Estimator::DeformedField);

}  // namespace rdjc
