#include "rdjc/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

namespace rdjc {
namespace {

// The m = -1 regression problem for a given steady state.
struct RegressionProblem {
    Superoperator l;           // dense m = -1 block
    VectorizedOperator start;  // a rho_ss on the block
    Vector<complex> readout;   // t . x = Tr[a^dagger X]
    double mean_photons;       // C(0)
};

RegressionProblem regression_problem(const SteadyState& state) {
    const MasterEquation eq = master_equation(state.params, state.cutoff);
    const CoherenceSector sector = coherence_sector(state.cutoff, -1);
    const OperatorMatrix a = cavity_annihilation(state.cutoff, state.params.deformation());
    const OperatorMatrix& rho = state.rho.matrix();
    RegressionProblem prob{Superoperator(sector_liouvillian(eq, sector)),
                           sector.restrict(vectorize(a * rho)),
                           // Tr[A X] = sum_{pq} A(q,p) X(p,q) = vec(A^T) . vec(X)
                           sector.restrict(vectorize(a.adjoint().transpose())),
                           state.rho.expectation(a.adjoint() * a).real()};
    return prob;
}

void validate_grid(std::span<const double> omega) {
    if (omega.empty()) throw ConfigError("frequency grid is empty");
    for (std::size_t k = 1; k < omega.size(); ++k)
        if (!(omega[k] > omega[k - 1])) throw ConfigError("frequency grid must be strictly ascending");
}

std::vector<double> eigenmode_spectrum(const RegressionProblem& prob, const Eigenmodes& modes,
                                       double omega_c, std::span<const double> omega) {
    const Vector<complex> c = modes.coefficients(prob.start);
    const Vector<complex> residues = (prob.readout.transpose() * modes.vectors()).transpose().cwiseProduct(c);
    const complex i_unit(0.0, 1.0);

    std::vector<Eigen::Index> kept;
    for (Eigen::Index k = 0; k < residues.size(); ++k) {
        if (std::abs(modes.values()(k).real()) < 1e-10) {
            // A stationary mode would be a coherent delta peak; without a coherent
            // drive <a>_ss = 0 and its residue must vanish.
            if (std::abs(residues(k)) >= 1e-10 * std::max(prob.mean_photons, 1e-300))
                throw NumericalError(fmt::format(
                    "stationary regression mode carries residue {:.3e}; coherent component unexpected",
                    std::abs(residues(k))));
            continue;
        }
        kept.push_back(k);
    }

    std::vector<double> s(omega.size());
    for (std::size_t w = 0; w < omega.size(); ++w) {
        const complex iw = i_unit * (omega_c + omega[w]);
        complex acc = 0.0;
        for (const Eigen::Index k : kept) acc += residues(k) / (iw - modes.values()(k));
        s[w] = 2.0 * acc.real();
    }
    return s;
}

// Uniform-step correlation record from repeated application of exp(L dt).
std::vector<complex> sampled_correlation(const RegressionProblem& prob, const SpectrumOptions& opt) {
    const Superoperator step = (prob.l * opt.time_step).exp();
    const auto window = static_cast<std::size_t>(std::ceil(opt.decay_window / opt.time_step));
    const auto max_steps = static_cast<std::size_t>(std::ceil(opt.max_time / opt.time_step));
    const double floor = opt.decay_tolerance * prob.mean_photons;

    std::vector<complex> c;
    VectorizedOperator x = prob.start;
    std::size_t quiet = 0;
    for (std::size_t k = 0; k <= max_steps; ++k) {
        const complex value = prob.readout.cwiseProduct(x).sum();
        c.push_back(value);
        quiet = std::abs(value) < floor ? quiet + 1 : 0;
        if (quiet >= window) break;
        x = step * x;
    }
    return c;
}

std::vector<double> discrete_spectrum(const std::vector<complex>& c, const SpectrumOptions& opt,
                                      double omega_c, std::span<const double> omega) {
    const std::size_t n = c.size();
    const auto taper_len = static_cast<std::size_t>(opt.taper_fraction * static_cast<double>(n));
    std::vector<double> weight(n, opt.time_step);
    weight[0] = opt.time_step / 2;
    for (std::size_t k = 0; k < taper_len; ++k) {
        // Half-cosine from 1 down to 0 over the tail.
        const double x = static_cast<double>(k + 1) / static_cast<double>(taper_len + 1);
        weight[n - taper_len + k] *= 0.5 * (1.0 + std::cos(std::numbers::pi * x));
    }

    std::vector<double> s(omega.size());
    for (std::size_t w = 0; w < omega.size(); ++w) {
        const double freq = omega_c + omega[w];
        const complex rotation = std::polar(1.0, -freq * opt.time_step);
        complex phase = 1.0;
        complex acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            acc += weight[k] * c[k] * phase;
            phase *= rotation;
        }
        s[w] = 2.0 * acc.real();
    }
    return s;
}

}  // namespace

CorrelationResult correlation(const SteadyState& state, std::span<const double> tau,
                              const PropagationOptions& options) {
    const RegressionProblem prob = regression_problem(state);
    const Trajectory traj = propagate(prob.l, prob.start, tau, options);
    CorrelationResult out{{tau.begin(), tau.end()}, {}, state.cutoff.n_max(), traj.method,
                          traj.fell_back, state.critical_limit};
    out.values.reserve(tau.size());
    for (const auto& x : traj.states) out.values.push_back(prob.readout.cwiseProduct(x).sum());
    return out;
}

CorrelationResult correlation(const SystemParams& p, const SteadyStateOptions& steady,
                              std::span<const double> tau, const PropagationOptions& options) {
    return correlation(solve_steady_state(p, steady), tau, options);
}

std::string to_string(SpectrumMethod method) {
    return method == SpectrumMethod::Eigenmodes ? "eigenmodes" : "discrete-transform";
}

std::vector<double> default_omega_grid() {
    std::vector<double> grid(2001);
    for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = -3.0 + 6.0 * static_cast<double>(k) / 2000.0;
    return grid;
}

SpectrumResult emission_spectrum(const SteadyState& state, std::span<const double> omega,
                                 const SpectrumOptions& options) {
    validate_grid(omega);
    if (!(options.time_step > 0) || !(options.max_time > options.time_step))
        throw ConfigError("discrete-transform time step and span must be positive");

    const RegressionProblem prob = regression_problem(state);
    SpectrumResult out{{omega.begin(), omega.end()},
                       {},
                       {state.params, state.params.lambda, state.cutoff.n_max(), state.cutoff_valid,
                        state.critical_limit, options.method, false,
                        options.peak_normalize ? "peak" : "arbitrary", prob.mean_photons,
                        std::numeric_limits<double>::quiet_NaN()}};
    if (state.critical_limit) out.meta.params.lambda = DeformationParam::lower_bound;

    SpectrumMethod method = options.method;
    if (method == SpectrumMethod::Eigenmodes) {
        const Eigenmodes modes(prob.l);
        out.meta.eigenbasis_condition = modes.condition();
        if (modes.condition() <= options.max_condition) {
            out.intensity = eigenmode_spectrum(prob, modes, state.params.omega_c, omega);
        } else {
            method = SpectrumMethod::DiscreteTransform;
            out.meta.fell_back = true;
        }
    }
    if (method == SpectrumMethod::DiscreteTransform)
        out.intensity = discrete_spectrum(sampled_correlation(prob, options), options,
                                          state.params.omega_c, omega);
    out.meta.method = method;

    const double peak = *std::max_element(out.intensity.begin(), out.intensity.end());
    const double lowest = *std::min_element(out.intensity.begin(), out.intensity.end());
    if (peak > 0 && lowest < -1e-9 * peak && method == SpectrumMethod::Eigenmodes)
        throw NumericalError(fmt::format("spectrum dips to {:.3e} below zero (peak {:.3e})", lowest, peak));
    if (options.peak_normalize && peak > 0)
        for (double& v : out.intensity) v /= peak;
    return out;
}

SpectrumResult emission_spectrum(const SystemParams& p, std::span<const double> omega,
                                 const SteadyStateOptions& steady, const SpectrumOptions& options) {
    return emission_spectrum(solve_steady_state(p, steady), omega, options);
}

std::vector<double> find_peaks(const SpectrumResult& s, double rel_threshold) {
    std::vector<double> peaks;
    if (s.intensity.size() < 3) return peaks;
    const double top = *std::max_element(s.intensity.begin(), s.intensity.end());
    for (std::size_t k = 1; k + 1 < s.intensity.size(); ++k) {
        const double v = s.intensity[k];
        if (v > s.intensity[k - 1] && v > s.intensity[k + 1] && v > rel_threshold * top)
            peaks.push_back(s.omega[k]);
    }
    return peaks;
}

std::string to_string(G2Estimator estimator) {
    return estimator == G2Estimator::DeformedField ? "deformed-field" : "photon-number";
}

double g2_zero(const DensityMatrix& rho, FockCutoff cutoff, DeformationParam lambda, G2Estimator estimator) {
    if (rho.dim() != hilbert_dim(cutoff)) throw ConfigError("density matrix does not match the cutoff");
    OperatorMatrix numerator_op;
    OperatorMatrix denominator_op;
    if (estimator == G2Estimator::DeformedField) {
        const OperatorMatrix a = cavity_annihilation(cutoff, lambda);
        const OperatorMatrix ad = a.adjoint();
        denominator_op = ad * a;
        numerator_op = ad * ad * a * a;
    } else {
        const OperatorMatrix n = lift_cavity<complex>(number<complex>(cutoff));
        denominator_op = n;
        numerator_op = n * (n - OperatorMatrix::Identity(n.rows(), n.cols()));
    }
    const double mean = rho.expectation(denominator_op).real();
    if (mean < 1e-14)
        throw UndefinedStatisticsError(
            fmt::format("g2(0) undefined: cavity occupation {:.3e} is below 1e-14", mean));
    return rho.expectation(numerator_op).real() / (mean * mean);
}

G2Result g2_zero(const SteadyState& state, G2Estimator estimator) {
    const OperatorMatrix a = cavity_annihilation(state.cutoff, state.params.deformation());
    return {g2_zero(state.rho, state.cutoff, state.params.deformation(), estimator),
            state.rho.expectation(a.adjoint() * a).real(), state.cutoff.n_max(), state.cutoff_valid,
            state.critical_limit};
}

G2Result g2_zero(const SystemParams& p, const SteadyStateOptions& steady, G2Estimator estimator) {
    return g2_zero(solve_steady_state(p, steady), estimator);
}

}  // namespace rdjc
