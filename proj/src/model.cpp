#include "rdjc/model.hpp"

#include <cmath>

#include <fmt/format.h>

namespace rdjc {
namespace {

void require_rung(int n, int minimum, const char* what) {
    if (n < minimum) throw ConfigError(fmt::format("{} requires rung n >= {}, got {}", what, minimum, n));
}

}  // namespace

void SystemParams::validate() const {
    const auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(omega_c) || !finite(delta) || !finite(g) || !finite(lambda) || !finite(kappa) ||
        !finite(gamma) || !finite(pump) || !finite(nbar))
        throw ConfigError("system parameters must be finite");
    if (g < 0) throw ConfigError(fmt::format("coupling g must be >= 0, got {}", g));
    if (kappa < 0) throw ConfigError(fmt::format("kappa must be >= 0, got {}", kappa));
    if (gamma < 0) throw ConfigError(fmt::format("gamma must be >= 0, got {}", gamma));
    if (pump < 0) throw ConfigError(fmt::format("pump must be >= 0, got {}", pump));
    if (nbar < 0) throw ConfigError(fmt::format("nbar must be >= 0, got {}", nbar));
    DeformationParam{lambda};
}

SystemParams SystemParams::reference_rates(double lambda, double delta) {
    SystemParams p;
    p.lambda = lambda;
    p.delta = delta;
    p.kappa = 0.083;
    p.gamma = 0.017;
    p.pump = 0.05;
    return p;
}

std::vector<int> excitation_numbers(FockCutoff cutoff) {
    std::vector<int> exc(static_cast<std::size_t>(hilbert_dim(cutoff)));
    for (Eigen::Index i = 0; i < hilbert_dim(cutoff); ++i)
        exc[static_cast<std::size_t>(i)] = BareState::from_index(i, cutoff).excitations();
    return exc;
}

Eigen::Matrix2d block_hamiltonian(int n, const SystemParams& p) {
    require_rung(n, 1, "block_hamiltonian");
    p.validate();
    const double diag = (n + p.lambda) * p.omega_c;
    const double coupling = p.g * std::sqrt(deformed_occupation(n, p.lambda));
    Eigen::Matrix2d h;
    h << diag - p.delta / 2, coupling, coupling, diag + p.delta / 2;
    return h;
}

double generalized_rabi(int n, const SystemParams& p) {
    require_rung(n, 0, "generalized_rabi");
    if (n == 0) return 0.0;
    return std::sqrt(4 * p.g * p.g * deformed_occupation(n, p.lambda) + p.delta * p.delta);
}

DressedPair dressed_energies(int n, const SystemParams& p) {
    require_rung(n, 1, "dressed_energies");
    p.validate();
    const double centre = p.omega_c * (n + p.lambda);
    const double half = generalized_rabi(n, p) / 2;
    return {centre - half, centre + half};
}

std::array<DressedLevel, 2> dressed_levels(int n, const SystemParams& p) {
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(block_hamiltonian(n, p));
    const DressedPair e = dressed_energies(n, p);
    // Energies from the closed form; eigenvectors from the block.
    return {DressedLevel{n, -1, e.minus, solver.eigenvectors().col(0)},
            DressedLevel{n, +1, e.plus, solver.eigenvectors().col(1)}};
}

double ground_energy(const SystemParams& p) {
    p.validate();
    return p.lambda * p.omega_c - p.delta / 2;
}

Doublet inner_doublet(int n, const SystemParams& p) {
    require_rung(n, 1, "inner_doublet");
    p.validate();
    if (n == 1) {
        const double centre = p.omega_c + p.delta / 2;
        const double half = generalized_rabi(1, p) / 2;
        return {centre + half, centre - half};
    }
    const double half = (generalized_rabi(n, p) - generalized_rabi(n - 1, p)) / 2;
    return {p.omega_c + half, p.omega_c - half};
}

Doublet outer_doublet(int n, const SystemParams& p) {
    require_rung(n, 2, "outer_doublet");
    p.validate();
    const double half = (generalized_rabi(n, p) + generalized_rabi(n - 1, p)) / 2;
    // E_{n+} - E_{n-1,-} and E_{n-} - E_{n-1,+}
    return {p.omega_c + half, p.omega_c - half};
}

TransitionParity transition_parity(int n) {
    require_rung(n, 1, "transition_parity");
    return n % 2 == 0 ? TransitionParity::Even : TransitionParity::Odd;
}

std::string to_string(TransitionParity parity) {
    return parity == TransitionParity::Even ? "even" : "odd";
}

}  // namespace rdjc
