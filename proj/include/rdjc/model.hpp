#pragma once

// Deformed Jaynes-Cummings model on the composite emitter x Fock space.
//
// Basis ordering is emitter-major: |G,0>, ..., |G,n_max>, |X,0>, ..., |X,n_max>,
// so the composite index of |s, n> is s * (n_max + 1) + n with G = 0, X = 1.
// Cavity operators lift as I_2 (x) A and emitter operators as S (x) I_F.

#include <array>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "rdjc/algebra.hpp"

namespace rdjc {

/// Physical constants in units of the coupling g (g = 1 by default).
struct SystemParams {
    double omega_c = 0.0;  ///< cavity frequency; transition energies are reported relative to it
    double delta = 0.0;    ///< detuning omega_x - omega_c
    double g = 1.0;
    double lambda = 0.0;
    double kappa = 0.0;  ///< cavity decay
    double gamma = 0.0;  ///< emitter spontaneous emission
    double pump = 0.0;   ///< incoherent emitter pump P
    double nbar = 0.0;   ///< thermal occupation of the cavity bath

    double omega_x() const { return omega_c + delta; }
    DeformationParam deformation() const { return DeformationParam(lambda); }

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;

    /// kappa/g = 0.083, gamma/g = 0.017, P/g = 0.05 at the given lambda and delta.
    static SystemParams reference_rates(double lambda, double delta = 0.0);
};

enum class Emitter { Ground = 0, Excited = 1 };

struct BareState {
    Emitter emitter;
    int photons;

    Eigen::Index index(FockCutoff cutoff) const {
        return static_cast<Eigen::Index>(emitter) * cutoff.dim() + photons;
    }
    static BareState from_index(Eigen::Index index, FockCutoff cutoff) {
        return {index < cutoff.dim() ? Emitter::Ground : Emitter::Excited,
                static_cast<int>(index % cutoff.dim())};
    }
    /// Eigenvalue of N + sigma_z / 2 + 1/2, the conserved excitation count.
    int excitations() const { return photons + static_cast<int>(emitter); }
};

inline Eigen::Index hilbert_dim(FockCutoff cutoff) { return 2 * cutoff.dim(); }

/// Excitation count of every composite basis state, in index order.
std::vector<int> excitation_numbers(FockCutoff cutoff);

template <typename Scalar = complex>
Matrix<Scalar> lift_cavity(const Matrix<Scalar>& fock_op) {
    return Eigen::kroneckerProduct(Matrix<Scalar>::Identity(2, 2), fock_op).eval();
}

template <typename Scalar = complex>
Matrix<Scalar> lift_emitter(const Matrix<Scalar>& emitter_op, FockCutoff cutoff) {
    return Eigen::kroneckerProduct(emitter_op, Matrix<Scalar>::Identity(cutoff.dim(), cutoff.dim()))
        .eval();
}

/// Deformed cavity annihilation operator on the composite space.
template <typename Scalar = complex>
Matrix<Scalar> cavity_annihilation(FockCutoff cutoff, DeformationParam lambda) {
    return lift_cavity<Scalar>(annihilation<Scalar>(cutoff, lambda));
}

/// sigma = |G><X|.
template <typename Scalar = complex>
Matrix<Scalar> emitter_lowering(FockCutoff cutoff) {
    Matrix<Scalar> s = Matrix<Scalar>::Zero(2, 2);
    s(0, 1) = Scalar(1);
    return lift_emitter<Scalar>(s, cutoff);
}

/// sigma_z = |X><X| - |G><G|.
template <typename Scalar = complex>
Matrix<Scalar> emitter_inversion(FockCutoff cutoff) {
    Matrix<Scalar> sz = Matrix<Scalar>::Zero(2, 2);
    sz(0, 0) = Scalar(-1);
    sz(1, 1) = Scalar(1);
    return lift_emitter<Scalar>(sz, cutoff);
}

/// H = (omega_c / 2){a, a^dagger} + (omega_x / 2) sigma_z + g (a^dagger sigma + a sigma^dagger).
///
/// Built from the truncated matrices, so the diagonal on Fock level n_max
/// misses the dropped a a^dagger contribution. Rungs up to n_max - 1 are exact.
template <typename Scalar = complex>
Matrix<Scalar> hamiltonian(const SystemParams& p, FockCutoff cutoff) {
    p.validate();
    const Matrix<Scalar> a = cavity_annihilation<Scalar>(cutoff, p.deformation());
    const Matrix<Scalar> ad = a.adjoint();
    const Matrix<Scalar> s = emitter_lowering<Scalar>(cutoff);
    const Matrix<Scalar> sd = s.adjoint();
    return Scalar(p.omega_c / 2) * anticommutator(a, ad) +
           Scalar(p.omega_x() / 2) * emitter_inversion<Scalar>(cutoff) +
           Scalar(p.g) * (ad * s + a * sd);
}

// Analytic ladder. Rung n >= 1 is the invariant pair {|G,n>, |X,n-1>};
// rung 0 is |G,0> alone.

Eigen::Matrix2d block_hamiltonian(int n, const SystemParams& p);

/// sqrt(4 g^2 (n + 2 lambda xi(n)) + delta^2); zero for n = 0.
double generalized_rabi(int n, const SystemParams& p);

struct DressedPair {
    double minus;
    double plus;
};

/// E_{n+-} = omega_c (n + lambda) +- R_n / 2.
DressedPair dressed_energies(int n, const SystemParams& p);

struct DressedLevel {
    int rung;
    int branch;  ///< +1 or -1
    double energy;
    Eigen::Vector2d eigenvector;  ///< components on {|G,n>, |X,n-1>}
};

std::array<DressedLevel, 2> dressed_levels(int n, const SystemParams& p);

/// <G,0|H|G,0> = lambda omega_c - delta / 2.
double ground_energy(const SystemParams& p);

/// A pair of one-photon transition frequencies from rung n to rung n - 1.
///
/// Fields are labelled by the branch of the upper level, not sorted: for the
/// inner doublet `from_plus` is E_{n+} - E_{n-1,+}. Use low()/high() for the
/// sorted pair.
struct Doublet {
    double from_plus;
    double from_minus;

    double low() const { return std::min(from_plus, from_minus); }
    double high() const { return std::max(from_plus, from_minus); }
    /// from_plus - from_minus; its sign flips when the branches swap.
    double splitting() const { return from_plus - from_minus; }
};

/// Same-branch transitions. For n >= 2 this is omega_c +- (R_n - R_{n-1}) / 2;
/// for n = 1 the lower level is the ground state and the pair is
/// omega_c + delta / 2 +- R_1 / 2.
Doublet inner_doublet(int n, const SystemParams& p);

/// Cross-branch transitions omega_c +- (R_n + R_{n-1}) / 2, n >= 2.
Doublet outer_doublet(int n, const SystemParams& p);

enum class TransitionParity { Even, Odd };

/// Parity of the transition rung n -> n - 1 (that of the upper rung).
TransitionParity transition_parity(int n);

std::string to_string(TransitionParity parity);

}  // namespace rdjc
