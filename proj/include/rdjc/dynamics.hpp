#pragma once

// Lindblad dynamics
//
//   d rho / dt = -i [H, rho] + sum_k (rate_k / 2) L_{O_k}(rho),
//   L_O(rho)   = 2 O rho O^dagger - O^dagger O rho - rho O^dagger O,
//
// with channels (kappa (1 + nbar), a), (kappa nbar, a^dagger), (gamma, sigma)
// and (P, sigma^dagger).
//
// Vectorization is column stacking: vec(A X B) = (B^T (x) A) vec(X).
//
// Every channel and the Hamiltonian commute with the excitation count, so the
// Liouvillian is block diagonal in the coherence order
// m = exc(row) - exc(col). Steady states live in m = 0 and the regression
// vector a rho_ss in m = -1. The sector blocks are small and sparse, which is
// what makes large cutoffs affordable; the full dense superoperator is kept as
// the reference construction.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "rdjc/model.hpp"

namespace rdjc {

VectorizedOperator vectorize(const OperatorMatrix& op);
OperatorMatrix unvectorize(const VectorizedOperator& v);

/// Row functional t with t . vec(X) = Tr[X].
Vector<complex> trace_functional(Eigen::Index dim);

/// rho -> 2 O rho O^dagger - O^dagger O rho - rho O^dagger O.
Superoperator lindblad_term(const OperatorMatrix& jump);

/// rho -> -i [H, rho].
Superoperator hamiltonian_term(const OperatorMatrix& h);

struct Dissipator {
    std::string name;
    double rate;  ///< the channel contributes (rate / 2) L_jump
    OperatorMatrix jump;
};

struct MasterEquation {
    FockCutoff cutoff;
    SystemParams params;
    OperatorMatrix hamiltonian;
    std::vector<Dissipator> channels;
};

/// Channels with zero rate are omitted; the thermal a^dagger channel is added
/// only when nbar > 0.
MasterEquation master_equation(const SystemParams& p, FockCutoff cutoff);

Superoperator assemble(const MasterEquation& eq);

/// Zero-temperature Liouvillian. Requires nbar == 0.
Superoperator liouvillian(const SystemParams& p, FockCutoff cutoff);

/// Cavity channels (kappa (1 + nbar) / 2) L_a + (kappa nbar / 2) L_{a^dagger}.
/// Identical to liouvillian() at nbar = 0.
Superoperator thermal_liouvillian(const SystemParams& p, FockCutoff cutoff);

/// Bose-Einstein occupation 1 / (exp(omega / T) - 1).
double bose_einstein(double omega, double temperature);

/// Vec indices (i + j*D) with exc(i) - exc(j) == order, ascending.
struct CoherenceSector {
    int order;
    Eigen::Index hilbert_dim;
    std::vector<Eigen::Index> indices;

    Eigen::Index size() const { return static_cast<Eigen::Index>(indices.size()); }
    VectorizedOperator restrict(const VectorizedOperator& full) const;
    VectorizedOperator embed(const VectorizedOperator& local) const;
};

CoherenceSector coherence_sector(FockCutoff cutoff, int order);

/// The Liouvillian block on one coherence sector, built directly from the
/// operators without forming the full superoperator.
Eigen::SparseMatrix<complex> sector_liouvillian(const MasterEquation& eq,
                                                const CoherenceSector& sector);

/// Same block cut out of a dense superoperator.
Superoperator restrict(const Superoperator& l, const CoherenceSector& sector);

/// Hermitian, unit-trace, positive semidefinite state. Construction validates
/// and throws PhysicsValidityError with diagnostics on failure.
class DensityMatrix {
public:
    static constexpr double hermiticity_tolerance = 1e-12;
    static constexpr double trace_tolerance = 1e-12;
    static constexpr double positivity_tolerance = 1e-10;

    explicit DensityMatrix(OperatorMatrix rho);

    const OperatorMatrix& matrix() const { return rho_; }
    Eigen::Index dim() const { return rho_.rows(); }
    double min_eigenvalue() const { return min_eigenvalue_; }
    complex expectation(const OperatorMatrix& op) const { return (op * rho_).trace(); }

private:
    OperatorMatrix rho_;
    double min_eigenvalue_;
};

/// Population of Fock level n_max summed over both emitter states.
double top_fock_population(const OperatorMatrix& rho, FockCutoff cutoff);

/// Steady state of a dense Liouvillian: solve L x = 0 with the first equation
/// replaced by Tr[x] = 1. Throws DegenerateSteadyStateError when the null
/// space is not one dimensional and NumericalError when the residual
/// ||L x||_inf exceeds 1e-10 ||L||_inf.
DensityMatrix steady_state(const Superoperator& l);

struct CutoffPolicy {
    int initial = 15;
    int maximum = 480;
    double top_tolerance = 1e-8;

    void validate() const;
};

/// At lambda = -1/2 the element <0|a|1> vanishes and {|G,0>, |X,0>} decouples
/// from the rest of the ladder, so the steady state is not unique.
/// OneSidedLimit evaluates at lambda = -1/2 + critical_lambda_offset, the
/// limit of the unique steady states from above. Strict reports degeneracy.
enum class CriticalPointMode { OneSidedLimit, Strict };

inline constexpr double critical_lambda_offset = 1e-6;

struct SteadyStateOptions {
    CutoffPolicy cutoff{};
    CriticalPointMode critical = CriticalPointMode::OneSidedLimit;
};

struct SteadyState {
    DensityMatrix rho;
    FockCutoff cutoff;
    /// Parameters actually used (lambda shifted in the critical limit).
    SystemParams params;
    double top_population;
    /// ||L vec(rho)||_inf / ||L||_inf on the steady-state sector.
    double relative_residual;
    bool cutoff_valid;
    bool critical_limit;
};

/// Production steady-state solver: works on the m = 0 sector and raises the
/// cutoff (doubling, capped at policy.maximum) until the top Fock level holds
/// less than policy.top_tolerance. Returns with cutoff_valid = false if the
/// cap is reached first.
SteadyState solve_steady_state(const SystemParams& p, const SteadyStateOptions& options = {});

/// Steady state at a fixed cutoff via the m = 0 sector.
SteadyState solve_steady_state(const SystemParams& p, FockCutoff cutoff,
                               CriticalPointMode critical = CriticalPointMode::OneSidedLimit);

/// Right eigendecomposition L = V diag(values) V^{-1}.
class Eigenmodes {
public:
    explicit Eigenmodes(const Superoperator& l);

    const Vector<complex>& values() const { return values_; }
    const Matrix<complex>& vectors() const { return vectors_; }
    /// Reciprocal-condition estimate of V inverted; large means non-normal
    /// trouble.
    double condition() const { return condition_; }
    /// c with V c = v.
    Vector<complex> coefficients(const VectorizedOperator& v) const;
    VectorizedOperator evolve(const Vector<complex>& coefficients, double tau) const;

private:
    Vector<complex> values_;
    Matrix<complex> vectors_;
    Eigen::PartialPivLU<Matrix<complex>> lu_;
    double condition_;
};

enum class PropagationMethod { Eigenmodes, MatrixExponential };

std::string to_string(PropagationMethod method);

struct PropagationOptions {
    PropagationMethod preferred = PropagationMethod::Eigenmodes;
    /// Above this eigenbasis condition number the eigenmode path is abandoned.
    double max_condition = 1e10;
};

struct Trajectory {
    std::vector<VectorizedOperator> states;
    PropagationMethod method;
    bool fell_back;
    double condition;  ///< eigenbasis condition, NaN if not computed
};

/// exp(L tau) v on an ascending grid starting at 0. The eigenmode path is the
/// default; the matrix-exponential path steps exp(L dtau) between grid points
/// and is used when requested or when the eigenbasis is ill conditioned.
Trajectory propagate(const Superoperator& l, const VectorizedOperator& v,
                     std::span<const double> tau, const PropagationOptions& options = {});

}  // namespace rdjc
