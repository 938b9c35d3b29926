#include "rdjc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseLU>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

namespace rdjc {
namespace {

using SparseOp = Eigen::SparseMatrix<complex>;
using SparseRowOp = Eigen::SparseMatrix<complex, Eigen::RowMajor>;
using Triplets = std::vector<Eigen::Triplet<complex>>;

Superoperator identity_kron(const OperatorMatrix& op, bool op_on_left) {
    const auto id = OperatorMatrix::Identity(op.rows(), op.cols());
    return op_on_left ? Superoperator(Eigen::kroneckerProduct(id, op))
                      : Superoperator(Eigen::kroneckerProduct(op.transpose(), id));
}

double inf_norm(const Superoperator& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

double inf_norm(const SparseOp& m) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
    for (Eigen::Index k = 0; k < m.outerSize(); ++k)
        for (SparseOp::InnerIterator it(m, k); it; ++it) rows(it.row()) += std::abs(it.value());
    return rows.maxCoeff();
}

// Trace row on the local coordinates of an m = 0 sector.
Vector<complex> sector_trace_row(const CoherenceSector& sector) {
    Vector<complex> t = Vector<complex>::Zero(sector.size());
    for (Eigen::Index k = 0; k < sector.size(); ++k) {
        const Eigen::Index idx = sector.indices[static_cast<std::size_t>(k)];
        if (idx % sector.hilbert_dim == idx / sector.hilbert_dim) t(k) = 1.0;
    }
    return t;
}

// Hermitian projection followed by exact trace normalization.
OperatorMatrix tidy_state(const OperatorMatrix& raw) {
    OperatorMatrix rho = (raw + raw.adjoint()) / 2.0;
    return rho / rho.trace().real();
}

void append_sector_entries(Triplets& out, const MasterEquation& eq, const CoherenceSector& sector) {
    const Eigen::Index d = sector.hilbert_dim;
    std::vector<Eigen::Index> local(static_cast<std::size_t>(d * d), -1);
    for (Eigen::Index k = 0; k < sector.size(); ++k)
        local[static_cast<std::size_t>(sector.indices[static_cast<std::size_t>(k)])] = k;

    const auto add = [&](Eigen::Index p, Eigen::Index q, Eigen::Index col, complex value) {
        const Eigen::Index row = local[static_cast<std::size_t>(p + q * d)];
        if (row < 0)
            throw NumericalError(
                "master equation does not conserve the excitation-coherence sector");
        out.emplace_back(row, col, value);
    };

    struct Channel {
        double half_rate;
        SparseOp jump;
        SparseOp decay;        // O^dagger O, column access
        SparseRowOp decay_row; // O^dagger O, row access
    };
    std::vector<Channel> channels;
    for (const auto& c : eq.channels) {
        const OperatorMatrix m = c.jump.adjoint() * c.jump;
        channels.push_back({c.rate / 2, c.jump.sparseView(), m.sparseView(), m.sparseView()});
    }
    const SparseOp h = eq.hamiltonian.sparseView();
    const SparseRowOp h_row = eq.hamiltonian.sparseView();
    const complex i_unit(0.0, 1.0);

    // Column (i, j) of the block is L applied to the matrix unit E_ij.
    for (Eigen::Index col = 0; col < sector.size(); ++col) {
        const Eigen::Index idx = sector.indices[static_cast<std::size_t>(col)];
        const Eigen::Index i = idx % d;
        const Eigen::Index j = idx / d;

        for (SparseOp::InnerIterator it(h, i); it; ++it) add(it.row(), j, col, -i_unit * it.value());
        for (SparseRowOp::InnerIterator it(h_row, j); it; ++it) add(i, it.col(), col, i_unit * it.value());

        for (const auto& c : channels) {
            for (SparseOp::InnerIterator pi(c.jump, i); pi; ++pi)
                for (SparseOp::InnerIterator qj(c.jump, j); qj; ++qj)
                    add(pi.row(), qj.row(), col, 2.0 * c.half_rate * pi.value() * std::conj(qj.value()));
            for (SparseOp::InnerIterator it(c.decay, i); it; ++it)
                add(it.row(), j, col, -c.half_rate * it.value());
            for (SparseRowOp::InnerIterator it(c.decay_row, j); it; ++it)
                add(i, it.col(), col, -c.half_rate * it.value());
        }
    }
}

SparseOp build_sparse(Eigen::Index n, const Triplets& triplets) {
    SparseOp m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

// Solves the constrained sector system with the trace equation in row 0.
// The condition estimate is a lower bound on ||A|| ||A^-1|| from one solve
// against a fixed dense right-hand side: a consistent singular system can
// still be solved exactly, so the solution alone does not reveal a
// degenerate kernel.
template <typename Real>
Vector<complex> solve_constrained(const Triplets& constrained, Eigen::Index n, double& condition) {
    using Scalar = std::complex<Real>;
    using Sparse = Eigen::SparseMatrix<Scalar>;
    std::vector<Eigen::Triplet<Scalar>> cast;
    cast.reserve(constrained.size());
    for (const auto& t : constrained)
        cast.emplace_back(t.row(), t.col(), Scalar(static_cast<Real>(t.value().real()), static_cast<Real>(t.value().imag())));
    Sparse system(n, n);
    system.setFromTriplets(cast.begin(), cast.end());
    system.makeCompressed();

    Eigen::SparseLU<Sparse> lu;
    lu.compute(system);
    if (lu.info() != Eigen::Success)
        throw DegenerateSteadyStateError(
            "steady state is not unique: the constrained Liouvillian is singular (" +
            lu.lastErrorMessage() + ")");
    Eigen::Matrix<Scalar, Eigen::Dynamic, 2> rhs = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>::Zero(n, 2);
    rhs(0, 0) = Scalar(1);
    for (Eigen::Index k = 0; k < n; ++k) rhs(k, 1) = std::polar(Real(1), Real(0.7) * static_cast<Real>(k));
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 2> y = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !y.allFinite())
        throw DegenerateSteadyStateError("steady state is not unique: solve produced non-finite values");

    Eigen::Matrix<Real, Eigen::Dynamic, 1> rows = Eigen::Matrix<Real, Eigen::Dynamic, 1>::Zero(n);
    for (Eigen::Index k = 0; k < system.outerSize(); ++k)
        for (typename Sparse::InnerIterator it(system, k); it; ++it) rows(it.row()) += std::abs(it.value());
    condition = static_cast<double>(rows.maxCoeff() * y.col(1).cwiseAbs().maxCoeff());

    Vector<complex> x(n);
    for (Eigen::Index k = 0; k < n; ++k)
        x(k) = complex(static_cast<double>(y(k, 0).real()), static_cast<double>(y(k, 0).imag()));
    return x;
}

// Beyond this the constrained system is treated as singular.
constexpr double singular_condition = 1e15;
// Beyond this the double-precision solve loses too many digits near a
// degenerate kernel and is repeated in extended precision.
constexpr double extended_condition = 1e6;

struct SectorSolution {
    OperatorMatrix rho;
    double relative_residual;
};

SectorSolution solve_sector_steady_state(const MasterEquation& eq) {
    const CoherenceSector sector = coherence_sector(eq.cutoff, 0);
    Triplets entries;
    append_sector_entries(entries, eq, sector);
    const SparseOp l = build_sparse(sector.size(), entries);

    // Local row 0 is the rho_00 equation (vec index 0); swap it for the trace.
    Triplets constrained;
    constrained.reserve(entries.size());
    for (const auto& t : entries)
        if (t.row() != 0) constrained.push_back(t);
    const Vector<complex> trace = sector_trace_row(sector);
    for (Eigen::Index k = 0; k < trace.size(); ++k)
        if (trace(k) != 0.0) constrained.emplace_back(0, k, trace(k));

    double condition = 0.0;
    Vector<complex> x = solve_constrained<double>(constrained, sector.size(), condition);
    if (!(condition < singular_condition))
        throw DegenerateSteadyStateError(fmt::format(
            "steady state is not unique: the constrained Liouvillian is numerically singular "
            "(condition estimate {:.1e})",
            condition));
    if (condition > extended_condition) x = solve_constrained<long double>(constrained, sector.size(), condition);

    const OperatorMatrix rho = tidy_state(unvectorize(sector.embed(x)));
    const Vector<complex> local = sector.restrict(vectorize(rho));
    const double scale = inf_norm(l);
    const double residual = (l * local).cwiseAbs().maxCoeff() / scale;
    if (!(residual <= 1e-10))
        throw DegenerateSteadyStateError(fmt::format(
            "steady-state residual {:.3e} exceeds 1e-10 ||L||; the null space is likely not "
            "one dimensional",
            residual));
    return {rho, residual};
}

}  // namespace

VectorizedOperator vectorize(const OperatorMatrix& op) {
    return Eigen::Map<const VectorizedOperator>(op.data(), op.size());
}

OperatorMatrix unvectorize(const VectorizedOperator& v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size()) throw ConfigError("vectorized operator length is not a perfect square");
    return Eigen::Map<const OperatorMatrix>(v.data(), d, d);
}

Vector<complex> trace_functional(Eigen::Index dim) {
    return vectorize(OperatorMatrix::Identity(dim, dim));
}

Superoperator lindblad_term(const OperatorMatrix& jump) {
    if (jump.rows() != jump.cols()) throw ConfigError("Lindblad jump operator must be square");
    const OperatorMatrix decay = jump.adjoint() * jump;
    Superoperator l = 2.0 * Superoperator(Eigen::kroneckerProduct(jump.conjugate(), jump));
    l -= identity_kron(decay, true);
    l -= identity_kron(decay, false);
    return l;
}

Superoperator hamiltonian_term(const OperatorMatrix& h) {
    const complex i_unit(0.0, 1.0);
    return -i_unit * (identity_kron(h, true) - identity_kron(h, false));
}

MasterEquation master_equation(const SystemParams& p, FockCutoff cutoff) {
    p.validate();
    const OperatorMatrix a = cavity_annihilation(cutoff, p.deformation());
    const OperatorMatrix s = emitter_lowering(cutoff);
    MasterEquation eq{cutoff, p, hamiltonian(p, cutoff), {}};
    const auto add = [&](std::string name, double rate, const OperatorMatrix& jump) {
        if (rate > 0) eq.channels.push_back({std::move(name), rate, jump});
    };
    add("cavity decay", p.nbar > 0 ? p.kappa * (1 + p.nbar) : p.kappa, a);
    if (p.nbar > 0) add("cavity thermal excitation", p.kappa * p.nbar, a.adjoint());
    add("emitter decay", p.gamma, s);
    add("emitter pump", p.pump, s.adjoint());
    return eq;
}

Superoperator assemble(const MasterEquation& eq) {
    Superoperator l = hamiltonian_term(eq.hamiltonian);
    for (const auto& c : eq.channels) l += (c.rate / 2) * lindblad_term(c.jump);
    return l;
}

Superoperator liouvillian(const SystemParams& p, FockCutoff cutoff) {
    if (p.nbar != 0)
        throw ConfigError("liouvillian() is the zero-temperature generator; use thermal_liouvillian()");
    return assemble(master_equation(p, cutoff));
}

Superoperator thermal_liouvillian(const SystemParams& p, FockCutoff cutoff) {
    return assemble(master_equation(p, cutoff));
}

double bose_einstein(double omega, double temperature) {
    if (!(temperature > 0)) throw ConfigError("temperature must be positive");
    return 1.0 / std::expm1(omega / temperature);
}

VectorizedOperator CoherenceSector::restrict(const VectorizedOperator& full) const {
    VectorizedOperator local(size());
    for (Eigen::Index k = 0; k < size(); ++k) local(k) = full(indices[static_cast<std::size_t>(k)]);
    return local;
}

VectorizedOperator CoherenceSector::embed(const VectorizedOperator& local) const {
    VectorizedOperator full = VectorizedOperator::Zero(hilbert_dim * hilbert_dim);
    for (Eigen::Index k = 0; k < size(); ++k) full(indices[static_cast<std::size_t>(k)]) = local(k);
    return full;
}

CoherenceSector coherence_sector(FockCutoff cutoff, int order) {
    const std::vector<int> exc = excitation_numbers(cutoff);
    const Eigen::Index d = hilbert_dim(cutoff);
    CoherenceSector sector{order, d, {}};
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i)
            if (exc[static_cast<std::size_t>(i)] - exc[static_cast<std::size_t>(j)] == order)
                sector.indices.push_back(i + j * d);
    return sector;
}

Eigen::SparseMatrix<complex> sector_liouvillian(const MasterEquation& eq, const CoherenceSector& sector) {
    Triplets entries;
    append_sector_entries(entries, eq, sector);
    return build_sparse(sector.size(), entries);
}

Superoperator restrict(const Superoperator& l, const CoherenceSector& sector) {
    const Eigen::Index n = sector.size();
    Superoperator block(n, n);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r)
            block(r, c) = l(sector.indices[static_cast<std::size_t>(r)],
                            sector.indices[static_cast<std::size_t>(c)]);
    return block;
}

DensityMatrix::DensityMatrix(OperatorMatrix rho) : rho_(std::move(rho)), min_eigenvalue_(0.0) {
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0)
        throw PhysicsValidityError("density matrix must be square and non-empty");
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    const double trace_error = std::abs(rho_.trace() - complex(1.0, 0.0));
    const Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(rho_, Eigen::EigenvaluesOnly);
    min_eigenvalue_ = solver.eigenvalues().minCoeff();

    std::string top_info;
    if (rho_.rows() % 2 == 0 && rho_.rows() >= 6)
        top_info = fmt::format(", top Fock population {:.3e}",
                               top_fock_population(rho_, FockCutoff(static_cast<int>(rho_.rows() / 2 - 1))));
    if (herm > hermiticity_tolerance)
        throw PhysicsValidityError(fmt::format("density matrix not Hermitian: max |rho - rho^dagger| = {:.3e}{}", herm, top_info));
    if (trace_error > trace_tolerance)
        throw PhysicsValidityError(fmt::format("density matrix trace error {:.3e}{}", trace_error, top_info));
    if (min_eigenvalue_ < -positivity_tolerance)
        throw PhysicsValidityError(fmt::format(
            "density matrix not positive semidefinite: most negative eigenvalue {:.3e}{}", min_eigenvalue_,
            top_info));
}

double top_fock_population(const OperatorMatrix& rho, FockCutoff cutoff) {
    const Eigen::Index g = BareState{Emitter::Ground, cutoff.n_max()}.index(cutoff);
    const Eigen::Index x = BareState{Emitter::Excited, cutoff.n_max()}.index(cutoff);
    return rho(g, g).real() + rho(x, x).real();
}

DensityMatrix steady_state(const Superoperator& l) {
    const Eigen::Index n = l.rows();
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (l.cols() != n || d * d != n) throw ConfigError("superoperator must be square of size D^2");

    Superoperator system = l;
    system.row(0) = trace_functional(d).transpose();
    Vector<complex> rhs = Vector<complex>::Zero(n);
    rhs(0) = 1.0;

    const Eigen::PartialPivLU<Superoperator> lu(system);
    const double rcond = lu.rcond();
    if (!(rcond > 1e3 * std::numeric_limits<double>::epsilon()))
        throw DegenerateSteadyStateError(fmt::format(
            "steady state is not unique: constrained Liouvillian reciprocal condition {:.3e}", rcond));
    const Vector<complex> x = lu.solve(rhs);

    const OperatorMatrix rho = tidy_state(unvectorize(x));
    const double residual = (l * vectorize(rho)).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-10 * inf_norm(l)))
        throw NumericalError(fmt::format("steady-state residual {:.3e} exceeds 1e-10 ||L||", residual));
    return DensityMatrix(rho);
}

void CutoffPolicy::validate() const {
    if (initial < 2) throw ConfigError("initial cutoff must be >= 2");
    if (maximum < initial) throw ConfigError("maximum cutoff must be >= initial cutoff");
    if (!(top_tolerance > 0)) throw ConfigError("top-level tolerance must be positive");
}

SteadyState solve_steady_state(const SystemParams& p, FockCutoff cutoff, CriticalPointMode critical) {
    p.validate();
    SystemParams effective = p;
    const bool at_critical = p.lambda == DeformationParam::lower_bound;
    if (at_critical && critical == CriticalPointMode::OneSidedLimit)
        effective.lambda = DeformationParam::lower_bound + critical_lambda_offset;

    const SectorSolution solution = solve_sector_steady_state(master_equation(effective, cutoff));
    const double top = top_fock_population(solution.rho, cutoff);
    return SteadyState{DensityMatrix(solution.rho), cutoff, effective, top, solution.relative_residual,
                       false, at_critical && critical == CriticalPointMode::OneSidedLimit};
}

SteadyState solve_steady_state(const SystemParams& p, const SteadyStateOptions& options) {
    options.cutoff.validate();
    int n_max = options.cutoff.initial;
    for (;;) {
        const bool last = n_max >= options.cutoff.maximum;
        try {
            SteadyState ss = solve_steady_state(p, FockCutoff(n_max), options.critical);
            ss.cutoff_valid = ss.top_population < options.cutoff.top_tolerance;
            if (ss.cutoff_valid || last) return ss;
        } catch (const PhysicsValidityError&) {
            // A badly truncated state can fail positivity; a larger cutoff may fix it.
            if (last) throw;
        }
        n_max = std::min(2 * n_max, options.cutoff.maximum);
    }
}

Eigenmodes::Eigenmodes(const Superoperator& l) {
    const Eigen::ComplexEigenSolver<Superoperator> solver(l, true);
    if (solver.info() != Eigen::Success) throw NumericalError("Liouvillian eigendecomposition did not converge");
    values_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
    lu_.compute(vectors_);
    const double rcond = lu_.rcond();
    condition_ = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
}

Vector<complex> Eigenmodes::coefficients(const VectorizedOperator& v) const { return lu_.solve(v); }

VectorizedOperator Eigenmodes::evolve(const Vector<complex>& coefficients, double tau) const {
    const Vector<complex> weights = (values_ * tau).array().exp() * coefficients.array();
    return vectors_ * weights;
}

std::string to_string(PropagationMethod method) {
    return method == PropagationMethod::Eigenmodes ? "eigenmodes" : "matrix-exponential";
}

Trajectory propagate(const Superoperator& l, const VectorizedOperator& v, std::span<const double> tau,
                     const PropagationOptions& options) {
    if (l.rows() != l.cols() || l.rows() != v.size())
        throw ConfigError("propagate: superoperator and vector sizes disagree");
    if (tau.empty() || tau.front() != 0.0) throw ConfigError("propagate: tau grid must start at 0");
    if (!std::is_sorted(tau.begin(), tau.end()) ||
        std::adjacent_find(tau.begin(), tau.end()) != tau.end())
        throw ConfigError("propagate: tau grid must be strictly ascending");

    Trajectory out{{}, options.preferred, false, std::numeric_limits<double>::quiet_NaN()};
    out.states.reserve(tau.size());

    if (options.preferred == PropagationMethod::Eigenmodes) {
        const Eigenmodes modes(l);
        out.condition = modes.condition();
        if (modes.condition() <= options.max_condition) {
            const Vector<complex> c = modes.coefficients(v);
            for (const double t : tau) out.states.push_back(t == 0.0 ? v : modes.evolve(c, t));
            return out;
        }
        out.method = PropagationMethod::MatrixExponential;
        out.fell_back = true;
    }

    Superoperator step;
    double step_size = -1.0;
    VectorizedOperator state = v;
    out.states.push_back(state);
    for (std::size_t k = 1; k < tau.size(); ++k) {
        const double dt = tau[k] - tau[k - 1];
        if (std::abs(dt - step_size) > 1e-12 * dt) {
            step = (l * dt).exp();
            step_size = dt;
        }
        state = step * state;
        out.states.push_back(state);
    }
    return out;
}

}  // namespace rdjc
