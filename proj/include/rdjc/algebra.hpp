#pragma once

// Matrix representations of the R-deformed Heisenberg algebra on a truncated
// Fock space {|0>, ..., |n_max>}.
//
//   N|n> = n|n>,  R|n> = (-1)^n |n>,
//   a|n> = sqrt(n + 2 lambda xi(n)) |n-1>,  xi(n) = 1 for odd n, 0 otherwise.
//
// The algebra closes as {R, a} = 0, [a, a^dagger] = I + 2 lambda R and
// a^dagger a = N + lambda (I - R). On the truncated space the commutator
// cannot close on the top level n_max (a^dagger |n_max> is dropped), so it is
// only checked on levels 0..n_max-1.

#include <cmath>
#include <string>
#include <vector>

#include "rdjc/types.hpp"

namespace rdjc {

/// Highest retained Fock level. Fock dimension is n_max + 1.
class FockCutoff {
public:
    explicit FockCutoff(int n_max) : n_max_(n_max) {
        if (n_max < 2)
            throw ConfigError("Fock cutoff n_max must be >= 2, got " + std::to_string(n_max));
    }
    int n_max() const { return n_max_; }
    Eigen::Index dim() const { return n_max_ + 1; }
    friend bool operator==(FockCutoff, FockCutoff) = default;

private:
    int n_max_;
};

/// Parity deformation parameter lambda. Admissible range is lambda >= -1/2;
/// below that the radicand n + 2 lambda xi(n) turns negative at n = 1.
class DeformationParam {
public:
    static constexpr double lower_bound = -0.5;

    explicit DeformationParam(double lambda) : value_(lambda) {
        if (!(lambda >= lower_bound))
            throw ConfigError("deformation parameter must satisfy lambda >= -1/2, got " +
                              std::to_string(lambda));
    }
    double value() const { return value_; }

private:
    double value_;
};

constexpr int xi(int n) { return n % 2 != 0 ? 1 : 0; }

/// n + 2 lambda xi(n): the squared matrix element <n-1|a|n>, which is also
/// the eigenvalue of a^dagger a on |n>.
inline double deformed_occupation(int n, double lambda) { return n + 2.0 * lambda * xi(n); }

template <typename Scalar = double>
Matrix<Scalar> annihilation(FockCutoff cutoff, DeformationParam lambda) {
    const Eigen::Index d = cutoff.dim();
    Matrix<Scalar> a = Matrix<Scalar>::Zero(d, d);
    for (int n = 1; n <= cutoff.n_max(); ++n)
        a(n - 1, n) = Scalar(std::sqrt(deformed_occupation(n, lambda.value())));
    return a;
}

template <typename Scalar = double>
Matrix<Scalar> creation(FockCutoff cutoff, DeformationParam lambda) {
    return annihilation<Scalar>(cutoff, lambda).adjoint();
}

template <typename Scalar = double>
Matrix<Scalar> parity(FockCutoff cutoff) {
    Vector<Scalar> diag(cutoff.dim());
    for (Eigen::Index n = 0; n < diag.size(); ++n) diag(n) = Scalar(n % 2 == 0 ? 1.0 : -1.0);
    return diag.asDiagonal();
}

template <typename Scalar = double>
Matrix<Scalar> number(FockCutoff cutoff) {
    return Vector<Scalar>::LinSpaced(cutoff.dim(), Scalar(0), Scalar(cutoff.n_max())).asDiagonal();
}

template <typename Scalar>
Matrix<Scalar> commutator(const Matrix<Scalar>& x, const Matrix<Scalar>& y) {
    return x * y - y * x;
}

template <typename Scalar>
Matrix<Scalar> anticommutator(const Matrix<Scalar>& x, const Matrix<Scalar>& y) {
    return x * y + y * x;
}

struct IdentityResidual {
    std::string name;
    /// Fock levels (matrix columns) the residual was evaluated on, inclusive.
    int first_level;
    int last_level;
    double residual;
    /// Column where the max-norm residual occurs.
    int worst_level;
    bool passed;
};

struct AlgebraReport {
    int n_max;
    double lambda;
    double tolerance;
    std::vector<IdentityResidual> identities;
    /// [a, a^dagger] - I - 2 lambda R on level n_max. Nonzero by truncation;
    /// reported for information only and never part of passed().
    double boundary_commutator_residual;

    bool passed() const;
};

/// Evaluates the five defining identities on the truncated space.
AlgebraReport verify_algebra(FockCutoff cutoff, DeformationParam lambda, double tolerance);

}  // namespace rdjc
