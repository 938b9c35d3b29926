#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rdjc {

using complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Operator on the (truncated) Hilbert space.
using OperatorMatrix = Matrix<complex>;

/// Superoperator acting on column-stacked density matrices.
using Superoperator = Matrix<complex>;

/// Column-stacked operator: entry (i, j) of a D x D operator sits at i + j*D.
using VectorizedOperator = Vector<complex>;

// Error taxonomy. The CLI maps each family to a distinct exit code.

/// Invalid user input (parameters, grids, config keys).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A physically meaningful validity check failed (cutoff, positivity).
struct PhysicsValidityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numerical method could not produce a trustworthy answer.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateSteadyStateError : NumericalError {
    using NumericalError::NumericalError;
};

/// Raised when <a^dagger a> vanishes and g2(0) has no meaning.
struct UndefinedStatisticsError : PhysicsValidityError {
    using PhysicsValidityError::PhysicsValidityError;
};

/// Output could not be written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rdjc
