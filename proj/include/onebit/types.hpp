// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace onebit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Invalid dimensions or out-of-contract arguments.
class InvalidArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Inconsistent or out-of-range scenario configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation called on data produced in an unsupported mode
/// (e.g. angular ground truth requested from an off-grid realization).
class ModeError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Factorization hit a non-positive-definite pivot; carries the pivot index.
class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(const std::string& what, Index pivot_index)
        : std::runtime_error(what), pivot(pivot_index) {}
    Index pivot;
};

/// Numerical failure inside an iterative scheme, annotated with context.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Support detection produced an empty index set.
class EmptySupportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace onebit
