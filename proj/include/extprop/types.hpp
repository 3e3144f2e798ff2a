#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace extprop {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

// Error taxonomy. The CLI maps NumericalError and its subclasses to exit
// code 3 and every other Error to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (angles, spacing).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Source scenario inconsistent with itself or with the array.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

// Partition order outside 2 <= n <= floor(N/P), or bad block index.
class PartitionError : public Error {
 public:
  using Error::Error;
};

// The requested estimator does not exist for this (N, P).
class ApplicabilityError : public Error {
 public:
  using Error::Error;
};

// Malformed method identifiers, config documents and CLI arguments.
class UsageError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// A matrix that must be (pseudo-)invertible with rank P lost rank under
// the singular value cutoff.
class IllConditionedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace extprop
