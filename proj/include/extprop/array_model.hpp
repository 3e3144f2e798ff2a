#pragma once

#include <vector>

#include "extprop/types.hpp"

namespace extprop {

// Uniform linear array. Sensor 0 is the phase reference.
class ArrayConfig {
 public:
  // Throws DomainError unless sensors >= 2 and 0 < spacing_ratio <= 0.5.
  explicit ArrayConfig(int sensors, double spacing_ratio = 0.5);

  int sensors() const { return sensors_; }
  // Inter-element distance over wavelength, d / lambda.
  double spacing_ratio() const { return spacing_ratio_; }

  friend bool operator==(const ArrayConfig&, const ArrayConfig&) = default;

 private:
  int sensors_;
  double spacing_ratio_;
};

// N x P channel matrix together with the angles that generated it.
class SteeringMatrix {
 public:
  SteeringMatrix(CMatrix entries, std::vector<double> angles_deg)
      : entries_(std::move(entries)), angles_deg_(std::move(angles_deg)) {}

  const CMatrix& entries() const { return entries_; }
  const std::vector<double>& angles_deg() const { return angles_deg_; }
  int sensors() const { return static_cast<int>(entries_.rows()); }
  int sources() const { return static_cast<int>(entries_.cols()); }

 private:
  CMatrix entries_;
  std::vector<double> angles_deg_;
};

// Inter-sensor phase increment mu = 2*pi*(d/lambda)*sin(theta), in radians.
double phase_increment(const ArrayConfig& config, double angle_deg);

// a(theta)_j = exp(-i*j*mu), j = 0..N-1. Throws DomainError for angles
// outside (-90, 90) degrees.
CVector steering_vector(const ArrayConfig& config, double angle_deg);

// Columns are steering vectors in the given order. Throws ScenarioError on
// duplicate angles or an empty list.
SteeringMatrix channel_matrix(const ArrayConfig& config, const std::vector<double>& angles_deg);

// Anti-diagonal permutation J_N.
RMatrix exchange_matrix(int n);

}  // namespace extprop
