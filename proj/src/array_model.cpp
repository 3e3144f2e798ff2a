#include "extprop/array_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace extprop {

ArrayConfig::ArrayConfig(int sensors, double spacing_ratio)
    : sensors_(sensors), spacing_ratio_(spacing_ratio) {
  if (sensors < 2) {
    throw DomainError("array needs at least 2 sensors, got " + std::to_string(sensors));
  }
  if (!(spacing_ratio > 0.0 && spacing_ratio <= 0.5)) {
    std::ostringstream os;
    os << "spacing ratio d/lambda must lie in (0, 0.5], got " << spacing_ratio;
    throw DomainError(os.str());
  }
}

double phase_increment(const ArrayConfig& config, double angle_deg) {
  if (!(angle_deg > -90.0 && angle_deg < 90.0)) {
    std::ostringstream os;
    os << "angle " << angle_deg << " deg outside the open interval (-90, 90)";
    throw DomainError(os.str());
  }
  const double theta = angle_deg * std::numbers::pi / 180.0;
  return 2.0 * std::numbers::pi * config.spacing_ratio() * std::sin(theta);
}

CVector steering_vector(const ArrayConfig& config, double angle_deg) {
  const double mu = phase_increment(config, angle_deg);
  CVector a(config.sensors());
  for (int j = 0; j < config.sensors(); ++j) {
    a(j) = std::polar(1.0, -mu * j);
  }
  return a;
}

SteeringMatrix channel_matrix(const ArrayConfig& config, const std::vector<double>& angles_deg) {
  if (angles_deg.empty()) {
    throw ScenarioError("channel matrix needs at least one angle");
  }
  for (std::size_t p = 0; p < angles_deg.size(); ++p) {
    for (std::size_t q = p + 1; q < angles_deg.size(); ++q) {
      if (angles_deg[p] == angles_deg[q]) {
        std::ostringstream os;
        os << "duplicate source angle " << angles_deg[p] << " deg makes the channel matrix rank deficient";
        throw ScenarioError(os.str());
      }
    }
  }
  CMatrix a(config.sensors(), static_cast<Eigen::Index>(angles_deg.size()));
  for (std::size_t p = 0; p < angles_deg.size(); ++p) {
    a.col(static_cast<Eigen::Index>(p)) = steering_vector(config, angles_deg[p]);
  }
  return SteeringMatrix(std::move(a), angles_deg);
}

RMatrix exchange_matrix(int n) {
  if (n < 1) {
    throw DomainError("exchange matrix size must be positive");
  }
  return RMatrix::Identity(n, n).rowwise().reverse();
}

}  // namespace extprop
