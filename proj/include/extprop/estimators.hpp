#pragma once

#include <optional>
#include <string>
#include <vector>

#include "extprop/array_model.hpp"
#include "extprop/covariance.hpp"
#include "extprop/propagators.hpp"
#include "extprop/synthesis.hpp"
#include "extprop/types.hpp"

namespace extprop {

// Scan angles start, start + step, ... up to stop, restricted to the open
// interval (-90, 90). The default yields the 1799 points -89.9 .. 89.9.
struct ScanGrid {
  double start = -90.0;
  double stop = 90.0;
  double step = 0.1;

  // Throws DomainError for a non-positive step or an empty grid.
  std::vector<double> points() const;
};

// Steering vectors of a scan grid, N x G, computed once and shared by every
// spectrum evaluated on that grid.
class SteeringGrid {
 public:
  SteeringGrid(const ArrayConfig& config, const ScanGrid& grid);

  const std::vector<double>& angles_deg() const { return angles_; }
  const CMatrix& steering() const { return steering_; }
  const ArrayConfig& config() const { return config_; }

 private:
  ArrayConfig config_;
  std::vector<double> angles_;
  CMatrix steering_;
};

struct AngularSpectrum {
  std::vector<double> grid_deg;
  std::vector<double> values;
  std::string method_id;
};

struct DoaEstimate {
  std::vector<double> angles_deg;  // ascending
  std::string method_id;
};

struct EigenSubspaces {
  CMatrix signal_basis;         // N x P
  CMatrix noise_basis;          // N x (N - P)
  Eigen::VectorXd eigenvalues;  // descending
};

// Pseudo-spectrum values are capped here when the quadratic form drops below
// kQuadraticFloor, so exact nulls stay finite.
inline constexpr double kQuadraticFloor = 1e-30;
inline constexpr double kSpectrumCeiling = 1e30;

// Hermitian eigendecomposition split into the top-P and remaining
// eigenvectors. Throws ApplicabilityError unless 1 <= P < N.
EigenSubspaces eigen_subspaces(const CovarianceEstimate& gamma, int sources);

// value(theta) = 1 / (a(theta)^H M^H M a(theta)).
AngularSpectrum spectrum_from_operator(const CMatrix& rows, const SteeringGrid& grid,
                                       std::string method_id);
AngularSpectrum spectrum_from_operator(const PropagatorOperator& op, const ArrayConfig& config,
                                       const ScanGrid& grid = {});

// Classical MUSIC: spectrum_from_operator with M = U_n^H.
AngularSpectrum music_spectrum(const CovarianceEstimate& gamma, int sources,
                               const SteeringGrid& grid);
AngularSpectrum music_spectrum(const CovarianceEstimate& gamma, int sources,
                               const ArrayConfig& config, const ScanGrid& grid = {});

// Least-squares ESPRIT on subarrays of m sensors shifted by one element.
// Default m = N - 1. Throws DomainError unless P <= m <= N - 1 and
// IllConditionedError when the first subarray loses rank.
DoaEstimate esprit(const CovarianceEstimate& gamma, int sources, const ArrayConfig& config,
                   std::optional<int> subarray = std::nullopt);
// Same, with the signal subspace taken from the left singular vectors of X.
DoaEstimate esprit(const SnapshotBlock& x, int sources, const ArrayConfig& config,
                   std::optional<int> subarray = std::nullopt);

// Top-P strict local maxima ranked by value; falls back to the largest
// remaining grid values when there are fewer than P. Ties go to the smaller
// angle. Result sorted ascending.
DoaEstimate find_peaks(const AngularSpectrum& spectrum, int sources);

}  // namespace extprop
