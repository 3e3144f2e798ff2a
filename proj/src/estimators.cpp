#include "extprop/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace extprop {

std::vector<double> ScanGrid::points() const {
  if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(start) || !std::isfinite(stop)) {
    throw DomainError("scan grid needs finite bounds and a positive step");
  }
  std::vector<double> out;
  // The small slack keeps `stop` itself when (stop - start) / step is integral.
  const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (long long q = 0; q < count; ++q) {
    const double angle = start + static_cast<double>(q) * step;
    if (angle > -90.0 && angle < 90.0) {
      out.push_back(angle);
    }
  }
  if (out.empty()) {
    std::ostringstream os;
    os << "scan grid [" << start << ", " << stop << "] has no points inside (-90, 90)";
    throw DomainError(os.str());
  }
  return out;
}

SteeringGrid::SteeringGrid(const ArrayConfig& config, const ScanGrid& grid)
    : config_(config), angles_(grid.points()) {
  steering_.resize(config.sensors(), static_cast<Eigen::Index>(angles_.size()));
  for (std::size_t g = 0; g < angles_.size(); ++g) {
    steering_.col(static_cast<Eigen::Index>(g)) = steering_vector(config, angles_[g]);
  }
}

EigenSubspaces eigen_subspaces(const CovarianceEstimate& gamma, int sources) {
  const int n = gamma.sensors();
  if (sources < 1 || sources >= n) {
    throw ApplicabilityError("eigen subspaces need 1 <= P < N, got P=" + std::to_string(sources) +
                             ", N=" + std::to_string(n));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(gamma.entries());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigensolver did not converge");
  }
  // Eigen returns ascending eigenvalues; reverse to descending.
  const CMatrix vectors = solver.eigenvectors().rowwise().reverse();
  EigenSubspaces out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.signal_basis = vectors.leftCols(sources);
  out.noise_basis = vectors.rightCols(n - sources);
  return out;
}

AngularSpectrum spectrum_from_operator(const CMatrix& rows, const SteeringGrid& grid,
                                       std::string method_id) {
  if (rows.rows() < 1) {
    throw ApplicabilityError("operator has no rows");
  }
  if (rows.cols() != grid.steering().rows()) {
    throw DomainError("operator width " + std::to_string(rows.cols()) +
                      " does not match array size " + std::to_string(grid.steering().rows()));
  }
  const Eigen::VectorXd quad = (rows * grid.steering()).colwise().squaredNorm().transpose();
  AngularSpectrum out;
  out.grid_deg = grid.angles_deg();
  out.method_id = std::move(method_id);
  out.values.resize(static_cast<std::size_t>(quad.size()));
  for (Eigen::Index g = 0; g < quad.size(); ++g) {
    const double q = quad(g);
    out.values[static_cast<std::size_t>(g)] = q < kQuadraticFloor ? kSpectrumCeiling : 1.0 / q;
  }
  return out;
}

AngularSpectrum spectrum_from_operator(const PropagatorOperator& op, const ArrayConfig& config,
                                       const ScanGrid& grid) {
  return spectrum_from_operator(op.entries, SteeringGrid(config, grid), op.id());
}

AngularSpectrum music_spectrum(const CovarianceEstimate& gamma, int sources,
                               const SteeringGrid& grid) {
  const EigenSubspaces sub = eigen_subspaces(gamma, sources);
  return spectrum_from_operator(sub.noise_basis.adjoint(), grid, "music");
}

AngularSpectrum music_spectrum(const CovarianceEstimate& gamma, int sources,
                               const ArrayConfig& config, const ScanGrid& grid) {
  return music_spectrum(gamma, sources, SteeringGrid(config, grid));
}

namespace {

DoaEstimate esprit_from_subspace(const CMatrix& signal, int sources, const ArrayConfig& config,
                                 std::optional<int> subarray, double rel_tol) {
  const int n = static_cast<int>(signal.rows());
  const int m = subarray.value_or(n - 1);
  if (m < sources || m > n - 1) {
    throw DomainError("ESPRIT subarray size m=" + std::to_string(m) + " outside " +
                      std::to_string(sources) + ".." + std::to_string(n - 1));
  }
  const CMatrix upper = signal.topRows(m);
  const CMatrix lower = signal.middleRows(1, m);
  if (numerical_rank(upper, rel_tol) < sources) {
    throw IllConditionedError("ESPRIT subarray signal subspace is rank deficient");
  }
  const CMatrix rotation = pseudo_inverse(upper, rel_tol) * lower;

  Eigen::ComplexEigenSolver<CMatrix> solver(rotation, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("ESPRIT eigensolver did not converge");
  }
  DoaEstimate out;
  out.method_id = subarray ? "esprit:" + std::to_string(m) : "esprit";
  const double scale = 2.0 * std::numbers::pi * config.spacing_ratio();
  for (Eigen::Index p = 0; p < solver.eigenvalues().size(); ++p) {
    // The shift multiplies sensor j+1 by exp(-i mu), so mu = -arg(phi).
    const double mu = -std::arg(solver.eigenvalues()(p));
    const double s = std::clamp(mu / scale, -1.0, 1.0);
    out.angles_deg.push_back(std::asin(s) * 180.0 / std::numbers::pi);
  }
  std::sort(out.angles_deg.begin(), out.angles_deg.end());
  return out;
}

void check_esprit_inputs(int sensors, int sources, const ArrayConfig& config) {
  if (sensors != config.sensors()) {
    throw DomainError("data has " + std::to_string(sensors) + " sensors, array has " +
                      std::to_string(config.sensors()));
  }
  if (sources < 1 || sources >= sensors) {
    throw ApplicabilityError("ESPRIT needs 1 <= P < N");
  }
}

}  // namespace

DoaEstimate esprit(const CovarianceEstimate& gamma, int sources, const ArrayConfig& config,
                   std::optional<int> subarray) {
  check_esprit_inputs(gamma.sensors(), sources, config);
  const EigenSubspaces sub = eigen_subspaces(gamma, sources);
  return esprit_from_subspace(sub.signal_basis, sources, config, subarray,
                              1e-10 * gamma.sensors());
}

DoaEstimate esprit(const SnapshotBlock& x, int sources, const ArrayConfig& config,
                   std::optional<int> subarray) {
  check_esprit_inputs(static_cast<int>(x.samples.rows()), sources, config);
  if (x.samples.cols() < sources) {
    throw ScenarioError("ESPRIT from snapshots needs K >= P");
  }
  Eigen::JacobiSVD<CMatrix> svd(x.samples, Eigen::ComputeThinU);
  return esprit_from_subspace(svd.matrixU().leftCols(sources), sources, config, subarray,
                              1e-10 * config.sensors());
}

DoaEstimate find_peaks(const AngularSpectrum& spectrum, int sources) {
  const auto& v = spectrum.values;
  const std::size_t g = v.size();
  if (g != spectrum.grid_deg.size()) {
    throw DomainError("spectrum grid and values differ in length");
  }
  if (g < 3) {
    throw DomainError("peak search needs at least 3 grid points");
  }
  if (sources < 1 || static_cast<std::size_t>(sources) > g) {
    throw DomainError("cannot pick " + std::to_string(sources) + " peaks from " +
                      std::to_string(g) + " grid points");
  }
  // Grid ascending, so index order is angle order: stable sort by value
  // breaks ties toward the smaller angle.
  auto by_value = [&](std::size_t a, std::size_t b) { return v[a] > v[b]; };

  std::vector<std::size_t> maxima;
  for (std::size_t q = 1; q + 1 < g; ++q) {
    if (v[q] > v[q - 1] && v[q] > v[q + 1]) {
      maxima.push_back(q);
    }
  }
  std::stable_sort(maxima.begin(), maxima.end(), by_value);
  std::vector<std::size_t> chosen(maxima.begin(),
                                  maxima.begin() + std::min<std::size_t>(maxima.size(),
                                                                         static_cast<std::size_t>(sources)));
  if (chosen.size() < static_cast<std::size_t>(sources)) {
    std::vector<std::size_t> rest(g);
    std::iota(rest.begin(), rest.end(), std::size_t{0});
    std::stable_sort(rest.begin(), rest.end(), by_value);
    for (std::size_t q : rest) {
      if (chosen.size() == static_cast<std::size_t>(sources)) {
        break;
      }
      if (std::find(chosen.begin(), chosen.end(), q) == chosen.end()) {
        chosen.push_back(q);
      }
    }
  }
  DoaEstimate out;
  out.method_id = spectrum.method_id;
  for (std::size_t q : chosen) {
    out.angles_deg.push_back(spectrum.grid_deg[q]);
  }
  std::sort(out.angles_deg.begin(), out.angles_deg.end());
  return out;
}

}  // namespace extprop
