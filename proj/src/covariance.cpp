#include "extprop/covariance.hpp"

#include <string>

namespace extprop {

CovarianceEstimate::CovarianceEstimate(const CMatrix& entries, int snapshots)
    : snapshots_(snapshots) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw DomainError("covariance must be a non-empty square matrix");
  }
  entries_ = (entries + entries.adjoint()) * 0.5;
}

CovarianceEstimate sample_covariance(const SnapshotBlock& x) {
  const auto k = x.samples.cols();
  if (k < 1 || x.samples.rows() < 1) {
    throw ScenarioError("sample covariance of an empty snapshot block");
  }
  return CovarianceEstimate(x.samples * x.samples.adjoint() / static_cast<double>(k),
                            static_cast<int>(k));
}

CovarianceEstimate theoretical_covariance(const SteeringMatrix& a,
                                          const std::vector<double>& source_powers,
                                          double noise_var) {
  if (static_cast<int>(source_powers.size()) != a.sources()) {
    throw ScenarioError("source power list length does not match the channel matrix");
  }
  if (!(noise_var >= 0.0)) {
    throw DomainError("noise variance must be non-negative");
  }
  Eigen::VectorXd powers = Eigen::Map<const Eigen::VectorXd>(source_powers.data(),
                                                             a.sources());
  CMatrix g = a.entries() * powers.cast<Complex>().asDiagonal() * a.entries().adjoint();
  g.diagonal().array() += noise_var;
  return CovarianceEstimate(g, 0);
}

PartitionScheme make_partition(int sensors, int sources, int order) {
  if (sources < 1 || sensors <= sources) {
    throw PartitionError("partition needs N > P >= 1, got N=" + std::to_string(sensors) +
                         ", P=" + std::to_string(sources));
  }
  const int n_max = PartitionScheme::max_order(sensors, sources);
  if (order < 2 || order > n_max) {
    std::string msg = "partition order n=" + std::to_string(order) + " invalid for N=" +
                      std::to_string(sensors) + ", P=" + std::to_string(sources) + ": ";
    if (n_max < 2) {
      msg += "floor(N/P)=" + std::to_string(n_max) + " < 2, no extended propagator exists";
    } else {
      msg += "valid range is 2 <= n <= " + std::to_string(n_max);
    }
    throw PartitionError(msg);
  }
  std::vector<int> sizes(static_cast<std::size_t>(order), sources);
  sizes.back() = sensors - (order - 1) * sources;
  return PartitionScheme(sensors, sources, std::move(sizes));
}

void PartitionScheme::check_index(int i) const {
  if (i < 1 || i > order()) {
    throw PartitionError("block index " + std::to_string(i) + " outside 1.." +
                         std::to_string(order()));
  }
}

int PartitionScheme::block_size(int i) const {
  check_index(i);
  return block_sizes_[static_cast<std::size_t>(i - 1)];
}

int PartitionScheme::block_offset(int i) const {
  check_index(i);
  return (i - 1) * sources_;
}

RMatrix selection_matrix(const PartitionScheme& scheme, int i) {
  const int rows = scheme.block_size(i);
  RMatrix e = RMatrix::Zero(scheme.sensors(), rows);
  e.block(scheme.block_offset(i), 0, rows, rows).setIdentity();
  return e;
}

CMatrix covariance_block(const CovarianceEstimate& gamma, const PartitionScheme& scheme, int i, int j) {
  if (gamma.sensors() != scheme.sensors()) {
    throw PartitionError("covariance size " + std::to_string(gamma.sensors()) +
                         " does not match partition over " + std::to_string(scheme.sensors()) +
                         " sensors");
  }
  return gamma.entries().block(scheme.block_offset(i), scheme.block_offset(j),
                               scheme.block_size(i), scheme.block_size(j));
}

}  // namespace extprop
