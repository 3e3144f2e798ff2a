#pragma once

#include <vector>

#include "extprop/array_model.hpp"
#include "extprop/synthesis.hpp"
#include "extprop/types.hpp"

namespace extprop {

// Hermitian N x N covariance. The constructor replaces the input by
// (G + G^H) / 2, so block(i, j)^H == block(j, i) holds bit for bit.
class CovarianceEstimate {
 public:
  // `snapshots` is the K used to form a sample estimate, 0 for theoretical.
  explicit CovarianceEstimate(const CMatrix& entries, int snapshots = 0);

  const CMatrix& entries() const { return entries_; }
  int sensors() const { return static_cast<int>(entries_.rows()); }
  int snapshots() const { return snapshots_; }

 private:
  CMatrix entries_;
  int snapshots_;
};

// (1/K) X X^H. Throws ScenarioError for an empty block.
CovarianceEstimate sample_covariance(const SnapshotBlock& x);

// A diag(powers) A^H + noise_var I.
CovarianceEstimate theoretical_covariance(const SteeringMatrix& a,
                                          const std::vector<double>& source_powers,
                                          double noise_var);

// n-fold row partition of N sensors for P sources: n-1 blocks of P rows,
// the last block takes the remaining N-(n-1)P rows. Block indices are
// 1-based throughout, matching the psi:<n>:<i> operator names.
class PartitionScheme {
 public:
  int sensors() const { return sensors_; }
  int sources() const { return sources_; }
  int order() const { return static_cast<int>(block_sizes_.size()); }
  const std::vector<int>& block_sizes() const { return block_sizes_; }

  int block_size(int i) const;
  // Zero-based index of the first sensor row of block i.
  int block_offset(int i) const;

  // Largest admissible order, floor(N/P).
  static int max_order(int sensors, int sources) { return sensors / sources; }

 private:
  friend PartitionScheme make_partition(int sensors, int sources, int order);
  PartitionScheme(int sensors, int sources, std::vector<int> block_sizes)
      : sensors_(sensors), sources_(sources), block_sizes_(std::move(block_sizes)) {}

  void check_index(int i) const;

  int sensors_;
  int sources_;
  std::vector<int> block_sizes_;
};

// Throws PartitionError unless N > P >= 1 and 2 <= n <= floor(N/P).
PartitionScheme make_partition(int sensors, int sources, int order);

// N x b_i 0/1 matrix selecting the rows of block i.
RMatrix selection_matrix(const PartitionScheme& scheme, int i);

// Gamma_ij = e_i^T Gamma e_j.
CMatrix covariance_block(const CovarianceEstimate& gamma, const PartitionScheme& scheme, int i, int j);

}  // namespace extprop
