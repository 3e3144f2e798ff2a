#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "extprop/covariance.hpp"
#include "extprop/types.hpp"

namespace extprop {

// Moore-Penrose pseudoinverse by SVD; singular values at or below
// rel_tol * sigma_max are treated as zero. A zero matrix maps to zero.
CMatrix pseudo_inverse(const CMatrix& m, double rel_tol);

// Number of singular values above rel_tol * sigma_max.
int numerical_rank(const CMatrix& m, double rel_tol);

struct PropagatorOptions {
  // Relative SVD cutoff for every pseudoinverse. Unset means
  // 1e-10 * max(N, K), with K = 0 for theoretical covariances.
  std::optional<double> pinv_rel_tol;

  double resolve(const CovarianceEstimate& gamma) const;
};

enum class OperatorKind { StandardQ, Q1, Q2, Extended };

// Rule for the auxiliary block k(j) used in Gamma_ik * pinv(Gamma_jk).
//
// Default is the cyclic successor: the first index after j in the cyclic
// order 1..n that is neither i nor j. For n = 2 no such index exists and
// k(j) = j is used, which makes psi:2:1 the Q2 form and psi:2:2 the Q1
// form with a pseudoinverse. Explicit overrides take precedence.
class KStrategy {
 public:
  static KStrategy cyclic_successor() { return {}; }

  // Use block k for target block j. Validated when the operator is built.
  KStrategy& override_k(int j, int k) {
    overrides_[j] = k;
    return *this;
  }

  int choose(int order, int i, int j) const;
  const std::map<int, int>& overrides() const { return overrides_; }

 private:
  std::map<int, int> overrides_;
};

struct PropagatorOperator {
  CMatrix entries;  // rows x N
  OperatorKind kind = OperatorKind::StandardQ;
  std::optional<int> order_n;
  std::optional<int> block_i;
  // k(j) for j = 1..n (index j-1); 0 at j = i. Empty for classical kinds.
  std::vector<int> k_choices;

  // Identifier in the method grammar: prop, prop-q1, prop-q2, psi:<n>:<i>.
  // Assembled operators report psi:<n>.
  std::string id() const;
};

// Q = [ (pinv(Gamma_s) Gamma_n)^H | -I_{N-P} ], Gamma_s the first P columns.
PropagatorOperator standard_propagator(const CovarianceEstimate& gamma, int sources,
                                       const PropagatorOptions& options = {});

// Q1 = [ Gamma_21 Gamma_11^{-1} | -I_{N-P} ].
PropagatorOperator propagator_q1(const CovarianceEstimate& gamma, int sources,
                                 const PropagatorOptions& options = {});

// Q2 = [ -I_P | Gamma_12 pinv(Gamma_22) ]. Requires N >= 2P.
PropagatorOperator propagator_q2(const CovarianceEstimate& gamma, int sources,
                                 const PropagatorOptions& options = {});

// Q_ij(k) = Gamma_ik pinv(Gamma_jk), so that A_i = Q_ij A_j without noise.
// Requires i != j and k not in {i, j}.
CMatrix transfer_operator(const CovarianceEstimate& gamma, const PartitionScheme& scheme, int i,
                          int j, int k, const PropagatorOptions& options = {});

// Psi_ni = sum_{j != i} Q_ij(k(j)) e_j^T - (n-1) e_i^T, a b_i x N operator.
PropagatorOperator extended_propagator(const CovarianceEstimate& gamma,
                                       const PartitionScheme& scheme, int i,
                                       const KStrategy& k_strategy = KStrategy::cyclic_successor(),
                                       const PropagatorOptions& options = {});

// Row-stack of Psi_n1 .. Psi_nn (N x N). Its trace is -(n-1) N.
PropagatorOperator assembled_psi(const CovarianceEstimate& gamma, const PartitionScheme& scheme,
                                 const KStrategy& k_strategy = KStrategy::cyclic_successor(),
                                 const PropagatorOptions& options = {});

struct OperatorRef {
  int order_n;
  int block_i;
  friend bool operator==(const OperatorRef&, const OperatorRef&) = default;
};

struct OperatorCatalog {
  int sensors = 0;
  int sources = 0;
  int max_order = 0;
  std::vector<OperatorRef> entries;
  // Applicability verdict when `entries` is empty.
  std::string reason;

  std::size_t size() const { return entries.size(); }
};

// All (n, i) with 2 <= n <= floor(N/P), 1 <= i <= n. Returns an empty
// catalog with a reason when floor(N/P) < 2. Throws UsageError for
// non-positive inputs.
OperatorCatalog enumerate_operators(int sensors, int sources);

// Closed form n_max (n_max + 1) / 2 - 1, 0 when n_max < 2.
long long catalog_size(int sensors, int sources);

}  // namespace extprop
