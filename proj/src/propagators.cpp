#include "extprop/propagators.hpp"

#include <algorithm>
#include <string>

namespace extprop {

namespace {

struct PinvResult {
  CMatrix inverse;
  int rank = 0;
};

PinvResult pinv_with_rank(const CMatrix& m, double rel_tol) {
  PinvResult out;
  out.inverse = CMatrix::Zero(m.cols(), m.rows());
  if (m.size() == 0) {
    return out;
  }
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) {
    return out;
  }
  const double cutoff = rel_tol * s(0);
  Eigen::VectorXd s_inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index q = 0; q < s.size(); ++q) {
    if (s(q) > cutoff) {
      s_inv(q) = 1.0 / s(q);
      ++out.rank;
    }
  }
  out.inverse = svd.matrixV() * s_inv.cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
  return out;
}

CMatrix checked_pinv(const CMatrix& m, double rel_tol, int required_rank, const std::string& what) {
  PinvResult r = pinv_with_rank(m, rel_tol);
  if (r.rank < required_rank) {
    throw IllConditionedError(what + " has numerical rank " + std::to_string(r.rank) +
                              ", needs " + std::to_string(required_rank));
  }
  return std::move(r.inverse);
}

void check_sources(const CovarianceEstimate& gamma, int sources) {
  if (sources < 1 || sources >= gamma.sensors()) {
    throw ApplicabilityError("propagator needs 1 <= P < N, got P=" + std::to_string(sources) +
                             ", N=" + std::to_string(gamma.sensors()));
  }
}

std::string block_name(int i, int j) {
  return "Gamma_" + std::to_string(i) + "," + std::to_string(j);
}

// Gamma_ik pinv(Gamma_jk) without the k-admissibility check.
CMatrix transfer_unchecked(const CovarianceEstimate& gamma, const PartitionScheme& scheme, int i,
                           int j, int k, double tol) {
  const CMatrix g_ik = covariance_block(gamma, scheme, i, k);
  const CMatrix g_jk = covariance_block(gamma, scheme, j, k);
  return g_ik * checked_pinv(g_jk, tol, scheme.sources(), block_name(j, k));
}

}  // namespace

CMatrix pseudo_inverse(const CMatrix& m, double rel_tol) {
  return pinv_with_rank(m, rel_tol).inverse;
}

int numerical_rank(const CMatrix& m, double rel_tol) {
  if (m.size() == 0) {
    return 0;
  }
  Eigen::JacobiSVD<CMatrix> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s(0) == 0.0) {
    return 0;
  }
  return static_cast<int>((s.array() > rel_tol * s(0)).count());
}

double PropagatorOptions::resolve(const CovarianceEstimate& gamma) const {
  if (pinv_rel_tol) {
    return *pinv_rel_tol;
  }
  return 1e-10 * static_cast<double>(std::max(gamma.sensors(), gamma.snapshots()));
}

int KStrategy::choose(int order, int i, int j) const {
  if (auto it = overrides_.find(j); it != overrides_.end()) {
    const int k = it->second;
    const bool in_range = k >= 1 && k <= order;
    const bool admissible = order == 2 ? (k == i || k == j) : (k != i && k != j);
    if (!in_range || !admissible) {
      throw PartitionError("k override " + std::to_string(k) + " for block j=" +
                           std::to_string(j) + " is not admissible for n=" +
                           std::to_string(order) + ", i=" + std::to_string(i));
    }
    return k;
  }
  if (order == 2) {
    return j;
  }
  for (int step = 1; step < order; ++step) {
    const int k = (j - 1 + step) % order + 1;
    if (k != i && k != j) {
      return k;
    }
  }
  throw PartitionError("no admissible k");  // unreachable for n >= 3
}

std::string PropagatorOperator::id() const {
  switch (kind) {
    case OperatorKind::StandardQ:
      return "prop";
    case OperatorKind::Q1:
      return "prop-q1";
    case OperatorKind::Q2:
      return "prop-q2";
    case OperatorKind::Extended:
      break;
  }
  std::string out = "psi:" + std::to_string(order_n.value_or(0));
  if (block_i) {
    out += ":" + std::to_string(*block_i);
  }
  return out;
}

PropagatorOperator standard_propagator(const CovarianceEstimate& gamma, int sources,
                                       const PropagatorOptions& options) {
  check_sources(gamma, sources);
  const int n = gamma.sensors();
  const double tol = options.resolve(gamma);
  const CMatrix g_s = gamma.entries().leftCols(sources);
  const CMatrix g_n = gamma.entries().rightCols(n - sources);
  const CMatrix pi_h = checked_pinv(g_s, tol, sources, "Gamma_s") * g_n;

  PropagatorOperator op;
  op.kind = OperatorKind::StandardQ;
  op.entries.resize(n - sources, n);
  op.entries.leftCols(sources) = pi_h.adjoint();
  op.entries.rightCols(n - sources) = -CMatrix::Identity(n - sources, n - sources);
  return op;
}

PropagatorOperator propagator_q1(const CovarianceEstimate& gamma, int sources,
                                 const PropagatorOptions& options) {
  check_sources(gamma, sources);
  const int n = gamma.sensors();
  const double tol = options.resolve(gamma);
  const CMatrix g11 = gamma.entries().topLeftCorner(sources, sources);
  const CMatrix g21 = gamma.entries().bottomLeftCorner(n - sources, sources);

  PropagatorOperator op;
  op.kind = OperatorKind::Q1;
  op.entries.resize(n - sources, n);
  op.entries.leftCols(sources) = g21 * checked_pinv(g11, tol, sources, "Gamma_11");
  op.entries.rightCols(n - sources) = -CMatrix::Identity(n - sources, n - sources);
  return op;
}

PropagatorOperator propagator_q2(const CovarianceEstimate& gamma, int sources,
                                 const PropagatorOptions& options) {
  check_sources(gamma, sources);
  const int n = gamma.sensors();
  if (n < 2 * sources) {
    throw ApplicabilityError("Q2 needs N >= 2P, got N=" + std::to_string(n) +
                             ", P=" + std::to_string(sources));
  }
  const double tol = options.resolve(gamma);
  const CMatrix g12 = gamma.entries().topRightCorner(sources, n - sources);
  const CMatrix g22 = gamma.entries().bottomRightCorner(n - sources, n - sources);

  PropagatorOperator op;
  op.kind = OperatorKind::Q2;
  op.entries.resize(sources, n);
  op.entries.leftCols(sources) = -CMatrix::Identity(sources, sources);
  op.entries.rightCols(n - sources) = g12 * checked_pinv(g22, tol, sources, "Gamma_22");
  return op;
}

CMatrix transfer_operator(const CovarianceEstimate& gamma, const PartitionScheme& scheme, int i,
                          int j, int k, const PropagatorOptions& options) {
  // Validate the indices against the scheme before checking for clashes.
  scheme.block_size(i);
  scheme.block_size(j);
  scheme.block_size(k);
  if (i == j || k == i || k == j) {
    throw PartitionError("transfer operator needs distinct i, j, k; got i=" + std::to_string(i) +
                         ", j=" + std::to_string(j) + ", k=" + std::to_string(k));
  }
  return transfer_unchecked(gamma, scheme, i, j, k, options.resolve(gamma));
}

PropagatorOperator extended_propagator(const CovarianceEstimate& gamma,
                                       const PartitionScheme& scheme, int i,
                                       const KStrategy& k_strategy,
                                       const PropagatorOptions& options) {
  const int order = scheme.order();
  if (order < 2) {
    throw ApplicabilityError("extended propagator needs n >= 2; standard propagator is available");
  }
  const int rows = scheme.block_size(i);
  if (gamma.sensors() != scheme.sensors()) {
    throw PartitionError("covariance size does not match the partition");
  }
  const double tol = options.resolve(gamma);

  PropagatorOperator op;
  op.kind = OperatorKind::Extended;
  op.order_n = order;
  op.block_i = i;
  op.k_choices.assign(static_cast<std::size_t>(order), 0);
  op.entries = CMatrix::Zero(rows, scheme.sensors());
  op.entries.middleCols(scheme.block_offset(i), rows).diagonal().setConstant(-(order - 1.0));
  for (int j = 1; j <= order; ++j) {
    if (j == i) {
      continue;
    }
    const int k = k_strategy.choose(order, i, j);
    op.k_choices[static_cast<std::size_t>(j - 1)] = k;
    op.entries.middleCols(scheme.block_offset(j), scheme.block_size(j)) =
        transfer_unchecked(gamma, scheme, i, j, k, tol);
  }
  return op;
}

PropagatorOperator assembled_psi(const CovarianceEstimate& gamma, const PartitionScheme& scheme,
                                 const KStrategy& k_strategy, const PropagatorOptions& options) {
  PropagatorOperator out;
  out.kind = OperatorKind::Extended;
  out.order_n = scheme.order();
  out.entries.resize(scheme.sensors(), scheme.sensors());
  for (int i = 1; i <= scheme.order(); ++i) {
    const PropagatorOperator row = extended_propagator(gamma, scheme, i, k_strategy, options);
    out.entries.middleRows(scheme.block_offset(i), scheme.block_size(i)) = row.entries;
  }
  return out;
}

OperatorCatalog enumerate_operators(int sensors, int sources) {
  if (sensors < 1 || sources < 1) {
    throw UsageError("sensor and source counts must be positive");
  }
  OperatorCatalog cat;
  cat.sensors = sensors;
  cat.sources = sources;
  cat.max_order = sensors / sources;
  if (cat.max_order < 2) {
    if (sensors > sources) {
      cat.reason = "no extended propagator; standard propagator available";
    } else {
      cat.reason = "no extended propagator; N <= P leaves no noise subspace";
    }
    return cat;
  }
  for (int n = 2; n <= cat.max_order; ++n) {
    for (int i = 1; i <= n; ++i) {
      cat.entries.push_back({n, i});
    }
  }
  return cat;
}

long long catalog_size(int sensors, int sources) {
  if (sensors < 1 || sources < 1) {
    return 0;
  }
  const long long n_max = sensors / sources;
  return n_max < 2 ? 0 : n_max * (n_max + 1) / 2 - 1;
}

}  // namespace extprop
