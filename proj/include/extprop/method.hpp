#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "extprop/estimators.hpp"
#include "extprop/propagators.hpp"

namespace extprop {

enum class MethodKind { Prop, PropQ1, PropQ2, Psi, Music, Esprit };

// Parsed method identifier. Grammar:
//   prop | prop-q1 | prop-q2 | psi:<n>:<i> | music | esprit[:<m>]
struct MethodId {
  MethodKind kind = MethodKind::Prop;
  int order_n = 0;  // psi only
  int block_i = 0;  // psi only
  std::optional<int> esprit_subarray;

  bool is_spectral() const { return kind != MethodKind::Esprit; }
  std::string to_string() const;

  friend bool operator==(const MethodId&, const MethodId&) = default;
};

// Throws UsageError on malformed input.
MethodId parse_method(std::string_view text);
// Comma-separated list; throws UsageError when empty.
std::vector<MethodId> parse_method_list(std::string_view text);

// Checks that the method exists for N sensors and P sources (partition
// bounds, N >= 2P for prop-q2, ESPRIT subarray range).
void validate_method(const MethodId& method, int sensors, int sources);

// Operator behind a propagator-family method (prop*, psi). Throws
// UsageError for music and esprit.
PropagatorOperator build_operator(const MethodId& method, const CovarianceEstimate& gamma,
                                  int sources, const PropagatorOptions& options = {});

// Pseudo-spectrum of a spectral method.
AngularSpectrum method_spectrum(const MethodId& method, const CovarianceEstimate& gamma,
                                int sources, const SteeringGrid& grid,
                                const PropagatorOptions& options = {});

// DoA estimate: peak search for spectral methods, ESPRIT otherwise.
DoaEstimate method_estimate(const MethodId& method, const CovarianceEstimate& gamma, int sources,
                            const SteeringGrid& grid, const PropagatorOptions& options = {});

}  // namespace extprop
