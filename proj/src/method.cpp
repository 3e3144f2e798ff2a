#include "extprop/method.hpp"

#include <charconv>

namespace extprop {

namespace {

int parse_positive(std::string_view text, std::string_view whole) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || value < 1) {
    throw UsageError("malformed method identifier '" + std::string(whole) +
                     "': expected a positive integer, got '" + std::string(text) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string MethodId::to_string() const {
  switch (kind) {
    case MethodKind::Prop:
      return "prop";
    case MethodKind::PropQ1:
      return "prop-q1";
    case MethodKind::PropQ2:
      return "prop-q2";
    case MethodKind::Psi:
      return "psi:" + std::to_string(order_n) + ":" + std::to_string(block_i);
    case MethodKind::Music:
      return "music";
    case MethodKind::Esprit:
      return esprit_subarray ? "esprit:" + std::to_string(*esprit_subarray) : "esprit";
  }
  return {};
}

MethodId parse_method(std::string_view text) {
  const std::string_view s = trim(text);
  MethodId id;
  if (s == "prop") {
    id.kind = MethodKind::Prop;
  } else if (s == "prop-q1") {
    id.kind = MethodKind::PropQ1;
  } else if (s == "prop-q2") {
    id.kind = MethodKind::PropQ2;
  } else if (s == "music") {
    id.kind = MethodKind::Music;
  } else if (s == "esprit") {
    id.kind = MethodKind::Esprit;
  } else if (s.starts_with("esprit:")) {
    id.kind = MethodKind::Esprit;
    id.esprit_subarray = parse_positive(s.substr(7), s);
  } else if (s.starts_with("psi:")) {
    const std::string_view rest = s.substr(4);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) {
      throw UsageError("malformed method identifier '" + std::string(s) +
                       "': expected psi:<n>:<i>");
    }
    id.kind = MethodKind::Psi;
    id.order_n = parse_positive(rest.substr(0, colon), s);
    id.block_i = parse_positive(rest.substr(colon + 1), s);
    if (id.block_i > id.order_n) {
      throw UsageError("method '" + std::string(s) + "': block index i must satisfy 1 <= i <= n");
    }
  } else {
    throw UsageError("unknown method '" + std::string(s) +
                     "' (expected prop, prop-q1, prop-q2, psi:<n>:<i>, music, esprit[:m])");
  }
  return id;
}

std::vector<MethodId> parse_method_list(std::string_view text) {
  std::vector<MethodId> out;
  while (true) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    if (!item.empty()) {
      out.push_back(parse_method(item));
    } else if (comma != std::string_view::npos || !out.empty()) {
      throw UsageError("empty entry in method list");
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) {
    throw UsageError("method list is empty");
  }
  return out;
}

void validate_method(const MethodId& method, int sensors, int sources) {
  if (sources < 1 || sources >= sensors) {
    throw ApplicabilityError(method.to_string() + " needs 1 <= P < N");
  }
  switch (method.kind) {
    case MethodKind::Psi:
      make_partition(sensors, sources, method.order_n);
      break;
    case MethodKind::PropQ2:
      if (sensors < 2 * sources) {
        throw ApplicabilityError("prop-q2 needs N >= 2P");
      }
      break;
    case MethodKind::Esprit:
      if (method.esprit_subarray &&
          (*method.esprit_subarray < sources || *method.esprit_subarray > sensors - 1)) {
        throw DomainError("esprit subarray size must lie in " + std::to_string(sources) + ".." +
                          std::to_string(sensors - 1));
      }
      break;
    default:
      break;
  }
}

PropagatorOperator build_operator(const MethodId& method, const CovarianceEstimate& gamma,
                                  int sources, const PropagatorOptions& options) {
  switch (method.kind) {
    case MethodKind::Prop:
      return standard_propagator(gamma, sources, options);
    case MethodKind::PropQ1:
      return propagator_q1(gamma, sources, options);
    case MethodKind::PropQ2:
      return propagator_q2(gamma, sources, options);
    case MethodKind::Psi: {
      const PartitionScheme scheme = make_partition(gamma.sensors(), sources, method.order_n);
      return extended_propagator(gamma, scheme, method.block_i, KStrategy::cyclic_successor(),
                                 options);
    }
    default:
      throw UsageError(method.to_string() + " is not a propagator method");
  }
}

AngularSpectrum method_spectrum(const MethodId& method, const CovarianceEstimate& gamma,
                                int sources, const SteeringGrid& grid,
                                const PropagatorOptions& options) {
  if (method.kind == MethodKind::Esprit) {
    throw UsageError("esprit has no pseudo-spectrum");
  }
  if (method.kind == MethodKind::Music) {
    return music_spectrum(gamma, sources, grid);
  }
  return spectrum_from_operator(build_operator(method, gamma, sources, options).entries, grid,
                                method.to_string());
}

DoaEstimate method_estimate(const MethodId& method, const CovarianceEstimate& gamma, int sources,
                            const SteeringGrid& grid, const PropagatorOptions& options) {
  if (method.kind == MethodKind::Esprit) {
    DoaEstimate est = esprit(gamma, sources, grid.config(), method.esprit_subarray);
    est.method_id = method.to_string();
    return est;
  }
  return find_peaks(method_spectrum(method, gamma, sources, grid, options), sources);
}

}  // namespace extprop
