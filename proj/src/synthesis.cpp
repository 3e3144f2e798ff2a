#include "extprop/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace extprop {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Complex Rng::complex_gaussian(double variance) {
  // 1 - u lies in (0, 1], so the logarithm is finite.
  const double radius_u = 1.0 - uniform();
  const double phase_u = uniform();
  const double radius = std::sqrt(-variance * std::log(radius_u));
  return std::polar(radius, 2.0 * std::numbers::pi * phase_u);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t trial, std::uint64_t salt) {
  return base_seed ^ (trial + salt);
}

Scenario::Scenario(std::vector<double> angles_deg, std::vector<double> source_powers,
                   double snr_db, int snapshots, std::uint64_t seed)
    : snr_db_(snr_db), snapshots_(snapshots), seed_(seed) {
  if (angles_deg.empty()) {
    throw ScenarioError("scenario needs at least one source");
  }
  if (snapshots < 1) {
    throw ScenarioError("snapshot count must be positive, got " + std::to_string(snapshots));
  }
  if (source_powers.empty()) {
    source_powers.assign(angles_deg.size(), 1.0);
  }
  if (source_powers.size() != angles_deg.size()) {
    throw ScenarioError("got " + std::to_string(source_powers.size()) + " source powers for " +
                        std::to_string(angles_deg.size()) + " angles");
  }
  for (double p : source_powers) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw ScenarioError("source powers must be positive and finite");
    }
  }
  if (std::isnan(snr_db)) {
    throw ScenarioError("snr_db is NaN");
  }

  std::vector<std::size_t> order(angles_deg.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return angles_deg[a] < angles_deg[b]; });
  for (std::size_t idx : order) {
    angles_deg_.push_back(angles_deg[idx]);
    source_powers_.push_back(source_powers[idx]);
  }
  for (std::size_t p = 1; p < angles_deg_.size(); ++p) {
    if (angles_deg_[p] == angles_deg_[p - 1]) {
      std::ostringstream os;
      os << "duplicate source angle " << angles_deg_[p] << " deg";
      throw ScenarioError(os.str());
    }
  }
}

Scenario Scenario::with_seed(std::uint64_t seed) const {
  Scenario copy = *this;
  copy.seed_ = seed;
  return copy;
}

Scenario Scenario::with_snr(double snr_db) const {
  Scenario copy = *this;
  copy.snr_db_ = snr_db;
  return copy;
}

double noise_variance_from_snr(double snr_db, double reference_power) {
  if (!(reference_power > 0.0)) {
    throw DomainError("reference power must be positive");
  }
  return reference_power * std::pow(10.0, -snr_db / 10.0);
}

CMatrix generate_sources(int sources, int snapshots, const std::vector<double>& powers, Rng& rng) {
  if (static_cast<int>(powers.size()) != sources) {
    throw ScenarioError("source power list length does not match the source count");
  }
  CMatrix s(sources, snapshots);
  // Column-major fill: one snapshot (all sources) at a time.
  for (int k = 0; k < snapshots; ++k) {
    for (int p = 0; p < sources; ++p) {
      s(p, k) = rng.complex_gaussian(powers[static_cast<std::size_t>(p)]);
    }
  }
  return s;
}

SnapshotBlock simulate_snapshots(const ArrayConfig& config, const Scenario& scenario) {
  const int n = config.sensors();
  const int p = scenario.sources();
  if (p >= n) {
    throw ScenarioError(std::to_string(p) + " sources need more than " + std::to_string(n) +
                        " sensors");
  }
  const int k = scenario.snapshots();
  const SteeringMatrix a = channel_matrix(config, scenario.angles_deg());

  Rng rng(scenario.seed());
  const CMatrix s = generate_sources(p, k, scenario.source_powers(), rng);
  SnapshotBlock block{a.entries() * s};

  const double sigma2 = noise_variance_from_snr(scenario.snr_db(), 1.0);
  if (sigma2 > 0.0) {
    for (int col = 0; col < k; ++col) {
      for (int row = 0; row < n; ++row) {
        block.samples(row, col) += rng.complex_gaussian(sigma2);
      }
    }
  }
  return block;
}

}  // namespace extprop
