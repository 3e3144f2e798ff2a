#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "extprop/array_model.hpp"
#include "extprop/types.hpp"

namespace extprop {

// Seedable generator: mt19937_64 for the bit stream, Box-Muller for complex
// Gaussians. std::normal_distribution is avoided because its output differs
// between standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Circular complex Gaussian with E|z|^2 = variance.
  Complex complex_gaussian(double variance);

 private:
  std::mt19937_64 engine_;
};

// Seed for Monte Carlo trial `trial` at grid point `salt`:
// base ^ (trial + salt). Independent of execution order.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t trial, std::uint64_t salt = 0);

class Scenario {
 public:
  // Angles are sorted ascending (powers follow their angle). Empty
  // `source_powers` means every source at 1 W. Throws ScenarioError for
  // P < 1, K < 1, duplicate angles, mismatched or non-positive powers.
  Scenario(std::vector<double> angles_deg, std::vector<double> source_powers, double snr_db,
           int snapshots, std::uint64_t seed);

  const std::vector<double>& angles_deg() const { return angles_deg_; }
  const std::vector<double>& source_powers() const { return source_powers_; }
  double snr_db() const { return snr_db_; }
  int snapshots() const { return snapshots_; }
  std::uint64_t seed() const { return seed_; }
  int sources() const { return static_cast<int>(angles_deg_.size()); }

  Scenario with_seed(std::uint64_t seed) const;
  Scenario with_snr(double snr_db) const;

 private:
  std::vector<double> angles_deg_;
  std::vector<double> source_powers_;
  double snr_db_;
  int snapshots_;
  std::uint64_t seed_;
};

struct SnapshotBlock {
  CMatrix samples;  // N x K
};

// sigma^2 = reference_power * 10^(-snr_db / 10). +inf dB gives 0.
double noise_variance_from_snr(double snr_db, double reference_power = 1.0);

// P x K matrix; row p is i.i.d. CN(0, powers[p]).
CMatrix generate_sources(int sources, int snapshots, const std::vector<double>& powers, Rng& rng);

// X = A S + W. Sources are drawn first, then the noise, from Rng(scenario.seed()).
// Throws ScenarioError when P >= N.
SnapshotBlock simulate_snapshots(const ArrayConfig& config, const Scenario& scenario);

}  // namespace extprop
