#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "extprop/array_model.hpp"
#include "extprop/estimators.hpp"
#include "extprop/method.hpp"
#include "extprop/synthesis.hpp"

namespace extprop {

struct ExperimentPlan {
  ArrayConfig config;
  Scenario scenario;
  std::vector<MethodId> methods;
  int trials = 1;
  std::vector<double> snr_grid_db;  // rmse_vs_snr only
  ScanGrid grid;
  PropagatorOptions propagator;
  // Skip trials whose estimator throws NumericalError instead of aborting;
  // the skip counts are reported with the results.
  bool tolerate_failures = false;
  // Worker threads; 0 reads EXTPROP_THREADS, then hardware concurrency.
  int threads = 0;

  // Throws UsageError / PartitionError / ApplicabilityError on an invalid plan.
  void validate() const;
};

struct AveragedSpectra {
  std::vector<AngularSpectrum> spectra;  // one per plan method, same order
  int trials_used = 0;
  int trials_failed = 0;
};

struct RmseCurve {
  std::vector<double> snr_db;
  std::vector<std::string> method_ids;
  std::map<std::string, std::vector<double>> rmse_deg;
  // Trials skipped per method and SNR point (tolerate_failures mode).
  std::map<std::string, std::vector<int>> failed_trials;
};

struct CorrelationMatrix {
  std::vector<std::string> method_ids;
  RMatrix entries;
};

// Seed salt for SNR grid point s; trial t at point s uses
// derive_seed(base, t, snr_salt(s)).
std::uint64_t snr_salt(std::size_t snr_index);

// sqrt(mean over trials and sources of (sorted estimate - sorted truth)^2).
// Throws DomainError on a length mismatch or an empty trial list.
double rmse(const std::vector<DoaEstimate>& estimates, const std::vector<double>& truth);

// Elementwise mean of each spectral method's spectrum over plan.trials
// independent trials. Trial t draws snapshots with seed
// derive_seed(scenario.seed, t), shared by all methods.
AveragedSpectra averaged_spectra(const ExperimentPlan& plan);
AngularSpectrum averaged_spectrum(const ExperimentPlan& plan, const MethodId& method);

RmseCurve rmse_vs_snr(const ExperimentPlan& plan);

// Pearson correlation between spectrum value vectors. Throws DomainError
// for mismatched grids or a constant spectrum.
CorrelationMatrix spectrum_correlation(const std::vector<AngularSpectrum>& spectra);

int resolve_thread_count(int requested);

// Runs body(0..count-1) on up to `threads` workers. Exceptions are
// rethrown after all workers finish, lowest index first.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace extprop
