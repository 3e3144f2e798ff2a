#include "extprop/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <optional>
#include <thread>

#include "extprop/covariance.hpp"

namespace extprop {

void ExperimentPlan::validate() const {
  if (trials < 1) {
    throw UsageError("trial count must be positive");
  }
  if (methods.empty()) {
    throw UsageError("experiment needs at least one method");
  }
  for (const MethodId& m : methods) {
    validate_method(m, config.sensors(), scenario.sources());
  }
  for (std::size_t s = 1; s < snr_grid_db.size(); ++s) {
    if (!(snr_grid_db[s] > snr_grid_db[s - 1])) {
      throw UsageError("SNR grid must be strictly increasing");
    }
  }
  if (scenario.sources() >= config.sensors()) {
    throw ScenarioError("scenario has P >= N");
  }
  grid.points();
}

std::uint64_t snr_salt(std::size_t snr_index) {
  return static_cast<std::uint64_t>(snr_index) << 32;
}

double rmse(const std::vector<DoaEstimate>& estimates, const std::vector<double>& truth) {
  if (estimates.empty()) {
    throw DomainError("RMSE over zero trials");
  }
  std::vector<double> t = truth;
  std::sort(t.begin(), t.end());
  double sum = 0.0;
  for (const DoaEstimate& e : estimates) {
    if (e.angles_deg.size() != t.size()) {
      throw DomainError("estimate has " + std::to_string(e.angles_deg.size()) +
                        " angles, truth has " + std::to_string(t.size()));
    }
    std::vector<double> a = e.angles_deg;
    std::sort(a.begin(), a.end());
    for (std::size_t p = 0; p < a.size(); ++p) {
      const double d = a[p] - t[p];
      sum += d * d;
    }
  }
  return std::sqrt(sum / static_cast<double>(estimates.size() * t.size()));
}

int resolve_thread_count(int requested) {
  if (requested > 0) {
    return requested;
  }
  if (const char* env = std::getenv("EXTPROP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) {
      return v;
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(count, 0)));
  auto run = [&](int idx) {
    try {
      body(idx);
    } catch (...) {
      errors[static_cast<std::size_t>(idx)] = std::current_exception();
    }
  };
  const int workers = std::min(std::max(threads, 1), std::max(count, 1));
  if (workers <= 1) {
    for (int idx = 0; idx < count; ++idx) run(idx);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int idx = next++; idx < count; idx = next++) run(idx);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

AveragedSpectra averaged_spectra(const ExperimentPlan& plan) {
  plan.validate();
  std::vector<MethodId> spectral;
  for (const MethodId& m : plan.methods) {
    if (!m.is_spectral()) {
      throw UsageError(m.to_string() + " has no pseudo-spectrum to average");
    }
    spectral.push_back(m);
  }
  const SteeringGrid grid(plan.config, plan.grid);
  const int sources = plan.scenario.sources();

  using TrialValues = std::vector<std::vector<double>>;
  std::vector<std::optional<TrialValues>> per_trial(static_cast<std::size_t>(plan.trials));

  parallel_for(plan.trials, resolve_thread_count(plan.threads), [&](int t) {
    const Scenario sc = plan.scenario.with_seed(derive_seed(plan.scenario.seed(),
                                                            static_cast<std::uint64_t>(t)));
    const CovarianceEstimate gamma = sample_covariance(simulate_snapshots(plan.config, sc));
    try {
      TrialValues values;
      for (const MethodId& m : spectral) {
        values.push_back(method_spectrum(m, gamma, sources, grid, plan.propagator).values);
      }
      per_trial[static_cast<std::size_t>(t)] = std::move(values);
    } catch (const NumericalError& e) {
      if (!plan.tolerate_failures) {
        throw NumericalError("trial " + std::to_string(t) + ": " + e.what());
      }
    }
  });

  AveragedSpectra out;
  const std::size_t g = grid.angles_deg().size();
  for (const MethodId& m : spectral) {
    out.spectra.push_back({grid.angles_deg(), std::vector<double>(g, 0.0), m.to_string()});
  }
  for (const auto& trial : per_trial) {
    if (!trial) {
      ++out.trials_failed;
      continue;
    }
    ++out.trials_used;
    for (std::size_t m = 0; m < spectral.size(); ++m) {
      for (std::size_t q = 0; q < g; ++q) {
        out.spectra[m].values[q] += (*trial)[m][q];
      }
    }
  }
  if (out.trials_used == 0) {
    throw NumericalError("every trial failed");
  }
  for (auto& s : out.spectra) {
    for (double& v : s.values) v /= out.trials_used;
  }
  return out;
}

AngularSpectrum averaged_spectrum(const ExperimentPlan& plan, const MethodId& method) {
  ExperimentPlan single = plan;
  single.methods = {method};
  return averaged_spectra(single).spectra.front();
}

RmseCurve rmse_vs_snr(const ExperimentPlan& plan) {
  plan.validate();
  if (plan.snr_grid_db.empty()) {
    throw UsageError("rmse_vs_snr needs an SNR grid");
  }
  const SteeringGrid grid(plan.config, plan.grid);
  const int sources = plan.scenario.sources();
  const std::size_t n_snr = plan.snr_grid_db.size();
  const std::size_t n_methods = plan.methods.size();
  const auto trials = static_cast<std::size_t>(plan.trials);

  // estimates[s][t][m]; empty optional marks a skipped failure.
  std::vector<std::vector<std::vector<std::optional<DoaEstimate>>>> estimates(
      n_snr, std::vector<std::vector<std::optional<DoaEstimate>>>(
                 trials, std::vector<std::optional<DoaEstimate>>(n_methods)));

  const int units = static_cast<int>(n_snr * trials);
  parallel_for(units, resolve_thread_count(plan.threads), [&](int unit) {
    const std::size_t s = static_cast<std::size_t>(unit) / trials;
    const std::size_t t = static_cast<std::size_t>(unit) % trials;
    const Scenario sc = plan.scenario.with_snr(plan.snr_grid_db[s])
                            .with_seed(derive_seed(plan.scenario.seed(), t, snr_salt(s)));
    const CovarianceEstimate gamma = sample_covariance(simulate_snapshots(plan.config, sc));
    for (std::size_t m = 0; m < n_methods; ++m) {
      try {
        estimates[s][t][m] = method_estimate(plan.methods[m], gamma, sources, grid, plan.propagator);
      } catch (const NumericalError& e) {
        if (!plan.tolerate_failures) {
          throw NumericalError("SNR " + std::to_string(plan.snr_grid_db[s]) + " dB, trial " +
                               std::to_string(t) + ", " + plan.methods[m].to_string() + ": " +
                               e.what());
        }
      }
    }
  });

  RmseCurve curve;
  curve.snr_db = plan.snr_grid_db;
  for (std::size_t m = 0; m < n_methods; ++m) {
    const std::string id = plan.methods[m].to_string();
    curve.method_ids.push_back(id);
    auto& values = curve.rmse_deg[id];
    auto& failed = curve.failed_trials[id];
    for (std::size_t s = 0; s < n_snr; ++s) {
      std::vector<DoaEstimate> ok;
      int fails = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        if (estimates[s][t][m]) {
          ok.push_back(*estimates[s][t][m]);
        } else {
          ++fails;
        }
      }
      values.push_back(ok.empty() ? std::nan("") : rmse(ok, plan.scenario.angles_deg()));
      failed.push_back(fails);
    }
  }
  return curve;
}

CorrelationMatrix spectrum_correlation(const std::vector<AngularSpectrum>& spectra) {
  if (spectra.empty()) {
    throw DomainError("correlation of zero spectra");
  }
  const std::size_t g = spectra.front().values.size();
  const std::size_t count = spectra.size();
  std::vector<Eigen::VectorXd> centered;
  for (const AngularSpectrum& s : spectra) {
    if (s.values.size() != g || s.grid_deg != spectra.front().grid_deg) {
      throw DomainError("spectra do not share a scan grid");
    }
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(s.values.data(),
                                                          static_cast<Eigen::Index>(g));
    v.array() -= v.mean();
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw DomainError("spectrum '" + s.method_id + "' has zero variance; correlation undefined");
    }
    centered.push_back(v / norm);
  }
  CorrelationMatrix out;
  out.entries = RMatrix::Identity(static_cast<Eigen::Index>(count),
                                  static_cast<Eigen::Index>(count));
  for (std::size_t a = 0; a < count; ++a) {
    out.method_ids.push_back(spectra[a].method_id);
    for (std::size_t b = a + 1; b < count; ++b) {
      const double r = std::clamp(centered[a].dot(centered[b]), -1.0, 1.0);
      out.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = r;
      out.entries(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = r;
    }
  }
  return out;
}

}  // namespace extprop
