#include "doctest.h"

#include <cmath>

#include "extprop/experiments.hpp"
#include "test_support.hpp"

using namespace extprop;

namespace {

ExperimentPlan reference_plan(std::vector<MethodId> methods, int trials, double snr_db = 5.0) {
  return ExperimentPlan{ArrayConfig(18),
                        Scenario({10.0, 21.0, 45.0}, {}, snr_db, 200, 1),
                        std::move(methods),
                        trials,
                        {},
                        ScanGrid{},
                        {},
                        false,
                        0};
}

DoaEstimate est(std::vector<double> a) { return DoaEstimate{std::move(a), "x"}; }

}  // namespace

TEST_CASE("method identifiers") {
  CHECK(parse_method("prop").kind == MethodKind::Prop);
  CHECK(parse_method("prop-q1").kind == MethodKind::PropQ1);
  CHECK(parse_method("prop-q2").kind == MethodKind::PropQ2);
  CHECK(parse_method("music").kind == MethodKind::Music);
  const MethodId psi = parse_method("psi:4:3");
  CHECK(psi.kind == MethodKind::Psi);
  CHECK(psi.order_n == 4);
  CHECK(psi.block_i == 3);
  CHECK(psi.to_string() == "psi:4:3");
  CHECK(parse_method("esprit").to_string() == "esprit");
  CHECK(parse_method("esprit:9").esprit_subarray == 9);
  CHECK_FALSE(parse_method("esprit").is_spectral());

  for (const char* bad : {"", "psi", "psi:3", "psi:3:4", "psi:3:0", "psi:a:1", "psi:3:1:2",
                          "esprit:", "capon", "PROP", "psi: 3:1"}) {
    CHECK_THROWS_AS(parse_method(bad), UsageError);
  }

  const std::vector<MethodId> list = parse_method_list("psi:4:1,music,esprit");
  CHECK(list.size() == 3);
  CHECK(list[1].kind == MethodKind::Music);
  CHECK_THROWS_AS(parse_method_list(""), UsageError);
  CHECK_THROWS_AS(parse_method_list("music,,prop"), UsageError);

  CHECK_THROWS_AS(validate_method(parse_method("psi:9:1"), 18, 3), PartitionError);
  CHECK_THROWS_AS(validate_method(parse_method("prop-q2"), 5, 3), ApplicabilityError);
  CHECK_NOTHROW(validate_method(parse_method("psi:6:6"), 18, 3));
  CHECK_THROWS_AS(build_operator(parse_method("music"), testing::noiseless(ArrayConfig(4), {0.0}), 1),
                  UsageError);
}

TEST_CASE("rmse") {
  CHECK(rmse({est({10.0, 20.0})}, {10.0, 20.0}) == 0.0);
  CHECK(rmse({est({11.0, 21.0})}, {10.0, 20.0}) == doctest::Approx(1.0));
  CHECK(rmse({est({11.0}), est({9.0})}, {10.0}) == doctest::Approx(1.0));
  // Estimates are matched after sorting.
  CHECK(rmse({est({20.0, 10.0})}, {10.0, 20.0}) == 0.0);
  CHECK(rmse({est({10.0, 23.0})}, {10.0, 20.0}) == doctest::Approx(std::sqrt(4.5)));
  CHECK_THROWS_AS(rmse({}, {10.0}), DomainError);
  CHECK_THROWS_AS(rmse({est({1.0})}, {1.0, 2.0}), DomainError);
}

TEST_CASE("a single-trial average equals a single run") {
  const ExperimentPlan plan = reference_plan({parse_method("psi:4:1")}, 1);
  const AngularSpectrum avg = averaged_spectrum(plan, plan.methods[0]);
  const Scenario sc = plan.scenario.with_seed(derive_seed(plan.scenario.seed(), 0));
  const CovarianceEstimate g = sample_covariance(simulate_snapshots(plan.config, sc));
  const AngularSpectrum direct =
      method_spectrum(plan.methods[0], g, 3, SteeringGrid(plan.config, plan.grid));
  CHECK(avg.values == direct.values);
}

TEST_CASE("averaging is deterministic and independent of the thread count") {
  ExperimentPlan plan = reference_plan({parse_method("psi:3:1"), parse_method("music")}, 6);
  plan.threads = 1;
  const AveragedSpectra one = averaged_spectra(plan);
  plan.threads = 3;
  const AveragedSpectra three = averaged_spectra(plan);
  CHECK(one.trials_used == 6);
  CHECK(one.trials_failed == 0);
  REQUIRE(one.spectra.size() == 2);
  CHECK(one.spectra[0].values == three.spectra[0].values);
  CHECK(one.spectra[1].values == three.spectra[1].values);
  CHECK(one.spectra[1].method_id == "music");

  // Mean of the per-trial spectra.
  const SteeringGrid grid(plan.config, plan.grid);
  std::vector<double> manual(grid.angles_deg().size(), 0.0);
  for (int t = 0; t < 6; ++t) {
    const Scenario sc = plan.scenario.with_seed(derive_seed(plan.scenario.seed(), t));
    const auto s = method_spectrum(plan.methods[0], sample_covariance(simulate_snapshots(plan.config, sc)),
                                   3, grid);
    for (std::size_t q = 0; q < manual.size(); ++q) manual[q] += s.values[q];
  }
  for (std::size_t q = 0; q < manual.size(); q += 97) {
    CHECK(one.spectra[0].values[q] == doctest::Approx(manual[q] / 6.0).epsilon(1e-12));
  }

  CHECK_THROWS_AS(averaged_spectra(reference_plan({parse_method("esprit")}, 2)), UsageError);
  CHECK_THROWS_AS(averaged_spectra(reference_plan({parse_method("psi:9:1")}, 2)), PartitionError);
  CHECK_THROWS_AS(averaged_spectra(reference_plan({}, 2)), UsageError);
  CHECK_THROWS_AS(averaged_spectra(reference_plan({parse_method("music")}, 0)), UsageError);
}

TEST_CASE("averaged spectrum resolves the reference sources at 5 dB") {
  const ExperimentPlan plan = reference_plan({parse_method("psi:2:1")}, 50);
  const DoaEstimate e = find_peaks(averaged_spectrum(plan, plan.methods[0]), 3);
  const std::vector<double> truth{10.0, 21.0, 45.0};
  for (int q = 0; q < 3; ++q) CHECK(std::abs(e.angles_deg[q] - truth[q]) <= 0.5);
}

TEST_CASE("peak positions are stable as the trial count doubles") {
  const MethodId m = parse_method("psi:2:1");
  const DoaEstimate a = find_peaks(averaged_spectrum(reference_plan({m}, 50), m), 3);
  const DoaEstimate b = find_peaks(averaged_spectrum(reference_plan({m}, 100), m), 3);
  for (int q = 0; q < 3; ++q) CHECK(std::abs(a.angles_deg[q] - b.angles_deg[q]) <= 0.1 + 1e-9);
}

TEST_CASE("rmse versus snr") {
  ExperimentPlan plan = reference_plan({parse_method("psi:4:1"), parse_method("esprit")}, 10);
  plan.snr_grid_db = {0.0, 20.0};
  const RmseCurve curve = rmse_vs_snr(plan);
  CHECK(curve.snr_db == plan.snr_grid_db);
  CHECK(curve.method_ids == std::vector<std::string>{"psi:4:1", "esprit"});
  for (const auto& id : curve.method_ids) {
    const auto& r = curve.rmse_deg.at(id);
    REQUIRE(r.size() == 2);
    CHECK(std::isfinite(r[0]));
    CHECK(r[1] < r[0]);
    CHECK(curve.failed_trials.at(id) == std::vector<int>{0, 0});
  }
  // Same seeds, same answer.
  CHECK(rmse_vs_snr(plan).rmse_deg == curve.rmse_deg);

  plan.snr_grid_db = {};
  CHECK_THROWS_AS(rmse_vs_snr(plan), UsageError);
  plan.snr_grid_db = {5.0, 5.0};
  CHECK_THROWS_AS(rmse_vs_snr(plan), UsageError);
  CHECK(snr_salt(0) == 0);
  CHECK(snr_salt(3) == (3ULL << 32));
}

TEST_CASE("spectrum correlation") {
  AngularSpectrum a{{0, 1, 2, 3}, {1, 3, 2, 5}, "a"};
  AngularSpectrum doubled{{0, 1, 2, 3}, {2, 6, 4, 10}, "b"};
  AngularSpectrum flipped{{0, 1, 2, 3}, {-1, -3, -2, -5}, "c"};
  const CorrelationMatrix c = spectrum_correlation({a, doubled, flipped});
  CHECK(c.method_ids == std::vector<std::string>{"a", "b", "c"});
  CHECK(c.entries(0, 0) == 1.0);
  CHECK(c.entries(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.entries(0, 2) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(c.entries == c.entries.transpose());

  // Pearson oracle on a generic pair.
  AngularSpectrum x{{0, 1, 2, 3, 4}, {1, 2, 0, 4, 3}, "x"};
  AngularSpectrum y{{0, 1, 2, 3, 4}, {2, 1, 1, 3, 5}, "y"};
  double mx = 2.0, my = 2.4, sxy = 0, sxx = 0, syy = 0;
  for (int q = 0; q < 5; ++q) {
    sxy += (x.values[q] - mx) * (y.values[q] - my);
    sxx += (x.values[q] - mx) * (x.values[q] - mx);
    syy += (y.values[q] - my) * (y.values[q] - my);
  }
  CHECK(spectrum_correlation({x, y}).entries(0, 1) ==
        doctest::Approx(sxy / std::sqrt(sxx * syy)).epsilon(1e-14));

  CHECK(spectrum_correlation({a}).entries == RMatrix::Ones(1, 1));
  AngularSpectrum flat{{0, 1, 2, 3}, {2, 2, 2, 2}, "flat"};
  CHECK_THROWS_AS(spectrum_correlation({a, flat}), DomainError);
  AngularSpectrum other_grid{{0, 1, 2, 4}, {1, 2, 3, 4}, "g"};
  CHECK_THROWS_AS(spectrum_correlation({a, other_grid}), DomainError);
  CHECK_THROWS_AS(spectrum_correlation({}), DomainError);
}

TEST_CASE("parallel_for") {
  std::vector<int> hits(50, 0);
  parallel_for(50, 4, [&](int t) { hits[static_cast<std::size_t>(t)] += t; });
  for (int t = 0; t < 50; ++t) CHECK(hits[static_cast<std::size_t>(t)] == t);

  try {
    parallel_for(20, 3, [](int t) {
      if (t == 7 || t == 13) throw DomainError("fail " + std::to_string(t));
    });
    FAIL("expected an exception");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()) == "fail 7");
  }
  CHECK(resolve_thread_count(5) == 5);
  CHECK(resolve_thread_count(0) >= 1);
}

TEST_CASE("noiseless limit of the RMSE curve") {
  ExperimentPlan plan = reference_plan(
      {parse_method("prop"), parse_method("psi:4:1"), parse_method("psi:6:6"), parse_method("music"),
       parse_method("esprit")},
      5);
  plan.snr_grid_db = {60.0};
  const RmseCurve curve = rmse_vs_snr(plan);
  for (const auto& id : curve.method_ids) CHECK(curve.rmse_deg.at(id)[0] <= 0.1);
}

TEST_CASE("averaged MUSIC at 10 dB") {
  const ExperimentPlan plan = reference_plan({parse_method("music")}, 50, 10.0);
  const DoaEstimate e = find_peaks(averaged_spectrum(plan, plan.methods[0]), 3);
  const std::vector<double> truth{10.0, 21.0, 45.0};
  for (int q = 0; q < 3; ++q) CHECK(std::abs(e.angles_deg[q] - truth[q]) <= 0.5);
}
