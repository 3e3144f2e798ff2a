#include "doctest.h"

#include <cmath>
#include <limits>

#include "extprop/estimators.hpp"
#include "extprop/method.hpp"
#include "test_support.hpp"

using namespace extprop;

namespace {

AngularSpectrum make_spectrum(std::vector<double> values) {
  AngularSpectrum s;
  for (std::size_t q = 0; q < values.size(); ++q) s.grid_deg.push_back(-10.0 + 5.0 * q);
  s.values = std::move(values);
  s.method_id = "manual";
  return s;
}

}  // namespace

TEST_CASE("scan grid") {
  const std::vector<double> pts = ScanGrid{}.points();
  CHECK(pts.size() == 1799);
  CHECK(pts.front() == doctest::Approx(-89.9));
  CHECK(pts.back() == doctest::Approx(89.9));
  CHECK(pts[899] == doctest::Approx(0.0));
  CHECK(ScanGrid{-10.0, 10.0, 5.0}.points() == std::vector<double>{-10, -5, 0, 5, 10});
  CHECK_THROWS_AS((ScanGrid{0.0, 1.0, 0.0}.points()), DomainError);
  CHECK_THROWS_AS((ScanGrid{90.0, 95.0, 1.0}.points()), DomainError);

  const SteeringGrid sg(ArrayConfig(5), ScanGrid{-30.0, 30.0, 15.0});
  CHECK(sg.steering().rows() == 5);
  CHECK(sg.steering().cols() == 5);
  CHECK((sg.steering().col(1) - testing::hand_steering(5, 0.5, -15.0)).norm() < 1e-13);
}

TEST_CASE("eigen subspaces") {
  const ArrayConfig cfg(10);
  const CovarianceEstimate clean = testing::noiseless(cfg, {-20.0, 15.0, 50.0});
  const EigenSubspaces es = eigen_subspaces(clean, 3);
  CHECK(es.signal_basis.cols() == 3);
  CHECK(es.noise_basis.cols() == 7);
  const CMatrix proj = es.signal_basis * es.signal_basis.adjoint() +
                       es.noise_basis * es.noise_basis.adjoint();
  CHECK((proj - CMatrix::Identity(10, 10)).norm() < 1e-10);
  for (int q = 1; q < 10; ++q) CHECK(es.eigenvalues(q) <= es.eigenvalues(q - 1));
  for (int q = 3; q < 10; ++q) CHECK(std::abs(es.eigenvalues(q)) <= 1e-10 * es.eigenvalues(0));

  const double sigma2 = 0.25;
  const EigenSubspaces noisy = eigen_subspaces(testing::noiseless(cfg, {-20.0, 15.0, 50.0}, sigma2), 3);
  for (int q = 3; q < 10; ++q) CHECK(noisy.eigenvalues(q) == doctest::Approx(sigma2).epsilon(1e-9));

  const EigenSubspaces iso = eigen_subspaces(CovarianceEstimate(CMatrix::Identity(5, 5)), 2);
  CHECK((iso.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK((iso.signal_basis.adjoint() * iso.noise_basis).norm() < 1e-12);

  CHECK_THROWS_AS(eigen_subspaces(clean, 0), ApplicabilityError);
  CHECK_THROWS_AS(eigen_subspaces(clean, 10), ApplicabilityError);
}

TEST_CASE("noiseless spectra peak at the true angles") {
  const ArrayConfig cfg(18);
  const std::vector<double> truth{10.0, 21.0, 45.0};
  const CovarianceEstimate g = testing::noiseless(cfg, truth);
  const SteeringGrid grid(cfg, ScanGrid{});

  const AngularSpectrum psi41 = method_spectrum(parse_method("psi:4:1"), g, 3, grid);
  CHECK(psi41.values.size() == 1799);
  CHECK(psi41.method_id == "psi:4:1");
  const DoaEstimate est = find_peaks(psi41, 3);
  REQUIRE(est.angles_deg.size() == 3);
  for (int q = 0; q < 3; ++q) CHECK(std::abs(est.angles_deg[q] - truth[q]) < 1e-9);

  for (const char* id : {"prop", "prop-q1", "prop-q2", "psi:2:1", "psi:6:6", "music"}) {
    const DoaEstimate e = find_peaks(method_spectrum(parse_method(id), g, 3, grid), 3);
    for (int q = 0; q < 3; ++q) CHECK(std::abs(e.angles_deg[q] - truth[q]) < 1e-9);
  }
}

TEST_CASE("MUSIC is the generic spectrum of the noise-subspace rows") {
  const Scenario sc({-5.0, 30.0}, {}, 0.0, 100, 4);
  const ArrayConfig cfg(8);
  const CovarianceEstimate g = sample_covariance(simulate_snapshots(cfg, sc));
  const SteeringGrid grid(cfg, ScanGrid{});
  const AngularSpectrum via_rows =
      spectrum_from_operator(CMatrix(eigen_subspaces(g, 2).noise_basis.adjoint()), grid, "music");
  const AngularSpectrum direct = music_spectrum(g, 2, grid);
  REQUIRE(via_rows.values.size() == direct.values.size());
  for (std::size_t q = 0; q < direct.values.size(); ++q) {
    CHECK(via_rows.values[q] == doctest::Approx(direct.values[q]).epsilon(1e-10));
  }

  // Direct evaluation against the term-by-term steering vector.
  const CMatrix un = eigen_subspaces(g, 2).noise_basis;
  const CVector a = testing::hand_steering(8, 0.5, 12.3);
  const SteeringGrid one(cfg, ScanGrid{12.3, 12.3, 1.0});
  const double expected = 1.0 / (un.adjoint() * a).squaredNorm();
  CHECK(music_spectrum(g, 2, one).values[0] == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("MUSIC with a single noise vector") {
  const ArrayConfig cfg(4);
  const CovarianceEstimate g = testing::noiseless(cfg, {-40.0, 0.0, 35.0}, 0.01);
  const DoaEstimate e = find_peaks(music_spectrum(g, 3, cfg), 3);
  REQUIRE(e.angles_deg.size() == 3);
  CHECK(std::abs(e.angles_deg[0] + 40.0) < 0.1);
  CHECK(std::abs(e.angles_deg[1]) < 0.1);
  CHECK(std::abs(e.angles_deg[2] - 35.0) < 0.1);
}

TEST_CASE("spectrum clamping and errors") {
  CMatrix rows(1, 2);
  rows << 1.0, -1.0;  // annihilates the broadside steering vector exactly
  const SteeringGrid grid(ArrayConfig(2), ScanGrid{-10.0, 10.0, 10.0});
  const AngularSpectrum s = spectrum_from_operator(rows, grid, "x");
  CHECK(s.values[1] == kSpectrumCeiling);
  CHECK(std::isfinite(s.values[0]));
  CHECK(s.values[0] < kSpectrumCeiling);
  CHECK_THROWS_AS(spectrum_from_operator(CMatrix(0, 2), grid, "x"), ApplicabilityError);
  CHECK_THROWS_AS(spectrum_from_operator(CMatrix::Ones(1, 3), grid, "x"), DomainError);
}

TEST_CASE("ESPRIT") {
  SUBCASE("single broadside source") {
    const DoaEstimate e = esprit(testing::noiseless(ArrayConfig(6), {0.0}, 0.1), 1, ArrayConfig(6));
    CHECK(std::abs(e.angles_deg[0]) < 1e-9);
    CHECK(e.method_id == "esprit");
  }
  SUBCASE("sign of the recovered angle") {
    const DoaEstimate e = esprit(testing::noiseless(ArrayConfig(6), {30.0}, 0.1), 1, ArrayConfig(6));
    CHECK(e.angles_deg[0] == doctest::Approx(30.0).epsilon(1e-9));
    const DoaEstimate n = esprit(testing::noiseless(ArrayConfig(6), {-30.0}, 0.1), 1, ArrayConfig(6));
    CHECK(n.angles_deg[0] == doctest::Approx(-30.0).epsilon(1e-9));
  }
  SUBCASE("reference scenario, noiseless") {
    const ArrayConfig cfg(18);
    const std::vector<double> truth{10.0, 21.0, 45.0};
    const CovarianceEstimate g = testing::noiseless(cfg, truth);
    for (std::optional<int> m : {std::optional<int>{}, std::optional<int>{9}, std::optional<int>{3}}) {
      const DoaEstimate e = esprit(g, 3, cfg, m);
      for (int q = 0; q < 3; ++q) CHECK(std::abs(e.angles_deg[q] - truth[q]) < 1e-6);
    }
    // Scaling the covariance does not move the estimates.
    const DoaEstimate base = esprit(g, 3, cfg);
    const DoaEstimate scaled = esprit(CovarianceEstimate(5.0 * g.entries()), 3, cfg);
    for (int q = 0; q < 3; ++q) CHECK(std::abs(base.angles_deg[q] - scaled.angles_deg[q]) < 1e-9);
  }
  SUBCASE("snapshot form agrees with the covariance form") {
    const ArrayConfig cfg(12);
    const SnapshotBlock x = simulate_snapshots(cfg, Scenario({-12.0, 33.0}, {}, 10.0, 300, 5));
    const DoaEstimate from_x = esprit(x, 2, cfg);
    const DoaEstimate from_g = esprit(sample_covariance(x), 2, cfg);
    for (int q = 0; q < 2; ++q) CHECK(std::abs(from_x.angles_deg[q] - from_g.angles_deg[q]) < 1e-8);
  }
  SUBCASE("subarray range") {
    const ArrayConfig cfg(8);
    const CovarianceEstimate g = testing::noiseless(cfg, {0.0, 20.0}, 0.1);
    CHECK_THROWS_AS(esprit(g, 2, cfg, 1), DomainError);
    CHECK_THROWS_AS(esprit(g, 2, cfg, 8), DomainError);
    CHECK_NOTHROW(esprit(g, 2, cfg, 2));
    CHECK_NOTHROW(esprit(g, 2, cfg, 7));
    CHECK_THROWS_AS(esprit(g, 8, cfg), ApplicabilityError);
  }
}

TEST_CASE("peak picking") {
  CHECK(find_peaks(make_spectrum({0, 1, 3, 1, 0}), 1).angles_deg == std::vector<double>{0.0});
  // Highest local maxima win, output ascending.
  CHECK(find_peaks(make_spectrum({0, 5, 1, 2, 1, 9, 0}), 2).angles_deg ==
        std::vector<double>{-5.0, 15.0});
  // Equal maxima: the smaller angle is preferred.
  CHECK(find_peaks(make_spectrum({0, 4, 0, 4, 0}), 1).angles_deg == std::vector<double>{-5.0});
  // A plateau has no strict maximum; the fill rule takes the largest values.
  CHECK(find_peaks(make_spectrum({0, 2, 2, 0}), 1).angles_deg == std::vector<double>{-5.0});
  // Monotone spectrum: fill from the top end.
  CHECK(find_peaks(make_spectrum({1, 2, 3, 4}), 2).angles_deg == std::vector<double>{0.0, 5.0});
  // One strict maximum and one filled value.
  CHECK(find_peaks(make_spectrum({0, 3, 1, 2}), 2).angles_deg == std::vector<double>{-5.0, 5.0});

  CHECK_THROWS_AS(find_peaks(make_spectrum({1, 2}), 1), DomainError);
  CHECK_THROWS_AS(find_peaks(make_spectrum({1, 2, 1}), 4), DomainError);
  CHECK_THROWS_AS(find_peaks(make_spectrum({1, 2, 1}), 0), DomainError);
  AngularSpectrum bad = make_spectrum({1, 2, 1});
  bad.values.pop_back();
  CHECK_THROWS_AS(find_peaks(bad, 1), DomainError);
}

TEST_CASE("spectra are finite under heavy noise") {
  const ArrayConfig cfg(18);
  const Scenario sc({10.0, 21.0, 45.0}, {}, -10.0, 50, 3);
  const CovarianceEstimate g = sample_covariance(simulate_snapshots(cfg, sc));
  const SteeringGrid grid(cfg, ScanGrid{});
  for (const char* id : {"prop", "psi:3:2", "psi:6:1", "music"}) {
    const AngularSpectrum s = method_spectrum(parse_method(id), g, 3, grid);
    for (double v : s.values) {
      CHECK(std::isfinite(v));
      CHECK(v > 0.0);
    }
  }
}
