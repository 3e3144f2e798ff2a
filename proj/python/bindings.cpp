#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <tuple>

#include "extprop/estimators.hpp"
#include "extprop/experiments.hpp"
#include "extprop/method.hpp"
#include "extprop/propagators.hpp"

namespace py = pybind11;
using namespace extprop;

namespace {

using Grid = std::tuple<double, double, double>;

ScanGrid to_grid(const Grid& g) {
  return ScanGrid{std::get<0>(g), std::get<1>(g), std::get<2>(g)};
}

CovarianceEstimate to_cov(const CMatrix& gamma, int snapshots) {
  return CovarianceEstimate(gamma, snapshots);
}

py::tuple as_tuple(const AngularSpectrum& s) {
  const Eigen::VectorXd grid = Eigen::Map<const Eigen::VectorXd>(s.grid_deg.data(), s.grid_deg.size());
  const Eigen::VectorXd values = Eigen::Map<const Eigen::VectorXd>(s.values.data(), s.values.size());
  return py::make_tuple(grid, values);
}

ExperimentPlan make_plan(const ArrayConfig& config, const Scenario& scenario,
                         const std::vector<std::string>& methods, int trials, const Grid& grid,
                         int threads) {
  std::vector<MethodId> parsed;
  for (const auto& m : methods) parsed.push_back(parse_method(m));
  return ExperimentPlan{config, scenario, parsed, trials, {}, to_grid(grid), {}, false, threads};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Extended propagator DoA estimators for uniform linear arrays";

  auto base = py::register_exception<Error>(m, "ExtpropError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<ScenarioError>(m, "ScenarioError", base);
  py::register_exception<PartitionError>(m, "PartitionError", base);
  py::register_exception<ApplicabilityError>(m, "ApplicabilityError", base);
  py::register_exception<UsageError>(m, "UsageError", base);
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base);
  py::register_exception<IllConditionedError>(m, "IllConditionedError", numerical);

  py::class_<ArrayConfig>(m, "ArrayConfig")
      .def(py::init<int, double>(), py::arg("sensors"), py::arg("spacing_ratio") = 0.5)
      .def_property_readonly("sensors", &ArrayConfig::sensors)
      .def_property_readonly("spacing_ratio", &ArrayConfig::spacing_ratio)
      .def("__repr__", [](const ArrayConfig& c) {
        return "ArrayConfig(sensors=" + std::to_string(c.sensors()) +
               ", spacing_ratio=" + std::to_string(c.spacing_ratio()) + ")";
      });

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<std::vector<double>, std::vector<double>, double, int, std::uint64_t>(),
           py::arg("angles_deg"), py::arg("powers") = std::vector<double>{}, py::arg("snr_db") = 10.0,
           py::arg("snapshots") = 200, py::arg("seed") = 0)
      .def_property_readonly("angles_deg", &Scenario::angles_deg)
      .def_property_readonly("powers", &Scenario::source_powers)
      .def_property_readonly("snr_db", &Scenario::snr_db)
      .def_property_readonly("snapshots", &Scenario::snapshots)
      .def_property_readonly("seed", &Scenario::seed);

  m.def("steering_vector", &steering_vector, py::arg("config"), py::arg("angle_deg"));
  m.def(
      "channel_matrix",
      [](const ArrayConfig& c, const std::vector<double>& angles) {
        return channel_matrix(c, angles).entries();
      },
      py::arg("config"), py::arg("angles_deg"));
  m.def("noise_variance_from_snr", &noise_variance_from_snr, py::arg("snr_db"),
        py::arg("reference_power") = 1.0);

  m.def(
      "simulate_snapshots",
      [](const ArrayConfig& c, const Scenario& s) { return simulate_snapshots(c, s).samples; },
      py::arg("config"), py::arg("scenario"));
  m.def(
      "sample_covariance",
      [](const CMatrix& x) { return sample_covariance(SnapshotBlock{x}).entries(); },
      py::arg("snapshots"));
  m.def(
      "theoretical_covariance",
      [](const ArrayConfig& c, const std::vector<double>& angles, std::vector<double> powers,
         double noise_variance) {
        if (powers.empty()) powers.assign(angles.size(), 1.0);
        return theoretical_covariance(channel_matrix(c, angles), powers, noise_variance).entries();
      },
      py::arg("config"), py::arg("angles_deg"), py::arg("powers") = std::vector<double>{},
      py::arg("noise_variance") = 0.0);

  m.def(
      "partition_blocks",
      [](int n, int p, int order) { return make_partition(n, p, order).block_sizes(); },
      py::arg("sensors"), py::arg("sources"), py::arg("order"));
  m.def(
      "enumerate_operators",
      [](int n, int p) {
        std::vector<std::pair<int, int>> out;
        for (const auto& r : enumerate_operators(n, p).entries) out.emplace_back(r.order_n, r.block_i);
        return out;
      },
      py::arg("sensors"), py::arg("sources"));
  m.def("catalog_size", &catalog_size, py::arg("sensors"), py::arg("sources"));

  m.def(
      "standard_propagator",
      [](const CMatrix& g, int p, int k) { return standard_propagator(to_cov(g, k), p).entries; },
      py::arg("gamma"), py::arg("sources"), py::arg("snapshots") = 0);
  m.def(
      "propagator_q1",
      [](const CMatrix& g, int p, int k) { return propagator_q1(to_cov(g, k), p).entries; },
      py::arg("gamma"), py::arg("sources"), py::arg("snapshots") = 0);
  m.def(
      "propagator_q2",
      [](const CMatrix& g, int p, int k) { return propagator_q2(to_cov(g, k), p).entries; },
      py::arg("gamma"), py::arg("sources"), py::arg("snapshots") = 0);
  m.def(
      "extended_propagator",
      [](const CMatrix& g, int p, int order, int block, const std::map<int, int>& k_overrides,
         int k) {
        KStrategy ks;
        for (const auto& [j, kk] : k_overrides) ks.override_k(j, kk);
        const auto cov = to_cov(g, k);
        return extended_propagator(cov, make_partition(cov.sensors(), p, order), block, ks).entries;
      },
      py::arg("gamma"), py::arg("sources"), py::arg("order"), py::arg("block"),
      py::arg("k_overrides") = std::map<int, int>{}, py::arg("snapshots") = 0);
  m.def(
      "assembled_psi",
      [](const CMatrix& g, int p, int order, int k) {
        const auto cov = to_cov(g, k);
        return assembled_psi(cov, make_partition(cov.sensors(), p, order)).entries;
      },
      py::arg("gamma"), py::arg("sources"), py::arg("order"), py::arg("snapshots") = 0);

  const Grid default_grid{-90.0, 90.0, 0.1};
  m.def(
      "method_spectrum",
      [](const std::string& method, const CMatrix& g, int p, const ArrayConfig& c, const Grid& grid,
         int k) {
        return as_tuple(
            method_spectrum(parse_method(method), to_cov(g, k), p, SteeringGrid(c, to_grid(grid))));
      },
      py::arg("method"), py::arg("gamma"), py::arg("sources"), py::arg("config"),
      py::arg("grid") = default_grid, py::arg("snapshots") = 0,
      "Pseudo-spectrum of a spectral method; returns (grid_deg, values).");
  m.def(
      "estimate",
      [](const std::string& method, const CMatrix& g, int p, const ArrayConfig& c, const Grid& grid,
         int k) {
        return method_estimate(parse_method(method), to_cov(g, k), p, SteeringGrid(c, to_grid(grid)))
            .angles_deg;
      },
      py::arg("method"), py::arg("gamma"), py::arg("sources"), py::arg("config"),
      py::arg("grid") = default_grid, py::arg("snapshots") = 0);
  m.def(
      "esprit",
      [](const CMatrix& g, int p, const ArrayConfig& c, std::optional<int> subarray) {
        return esprit(CovarianceEstimate(g), p, c, subarray).angles_deg;
      },
      py::arg("gamma"), py::arg("sources"), py::arg("config"), py::arg("subarray") = py::none());
  m.def(
      "find_peaks",
      [](const std::vector<double>& grid, const std::vector<double>& values, int p) {
        return find_peaks(AngularSpectrum{grid, values, ""}, p).angles_deg;
      },
      py::arg("grid_deg"), py::arg("values"), py::arg("sources"));

  m.def(
      "averaged_spectra",
      [](const ArrayConfig& c, const Scenario& s, const std::vector<std::string>& methods, int trials,
         const Grid& grid, int threads) {
        const AveragedSpectra r = averaged_spectra(make_plan(c, s, methods, trials, grid, threads));
        py::dict out;
        for (const auto& spec : r.spectra) out[py::str(spec.method_id)] = as_tuple(spec)[1];
        return py::make_tuple(as_tuple(r.spectra.front())[0], out);
      },
      py::arg("config"), py::arg("scenario"), py::arg("methods"), py::arg("trials"),
      py::arg("grid") = default_grid, py::arg("threads") = 0,
      "Monte Carlo averaged spectra; returns (grid_deg, {method: values}).");
  m.def(
      "rmse_vs_snr",
      [](const ArrayConfig& c, const Scenario& s, const std::vector<std::string>& methods, int trials,
         const std::vector<double>& snr_grid_db, const Grid& grid, int threads) {
        ExperimentPlan plan = make_plan(c, s, methods, trials, grid, threads);
        plan.snr_grid_db = snr_grid_db;
        return rmse_vs_snr(plan).rmse_deg;
      },
      py::arg("config"), py::arg("scenario"), py::arg("methods"), py::arg("trials"),
      py::arg("snr_grid_db"), py::arg("grid") = default_grid, py::arg("threads") = 0);
  m.def(
      "spectrum_correlation",
      [](const std::vector<std::vector<double>>& spectra) {
        std::vector<AngularSpectrum> in;
        for (std::size_t q = 0; q < spectra.size(); ++q) {
          std::vector<double> grid(spectra[q].size());
          for (std::size_t g = 0; g < grid.size(); ++g) grid[g] = static_cast<double>(g);
          in.push_back({grid, spectra[q], std::to_string(q)});
        }
        return spectrum_correlation(in).entries;
      },
      py::arg("spectra"));
}
