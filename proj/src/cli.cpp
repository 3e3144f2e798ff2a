#include "extprop/cli.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "extprop/experiments.hpp"
#include "extprop/method.hpp"
#include "extprop/run_config.hpp"

namespace extprop::cli {

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw UsageError("cannot open output file " + path);
  }
  f << content;
  if (!f) {
    throw UsageError("failed writing " + path);
  }
}

std::string sidecar_path(const std::string& output) {
  return output + ".meta.json";
}

std::vector<std::string> method_strings(const std::vector<MethodId>& methods) {
  std::vector<std::string> out;
  for (const auto& m : methods) out.push_back(m.to_string());
  return out;
}

struct CommonOptions {
  std::string config_path;
  std::string output;
  int threads = 0;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--config", opts.config_path, "JSON run configuration")->required();
  sub->add_option("--output,-o", opts.output, "output CSV path")->required();
  sub->add_option("--threads", opts.threads, "worker threads (default: EXTPROP_THREADS or all cores)");
}

}  // namespace

std::string count_report(const OperatorCatalog& catalog) {
  std::ostringstream os;
  os << "sensors N = " << catalog.sensors << ", sources P = " << catalog.sources
     << ", floor(N/P) = " << catalog.max_order << "\n";
  if (catalog.entries.empty()) {
    os << catalog.reason << "\n";
    os << "total: 0\n";
    return os.str();
  }
  os << "valid partition orders: n = 2.." << catalog.max_order << "\n";
  int current = 0;
  for (const OperatorRef& r : catalog.entries) {
    if (r.order_n != current) {
      if (current != 0) os << "\n";
      current = r.order_n;
      os << "n=" << current << ":";
    }
    os << " psi:" << r.order_n << ":" << r.block_i;
  }
  os << "\ntotal: " << catalog.size() << "\n";
  return os.str();
}

std::string count_report_json(const OperatorCatalog& catalog) {
  nlohmann::json doc = {{"sensors", catalog.sensors},
                        {"sources", catalog.sources},
                        {"max_order", catalog.max_order},
                        {"total", catalog.size()}};
  nlohmann::json orders = nlohmann::json::object();
  for (const OperatorRef& r : catalog.entries) {
    orders[std::to_string(r.order_n)].push_back("psi:" + std::to_string(r.order_n) + ":" +
                                               std::to_string(r.block_i));
  }
  doc["operators"] = orders;
  if (!catalog.reason.empty()) {
    doc["verdict"] = catalog.reason;
  }
  return doc.dump(2) + "\n";
}

std::vector<double> snr_range(double start, double end, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw UsageError("--snr-step must be positive");
  }
  if (!std::isfinite(start) || !std::isfinite(end) || end < start) {
    throw UsageError("--snr-end must be >= --snr-start");
  }
  std::vector<double> out;
  const auto count = static_cast<long long>(std::floor((end - start) / step + 1e-9)) + 1;
  for (long long q = 0; q < count; ++q) {
    out.push_back(start + static_cast<double>(q) * step);
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extended propagator DoA estimators for uniform linear arrays"};
  app.require_subcommand(1);

  int sensors = 0;
  int sources = 0;
  bool as_json = false;
  auto* count = app.add_subcommand("count", "list the extended propagators for N sensors, P sources");
  count->add_option("--sensors", sensors)->required();
  count->add_option("--sources", sources)->required();
  count->add_flag("--json", as_json, "emit JSON instead of text");

  CommonOptions spec_opts;
  std::string method_text;
  auto* spectrum = app.add_subcommand("spectrum", "Monte Carlo averaged pseudo-spectrum of one method");
  add_common(spectrum, spec_opts);
  spectrum->add_option("--method", method_text, "method identifier")->required();

  CommonOptions rmse_opts;
  double snr_start = 0.0;
  double snr_end = 0.0;
  double snr_step = 0.0;
  std::string rmse_methods;
  bool tolerate = false;
  auto* rmse_cmd = app.add_subcommand("rmse", "RMSE versus SNR curves");
  add_common(rmse_cmd, rmse_opts);
  rmse_cmd->add_option("--snr-start", snr_start)->required();
  rmse_cmd->add_option("--snr-end", snr_end)->required();
  rmse_cmd->add_option("--snr-step", snr_step)->required();
  rmse_cmd->add_option("--methods", rmse_methods, "comma-separated method identifiers")->required();
  rmse_cmd->add_flag("--tolerate-failures", tolerate,
                     "skip trials with numerical failures and report the count");

  CommonOptions corr_opts;
  std::string corr_methods;
  auto* correlate = app.add_subcommand("correlate", "correlation matrix of averaged spectra");
  add_common(correlate, corr_opts);
  correlate->add_option("--methods", corr_methods, "comma-separated spectral methods")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (count->parsed()) {
      if (sensors < 1 || sources < 1) {
        throw UsageError("--sensors and --sources must be positive");
      }
      const OperatorCatalog cat = enumerate_operators(sensors, sources);
      out << (as_json ? count_report_json(cat) : count_report(cat));
      return kExitOk;
    }

    if (spectrum->parsed()) {
      const RunConfig cfg = load_run_config(spec_opts.config_path);
      const MethodId method = parse_method(method_text);
      if (!method.is_spectral()) {
        throw UsageError("esprit has no pseudo-spectrum; use the rmse command");
      }
      ExperimentPlan plan = cfg.plan({method});
      plan.threads = spec_opts.threads;
      const AveragedSpectra result = averaged_spectra(plan);
      std::ostringstream csv;
      write_spectrum_csv(csv, result.spectra.front());
      write_file(spec_opts.output, csv.str());
      write_file(sidecar_path(spec_opts.output),
                 metadata_json({"spectrum", {method.to_string()}, cfg, result.trials_used,
                                result.trials_failed, {}}));
      return kExitOk;
    }

    if (rmse_cmd->parsed()) {
      const std::vector<double> snrs = snr_range(snr_start, snr_end, snr_step);
      const std::vector<MethodId> methods = parse_method_list(rmse_methods);
      const RunConfig cfg = load_run_config(rmse_opts.config_path);
      ExperimentPlan plan = cfg.plan(methods);
      plan.snr_grid_db = snrs;
      plan.threads = rmse_opts.threads;
      plan.tolerate_failures = tolerate;
      const RmseCurve curve = rmse_vs_snr(plan);
      std::ostringstream csv;
      write_rmse_csv(csv, curve);
      write_file(rmse_opts.output, csv.str());
      int failed = 0;
      for (const auto& [id, counts] : curve.failed_trials) {
        for (int c : counts) failed += c;
      }
      const int total = plan.trials * static_cast<int>(snrs.size() * methods.size());
      write_file(sidecar_path(rmse_opts.output),
                 metadata_json({"rmse", method_strings(methods), cfg, total - failed, failed, snrs}));
      return kExitOk;
    }

    if (correlate->parsed()) {
      const std::vector<MethodId> methods = parse_method_list(corr_methods);
      const RunConfig cfg = load_run_config(corr_opts.config_path);
      ExperimentPlan plan = cfg.plan(methods);
      plan.threads = corr_opts.threads;
      const AveragedSpectra result = averaged_spectra(plan);
      std::ostringstream csv;
      write_correlation_csv(csv, spectrum_correlation(result.spectra));
      write_file(corr_opts.output, csv.str());
      write_file(sidecar_path(corr_opts.output),
                 metadata_json({"correlate", method_strings(methods), cfg, result.trials_used,
                                result.trials_failed, {}}));
      return kExitOk;
    }
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace extprop::cli
