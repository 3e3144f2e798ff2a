#include "extprop/run_config.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"

namespace extprop {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw UsageError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T get_required(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) {
    throw UsageError("missing required key '" + key + "' in " + where);
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError("key '" + key + "' in " + where + ": " + e.what());
  }
}

template <typename T>
void get_optional(const json& obj, const std::string& key, const std::string& where, T& out) {
  if (obj.contains(key)) {
    out = get_required<T>(obj, key, where);
  }
}

std::ostream& precise(std::ostream& os) {
  return os << std::setprecision(17);
}

}  // namespace

ArrayConfig RunConfig::array() const {
  return ArrayConfig(sensors, spacing_ratio);
}

Scenario RunConfig::scenario() const {
  return Scenario(angles_deg, powers, snr_db, snapshots, seed);
}

ExperimentPlan RunConfig::plan(std::vector<MethodId> methods) const {
  return ExperimentPlan{array(), scenario(), std::move(methods), trials, {}, grid, {}, false, 0};
}

void RunConfig::validate() const {
  const ArrayConfig a = array();
  const Scenario s = scenario();
  for (double angle : s.angles_deg()) {
    phase_increment(a, angle);
  }
  if (s.sources() >= a.sensors()) {
    throw ScenarioError(std::to_string(s.sources()) + " sources need more than " +
                        std::to_string(a.sensors()) + " sensors");
  }
  if (trials < 1) {
    throw UsageError("trials must be positive");
  }
  grid.points();
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.sensors == b.sensors && a.spacing_ratio == b.spacing_ratio &&
         a.angles_deg == b.angles_deg && a.powers == b.powers && a.snr_db == b.snr_db &&
         a.snapshots == b.snapshots && a.trials == b.trials && a.seed == b.seed &&
         a.grid.start == b.grid.start && a.grid.stop == b.grid.stop && a.grid.step == b.grid.step;
}

RunConfig parse_run_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw UsageError("config must be a JSON object");
  }
  reject_unknown(doc, {"sensors", "spacing_ratio", "sources", "snr_db", "snapshots", "trials",
                       "seed", "grid"},
                 "config");

  RunConfig cfg;
  cfg.sensors = get_required<int>(doc, "sensors", "config");
  get_optional(doc, "spacing_ratio", "config", cfg.spacing_ratio);
  cfg.snr_db = get_required<double>(doc, "snr_db", "config");
  cfg.snapshots = get_required<int>(doc, "snapshots", "config");
  get_optional(doc, "trials", "config", cfg.trials);
  get_optional(doc, "seed", "config", cfg.seed);

  const json sources = get_required<json>(doc, "sources", "config");
  if (!sources.is_object()) {
    throw UsageError("'sources' must be an object");
  }
  reject_unknown(sources, {"angles_deg", "powers"}, "sources");
  cfg.angles_deg = get_required<std::vector<double>>(sources, "angles_deg", "sources");
  get_optional(sources, "powers", "sources", cfg.powers);

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    if (!g.is_object()) {
      throw UsageError("'grid' must be an object");
    }
    reject_unknown(g, {"start", "stop", "step"}, "grid");
    get_optional(g, "start", "grid", cfg.grid.start);
    get_optional(g, "stop", "grid", cfg.grid.stop);
    get_optional(g, "step", "grid", cfg.grid.step);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open config file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

namespace {

json config_json(const RunConfig& c) {
  json sources = {{"angles_deg", c.angles_deg}};
  if (!c.powers.empty()) {
    sources["powers"] = c.powers;
  }
  return {{"sensors", c.sensors},
          {"spacing_ratio", c.spacing_ratio},
          {"sources", sources},
          {"snr_db", c.snr_db},
          {"snapshots", c.snapshots},
          {"trials", c.trials},
          {"seed", c.seed},
          {"grid", {{"start", c.grid.start}, {"stop", c.grid.stop}, {"step", c.grid.step}}}};
}

}  // namespace

std::string to_json_text(const RunConfig& config) {
  return config_json(config).dump(2) + "\n";
}

void write_spectrum_csv(std::ostream& os, const AngularSpectrum& spectrum) {
  precise(os) << "angle_deg,value\n";
  for (std::size_t q = 0; q < spectrum.values.size(); ++q) {
    os << spectrum.grid_deg[q] << ',' << spectrum.values[q] << '\n';
  }
}

void write_rmse_csv(std::ostream& os, const RmseCurve& curve) {
  precise(os) << "snr_db";
  for (const auto& id : curve.method_ids) os << ',' << id;
  os << '\n';
  for (std::size_t s = 0; s < curve.snr_db.size(); ++s) {
    os << curve.snr_db[s];
    for (const auto& id : curve.method_ids) os << ',' << curve.rmse_deg.at(id)[s];
    os << '\n';
  }
}

void write_correlation_csv(std::ostream& os, const CorrelationMatrix& matrix) {
  precise(os) << "method";
  for (const auto& id : matrix.method_ids) os << ',' << id;
  os << '\n';
  for (std::size_t a = 0; a < matrix.method_ids.size(); ++a) {
    os << matrix.method_ids[a];
    for (std::size_t b = 0; b < matrix.method_ids.size(); ++b) {
      os << ',' << matrix.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
    os << '\n';
  }
}

std::string metadata_json(const RunMetadata& meta) {
  json doc = {{"command", meta.command},
              {"methods", meta.methods},
              {"seed", meta.config.seed},
              {"trials", meta.config.trials},
              {"trials_used", meta.trials_used},
              {"trials_failed", meta.trials_failed},
              {"snr_db", meta.config.snr_db},
              {"config", config_json(meta.config)}};
  if (!meta.snr_grid_db.empty()) {
    doc["snr_grid_db"] = meta.snr_grid_db;
  }
  return doc.dump(2) + "\n";
}

}  // namespace extprop
