#include "cavicool/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "cavicool/presets.hpp"

#ifndef CAVICOOL_VERSION
#define CAVICOOL_VERSION "0.0.0"
#endif

namespace cavicool {

using nlohmann::json;

void to_json(json& j, const SystemParams& p) {
  j = json{{"g", p.g},         {"kappa", p.kappa}, {"Omega", p.Omega},
           {"Delta", p.Delta}, {"Delta_c", p.Delta_c},
           {"nu", p.nu},       {"N", p.N},         {"eta", p.eta},
           {"eta_c", p.eta_c}};
}

void from_json(const json& j, SystemParams& p) {
  for (const auto& [key, value] : j.items()) {
    if (!set_field(p, key, value.get<double>()))
      throw std::invalid_argument("unknown parameter '" + key + "'");
  }
}

void to_json(json& j, const DerivedParams& d) {
  j = json{{"gamma", d.gamma},
           {"gamma_N", d.gamma_N},
           {"delta_stark", d.delta_stark},
           {"Delta_bar", d.Delta_bar},
           {"Delta_g", d.Delta_g},
           {"phi", d.phi},
           {"sin_phi", d.sin_phi},
           {"rho_ee_0", d.rho_ee_0},
           {"rho_ee_drive", d.rho_ee_drive}};
}

void to_json(json& j, const RegimeInfo& r) {
  j = json{{"tags", r.tags()},
           {"violations", r.violations()},
           {"bad_cavity", r.bad_cavity},
           {"lamb_dicke", r.lamb_dicke},
           {"elimination", r.elimination}};
}

namespace {
json optional_number(const std::optional<double>& x) {
  return x ? json(*x) : json(nullptr);
}
}  // namespace

void to_json(json& j, const CoolingResult& r) {
  j = json{{"A_minus", r.A_minus},
           {"A_plus", r.A_plus},
           {"W", r.W},
           {"n_final", optional_number(r.n_final)},
           {"regime", r.regime},
           {"flags", r.flags},
           {"route", to_string(r.route)}};
}

void to_json(json& j, const Table1Cell& c) {
  j = json{{"name", c.name},
           {"mechanism", c.mechanism},
           {"drive", c.drive},
           {"resolution",
            c.resolution == Resolution::sideband ? "sideband" : "doppler"},
           {"available", c.available}};
  if (!c.available) return;
  j["params"] = c.params;
  j["closed_form"] = c.closed;
  j["spectral"] = c.spectral;
  j["dev_W"] = c.dev_W;
  j["dev_n"] = c.dev_n;
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
}

namespace oracle {

void to_json(json& j, const Truncation& t) {
  j = json{{"cavity", t.cavity}, {"motion", t.motion}};
}

void to_json(json& j, const Physicality& p) {
  j = json{{"trace_drift", p.trace_drift},
           {"hermiticity", p.hermiticity},
           {"min_eigenvalue", p.min_eigenvalue},
           {"top_cavity", p.top_cavity},
           {"top_motion", p.top_motion},
           {"max_purity", p.max_purity},
           {"violations", p.violations()}};
}

void to_json(json& j, const FitResult& f) {
  j = json{{"W", f.W},
           {"A_plus", f.A_plus},
           {"n0", optional_number(f.n0)},
           {"n0_null_vector", optional_number(f.n0_null_vector)},
           {"intercepts", f.intercepts},
           {"residual", f.residual},
           {"swing", f.swing},
           {"t_start", f.t_start},
           {"t_end", f.t_end},
           {"flags", f.flags}};
}

void to_json(json& j, const OracleRun& r) {
  json trajectories = json::array();
  for (const auto& t : r.trajectories)
    trajectories.push_back(json{{"n_init", t.n_init},
                                {"samples", t.samples.size()},
                                {"steps", t.steps},
                                {"physicality", t.physicality}});
  j = json{{"truncation", r.truncation},
           {"trajectories", trajectories},
           {"fit", r.fit}};
}

void to_json(json& j, const ConvergenceRecord& r) {
  j = json{{"runs", r.runs},
           {"converged", r.converged},
           {"certified", r.certified ? json(*r.certified) : json(nullptr)},
           {"notes", r.notes}};
}

}  // namespace oracle

namespace io {

const char* version() { return CAVICOOL_VERSION; }

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> columns)
    : os_(os), width_(columns.size()) {
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_)
    throw std::invalid_argument("csv row has " + std::to_string(cells.size()) +
                                " cells, header has " +
                                std::to_string(width_));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    os_ << cells[i];
  }
  os_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(number(v));
  row(cells);
}

void write_trajectory_csv(std::ostream& os, const oracle::Trajectory& t) {
  CsvWriter csv(os, {"t", "n", "n_cavity", "rho_ee", "trace"});
  for (const auto& s : t.samples) csv.row({s.t, s.n, s.n_cavity, s.rho_ee, s.trace});
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile parse_config(std::istream& is, const std::string& path) {
  ConfigFile cfg;
  cfg.path = path;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(raw.substr(0, hash));
    if (text.empty()) continue;
    const auto where = path + ":" + std::to_string(line) + ": ";
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + "expected 'key = value'");
    ConfigEntry e{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line};
    if (e.key.empty()) throw ConfigError(where + "missing key");
    if (e.value.empty()) throw ConfigError(where + "missing value for '" + e.key + "'");
    if (!seen.insert(e.key).second)
      throw ConfigError(where + "duplicate key '" + e.key + "'");
    cfg.entries.push_back(std::move(e));
  }
  return cfg;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse_config(in, path);
}

double parse_number(const std::string& text) {
  const std::string s = trim(text);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("'" + s + "' is not a number");
  if (!std::isfinite(x)) throw std::invalid_argument("'" + s + "' is not finite");
  return x;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<double> GridSpec::values() const {
  if (points < 1) throw std::invalid_argument("grid has no points");
  if (points == 1) return {min};
  if (!(max > min)) throw std::invalid_argument("grid max must exceed min");
  std::vector<double> out(points);
  const double h = (max - min) / (points - 1);
  for (int i = 0; i < points; ++i) out[i] = min + i * h;
  out.back() = max;
  return out;
}

json manifest(const std::string& command, const std::string& preset,
              const std::vector<SystemParams>& points, const json& options,
              const std::vector<std::string>& outputs) {
  json pts = json::array();
  for (const auto& p : points) {
    const RegimeInfo r = classify_regime(p);
    pts.push_back(json{{"params", p},
                       {"derived", derive(p)},
                       {"regime", r},
                       {"valid", r.violations().empty()}});
  }
  return json{{"tool", "cavicool"},
              {"version", version()},
              {"preset_version", kPresetVersion},
              {"command", command},
              {"preset", preset.empty() ? json(nullptr) : json(preset)},
              {"units", "angular frequencies in units of nu"},
              {"points", pts},
              {"options", options},
              {"outputs", outputs}};
}

}  // namespace io
}  // namespace cavicool
