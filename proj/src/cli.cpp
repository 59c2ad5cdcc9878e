#include "cavicool/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "cavicool/cooling.hpp"
#include "cavicool/io.hpp"
#include "cavicool/oracle.hpp"
#include "cavicool/parallel.hpp"
#include "cavicool/presets.hpp"
#include "cavicool/spectra.hpp"

namespace cavicool::cli {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeySpec {
  const char* key;
  const char* help;
};

const std::vector<KeySpec>& option_keys() {
  static const std::vector<KeySpec> keys = {
      {"detuning", "detuning rule re-applied per point (fixed, casc-sideband, "
                   "casc-doppler, casc-strong, nabla-g-weak-sideband, ...)"},
      {"omega_min", "spectrum grid start"},
      {"omega_max", "spectrum grid end"},
      {"omega_points", "spectrum grid size"},
      {"delta_nu_min", "scan grid start"},
      {"delta_nu_max", "scan grid end"},
      {"delta_nu_points", "scan grid size"},
      {"scan_mode", "anharmonic or state-dependent"},
      {"levels", "highest motional level of a state-dependent scan"},
      {"dims", "explicit oracle dimensions 2,N_c+1,N_m+1 (skips the sweep)"},
      {"n_init", "initial motional Fock states of the oracle fit"},
      {"window", "oracle fit window length (0: automatic)"},
      {"samples", "oracle samples in the fit window"},
      {"rel_change", "oracle convergence tolerance between levels"},
      {"truncation_levels", "oracle truncation levels to try"},
      {"units", "reduced (default) or hz"},
      {"nu_hz", "trap frequency in Hz, required with units = hz"},
      {"temperature", "cavity temperature in K, sets N with cavity_hz"},
      {"cavity_hz", "cavity frequency in Hz"},
      {"cell", "closed-form cell compared by rates"},
      {"out", "output path prefix; stdout when empty"},
      {"threads", "worker threads (0: CAVICOOL_THREADS or all cores)"},
  };
  return keys;
}

bool is_param(const std::string& key) {
  const auto& f = field_names();
  return std::find(f.begin(), f.end(), key) != f.end();
}

bool is_option(const std::string& key) {
  for (const auto& k : option_keys())
    if (key == k.key) return true;
  return false;
}

std::string flag_name(const std::string& key) {
  if (is_param(key)) return "--" + key;
  std::string s = key;
  std::replace(s.begin(), s.end(), '_', '-');
  return "--" + s;
}

std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

struct Setting {
  std::string value;
  std::string origin;
};

class Run {
 public:
  std::string command;
  std::string preset;
  std::map<std::string, Setting> settings;

  bool has(const std::string& k) const { return settings.count(k) > 0; }

  template <class Fn>
  auto parse(const std::string& k, Fn&& fn) const {
    const Setting& s = settings.at(k);
    try {
      return fn(s.value);
    } catch (const std::invalid_argument& e) {
      throw UsageError(s.origin + ": " + k + ": " + e.what());
    }
  }

  double real(const std::string& k, double fallback) const {
    return has(k) ? parse(k, io::parse_number) : fallback;
  }

  int integer(const std::string& k, int fallback) const {
    if (!has(k)) return fallback;
    return parse(k, [](const std::string& v) { return to_int(v); });
  }

  std::vector<int> integers(const std::string& k) const {
    return parse(k, [](const std::string& v) {
      std::vector<int> out;
      for (double x : io::parse_list(v)) {
        if (x != std::floor(x) || std::abs(x) > 1e9)
          throw std::invalid_argument("'" + v + "' is not a list of integers");
        out.push_back(int(x));
      }
      return out;
    });
  }

  std::string text(const std::string& k, const std::string& fallback) const {
    return has(k) ? settings.at(k).value : fallback;
  }

  [[noreturn]] void fail(const std::string& k, const std::string& msg) const {
    const auto it = settings.find(k);
    const std::string where = it != settings.end() ? it->second.origin + ": " : "";
    throw UsageError(where + k + ": " + msg);
  }

  json echo() const {
    json j = json::object();
    for (const auto& [k, s] : settings) j[k] = s.value;
    return j;
  }

 private:
  static int to_int(const std::string& v) {
    const double x = io::parse_number(v);
    if (x != std::floor(x) || std::abs(x) > 1e9)
      throw std::invalid_argument("'" + v + "' is not an integer");
    return int(x);
  }
};

struct Points {
  std::vector<SystemParams> params;
  std::vector<std::string> varying;
  DetuningRule rule = DetuningRule::fixed;
};

bool hz_units(const Run& run) {
  const std::string u = run.text("units", "reduced");
  if (u == "reduced") return false;
  if (u == "hz") return true;
  run.fail("units", "expected 'reduced' or 'hz'");
}

double frequency_scale(const Run& run) {
  if (!hz_units(run)) return 1.0;
  if (!run.has("nu_hz")) throw UsageError("units = hz requires nu_hz");
  const double nu = run.real("nu_hz", 0.0);
  if (!(nu > 0.0)) run.fail("nu_hz", "must be > 0");
  return 1.0 / nu;
}

Points expand(const Run& run) {
  static const std::set<std::string> frequencies = {"g", "kappa", "Omega", "Delta",
                                                    "Delta_c"};
  const double scale = frequency_scale(run);
  SystemParams base;
  Points pts;
  if (!run.preset.empty()) {
    const Preset* pr = find_preset(run.preset);
    base = pr->params;
    pts.rule = pr->rule;
  }
  if (run.has("detuning")) {
    const auto r = detuning_rule(run.text("detuning", ""));
    if (!r) run.fail("detuning", "unknown rule '" + run.text("detuning", "") + "'");
    pts.rule = *r;
  }
  for (const auto& f : rule_fields(pts.rule)) {
    if (!run.has(f)) continue;
    if (run.has("detuning"))
      run.fail(f, "conflicts with detuning = " + run.text("detuning", ""));
    pts.rule = DetuningRule::fixed;
  }
  if (run.has("nu") && hz_units(run)) run.fail("nu", "set nu_hz instead with units = hz");

  std::vector<std::vector<double>> lists;
  for (const auto& f : field_names()) {
    std::vector<double> values;
    if (run.has(f)) {
      values = run.parse(f, io::parse_list);
      if (frequencies.count(f))
        for (double& v : values) v *= scale;
    } else {
      values = {get_field(base, f)};
    }
    if (values.size() > 1) pts.varying.push_back(f);
    lists.push_back(std::move(values));
  }

  if (run.has("temperature") || run.has("cavity_hz")) {
    if (!run.has("temperature") || !run.has("cavity_hz"))
      throw UsageError("temperature and cavity_hz must be given together");
    if (run.has("N")) run.fail("N", "conflicts with temperature/cavity_hz");
    const double T = run.real("temperature", 0.0);
    const double fc = run.real("cavity_hz", 0.0);
    if (!(T > 0.0)) run.fail("temperature", "must be > 0");
    if (!(fc > 0.0)) run.fail("cavity_hz", "must be > 0");
    const std::size_t iN = std::find(field_names().begin(), field_names().end(), "N") -
                           field_names().begin();
    lists[iN] = {thermal_occupation(2.0 * std::numbers::pi * fc, T)};
  }

  std::vector<std::size_t> idx(lists.size(), 0);
  while (true) {
    SystemParams p;
    for (std::size_t i = 0; i < lists.size(); ++i)
      set_field(p, field_names()[i], lists[i][idx[i]]);
    try {
      p = apply_rule(pts.rule, p);
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("invalid parameters: ") + e.what());
    }
    pts.params.push_back(p);
    std::size_t k = lists.size();
    while (k > 0) {
      --k;
      if (++idx[k] < lists[k].size()) break;
      idx[k] = 0;
      if (k == 0) return pts;
    }
    if (lists.empty()) return pts;
  }
}

std::vector<double> grid(const Run& run, const std::string& stem) {
  const std::string kmin = stem + "_min", kmax = stem + "_max", kn = stem + "_points";
  for (const auto& k : {kmin, kmax, kn})
    if (!run.has(k)) throw UsageError(stem + " grid: " + k + " is not set");
  const double scale = frequency_scale(run);
  io::GridSpec g{run.real(kmin, 0.0) * scale, run.real(kmax, 0.0) * scale,
                 run.integer(kn, 0)};
  try {
    return g.values();
  } catch (const std::invalid_argument& e) {
    throw UsageError(stem + " grid: " + e.what());
  }
}

unsigned threads(const Run& run) {
  const int n = run.integer("threads", 0);
  if (n < 0) run.fail("threads", "must be >= 0");
  return worker_count(unsigned(n));
}

// Writes to <out><suffix> or, without an output prefix, to the fallback.
class Output {
 public:
  Output(const Run& run, const std::string& suffix, std::ostream& fallback)
      : os_(&fallback) {
    const std::string prefix = run.text("out", "");
    if (prefix.empty()) return;
    path_ = prefix + suffix;
    file_.open(path_, std::ios::binary);
    if (!file_) run.fail("out", "cannot write '" + path_ + "'");
    os_ = &file_;
  }
  std::ostream& os() { return *os_; }
  const std::string& path() const { return path_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
  std::string path_;
};

void write_manifest(const Run& run, const Points& pts,
                    const std::vector<std::string>& outputs, json extra = {}) {
  const std::string prefix = run.text("out", "");
  if (prefix.empty()) return;
  json options = run.echo();
  options["detuning_rule"] = to_string(pts.rule);
  options["varying"] = pts.varying;
  if (!extra.is_null()) options["results"] = std::move(extra);
  Output m(run, ".manifest.json", std::cout);
  m.os() << io::manifest(run.command, run.preset, pts.params, options, outputs).dump(2)
         << '\n';
}

std::vector<std::string> varying_cells(const Points& pts, const SystemParams& p) {
  std::vector<std::string> out;
  for (const auto& f : pts.varying) out.push_back(io::number(get_field(p, f)));
  return out;
}

std::vector<std::string> with_prefix(std::vector<std::string> head,
                                     const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

int cmd_spectrum(const Run& run, std::ostream& out, std::ostream& err) {
  const Points pts = expand(run);
  const std::vector<double> omega = grid(run, "omega");
  Output csv_out(run, ".csv", out);
  io::CsvWriter csv(csv_out.os(),
                    with_prefix(pts.varying, {"omega", "s_total", "s_omega", "s_g",
                                              "s_i", "interference"}));
  std::vector<std::string> warnings;
  for (const auto& p : pts.params) {
    const Spectrum s = full_spectrum(p, omega, threads(run));
    for (const auto& w : s.warnings) {
      err << "warning: " << w << '\n';
      warnings.push_back(w);
    }
    const auto head = varying_cells(pts, p);
    for (const auto& r : s.rows)
      csv.row(with_prefix(head, {io::number(r.omega), io::number(r.s_total),
                                 io::number(r.s_omega), io::number(r.s_g),
                                 io::number(r.s_i), r.has_interference ? "1" : "0"}));
  }
  if (!csv_out.path().empty())
    write_manifest(run, pts, {csv_out.path()}, json{{"warnings", warnings}});
  return kOk;
}

void print_result(std::ostream& os, const char* label, const CoolingResult& r) {
  os << "  " << label << ": A_minus=" << short_num(r.A_minus)
     << " A_plus=" << short_num(r.A_plus) << " W=" << short_num(r.W)
     << " n_final=" << (r.n_final ? short_num(*r.n_final) : std::string("none"));
  if (!r.flags.empty()) os << " flags=" << join(r.flags, ",");
  os << '\n';
}

void print_point(std::ostream& os, std::size_t i, std::size_t n, const SystemParams& p) {
  os << "point " << i + 1 << "/" << n << ":";
  for (const auto& f : field_names()) os << ' ' << f << '=' << short_num(get_field(p, f));
  os << '\n';
  const RegimeInfo r = classify_regime(p);
  os << "  regime: " << join(r.tags(), ",");
  if (!r.violations().empty()) os << "  violated: " << join(r.violations(), ",");
  os << '\n';
}

void print_table1(std::ostream& os, const std::vector<Table1Cell>& cells, double N) {
  os << "closed-form cells at N=" << short_num(N) << '\n';
  char line[256];
  std::snprintf(line, sizeof line, "  %-26s %12s %12s %9s %12s %12s %9s %5s %s\n", "cell",
                "W_closed", "W_spectral", "dev_W", "n_closed", "n_spectral", "dev_n",
                "tol", "result");
  os << line;
  for (const auto& c : cells) {
    if (!c.available) {
      std::snprintf(line, sizeof line, "  %-26s %s\n", c.name.c_str(),
                    "no closed form");
      os << line;
      continue;
    }
    const auto n = [](const CoolingResult& r) {
      return r.n_final ? short_num(*r.n_final) : std::string("none");
    };
    std::snprintf(line, sizeof line,
                  "  %-26s %12s %12s %9.2e %12s %12s %9.2e %5.2f %s\n", c.name.c_str(),
                  short_num(c.closed.W).c_str(), short_num(c.spectral.W).c_str(),
                  c.dev_W, n(c.closed).c_str(), n(c.spectral).c_str(), c.dev_n,
                  c.tolerance, c.pass ? "pass" : "FAIL");
    os << line;
  }
}

int cmd_rates(const Run& run, bool with_table, bool as_json, std::ostream& out) {
  const Points pts = expand(run);
  const std::string cell = run.text("cell", "");
  if (!cell.empty() && !table1_point(cell, 0.0))
    run.fail("cell", "no closed form for '" + cell + "'");
  json results = json::array();
  std::ostringstream text;
  for (std::size_t i = 0; i < pts.params.size(); ++i) {
    const SystemParams& p = pts.params[i];
    const CoolingResult r = rates_from_spectrum(p);
    json item{{"params", p}, {"spectral", r}};
    print_point(text, i, pts.params.size(), p);
    print_result(text, "spectral", r);
    if (!cell.empty()) {
      const Table1Cell c = table1_cell(cell, p);
      item["closed_form"] = c;
      print_result(text, "closed-form", c.closed);
      text << "  " << cell << ": dev_W=" << short_num(c.dev_W)
           << " dev_n=" << short_num(c.dev_n) << " tol=" << short_num(c.tolerance)
           << (c.pass ? " pass" : " FAIL") << '\n';
    }
    results.push_back(std::move(item));
  }
  json tables = json::array();
  if (with_table) {
    std::set<double> Ns;
    for (const auto& p : pts.params) Ns.insert(p.N);
    for (double N : Ns) {
      const auto cells = table1(N);
      print_table1(text, cells, N);
      tables.push_back(json{{"N", N}, {"cells", cells}});
    }
  }
  json doc{{"points", results}};
  if (with_table) doc["cells"] = tables;

  Output o(run, as_json ? ".json" : ".txt", out);
  if (as_json) o.os() << doc.dump(2) << '\n';
  else o.os() << text.str();
  if (!o.path().empty()) write_manifest(run, pts, {o.path()});
  return kOk;
}

int cmd_scan(const Run& run, std::ostream& out) {
  const Points pts = expand(run);
  const std::vector<double> dnu = grid(run, "delta_nu");
  const std::string mode_name = run.text("scan_mode", "anharmonic");
  ScanMode mode;
  if (mode_name == "anharmonic") mode = ScanMode::anharmonic;
  else if (mode_name == "state-dependent") mode = ScanMode::state_dependent;
  else run.fail("scan_mode", "expected 'anharmonic' or 'state-dependent'");
  const int levels = run.integer("levels", 1);
  if (levels < 0) run.fail("levels", "must be >= 0");

  Output csv_out(run, ".csv", out);
  io::CsvWriter csv(csv_out.os(),
                    with_prefix(pts.varying, {"delta_nu", "level", "shift", "A_minus",
                                              "A_plus", "W", "n_final", "flags"}));
  for (const auto& p : pts.params) {
    const auto head = varying_cells(pts, p);
    for (const auto& s : imperfection_scan(p, dnu, mode, levels, threads(run))) {
      const auto& r = s.result;
      csv.row(with_prefix(
          head, {io::number(s.delta_nu), std::to_string(s.level), io::number(s.shift),
                 io::number(r.A_minus), io::number(r.A_plus), io::number(r.W),
                 r.n_final ? io::number(*r.n_final) : "nan", join(r.flags, ";")}));
    }
  }
  if (!csv_out.path().empty()) write_manifest(run, pts, {csv_out.path()});
  return kOk;
}

double rel_dev(double value, double reference) {
  return reference != 0.0 ? std::abs(value - reference) / std::abs(reference)
                          : std::abs(value);
}

int cmd_oracle(const Run& run, std::ostream& out, std::ostream& err) {
  const Points pts = expand(run);
  oracle::SweepOptions opt;
  if (run.has("n_init")) opt.n_init = run.integers("n_init");
  for (int n : opt.n_init)
    if (n < 0) run.fail("n_init", "must be >= 0");
  opt.window = run.real("window", 0.0);
  if (opt.window < 0.0) run.fail("window", "must be >= 0");
  opt.samples = run.integer("samples", opt.samples);
  if (opt.samples < 3) run.fail("samples", "must be >= 3");
  opt.rel_change = run.real("rel_change", opt.rel_change);
  if (!(opt.rel_change > 0.0)) run.fail("rel_change", "must be > 0");
  const int levels = run.integer("truncation_levels", 3);
  if (levels < 2) run.fail("truncation_levels", "must be >= 2");

  std::optional<oracle::Truncation> dims;
  if (run.has("dims")) {
    const auto v = run.integers("dims");
    if (v.size() != 3 || v[0] != 2 || v[1] < 1 || v[2] < 2)
      run.fail("dims", "expected 2,N_c+1,N_m+1 with N_c >= 0 and N_m >= 1");
    dims = oracle::Truncation{v[1] - 1, v[2] - 1};
  }

  json results = json::array();
  std::vector<std::string> outputs;
  int status = kOk;
  const std::string prefix = run.text("out", "");
  for (std::size_t i = 0; i < pts.params.size(); ++i) {
    const SystemParams& p = pts.params[i];
    print_point(out, i, pts.params.size(), p);
    const CoolingResult spectral = rates_from_spectrum(p);
    json item{{"params", p}, {"spectral", spectral}};

    oracle::ConvergenceRecord rec;
    try {
      if (dims) {
        rec.runs.push_back(oracle::run_oracle(p, *dims, opt));
        rec.notes.push_back("explicit truncation, not swept");
      } else {
        rec = oracle::convergence_sweep(
            p, oracle::default_schedule(p, opt.n_init, levels), opt);
      }
    } catch (const std::runtime_error& e) {
      err << "oracle: evolution failed: " << e.what() << '\n';
      item["error"] = e.what();
      results.push_back(std::move(item));
      status = kUnphysical;
      continue;
    }
    item["record"] = rec;

    for (const auto& r : rec.runs)
      for (const auto& t : r.trajectories) {
        const auto v = t.physicality.violations();
        if (v.empty()) continue;
        err << "oracle: physicality violated (" << join(v, ",") << ") at cavity "
            << r.truncation.cavity << " motion " << r.truncation.motion << " n_init "
            << t.n_init << ": trace drift " << t.physicality.trace_drift
            << ", min eigenvalue " << t.physicality.min_eigenvalue << ", top cavity "
            << t.physicality.top_cavity << ", top motion " << t.physicality.top_motion
            << '\n';
        status = kUnphysical;
      }

    const oracle::OracleRun& best = rec.best();
    const auto& fit = best.fit;
    item["dev_W"] = rel_dev(fit.W, spectral.W);
    out << "  truncation: cavity " << best.truncation.cavity << " motion "
        << best.truncation.motion
        << (dims ? " (explicit)" : rec.converged ? " (certified)" : " (not converged)")
        << '\n';
    for (const auto& n : rec.notes) out << "  " << n << '\n';
    out << "  W: fit=" << short_num(fit.W) << " spectral=" << short_num(spectral.W)
        << " dev=" << short_num(rel_dev(fit.W, spectral.W)) << '\n';
    out << "  n0: fit=" << (fit.n0 ? short_num(*fit.n0) : std::string("none"))
        << " null-vector="
        << (fit.n0_null_vector ? short_num(*fit.n0_null_vector) : std::string("none"))
        << " spectral="
        << (spectral.n_final ? short_num(*spectral.n_final) : std::string("none"));
    if (fit.n0 && spectral.n_final) {
      item["dev_n"] = rel_dev(*fit.n0, *spectral.n_final);
      out << " dev=" << short_num(rel_dev(*fit.n0, *spectral.n_final));
    }
    out << '\n';
    if (!fit.flags.empty()) out << "  flags: " << join(fit.flags, ",") << '\n';

    if (!prefix.empty()) {
      for (const auto& t : best.trajectories) {
        const std::string path = prefix + ".p" + std::to_string(i) + ".n" +
                                 std::to_string(t.n_init) + ".csv";
        std::ofstream f(path, std::ios::binary);
        if (!f) run.fail("out", "cannot write '" + path + "'");
        io::write_trajectory_csv(f, t);
        outputs.push_back(path);
      }
    }
    if (!dims && !rec.converged && status == kOk) status = kUnconverged;
    results.push_back(std::move(item));
  }

  if (!prefix.empty()) {
    Output o(run, ".json", out);
    o.os() << json{{"points", results}}.dump(2) << '\n';
    outputs.insert(outputs.begin(), o.path());
    write_manifest(run, pts, outputs);
  }
  if (status == kUnconverged) err << "oracle: truncation did not converge\n";
  return status;
}

int cmd_table1(const Run& run, std::ostream& out) {
  std::vector<double> Ns = {0.0};
  if (run.has("N")) Ns = run.parse("N", io::parse_list);
  std::vector<SystemParams> echo;
  Output csv_out(run, ".csv", out);
  std::ostringstream text;
  std::optional<io::CsvWriter> csv;
  if (!csv_out.path().empty())
    csv.emplace(csv_out.os(),
                std::vector<std::string>{"N", "cell", "available", "W_closed",
                                         "W_spectral", "dev_W", "n_closed",
                                         "n_spectral", "dev_n", "tolerance", "pass"});
  for (double N : Ns) {
    if (N < 0.0) run.fail("N", "must be >= 0");
    const auto cells = table1(N);
    print_table1(text, cells, N);
    for (const auto& c : cells) {
      if (c.available) echo.push_back(c.params);
      if (!csv) continue;
      const auto n = [](const CoolingResult& r) {
        return r.n_final ? io::number(*r.n_final) : std::string("nan");
      };
      if (!c.available) {
        csv->row({io::number(N), c.name, "0", "nan", "nan", "nan", "nan", "nan", "nan",
                  io::number(c.tolerance), "0"});
        continue;
      }
      csv->row({io::number(N), c.name, "1", io::number(c.closed.W),
                io::number(c.spectral.W), io::number(c.dev_W), n(c.closed),
                n(c.spectral), io::number(c.dev_n), io::number(c.tolerance),
                c.pass ? "1" : "0"});
    }
  }
  if (csv) {
    Points pts;
    pts.params = echo;
    write_manifest(run, pts, {csv_out.path()});
  } else {
    out << text.str();
  }
  return kOk;
}

void add_layer(Run& run, const std::string& key, const std::string& value,
               const std::string& origin) {
  run.settings[key] = Setting{value, origin};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cooling rates, spectra and master-equation checks for cavity-assisted "
               "microwave cooling of a trapped polar molecule.",
               "cavicool"};
  app.fallthrough();
  app.set_version_flag("--version", io::version());

  std::string preset, config;
  bool list_presets = false;
  app.add_option("--preset", preset, "named parameter set");
  app.add_option("--config", config, "key = value config file");
  app.add_flag("--list-presets", list_presets, "print the preset names and exit");

  std::map<std::string, std::string> flags;
  for (const auto& f : field_names())
    app.add_option(flag_name(f), flags[f], "system parameter (comma list for a series)");
  for (const auto& k : option_keys()) app.add_option(flag_name(k.key), flags[k.key], k.help);

  auto* spectrum = app.add_subcommand("spectrum", "force-fluctuation spectrum on an omega grid");
  auto* rates = app.add_subcommand("rates", "cooling and heating rates of each point");
  bool with_table = false, as_json = false;
  rates->add_flag("--table1", with_table, "append the closed-form cell comparison");
  rates->add_flag("--json", as_json, "emit JSON instead of text");
  auto* scan = app.add_subcommand("scan", "trap-frequency imperfection scan");
  auto* oracle_cmd = app.add_subcommand("oracle", "full master-equation fit of W and n0");
  auto* table = app.add_subcommand("table1", "closed-form cells against the spectral route");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (list_presets) {
    for (const auto& p : presets()) out << p.name << "  " << p.description << '\n';
    return kOk;
  }

  Run run;
  if (spectrum->parsed()) run.command = "spectrum";
  else if (rates->parsed()) run.command = "rates";
  else if (scan->parsed()) run.command = "scan";
  else if (oracle_cmd->parsed()) run.command = "oracle";
  else if (table->parsed()) run.command = "table1";
  else {
    err << app.help();
    return kUsage;
  }

  try {
    if (!preset.empty()) {
      const Preset* pr = find_preset(preset);
      if (!pr) throw UsageError("--preset: unknown preset '" + preset + "'");
      run.preset = preset;
      for (const auto& [k, v] : pr->options) add_layer(run, k, v, "preset " + preset);
    }
    if (!config.empty()) {
      const io::ConfigFile cfg = io::load_config(config);
      for (const auto& e : cfg.entries) {
        const std::string origin = cfg.path + ":" + std::to_string(e.line);
        if (!is_param(e.key) && !is_option(e.key))
          throw UsageError(origin + ": unknown key '" + e.key + "'");
        add_layer(run, e.key, e.value, origin);
      }
    }
    for (const auto& [k, v] : flags) {
      const auto* opt = app.get_option(flag_name(k));
      if (opt->count() > 0) add_layer(run, k, v, flag_name(k));
    }

    if (run.command == "spectrum") return cmd_spectrum(run, out, err);
    if (run.command == "rates") return cmd_rates(run, with_table, as_json, out);
    if (run.command == "scan") return cmd_scan(run, out);
    if (run.command == "oracle") return cmd_oracle(run, out, err);
    return cmd_table1(run, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const io::ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace cavicool::cli
