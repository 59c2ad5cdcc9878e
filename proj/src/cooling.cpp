#include "cavicool/cooling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "cavicool/bloch.hpp"
#include "cavicool/parallel.hpp"
#include "cavicool/spectra.hpp"

namespace cavicool {

std::string to_string(Route r) {
  switch (r) {
    case Route::spectral: return "spectral";
    case Route::closed_form: return "closed-form";
    case Route::oracle: return "oracle";
  }
  return "unknown";
}

std::string to_string(NablaGRegime r) {
  switch (r) {
    case NablaGRegime::weak_sideband: return "weak-sideband";
    case NablaGRegime::weak_doppler: return "weak-doppler";
    case NablaGRegime::saturated_sideband: return "saturated-sideband";
    case NablaGRegime::saturated_doppler: return "saturated-doppler";
  }
  return "unknown";
}

std::string to_string(ScanMode m) {
  return m == ScanMode::anharmonic ? "anharmonic" : "state-dependent";
}

namespace {

void add_validity_flags(CoolingResult& r) {
  for (const auto& v : r.regime.violations()) r.flags.push_back("regime:" + v);
}

void require(CoolingResult& r, bool ok, const std::string& what) {
  if (!ok) r.flags.push_back("regime:" + what);
}

bool near(double value, double target, double scale) {
  return std::abs(value - target) <= kMuchLess * scale;
}

}  // namespace

CoolingResult make_result(double A_minus, double A_plus, Route route,
                          const SystemParams& p) {
  CoolingResult r;
  r.A_minus = A_minus;
  r.A_plus = A_plus;
  r.W = A_minus - A_plus;
  r.route = route;
  r.regime = classify_regime(p);
  if (r.W > 0.0)
    r.n_final = A_plus / r.W;
  else
    r.flags.emplace_back("net-heating");
  add_validity_flags(r);
  return r;
}

CoolingResult from_closed_form(double W, double n_final, const SystemParams& p) {
  const double A_plus = n_final * W;
  return make_result(W + A_plus, A_plus, Route::closed_form, p);
}

CoolingResult rates_from_spectrum(const SystemParams& p) {
  return rates_at(p, p.nu);
}

CoolingResult rates_at(const SystemParams& p, double nu_r) {
  if (!(nu_r > 0.0)) throw std::invalid_argument("nu_r: must be positive");
  const SpectrumModel model(p);
  SystemParams shifted = p;
  shifted.nu = nu_r;
  return make_result(model.total(nu_r), model.total(-nu_r), Route::spectral,
                     shifted);
}

CoolingResult casc_closed_forms(const SystemParams& p, Resolution res) {
  const DerivedParams d = derive(p);
  const double s = 2.0 * p.N + 1.0;
  const double base = p.eta * p.eta * p.Omega * p.Omega / (s * d.gamma_N);
  CoolingResult r;
  if (res == Resolution::sideband) {
    const double x = d.gamma_N / (4.0 * p.nu);
    r = from_closed_form(base, p.N + s * x * x, p);
    require(r, r.regime.casc == Resolution::sideband, "casc-sideband");
    if (!near(p.Delta, -p.nu, p.nu)) r.flags.emplace_back("detuning-not-optimal");
  } else {
    r = from_closed_form(base * 2.0 * p.nu / d.gamma_N,
                         s * d.gamma_N / (4.0 * p.nu), p);
    require(r, r.regime.casc == Resolution::doppler, "casc-doppler");
    if (!near(p.Delta, -0.5 * d.gamma_N, 0.5 * d.gamma_N))
      r.flags.emplace_back("detuning-not-optimal");
  }
  require(r, r.regime.weak_drive, "weak-drive");
  return r;
}

double g_phi(double sin_phi) {
  const double s2 = sin_phi * sin_phi;
  const double c = std::sqrt(std::max(0.0, 1.0 - s2));
  return 4.0 * s2 * c * c * c / (4.0 - s2 * s2);
}

double g1_phi(double sin_phi) {
  const double c = std::sqrt(std::max(0.0, 1.0 - sin_phi * sin_phi));
  if (c == 0.0) return std::numeric_limits<double>::infinity();
  return (1.0 - c) * (1.0 - c) / (4.0 * c);
}

StrongDriveCasc casc_strong_drive(const SystemParams& p) {
  const DerivedParams d = derive(p);
  StrongDriveCasc out;
  out.sin_phi = d.sin_phi;
  out.g = g_phi(d.sin_phi);
  out.g1 = g1_phi(d.sin_phi);
  const double x = p.eta * p.nu / d.gamma_N;
  out.result = from_closed_form(d.gamma * x * x * out.g,
                                p.N + (2.0 * p.N + 1.0) * out.g1, p);
  require(out.result, out.result.regime.casc == Resolution::sideband,
          "casc-sideband");
  if (p.Delta >= 0.0) out.result.flags.emplace_back("heating-configuration");
  if (!near(d.Delta_bar, p.nu, p.nu)) out.result.flags.emplace_back("detuning-not-optimal");

  const limits::SidebandPeaks peaks = limits::sideband_peaks(p);
  out.alpha_plus = peaks.alpha_plus;
  out.alpha_minus = peaks.alpha_minus;
  out.gamma_bar = peaks.gamma_bar;
  out.gamma_bar_0 = peaks.gamma_bar_0;
  out.eps_estimate = {cplx(-0.5 * peaks.gamma_bar, -d.Delta_bar),
                      cplx(-peaks.gamma_bar_0, 0.0),
                      cplx(-0.5 * peaks.gamma_bar, d.Delta_bar)};
  const BlochSystem b = bloch_system(p);
  out.eps_numeric.assign(b.eigenvalues.data(), b.eigenvalues.data() + 3);
  std::sort(out.eps_numeric.begin(), out.eps_numeric.end(),
            [](cplx a, cplx c) { return a.imag() < c.imag(); });
  return out;
}

DriveOptimum optimize_strong_drive(const SystemParams& p) {
  const auto at = [&](double s) {
    SystemParams q = p;
    q.Omega = p.nu * s;
    q.Delta = -p.nu * std::sqrt(1.0 - s * s);
    return q;
  };
  const auto [s, negW] = boost::math::tools::brent_find_minima(
      [&](double s) { return -rates_from_spectrum(at(s)).W; }, 0.05, 0.99, 40);
  DriveOptimum out;
  out.sin_phi = s;
  out.Omega = p.nu * s;
  out.W = -negW;
  const DerivedParams d = derive(at(s));
  const double x = p.eta * p.nu / d.gamma_N;
  out.g_value = out.W / (d.gamma * x * x);
  return out;
}

ThermalCorrections thermal_corrections(const SystemParams& p) {
  const DerivedParams d = derive(p);
  ThermalCorrections t;
  if (p.Omega == 0.0) {
    if (d.rho_ee_0 > 0.0) {
      t.n_th = t.beta_th = std::numeric_limits<double>::infinity();
    }
    return t;
  }
  const double k2 = p.kappa * p.kappa;
  const double r2 = (p.Delta / p.Omega) * (p.Delta / p.Omega);
  const double pre = (p.N + 1.0) * d.rho_ee_0 * r2;
  const double up = p.Delta_c + p.nu, down = p.Delta_c - p.nu;
  t.n_th = 4.0 * k2 * pre * (1.0 / (k2 + up * up) + 1.0 / (k2 + down * down));
  t.beta_th = 16.0 * k2 * pre / (k2 + p.Delta_c * p.Delta_c);
  return t;
}

CoolingResult nabla_g_closed_forms(const SystemParams& p, NablaGRegime regime) {
  const DerivedParams d = derive(p);
  const double s = 2.0 * p.N + 1.0;
  const double base = p.eta_c * p.eta_c * p.g * p.g / p.kappa;
  const double x = p.kappa / (2.0 * p.nu);
  CoolingResult r;
  switch (regime) {
    case NablaGRegime::weak_sideband:
    case NablaGRegime::weak_doppler: {
      const double drive = p.Delta != 0.0 ? (p.Omega / p.Delta) * (p.Omega / p.Delta)
                                          : std::numeric_limits<double>::infinity();
      const ThermalCorrections t = thermal_corrections(p);
      if (regime == NablaGRegime::weak_sideband) {
        r = from_closed_form(0.5 * base * drive,
                             p.N + (p.N + 1.0) * x * x + t.n_th, p);
        if (!near(d.Delta_g, p.nu, p.nu)) r.flags.emplace_back("detuning-not-optimal");
      } else {
        r = from_closed_form(0.5 * base * drive * p.nu / p.kappa,
                             (s + t.beta_th) * x, p);
        if (!near(d.Delta_g, p.kappa, p.kappa))
          r.flags.emplace_back("detuning-not-optimal");
      }
      require(r, p.Omega <= kMuchLess * std::abs(p.Delta), "far-detuned");
      break;
    }
    case NablaGRegime::saturated_sideband:
    case NablaGRegime::saturated_doppler: {
      if (regime == NablaGRegime::saturated_sideband) {
        r = from_closed_form(base, p.N + s * x * x, p);
        if (!near(p.Delta_c, p.nu, p.nu)) r.flags.emplace_back("detuning-not-optimal");
      } else {
        r = from_closed_form(base * p.nu / p.kappa, s * x, p);
        if (!near(p.Delta_c, p.kappa, p.kappa))
          r.flags.emplace_back("detuning-not-optimal");
      }
      require(r, r.regime.saturated, "saturated");
      require(r, p.Omega <= kMuchLess * p.kappa, "omega-below-kappa");
      break;
    }
  }
  const bool sideband = regime == NablaGRegime::weak_sideband ||
                        regime == NablaGRegime::saturated_sideband;
  require(r, (r.regime.nabla_g == Resolution::sideband) == sideband,
          sideband ? "nabla-g-sideband" : "nabla-g-doppler");
  return r;
}

namespace optimal {

SystemParams casc_sideband(SystemParams p) {
  p.Delta = -p.nu;
  return p;
}

SystemParams casc_doppler(SystemParams p) {
  p.Delta = -0.5 * derive(p).gamma_N;
  return p;
}

SystemParams casc_strong(SystemParams p) {
  if (p.Omega >= p.nu)
    throw std::invalid_argument("Omega: must be below nu for Delta_bar = nu");
  p.Delta = -std::sqrt(p.nu * p.nu - p.Omega * p.Omega);
  return p;
}

SystemParams nabla_g_weak_sideband(SystemParams p) {
  p.Delta_c = p.Delta + p.nu;
  return p;
}

SystemParams nabla_g_weak_doppler(SystemParams p) {
  p.Delta_c = p.Delta + p.kappa;
  return p;
}

SystemParams nabla_g_saturated_sideband(SystemParams p) {
  p.Delta = 0.0;
  p.Delta_c = p.nu;
  return p;
}

SystemParams nabla_g_saturated_doppler(SystemParams p) {
  p.Delta = 0.0;
  p.Delta_c = p.kappa;
  return p;
}

}  // namespace optimal

namespace {

struct CellSpec {
  std::string mechanism;
  std::string drive;
  Resolution resolution;
  bool available;
  double tolerance;
};

const std::map<std::string, CellSpec>& cell_specs() {
  static const std::map<std::string, CellSpec> specs = {
      {"casc-sb-weak", {"casc", "weak", Resolution::sideband, true, 0.1}},
      {"casc-doppler-weak", {"casc", "weak", Resolution::doppler, true, 0.2}},
      {"casc-sb-strong", {"casc", "strong", Resolution::sideband, true, 0.1}},
      {"casc-doppler-strong", {"casc", "strong", Resolution::doppler, false, 0.2}},
      {"nabla-g-sb-weak", {"nabla-g", "weak", Resolution::sideband, true, 0.1}},
      {"nabla-g-doppler-weak", {"nabla-g", "weak", Resolution::doppler, true, 0.2}},
      {"nabla-g-saturated-sb", {"nabla-g", "saturated", Resolution::sideband, true, 0.1}},
      {"nabla-g-saturated-doppler",
       {"nabla-g", "saturated", Resolution::doppler, true, 0.2}},
  };
  return specs;
}

double rel_dev(double value, double reference) {
  if (reference == 0.0) return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(value - reference) / std::abs(reference);
}

}  // namespace

const std::vector<std::string>& table1_names() {
  static const std::vector<std::string> names = {
      "casc-sb-weak",      "casc-doppler-weak",    "casc-sb-strong",
      "casc-doppler-strong", "nabla-g-sb-weak",    "nabla-g-doppler-weak",
      "nabla-g-saturated-sb", "nabla-g-saturated-doppler"};
  return names;
}

std::optional<SystemParams> table1_point(const std::string& name, double N) {
  SystemParams p;
  p.N = N;
  p.nu = 1.0;
  if (name == "casc-sb-weak") {
    p.g = 0.2;
    p.kappa = 4.0;
    p.Delta_c = 3.0;
    p.eta = 0.05;
    p.Omega = 0.03 * derive(p).gamma_N;
    return optimal::casc_sideband(p);
  }
  if (name == "casc-doppler-weak") {
    p.g = 600.0;
    p.kappa = 10000.0;
    p.eta = 0.05;
    p.Omega = 0.03 * derive(p).gamma_N;
    return optimal::casc_doppler(p);
  }
  if (name == "casc-sb-strong") {
    p.g = 1.0;
    p.kappa = 100.0;
    p.Delta_c = 75.0;
    p.eta = 0.001;
    p.Omega = 0.65;
    return optimal::casc_strong(p);
  }
  if (name == "nabla-g-sb-weak") {
    p.g = 0.005;
    p.kappa = 0.1;
    p.eta_c = 0.01;
    p.Delta = -0.9;
    p.Omega = 0.05;
    return optimal::nabla_g_weak_sideband(p);
  }
  if (name == "nabla-g-doppler-weak") {
    p.g = 0.5;
    p.kappa = 10.0;
    p.eta_c = 0.05;
    p.Delta = -20.0;
    p.Omega = 1.0;
    return optimal::nabla_g_weak_doppler(p);
  }
  if (name == "nabla-g-saturated-sb") {
    p.g = 0.002;
    p.kappa = 0.09;
    p.eta_c = 0.001;
    p.Omega = 0.005;
    return optimal::nabla_g_saturated_sideband(p);
  }
  if (name == "nabla-g-saturated-doppler") {
    p.g = 0.1;
    p.kappa = 10.0;
    p.eta_c = 0.05;
    p.Omega = 0.05;
    return optimal::nabla_g_saturated_doppler(p);
  }
  return std::nullopt;
}

Table1Cell table1_cell(const std::string& name, const SystemParams& p) {
  const auto it = cell_specs().find(name);
  if (it == cell_specs().end()) throw std::invalid_argument("unknown table cell: " + name);
  const CellSpec& spec = it->second;
  Table1Cell cell;
  cell.name = name;
  cell.mechanism = spec.mechanism;
  cell.drive = spec.drive;
  cell.resolution = spec.resolution;
  cell.available = spec.available;
  cell.tolerance = spec.tolerance;
  cell.params = p;
  if (!spec.available) return cell;

  if (spec.mechanism == "casc") {
    cell.closed = spec.drive == "strong" ? casc_strong_drive(p).result
                                         : casc_closed_forms(p, spec.resolution);
  } else {
    const bool sb = spec.resolution == Resolution::sideband;
    const NablaGRegime r =
        spec.drive == "weak"
            ? (sb ? NablaGRegime::weak_sideband : NablaGRegime::weak_doppler)
            : (sb ? NablaGRegime::saturated_sideband : NablaGRegime::saturated_doppler);
    cell.closed = nabla_g_closed_forms(p, r);
  }
  cell.spectral = rates_from_spectrum(p);
  cell.dev_W = rel_dev(cell.spectral.W, cell.closed.W);
  if (cell.spectral.n_final && cell.closed.n_final)
    cell.dev_n = rel_dev(*cell.spectral.n_final, *cell.closed.n_final);
  else
    cell.dev_n = std::numeric_limits<double>::infinity();
  cell.pass = cell.dev_W <= cell.tolerance && cell.dev_n <= cell.tolerance;
  return cell;
}

std::vector<Table1Cell> table1(double N) {
  std::vector<Table1Cell> out;
  for (const auto& name : table1_names()) {
    const auto p = table1_point(name, N);
    out.push_back(table1_cell(name, p ? *p : SystemParams{}));
  }
  return out;
}

std::vector<ScanPoint> imperfection_scan(const SystemParams& p,
                                         const std::vector<double>& delta_nu,
                                         ScanMode mode, int levels,
                                         unsigned threads) {
  if (levels < 0) throw std::invalid_argument("levels: must be non-negative");
  std::vector<ScanPoint> points;
  for (std::size_t i = 0; i < delta_nu.size(); ++i) {
    if (mode == ScanMode::anharmonic) {
      points.push_back({delta_nu[i], int(i), delta_nu[i], {}});
    } else {
      for (int n = 0; n <= levels; ++n)
        points.push_back({delta_nu[i], n, n * delta_nu[i], {}});
    }
  }
  for (const auto& pt : points)
    if (!(p.nu + pt.shift > 0.0))
      throw std::invalid_argument("delta_nu: shifted trap frequency must stay positive");
  const SpectrumModel model(p);
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const double nu_r = p.nu + points[i].shift;
    SystemParams shifted = p;
    shifted.nu = nu_r;
    points[i].result =
        make_result(model.total(nu_r), model.total(-nu_r), Route::spectral, shifted);
  });
  return points;
}

double weak_rolloff_W(const SystemParams& p, double delta_nu) {
  const DerivedParams d = derive(p);
  const double x = 2.0 * delta_nu / d.gamma_N;
  return p.eta * p.eta * p.Omega * p.Omega / ((2.0 * p.N + 1.0) * d.gamma_N) /
         (1.0 + x * x);
}

double weak_rolloff_n(const SystemParams& p, double delta_nu) {
  const DerivedParams d = derive(p);
  const double s = 2.0 * p.N + 1.0;
  const double y = d.gamma_N / (4.0 * p.nu);
  const double n_casc = p.N + s * y * y;
  if (p.eta_c == 0.0) return n_casc;
  const double ratio = (p.eta_c / p.eta) * (p.eta_c / p.eta) * d.gamma_N *
                       d.gamma_N / (4.0 * p.nu * p.nu) *
                       (s + 8.0 * (p.N + 1.0) * d.rho_ee_0 * p.nu * p.nu /
                                (p.Omega * p.Omega));
  const double z = delta_nu / d.gamma;
  return n_casc + ratio * (1.0 + 4.0 / (s * s) * z * z);
}

LorentzianFit fit_lorentzian(const std::vector<double>& x,
                             const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("lorentzian fit needs at least three points");
  const auto top = std::max_element(y.begin(), y.end()) - y.begin();
  const double center = x[top];
  const auto [lo_x, hi_x] = std::minmax_element(x.begin(), x.end());
  const double range = std::max(*hi_x - *lo_x, 1e-300);
  // For fixed width the peak height is linear.
  const auto peak_for = [&](double h) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = (x[i] - center) / h;
      const double f = 1.0 / (1.0 + u * u);
      num += f * y[i];
      den += f * f;
    }
    return num / den;
  };
  const auto rss = [&](double log_h) {
    const double h = std::exp(log_h);
    const double peak = peak_for(h);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = (x[i] - center) / h;
      const double r = peak / (1.0 + u * u) - y[i];
      s += r * r;
    }
    return s;
  };
  const auto [log_h, f] = boost::math::tools::brent_find_minima(
      rss, std::log(range * 1e-3), std::log(range * 1e2), 40);
  (void)f;
  LorentzianFit fit;
  fit.center = center;
  fit.hwhm = std::exp(log_h);
  fit.peak = peak_for(fit.hwhm);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = (x[i] - center) / fit.hwhm;
    fit.residual = std::max(fit.residual,
                            std::abs(fit.peak / (1.0 + u * u) - y[i]) / std::abs(fit.peak));
  }
  return fit;
}

std::optional<double> half_max_width(const SystemParams& p, double span) {
  if (!(span > 0.0)) throw std::invalid_argument("span: must be positive");
  const SpectrumModel model(p);
  const auto W = [&](double dnu) {
    const double nu_r = p.nu + dnu;
    return model.total(nu_r) - model.total(-nu_r);
  };
  const double half = 0.5 * W(0.0);
  if (!(half > 0.0)) return std::nullopt;
  const double limit = std::min(span, 0.999 * p.nu);
  const int steps = 400;
  double width = 0.0;
  for (int side : {-1, 1}) {
    const double reach = side < 0 ? limit : span;
    double prev = 0.0;
    std::optional<double> edge;
    for (int k = 1; k <= steps; ++k) {
      const double x = side * reach * k / steps;
      if (W(x) < half) {
        boost::math::tools::eps_tolerance<double> tol(40);
        std::uintmax_t iters = 60;
        const auto f = [&](double z) { return W(z) - half; };
        const auto [a, b] = boost::math::tools::toms748_solve(
            f, std::min(prev, x), std::max(prev, x), tol, iters);
        edge = 0.5 * (a + b);
        break;
      }
      prev = x;
    }
    if (!edge) return std::nullopt;
    width += std::abs(*edge);
  }
  return width;
}

}  // namespace cavicool
