#include "cavicool/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cavicool {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok)
    throw std::invalid_argument(std::string(field) + ": " + what);
}

}  // namespace

void SystemParams::validate() const {
  const double values[] = {g, kappa, Omega, Delta, Delta_c, nu, N, eta, eta_c};
  const auto& names = field_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    require(std::isfinite(values[i]), names[i].c_str(), "must be finite");
  require(g >= 0.0, "g", "must be >= 0");
  require(kappa >= 0.0, "kappa", "must be >= 0");
  require(Omega >= 0.0, "Omega", "must be >= 0");
  require(nu > 0.0, "nu", "must be > 0");
  require(N >= 0.0, "N", "must be >= 0");
  require(eta >= 0.0 && eta < 1.0, "eta", "must lie in [0, 1)");
  require(eta_c >= 0.0 && eta_c < 1.0, "eta_c", "must lie in [0, 1)");
}

DerivedParams derive(const SystemParams& p) {
  DerivedParams d;
  const double lorentz = p.kappa * p.kappa + p.Delta_c * p.Delta_c;
  if (p.g > 0.0 && lorentz > 0.0) {
    d.gamma = 2.0 * p.g * p.g * p.kappa / lorentz;
    d.delta_stark = (2.0 * p.N + 1.0) * p.g * p.g * p.Delta_c / lorentz;
  }
  d.gamma_N = (2.0 * p.N + 1.0) * d.gamma;
  d.Delta_bar = std::hypot(p.Delta, p.Omega);
  d.Delta_g = p.Delta_c - p.Delta;
  d.sin_phi = d.Delta_bar > 0.0 ? p.Omega / d.Delta_bar : 0.0;
  d.phi = std::asin(d.sin_phi);
  d.rho_ee_0 = p.N / (2.0 * p.N + 1.0);
  const double den = 2.0 * p.Delta * p.Delta + p.Omega * p.Omega;
  d.rho_ee_drive =
      den > 0.0 ? p.Omega * p.Omega / (2.0 * (2.0 * p.N + 1.0) * den) : 0.0;
  return d;
}

double thermal_occupation(double omega_c, double T) {
  constexpr double hbar = 1.054571817e-34;
  constexpr double k_B = 1.380649e-23;
  if (!(omega_c > 0.0)) throw std::invalid_argument("omega_c must be > 0");
  if (!(T >= 0.0)) throw std::invalid_argument("T must be >= 0");
  if (T == 0.0) return 0.0;
  return 1.0 / std::expm1(hbar * omega_c / (k_B * T));
}

RegimeInfo classify_regime(const SystemParams& p) {
  const DerivedParams d = derive(p);
  RegimeInfo r;
  const double inf = std::numeric_limits<double>::infinity();
  const double gN = d.gamma_N;
  const double absD = std::abs(p.Delta);

  r.weak_drive = p.Omega <= kMuchLess * gN;
  r.saturated = gN <= kMuchLess * p.Omega && absD <= kMuchLess * p.Omega;
  r.strong_drive = !r.weak_drive && !r.saturated && absD > 0.0 &&
                   p.Omega >= kMuchLess * absD && p.Omega <= absD / kMuchLess;
  r.casc = gN < p.nu ? Resolution::sideband : Resolution::doppler;
  r.nabla_g = p.kappa < p.nu ? Resolution::sideband : Resolution::doppler;

  const double bad = p.kappa > 0.0 ? p.g * std::sqrt(p.N + 1.0) / p.kappa : inf;
  r.bad_cavity = bad <= kMuchLess;
  r.lamb_dicke = p.eta <= kLambDickeMax && p.eta_c <= kLambDickeMax;
  const double coupling = std::max(
      p.eta * p.Omega, p.kappa > 0.0 ? p.eta_c * p.g * p.g / p.kappa : inf);
  r.elimination = coupling <= kMuchLess * gN;
  return r;
}

std::vector<std::string> RegimeInfo::tags() const {
  std::vector<std::string> t;
  if (weak_drive) t.emplace_back("weak-drive");
  if (strong_drive) t.emplace_back("strong-drive");
  if (saturated) t.emplace_back("saturated");
  t.emplace_back(casc == Resolution::sideband ? "casc-sideband"
                                              : "casc-doppler");
  t.emplace_back(nabla_g == Resolution::sideband ? "nabla-g-sideband"
                                                 : "nabla-g-doppler");
  return t;
}

std::vector<std::string> RegimeInfo::violations() const {
  std::vector<std::string> v;
  if (!bad_cavity) v.emplace_back("not-bad-cavity");
  if (!lamb_dicke) v.emplace_back("lamb-dicke");
  if (!elimination) v.emplace_back("elimination");
  return v;
}

double get_field(const SystemParams& p, const std::string& key) {
  if (key == "g") return p.g;
  if (key == "kappa") return p.kappa;
  if (key == "Omega") return p.Omega;
  if (key == "Delta") return p.Delta;
  if (key == "Delta_c") return p.Delta_c;
  if (key == "nu") return p.nu;
  if (key == "N") return p.N;
  if (key == "eta") return p.eta;
  if (key == "eta_c") return p.eta_c;
  throw std::invalid_argument("unknown parameter '" + key + "'");
}

const std::vector<std::string>& field_names() {
  static const std::vector<std::string> names = {
      "g", "kappa", "Omega", "Delta", "Delta_c", "nu", "N", "eta", "eta_c"};
  return names;
}

bool set_field(SystemParams& p, const std::string& key, double value) {
  if (key == "g") p.g = value;
  else if (key == "kappa") p.kappa = value;
  else if (key == "Omega") p.Omega = value;
  else if (key == "Delta") p.Delta = value;
  else if (key == "Delta_c") p.Delta_c = value;
  else if (key == "nu") p.nu = value;
  else if (key == "N") p.N = value;
  else if (key == "eta") p.eta = value;
  else if (key == "eta_c") p.eta_c = value;
  else return false;
  return true;
}

}  // namespace cavicool
