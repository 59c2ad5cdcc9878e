#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cavicool/params.hpp"
#include "cavicool/pauli.hpp"

namespace cavicool {

enum class Route { spectral, closed_form, oracle };
std::string to_string(Route r);

struct CoolingResult {
  double A_minus = 0.0;
  double A_plus = 0.0;
  double W = 0.0;
  std::optional<double> n_final;  // absent when W <= 0
  RegimeInfo regime;
  std::vector<std::string> flags;
  Route route = Route::spectral;
};

// Fills W and n_final from the two rates; sets "net-heating" when W <= 0.
CoolingResult make_result(double A_minus, double A_plus, Route route,
                          const SystemParams& p);
// Same, from W and the final occupation of a closed form.
CoolingResult from_closed_form(double W, double n_final, const SystemParams& p);

// A_- = S(nu), A_+ = S(-nu).
CoolingResult rates_from_spectrum(const SystemParams& p);
// Rates for a real trap frequency nu_r with every other parameter held.
CoolingResult rates_at(const SystemParams& p, double nu_r);

CoolingResult casc_closed_forms(const SystemParams& p, Resolution r);

// Dimensionless rate and occupation shapes of strong-drive sideband cooling
// as functions of sin(phi) = Omega / Delta_bar.
double g_phi(double sin_phi);
double g1_phi(double sin_phi);

struct StrongDriveCasc {
  CoolingResult result;
  double sin_phi = 0.0;
  double g = 0.0;
  double g1 = 0.0;
  double alpha_plus = 0.0;
  double alpha_minus = 0.0;
  double gamma_bar = 0.0;
  double gamma_bar_0 = 0.0;
  // Approximate eigenvalues of A (+-i Delta_bar - gamma_bar/2, -gamma_bar_0)
  // and the numerical ones, sorted by imaginary part.
  std::vector<cplx> eps_estimate;
  std::vector<cplx> eps_numeric;
};
StrongDriveCasc casc_strong_drive(const SystemParams& p);

struct DriveOptimum {
  double sin_phi = 0.0;
  double Omega = 0.0;
  double W = 0.0;
  double g_value = 0.0;  // W / (gamma (eta nu / gamma_N)^2)
};
// Maximizes the spectral-route W over Omega along Delta_bar = nu, Delta < 0.
DriveOptimum optimize_strong_drive(const SystemParams& p);

enum class NablaGRegime { weak_sideband, weak_doppler, saturated_sideband, saturated_doppler };
std::string to_string(NablaGRegime r);

struct ThermalCorrections {
  double n_th = 0.0;
  double beta_th = 0.0;
};
ThermalCorrections thermal_corrections(const SystemParams& p);

CoolingResult nabla_g_closed_forms(const SystemParams& p, NablaGRegime r);

// Detuning presets for each closed-form regime. Each returns a copy of p
// with Delta and/or Delta_c replaced.
namespace optimal {
SystemParams casc_sideband(SystemParams p);           // Delta = -nu
SystemParams casc_doppler(SystemParams p);            // Delta = -gamma_N/2
SystemParams casc_strong(SystemParams p);             // Delta_bar = nu, Delta < 0
SystemParams nabla_g_weak_sideband(SystemParams p);   // Delta_c - Delta = nu
SystemParams nabla_g_weak_doppler(SystemParams p);    // Delta_c - Delta = kappa
SystemParams nabla_g_saturated_sideband(SystemParams p);  // Delta = 0, Delta_c = nu
SystemParams nabla_g_saturated_doppler(SystemParams p);   // Delta = 0, Delta_c = kappa
}  // namespace optimal

struct Table1Cell {
  std::string name;
  std::string mechanism;  // "casc" or "nabla-g"
  std::string drive;      // "weak", "strong", "saturated"
  Resolution resolution = Resolution::sideband;
  bool available = true;  // false where no closed form exists
  SystemParams params;
  CoolingResult closed;
  CoolingResult spectral;
  double dev_W = 0.0;  // relative deviation spectral vs closed
  double dev_n = 0.0;
  double tolerance = 0.1;
  bool pass = false;
};

// Designated parameter point of a table cell at thermal occupation N.
std::optional<SystemParams> table1_point(const std::string& name, double N);
const std::vector<std::string>& table1_names();
Table1Cell table1_cell(const std::string& name, const SystemParams& p);
std::vector<Table1Cell> table1(double N = 0.0);

enum class ScanMode { anharmonic, state_dependent };
std::string to_string(ScanMode m);

struct ScanPoint {
  double delta_nu = 0.0;
  int level = 0;
  double shift = 0.0;  // nu_r - nu actually applied
  CoolingResult result;
};

// anharmonic: one point per grid entry, read as the shift of level i.
// state_dependent: for each grid entry and n = 0..levels the shift n*delta_nu.
std::vector<ScanPoint> imperfection_scan(const SystemParams& p,
                                         const std::vector<double>& delta_nu,
                                         ScanMode mode, int levels = 1,
                                         unsigned threads = 0);

// Weak-drive sideband rolloff of W with a trap-frequency error.
double weak_rolloff_W(const SystemParams& p, double delta_nu);
// Weak-drive final occupation with thermal nabla-g diffusion and a
// trap-frequency error.
double weak_rolloff_n(const SystemParams& p, double delta_nu);

struct LorentzianFit {
  double peak = 0.0;
  double center = 0.0;
  double hwhm = 0.0;
  double residual = 0.0;  // max relative deviation
};
LorentzianFit fit_lorentzian(const std::vector<double>& x,
                             const std::vector<double>& y);

// Width of the region around delta_nu = 0 where W stays above half of W(0),
// searching up to |delta_nu| = span on each side. Returns nullopt if W(0) <= 0
// or the half level is not crossed on both sides.
std::optional<double> half_max_width(const SystemParams& p, double span);

}  // namespace cavicool
