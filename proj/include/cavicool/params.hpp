#pragma once

#include <string>
#include <vector>

namespace cavicool {

// All frequencies are angular and measured in units of the trap frequency
// nu (nu == 1 in reduced units). Delta is the Stark-shifted drive detuning,
// i.e. the value that appears as Delta + delta~ in the Bloch matrix; the bare
// Hamiltonian detuning is recovered in bloch::bare_detuning.
struct SystemParams {
  double g = 0.0;
  double kappa = 1.0;  // field half-width, photon loss rate is 2 kappa
  double Omega = 0.0;
  double Delta = 0.0;
  double Delta_c = 0.0;
  double nu = 1.0;
  double N = 0.0;
  double eta = 0.0;
  double eta_c = 0.0;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  bool operator==(const SystemParams&) const = default;
};

struct DerivedParams {
  double gamma = 0.0;
  double gamma_N = 0.0;
  double delta_stark = 0.0;
  double Delta_bar = 0.0;
  double Delta_g = 0.0;
  double phi = 0.0;
  double sin_phi = 0.0;
  double rho_ee_0 = 0.0;
  double rho_ee_drive = 0.0;
};

DerivedParams derive(const SystemParams& p);

// Bose-Einstein occupation for an angular frequency omega_c [rad/s] at
// temperature T [K].
double thermal_occupation(double omega_c, double T);

enum class Resolution { sideband, doppler };

struct RegimeInfo {
  bool weak_drive = false;       // Omega << gamma_N
  bool strong_drive = false;     // Omega ~ |Delta|
  bool saturated = false;        // Omega >> gamma_N, |Delta|
  Resolution casc = Resolution::sideband;    // gamma_N vs nu
  Resolution nabla_g = Resolution::sideband;  // kappa vs nu

  bool bad_cavity = false;       // g sqrt(N+1) << kappa
  bool lamb_dicke = false;       // eta, eta_c <= 0.3
  bool elimination = false;      // eta Omega, eta_c g^2/kappa << gamma_N

  std::vector<std::string> tags() const;
  // Names of validity conditions that do not hold.
  std::vector<std::string> violations() const;
};

// Ratio treated as "much less than" by the regime classifier.
inline constexpr double kMuchLess = 0.1;
inline constexpr double kLambDickeMax = 0.3;

RegimeInfo classify_regime(const SystemParams& p);

// Sets a field by its serialized name; returns false for unknown names.
bool set_field(SystemParams& p, const std::string& key, double value);
// Throws std::invalid_argument for unknown names.
double get_field(const SystemParams& p, const std::string& key);
const std::vector<std::string>& field_names();

}  // namespace cavicool
