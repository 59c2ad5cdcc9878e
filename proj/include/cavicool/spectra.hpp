#pragma once

#include <string>
#include <vector>

#include "cavicool/bloch.hpp"

namespace cavicool {

// Internal dynamics needed for every spectrum evaluation, computed once per
// parameter point. Immutable after construction.
class SpectrumModel {
 public:
  explicit SpectrumModel(const SystemParams& p);

  const SystemParams& params() const { return p_; }
  const BlochSystem& bloch() const { return bloch_; }
  const InternalState& steady() const { return steady_; }
  const Mat4& liouvillian() const { return L_; }
  const BCoefficients& coefficients() const { return b_; }

  // S_Omega from the regression closed form (adjugate / determinant of
  // i omega + A). Falls back to the resolvent at omega == 0.
  double s_omega(double omega) const;
  // S_Omega from the resolvent of L_I with the steady part split off.
  double s_omega_resolvent(double omega) const;

  // S_g from <s+ Sigma-(omega)> and <s- Sigma+(omega)>.
  double s_g(double omega) const;
  // S_g from B_i(omega) and rho_ij, term by term as tabulated.
  double s_g_b_form(double omega) const;
  // Six-resonance approximation valid for gamma_N << Delta_bar.
  double s_g_six_resonance(double omega) const;

  // 2 Re int Tr{K^dag(e^{L tau} K(rho0))} e^{i omega tau}, with K built for
  // motional frequency omega (omega = +nu: a-terms, omega = -nu: a^dag-terms).
  double k_correlator(double omega) const;
  double s_interference(double omega) const;

  // S_Omega + S_g + S_I at a signed trap frequency.
  double total(double omega) const;

  // K superoperator for signed motional frequency omega.
  SandwichSum k_superoperator(double omega) const;

 private:
  // One-sided transform int_0^inf e^{L tau} X e^{i omega tau} d tau, with the
  // steady component treated analytically (principal part only).
  Mat2 one_sided(const Mat2& x, double omega) const;

  SystemParams p_;
  BlochSystem bloch_;
  InternalState steady_;
  BCoefficients b_;
  Mat4 L_;
};

double s_omega_regression(const SystemParams& p, double omega);
double s_omega_resolvent(const SystemParams& p, double omega);
double s_g(const SystemParams& p, double omega);
// S_I at +nu (nu_sign = +1) or -nu (nu_sign = -1).
double s_interference(const SystemParams& p, int nu_sign);

struct SpectrumRow {
  double omega = 0.0;
  double s_total = 0.0;  // S_Omega + S_g, plus S_I where has_interference
  double s_omega = 0.0;
  double s_g = 0.0;
  double s_i = 0.0;
  bool has_interference = false;
};

struct Spectrum {
  SystemParams params;
  std::vector<SpectrumRow> rows;
  std::vector<std::string> warnings;
};

// Evaluates the grid, then inserts rows at omega = -nu and +nu carrying S_I.
// Grid must be non-empty and strictly increasing.
Spectrum full_spectrum(const SystemParams& p, const std::vector<double>& grid,
                       unsigned threads = 0);

// Closed-form spectral shapes of limiting regimes. All use the untilded
// gamma_N and the user detuning.
namespace limits {

// Weak drive, Omega << gamma_N.
double s_omega_weak(const SystemParams& p, double omega);
// Dressed sideband peaks near +-Delta_bar for gamma_N << Delta_bar and a red
// detuned drive: weights alpha_+- and widths gamma_bar, gamma_bar_0.
struct SidebandPeaks {
  double alpha_plus = 0.0;
  double alpha_minus = 0.0;
  double gamma_bar = 0.0;
  double gamma_bar_0 = 0.0;
};
SidebandPeaks sideband_peaks(const SystemParams& p);
double s_omega_sideband_peaks(const SystemParams& p, double omega);
// Far-detuned weak drive, four resonances.
double s_g_weak(const SystemParams& p, double omega);
// Saturated drive with three overlapping resonances per side.
double s_g_saturated(const SystemParams& p, double omega);
// Saturated drive, two-peak form centred at +-Delta_c.
double s_g_two_peak(const SystemParams& p, double omega);

}  // namespace limits

}  // namespace cavicool
