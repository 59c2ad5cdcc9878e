#include "cavicool/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cavicool/parallel.hpp"

namespace cavicool {

using namespace pauli;

namespace {

Eigen::Matrix3cd adjugate(const Eigen::Matrix3cd& m) {
  Eigen::Matrix3cd adj;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
      const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      adj(i, j) = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
    }
  }
  return adj;
}

double lorentz(double kappa, double x) { return kappa / (kappa * kappa + x * x); }

}  // namespace

SpectrumModel::SpectrumModel(const SystemParams& p)
    : p_(p),
      bloch_(bloch_system(p)),
      steady_(steady_density(bloch_)),
      b_(p.Omega, bloch_.Delta_H, p.Delta_c, p.kappa),
      L_(internal_liouvillian(p)) {}

Mat2 SpectrumModel::one_sided(const Mat2& x, double omega) const {
  const cplx tr = x.trace();
  const Mat2 rest = x - tr * steady_.rho;
  // The rank-one term |rho><1| lifts the zero eigenvalue without touching
  // traceless inputs, so omega = 0 needs no special case.
  const Mat4 M = cplx(0.0, -omega) * Mat4::Identity() - L_ +
                 vec(steady_.rho) * trace_row();
  Mat2 out = unvec(M.partialPivLu().solve(vec(rest)));
  if (omega != 0.0) out += tr * steady_.rho * cplx(0.0, 1.0 / omega);
  return out;
}

double SpectrumModel::s_omega(double omega) const {
  if (omega == 0.0) return s_omega_resolvent(omega);
  const Eigen::Vector3d& s = bloch_.sigma_ss;
  const Eigen::Vector3cd corr(1.0, -I * s(2), I * s(1));
  const cplx iw(0.0, omega);
  const Eigen::Matrix3cd M =
      iw * Eigen::Matrix3cd::Identity() + bloch_.A.cast<cplx>();
  const Eigen::Vector3cd rhs = iw * corr + bloch_.Gamma.cast<cplx>() * s(0);
  const cplx h = (adjugate(M) * rhs)(0);
  const cplx det = M.determinant();
  const double pref = 0.5 * p_.eta * p_.eta * p_.Omega * p_.Omega;
  return pref * (-h / (iw * det)).real();
}

double SpectrumModel::s_omega_resolvent(double omega) const {
  const Mat2 sx = sigma_x();
  const Mat2 r = one_sided(sx * steady_.rho, omega);
  const double pref = 0.5 * p_.eta * p_.eta * p_.Omega * p_.Omega;
  return pref * (sx * r).trace().real();
}

double SpectrumModel::s_g(double omega) const {
  const Mat2& rho = steady_.rho;
  const cplx up = (raising() * b_.sigma_minus(omega) * rho).trace();
  const cplx down = (lowering() * b_.sigma_plus(omega) * rho).trace();
  return 2.0 * p_.eta_c * p_.eta_c * p_.g * p_.g *
         ((p_.N + 1.0) * up + p_.N * down).real();
}

double SpectrumModel::s_g_b_form(double omega) const {
  const auto& s = steady_;
  const cplx up = b_.B1(omega) * s.rho_ee - b_.B3(omega) * s.rho_ge;
  const cplx down = b_.B1(-omega) * s.rho_gg + b_.B3(-omega) * s.rho_eg;
  return 2.0 * p_.eta_c * p_.eta_c * p_.g * p_.g *
         ((p_.N + 1.0) * up + p_.N * down).real();
}

double SpectrumModel::s_g_six_resonance(double omega) const {
  const DerivedParams d = derive(p_);
  const double k = p_.kappa, N = p_.N;
  const double Db = d.Delta_bar, Dg = d.Delta_g;
  const double rho_gg_0 = (N + 1.0) / (2.0 * N + 1.0);
  const double c = p_.eta_c * p_.eta_c * p_.g * p_.g;
  const double O2 = p_.Omega * p_.Omega;
  if (Db == 0.0)
    return c * (d.rho_ee_0 * (N + 1.0) * lorentz(k, omega - Dg) +
                rho_gg_0 * N * lorentz(k, omega + Dg));
  double out = 0.5 * c * O2 / (Db * Db) *
               ((N + 1.0) * lorentz(k, omega - Dg) + N * lorentz(k, omega + Dg));
  for (double s : {-1.0, 1.0}) {
    const double shift = p_.Delta + s * Db;
    out += 0.5 * c / (Db * Db) *
           (shift * shift * d.rho_ee_0 + O2 * d.rho_ee_drive) * (N + 1.0) *
           lorentz(k, omega - (Dg + s * Db));
    out += 0.5 * c / (Db * Db) *
           (shift * shift * rho_gg_0 - O2 * d.rho_ee_drive) * N *
           lorentz(k, omega + (Dg + s * Db));
  }
  return out;
}

SandwichSum SpectrumModel::k_superoperator(double omega) const {
  const Mat2 sm = lowering(), sp = raising(), id = identity();
  const Mat2 Sm = b_.sigma_minus(0.0), Sp = b_.sigma_plus(0.0);
  const Mat2 Smw = b_.sigma_minus(omega), Spw = b_.sigma_plus(omega);
  const double up = p_.eta_c * p_.g * p_.g * (p_.N + 1.0);
  const double down = p_.eta_c * p_.g * p_.g * p_.N;

  SandwichSum K;
  K.add(cplx(0.0, -0.5 * p_.eta * p_.Omega), sigma_x(), id);
  K.add(up, sm, Sp);
  K.add(up, Smw, sp);
  K.add(-up, sp * Smw, id);
  K.add(-up, sp * Sm, id);
  K.add(down, sp, Sm);
  K.add(down, Spw, sm);
  K.add(-down, sm * Spw, id);
  K.add(-down, sm * Sp, id);
  return K;
}

double SpectrumModel::k_correlator(double omega) const {
  const SandwichSum K = k_superoperator(omega);
  const Mat2 z = one_sided(K.apply(steady_.rho), omega);
  return 2.0 * K.conjugated().apply(z).trace().real();
}

double SpectrumModel::s_interference(double omega) const {
  return k_correlator(omega) - s_omega(omega);
}

double SpectrumModel::total(double omega) const {
  return k_correlator(omega) + s_g(omega);
}

double s_omega_regression(const SystemParams& p, double omega) {
  return SpectrumModel(p).s_omega(omega);
}

double s_omega_resolvent(const SystemParams& p, double omega) {
  return SpectrumModel(p).s_omega_resolvent(omega);
}

double s_g(const SystemParams& p, double omega) {
  return SpectrumModel(p).s_g(omega);
}

double s_interference(const SystemParams& p, int nu_sign) {
  if (nu_sign != 1 && nu_sign != -1)
    throw std::invalid_argument("nu_sign must be +1 or -1");
  return SpectrumModel(p).s_interference(nu_sign * p.nu);
}

Spectrum full_spectrum(const SystemParams& p, const std::vector<double>& grid,
                       unsigned threads) {
  if (grid.empty()) throw std::invalid_argument("empty frequency grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("frequency grid must be strictly increasing");

  const SpectrumModel model(p);
  Spectrum out;
  out.params = p;
  out.rows.resize(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    SpectrumRow& r = out.rows[i];
    r.omega = grid[i];
    r.s_omega = model.s_omega(grid[i]);
    r.s_g = model.s_g(grid[i]);
    r.s_total = r.s_omega + r.s_g;
  });

  for (double w : {-p.nu, p.nu}) {
    SpectrumRow r;
    r.omega = w;
    r.s_omega = model.s_omega(w);
    r.s_g = model.s_g(w);
    r.s_i = model.s_interference(w);
    r.s_total = r.s_omega + r.s_g + r.s_i;
    r.has_interference = true;
    const auto pos = std::lower_bound(
        out.rows.begin(), out.rows.end(), r,
        [](const SpectrumRow& a, const SpectrumRow& b) {
          return a.omega < b.omega ||
                 (a.omega == b.omega && !a.has_interference);
        });
    out.rows.insert(pos, r);
  }

  double peak = 0.0;
  for (const auto& r : out.rows) peak = std::max(peak, std::abs(r.s_total));
  for (const auto& r : out.rows) {
    if (r.s_total < -1e-10 * peak) {
      std::string w = "negative total spectrum at omega=" +
                      std::to_string(r.omega);
      for (const auto& v : classify_regime(p).violations()) w += " [" + v + "]";
      out.warnings.push_back(w);
      break;
    }
  }
  return out;
}

namespace limits {

double s_omega_weak(const SystemParams& p, double omega) {
  const DerivedParams d = derive(p);
  const double gN = d.gamma_N;
  const double rho_gg_0 = 1.0 - d.rho_ee_0;
  const auto peak = [gN](double x) { return gN / (x * x + gN * gN / 4.0); };
  return 0.25 * p.eta * p.eta * p.Omega * p.Omega *
         (rho_gg_0 * peak(omega + p.Delta) + d.rho_ee_0 * peak(omega - p.Delta));
}

SidebandPeaks sideband_peaks(const SystemParams& p) {
  const DerivedParams d = derive(p);
  const double c = d.Delta_bar > 0.0 ? std::abs(p.Delta) / d.Delta_bar : 1.0;
  const double s2 = d.sin_phi * d.sin_phi;
  const double th = 2.0 * p.N + 1.0;
  SidebandPeaks out;
  out.alpha_plus = c * c * (d.rho_ee_0 + (1.0 + c) * (1.0 + c) /
                                             (2.0 * th * (1.0 + c * c)));
  out.alpha_minus = c * c * (d.rho_ee_0 + (1.0 - c) * (1.0 - c) /
                                              (2.0 * th * (1.0 + c * c)));
  out.gamma_bar = d.gamma_N * (2.0 + s2) / 2.0;
  out.gamma_bar_0 = d.gamma_N * (1.0 + c * c) / 2.0;
  return out;
}

double s_omega_sideband_peaks(const SystemParams& p, double omega) {
  const DerivedParams d = derive(p);
  const SidebandPeaks k = sideband_peaks(p);
  const auto peak = [&](double x) {
    return k.gamma_bar / (x * x + k.gamma_bar * k.gamma_bar / 4.0);
  };
  return 0.25 * p.eta * p.eta * p.Omega * p.Omega *
         (k.alpha_plus * peak(omega - d.Delta_bar) +
          k.alpha_minus * peak(omega + d.Delta_bar));
}

double s_g_weak(const SystemParams& p, double omega) {
  const DerivedParams d = derive(p);
  const double k = p.kappa, N = p.N;
  const double r = p.Delta != 0.0 ? p.Omega / p.Delta : 0.0;
  double bracket = (N + 1.0) * r * r * lorentz(k, omega - d.Delta_g) +
                   N * r * r * lorentz(k, omega + d.Delta_g);
  for (double s : {-1.0, 1.0})
    bracket += 4.0 * (N + 1.0) * d.rho_ee_0 * lorentz(k, omega + s * p.Delta_c);
  return 0.5 * p.eta_c * p.eta_c * p.g * p.g * bracket;
}

double s_g_saturated(const SystemParams& p, double omega) {
  const DerivedParams d = derive(p);
  const double k = p.kappa, N = p.N;
  double up = 2.0 * (N + 1.0) * lorentz(k, omega - d.Delta_g);
  double down = 2.0 * N * lorentz(k, omega + d.Delta_g);
  for (double s : {-1.0, 1.0}) {
    up += (N + 1.0) * lorentz(k, omega - (p.Delta_c + s * p.Omega));
    down += N * lorentz(k, omega + (p.Delta_c + s * p.Omega));
  }
  return 0.25 * p.eta_c * p.eta_c * p.g * p.g * (up + down);
}

double s_g_two_peak(const SystemParams& p, double omega) {
  const double k = p.kappa, N = p.N;
  return p.eta_c * p.eta_c * p.g * p.g *
         ((N + 1.0) * lorentz(k, omega - p.Delta_c) +
          N * lorentz(k, omega + p.Delta_c));
}

}  // namespace limits

}  // namespace cavicool
