#include "cavicool/bloch.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace cavicool {

using namespace pauli;

BCoefficients::BCoefficients(double Omega, double Delta, double Delta_c,
                             double kappa)
    : Omega_(Omega), Delta_(Delta), kappa_(kappa) {
  if (!(kappa > 0.0))
    throw std::invalid_argument("B coefficients need kappa > 0");
  Delta_bar_ = std::hypot(Delta, Omega);
  Delta_g_ = Delta_c - Delta;
  collapsed_ = Delta_bar_ == 0.0;
  for (int k = 0; k < 2; ++k) {
    const double s = k == 0 ? -1.0 : 1.0;
    // Delta + s Delta_bar without cancellation when s Delta < 0.
    if (s * Delta >= 0.0)
      shift_[k] = Delta + s * Delta_bar_;
    else
      shift_[k] = -Omega * Omega / (Delta - s * Delta_bar_);
  }
}

cplx BCoefficients::pole(double omega, double center) const {
  return 1.0 / cplx(kappa_, -(omega - center));
}

cplx BCoefficients::B1(double omega) const {
  if (collapsed_) return pole(omega, Delta_g_);
  cplx sum = 2.0 * Omega_ * Omega_ * pole(omega, Delta_g_);
  for (int k = 0; k < 2; ++k) {
    const double s = k == 0 ? -1.0 : 1.0;
    sum += shift_[k] * shift_[k] * pole(omega, Delta_g_ + s * Delta_bar_);
  }
  return sum / (4.0 * Delta_bar_ * Delta_bar_);
}

cplx BCoefficients::B2(double omega) const {
  if (collapsed_) return 0.0;
  cplx sum = 2.0 * Omega_ * Omega_ * pole(omega, Delta_g_);
  for (int k = 0; k < 2; ++k) {
    const double s = k == 0 ? -1.0 : 1.0;
    sum -= Omega_ * Omega_ * pole(omega, Delta_g_ + s * Delta_bar_);
  }
  return sum / (4.0 * Delta_bar_ * Delta_bar_);
}

cplx BCoefficients::B3(double omega) const {
  if (collapsed_) return 0.0;
  cplx sum = -2.0 * Omega_ * Delta_ * pole(omega, Delta_g_);
  for (int k = 0; k < 2; ++k) {
    const double s = k == 0 ? -1.0 : 1.0;
    sum += Omega_ * shift_[k] * pole(omega, Delta_g_ + s * Delta_bar_);
  }
  return sum / (4.0 * Delta_bar_ * Delta_bar_);
}

Mat2 BCoefficients::sigma_minus(double omega) const {
  return B1(omega) * lowering() + B2(omega) * raising() +
         B3(omega) * sigma_z();
}

double bare_detuning(const SystemParams& p) {
  if (p.g == 0.0) return p.Delta;
  const double scale = (2.0 * p.N + 1.0) * p.g * p.g;
  double Delta_H = p.Delta;
  const double tol = 1e-15 * std::max({1.0, std::abs(p.Delta), p.Omega});
  for (int it = 0; it < 500; ++it) {
    const BCoefficients b(p.Omega, Delta_H, p.Delta_c, p.kappa);
    const double tilde_delta = -scale * b.B1(0.0).imag();
    const double next = p.Delta - tilde_delta;
    if (std::abs(next - Delta_H) <= tol) return next;
    Delta_H = next;
  }
  throw std::runtime_error("bare detuning iteration did not converge");
}

BCoefficients b_coefficients(const SystemParams& p) {
  return BCoefficients(p.Omega, bare_detuning(p), p.Delta_c, p.kappa);
}

SigmaOperators sigma_operators(const SystemParams& p, double omega) {
  const BCoefficients b = b_coefficients(p);
  return {b.sigma_minus(omega), b.sigma_plus(omega)};
}

BlochSystem bloch_system(const SystemParams& p) {
  p.validate();
  BlochSystem out;
  out.params = p;
  out.Delta_H = bare_detuning(p);
  const BCoefficients b(p.Omega, out.Delta_H, p.Delta_c, p.kappa);
  const cplx b1 = b.B1(0.0), b2 = b.B2(0.0), b3 = b.B3(0.0);
  const double g2 = p.g * p.g;
  const double th = 2.0 * p.N + 1.0;

  BlochRates& r = out.rates;
  r.tilde_gamma = 2.0 * g2 * b1.real();
  r.tilde_gamma_N = th * r.tilde_gamma;
  r.tilde_delta = -g2 * th * b1.imag();
  r.delta_x = r.delta_y = g2 * th * b2.imag();
  r.gamma_x = r.gamma_y = 2.0 * g2 * th * b2.real();
  r.Gamma_x = -2.0 * g2 * b3.real();
  r.Gamma_y = 2.0 * g2 * b3.imag();
  r.Omega_x = 2.0 * g2 * th * b3.real();
  r.Omega_y = 2.0 * g2 * th * b3.imag();

  const double D = out.Delta_H + r.tilde_delta;
  out.A << -(r.tilde_gamma_N - r.gamma_x) / 2.0, D - r.delta_x, 0.0,
      -(D + r.delta_y), -(r.tilde_gamma_N + r.gamma_y) / 2.0, -p.Omega,
      r.Omega_x, p.Omega - r.Omega_y, -r.tilde_gamma_N;
  out.Gamma << r.Gamma_x, r.Gamma_y, r.tilde_gamma;

  Eigen::FullPivLU<Eigen::Matrix3d> lu(out.A);
  if (lu.rank() < 3) throw std::domain_error("no unique steady state");
  out.sigma_ss = lu.solve(out.Gamma);

  const Eigen::Vector3d sv =
      Eigen::JacobiSVD<Eigen::Matrix3d>(out.A).singularValues();
  out.condition_number = sv(0) / sv(2);
  if (out.condition_number > 1e8)
    std::clog << "cavicool: Bloch matrix condition number "
              << out.condition_number << "\n";

  out.eigenvalues = Eigen::EigenSolver<Eigen::Matrix3d>(out.A).eigenvalues();
  const double tol = 1e-12 * out.A.cwiseAbs().maxCoeff();
  for (int k = 0; k < 3; ++k)
    if (out.eigenvalues(k).real() > tol) out.dissipative = false;
  return out;
}

namespace {

InternalState from_density(const Mat2& rho) {
  InternalState s;
  s.rho = rho;
  s.rho_ee = rho(kExcited, kExcited).real();
  s.rho_gg = rho(kGround, kGround).real();
  s.rho_eg = rho(kExcited, kGround);
  s.rho_ge = rho(kGround, kExcited);
  return s;
}

}  // namespace

InternalState steady_density(const BlochSystem& b) {
  return from_density(
      density_from_bloch(b.sigma_ss(0), b.sigma_ss(1), b.sigma_ss(2)));
}

Mat4 internal_liouvillian(const SystemParams& p) {
  const double Delta_H = bare_detuning(p);
  const BCoefficients b(p.Omega, Delta_H, p.Delta_c, p.kappa);
  const Mat2 H = -0.5 * Delta_H * sigma_z() + 0.5 * p.Omega * sigma_x();
  const Mat2 sm = lowering(), sp = raising();
  const Mat2 Sm = b.sigma_minus(0.0);
  const Mat2 Sp = b.sigma_plus(0.0);
  const double up = p.g * p.g * (p.N + 1.0);
  const double down = p.g * p.g * p.N;

  SandwichSum L;
  L.add(-I, H, identity());
  L.add(I, identity(), H);
  // X -> Sm X sp - sp Sm X + h.c.
  L.add(up, Sm, sp);
  L.add(-up, sp * Sm, identity());
  L.add(up, sm, Sm.adjoint());
  L.add(-up, identity(), Sm.adjoint() * sm);
  L.add(down, Sp, sm);
  L.add(-down, sm * Sp, identity());
  L.add(down, sp, Sp.adjoint());
  L.add(-down, identity(), Sp.adjoint() * sp);
  return L.matrix();
}

InternalState liouvillian_steady_state(const Mat4& L) {
  Eigen::JacobiSVD<Mat4> svd(L, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * std::max(1.0, sv(0));
  if (sv(3) > tol || sv(2) <= tol)
    throw std::domain_error("degenerate steady state");
  const Vec4 v = svd.matrixV().col(3);
  Mat2 rho = unvec(v);
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return from_density(rho);
}

PauliProjection project_onto_pauli(const Mat4& L) {
  const Mat2 basis[3] = {sigma_x(), sigma_y(), sigma_z()};
  PauliProjection out;
  const Mat2 l_one = unvec(L * vec(identity()));
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) {
      const Mat2 l_j = unvec(L * vec(basis[j]));
      out.A(k, j) = 0.5 * (basis[k] * l_j).trace().real();
    }
    out.Gamma(k) = -0.5 * (basis[k] * l_one).trace().real();
  }
  return out;
}

}  // namespace cavicool
