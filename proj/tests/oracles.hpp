#pragma once

// Independent numerical routes used to check the closed forms: direct
// quadrature of defining integrals with explicit propagators.

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cavicool/bloch.hpp"
#include "cavicool/pauli.hpp"

namespace oracles {

using cavicool::cplx;
using cavicool::Mat2;
using cavicool::Mat4;

// int_0^T f(t) dt as a sum of unit-length Gauss-Kronrod panels.
template <class F>
cplx integrate(F&& f, double T, double panel = 1.0) {
  using boost::math::quadrature::gauss_kronrod;
  cplx sum = 0.0;
  for (double a = 0.0; a < T; a += panel) {
    const double b = std::min(T, a + panel);
    const double re = gauss_kronrod<double, 61>::integrate(
        [&](double t) { return f(t).real(); }, a, b, 0, 1e-14);
    const double im = gauss_kronrod<double, 61>::integrate(
        [&](double t) { return f(t).imag(); }, a, b, 0, 1e-14);
    sum += cplx(re, im);
  }
  return sum;
}

// int_0^inf e^{i (omega - Delta_g) tau - kappa tau} sm(-tau) d tau with
// sm(t) = e^{iHt} sm e^{-iHt} and H = -(Delta/2) sz + (Omega/2) sx.
inline Mat2 sigma_minus_quadrature(double Omega, double Delta, double Delta_c,
                                   double kappa, double omega) {
  using namespace cavicool::pauli;
  const Mat2 H = -0.5 * Delta * sigma_z() + 0.5 * Omega * sigma_x();
  Eigen::SelfAdjointEigenSolver<Mat2> es(H);
  const auto U = [&](double t) {  // e^{-iHt}
    const Eigen::Vector2cd ph =
        (es.eigenvalues().cast<cplx>() * cplx(0.0, -t)).array().exp();
    return Mat2(es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint());
  };
  const double Dg = Delta_c - Delta;
  const double T = 40.0 / kappa;
  Mat2 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out(i, j) = integrate(
          [&](double tau) {
            const Mat2 u = U(tau);
            const Mat2 s = u * lowering() * u.adjoint();
            return std::exp(cplx(-kappa * tau, (omega - Dg) * tau)) * s(i, j);
          },
          T);
  return out;
}

// S_Omega(omega) from explicit propagation: the connected sx correlation is
// integrated against e^{i omega tau} on [0, tau_max] with composite Simpson
// weights. The steady state is reached by propagating |g><g|.
inline double s_omega_time_domain(const cavicool::SystemParams& p, double omega,
                                  double tau_max, double h) {
  using namespace cavicool;
  const Mat4 L = internal_liouvillian(p);
  Mat2 g = Mat2::Zero();
  g(pauli::kGround, pauli::kGround) = 1.0;
  const Mat4 long_time = (L * (20.0 * tau_max)).exp();
  const Mat2 rho = unvec(long_time * vec(g));
  const Mat2 sx = pauli::sigma_x();
  const Mat2 x = sx * rho;
  const Mat2 conn = x - x.trace() * rho;

  int n = int(std::ceil(tau_max / h));
  if (n % 2) ++n;
  h = tau_max / n;
  const Mat4 step = (L * h).exp();
  Eigen::Vector4cd v = vec(conn);
  cplx sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * (sx * unvec(v)).trace() * std::exp(cplx(0.0, omega * k * h));
    v = step * v;
  }
  sum *= h / 3.0;
  return 0.5 * p.eta * p.eta * p.Omega * p.Omega * sum.real();
}

// Random valid parameter point in a broad desk-scale box.
inline cavicool::SystemParams random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto in = [&](double a, double b) { return a + (b - a) * u(rng); };
  cavicool::SystemParams p;
  p.g = in(0.05, 1.0);
  p.kappa = in(1.0, 10.0);
  p.Omega = in(0.01, 2.0);
  p.Delta = in(-3.0, 3.0);
  p.Delta_c = in(-5.0, 5.0);
  p.N = in(0.0, 2.0);
  p.eta = in(0.01, 0.2);
  p.eta_c = in(0.0, 0.2);
  p.nu = 1.0;
  return p;
}

}  // namespace oracles
