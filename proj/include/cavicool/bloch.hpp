#pragma once

#include <Eigen/Dense>

#include "cavicool/params.hpp"
#include "cavicool/pauli.hpp"

namespace cavicool {

// B_i(omega) for the bare two-level Hamiltonian H_I = -(Delta/2) sz +
// (Omega/2) sx, where Delta is the Hamiltonian (unshifted) detuning.
class BCoefficients {
 public:
  BCoefficients(double Omega, double Delta, double Delta_c, double kappa);

  cplx B1(double omega) const;
  cplx B2(double omega) const;
  cplx B3(double omega) const;

  Mat2 sigma_minus(double omega) const;
  Mat2 sigma_plus(double omega) const { return sigma_minus(-omega).adjoint(); }

  double Delta_bar() const { return Delta_bar_; }
  double Delta_g() const { return Delta_g_; }

 private:
  cplx pole(double omega, double center) const;

  double Omega_, Delta_, kappa_;
  double Delta_bar_, Delta_g_;
  double shift_[2];  // Delta + s Delta_bar for s = -1, +1
  bool collapsed_;   // Delta_bar == 0
};

// Hamiltonian detuning Delta_H such that Delta_H + delta~(Delta_H) equals the
// user-facing detuning p.Delta.
double bare_detuning(const SystemParams& p);

BCoefficients b_coefficients(const SystemParams& p);

struct SigmaOperators {
  Mat2 minus;
  Mat2 plus;
};

SigmaOperators sigma_operators(const SystemParams& p, double omega);

struct BlochRates {
  double tilde_gamma = 0.0;
  double tilde_gamma_N = 0.0;
  double tilde_delta = 0.0;
  double gamma_x = 0.0, gamma_y = 0.0;
  double delta_x = 0.0, delta_y = 0.0;
  double Omega_x = 0.0, Omega_y = 0.0;
  double Gamma_x = 0.0, Gamma_y = 0.0;
};

// d<s>/dt = A <s> - Gamma for s = (sx, sy, sz).
struct BlochSystem {
  SystemParams params;
  double Delta_H = 0.0;  // bare detuning used in H_I
  Eigen::Matrix3d A;
  Eigen::Vector3d Gamma;
  BlochRates rates;
  Eigen::Vector3d sigma_ss;
  Eigen::Vector3cd eigenvalues;
  double condition_number = 1.0;
  bool dissipative = true;  // all Re(eig A) <= 0
};

// Throws std::domain_error("no unique steady state") when A is singular.
BlochSystem bloch_system(const SystemParams& p);

struct InternalState {
  Mat2 rho;
  double rho_ee = 0.0;
  double rho_gg = 0.0;
  cplx rho_eg;
  cplx rho_ge;
};

InternalState steady_density(const BlochSystem& b);

// 4x4 matrix acting on column-stacked 2x2 operators.
Mat4 internal_liouvillian(const SystemParams& p);

// Null vector of a 4x4 generator, normalized to unit trace. Throws
// std::domain_error("degenerate steady state") unless the kernel is 1-d.
InternalState liouvillian_steady_state(const Mat4& L);

// A_kj = Tr(s_k L(s_j))/2, Gamma_k = -Tr(s_k L(1))/2.
struct PauliProjection {
  Eigen::Matrix3d A;
  Eigen::Vector3d Gamma;
};

PauliProjection project_onto_pauli(const Mat4& L);

}  // namespace cavicool
