#include <cmath>
#include <stdexcept>
#include <random>

#include "doctest.h"

#include "approx.hpp"

#include "cavicool/cooling.hpp"
#include "cavicool/spectra.hpp"
#include "oracles.hpp"

using namespace cavicool;

namespace {

SystemParams fig3a(double Omega = 0.1, double N = 0.0) {
  SystemParams p;
  p.g = 0.5;
  p.kappa = 5.0;
  p.Omega = Omega;
  p.Delta = -1.0;
  p.Delta_c = 0.0;
  p.N = N;
  p.eta = 0.05;
  return p;
}

SystemParams fig4(double Omega = 2.0, double N = 0.5) {
  SystemParams p;
  p.g = 0.01;
  p.kappa = 0.3;
  p.Omega = Omega;
  p.Delta = 6.0;
  p.Delta_c = 7.0;
  p.N = N;
  p.eta_c = 0.05;
  return p;
}

SystemParams fig6() {
  SystemParams p;
  p.g = 0.2;
  p.kappa = 4.0;
  p.Omega = 0.1;
  p.Delta = -1.0;
  p.Delta_c = 3.0;
  p.eta = 0.05;
  p.eta_c = 0.05;
  return p;
}

template <class F>
double argmax(F&& f, double lo, double hi, int n = 4001) {
  double best = lo, value = f(lo);
  for (int i = 1; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    const double v = f(x);
    if (v > value) {
      value = v;
      best = x;
    }
  }
  return best;
}

// Half width at half maximum of a single peak at x0, by bisection on each side.
template <class F>
double hwhm(F&& f, double x0, double reach) {
  const double half = 0.5 * f(x0);
  const auto side = [&](double dir) {
    double a = 0.0, b = reach;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (a + b);
      (f(x0 + dir * m) > half ? a : b) = m;
    }
    return 0.5 * (a + b);
  };
  return 0.5 * (side(1.0) + side(-1.0));
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("weak drive: S_Omega is the thermal two-Lorentzian excitation spectrum") {
  const SystemParams p = fig3a(0.01);
  const SpectrumModel m(p);
  const double peak = m.s_omega(1.0);
  double worst = 0.0;
  for (double w = -3.0; w <= 3.0; w += 0.01) {
    if (std::abs(w) < 1e-12) continue;
    worst = std::max(worst, std::abs(m.s_omega(w) - limits::s_omega_weak(p, w)));
  }
  CHECK(worst <= 0.01 * peak);

  const double gN = derive(p).gamma_N;
  const auto s = [&](double w) { return m.s_omega(w); };
  const double center = argmax(s, 0.9, 1.1, 20001);
  CHECK(std::abs(center - 1.0) < 0.01 * gN);
  CHECK(hwhm(s, 1.0, 5 * gN) == rel(gN / 2).epsilon(0.02));
}

TEST_CASE("thermal cavity adds the mirrored resonance with the population ratio") {
  const SystemParams p = fig3a(0.01, 0.5);
  const SpectrumModel m(p);
  const auto s = [&](double w) { return m.s_omega(w); };
  CHECK(std::abs(argmax(s, -1.1, -0.9, 20001) + 1.0) < 0.01 * derive(p).gamma_N);
  CHECK(m.s_omega(-1.0) / m.s_omega(1.0) == rel(0.5 / 1.5).epsilon(0.02));
}

TEST_CASE("regression and resolvent routes agree on random points") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> w(-4.0, 4.0);
  for (int k = 0; k < 100; ++k) {
    const SystemParams p = oracles::random_point(rng);
    const SpectrumModel m(p);
    for (double omega : {p.nu, -p.nu, w(rng)}) {
      const double a = m.s_omega(omega), b = m.s_omega_resolvent(omega);
      CAPTURE(k);
      CAPTURE(omega);
      CHECK(std::abs(a - b) <= 1e-8 * std::abs(b));
    }
  }
}

TEST_CASE("S_Omega at zero frequency is finite and matches the time-domain route") {
  const SystemParams p = fig3a(0.1, 0.5);
  const SpectrumModel m(p);
  const double tau = 50.0 / bloch_system(p).rates.tilde_gamma_N;
  CHECK(std::isfinite(m.s_omega(0.0)));
  CHECK(m.s_omega(0.0) ==
        rel(oracles::s_omega_time_domain(p, 0.0, tau, 0.01)).epsilon(1e-4));
}

TEST_CASE("time-domain quadrature agrees with the closed form") {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 3; ++k) {
    SystemParams p = oracles::random_point(rng);
    p.g = 0.5 + 0.5 * p.g;  // keep tau_max short for a unit test
    const double tau = 50.0 / bloch_system(p).rates.tilde_gamma_N;
    const SpectrumModel m(p);
    for (double omega : {1.0, -1.0}) {
      CAPTURE(k);
      CHECK(m.s_omega(omega) ==
            rel(oracles::s_omega_time_domain(p, omega, tau, 0.01)).epsilon(1e-4));
    }
  }
}

TEST_CASE("S_g of the four-peak example") {
  const SystemParams p = fig4();
  const SpectrumModel m(p);
  const auto s = [&](double w) { return m.s_g(w); };
  const double Dg = p.Delta_c - p.Delta;
  const double Db = derive(p).Delta_bar;
  // Cavity resonances sit at +-Delta_g; the thermal ones at +-(Delta_g +
  // Delta_bar), which tends to +-Delta_c as Omega -> 0.
  CHECK(std::abs(argmax(s, 0.5, 1.5) - Dg) < 5e-3);
  CHECK(std::abs(argmax(s, -1.5, -0.5) + Dg) < 5e-3);
  CHECK(std::abs(argmax(s, 6.5, 8.0) - (Dg + Db)) < 1e-3);
  CHECK(std::abs(argmax(s, -8.0, -6.5) + (Dg + Db)) < 1e-3);
  CHECK(s(Dg + Db) > 5.0 * s(4.0));
}

TEST_CASE("ground-state cavity, weak drive: one resonance of half width kappa") {
  const SystemParams p = fig4(0.01, 0.0);
  const SpectrumModel m(p);
  const auto s = [&](double w) { return m.s_g(w); };
  const double center = argmax(s, -10.0, 10.0, 20001);
  CHECK(center == rel(p.Delta_c - p.Delta).epsilon(1e-3));
  CHECK(hwhm(s, center, 3.0) == rel(p.kappa).epsilon(0.01));
}

TEST_CASE("weak drive: thermal resonances at +-Delta_c have equal heights") {
  const SpectrumModel m(fig4(1e-5));
  const double up = m.s_g(7.0), down = m.s_g(-7.0);
  CHECK(std::abs(up - down) <= 1e-6 * up);
}

TEST_CASE("saturated drive: two-peak form") {
  SystemParams p;
  p.g = 0.1;
  p.kappa = 5.0;
  p.Omega = 1.0;
  p.Delta = 0.0;
  p.Delta_c = 3.0;
  p.N = 0.5;
  p.eta_c = 0.05;
  const SpectrumModel m(p);
  double worst = 0.0, top = 0.0;
  for (double w = -10.0; w <= 10.0; w += 0.05) {
    const double ref = limits::s_g_two_peak(p, w);
    top = std::max(top, ref);
    worst = std::max(worst, std::abs(m.s_g(w) - ref));
  }
  CHECK(worst <= 0.05 * top);
}

TEST_CASE("tabulated B form of S_g against the operator trace") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    SystemParams p = oracles::random_point(rng);
    const SpectrumModel m(p);
    const double c = 4.0 * p.eta_c * p.eta_c * p.g * p.g * p.N;
    const double im_rho = m.steady().rho_eg.imag();
    for (double w : {-2.5, -1.0, 0.0, 1.0, 3.0}) {
      // The tabulated N term pairs B3(-w) with rho_eg unconjugated.
      const double gap = -c * m.coefficients().B3(-w).imag() * im_rho;
      CHECK(m.s_g_b_form(w) - m.s_g(w) ==
            rel(gap).epsilon(1e-8).scale(std::abs(m.s_g(w))));
    }
    p.N = 0.0;
    const SpectrumModel zero(p);
    for (double w : {-2.5, 1.0, 3.0})
      CHECK(zero.s_g_b_form(w) == rel(zero.s_g(w)).epsilon(1e-12));
  }
}

TEST_CASE("six-resonance approximation holds when gamma_N << Delta_bar") {
  const SystemParams p = fig4();
  const SpectrumModel m(p);
  const double Db = derive(p).Delta_bar;
  for (double w : {1.0, -1.0, 1.0 + Db, -1.0 - Db})
    CHECK(m.s_g_six_resonance(w) == rel(m.s_g(w)).epsilon(0.01));
}

TEST_CASE("weak drive: destructive interference between the two resonances") {
  const SpectrumModel m(fig6());
  for (double w = 1.5; w <= 4.0; w += 0.25) CHECK(m.s_interference(w) < 0.0);
}

TEST_CASE("no interference without a cavity gradient") {
  SystemParams p = fig6();
  p.eta_c = 0.0;
  const SpectrumModel m(p);
  for (double w : {-1.0, 0.5, 1.0, 2.0}) {
    CHECK(std::abs(m.s_interference(w)) <= 1e-12 * m.s_omega(w));
    CHECK(m.s_g(w) == 0.0);
  }
}

TEST_CASE("rates scale with the Lamb-Dicke parameters squared") {
  SystemParams p = fig6();
  p.eta_c = 0.0;
  const CoolingResult a = rates_from_spectrum(p);
  p.eta *= 2.0;
  const CoolingResult b = rates_from_spectrum(p);
  CHECK(b.A_minus == rel(4.0 * a.A_minus).epsilon(1e-12));
  CHECK(b.A_plus == rel(4.0 * a.A_plus).epsilon(1e-12));

  p = fig6();
  p.eta = 0.0;
  const CoolingResult c = rates_from_spectrum(p);
  p.eta_c *= 2.0;
  const CoolingResult d = rates_from_spectrum(p);
  CHECK(d.A_minus == rel(4.0 * c.A_minus).epsilon(1e-12));
  CHECK(d.A_plus == rel(4.0 * c.A_plus).epsilon(1e-12));

  p = fig6();
  const CoolingResult e = rates_from_spectrum(p);
  p.eta *= 3.0;
  p.eta_c *= 3.0;
  const CoolingResult f = rates_from_spectrum(p);
  CHECK(*f.n_final == rel(*e.n_final).epsilon(1e-12));
}

TEST_CASE("full spectrum grid") {
  const SystemParams p = fig6();
  const Spectrum s = full_spectrum(p, {-2.0, 0.0, 2.0}, 1);
  REQUIRE(s.rows.size() == 5);
  int tagged = 0;
  for (const auto& r : s.rows) {
    if (!r.has_interference) {
      CHECK(r.s_i == 0.0);
      continue;
    }
    ++tagged;
    CHECK(std::abs(std::abs(r.omega) - p.nu) < 1e-15);
    CHECK(r.s_total == rel(SpectrumModel(p).total(r.omega)));
  }
  CHECK(tagged == 2);
  for (std::size_t i = 1; i < s.rows.size(); ++i) CHECK(s.rows[i].omega > s.rows[i - 1].omega);
  CHECK_THROWS_AS(full_spectrum(p, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(full_spectrum(p, {1.0, 0.0}, 1), std::invalid_argument);
}

}
