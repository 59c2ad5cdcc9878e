#include <cmath>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

#include "doctest.h"

#include "approx.hpp"

#include "cavicool/cooling.hpp"
#include "cavicool/spectra.hpp"

using namespace cavicool;

namespace {

SystemParams weak_scan_point(double eta_c) {
  SystemParams p;
  p.g = 0.2;
  p.kappa = 4.0;
  p.Omega = 0.1;
  p.Delta = -1.0;
  p.Delta_c = 3.0;
  p.eta = 0.05;
  p.eta_c = eta_c;
  return p;
}

}  // namespace

TEST_SUITE("cooling") {

TEST_CASE("resolved-sideband CASC: n_final = N + (2N+1)(gamma_N / 4 nu)^2") {
  for (double N : {0.0, 0.5}) {
    const SystemParams p = *table1_point("casc-sb-weak", N);
    const DerivedParams d = derive(p);
    CHECK(d.gamma_N / p.nu <= 0.1);
    const double x = d.gamma_N / (4.0 * p.nu);
    const CoolingResult r = rates_from_spectrum(p);
    REQUIRE(r.n_final);
    CAPTURE(N);
    CHECK(*r.n_final == rel(N + (2 * N + 1) * x * x).epsilon(N == 0 ? 0.02 : 0.05));
  }
}

TEST_CASE("weak-drive CASC closed forms approach the spectral route as Omega shrinks") {
  SystemParams p = *table1_point("casc-sb-weak", 0.0);
  const double gN = derive(p).gamma_N;
  double prev = 1.0;
  for (double ratio : {0.3, 0.1, 0.03}) {
    p.Omega = ratio * gN;
    const CoolingResult closed = casc_closed_forms(p, Resolution::sideband);
    const CoolingResult spec = rates_from_spectrum(p);
    const double dev = std::abs(spec.W - closed.W) / closed.W;
    CAPTURE(ratio);
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("Doppler CASC: n_final = (2N+1) gamma_N / 4 nu") {
  const SystemParams p = *table1_point("casc-doppler-weak", 0.0);
  const DerivedParams d = derive(p);
  CHECK(d.gamma_N > 10.0 * p.nu);
  const CoolingResult r = rates_from_spectrum(p);
  REQUIRE(r.n_final);
  CHECK(*r.n_final == rel(d.gamma_N / (4.0 * p.nu)).epsilon(0.05));
}

TEST_CASE("undriven molecule: gradient absorption and emission balance") {
  SystemParams p = weak_scan_point(0.05);
  p.Omega = 0.0;
  p.eta = 0.0;
  p.N = 0.7;
  const CoolingResult r = rates_from_spectrum(p);
  CHECK(r.A_minus > 0.0);
  CHECK(std::abs(r.W) <= 1e-12 * r.A_minus);
}

TEST_CASE("blue detuning heats") {
  SystemParams p = weak_scan_point(0.0);
  p.Delta = 1.0;
  const CoolingResult r = rates_from_spectrum(p);
  CHECK(r.W < 0.0);
  CHECK_FALSE(r.n_final);
  CHECK(std::find(r.flags.begin(), r.flags.end(), "net-heating") != r.flags.end());
}

TEST_CASE("strong-drive shape functions") {
  const auto [s, neg] = boost::math::tools::brent_find_minima(
      [](double x) { return -g_phi(x); }, 0.0, 1.0, 50);
  CHECK(s == rel(0.65).epsilon(0.02 / 0.65));
  CHECK(-neg == rel(0.2).epsilon(0.05));
  CHECK(g_phi(0.0) == 0.0);
  CHECK(g_phi(1.0) == 0.0);
  CHECK(g1_phi(0.0) == 0.0);
  // Small-angle limits: g -> sin^2, g1 -> sin^4 / 16.
  CHECK(g_phi(0.01) == rel(1e-4).epsilon(1e-3));
  CHECK(g1_phi(0.01) == rel(1e-8 / 16).epsilon(1e-3));
}

TEST_CASE("strong-drive optimum from the spectral route") {
  SystemParams p;
  p.g = 1.0;
  p.kappa = 100.0;
  p.Delta_c = 75.0;
  p.eta = 0.001;
  const DriveOptimum opt = optimize_strong_drive(p);
  CHECK(std::abs(opt.sin_phi - 0.65) <= 0.02);
  CHECK(std::abs(opt.g_value - 0.2) <= 0.01);
}

TEST_CASE("strong-drive dressed eigenvalues") {
  const StrongDriveCasc s = casc_strong_drive(*table1_point("casc-sb-strong", 0.0));
  REQUIRE(s.eps_numeric.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(s.eps_numeric[i].imag() == rel(s.eps_estimate[i].imag()).epsilon(1e-2));
    CHECK(s.eps_numeric[i].real() == rel(s.eps_estimate[i].real()).epsilon(2e-2));
  }
}

TEST_CASE("rates scale as eta^2 and the occupation does not") {
  const SystemParams p = *table1_point("casc-sb-weak", 0.0);
  SystemParams q = p;
  q.eta *= 0.5;
  const CoolingResult a = rates_from_spectrum(p), b = rates_from_spectrum(q);
  CHECK(b.W == rel(0.25 * a.W).epsilon(1e-12));
  CHECK(*b.n_final == rel(*a.n_final).epsilon(1e-12));
}

TEST_CASE("table cells at N = 0") {
  for (const Table1Cell& c : table1(0.0)) {
    CAPTURE(c.name);
    if (c.name == "casc-doppler-strong") {
      CHECK_FALSE(c.available);
      continue;
    }
    CHECK(c.available);
    CHECK(c.closed.flags.empty());
    CHECK(c.dev_W <= c.tolerance);
    CHECK(c.dev_n <= c.tolerance);
    CHECK(c.pass);
  }
}

TEST_CASE("closed forms flag regime violations") {
  SystemParams p = *table1_point("casc-sb-weak", 0.0);
  p.Omega = derive(p).gamma_N;
  const CoolingResult r = casc_closed_forms(p, Resolution::sideband);
  CHECK(std::find(r.flags.begin(), r.flags.end(), "regime:weak-drive") != r.flags.end());
}

TEST_CASE("thermal corrections vanish with a cold, resonant-free cavity") {
  SystemParams p = *table1_point("nabla-g-sb-weak", 0.0);
  const ThermalCorrections t = thermal_corrections(p);
  CHECK(t.n_th >= 0.0);
  CHECK(t.beta_th >= 0.0);
  p.Omega = 0.0;
  const ThermalCorrections cold = thermal_corrections(p);
  CHECK(cold.n_th == 0.0);
}

TEST_CASE("scan at zero shift equals the rate evaluation") {
  const SystemParams p = weak_scan_point(0.05);
  const auto pts = imperfection_scan(p, {-0.01, 0.0, 0.01}, ScanMode::anharmonic);
  REQUIRE(pts.size() == 3);
  const CoolingResult r = rates_from_spectrum(p);
  CHECK(pts[1].result.W == rel(r.W).epsilon(1e-14));
  CHECK(pts[1].result.A_plus == rel(r.A_plus).epsilon(1e-14));

  const auto levels = imperfection_scan(p, {0.01}, ScanMode::state_dependent, 3);
  REQUIRE(levels.size() == 4);
  for (int n = 0; n <= 3; ++n) CHECK(levels[n].shift == rel(0.01 * n));
  CHECK_THROWS_AS(imperfection_scan(p, {-2.0}, ScanMode::anharmonic), std::invalid_argument);
}

TEST_CASE("sideband rolloff is a Lorentzian of half width gamma_N / 2") {
  const SystemParams p = weak_scan_point(0.0);
  const double gN = derive(p).gamma_N;
  std::vector<double> x, y;
  for (int i = -30; i <= 30; ++i) x.push_back(3.0 * gN * i / 30.0);
  for (const auto& pt : imperfection_scan(p, x, ScanMode::anharmonic)) y.push_back(pt.result.W);
  const LorentzianFit fit = fit_lorentzian(x, y);
  CHECK(fit.hwhm == rel(0.5 * gN).epsilon(0.15));
  CHECK(fit.residual < 0.05);
  // The line sits on the dressed splitting, not on the bare detuning.
  CHECK(std::abs(fit.center - (derive(p).Delta_bar - p.nu)) <= 0.1 * gN);
}

TEST_CASE("weak-drive rolloff closed form") {
  SystemParams p = weak_scan_point(0.0);
  const double gN = derive(p).gamma_N;
  p.Omega = 0.05 * gN;
  for (double k : {-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0}) {
    CAPTURE(k);
    CHECK(rates_at(p, p.nu + k * gN).W == rel(weak_rolloff_W(p, k * gN)).epsilon(0.02));
  }
}

TEST_CASE("gradient of the cavity coupling skews the rolloff toward negative shifts") {
  const SystemParams base = weak_scan_point(0.0), grad = weak_scan_point(0.05);
  const double gN = derive(base).gamma_N;
  const auto ratio = [&](double dnu) {
    return rates_at(grad, 1.0 + dnu).W / rates_at(base, 1.0 + dnu).W;
  };
  for (double k : {1.0, 3.0}) CHECK(ratio(-k * gN) > ratio(k * gN));
}

TEST_CASE("strong drive flattens the rolloff") {
  const auto width = [](double Omega) {
    SystemParams p = weak_scan_point(0.05);
    p.Omega = Omega;
    return half_max_width(optimal::casc_strong(p), 0.5);
  };
  const auto weak_w = width(0.1), strong_w = width(0.65);
  REQUIRE(weak_w);
  REQUIRE(strong_w);
  CHECK(*strong_w > *weak_w);
}

TEST_CASE("Lorentzian fit recovers a synthetic line") {
  std::vector<double> x, y;
  for (int i = -50; i <= 50; ++i) {
    x.push_back(0.01 * i);
    const double u = (x.back() - 0.0) / 0.07;
    y.push_back(3.0 / (1.0 + u * u));
  }
  const LorentzianFit f = fit_lorentzian(x, y);
  CHECK(f.hwhm == rel(0.07).epsilon(1e-6));
  CHECK(f.peak == rel(3.0).epsilon(1e-6));
  CHECK(f.residual < 1e-6);
  CHECK_THROWS_AS(fit_lorentzian({0.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("occupation never drops below the cavity thermal occupation") {
  for (double N : {0.1, 0.5, 1.0})
    for (const Table1Cell& c : table1(N)) {
      if (!c.available || !c.spectral.n_final) continue;
      CAPTURE(c.name);
      CAPTURE(N);
      CHECK(*c.spectral.n_final >= N);
    }
}

}
