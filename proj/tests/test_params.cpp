#include <cmath>
#include <stdexcept>
#include <numbers>

#include "doctest.h"

#include "approx.hpp"

#include "cavicool/params.hpp"

using namespace cavicool;

namespace {

SystemParams fig3a() {
  SystemParams p;
  p.g = 0.5;
  p.kappa = 5.0;
  p.Omega = 0.1;
  p.Delta = -1.0;
  p.Delta_c = 0.0;
  p.eta = 0.05;
  return p;
}

}  // namespace

TEST_SUITE("params") {

TEST_CASE("cavity-enhanced decay and its thermal and Stark companions") {
  SystemParams p = fig3a();
  DerivedParams d = derive(p);
  CHECK(d.gamma == rel(0.1).epsilon(1e-15));
  CHECK(d.gamma_N == rel(0.1).epsilon(1e-15));
  CHECK(d.delta_stark == 0.0);
  CHECK(d.Delta_g == 1.0);

  p.N = 0.5;
  p.Delta_c = 3.0;
  d = derive(p);
  const double lorentz = 25.0 + 9.0;
  CHECK(d.gamma == rel(2.0 * 0.25 * 5.0 / lorentz));
  CHECK(d.gamma_N == rel(2.0 * d.gamma));
  CHECK(d.delta_stark == rel(2.0 * 0.25 * 3.0 / lorentz));
}

TEST_CASE("decay bound is attained only on cavity resonance") {
  SystemParams p = fig3a();
  for (double Dc : {-4.0, -0.5, 0.0, 0.3, 7.0}) {
    p.Delta_c = Dc;
    const double bound = 2.0 * p.g * p.g / p.kappa;
    const double gamma = derive(p).gamma;
    CHECK(gamma <= bound * (1.0 + 1e-15));
    if (Dc == 0.0) CHECK(gamma == rel(bound));
    else CHECK(gamma < bound);
  }
}

TEST_CASE("dressing quantities") {
  SystemParams p = fig3a();
  p.Omega = 3.0;
  p.Delta = -4.0;
  p.N = 1.0;
  const DerivedParams d = derive(p);
  CHECK(d.Delta_bar == rel(5.0));
  CHECK(d.sin_phi == rel(0.6));
  CHECK(d.phi == rel(std::asin(0.6)));
  CHECK(d.rho_ee_0 == rel(1.0 / 3.0));
  CHECK(d.rho_ee_drive == rel(9.0 / (2.0 * 3.0 * (32.0 + 9.0))));
}

TEST_CASE("thermal excited population stays below one half") {
  SystemParams p = fig3a();
  for (double N : {0.0, 0.1, 1.0, 10.0, 1e6}) {
    p.N = N;
    const double r = derive(p).rho_ee_0;
    CHECK(r >= 0.0);
    CHECK(r < 0.5);
    CHECK((r == 0.0) == (N == 0.0));
  }
}

TEST_CASE("thermal occupation of a 10 GHz cavity between 20 mK and 4 K") {
  const double wc = 2.0 * std::numbers::pi * 10e9;
  const double cold = thermal_occupation(wc, 0.02);
  const double warm = thermal_occupation(wc, 4.0);
  CHECK(cold < 1e-9);
  CHECK(warm > 7.0);
  CHECK(warm < 10.0);
  CHECK(thermal_occupation(wc, 0.0) == 0.0);
  CHECK_THROWS_AS(thermal_occupation(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(thermal_occupation(wc, -1.0), std::invalid_argument);
}

TEST_CASE("validation names the offending field") {
  const auto message = [](SystemParams p) {
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  SystemParams p = fig3a();
  CHECK(message(p).empty());
  p.nu = 0.0;
  CHECK(message(p).find("nu") != std::string::npos);
  p = fig3a();
  p.eta = 1.0;
  CHECK(message(p).find("eta") != std::string::npos);
  p = fig3a();
  p.N = -0.1;
  CHECK(message(p).find("N") != std::string::npos);
  p = fig3a();
  p.kappa = std::nan("");
  CHECK(message(p).find("kappa") != std::string::npos);
}

TEST_CASE("field access by name round-trips") {
  SystemParams p;
  double v = 0.5;
  for (const auto& f : field_names()) {
    CHECK(set_field(p, f, v));
    CHECK(get_field(p, f) == v);
    v += 0.01;
  }
  CHECK_FALSE(set_field(p, "gamma", 1.0));
  CHECK_THROWS_AS(get_field(p, "gamma"), std::invalid_argument);
}

TEST_CASE("regime classification") {
  SystemParams p = fig3a();
  RegimeInfo r = classify_regime(p);
  CHECK_FALSE(r.weak_drive);  // Omega = gamma_N here
  CHECK(r.casc == Resolution::sideband);
  CHECK(r.nabla_g == Resolution::doppler);
  CHECK(r.bad_cavity);
  CHECK(r.lamb_dicke);

  p.Omega = 0.005;
  CHECK(classify_regime(p).weak_drive);

  p.Omega = 5.0;
  p.Delta = 0.0;
  r = classify_regime(p);
  CHECK(r.saturated);
  CHECK_FALSE(r.strong_drive);

  p = fig3a();
  p.Omega = 0.65;
  p.Delta = -0.76;
  CHECK(classify_regime(p).strong_drive);

  p.eta = 0.4;
  r = classify_regime(p);
  CHECK_FALSE(r.lamb_dicke);
  CHECK(r.violations() == std::vector<std::string>{"lamb-dicke", "elimination"});

  p = fig3a();
  p.g = 2.0;
  CHECK_FALSE(classify_regime(p).bad_cavity);
}

}
