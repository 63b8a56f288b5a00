#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "uhplab/weights.hpp"

using namespace uhplab;
using Catch::Approx;

TEST_CASE("growth_eval on the built-in families") {
  CHECK(growth_eval(GrowthFunction::power(1.0), 7.0) == Approx(7.0));
  CHECK(growth_eval(GrowthFunction::power(2.0), 3.0) == Approx(9.0));
  // direct evaluation oracle: t ln(e+t) at t = 1
  CHECK(growth_eval(GrowthFunction::power_log(), 1.0) ==
        Approx(std::log(std::numbers::e + 1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(growth_eval(GrowthFunction::power(1.0), 0.0), std::domain_error);
  CHECK_THROWS_AS(growth_eval(GrowthFunction::power(1.0), -2.0), std::domain_error);
}

TEST_CASE("log_value agrees with log of the value") {
  for (const auto& phi : builtin_growth_functions()) {
    for (int j = -18; j <= 18; j += 3) {
      double t = std::exp2(j);
      CHECK(phi.log_value(t) == Approx(std::log(phi(t))).margin(1e-12));
    }
  }
}

TEST_CASE("growth class certificates") {
  SECTION("identity is lower type 1 with equality") {
    auto cert = growth_class_check(GrowthFunction::power(1.0));
    CHECK(cert.pass);
    CHECK(cert.worst_ratio == Approx(1.0));
  }
  SECTION("square is upper type 2 exactly") {
    auto cert = growth_class_check(GrowthFunction::power(2.0));
    CHECK(cert.pass);
    CHECK(cert.worst_ratio == Approx(1.0));
  }
  SECTION("square declared lower type 1 fails (Phi(t)/t increases)") {
    GrowthFunction wrong = GrowthFunction::power(2.0);
    wrong.class_tag = GrowthClass::lower;
    wrong.type_exponent = 1.0;
    wrong.type_constant = 1.0;
    auto cert = growth_class_check(wrong);
    CHECK_FALSE(cert.pass);
    CHECK_FALSE(cert.monotone_ok);
  }
  SECTION("every built-in family passes with its declared class") {
    for (const auto& phi : builtin_growth_functions()) {
      auto cert = growth_class_check(phi);
      INFO(phi.name());
      CHECK(cert.pass);
    }
  }
}

TEST_CASE("p_phi follows the class tag") {
  CHECK(PPhi(GrowthFunction::power(2.0)).value == Approx(2.0));
  CHECK(PPhi(GrowthFunction::power(0.5)).value == Approx(1.0));
  CHECK(PPhi(GrowthFunction::power_log()).value == Approx(2.0));
}

TEST_CASE("weight_eval") {
  WeightSpec w{1, 1, 1.0, GrowthFunction::power(1.0)};
  CHECK(weight_eval(w, 1.0) == Approx(1.0));
  CHECK(weight_eval(w, std::numbers::e) == Approx(2.0).epsilon(1e-14));
  WeightSpec unit{0, 0, 3.5, GrowthFunction::power(1.0)};
  CHECK(weight_eval(unit, 5.0) == Approx(1.0));
  CHECK_THROWS_AS(weight_eval(w, 0.0), std::domain_error);
}

TEST_CASE("omega0_eval") {
  CHECK(omega0_eval(1, 1, 1.0) == Approx(1.0));
  CHECK(omega0_eval(1, 1, std::exp(2.0)) == Approx(3.0).epsilon(1e-14));
  CHECK(omega0_eval(1, 0, std::exp(-1.0)) == Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(omega0_eval(1, 1, 0.0), std::domain_error);
}

TEST_CASE("weight_doubling_bound") {
  WeightSpec w{1, 1, 1.0, GrowthFunction::power(1.0)};
  SECTION("finite on sweeps") {
    CHECK(weight_doubling_bound(w, 1.0, 20) < 10.0);
    CHECK(weight_doubling_bound(w, std::exp2(-10), 5) < 10.0);
  }
  SECTION("trivial weight gives ratio <= 1") {
    WeightSpec unit{0, 0, 1.0, GrowthFunction::power(1.0)};
    CHECK(weight_doubling_bound(unit, 0.37, 20) == Approx(1.0));
  }
  SECTION("worst ratio nonincreasing as x grows past 1") {
    double prev = weight_doubling_bound(w, 1.0, 20);
    for (double x : {2.0, 4.0, 16.0, 256.0}) {
      double cur = weight_doubling_bound(w, x, 20);
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("weight invariants on geometric grids") {
  std::mt19937_64 rng(20240811u);
  auto specs = builtin_specs();
  SECTION("omega >= 1 everywhere") {
    for (const auto& w : specs)
      for (int j = -30; j <= 30; ++j) {
        INFO(w.name() << " at 2^" << j);
        CHECK(base_weight(w, std::exp2(j)) >= 1.0);
      }
  }
  SECTION("symmetry for the identity growth function with eps=(1,1)") {
    WeightSpec w{1, 1, 1.0, GrowthFunction::power(1.0)};
    for (int i = 0; i < 200; ++i) {
      double t = std::exp2(60.0 * (rng() >> 11) * 0x1.0p-53 - 30.0);
      CHECK(base_weight(w, t) == Approx(base_weight(w, 1.0 / t)).epsilon(1e-12));
    }
  }
  SECTION("omega^k * omega^(-k) == 1") {
    for (const auto& w : specs) {
      WeightSpec neg = w;
      neg.k = -w.k;
      for (int j = -30; j <= 30; j += 5) {
        double t = std::exp2(j);
        CHECK(weight_eval(w, t) * weight_eval(neg, t) == Approx(1.0).epsilon(1e-13));
      }
    }
  }
}
