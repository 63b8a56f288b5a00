#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "uhplab/lattice.hpp"

using namespace uhplab;
using Catch::Approx;

TEST_CASE("gamma_bounds") {
  SECTION("delta = 0.5 endpoints") {
    auto b = gamma_bounds(0.5);
    CHECK(b.lo == Approx(0.0360706).margin(2e-6));
    CHECK(b.hi == Approx(0.1805739).margin(2e-6));
    CHECK(b.lo < b.midpoint());
    CHECK(b.midpoint() < b.hi);
  }
  SECTION("lo < hi for all delta in (0,1)") {
    for (double d = 0.05; d < 1.0; d += 0.05) {
      auto b = gamma_bounds(d);
      CHECK(b.lo < b.hi);
    }
  }
  SECTION("both bounds vanish as delta -> 0") {
    auto b = gamma_bounds(1e-3);
    CHECK(b.hi < 1e-5);
    CHECK(b.lo > 0.0);
  }
  SECTION("domain errors") {
    CHECK_THROWS_AS(gamma_bounds(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_bounds(1.0), std::domain_error);
  }
}

TEST_CASE("lattice geometry") {
  LatticeConfig cfg;
  cfg.delta = 0.5;
  DeltaLattice lat(cfg);
  SECTION("l = 0 points are purely imaginary") {
    for (int j : {-5, 0, 7}) {
      CHECK(lat.point(0, j).real() == 0.0);
      CHECK(lat.point(0, j).imag() == Approx(std::exp2(lat.gamma * j)));
    }
  }
  SECTION("horizontal offset formula at j = 0") {
    // (0.25/4) * 4 * 2^{-1} = 0.125, independent of gamma
    CHECK(lat.point(4, 0).real() == Approx(0.125));
    CHECK(lat.point(4, 0).imag() == Approx(1.0));
  }
  SECTION("vertical geometric ladder") {
    for (int j : {-3, 0, 11})
      CHECK(lat.y(j + 1) / lat.y(j) == Approx(std::exp2(lat.gamma)).epsilon(1e-14));
  }
  SECTION("primed intervals nest inside the full ones") {
    for (int j : {-7, 0, 9}) {
      CHECK(lat.Iprime(3, j).lo > lat.I(3, j).lo);
      CHECK(lat.Iprime(3, j).hi < lat.I(3, j).hi);
      CHECK(lat.Jprime(j).lo >= lat.J(j).lo);
      CHECK(lat.Jprime(j).hi < lat.J(j).hi);
    }
  }
  SECTION("gamma outside the admissible interval is rejected") {
    LatticeConfig bad = cfg;
    bad.gamma = 0.02;  // below the disjointness bound for delta = 0.5
    CHECK_THROWS_AS(DeltaLattice(bad), std::domain_error);
  }
}

TEST_CASE("bergman_distance") {
  SECTION("basic values") {
    CHECK(bergman_distance({0.3, 2.0}, {0.3, 2.0}) == 0.0);
    CHECK(bergman_distance({0.0, 1.0}, {0.0, 2.0}) == Approx(0.5 * std::log(2.0)).epsilon(1e-14));
  }
  SECTION("symmetry and triangle inequality on random triples") {
    detail::Rng rng(99u);
    for (int t = 0; t < 300; ++t) {
      complex a{rng.uniform(-3, 3), rng.log_uniform(0.1, 10)};
      complex b{rng.uniform(-3, 3), rng.log_uniform(0.1, 10)};
      complex c{rng.uniform(-3, 3), rng.log_uniform(0.1, 10)};
      CHECK(bergman_distance(a, b) == Approx(bergman_distance(b, a)).margin(1e-13));
      CHECK(bergman_distance(a, c) <= bergman_distance(a, b) + bergman_distance(b, c) + 1e-12);
    }
  }
  SECTION("horizontal and dilation invariance") {
    detail::Rng rng(7u);
    for (int t = 0; t < 100; ++t) {
      complex a{rng.uniform(-3, 3), rng.log_uniform(0.1, 10)};
      complex b{rng.uniform(-3, 3), rng.log_uniform(0.1, 10)};
      double d = bergman_distance(a, b);
      double shift = rng.uniform(-5, 5);
      double scale = rng.log_uniform(0.25, 4.0);
      CHECK(bergman_distance(a + shift, b + shift) == Approx(d).margin(1e-12));
      CHECK(bergman_distance(scale * a, scale * b) == Approx(d).margin(1e-12));
    }
  }
  SECTION("rejects points off the half-plane") {
    CHECK_THROWS_AS(bergman_distance({0.0, -1.0}, {0.0, 1.0}), std::domain_error);
  }
}

TEST_CASE("covering audit passes for the canonical deltas") {
  for (double delta : {0.1, 0.3, 0.5}) {
    LatticeConfig cfg;
    cfg.delta = delta;
    DeltaLattice lat(cfg);
    auto rep = covering_audit(lat, 10000, 1234u);
    INFO("delta=" << delta << " N=" << rep.mult_J_max << " multI=" << rep.mult_I_max);
    CHECK(rep.pass());
    CHECK(rep.mult_I_max <= 4);
    CHECK(rep.mult_J_max >= 1);
    CHECK(rep.samples_y > 9000);
  }
}

TEST_CASE("inclusion audit passes over sampled cells") {
  for (double delta : {0.1, 0.3, 0.5}) {
    LatticeConfig cfg;
    cfg.delta = delta;
    DeltaLattice lat(cfg);
    auto rep = inclusion_audit(lat, 100, 25, 42u);
    INFO("delta=" << delta << " worst_forward=" << rep.worst_forward
                  << " vs delta^2=" << delta * delta);
    CHECK(rep.pass());
    CHECK(rep.worst_forward < delta * delta);
  }
}

TEST_CASE("lattice separation is positive") {
  LatticeConfig cfg;
  cfg.delta = 0.3;
  DeltaLattice lat(cfg);
  CHECK(lattice_separation(lat) > 1e-4);
}
