#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "uhplab/atomic.hpp"

using namespace uhplab;
using Catch::Approx;

namespace {

const WeightSpec kUnit{0, 0, 0.0, GrowthFunction::power(1.0)};
const WeightSpec kLog11{1, 1, 1.0, GrowthFunction::power(1.0)};

SequenceSpaceParams seq_params(const DeltaLattice& lat, double p = 2.0, double q = 2.0,
                               double alpha = 0.0, WeightSpec spec = kUnit) {
  SequenceSpaceParams sp;
  sp.p = p;
  sp.q = q;
  sp.alpha = alpha;
  sp.spec = spec;
  sp.gamma = lat.gamma;
  return sp;
}

DeltaLattice small_lattice(double delta, int l_span, int j_span) {
  LatticeConfig cfg;
  cfg.delta = delta;
  cfg.l_min = -l_span;
  cfg.l_max = l_span;
  cfg.j_min = -j_span;
  cfg.j_max = j_span;
  return DeltaLattice(cfg);
}

}  // namespace

TEST_CASE("sequence_norm") {
  auto lat = small_lattice(0.5, 20, 10);
  auto sp = seq_params(lat, 2.0, 2.0, 0.0, kLog11);
  SECTION("single atom at the origin has norm 1 (omega(1) = 1)") {
    CoefficientArray lam;
    lam.add(0, 0, complex{1.0, 0.0});
    CHECK(sequence_norm(lam, sp) == Approx(1.0).epsilon(1e-14));
  }
  SECTION("homogeneity") {
    CoefficientArray lam;
    lam.add(0, 0, complex{1.0, 2.0});
    lam.add(3, -2, complex{-0.5, 0.25});
    lam.add(-7, 4, complex{0.0, -2.0});
    double n1 = sequence_norm(lam, sp);
    for (auto& e : lam.entries) e.value *= complex{0.0, -3.0};
    CHECK(sequence_norm(lam, sp) == Approx(3.0 * n1).epsilon(1e-13));
  }
  SECTION("two atoms on the base level, k=0") {
    auto sp0 = seq_params(lat);
    CoefficientArray lam;
    lam.add(0, 0, complex{1.0, 0.0});
    lam.add(1, 0, complex{1.0, 0.0});
    CHECK(sequence_norm(lam, sp0) == Approx(std::sqrt(2.0)).epsilon(1e-14));
  }
}

TEST_CASE("sample_on_lattice") {
  auto lat = small_lattice(0.5, 5, 3);
  SECTION("zero function samples to zeros") {
    HoloTestFunction zero;
    auto lam = sample_on_lattice(zero, lat);
    for (const auto& e : lam.entries) CHECK(std::abs(e.value) == 0.0);
    CHECK(lam.within(lat.cfg));
  }
  SECTION("(z+i)^{-3} at the base point is i/8") {
    auto F = builtin_test_family()[1];
    auto lam = sample_on_lattice(F, lat);
    for (const auto& e : lam.entries)
      if (e.l == 0 && e.j == 0) {
        CHECK(e.value.real() == Approx(0.0).margin(1e-15));
        CHECK(e.value.imag() == Approx(0.125).epsilon(1e-14));
      }
  }
  SECTION("translation consistency") {
    auto F = builtin_test_family()[4];
    double a = 0.375;
    HoloTestFunction Fa = F;  // F(z + a) shifts the pole mirror by -a
    Fa.terms[0].pole_mirror -= a;
    for (int l : {-3, 0, 2})
      for (int j : {-2, 0, 1}) {
        complex lhs = Fa.eval(lat.point(l, j));
        complex rhs = F.eval(lat.point(l, j) + a);
        CHECK(std::abs(lhs - rhs) <= 1e-14 * std::abs(rhs));
      }
  }
}

TEST_CASE("sampling_check") {
  LatticeConfig cfg;
  cfg.delta = 0.5;
  cfg.l_min = -2'000'000;
  cfg.l_max = 2'000'000;
  cfg.j_min = -70;
  cfg.j_max = 70;
  DeltaLattice lat(cfg);
  SECTION("zero function reports the exact-zero case") {
    HoloTestFunction zero;
    auto r = sampling_check(zero, lat, seq_params(lat));
    CHECK(r.zero);
    CHECK(r.lhs == 0.0);
  }
  SECTION("ratios are finite, reciprocal, and footprint holds the mass") {
    auto F = builtin_test_family()[1];
    auto r = sampling_check(F, lat, seq_params(lat));
    INFO("lhs=" << r.lhs << " norm_q=" << r.norm_q << " up=" << r.ratio_upper);
    CHECK(r.norm_q > 0.0);
    CHECK(r.lhs > 0.0);
    CHECK(std::isfinite(r.ratio_upper));
    CHECK(r.ratio_upper * r.ratio_lower == Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(r.truncation_warning);
  }
  SECTION("dilation family keeps the ratio stable within 2x at k=0") {
    double prev = 0.0;
    for (double c : {0.5, 1.0, 2.0}) {
      HoloTestFunction Fc;  // F(cz) = c^{-3} (z + i/c)^{-3}
      Fc.terms = {{complex{std::pow(c, -3.0), 0.0}, complex{0.0, 1.0 / c}, 3}};
      auto r = sampling_check(Fc, lat, seq_params(lat));
      if (prev > 0.0) {
        CHECK(r.ratio_upper <= 2.0 * prev);
        CHECK(r.ratio_upper >= 0.5 * prev);
      }
      prev = r.ratio_upper;
    }
  }
  SECTION("gamma mismatch is rejected") {
    auto sp = seq_params(lat);
    sp.gamma *= 2.0;
    CHECK_THROWS_AS(sampling_check(builtin_test_family()[0], lat, sp), std::domain_error);
  }
}

TEST_CASE("synthesize") {
  auto lat = small_lattice(0.5, 40, 20);
  auto sp = seq_params(lat, 2.0, 2.0, 1.0);
  SECTION("single atom is a pure kernel with finite mixed norm at alpha=1") {
    CoefficientArray lam;
    lam.add(0, 0, complex{1.0, 0.0});
    complex at_i = synthesize(lam, 1.0, sp, lat, complex{0.0, 1.0});
    // K_1(i, i) = 2/(4 pi)
    CHECK(at_i.real() == Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-12));
    SpaceParams params(2.0, 2.0, 1.0, 1.0);
    auto nr = mixed_norm(wrap_evaluator(synthesize_evaluator(lam, 1.0, sp, lat), 3.0), params, kUnit);
    CHECK(nr.ok);
    CHECK_FALSE(nr.diverged);
    CHECK(nr.value > 0.0);
  }
  SECTION("linearity") {
    CoefficientArray a, b, ab;
    a.add(0, 0, complex{1.0, -1.0});
    a.add(2, 1, complex{0.5, 0.0});
    b.add(0, 0, complex{-0.25, 0.5});
    b.add(-3, -1, complex{0.0, 2.0});
    ab.entries = a.entries;
    for (const auto& e : b.entries) ab.entries.push_back(e);
    complex z{0.7, 1.3};
    complex lhs = synthesize(ab, 1.0, sp, lat, z);
    complex rhs = synthesize(a, 1.0, sp, lat, z) + synthesize(b, 1.0, sp, lat, z);
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::abs(rhs));
  }
  SECTION("norm bound is stable across random draws") {
    detail::Rng rng(2024u);
    MixedScheme coarse;
    coarse.y = PanelScheme{-12, 12, 6, 1};
    coarse.x.nodes = 8;
    coarse.x.octaves = 8;
    double lo = 1e300, hi = 0.0;
    for (int draw = 0; draw < 3; ++draw) {
      CoefficientArray lam;
      for (int n = 0; n < 10; ++n)
        lam.add(static_cast<int>(rng.uniform(-20, 20)), static_cast<int>(rng.uniform(-8, 8)),
                complex{rng.uniform(-1, 1), rng.uniform(-1, 1)});
      double nl = sequence_norm(lam, sp);
      SpaceParams params(2.0, 2.0, 1.0, 1.0);
      auto nf = mixed_norm(wrap_evaluator(synthesize_evaluator(lam, 1.0, sp, lat), 3.0), params,
                           kUnit, coarse);
      double ratio = std::pow(nf.value / nl, sp.q);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK(hi / lo <= 10.0);
  }
}

TEST_CASE("reconstruct") {
  LatticeConfig cfg;
  cfg.delta = 0.3;
  cfg.l_min = -200000;
  cfg.l_max = 200000;
  cfg.j_min = -400;
  cfg.j_max = 400;
  DeltaLattice lat(cfg);
  auto sp = seq_params(lat, 2.0, 2.0, 1.0);
  ReconstructOptions opt;
  opt.grid = GridSpec{8.0, 21, -4, 4, 2};
  opt.y_lo = 0.25;
  opt.y_hi = 8.0;
  opt.level_step = 0.15;
  opt.x_spacing = 0.9;

  SECTION("round trip on representable data") {
    auto dict = reconstruct_dictionary(lat, opt);
    REQUIRE(dict.size() > 50);
    detail::Rng rng(7u);
    CoefficientArray lam0;
    for (int n = 0; n < 20; ++n) {
      auto [l, j] = dict[static_cast<size_t>(rng.uniform() * dict.size())];
      lam0.add(l, j, complex{rng.uniform(-1, 1), rng.uniform(-1, 1)});
    }
    auto F = synthesize_evaluator(lam0, sp.alpha, sp, lat);
    auto rec = reconstruct(F, lat, sp, opt);
    INFO("atoms=" << rec.atoms << " rank=" << rec.rank);
    CHECK(rec.converged);
    CHECK(rec.residual <= 1e-6);
  }
  SECTION("zero data gives zero coefficients") {
    auto rec = reconstruct([](complex) { return complex{}; }, lat, sp, opt);
    CHECK(rec.converged);
    CHECK(rec.coeffs.entries.empty());
    CHECK(rec.residual == 0.0);
  }
  SECTION("smooth target reconstructs to a small residual") {
    auto F = builtin_test_family()[3];  // (z+i)^{-4}
    auto rec = reconstruct(F.evaluator(), lat, sp, opt);
    INFO("atoms=" << rec.atoms << " rank=" << rec.rank << " residual=" << rec.residual);
    CHECK(rec.converged);
    CHECK(rec.residual <= 0.05);
  }
}

TEST_CASE("script_I") {
  LatticeConfig cfg;
  cfg.delta = 0.5;
  cfg.l_min = -2'000'000;
  cfg.l_max = 2'000'000;
  cfg.j_min = -80;
  cfg.j_max = 80;
  DeltaLattice lat(cfg);
  auto sp = seq_params(lat);
  SECTION("zero function") {
    HoloTestFunction zero;
    auto r = script_I(zero, lat, sp);
    CHECK(r.value == 0.0);
  }
  SECTION("finite ratio, converging under footprint growth") {
    auto F = builtin_test_family()[3];
    double v[3];
    int spans[3] = {7, 9, 11};
    for (int i = 0; i < 3; ++i) {
      ScriptIScheme sc;
      sc.j_lo = -spans[i];
      sc.j_hi = spans[i];
      v[i] = script_I(F, lat, sp, sc).value;
    }
    auto r1 = script_I(F, lat, sp);
    INFO("ratio=" << r1.ratio << " values " << v[0] << " " << v[1] << " " << v[2]);
    CHECK(r1.value > 0.0);
    CHECK(std::isfinite(r1.ratio));
    // the added mass halves per extra octave of footprint
    CHECK(std::abs(v[2] - v[1]) <= 0.6 * std::abs(v[1] - v[0]) + 1e-12);
  }
  SECTION("exact q-homogeneity under F -> 2F") {
    auto F = builtin_test_family()[1];
    HoloTestFunction F2 = F;
    for (auto& t : F2.terms) t.coeff *= 2.0;
    auto r1 = script_I(F, lat, sp);
    auto r2 = script_I(F2, lat, sp);
    CHECK(r2.value == Approx(std::pow(2.0, sp.q) * r1.value).epsilon(1e-12));
  }
}

TEST_CASE("derivative characterization") {
  SpaceParams params(2.0, 2.0, 0.0, 0.0);
  SECTION("ratios are finite for (z+i)^{-3}") {
    auto r = derivative_char_check(builtin_test_family()[1], params, kUnit);
    CHECK(r.forward > 0.0);
    CHECK(std::isfinite(r.forward));
    CHECK(r.forward * r.inverse == Approx(1.0).epsilon(1e-12));
  }
  SECTION("dilation invariance at k=0") {
    HoloTestFunction F = builtin_test_family()[1];
    HoloTestFunction Fc;  // F(2z)
    Fc.terms = {{complex{0.125, 0.0}, complex{0.0, 0.5}, 3}};
    auto r1 = derivative_char_check(F, params, kUnit);
    auto r2 = derivative_char_check(Fc, params, kUnit);
    CHECK(r2.forward == Approx(r1.forward).epsilon(1e-6));
  }
  SECTION("constants are excluded by the family's decay requirement") {
    for (const auto& F : builtin_test_family()) CHECK(F.min_order() >= 2.0);
  }
}

TEST_CASE("slice averaging estimate") {
  std::vector<double> ys;
  for (int j = -4; j <= 4; ++j) ys.push_back(std::exp2(j));
  SECTION("finite worst ratio for (z+i)^{-3}") {
    auto r = slice_average_check(builtin_test_family()[1], 0.5, 2.0, 2.0, ys);
    INFO("worst=" << r.worst_ratio);
    CHECK(r.worst_ratio > 0.0);
    CHECK(r.worst_ratio < 50.0);
  }
  SECTION("ratio is invariant under F -> 2F") {
    auto F = builtin_test_family()[2];
    HoloTestFunction F2 = F;
    for (auto& t : F2.terms) t.coeff *= 2.0;
    auto r1 = slice_average_check(F, 0.3, 2.0, 2.0, ys);
    auto r2 = slice_average_check(F2, 0.3, 2.0, 2.0, ys);
    CHECK(r2.worst_ratio == Approx(r1.worst_ratio).epsilon(1e-12));
  }
  SECTION("zero function reports the conventional pass") {
    HoloTestFunction zero;
    auto r = slice_average_check(zero, 0.5, 2.0, 2.0, ys);
    CHECK(r.zero);
  }
}
