#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "uhplab/hilbert.hpp"
#include "uhplab/special.hpp"

using namespace uhplab;
using Catch::Approx;

namespace {

const WeightSpec kUnit{0, 0, 0.0, GrowthFunction::power(1.0)};
const WeightSpec kLog{1, 1, -1.0, GrowthFunction::power(1.0)};

// mu-weighted pairing <u, v> = int u v omega^k x^alpha dx over [lo, hi]
template <class U, class V>
double pairing(U&& u, V&& v, const WeightSpec& spec, double alpha, double lo, double hi) {
  bool ok = true;
  double bad = 0.0;
  auto g = [&](double x) { return u(x) * v(x) * weight_eval(spec, x) * std::pow(x, alpha); };
  return detail::integrate_geometric(g, lo, hi, 24, 4, ok, bad);
}

}  // namespace

TEST_CASE("apply_hilbert") {
  SECTION("indicator of [1,2] at beta=0, x=1 gives log(3/2)") {
    auto f = HalfLineFunction::indicator(1.0, 2.0);
    auto r = apply_hilbert(f, 0.0, 1.0);
    CHECK(r.ok);
    CHECK(r.value == Approx(std::log(1.5)).epsilon(1e-12));
  }
  SECTION("zero function") {
    HalfLineFunction z;
    z.f = [](double) { return 0.0; };
    CHECK(apply_hilbert(z, 0.5, 2.0).value == 0.0);
  }
  SECTION("H_beta of the indicator is comparable to (x+1)^{-1-beta}") {
    auto f = HalfLineFunction::indicator(1.0, 2.0);
    for (double beta : {-0.5, 0.0, 1.0}) {
      double lo = 1e300, hi = 0.0;
      for (int j = -8; j <= 8; ++j) {
        double x = std::exp2(j);
        double ratio = apply_hilbert(f, beta, x).value * std::pow(x + 1.0, 1.0 + beta);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      INFO("beta=" << beta);
      CHECK(hi / lo <= 8.0);
    }
  }
  SECTION("positivity") {
    auto f = HalfLineFunction::bump(3.0, 1.0);
    for (double x : {0.1, 1.0, 10.0}) CHECK(apply_hilbert(f, 0.5, x).value >= 0.0);
  }
  SECTION("kernel homogeneity of degree -1") {
    // H_beta(f(c.))(x) = (H_beta f)(cx)
    auto f = HalfLineFunction::bump(2.0, 0.5);
    double c = 2.0;
    HalfLineFunction fc;
    fc.f = [&f, c](double y) { return f(c * y); };
    fc.support_lo = f.support_lo / c;
    fc.support_hi = f.support_hi / c;
    for (double x : {0.5, 1.0, 4.0}) {
      double lhs = apply_hilbert(fc, 0.7, x).value;
      double rhs = apply_hilbert(f, 0.7, c * x).value;
      CHECK(lhs == Approx(rhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("apply_adjoint") {
  SpaceParams params(2.0, 2.0, 0.5, 0.75);
  SECTION("duality <Hf,g> = <f,H*g> for compact bumps") {
    auto f = HalfLineFunction::bump(1.5, 0.5);
    auto g = HalfLineFunction::bump(4.0, 1.0);
    for (const WeightSpec& spec : {kUnit, kLog}) {
      auto hf = [&](double x) { return apply_hilbert(f, params.beta, x).value; };
      double lhs = pairing(hf, [&](double x) { return g(x); }, spec, params.alpha,
                           g.support_lo, g.support_hi);
      auto hg = [&](double y) { return apply_adjoint(g, params, spec, y).value; };
      double rhs = pairing([&](double y) { return f(y); }, hg, spec, params.alpha,
                           f.support_lo, f.support_hi);
      INFO(spec.name());
      CHECK(lhs == Approx(rhs).epsilon(1e-8));
    }
  }
  SECTION("adjoint of the indicator is comparable to its closed-form shape") {
    auto f = HalfLineFunction::indicator(1.0, 2.0);
    double lo = 1e300, hi = 0.0;
    for (int j = -8; j <= 8; ++j) {
      double x = std::exp2(j);
      double v = apply_adjoint(f, params, kLog, x).value;
      double shape = std::pow(x, params.beta - params.alpha) *
                     std::pow(x + 1.0, -1.0 - params.beta) / weight_eval(kLog, x);
      double ratio = v / shape;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK(hi / lo <= 8.0);
  }
  SECTION("k=0, alpha=beta: the operator is self-adjoint") {
    SpaceParams sym(2.0, 2.0, 0.5, 0.5);
    auto f = HalfLineFunction::bump(2.0, 1.0);
    for (double x : {0.5, 2.0, 8.0}) {
      double a = apply_hilbert(f, sym.beta, x).value;
      double b = apply_adjoint(f, sym, kUnit, x).value;
      CHECK(a == Approx(b).epsilon(1e-10));
    }
  }
}

TEST_CASE("schur_verify") {
  std::vector<double> grid;
  for (int j = -8; j <= 8; ++j) grid.push_back(std::exp2(j));
  SECTION("k=0, p=2, alpha=beta=0 reduces to Beta(1/2,1/2) = pi") {
    SpaceParams params(2.0, 2.0, 0.0, 0.0);
    auto rep = schur_verify(params, kUnit, {0.25, 1.0, 4.0});
    CHECK(rep.predicate);
    for (const auto& row : rep.rows) {
      CHECK(row.ratio1 == Approx(std::numbers::pi).epsilon(0.01));
      CHECK(row.ratio2 == Approx(std::numbers::pi).epsilon(0.01));
    }
  }
  SECTION("weighted spec keeps a finite sup ratio") {
    SpaceParams params(2.0, 2.0, 0.0, 0.0);
    auto rep = schur_verify(params, kLog, grid);
    CHECK(rep.predicate);
    CHECK(rep.sup_ratio1 < 20.0);
    CHECK(rep.sup_ratio2 < 20.0);
  }
  SECTION("violated threshold shows truncation-driven growth of the sup") {
    SpaceParams params(2.0, 2.0, 1.5, 0.0);  // alpha+1 = 2.5 > p(beta+1) = 2
    CHECK_FALSE(params.alpha + 1.0 < params.p * (params.beta + 1.0));
    PanelScheme narrow{-12, 12, 16, 4};
    PanelScheme wide{-20, 20, 16, 4};
    auto r1 = schur_verify(params, kUnit, grid, narrow);
    auto r2 = schur_verify(params, kUnit, grid, wide);
    CHECK(r2.sup_ratio1 >= 2.0 * r1.sup_ratio1);
  }
  SECTION("p=1 is not a Schur path") {
    SpaceParams params(1.0, 1.0, 0.0, 0.5);
    CHECK_THROWS_AS(schur_verify(params, kUnit, grid), std::domain_error);
  }
}

TEST_CASE("norm_estimate") {
  SECTION("classical Hilbert-kernel norm pi (reduced size)") {
    SpaceParams params(2.0, 2.0, 0.0, 0.0);
    auto op = discretize_hilbert(params, kUnit, 24);
    for (double e : op.a) CHECK(e >= 0.0);
    auto est = norm_estimate(params, op);
    CHECK(est.converged);
    CHECK(est.value <= std::numbers::pi);
    CHECK(est.value >= 0.90 * std::numbers::pi);
  }
  SECTION("beta=1 gives B(3/2,1/2) = pi/2") {
    SpaceParams params(2.0, 2.0, 0.0, 1.0);
    auto op = discretize_hilbert(params, kUnit, 24);
    auto est = norm_estimate(params, op);
    CHECK(est.value <= 0.5 * std::numbers::pi * 1.0001);
    CHECK(est.value >= 0.45 * std::numbers::pi);
  }
  SECTION("p=3 ascent approaches B(2/3,1/3)") {
    SpaceParams params(3.0, 3.0, 0.0, 0.0);
    auto op = discretize_hilbert(params, kUnit, 24);
    auto est = norm_estimate(params, op);
    double ref = beta_fn(2.0 / 3.0, 1.0 / 3.0);
    CHECK(est.value <= ref * 1.0001);
    CHECK(est.value >= 0.85 * ref);
  }
  SECTION("p=1 column-sum norm is 1/beta for alpha=0, k=0") {
    SpaceParams params(1.0, 1.0, 0.0, 0.5);
    auto op = discretize_hilbert(params, kUnit, 24);
    auto est = norm_estimate(params, op);
    CHECK(est.converged);
    CHECK(est.value == Approx(2.0).epsilon(0.01));
  }
  SECTION("weighted norm is finite and the trend converges in the bounded regime") {
    SpaceParams params(2.0, 2.0, 0.0, 0.0);
    auto tr = norm_trend(params, kLog);
    CHECK(tr.trend == Trend::converged);
    CHECK(std::is_sorted(tr.norms.begin(), tr.norms.end()));
  }
  SECTION("unbounded regime shows a growing trend") {
    SpaceParams params(2.0, 2.0, 0.0, -0.6);  // margin -0.2
    auto tr = norm_trend(params, kUnit);
    CHECK(tr.trend != Trend::converged);
    CHECK(std::is_sorted(tr.norms.begin(), tr.norms.end()));
  }
}

TEST_CASE("threshold_classify") {
  SECTION("p=2, alpha=0 over a small beta grid") {
    auto rows = threshold_classify(2.0, 0.0, kUnit, {-0.6, 0.0, 1.0});
    CHECK(rows[0].verdict == "unbounded");
    CHECK(rows[1].verdict == "bounded");
    CHECK(rows[2].verdict == "bounded");
  }
  SECTION("p=1 necessity (beta > alpha), with the critical band honored") {
    auto rows = threshold_classify(1.0, 0.0, kUnit, {-0.2, 0.0, 0.5});
    CHECK(rows[0].verdict == "unbounded");
    CHECK(rows[1].verdict == "near-critical");  // margin is exactly zero
    CHECK(rows[2].verdict == "bounded");
  }
  SECTION("classification is independent of the weight") {
    std::vector<double> grid{-0.6, 0.0, 0.5};
    auto ref = threshold_classify(2.0, 0.0, kUnit, grid);
    for (double k : {-1.0, 1.0, -2.0, 2.0}) {
      WeightSpec w{1, 1, k, GrowthFunction::power(1.0)};
      auto rows = threshold_classify(2.0, 0.0, w, grid);
      for (size_t i = 0; i < grid.size(); ++i) {
        INFO("k=" << k << " beta=" << grid[i]);
        CHECK(rows[i].verdict == ref[i].verdict);
      }
    }
  }
}
