#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "uhplab/types.hpp"
#include "uhplab/weights.hpp"

// Dyadic-panel quadrature on (0,inf): Gauss-Legendre nodes on geometric
// panels, power-envelope tail corrections, and the weighted interval-mass /
// Forelli-Rudin integrals with their two-sided equivalence ratios.

namespace uhplab {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1,1]
  std::vector<double> w;
};

namespace detail {

inline GaussRule make_gauss(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n with the usual Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[n - 1 - i] = x;
    r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

inline const GaussRule& gauss_rule(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
  return it->second;
}

template <class F>
bool gauss_panel(F&& f, double a, double b, const GaussRule& rule, double& acc, double& bad_at) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (size_t i = 0; i < rule.x.size(); ++i) {
    double y = mid + half * rule.x[i];
    double v = f(y);
    if (!std::isfinite(v)) {
      bad_at = y;
      return false;
    }
    s += rule.w[i] * v;
  }
  acc += half * s;
  return true;
}

// Composite rule over [a, b] on geometric panels (panel count from the
// octave span).  Returns NaN-poisoned result through ok on bad integrands.
template <class F>
double integrate_geometric(F&& f, double a, double b, int nodes, int panels_per_octave,
                           bool& ok, double& bad_at) {
  ok = true;
  if (!(a > 0.0) || !(b > a)) return 0.0;
  int npan = std::max(1, static_cast<int>(std::ceil(std::log2(b / a) * panels_per_octave)));
  const GaussRule& rule = gauss_rule(nodes);
  double ratio = std::pow(b / a, 1.0 / npan);
  double acc = 0.0;
  double lo = a;
  for (int i = 0; i < npan; ++i) {
    double hi = (i == npan - 1) ? b : lo * ratio;
    if (!gauss_panel(f, lo, hi, rule, acc, bad_at)) {
      ok = false;
      return std::numeric_limits<double>::quiet_NaN();
    }
    lo = hi;
  }
  return acc;
}

}  // namespace detail

struct PanelScheme {
  int j_lo = -20;
  int j_hi = 20;
  int nodes_per_panel = 16;
  int panels_per_octave = 4;

  void validate() const {
    if (j_lo >= j_hi) throw std::domain_error("PanelScheme: j_lo must be < j_hi");
    if (nodes_per_panel < 2 || panels_per_octave < 1)
      throw std::domain_error("PanelScheme: need nodes >= 2 and panels >= 1");
  }
  double lo() const { return std::exp2(j_lo); }
  double hi() const { return std::exp2(j_hi); }
};

// Known power behavior of the integrand at the domain ends:
// f ~ C y^{power_at_zero} near 0 and f ~ C y^{-power_at_inf} near infinity.
struct DecayEnvelope {
  std::optional<double> power_at_zero;
  std::optional<double> power_at_inf;
};

struct Integral {
  double value = 0.0;           // panel sum plus tail corrections
  double error_estimate = 0.0;  // node-refinement difference
  double tail_low = 0.0;
  double tail_high = 0.0;
  bool ok = true;
  std::string note;
};

template <class F>
Integral integrate_halfline(F&& f, const PanelScheme& s = {}, const DecayEnvelope& env = {}) {
  s.validate();
  Integral out;
  double bad = 0.0;
  bool ok = true;
  double coarse = detail::integrate_geometric(f, s.lo(), s.hi(), s.nodes_per_panel,
                                              s.panels_per_octave, ok, bad);
  if (!ok) {
    out.ok = false;
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.note = "non-finite integrand at y=" + std::to_string(bad);
    return out;
  }
  double fine = detail::integrate_geometric(f, s.lo(), s.hi(), 2 * s.nodes_per_panel,
                                            s.panels_per_octave, ok, bad);
  if (!ok) {
    out.ok = false;
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.note = "non-finite integrand at y=" + std::to_string(bad);
    return out;
  }
  out.value = fine;
  out.error_estimate = std::abs(fine - coarse);

  if (env.power_at_zero) {
    double a0 = *env.power_at_zero;
    if (a0 > -1.0) {
      out.tail_low = f(s.lo()) * s.lo() / (1.0 + a0);
    } else {
      out.ok = false;
      out.note = "divergent envelope at 0";
    }
  }
  if (env.power_at_inf) {
    double b0 = *env.power_at_inf;
    if (b0 > 1.0) {
      out.tail_high = f(s.hi()) * s.hi() / (b0 - 1.0);
    } else {
      out.ok = false;
      out.note = "divergent envelope at infinity";
    }
  }
  out.value += out.tail_low + out.tail_high;
  return out;
}

// --- interval mass: int_0^t omega^k(y) y^beta dy and its ratio against
//     omega^k(t) t^{1+beta} (the two-sided equivalence of the lemmas).

struct MassResult {
  double mass = 0.0;
  double ratio = 0.0;
  double tail = 0.0;
  double error_estimate = 0.0;
};

inline MassResult interval_mass(const WeightSpec& w, double beta, double t,
                                const PanelScheme& s = {}) {
  if (!(beta > -1.0)) throw std::domain_error("interval_mass: beta must exceed -1 (divergent at 0)");
  if (!(t > 0.0)) throw std::domain_error("interval_mass: t must be positive");
  int octaves = std::max(60, s.j_hi - s.j_lo);
  double a = t * std::exp2(-octaves);
  auto g = [&](double y) { return weight_eval(w, y) * std::pow(y, beta); };
  bool ok = true;
  double bad = 0.0;
  double coarse = detail::integrate_geometric(g, a, t, s.nodes_per_panel, s.panels_per_octave, ok, bad);
  double fine = detail::integrate_geometric(g, a, t, 2 * s.nodes_per_panel, s.panels_per_octave, ok, bad);
  MassResult r;
  // below a the weight is slowly varying, so the power-integral model is
  // accurate to O(k / ((1+beta) log(t/a)))
  r.tail = weight_eval(w, a) * std::pow(a, 1.0 + beta) / (1.0 + beta);
  r.mass = fine + r.tail;
  r.error_estimate = std::abs(fine - coarse);
  r.ratio = r.mass / (weight_eval(w, t) * std::pow(t, 1.0 + beta));
  return r;
}

// --- Forelli-Rudin integral: int_0^inf omega^k(y) y^beta / (x+y)^{1+a+beta} dy
//     with ratio against omega^k(x) x^{-a}.

struct FrResult {
  double value = 0.0;
  double ratio = 0.0;
  double tail_low = 0.0;
  double tail_high = 0.0;
  double error_estimate = 0.0;
};

inline FrResult forelli_rudin(const WeightSpec& w, double a_gap, double beta, double x,
                              const PanelScheme& s = {}) {
  if (!(a_gap > 0.0)) throw std::domain_error("forelli_rudin: homogeneity gap must be positive");
  if (!(beta > -1.0)) throw std::domain_error("forelli_rudin: beta must exceed -1");
  if (!(x > 0.0)) throw std::domain_error("forelli_rudin: x must be positive");
  int octaves = std::max(60, (s.j_hi - s.j_lo) / 2);
  double lo = x * std::exp2(-octaves);
  double hi = x * std::exp2(octaves);
  double expo = 1.0 + a_gap + beta;
  auto g = [&](double y) { return weight_eval(w, y) * std::pow(y, beta) * std::pow(x + y, -expo); };
  bool ok = true;
  double bad = 0.0;
  double coarse = detail::integrate_geometric(g, lo, hi, s.nodes_per_panel, s.panels_per_octave, ok, bad);
  double fine = detail::integrate_geometric(g, lo, hi, 2 * s.nodes_per_panel, s.panels_per_octave, ok, bad);
  FrResult r;
  r.tail_low = weight_eval(w, lo) * std::pow(lo, 1.0 + beta) / ((1.0 + beta) * std::pow(x, expo));
  r.tail_high = weight_eval(w, hi) * std::pow(hi, -a_gap) / a_gap;
  r.value = fine + r.tail_low + r.tail_high;
  r.error_estimate = std::abs(fine - coarse);
  r.ratio = r.value / (weight_eval(w, x) * std::pow(x, -a_gap));
  return r;
}

// --- divergence probe: values of a truncated integral on nested domains;
//     growth >= 1.5x per step (default) flags divergence, and the estimated
//     per-octave growth exponent supports sharper thresholds.

struct DivergenceProbe {
  std::vector<double> values;
  double growth_ratio = 0.0;     // last/previous
  double growth_exponent = 0.0;  // log2(last/previous) / octave step
  bool divergent = false;
};

inline DivergenceProbe classify_growth(const std::vector<double>& values, double octave_step,
                                       double ratio_threshold = 1.5,
                                       std::optional<double> exponent_threshold = {}) {
  DivergenceProbe p;
  p.values = values;
  if (values.size() < 2) return p;
  double a = values[values.size() - 2], b = values.back();
  p.growth_ratio = a > 0.0 ? b / a : std::numeric_limits<double>::infinity();
  p.growth_exponent = octave_step > 0.0 ? std::log2(std::max(p.growth_ratio, 1e-300)) / octave_step : 0.0;
  p.divergent = exponent_threshold ? p.growth_exponent >= *exponent_threshold
                                   : p.growth_ratio >= ratio_threshold;
  return p;
}

}  // namespace uhplab
