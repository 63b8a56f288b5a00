#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "uhplab/quadrature.hpp"
#include "uhplab/types.hpp"
#include "uhplab/weights.hpp"

// The Hilbert-type operator H_beta f(x) = int_0^inf f(y) y^beta (x+y)^{-1-beta} dy,
// its adjoint with respect to omega^k(y) y^alpha dy, the Schur test with
// phi(t) = t^{-(alpha+1)/(p p')}, operator-norm estimation on a discretized
// weighted grid, and boundedness classification across parameters.

namespace uhplab {

struct HalfLineFunction {
  std::function<double(double)> f;
  double support_lo = 0.0;
  double support_hi = std::numeric_limits<double>::infinity();
  std::optional<double> power_at_zero;  // f ~ C y^{a} near 0 (within support)
  std::optional<double> power_at_inf;   // f ~ C y^{-b} near infinity

  double operator()(double y) const {
    if (y < support_lo || y > support_hi) return 0.0;
    return f(y);
  }

  static HalfLineFunction indicator(double lo, double hi) {
    HalfLineFunction h;
    h.f = [](double) { return 1.0; };
    h.support_lo = lo;
    h.support_hi = hi;
    return h;
  }

  // smooth compactly supported bump, value 1 at the center
  static HalfLineFunction bump(double center, double halfwidth) {
    HalfLineFunction h;
    h.f = [center, halfwidth](double y) {
      double u = (y - center) / halfwidth;
      double d = 1.0 - u * u;
      return d > 0.0 ? std::exp(1.0 - 1.0 / d) : 0.0;
    };
    h.support_lo = center - halfwidth;
    h.support_hi = center + halfwidth;
    return h;
  }

  static HalfLineFunction power_decay(double a, double b) {
    HalfLineFunction h;
    h.f = [a, b](double y) { return std::pow(y, a) / std::pow(1.0 + y, a + b); };
    h.power_at_zero = a;
    h.power_at_inf = b;
    return h;
  }
};

inline Integral apply_hilbert(const HalfLineFunction& f, double beta, double x,
                              const PanelScheme& s = {}) {
  if (!(beta > -1.0)) throw std::domain_error("apply_hilbert: beta must exceed -1");
  if (!(x > 0.0)) throw std::domain_error("apply_hilbert: x must be positive");
  Integral out;
  int D = std::max(20, (s.j_hi - s.j_lo) / 2);
  double lo = std::max(f.support_lo, x * std::exp2(-D));
  double hi = std::min(f.support_hi, x * std::exp2(D));
  auto g = [&](double y) { return f(y) * std::pow(y, beta) * std::pow(x + y, -1.0 - beta); };
  if (hi > lo) {
    bool ok = true;
    double bad = 0.0;
    double coarse = detail::integrate_geometric(g, lo, hi, s.nodes_per_panel, s.panels_per_octave, ok, bad);
    double fine = detail::integrate_geometric(g, lo, hi, 2 * s.nodes_per_panel, s.panels_per_octave, ok, bad);
    if (!ok) {
      out.ok = false;
      out.note = "non-finite integrand at y=" + std::to_string(bad);
      out.value = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
    out.value = fine;
    out.error_estimate = std::abs(fine - coarse);
  }
  if (lo > f.support_lo) {  // truncated inside the support near 0
    double a = f.power_at_zero.value_or(0.0);
    if (a + beta + 1.0 <= 0.0) {
      out.ok = false;
      out.note = "divergent envelope at 0";
      return out;
    }
    out.tail_low = f(lo) * std::pow(lo, 1.0 + beta) /
                   ((a + beta + 1.0) * std::pow(x + lo, 1.0 + beta));
  }
  if (hi < f.support_hi) {
    if (!f.power_at_inf || *f.power_at_inf <= 0.0) {
      out.ok = false;
      out.note = "divergent envelope at infinity";
      return out;
    }
    double b = *f.power_at_inf;
    out.tail_high = f(hi) * std::pow(hi / (x + hi), 1.0 + beta) / b;
  }
  out.value += out.tail_low + out.tail_high;
  return out;
}

// Adjoint with respect to <u,v> = int u v omega^k y^alpha dy (k signed in spec):
//   H_beta^* g(x) = omega^{-k}(x) x^{beta-alpha}
//                     int_0^inf g(y) omega^k(y) y^alpha (x+y)^{-1-beta} dy.
inline Integral apply_adjoint(const HalfLineFunction& f, const SpaceParams& params,
                              const WeightSpec& spec, double x, const PanelScheme& s = {}) {
  params.validate();
  if (!(x > 0.0)) throw std::domain_error("apply_adjoint: x must be positive");
  const double alpha = params.alpha, beta = params.beta;
  Integral out;
  int D = std::max(20, (s.j_hi - s.j_lo) / 2);
  double lo = std::max(f.support_lo, x * std::exp2(-D));
  double hi = std::min(f.support_hi, x * std::exp2(D));
  auto g = [&](double y) {
    return f(y) * weight_eval(spec, y) * std::pow(y, alpha) * std::pow(x + y, -1.0 - beta);
  };
  if (hi > lo) {
    bool ok = true;
    double bad = 0.0;
    double coarse = detail::integrate_geometric(g, lo, hi, s.nodes_per_panel, s.panels_per_octave, ok, bad);
    double fine = detail::integrate_geometric(g, lo, hi, 2 * s.nodes_per_panel, s.panels_per_octave, ok, bad);
    if (!ok) {
      out.ok = false;
      out.note = "non-finite integrand at y=" + std::to_string(bad);
      return out;
    }
    out.value = fine;
    out.error_estimate = std::abs(fine - coarse);
  }
  if (lo > f.support_lo) {
    double a = f.power_at_zero.value_or(0.0);
    if (a + alpha + 1.0 <= 0.0) {
      out.ok = false;
      out.note = "divergent envelope at 0";
      return out;
    }
    out.tail_low = g(lo) * lo / (a + alpha + 1.0);
  }
  if (hi < f.support_hi) {
    double b = f.power_at_inf.value_or(0.0);
    if (b + 1.0 + beta - alpha <= 1.0) {
      out.ok = false;
      out.note = "divergent envelope at infinity";
      return out;
    }
    out.tail_high = g(hi) * hi / (b + beta - alpha);
  }
  double pref = weight_eval(spec, x);
  double scale = std::pow(x, beta - alpha) / pref;  // omega^{-k}(x) = 1/omega^k(x)
  out.value = (out.value + out.tail_low + out.tail_high) * scale;
  out.tail_low *= scale;
  out.tail_high *= scale;
  out.error_estimate *= scale;
  return out;
}

// --- Schur test ------------------------------------------------------------

struct SchurRow {
  double t = 0.0;       // the grid point (x for the first integral, y for the second)
  double ratio1 = 0.0;  // int K(x,y) phi^{p'}(y) dmu(y) / phi^{p'}(x)
  double ratio2 = 0.0;  // int K(x,y) phi^{p}(x) dmu(x) / phi^{p}(y)
};

struct SchurReport {
  std::vector<SchurRow> rows;
  double sup_ratio1 = 0.0;
  double sup_ratio2 = 0.0;
  bool predicate = false;  // alpha + 1 < p(beta + 1)
};

inline SchurReport schur_verify(const SpaceParams& params, const WeightSpec& spec,
                                const std::vector<double>& grid, const PanelScheme& s = {}) {
  params.validate();
  if (params.p <= 1.0)
    throw std::domain_error("schur_verify: the Schur test is the p > 1 path");
  const double p = params.p, pc = params.p_conj();
  const double alpha = params.alpha, beta = params.beta;
  auto phi = [&](double t) { return std::pow(t, -(alpha + 1.0) / (p * pc)); };
  // kernel of H_beta with respect to dmu = omega^k y^alpha dy
  auto kern = [&](double x, double y) {
    return std::pow(y, beta - alpha) / (weight_eval(spec, y) * std::pow(x + y, 1.0 + beta));
  };
  auto mu = [&](double t) { return weight_eval(spec, t) * std::pow(t, alpha); };

  SchurReport rep;
  rep.predicate = alpha + 1.0 < p * (beta + 1.0);
  bool ok = true;
  double bad = 0.0;
  for (double t : grid) {
    SchurRow row;
    row.t = t;
    auto g1 = [&](double y) { return kern(t, y) * std::pow(phi(y), pc) * mu(y); };
    double i1 = detail::integrate_geometric(g1, s.lo(), s.hi(), s.nodes_per_panel,
                                            s.panels_per_octave, ok, bad);
    row.ratio1 = i1 / std::pow(phi(t), pc);
    auto g2 = [&](double x) { return kern(x, t) * std::pow(phi(x), p) * mu(x); };
    double i2 = detail::integrate_geometric(g2, s.lo(), s.hi(), s.nodes_per_panel,
                                            s.panels_per_octave, ok, bad);
    row.ratio2 = i2 / std::pow(phi(t), p);
    rep.sup_ratio1 = std::max(rep.sup_ratio1, row.ratio1);
    rep.sup_ratio2 = std::max(rep.sup_ratio2, row.ratio2);
    rep.rows.push_back(row);
  }
  return rep;
}

// --- discretized operator and norm estimation ------------------------------

struct DiscreteOperator {
  std::vector<double> nodes;    // geometric Gauss grid on [2^-J, 2^J]
  std::vector<double> weights;  // quadrature weights folding omega^k y^alpha
  std::vector<double> a;        // row-major n x n, nonnegative
  int n = 0;

  double col_abs_sum(int j) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[static_cast<size_t>(i) * n + j];
    return s;
  }
};

inline DiscreteOperator discretize_hilbert(const SpaceParams& params, const WeightSpec& spec,
                                           int J, int panels_per_octave = 2,
                                           int nodes_per_panel = 8) {
  params.validate();
  DiscreteOperator op;
  const GaussRule& rule = detail::gauss_rule(nodes_per_panel);
  for (int oct = -J; oct < J; ++oct) {
    double a0 = std::exp2(oct);
    double r = std::exp2(1.0 / panels_per_octave);
    double lo = a0;
    for (int pnl = 0; pnl < panels_per_octave; ++pnl) {
      double hi = lo * r;
      double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (size_t i = 0; i < rule.x.size(); ++i) {
        double y = mid + half * rule.x[i];
        op.nodes.push_back(y);
        op.weights.push_back(half * rule.w[i] * weight_eval(spec, y) * std::pow(y, params.alpha));
      }
      lo = hi;
    }
  }
  op.n = static_cast<int>(op.nodes.size());
  const double p = params.p;
  const double ip = 1.0 / p, ipc = 1.0 - ip;
  std::vector<double> row_f(op.n), col_f(op.n);
  for (int i = 0; i < op.n; ++i) {
    row_f[i] = std::pow(op.weights[i], ip);
    double y = op.nodes[i];
    col_f[i] = std::pow(op.weights[i], ipc) * std::pow(y, params.beta - params.alpha) /
               weight_eval(spec, y);
  }
  op.a.resize(static_cast<size_t>(op.n) * op.n);
  detail::parallel_for(op.n, [&](int i) {
    double x = op.nodes[i];
    double* row = op.a.data() + static_cast<size_t>(i) * op.n;
    for (int j = 0; j < op.n; ++j)
      row[j] = row_f[i] * col_f[j] * std::pow(x + op.nodes[j], -1.0 - params.beta);
  });
  return op;
}

struct NormEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

inline void matvec(const DiscreteOperator& op, const std::vector<double>& x,
                   std::vector<double>& y, bool transpose) {
  y.assign(op.n, 0.0);
  if (!transpose) {
    for (int i = 0; i < op.n; ++i) {
      const double* row = op.a.data() + static_cast<size_t>(i) * op.n;
      double s = 0.0;
      for (int j = 0; j < op.n; ++j) s += row[j] * x[j];
      y[i] = s;
    }
  } else {
    for (int i = 0; i < op.n; ++i) {
      const double* row = op.a.data() + static_cast<size_t>(i) * op.n;
      double xi = x[i];
      for (int j = 0; j < op.n; ++j) y[j] += row[j] * xi;
    }
  }
}

inline double lp_norm(const std::vector<double>& v, double p) {
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace detail

// Largest-singular-value style estimate of the folded operator on l^p:
// plain power iteration on A^T A when p = 2, the nonlinear p-norm ascent
// otherwise, exact column sums when p = 1.  Positive kernels make the
// ascent a lower-bound estimator that in practice attains the norm.
inline NormEstimate norm_estimate(const SpaceParams& params, const DiscreteOperator& op,
                                  double tol = 1e-6, int cap = 0) {
  NormEstimate est;
  const double p = params.p;
  if (op.n == 0) return est;
  if (p == 1.0) {
    double best = 0.0;
    for (int j = 0; j < op.n; ++j) best = std::max(best, op.col_abs_sum(j));
    est.value = best;
    est.converged = true;
    return est;
  }
  if (cap <= 0) cap = p == 2.0 ? 600 : 200;
  const double pc = p / (p - 1.0);
  std::vector<double> x(op.n, 1.0), y, u(op.n), z;
  double nx = detail::lp_norm(x, p);
  for (auto& v : x) v /= nx;
  double prev = 0.0;
  for (int it = 1; it <= cap; ++it) {
    detail::matvec(op, x, y, false);
    double ny = detail::lp_norm(y, p);
    est.value = ny;
    est.iterations = it;
    if (ny == 0.0) {
      est.converged = true;
      return est;
    }
    if (it > 1 && std::abs(ny - prev) <= tol * ny) {
      est.converged = true;
      return est;
    }
    prev = ny;
    for (int i = 0; i < op.n; ++i) {
      double t = y[i] / ny;
      u[i] = std::pow(std::abs(t), p - 1.0) * (t < 0.0 ? -1.0 : 1.0);
    }
    detail::matvec(op, u, z, true);
    for (int i = 0; i < op.n; ++i)
      x[i] = std::pow(std::abs(z[i]), pc - 1.0) * (z[i] < 0.0 ? -1.0 : 1.0);
    nx = detail::lp_norm(x, p);
    for (auto& v : x) v /= nx;
  }
  return est;  // converged stays false: flagged estimate
}

// --- threshold classification ----------------------------------------------

enum class Trend { converged, plateau, growing };

inline const char* trend_name(Trend t) {
  switch (t) {
    case Trend::converged: return "converged";
    case Trend::plateau: return "plateau";
    case Trend::growing: return "growing";
  }
  return "?";
}

struct TrendReport {
  std::vector<double> norms;  // at increasing domain sizes
  double diff_ratio = 0.0;
  Trend trend = Trend::plateau;
};

inline TrendReport norm_trend(const SpaceParams& params, const WeightSpec& spec,
                              const std::vector<int>& J_list = {12, 24, 36}) {
  TrendReport rep;
  for (int J : J_list) {
    auto op = discretize_hilbert(params, spec, J, 2, 6);
    rep.norms.push_back(norm_estimate(params, op, 1e-5, 150).value);
  }
  size_t m = rep.norms.size();
  if (m >= 3) {
    double d1 = rep.norms[m - 2] - rep.norms[m - 3];
    double d2 = rep.norms[m - 1] - rep.norms[m - 2];
    rep.diff_ratio = d1 > 0.0 ? d2 / d1 : 0.0;
    double rel_change = std::abs(d2) / std::max(rep.norms[m - 1], 1e-300);
    if (rel_change <= 1e-5 || rep.diff_ratio <= 0.9)
      rep.trend = Trend::converged;
    else if (rep.diff_ratio >= 1.15)
      rep.trend = Trend::growing;
    else
      rep.trend = Trend::plateau;
  }
  return rep;
}

// Necessity witness from testing H_beta on the indicator of [1,2]:
// W(J) = int_1^{2^J} omega^k(x) x^alpha (1+x)^{-(1+beta)p} dx diverges
// (growth exponent ~ alpha+1 - p(beta+1)) exactly when boundedness fails.
struct WitnessReport {
  std::array<double, 3> values{};  // at J = 40, 80, 120
  double exponent = 0.0;
  bool divergent = false;
};

inline WitnessReport hilbert_witness(double p, double alpha, double beta, const WeightSpec& spec) {
  WitnessReport rep;
  auto g = [&](double x) {
    return weight_eval(spec, x) * std::pow(x, alpha) * std::pow(1.0 + x, -(1.0 + beta) * p);
  };
  bool ok = true;
  double bad = 0.0;
  double acc = 0.0;
  const int js[3] = {40, 80, 120};
  int lo = 0;
  for (int wi = 0; wi < 3; ++wi) {
    acc += detail::integrate_geometric(g, std::exp2(lo), std::exp2(js[wi]), 8, 2, ok, bad);
    rep.values[wi] = acc;
    lo = js[wi];
  }
  rep.exponent = std::log2(rep.values[2] / rep.values[1]) / 40.0;
  rep.divergent = rep.exponent >= 0.025;
  return rep;
}

struct ThresholdRow {
  double beta = 0.0;
  double margin = 0.0;  // p(beta+1) - (alpha+1); negative means unbounded
  std::string verdict;  // bounded | unbounded | near-critical
  double witness_exponent = 0.0;
  bool witness_divergent = false;
  Trend trend = Trend::plateau;
  double norm_last = 0.0;
  bool signals_conflict = false;
};

// Boundedness is never provable by finite computation; the verdict couples
// the divergent-witness integral with the truncated-norm trend (unbounded
// requires a divergent witness and a non-converged norm sequence).
inline std::vector<ThresholdRow> threshold_classify(double p, double alpha, const WeightSpec& spec,
                                                    const std::vector<double>& beta_grid,
                                                    double critical_band = 0.05) {
  if (!(p >= 1.0) || !(alpha > -1.0)) throw std::domain_error("threshold_classify: bad parameters");
  std::vector<ThresholdRow> rows(beta_grid.size());
  detail::parallel_for(static_cast<int>(beta_grid.size()), [&](int i) {
    double beta = beta_grid[i];
    ThresholdRow row;
    row.beta = beta;
    row.margin = p * (beta + 1.0) - (alpha + 1.0);
    auto wit = hilbert_witness(p, alpha, beta, spec);
    row.witness_exponent = wit.exponent;
    row.witness_divergent = wit.divergent;
    SpaceParams params(p, p, alpha, beta);
    auto tr = norm_trend(params, spec);
    row.trend = tr.trend;
    row.norm_last = tr.norms.empty() ? 0.0 : tr.norms.back();
    if (std::abs(row.margin) < critical_band) {
      row.verdict = "near-critical";
    } else if (wit.divergent && tr.trend != Trend::converged) {
      row.verdict = "unbounded";
    } else {
      row.verdict = "bounded";
    }
    row.signals_conflict = wit.divergent && tr.trend == Trend::converged;
    rows[i] = row;
  }, 2);
  return rows;
}

}  // namespace uhplab
