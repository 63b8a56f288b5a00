#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "uhplab/quadrature.hpp"
#include "uhplab/types.hpp"
#include "uhplab/weights.hpp"

// Sampled/evaluatable functions on a truncated upper half-plane and their
// mixed norms: p-norm in x along each horizontal slice, weighted q-norm in y.

namespace uhplab {

struct GridSpec {
  double x_max = 64.0;
  int nx = 257;          // uniform x nodes on [-x_max, x_max]
  int j_lo = -10;
  int j_hi = 10;
  int y_per_octave = 4;  // geometric y nodes
};

using Evaluator = std::function<complex(complex)>;

struct GridFunction {
  std::vector<double> x_nodes;  // strictly increasing, uniform
  std::vector<double> y_nodes;  // strictly increasing, geometric
  std::vector<complex> values;  // index = iy * nx + ix
  Evaluator evaluator;          // optional closed form for off-grid points
  double x_decay = 0.0;         // |f(x+iy)| = O(|x|^{-x_decay}); 0 = unknown

  complex at(size_t ix, size_t iy) const { return values[iy * x_nodes.size() + ix]; }

  // max relative mismatch between stored values and the evaluator
  double validate() const {
    if (!evaluator) return 0.0;
    double worst = 0.0;
    for (size_t iy = 0; iy < y_nodes.size(); ++iy)
      for (size_t ix = 0; ix < x_nodes.size(); ++ix) {
        complex ref = evaluator(complex{x_nodes[ix], y_nodes[iy]});
        double scale = std::max(std::abs(ref), 1e-300);
        worst = std::max(worst, std::abs(ref - at(ix, iy)) / scale);
      }
    return worst;
  }
};

inline GridFunction make_grid(Evaluator f, const GridSpec& spec, double x_decay) {
  GridFunction g;
  g.evaluator = std::move(f);
  g.x_decay = x_decay;
  g.x_nodes.resize(spec.nx);
  for (int i = 0; i < spec.nx; ++i)
    g.x_nodes[i] = -spec.x_max + 2.0 * spec.x_max * i / (spec.nx - 1);
  for (int j = spec.j_lo * spec.y_per_octave; j <= spec.j_hi * spec.y_per_octave; ++j)
    g.y_nodes.push_back(std::exp2(static_cast<double>(j) / spec.y_per_octave));
  g.values.resize(g.x_nodes.size() * g.y_nodes.size());
  for (size_t iy = 0; iy < g.y_nodes.size(); ++iy)
    for (size_t ix = 0; ix < g.x_nodes.size(); ++ix)
      g.values[iy * g.x_nodes.size() + ix] = g.evaluator(complex{g.x_nodes[ix], g.y_nodes[iy]});
  return g;
}

// Evaluator-only view (no table); enough for every quadrature-driven op.
inline GridFunction wrap_evaluator(Evaluator f, double x_decay) {
  GridFunction g;
  g.evaluator = std::move(f);
  g.x_decay = x_decay;
  return g;
}

inline GridFunction scale_grid(const GridFunction& f, complex c) {
  GridFunction g = f;
  for (auto& v : g.values) v *= c;
  Evaluator base = f.evaluator;
  if (base) g.evaluator = [base, c](complex z) { return c * base(z); };
  return g;
}

// x-quadrature layout for slice integrals: a uniform-ish core around 0 and
// dyadic octaves out to x_max on both sides.
struct SliceScheme {
  double core_half = 2.0;
  int core_panels = 4;
  int octaves = 9;  // x_max = core_half * 2^octaves
  int panels_per_octave = 2;
  int nodes = 12;

  double x_max() const { return core_half * std::exp2(octaves); }
};

namespace detail {

// integral of g over [-X, X] on the slice panel layout
template <class G>
double slice_integral(G&& g, const SliceScheme& s) {
  const GaussRule& rule = gauss_rule(s.nodes);
  double acc = 0.0, bad = 0.0;
  double h = 2.0 * s.core_half / s.core_panels;
  for (int i = 0; i < s.core_panels; ++i)
    gauss_panel(g, -s.core_half + i * h, -s.core_half + (i + 1) * h, rule, acc, bad);
  for (int m = 0; m < s.octaves; ++m) {
    double a = s.core_half * std::exp2(m), b = 2.0 * a;
    double step = (b - a) / s.panels_per_octave;
    for (int i = 0; i < s.panels_per_octave; ++i) {
      gauss_panel(g, a + i * step, a + (i + 1) * step, rule, acc, bad);
      gauss_panel(g, -a - (i + 1) * step, -a - i * step, rule, acc, bad);
    }
  }
  return acc;
}

}  // namespace detail

// (int_R |f(x+iy)|^p dx)^{1/p} with a power-envelope tail bound beyond the
// truncation when the decay exponent is known.
inline double slice_pnorm_eval(const Evaluator& f, double p, double y, double x_decay,
                               const SliceScheme& s = {}) {
  if (!(p >= 1.0)) throw std::domain_error("slice_pnorm: p must be >= 1");
  auto g = [&](double x) { return std::pow(std::abs(f(complex{x, y})), p); };
  double acc = detail::slice_integral(g, s);
  if (x_decay * p > 1.0) {
    double X = s.x_max();
    acc += (g(X) + g(-X)) * X / (x_decay * p - 1.0);
  }
  return std::pow(acc, 1.0 / p);
}

inline double slice_pnorm(const GridFunction& f, double p, double y, const SliceScheme& s = {}) {
  if (!(p >= 1.0)) throw std::domain_error("slice_pnorm: p must be >= 1");
  if (f.evaluator) return slice_pnorm_eval(f.evaluator, p, y, f.x_decay, s);
  // table path: y must be a grid node; trapezoid over the stored row
  size_t iy = 0;
  bool found = false;
  for (; iy < f.y_nodes.size(); ++iy)
    if (std::abs(f.y_nodes[iy] - y) <= 1e-12 * y) {
      found = true;
      break;
    }
  if (!found) throw std::domain_error("slice_pnorm: y is not a grid node and no evaluator is present");
  double acc = 0.0;
  for (size_t ix = 0; ix + 1 < f.x_nodes.size(); ++ix) {
    double ga = std::pow(std::abs(f.at(ix, iy)), p);
    double gb = std::pow(std::abs(f.at(ix + 1, iy)), p);
    acc += 0.5 * (ga + gb) * (f.x_nodes[ix + 1] - f.x_nodes[ix]);
  }
  if (f.x_decay * p > 1.0) {
    double X = f.x_nodes.back();
    double gR = std::pow(std::abs(f.at(f.x_nodes.size() - 1, iy)), p);
    double gL = std::pow(std::abs(f.at(0, iy)), p);
    acc += (gR + gL) * X / (f.x_decay * p - 1.0);
  }
  return std::pow(acc, 1.0 / p);
}

struct MixedScheme {
  PanelScheme y{-20, 20, 8, 2};
  SliceScheme x{};
};

struct NormResult {
  double value = 0.0;    // the mixed norm
  double value_q = 0.0;  // its q-th power (pre-root), tails included
  double error_estimate = 0.0;
  double tail_low = 0.0, tail_high = 0.0;
  bool diverged = false;
  bool tail_resolved = true;
  std::array<double, 3> windows{};  // q-th power over |log2 y| <= 12, 16, 20
  bool ok = true;
};

// || f || = ( int_0^inf slice_pnorm(f,p,y)^q omega^k(y) y^alpha dy )^{1/q}
inline NormResult mixed_norm(const GridFunction& f, const SpaceParams& params,
                             const WeightSpec& spec, const MixedScheme& ms = {}) {
  params.validate();
  ms.y.validate();
  const double p = params.p, q = params.q, alpha = params.alpha;
  auto g = [&](double y, const SliceScheme& xs) {
    double sn = slice_pnorm(f, p, y, xs);
    return std::pow(sn, q) * weight_eval(spec, y) * std::pow(y, alpha);
  };

  const int n_oct = ms.y.j_hi - ms.y.j_lo;
  std::vector<double> oct_fine(n_oct, 0.0), oct_coarse(n_oct, 0.0);
  SliceScheme xs_coarse = ms.x;
  SliceScheme xs_fine = ms.x;
  xs_fine.nodes = ms.x.nodes + 4;
  detail::parallel_for(n_oct, [&](int i) {
    int j = ms.y.j_lo + i;
    bool ok = true;
    double bad = 0.0;
    oct_coarse[i] = detail::integrate_geometric([&](double y) { return g(y, xs_coarse); },
                                                std::exp2(j), std::exp2(j + 1), ms.y.nodes_per_panel,
                                                ms.y.panels_per_octave, ok, bad);
    oct_fine[i] = detail::integrate_geometric([&](double y) { return g(y, xs_fine); },
                                              std::exp2(j), std::exp2(j + 1), 2 * ms.y.nodes_per_panel,
                                              ms.y.panels_per_octave, ok, bad);
  });

  NormResult out;
  double total_f = 0.0, total_c = 0.0;
  for (int i = 0; i < n_oct; ++i) {
    total_f += oct_fine[i];
    total_c += oct_coarse[i];
    int j = ms.y.j_lo + i;
    for (int wi = 0; wi < 3; ++wi) {
      int J = 12 + 4 * wi;
      if (j >= -J && j + 1 <= J) out.windows[wi] += oct_fine[i];
    }
  }
  // window comparison flags truncation-driven growth
  if (out.windows[0] > 0.0 &&
      (out.windows[1] >= 1.5 * out.windows[0] || out.windows[2] >= 1.5 * out.windows[1]))
    out.diverged = true;

  double a = std::exp2(ms.y.j_lo), b = std::exp2(ms.y.j_hi);
  out.tail_low = g(a, xs_fine) * a / (1.0 + alpha);
  double gb = g(b, xs_fine), gb4 = g(0.25 * b, xs_fine);
  if (gb > 0.0 && gb4 > 0.0) {
    double local_exp = std::log2(gb / gb4) / 2.0;
    if (local_exp < -1.02) {
      // power model: int_b^inf g ~ g(b) * b / (-1 - e)
      out.tail_high = gb * b / (-1.0 - local_exp);
    } else {
      out.tail_resolved = false;
      if (local_exp > -0.5) out.diverged = true;
    }
  }

  out.value_q = total_f + out.tail_low + out.tail_high;
  out.error_estimate = std::abs(total_f - total_c);
  out.value = std::pow(out.value_q, 1.0 / q);
  return out;
}

}  // namespace uhplab
