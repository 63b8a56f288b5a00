#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "uhplab/bergman.hpp"
#include "uhplab/gridfn.hpp"
#include "uhplab/lattice.hpp"
#include "uhplab/types.hpp"
#include "uhplab/weights.hpp"

// Sequence-space norms on the lattice, sampling sums against mixed norms,
// atomic synthesis from Bergman kernels, least-squares reconstruction, the
// covering functional, the derivative characterization and the slice
// averaging estimate.

namespace uhplab {

struct SequenceSpaceParams {
  double p = 2.0;
  double q = 2.0;
  double alpha = 0.0;
  WeightSpec spec;
  double gamma = 0.0;  // must match the generating lattice

  // omega^k(2^{gamma j}) 2^{gamma j (alpha + 1 + q/p)}
  double level_weight(double yj) const {
    return weight_eval(spec, yj) * std::pow(yj, alpha + 1.0 + q / p);
  }
};

struct CoefficientArray {
  struct Entry {
    int l = 0, j = 0;
    complex value{0.0, 0.0};
  };
  std::vector<Entry> entries;

  void add(int l, int j, complex v) { entries.push_back({l, j, v}); }
  void sort() {
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return a.j != b.j ? a.j < b.j : a.l < b.l;
    });
  }
  bool within(const LatticeConfig& cfg) const {
    for (const auto& e : entries)
      if (e.l < cfg.l_min || e.l > cfg.l_max || e.j < cfg.j_min || e.j > cfg.j_max) return false;
    return true;
  }
};

inline double sequence_norm(const CoefficientArray& lam, const SequenceSpaceParams& sp) {
  std::map<int, double> per_level;  // j -> sum_l |lambda|^p
  for (const auto& e : lam.entries) per_level[e.j] += std::pow(std::abs(e.value), sp.p);
  double acc = 0.0;
  for (const auto& [j, s] : per_level)
    acc += std::pow(s, sp.q / sp.p) * sp.level_weight(std::exp2(sp.gamma * j));
  return std::pow(acc, 1.0 / sp.q);
}

inline CoefficientArray sample_on_lattice(const HoloTestFunction& F, const DeltaLattice& lat) {
  const auto& c = lat.cfg;
  long long count = static_cast<long long>(c.l_max - c.l_min + 1) * (c.j_max - c.j_min + 1);
  if (count > 4'000'000)
    throw std::domain_error("sample_on_lattice: index range too large to materialize");
  CoefficientArray lam;
  lam.entries.reserve(static_cast<size_t>(count));
  for (int j = c.j_min; j <= c.j_max; ++j)
    for (int l = c.l_min; l <= c.l_max; ++l) lam.add(l, j, F.eval(lat.point(l, j)));
  return lam;
}

namespace detail {

// |F(x + iy)|^p along a horizontal line, with cheap per-term offsets
struct FastAbsP {
  struct T {
    double a, b;  // pole mirror: z - conj(w) = (x - a) + i(y + b)
    complex c;
    int m;
  };
  std::vector<T> terms;
  double p;
  bool single;
  double cp_single = 0.0;

  FastAbsP(const HoloTestFunction& F, double p_) : p(p_) {
    for (const auto& t : F.terms)
      terms.push_back({t.pole_mirror.real(), t.pole_mirror.imag(), t.coeff, t.order});
    single = terms.size() == 1;
    if (single) cp_single = std::pow(std::abs(terms[0].c), p);
  }

  double operator()(double x, double y) const {
    if (single) {
      const T& t = terms[0];
      double dx = x - t.a, dy = y + t.b;
      double r2 = dx * dx + dy * dy;
      double e = 0.5 * t.m * p;
      double ipart;
      if (std::modf(e, &ipart) == 0.0 && e <= 16.0) {
        double r = 1.0;
        for (int i = 0; i < static_cast<int>(e); ++i) r *= r2;
        return cp_single / r;
      }
      return cp_single * std::pow(r2, -e);
    }
    complex s{0.0, 0.0};
    for (const auto& t : terms)
      s += t.c / uhplab::detail::cpow_int(complex{x - t.a, y + t.b}, t.m);
    return std::pow(std::norm(s), 0.5 * p);
  }
};

}  // namespace detail

struct SamplingCheck {
  double lhs = 0.0;     // the weighted lattice sum
  double norm_q = 0.0;  // ||F||^q
  double ratio_upper = 0.0;
  double ratio_lower = 0.0;
  bool truncation_warning = false;
  double tail_fraction = 0.0;
  long long points = 0;
  bool zero = false;
};

// per-level sums sum_l |F(z_{l,j})|^p; independent of the weight, so they
// can be shared across k when assembling sampling checks
struct LatticeLevelSums {
  std::vector<double> sum_p;  // indexed j - cfg.j_min
  long long points = 0;
  double p = 2.0;
};

inline LatticeLevelSums lattice_level_sums(const HoloTestFunction& F, const DeltaLattice& lat,
                                           double p) {
  LatticeLevelSums out;
  out.p = p;
  const auto& c = lat.cfg;
  const int n_levels = c.j_max - c.j_min + 1;
  out.sum_p.assign(n_levels, 0.0);
  if (F.terms.empty()) return out;
  double span = 0.0, min_b = 1e300;
  for (const auto& t : F.terms) {
    span = std::max(span, std::abs(t.pole_mirror.real()));
    min_b = std::min(min_b, t.pole_mirror.imag());
  }
  const double mp = F.min_order() * p;  // slice integrand decays like |x|^{-mp}
  detail::FastAbsP fa(F, p);
  std::vector<long long> level_pts(n_levels, 0);
  detail::parallel_for(n_levels, [&](int idx) {
    int j = c.j_min + idx;
    double yj = lat.y(j);
    double step = lat.x_step(j);
    double X = span + 2.0 * (yj + min_b) + 2.0;
    int l_hi = std::min(static_cast<int>(X / step) + 1, c.l_max);
    int l_lo = std::max(-l_hi, c.l_min);
    double s = 0.0;
    for (int l = l_lo; l <= l_hi; ++l) s += fa(step * l, yj);
    // Riemann tail of the l-sum beyond the window, power model
    if (mp > 1.0) s += (fa(X, yj) + fa(-X, yj)) * X / ((mp - 1.0) * step);
    out.sum_p[idx] = s;
    level_pts[idx] = l_hi - l_lo + 1;
  });
  for (long long n : level_pts) out.points += n;
  return out;
}

// sum_j ( sum_l |F(z_{l,j})|^p )^{q/p} omega^k(y_j) y_j^{alpha+1+q/p}
// against ||F||^q.  The l-sums are truncated where the slice has shed its
// mass (power tail model appended); the j-range comes from the lattice.
inline SamplingCheck sampling_check(const HoloTestFunction& F, const DeltaLattice& lat,
                                    const SequenceSpaceParams& sp, const MixedScheme& ms = {},
                                    const LatticeLevelSums* shared = nullptr) {
  if (std::abs(sp.gamma - lat.gamma) > 1e-12)
    throw std::domain_error("sampling_check: params gamma does not match the lattice");
  SamplingCheck out;
  SpaceParams params(sp.p, sp.q, sp.alpha, 0.0);
  auto grid = wrap_evaluator(F.evaluator(), F.min_order());
  auto nr = mixed_norm(grid, params, sp.spec, ms);
  out.norm_q = nr.value_q;
  if (F.terms.empty()) {
    out.zero = true;
    return out;
  }

  LatticeLevelSums local;
  const LatticeLevelSums* sums = shared;
  if (!sums) {
    local = lattice_level_sums(F, lat, sp.p);
    sums = &local;
  }
  if (sums->p != sp.p) throw std::domain_error("sampling_check: shared sums use a different p");
  const auto& c = lat.cfg;
  for (int idx = 0; idx < static_cast<int>(sums->sum_p.size()); ++idx) {
    int j = c.j_min + idx;
    out.lhs += std::pow(sums->sum_p[idx], sp.q / sp.p) * sp.level_weight(lat.y(j));
  }
  out.points = sums->points;

  // footprint mass check: the y-span of the lattice must hold ~99% of ||F||^q
  MixedScheme clipped = ms;
  clipped.y.j_lo = std::max(ms.y.j_lo, static_cast<int>(std::floor(lat.gamma * c.j_min)));
  clipped.y.j_hi = std::min(ms.y.j_hi, static_cast<int>(std::ceil(lat.gamma * c.j_max)));
  if (clipped.y.j_lo > ms.y.j_lo || clipped.y.j_hi < ms.y.j_hi) {
    auto nc = mixed_norm(grid, params, sp.spec, clipped);
    out.tail_fraction = std::max(0.0, 1.0 - nc.value_q / out.norm_q);
  }
  out.truncation_warning = out.tail_fraction > 0.01;

  if (out.norm_q > 0.0) out.ratio_upper = out.lhs / out.norm_q;
  if (out.lhs > 0.0) out.ratio_lower = out.norm_q / out.lhs;
  return out;
}

// F(z) = sum lambda_{l,j} y_j^{alpha+1+q/p} K_alpha(z, z_{l,j})
inline complex synthesize(const CoefficientArray& lam, double alpha,
                          const SequenceSpaceParams& sp, const DeltaLattice& lat, complex z) {
  KernelParams kp(alpha);
  const double expo = sp.alpha + 1.0 + sp.q / sp.p;
  const double c_mag = (alpha + 1.0) / (4.0 * std::numbers::pi);
  double ipart;
  const bool int_order = std::modf(2.0 + alpha, &ipart) == 0.0;
  const int m = static_cast<int>(2.0 + alpha);
  complex acc{0.0, 0.0};
  for (const auto& e : lam.entries) {
    complex zl = lat.point(e.l, e.j);
    complex base = (z - std::conj(zl)) / complex{0.0, 2.0};
    complex ker = int_order ? c_mag / uhplab::detail::cpow_int(base, m)
                            : c_mag * std::pow(base, -(2.0 + alpha));
    acc += e.value * std::pow(lat.y(e.j), expo) * ker;
  }
  return acc;
}

inline Evaluator synthesize_evaluator(CoefficientArray lam, double alpha, SequenceSpaceParams sp,
                                      const DeltaLattice& lat) {
  DeltaLattice copy = lat;
  return [lam = std::move(lam), alpha, sp, copy](complex z) {
    return synthesize(lam, alpha, sp, copy, z);
  };
}

// --- least-squares reconstruction -------------------------------------------

struct ReconstructOptions {
  double y_lo = 0.25, y_hi = 16.0;
  double level_step = 0.12;    // log2 spacing between selected levels
  double x_spacing = 0.8;      // atom spacing ~ x_spacing * (1 + y)
  double x_window_base = 6.0;  // atoms kept while |x| <= base + slope * y
  double x_window_slope = 2.0;
  GridSpec grid{8.0, 33, -6, 6, 2};
  double rank_tol = 1e-10;
};

inline std::vector<std::pair<int, int>> reconstruct_dictionary(const DeltaLattice& lat,
                                                               const ReconstructOptions& opt) {
  std::vector<std::pair<int, int>> atoms;
  int last_j = INT_MIN;
  for (double v = std::log2(opt.y_lo); v <= std::log2(opt.y_hi) + 1e-12; v += opt.level_step) {
    int j = static_cast<int>(std::lround(v / lat.gamma));
    j = std::clamp(j, lat.cfg.j_min, lat.cfg.j_max);
    if (j == last_j) continue;
    last_j = j;
    double yj = lat.y(j);
    double spacing = opt.x_spacing * (1.0 + yj);
    double window = opt.x_window_base + opt.x_window_slope * yj;
    double step = lat.x_step(j);
    int last_l = INT_MIN;
    for (double xq = -window; xq <= window + 1e-12; xq += spacing) {
      int l = static_cast<int>(std::lround(xq / step));
      l = std::clamp(l, lat.cfg.l_min, lat.cfg.l_max);
      if (l == last_l) continue;
      last_l = l;
      atoms.emplace_back(l, j);
    }
  }
  return atoms;
}

struct ReconstructResult {
  CoefficientArray coeffs;
  std::vector<std::pair<int, int>> support;
  double residual = 0.0;
  int atoms = 0;
  int rank = 0;
  double rank_tol = 0.0;
  bool converged = false;
};

// Regularized least squares of synthesize(lambda) against F on a verification
// grid.  This is the computable stand-in for the nonconstructive analysis
// operator: it witnesses representability with a quantified residual.
inline ReconstructResult reconstruct(const Evaluator& F, const DeltaLattice& lat,
                                     const SequenceSpaceParams& sp,
                                     const ReconstructOptions& opt = {}) {
  ReconstructResult out;
  out.rank_tol = opt.rank_tol;
  out.support = reconstruct_dictionary(lat, opt);
  out.atoms = static_cast<int>(out.support.size());

  std::vector<complex> zs;
  const auto& g = opt.grid;
  for (int jj = g.j_lo * g.y_per_octave; jj <= g.j_hi * g.y_per_octave; ++jj) {
    double y = std::exp2(static_cast<double>(jj) / g.y_per_octave);
    for (int i = 0; i < g.nx; ++i)
      zs.emplace_back(-g.x_max + 2.0 * g.x_max * i / (g.nx - 1), y);
  }
  const int rows = static_cast<int>(zs.size());
  const int cols = out.atoms;

  KernelParams kp(sp.alpha);
  const double expo = sp.alpha + 1.0 + sp.q / sp.p;
  Eigen::MatrixXcd A(rows, cols);
  detail::parallel_for(cols, [&](int a) {
    auto [l, j] = out.support[a];
    ComplexPoint zl(lat.point(l, j));
    double w = std::pow(lat.y(j), expo);
    for (int r = 0; r < rows; ++r)
      A(r, a) = w * kernel_eval(kp, ComplexPoint(zs[r]), zl);
  });
  Eigen::VectorXcd b(rows);
  for (int r = 0; r < rows; ++r) b(r) = F(zs[r]);
  double bn = b.norm();
  if (bn == 0.0) {
    out.converged = true;
    return out;  // zero data reconstructs to zero coefficients
  }

  Eigen::VectorXd colscale(cols);
  for (int a = 0; a < cols; ++a) {
    colscale(a) = A.col(a).norm();
    if (colscale(a) == 0.0) colscale(a) = 1.0;
    A.col(a) /= colscale(a);
  }
  // rank-revealing pivoted QR; the near-continuum dictionary is numerically
  // rank-deficient and needs the threshold truncation
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
  qr.setThreshold(opt.rank_tol);
  Eigen::VectorXcd nu = qr.solve(b);
  out.rank = static_cast<int>(qr.rank());
  out.residual = (A * nu - b).norm() / bn;
  out.converged = out.rank > 0;
  for (int a = 0; a < cols; ++a) {
    complex v = nu(a) / colscale(a);
    if (std::abs(v) > 0.0) out.coeffs.add(out.support[a].first, out.support[a].second, v);
  }
  out.coeffs.sort();
  return out;
}

// --- covering functional I(F) ------------------------------------------------

struct ScriptIScheme {
  int j_lo = -7, j_hi = 7;  // y footprint in octaves
  int y_nodes = 6;          // Gauss nodes per J_j band
  int theta_nodes = 12;     // v-band substitution v = y(1 + sin(theta)/(2 sqrt 2))
  SliceScheme u{2.0, 2, 6, 1, 8};
};

struct ScriptIResult {
  double value = 0.0;
  double norm_q = 0.0;
  double ratio = 0.0;
  int levels_touched = 0;
};

namespace detail {

inline double len_cover(const DeltaLattice& lat, int j, double u, double r) {
  // sum over l of |I_{l,j} intersect (u-r, u+r)|
  double w = lat.cfg.delta * lat.cfg.delta / 4.0 * lat.y(j);
  double step = lat.x_step(j);
  int lo = std::max(static_cast<int>(std::floor((u - r - w) / step)), lat.cfg.l_min);
  int hi = std::min(static_cast<int>(std::ceil((u + r + w) / step)), lat.cfg.l_max);
  double acc = 0.0;
  for (int l = lo; l <= hi; ++l) {
    auto I = lat.I(l, j);
    double a = std::max(I.lo, u - r), b = std::min(I.hi, u + r);
    if (b > a) acc += b - a;
  }
  return acc;
}

}  // namespace detail

// I(F): outer y-integral over sum_{j: y in J_j} of the (q/p)-power of the
// double integral of |F|^p against the covering length of the lattice
// intervals inside the |z - w| < y/(2 sqrt 2) ball, with measure du dv / v^2,
// all against omega^k(y) y^alpha dy.  The indicator sum is unfolded by
// Fubini into per-level integrals over the smooth J_j bands.
inline ScriptIResult script_I(const HoloTestFunction& F, const DeltaLattice& lat,
                              const SequenceSpaceParams& sp, const ScriptIScheme& sc = {}) {
  ScriptIResult out;
  detail::FastAbsP fa(F, sp.p);
  const double inv22 = 1.0 / (2.0 * std::sqrt(2.0));
  const GaussRule& rth = detail::gauss_rule(sc.theta_nodes);
  const GaussRule& ry = detail::gauss_rule(sc.y_nodes);

  auto inner_B = [&](double y, int j) {
    // B = int int |F(u+iv)|^p len_j(u; v, y) du dv / v^2 over the v-band
    double acc = 0.0;
    for (size_t it = 0; it < rth.x.size(); ++it) {
      double theta = 0.5 * std::numbers::pi * rth.x[it];
      double v = y * (1.0 + inv22 * std::sin(theta));
      double r = y * inv22 * std::cos(theta);
      double dv = y * inv22 * std::cos(theta) * 0.5 * std::numbers::pi * rth.w[it];
      double uint = detail::slice_integral(
          [&](double u) { return fa(u, v) * detail::len_cover(lat, j, u, r); }, sc.u);
      acc += uint * dv / (v * v);
    }
    return acc;
  };

  int j_first = std::max(lat.cfg.j_min,
                         static_cast<int>(std::ceil(sc.j_lo / lat.gamma)));
  int j_last = std::min(lat.cfg.j_max,
                        static_cast<int>(std::floor(sc.j_hi / lat.gamma)));
  const int n_levels = j_last - j_first + 1;
  if (n_levels <= 0 || F.terms.empty()) {
    SpaceParams params0(sp.p, sp.q, sp.alpha, 0.0);
    out.norm_q = mixed_norm(wrap_evaluator(F.evaluator(), std::max(F.min_order(), 2.0)),
                            params0, sp.spec).value_q;
    return out;
  }
  std::vector<double> level_val(n_levels, 0.0);
  detail::parallel_for(n_levels, [&](int idx) {
    int j = j_first + idx;
    auto J = lat.J(j);
    double mid = 0.5 * (J.lo + J.hi), half = 0.5 * (J.hi - J.lo);
    double acc = 0.0;
    for (size_t iy = 0; iy < ry.x.size(); ++iy) {
      double y = mid + half * ry.x[iy];
      acc += half * ry.w[iy] * std::pow(inner_B(y, j), sp.q / sp.p) *
             weight_eval(sp.spec, y) * std::pow(y, sp.alpha);
    }
    level_val[idx] = acc;
  });
  for (double v : level_val) out.value += v;
  out.levels_touched = n_levels;

  SpaceParams params(sp.p, sp.q, sp.alpha, 0.0);
  auto nr = mixed_norm(wrap_evaluator(F.evaluator(), F.min_order()), params, sp.spec);
  out.norm_q = nr.value_q;
  if (out.norm_q > 0.0) out.ratio = out.value / out.norm_q;
  return out;
}

// --- derivative characterization and slice averaging -------------------------

struct DerivativeRatios {
  double forward = 0.0;  // ||y F'|| / ||F||
  double inverse = 0.0;
  double norm_f = 0.0, norm_df = 0.0;
};

inline DerivativeRatios derivative_char_check(const HoloTestFunction& F, const SpaceParams& params,
                                              const WeightSpec& spec, const MixedScheme& ms = {}) {
  DerivativeRatios out;
  auto fg = wrap_evaluator(F.evaluator(), F.min_order());
  auto dg = wrap_evaluator(
      [F](complex z) { return z.imag() * F.deriv(z); }, F.min_order() + 1.0);
  out.norm_f = mixed_norm(fg, params, spec, ms).value;
  out.norm_df = mixed_norm(dg, params, spec, ms).value;
  if (out.norm_f > 0.0) out.forward = out.norm_df / out.norm_f;
  if (out.norm_df > 0.0) out.inverse = out.norm_f / out.norm_df;
  return out;
}

struct SliceAverage {
  double worst_ratio = 0.0;  // empirical constant of the averaging estimate
  bool zero = false;
};

// ||F(.+iy)||_p^q <= C int_{|v-y| < y delta^2/4} ||F(.+iv)||_p^q dv / v
inline SliceAverage slice_average_check(const HoloTestFunction& F, double delta, double p, double q,
                                        const std::vector<double>& y_grid,
                                        const SliceScheme& xs = {}) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::domain_error("slice_average_check: delta must lie in (0,1)");
  SliceAverage out;
  if (F.terms.empty()) {
    out.zero = true;
    return out;
  }
  auto ev = F.evaluator();
  const GaussRule& rule = detail::gauss_rule(16);
  for (double y : y_grid) {
    double lhs = std::pow(slice_pnorm_eval(ev, p, y, F.min_order(), xs), q);
    double w = y * delta * delta / 4.0;
    double a = y - w, b = y + w;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double rhs = 0.0;
    for (size_t i = 0; i < rule.x.size(); ++i) {
      double v = mid + half * rule.x[i];
      rhs += half * rule.w[i] * std::pow(slice_pnorm_eval(ev, p, v, F.min_order(), xs), q) / v;
    }
    out.worst_ratio = std::max(out.worst_ratio, lhs / rhs);
  }
  return out;
}

}  // namespace uhplab
