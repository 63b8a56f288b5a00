#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "uhplab/types.hpp"

// The delta-lattice z_{l,j} = (delta^2/4) l 2^{gamma j - 1} + i 2^{gamma j}
// with its Whitney-type interval systems, the Bergman distance, and the
// covering/disjointness/inclusion audits.

namespace uhplab {

struct GammaBounds {
  double lo = 0.0;
  double hi = 0.0;
  double midpoint() const { return 0.5 * (lo + hi); }
};

// Admissible vertical exponents: gamma must keep the J_j covering (0,inf)
// while the shrunken J'_j stay pairwise disjoint, which pins
//   log2((1+d^2/20)/(1-d^2/20)) < gamma < log2((1+d^2/4)/(1-d^2/4)).
inline GammaBounds gamma_bounds(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::domain_error("gamma_bounds: delta must lie in (0,1)");
  double u = delta * delta / 20.0;
  double v = delta * delta / 4.0;
  return {std::log2((1.0 + u) / (1.0 - u)), std::log2((1.0 + v) / (1.0 - v))};
}

struct LatticeConfig {
  double delta = 0.5;
  double gamma = 0.0;  // 0 = use the midpoint of gamma_bounds
  int l_min = -200, l_max = 200;
  int j_min = -40, j_max = 40;

  void validate() const {
    auto b = gamma_bounds(delta);
    double g = gamma != 0.0 ? gamma : b.midpoint();
    if (!(g > b.lo) || !(g < b.hi))
      throw std::domain_error("LatticeConfig: gamma outside the admissible open interval");
    if (l_min > l_max || j_min > j_max) throw std::domain_error("LatticeConfig: empty index range");
  }
};

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool contains(double t) const { return t > lo && t < hi; }
  double length() const { return hi - lo; }
};

// Lazy lattice: points and intervals are computed from the formulas on
// demand, so huge index ranges cost nothing to hold.
struct DeltaLattice {
  LatticeConfig cfg;
  double gamma = 0.0;

  explicit DeltaLattice(LatticeConfig c) : cfg(c) {
    cfg.validate();
    gamma = cfg.gamma != 0.0 ? cfg.gamma : gamma_bounds(cfg.delta).midpoint();
  }

  double y(int j) const { return std::exp2(gamma * j); }
  double x(int l, int j) const {
    return cfg.delta * cfg.delta / 4.0 * l * std::exp2(gamma * j - 1.0);
  }
  complex point(int l, int j) const { return {x(l, j), y(j)}; }
  double x_step(int j) const { return cfg.delta * cfg.delta / 8.0 * y(j); }

  Interval I(int l, int j) const {
    double w = cfg.delta * cfg.delta / 4.0 * y(j);
    return {x(l, j) - w, x(l, j) + w};
  }
  Interval Iprime(int l, int j) const {
    double w = cfg.delta * cfg.delta / 20.0 * y(j);
    return {x(l, j) - w, x(l, j) + w};
  }
  Interval J(int j) const {
    double w = cfg.delta * cfg.delta / 4.0 * y(j);
    return {std::max(y(j) - w, 0.0), y(j) + w};
  }
  Interval Jprime(int j) const {
    double w = cfg.delta * cfg.delta / 20.0 * y(j);
    return {std::max(y(j) - w, 0.0), y(j) + w};
  }

  // indices l with xq possibly inside I_{l,j}, clamped to the range
  std::pair<int, int> l_window(double xq, int j, double halfwidth_factor = 0.25) const {
    double w = cfg.delta * cfg.delta * halfwidth_factor * y(j);
    double step = x_step(j);
    int lo = static_cast<int>(std::ceil((xq - w) / step));
    int hi = static_cast<int>(std::floor((xq + w) / step));
    return {std::max(lo, cfg.l_min), std::min(hi, cfg.l_max)};
  }
};

inline double bergman_distance(complex z, complex w) {
  if (!(z.imag() > 0.0) || !(w.imag() > 0.0))
    throw std::domain_error("bergman_distance: both points must lie in the upper half-plane");
  double rho = std::abs(z - w) / std::abs(std::conj(z) - w);
  return 0.5 * std::log((1.0 + rho) / (1.0 - rho));
}

// --- audits -----------------------------------------------------------------

struct CoveringReport {
  int samples_y = 0, samples_x = 0, excluded = 0;
  int cover_y_violations = 0;     // (i) vertical coverage
  int cover_x_violations = 0;     // (i) horizontal coverage at fixed j
  int iprime_overlaps = 0;        // (ii)
  int jprime_overlaps = 0;        // (iii)
  int mult_I_max = 0;             // (iv), must be <= 4
  int mult_J_max = 0;             // (v), the recorded N
  bool pass() const {
    return cover_y_violations == 0 && cover_x_violations == 0 && iprime_overlaps == 0 &&
           jprime_overlaps == 0 && mult_I_max <= 4;
  }
};

inline CoveringReport covering_audit(const DeltaLattice& lat, int n_samples, uint64_t seed) {
  CoveringReport rep;
  detail::Rng rng(seed);
  const auto& c = lat.cfg;

  // analytic adjacency checks for the primed families
  for (int j = c.j_min; j < c.j_max; ++j)
    if (lat.Jprime(j).hi > lat.Jprime(j + 1).lo) ++rep.jprime_overlaps;
  for (int l = c.l_min; l < c.l_max; ++l)
    if (lat.Iprime(l, 0).hi > lat.Iprime(l + 1, 0).lo) ++rep.iprime_overlaps;

  // vertical samples: coverage and J-multiplicity inside the footprint
  double ylo = lat.y(c.j_min + 1), yhi = lat.y(c.j_max - 1);
  for (int s = 0; s < n_samples; ++s) {
    double yq = rng.log_uniform(ylo, yhi);
    if (!(yq > lat.J(c.j_min).lo && yq < lat.J(c.j_max).hi)) {
      ++rep.excluded;
      continue;
    }
    ++rep.samples_y;
    int mult = 0, multp = 0;
    int j0 = static_cast<int>(std::floor(std::log2(yq) / lat.gamma));
    for (int j = std::max(c.j_min, j0 - 64); j <= std::min(c.j_max, j0 + 64); ++j) {
      if (lat.J(j).contains(yq)) ++mult;
      if (lat.Jprime(j).contains(yq)) ++multp;
    }
    if (mult == 0) ++rep.cover_y_violations;
    if (multp > 1) ++rep.jprime_overlaps;
    rep.mult_J_max = std::max(rep.mult_J_max, mult);
  }

  // horizontal samples at a few fixed levels
  for (int j : {c.j_min + 1, (c.j_min + c.j_max) / 2, c.j_max - 1}) {
    double xlo = lat.x(c.l_min + 1, j), xhi = lat.x(c.l_max - 1, j);
    for (int s = 0; s < n_samples / 3; ++s) {
      double xq = rng.uniform(xlo, xhi);
      ++rep.samples_x;
      auto [la, lb] = lat.l_window(xq, j);
      int mult = 0, multp = 0;
      for (int l = la - 2; l <= lb + 2; ++l) {
        if (l < c.l_min || l > c.l_max) continue;
        if (lat.I(l, j).contains(xq)) ++mult;
        if (lat.Iprime(l, j).contains(xq)) ++multp;
      }
      if (mult == 0) ++rep.cover_x_violations;
      if (multp > 1) ++rep.iprime_overlaps;
      rep.mult_I_max = std::max(rep.mult_I_max, mult);
    }
  }
  return rep;
}

struct InclusionReport {
  int cells = 0, samples_per_cell = 0;
  int forward_violations = 0;   // I_{l,j} + iJ_j not inside B_{delta^2}(z_{l,j})
  int backward_violations = 0;  // B_{delta^2/80}(z_{l,j}) not inside I' + iJ'
  double worst_forward = 0.0;   // max Bergman distance seen from the cell center
  bool pass() const { return forward_violations == 0 && backward_violations == 0; }
};

inline InclusionReport inclusion_audit(const DeltaLattice& lat, int n_cells, int samples_per_cell,
                                       uint64_t seed) {
  InclusionReport rep;
  rep.samples_per_cell = samples_per_cell;
  detail::Rng rng(seed);
  const auto& c = lat.cfg;
  double d2 = lat.cfg.delta * lat.cfg.delta;
  for (int cell = 0; cell < n_cells; ++cell) {
    int l = cell == 0 ? 0 : static_cast<int>(rng.uniform(c.l_min, c.l_max + 1));
    int j = cell == 0 ? 0 : static_cast<int>(rng.uniform(c.j_min, c.j_max + 1));
    ++rep.cells;
    complex zc = lat.point(l, j);
    Interval I = lat.I(l, j), J = lat.J(j);
    Interval Ip = lat.Iprime(l, j), Jp = lat.Jprime(j);
    auto check_fwd = [&](double xx, double yy) {
      double d = bergman_distance(zc, complex{xx, yy});
      rep.worst_forward = std::max(rep.worst_forward, d);
      if (!(d < d2)) ++rep.forward_violations;
    };
    // corners plus random interior points of the cell
    check_fwd(I.lo, J.lo);
    check_fwd(I.lo, J.hi);
    check_fwd(I.hi, J.lo);
    check_fwd(I.hi, J.hi);
    for (int s = 0; s < samples_per_cell; ++s)
      check_fwd(rng.uniform(I.lo, I.hi), rng.uniform(J.lo, J.hi));
    // rejection-sample the small Bergman ball
    int accepted = 0;
    double r_ball = d2 / 80.0;
    double reach = 2.5 * r_ball * zc.imag();
    while (accepted < samples_per_cell) {
      complex w{zc.real() + rng.uniform(-reach, reach), zc.imag() + rng.uniform(-reach, reach)};
      if (w.imag() <= 0.0) continue;
      if (bergman_distance(zc, w) >= r_ball) continue;
      ++accepted;
      if (!(Ip.contains(w.real()) && Jp.contains(w.imag()))) ++rep.backward_violations;
    }
  }
  return rep;
}

// smallest pairwise Bergman distance over a window of the lattice
inline double lattice_separation(const DeltaLattice& lat, int l_span = 12, int j_span = 6) {
  double best = 1e300;
  for (int j1 = -j_span; j1 <= j_span; ++j1)
    for (int l1 = -l_span; l1 <= l_span; ++l1)
      for (int j2 = j1; j2 <= j_span; ++j2)
        for (int l2 = (j2 == j1 ? l1 + 1 : -l_span); l2 <= l_span; ++l2)
          best = std::min(best, bergman_distance(lat.point(l1, j1), lat.point(l2, j2)));
  return best;
}

}  // namespace uhplab
