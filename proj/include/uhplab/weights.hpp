#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

// Log-type weights built from growth functions:
//   omega(t) = 1 + eps1*ln_+(Phi(1/t)) + eps2*ln_+(Phi(t)),
// used throughout as omega^k.  Growth functions carry a class certificate
// (upper/lower type with its constant) that is grid-verified, not symbolic.

namespace uhplab {

enum class GrowthFamily { power, power_log };
enum class GrowthClass { upper, lower };

struct GrowthFunction {
  GrowthFamily family = GrowthFamily::power;
  double s = 1.0;  // exponent
  double c = 1.0;  // leading coefficient (power family only)
  GrowthClass class_tag = GrowthClass::lower;
  double type_exponent = 1.0;  // the p of Phi(st) <= C t^p Phi(s)
  double type_constant = 1.0;  // the C above, >= 1

  double operator()(double t) const {
    if (!(t > 0.0)) throw std::domain_error("GrowthFunction: t must be positive");
    switch (family) {
      case GrowthFamily::power:
        return c * std::pow(t, s);
      case GrowthFamily::power_log:
        return std::pow(t, s) * std::log(std::numbers::e + t);
    }
    return 0.0;
  }

  // ln Phi(t) evaluated in log space; avoids the cancellation of
  // log(pow(...)) when Phi(t) is close to 1.
  double log_value(double t) const {
    if (!(t > 0.0)) throw std::domain_error("GrowthFunction: t must be positive");
    switch (family) {
      case GrowthFamily::power:
        return std::log(c) + s * std::log(t);
      case GrowthFamily::power_log:
        return s * std::log(t) + std::log(std::log(std::numbers::e + t));
    }
    return 0.0;
  }

  // p_Phi of the interval-mass lemmas: the upper-type exponent, or 1 for
  // lower-type functions.
  double p_phi() const { return class_tag == GrowthClass::upper ? type_exponent : 1.0; }

  std::string name() const {
    auto num = [](double v) {
      std::string s = std::to_string(v);
      s.erase(s.find_last_not_of('0') + 1);
      if (!s.empty() && s.back() == '.') s.pop_back();
      return s;
    };
    if (family == GrowthFamily::power) return "power(s=" + num(s) + " c=" + num(c) + ")";
    return "power_log(s=" + num(s) + ")";
  }

  static GrowthFunction power(double s, double c = 1.0);
  static GrowthFunction power_log(double s = 1.0);
};

struct PPhi {
  double value = 1.0;
  explicit PPhi(const GrowthFunction& phi) : value(phi.p_phi()) {
    if (!(value >= 1.0)) throw std::domain_error("PPhi: value must be >= 1");
  }
};

struct ClassCertificate {
  bool pass = false;
  double worst_ratio = 0.0;  // max of Phi(st) / (C_p t^p Phi(s)) over the grid
  bool ratio_ok = false;
  bool monotone_ok = false;    // Phi nondecreasing and Phi(t)/t monotone per class
  bool limits_ok = false;      // Phi(0+) -> 0 and Phi(t) -> inf at grid scale
};

namespace detail {

// Geometric grid 2^lo..2^hi, per_octave points per octave.
inline std::vector<double> geometric_grid(int lo, int hi, int per_octave = 1) {
  std::vector<double> g;
  g.reserve(static_cast<size_t>((hi - lo) * per_octave + 1));
  for (int i = lo * per_octave; i <= hi * per_octave; ++i)
    g.push_back(std::exp2(static_cast<double>(i) / per_octave));
  return g;
}

// Largest Phi(st) / (t^p Phi(s)) over the canonical class grid.
inline double class_ratio_max(const GrowthFunction& phi, GrowthClass tag, double p) {
  auto sgrid = geometric_grid(-20, 20);
  auto tgrid = tag == GrowthClass::upper ? geometric_grid(0, 20) : geometric_grid(-20, 0);
  double worst = 0.0;
  for (double s : sgrid)
    for (double t : tgrid) {
      double r = phi(s * t) / (std::pow(t, p) * phi(s));
      worst = std::max(worst, r);
    }
  return worst;
}

}  // namespace detail

inline GrowthFunction GrowthFunction::power(double s, double c) {
  if (!(s > 0.0) || !(c > 0.0)) throw std::domain_error("GrowthFunction::power: s, c must be positive");
  GrowthFunction phi;
  phi.family = GrowthFamily::power;
  phi.s = s;
  phi.c = c;
  phi.class_tag = s >= 1.0 ? GrowthClass::upper : GrowthClass::lower;
  phi.type_exponent = s;
  phi.type_constant = 1.0;  // Phi(st) = t^s Phi(s) exactly
  return phi;
}

inline GrowthFunction GrowthFunction::power_log(double s) {
  if (!(s >= 1.0)) throw std::domain_error("GrowthFunction::power_log: s must be >= 1");
  GrowthFunction phi;
  phi.family = GrowthFamily::power_log;
  phi.s = s;
  phi.class_tag = GrowthClass::upper;
  phi.type_exponent = s + 1.0;
  // No closed form is claimed for the constant; take the grid maximum with
  // a small safety factor so re-checks on refined grids still pass.
  phi.type_constant = 1.0;
  phi.type_constant = 1.0009765625 * detail::class_ratio_max(phi, phi.class_tag, phi.type_exponent);
  return phi;
}

inline double growth_eval(const GrowthFunction& phi, double t) { return phi(t); }

inline ClassCertificate growth_class_check(const GrowthFunction& phi) {
  ClassCertificate cert;
  double worst = detail::class_ratio_max(phi, phi.class_tag, phi.type_exponent);
  cert.worst_ratio = worst / phi.type_constant;
  cert.ratio_ok = worst <= phi.type_constant * (1.0 + 1e-12);

  auto grid = detail::geometric_grid(-20, 20, 2);
  bool mono = true;
  const double slack = 1e-12;
  for (size_t i = 1; i < grid.size(); ++i) {
    double a = phi(grid[i - 1]), b = phi(grid[i]);
    if (b < a * (1.0 - slack)) mono = false;  // Phi itself nondecreasing
    double ra = a / grid[i - 1], rb = b / grid[i];
    if (phi.class_tag == GrowthClass::upper && rb < ra * (1.0 - slack)) mono = false;
    if (phi.class_tag == GrowthClass::lower && rb > ra * (1.0 + slack)) mono = false;
  }
  cert.monotone_ok = mono;
  cert.limits_ok = phi(std::exp2(-20)) < 1e-3 && phi(std::exp2(20)) > 1e3;
  cert.pass = cert.ratio_ok && cert.monotone_ok && cert.limits_ok;
  return cert;
}

struct WeightSpec {
  int eps1 = 1;
  int eps2 = 1;
  double k = 1.0;
  GrowthFunction phi = GrowthFunction::power(1.0);

  std::string name() const {
    std::string ks = std::to_string(k);
    ks.erase(ks.find_last_not_of('0') + 1);
    if (!ks.empty() && ks.back() == '.') ks.pop_back();
    return phi.name() + " eps=(" + std::to_string(eps1) + " " + std::to_string(eps2) +
           ") k=" + ks;
  }
};

// Base weight omega(t) = T_Phi^eps(t) >= 1.
inline double base_weight(const WeightSpec& w, double t) {
  if (!(t > 0.0)) throw std::domain_error("base_weight: t must be positive");
  double v = 1.0;
  if (w.eps1) v += std::max(w.phi.log_value(1.0 / t), 0.0);
  if (w.eps2) v += std::max(w.phi.log_value(t), 0.0);
  return v;
}

// omega^k(t).
inline double weight_eval(const WeightSpec& w, double t) {
  if (w.k == 0.0 || (w.eps1 == 0 && w.eps2 == 0)) {
    if (!(t > 0.0)) throw std::domain_error("weight_eval: t must be positive");
    return 1.0;
  }
  return std::pow(base_weight(w, t), w.k);
}

// omega_0(y) = 1 + eps1*ln_+(1/y) + eps2*ln_+(y).
inline double omega0_eval(int eps1, int eps2, double y) {
  if (!(y > 0.0)) throw std::domain_error("omega0_eval: y must be positive");
  double ly = std::log(y);
  return 1.0 + (eps1 ? std::max(-ly, 0.0) : 0.0) + (eps2 ? std::max(ly, 0.0) : 0.0);
}

// max over 1 <= j <= jmax of omega(2^j x) / (j * omega(x)); the interval-mass
// lemmas only need this bounded uniformly on the tested range.
inline double weight_doubling_bound(const WeightSpec& w, double x, int jmax) {
  if (jmax < 1) throw std::domain_error("weight_doubling_bound: jmax must be >= 1");
  double wx = base_weight(w, x);
  double worst = 0.0;
  for (int j = 1; j <= jmax; ++j)
    worst = std::max(worst, base_weight(w, std::exp2(j) * x) / (j * wx));
  return worst;
}

inline std::vector<GrowthFunction> builtin_growth_functions() {
  return {GrowthFunction::power(1.0), GrowthFunction::power(2.0),
          GrowthFunction::power(0.5), GrowthFunction::power_log()};
}

// Canonical spec set exercised by the two-sided estimate experiments.
inline std::vector<WeightSpec> builtin_specs() {
  std::vector<WeightSpec> specs;
  for (const auto& phi : builtin_growth_functions())
    for (auto [e1, e2] : {std::pair{1, 1}, std::pair{1, 0}, std::pair{0, 1}})
      for (double k : {1.0, -1.0})
        specs.push_back(WeightSpec{e1, e2, k, phi});
  specs.push_back(WeightSpec{0, 0, 1.0, GrowthFunction::power(1.0)});  // omega == 1
  return specs;
}

}  // namespace uhplab
