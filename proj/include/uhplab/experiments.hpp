#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "uhplab/atomic.hpp"
#include "uhplab/bergman.hpp"
#include "uhplab/config.hpp"
#include "uhplab/gridfn.hpp"
#include "uhplab/hilbert.hpp"
#include "uhplab/lattice.hpp"
#include "uhplab/quadrature.hpp"
#include "uhplab/report.hpp"
#include "uhplab/special.hpp"
#include "uhplab/weights.hpp"

// Experiment runner: every verification in the library is exposed as a named
// experiment taking a flat config, emitting CSV/JSON tables, and exiting
// nonzero when any in-run contract fails.

namespace uhplab {

struct ExperimentResult {
  int exit_code = 0;
  std::vector<Table> tables;
  std::string message;
};

inline std::vector<std::string> experiment_names() {
  return {"weights-check",  "interval-mass",  "forelli-rudin", "hilbert-norm",
          "schur-check",    "threshold-map",  "bergman-project", "adjoint-witness",
          "lattice-audit",  "sampling-check", "atomic-synthesize", "reconstruct",
          "derivative-check", "script-i"};
}

namespace detail {

inline void echo_config(Table& t, const ExperimentConfig& cfg, const std::string& experiment) {
  t.provenance.emplace_back("experiment", experiment);
  t.provenance.emplace_back("seed", std::to_string(cfg.seed));
  for (const auto& [k, v] : cfg.kv.effective()) t.provenance.emplace_back(k, v);
}

inline DeltaLattice lattice_from_config(const KeyValues& kv, int default_l = 200,
                                        int default_j = 40) {
  LatticeConfig c;
  c.delta = kv.get_double("delta", 0.5);
  c.gamma = kv.get_double("gamma", 0.0);  // 0 = midpoint default
  c.l_max = static_cast<int>(kv.get_int("l_span", default_l));
  c.l_min = -c.l_max;
  c.j_max = static_cast<int>(kv.get_int("j_span", default_j));
  c.j_min = -c.j_max;
  return DeltaLattice(c);
}

inline SpaceParams space_from_config(const KeyValues& kv) {
  return SpaceParams(kv.get_double("p", 2.0), kv.get_double("q", 2.0),
                     kv.get_double("alpha", 0.0), kv.get_double("beta", 0.0));
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ') {
      if (!cur.empty()) out.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::stod(cur));
  return out;
}

// --- individual experiments -------------------------------------------------

inline ExperimentResult exp_weights_check(const ExperimentConfig& cfg) {
  ExperimentResult res;
  Table t;
  t.name = "weights-check";
  t.columns = {"item", "kind", "pass", "worst_ratio", "detail"};
  bool all = true;
  for (const auto& phi : builtin_growth_functions()) {
    auto cert = growth_class_check(phi);
    all = all && cert.pass;
    t.add_row({phi.name(), std::string("class-certificate"), cert.pass, cert.worst_ratio,
               std::string(cert.monotone_ok ? "monotone-ok" : "monotone-fail")});
  }
  for (const auto& w : builtin_specs()) {
    double wmin = 1e300, inv_err = 0.0, doubling = 0.0;
    WeightSpec neg = w;
    neg.k = -w.k;
    for (int j = -30; j <= 30; ++j) {
      double tt = std::exp2(j);
      wmin = std::min(wmin, base_weight(w, tt));
      inv_err = std::max(inv_err, std::abs(weight_eval(w, tt) * weight_eval(neg, tt) - 1.0));
    }
    for (double x : {std::exp2(-10), 1.0, std::exp2(10)})
      doubling = std::max(doubling, weight_doubling_bound(w, x, 20));
    bool ok = wmin >= 1.0 && inv_err <= 1e-12 && std::isfinite(doubling);
    all = all && ok;
    t.add_row({w.name(), std::string("weight-spec"), ok, doubling,
               std::string("min_omega=") + fmt_double(wmin)});
  }
  echo_config(t, cfg, "weights-check");
  res.tables.push_back(std::move(t));
  res.exit_code = all ? 0 : 1;
  return res;
}

inline ExperimentResult exp_interval_mass(const ExperimentConfig& cfg) {
  ExperimentResult res;
  WeightSpec w = weight_from_config(cfg.kv);
  double beta = cfg.kv.get_double("beta", 0.0);
  int j_abs = static_cast<int>(cfg.kv.get_int("j_abs", 16));
  double bracket_max = cfg.kv.get_double("bracket_max", 50.0);
  double k0_tol = cfg.kv.get_double("k0_tol", 1e-8);
  Table t;
  t.name = "interval-mass";
  t.columns = {"t", "mass", "ratio", "error_estimate", "rel_err_k0"};
  double lo = 1e300, hi = 0.0;
  bool k0 = w.k == 0.0 || (w.eps1 == 0 && w.eps2 == 0);
  bool pass = true;
  for (int j = -j_abs; j <= j_abs; ++j) {
    double tt = std::exp2(j);
    auto r = interval_mass(w, beta, tt);
    double k0err = k0 ? std::abs(r.ratio * (1.0 + beta) - 1.0) : 0.0;
    if (k0 && k0err > k0_tol) pass = false;
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    t.add_row({tt, r.mass, r.ratio, r.error_estimate, k0err});
  }
  if (!(hi / lo <= bracket_max) || !(lo > 0.0)) pass = false;
  echo_config(t, cfg, "interval-mass");
  t.provenance.emplace_back("bracket", fmt_double(hi / lo));
  res.tables.push_back(std::move(t));
  res.exit_code = pass ? 0 : 1;
  return res;
}

inline ExperimentResult exp_forelli_rudin(const ExperimentConfig& cfg) {
  ExperimentResult res;
  WeightSpec w = weight_from_config(cfg.kv);
  double a_gap = cfg.kv.get_double("a", 1.0);
  double beta = cfg.kv.get_double("beta", 0.0);
  int j_abs = static_cast<int>(cfg.kv.get_int("j_abs", 8));
  double bracket_max = cfg.kv.get_double("bracket_max", 50.0);
  double k0_tol = cfg.kv.get_double("k0_tol", 1e-6);
  Table t;
  t.name = "forelli-rudin";
  t.columns = {"x", "value", "ratio", "error_estimate", "rel_err_k0"};
  double lo = 1e300, hi = 0.0;
  bool k0 = w.k == 0.0 || (w.eps1 == 0 && w.eps2 == 0);
  bool pass = true;
  for (int j = -j_abs; j <= j_abs; ++j) {
    double x = std::exp2(j);
    auto r = forelli_rudin(w, a_gap, beta, x);
    double k0err = 0.0;
    if (k0) {
      double exact = std::pow(x, -a_gap) * beta_fn(beta + 1.0, a_gap);
      k0err = std::abs(r.value - exact) / exact;
      if (k0err > k0_tol) pass = false;
    }
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    t.add_row({x, r.value, r.ratio, r.error_estimate, k0err});
  }
  if (!(hi / lo <= bracket_max) || !(lo > 0.0)) pass = false;
  echo_config(t, cfg, "forelli-rudin");
  t.provenance.emplace_back("bracket", fmt_double(hi / lo));
  res.tables.push_back(std::move(t));
  res.exit_code = pass ? 0 : 1;
  return res;
}

inline ExperimentResult exp_hilbert_norm(const ExperimentConfig& cfg) {
  ExperimentResult res;
  WeightSpec w = weight_from_config(cfg.kv);
  SpaceParams params = space_from_config(cfg.kv);
  int J = static_cast<int>(cfg.kv.get_int("J", 48));
  int ppo = static_cast<int>(cfg.kv.get_int("panels", 2));
  int nodes = static_cast<int>(cfg.kv.get_int("nodes", 8));
  double rel_tol = cfg.kv.get_double("classic_rel_tol", 0.02);
  Table t;
  t.name = "hilbert-norm";
  t.columns = {"J", "estimate", "converged", "iterations", "classic_ref", "rel_gap"};
  bool pass = true;
  double last = 0.0;
  bool k0 = w.k == 0.0 || (w.eps1 == 0 && w.eps2 == 0);
  bool classic = k0 && params.p == 2.0 && params.alpha == 0.0;
  double ref = classic ? beta_fn(params.beta + 0.5, 0.5) : 0.0;
  for (int Ji : {J / 3, 2 * J / 3, J}) {
    auto op = discretize_hilbert(params, w, Ji, ppo, nodes);
    auto est = norm_estimate(params, op);
    double gap = classic ? (ref - est.value) / ref : 0.0;
    t.add_row({static_cast<long long>(Ji), est.value, est.converged,
               static_cast<long long>(est.iterations), ref, gap});
    if (Ji == J) {
      last = est.value;
      if (!est.converged) pass = false;
      if (classic && !(est.value <= ref * (1.0 + 1e-9) && est.value >= (1.0 - rel_tol) * ref))
        pass = false;
    }
  }
  echo_config(t, cfg, "hilbert-norm");
  t.provenance.emplace_back("estimate", fmt_double(last));
  res.tables.push_back(std::move(t));
  res.exit_code = pass ? 0 : 1;
  return res;
}

inline ExperimentResult exp_schur_check(const ExperimentConfig& cfg) {
  ExperimentResult res;
  WeightSpec w = weight_from_config(cfg.kv);
  SpaceParams params = space_from_config(cfg.kv);
  int j_abs = static_cast<int>(cfg.kv.get_int("j_abs", 8));
  std::vector<double> grid;
  for (int j = -j_abs; j <= j_abs; ++j) grid.push_back(std::exp2(j));
  PanelScheme narrow{-12, 12, 16, 4};
  PanelScheme wide{-20, 20, 16, 4};
  auto r1 = schur_verify(params, w, grid, narrow);
  auto r2 = schur_verify(params, w, grid, wide);
  Table t;
  t.name = "schur-check";
  t.columns = {"t", "ratio1", "ratio2"};
  for (const auto& row : r2.rows) t.add_row({row.t, row.ratio1, row.ratio2});
  bool pass;
  if (r2.predicate) {
    pass = std::isfinite(r2.sup_ratio1) && std::isfinite(r2.sup_ratio2) &&
           r2.sup_ratio1 <= 1.05 * r1.sup_ratio1 + 1e-9 && r2.sup_ratio1 > 0.0;
  } else {
    pass = r2.sup_ratio1 >= 1.5 * r1.sup_ratio1 || r2.sup_ratio2 >= 1.5 * r1.sup_ratio2;
  }
  echo_config(t, cfg, "schur-check");
  t.provenance.emplace_back("predicate", r2.predicate ? "bounded" : "unbounded");
  t.provenance.emplace_back("sup_ratio1", fmt_double(r2.sup_ratio1));
  t.provenance.emplace_back("sup_ratio2", fmt_double(r2.sup_ratio2));
  res.tables.push_back(std::move(t));
  res.exit_code = pass ? 0 : 1;
  return res;
}

inline ExperimentResult exp_threshold_map(const ExperimentConfig& cfg) {
  ExperimentResult res;
  WeightSpec w = weight_from_config(cfg.kv);
  double p = cfg.kv.get_double("p", 2.0);
  double alpha = cfg.kv.get_double("alpha", 0.0);
  double b0 = cfg.kv.get_double("beta_min", -0.9);
  double b1 = cfg.kv.get_double("beta_max", 1.0);
  double bs = cfg.kv.get_double("beta_step", 0.1);
  double band = cfg.kv.get_double("critical_band", 0.05);
  std::vector<double> betas;
  for (double b = b0; b <= b1 + 1e-12; b += bs) betas.push_back(b);
  auto rows = threshold_classify(p, alpha, w, betas, band);
  Table t;
  t.name = "threshold-map";
  t.columns = {"p",        "alpha",   "beta",          "k",     "eps1",
               "eps2",     "family",  "verdict",       "norm_estimate", "trend",
               "margin",   "witness_exponent", "bergman_member"};
  bool pass = true;
  for (const auto& r : rows) {
    SpaceParams sp(2.0, p, alpha, r.beta);
    auto probe = witness_membership(sp, w);
    bool predicate = r.margin > 0.0;
    if (std::abs(r.margin) >= band) {
      if (r.verdict != (predicate ? "bounded" : "unbounded")) pass = false;
      if (probe.member != predicate) pass = false;
    }
    t.add_row({p, alpha, r.beta, w.k, static_cast<long long>(w.eps1),
               static_cast<long long>(w.eps2), w.phi.name(), r.verdict, r.norm_last,
               std::string(trend_name(r.trend)), r.margin, r.witness_exponent, probe.member});
  }
  echo_config(t, cfg, "threshold-map");
  res.tables.push_back(std::move(t));
  res.exit_code = pass ? 0 : 1;
  return res;
}

inline ExperimentResult exp_bergman_project(const ExperimentConfig& cfg) {
  ExperimentResult res;
  double beta = cfg.kv.get_double("beta", 1.0);
  double tol = cfg.kv.get_double("rel_tol", 1e-3);
  auto F = builtin_test_family()[3];  // (z+i)^{-4}
  auto grid = wrap_evaluator(F.evaluator(), F.min_order());
  KernelParams kp(beta);
  Table t;
  t.name = "bergman-project";
  t.columns = {"z_re", "z_im", "value_re", "value_im", "reference_re", "reference_im",
               "rel_err", "truncation_trend"};
  bool pass = true;
  for (auto zp : {ComplexPoint(0.0, 1.0), ComplexPoint(1.0, 2.0), ComplexPoint(-2.0, 0.5)}) {
    auto r = project(grid, beta, kp, zp);
    complex ref = F.eval(zp.z());
    double err = std::abs(r.value - ref) / std::abs(ref);
    double trend = r.windows[1] > 0.0 ? r.windows[2] / r.windows[1] : 0.0;
    if (err > tol || r.diverged) pass = false;
    t.add_row({zp.re, zp.im, r.value.real(), r.value.imag(), ref.real(), ref.imag(), err, trend});
  }
  echo_config(t, cfg, "bergman-project");
  res.tables.push_back(std::move(t));
  res.exit_code = pass ? 0 : 1;
  return res;
}

inline ExperimentResult exp_adjoint_witness(const ExperimentConfig& cfg) {
  ExperimentResult res;
  WeightSpec w = weight_from_config(cfg.kv);
  SpaceParams params = space_from_config(cfg.kv);
  double tol = cfg.kv.get_double("mean_value_tol", 1e-4);
  auto aw = adjoint_witness(params, w, ComplexPoint(0.0, 2.0));
  auto probe = witness_membership(params, w);
  bool predicate = params.alpha + 1.0 < params.q * (params.beta + 1.0);
  bool off_band = std::abs(probe.margin) >= 0.05;
  bool pass = aw.mean_value_rel_err <= tol && (!off_band || probe.member == predicate);
  Table t;
  t.name = "adjoint-witness";
  t.columns = {"quantity", "value"};
  t.add_row({std::string("mean_value_rel_err"), aw.mean_value_rel_err});
  t.add_row({std::string("c_numeric"), aw.c_numeric});
  t.add_row({std::string("witness_re_at_2i"), aw.value.real()});
  t.add_row({std::string("witness_im_at_2i"), aw.value.imag()});
  t.add_row({std::string("membership_exponent"), probe.exponent});
  t.add_row({std::string("member"), probe.member ? 1.0 : 0.0});
  t.add_row({std::string("predicate"), predicate ? 1.0 : 0.0});
  echo_config(t, cfg, "adjoint-witness");
  res.tables.push_back(std::move(t));
  res.exit_code = pass ? 0 : 1;
  return res;
}

inline ExperimentResult exp_lattice_audit(const ExperimentConfig& cfg) {
  ExperimentResult res;
  auto lat = lattice_from_config(cfg.kv);
  int samples = static_cast<int>(cfg.kv.get_int("samples", 10000));
  int cells = static_cast<int>(cfg.kv.get_int("cells", 100));
  int per_cell = static_cast<int>(cfg.kv.get_int("samples_per_cell", 25));
  auto cov = covering_audit(lat, samples, cfg.seed);
  auto inc = inclusion_audit(lat, cells, per_cell, cfg.seed + 1);
  Table t;
  t.name = "lattice-audit";
  t.columns = {"property", "value", "pass"};
  t.add_row({std::string("cover_y_violations"), static_cast<long long>(cov.cover_y_violations),
             cov.cover_y_violations == 0});
  t.add_row({std::string("cover_x_violations"), static_cast<long long>(cov.cover_x_violations),
             cov.cover_x_violations == 0});
  t.add_row({std::string("iprime_overlaps"), static_cast<long long>(cov.iprime_overlaps),
             cov.iprime_overlaps == 0});
  t.add_row({std::string("jprime_overlaps"), static_cast<long long>(cov.jprime_overlaps),
             cov.jprime_overlaps == 0});
  t.add_row({std::string("mult_I_max"), static_cast<long long>(cov.mult_I_max),
             cov.mult_I_max <= 4});
  t.add_row({std::string("mult_J_max"), static_cast<long long>(cov.mult_J_max), true});
  t.add_row({std::string("forward_violations"), static_cast<long long>(inc.forward_violations),
             inc.forward_violations == 0});
  t.add_row({std::string("backward_violations"), static_cast<long long>(inc.backward_violations),
             inc.backward_violations == 0});
  t.add_row({std::string("worst_forward_distance"), inc.worst_forward, true});
  t.add_row({std::string("separation"), lattice_separation(lat), true});
  echo_config(t, cfg, "lattice-audit");
  t.provenance.emplace_back("gamma_effective", fmt_double(lat.gamma));
  res.tables.push_back(std::move(t));
  res.exit_code = cov.pass() && inc.pass() ? 0 : 1;
  return res;
}

inline ExperimentResult exp_sampling_check(const ExperimentConfig& cfg) {
  ExperimentResult res;
  WeightSpec w = weight_from_config(cfg.kv);
  double p = cfg.kv.get_double("p", 2.0);
  double q = cfg.kv.get_double("q", 2.0);
  double alpha = cfg.kv.get_double("alpha", 0.0);
  double delta = cfg.kv.get_double("delta", 0.1);
  int y_oct = static_cast<int>(cfg.kv.get_int("y_octaves", 7));
  double spread_max = cfg.kv.get_double("spread_max", 10.0);
  LatticeConfig lc;
  lc.delta = delta;
  DeltaLattice probe(lc);
  lc.j_max = static_cast<int>(std::ceil(y_oct / probe.gamma));
  lc.j_min = -lc.j_max;
  lc.l_max = 1000000000;
  lc.l_min = -lc.l_max;
  DeltaLattice lat(lc);
  SequenceSpaceParams sp;
  sp.p = p;
  sp.q = q;
  sp.alpha = alpha;
  sp.spec = w;
  sp.gamma = lat.gamma;
  Table t;
  t.name = "sampling-check";
  t.columns = {"function", "lhs", "norm_q", "ratio_upper", "ratio_lower", "points",
               "tail_fraction", "truncation_warning"};
  bool pass = true;
  double lo = 1e300, hi = 0.0;
  for (const auto& F : builtin_test_family()) {
    auto sums = lattice_level_sums(F, lat, p);
    auto r = sampling_check(F, lat, sp, {}, &sums);
    if (!(r.lhs > 0.0) || !std::isfinite(r.ratio_upper) || r.truncation_warning) pass = false;
    lo = std::min(lo, r.ratio_upper);
    hi = std::max(hi, r.ratio_upper);
    t.add_row({F.label, r.lhs, r.norm_q, r.ratio_upper, r.ratio_lower,
               static_cast<long long>(r.points), r.tail_fraction, r.truncation_warning});
  }
  if (!(hi / lo <= spread_max)) pass = false;
  echo_config(t, cfg, "sampling-check");
  t.provenance.emplace_back("gamma_effective", fmt_double(lat.gamma));
  t.provenance.emplace_back("family_spread", fmt_double(hi / lo));
  res.tables.push_back(std::move(t));
  res.exit_code = pass ? 0 : 1;
  return res;
}

inline ExperimentResult exp_atomic_synthesize(const ExperimentConfig& cfg) {
  ExperimentResult res;
  WeightSpec w = weight_from_config(cfg.kv);
  double alpha = cfg.kv.get_double("alpha", 1.0);
  int draws = static_cast<int>(cfg.kv.get_int("draws", 3));
  int atoms = static_cast<int>(cfg.kv.get_int("atoms", 50));
  auto lat = lattice_from_config(cfg.kv, 40, 20);
  SequenceSpaceParams sp;
  sp.p = cfg.kv.get_double("p", 2.0);
  sp.q = cfg.kv.get_double("q", 2.0);
  sp.alpha = alpha;
  sp.spec = w;
  sp.gamma = lat.gamma;
  SpaceParams params(sp.p, sp.q, alpha, alpha);
  MixedScheme coarse;
  coarse.y = PanelScheme{-12, 12, 6, 1};
  coarse.x.nodes = 8;
  coarse.x.octaves = 8;
  detail::Rng rng(cfg.seed);
  Table t;
  t.name = "atomic-synthesize";
  t.columns = {"draw", "seq_norm", "mixed_norm", "ratio_q"};
  double lo = 1e300, hi = 0.0;
  for (int d = 0; d < draws; ++d) {
    CoefficientArray lam;
    for (int n = 0; n < atoms; ++n)
      lam.add(static_cast<int>(rng.uniform(lat.cfg.l_min / 2, lat.cfg.l_max / 2)),
              static_cast<int>(rng.uniform(lat.cfg.j_min / 2, lat.cfg.j_max / 2)),
              complex{rng.uniform(-1, 1), rng.uniform(-1, 1)});
    double nl = sequence_norm(lam, sp);
    auto nf = mixed_norm(wrap_evaluator(synthesize_evaluator(lam, alpha, sp, lat), 2.0 + alpha),
                         params, w, coarse);
    double ratio = std::pow(nf.value / nl, sp.q);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    t.add_row({static_cast<long long>(d), nl, nf.value, ratio});
  }
  bool pass = lo > 0.0 && hi / lo <= cfg.kv.get_double("spread_max", 10.0);
  echo_config(t, cfg, "atomic-synthesize");
  t.provenance.emplace_back("ratio_spread", fmt_double(hi / lo));
  res.tables.push_back(std::move(t));
  res.exit_code = pass ? 0 : 1;
  return res;
}

inline ExperimentResult exp_reconstruct(const ExperimentConfig& cfg) {
  ExperimentResult res;
  WeightSpec w = weight_from_config(cfg.kv);
  double delta = cfg.kv.get_double("delta", 0.1);
  double alpha = cfg.kv.get_double("alpha", 1.0);
  double rt_tol = cfg.kv.get_double("roundtrip_tol", 1e-6);
  double target_tol = cfg.kv.get_double("target_tol", 0.05);
  int atoms = static_cast<int>(cfg.kv.get_int("atoms", 50));
  LatticeConfig lc;
  lc.delta = delta;
  DeltaLattice probe(lc);
  lc.j_max = static_cast<int>(std::ceil(6.0 / probe.gamma));
  lc.j_min = -lc.j_max;
  lc.l_max = 1000000000;
  lc.l_min = -lc.l_max;
  DeltaLattice lat(lc);
  SequenceSpaceParams sp;
  sp.p = cfg.kv.get_double("p", 2.0);
  sp.q = cfg.kv.get_double("q", 2.0);
  sp.alpha = alpha;
  sp.spec = w;
  sp.gamma = lat.gamma;
  ReconstructOptions opt;
  Table t;
  t.name = "reconstruct";
  t.columns = {"case", "residual", "atoms", "rank", "pass"};
  auto dict = reconstruct_dictionary(lat, opt);
  detail::Rng rng(cfg.seed);
  CoefficientArray lam0;
  for (int n = 0; n < atoms; ++n) {
    auto [l, j] = dict[static_cast<size_t>(rng.uniform() * dict.size())];
    lam0.add(l, j, complex{rng.uniform(-1, 1), rng.uniform(-1, 1)});
  }
  auto rt = reconstruct(synthesize_evaluator(lam0, alpha, sp, lat), lat, sp, opt);
  bool rt_ok = rt.converged && rt.residual <= rt_tol;
  t.add_row({std::string("round-trip"), rt.residual, static_cast<long long>(rt.atoms),
             static_cast<long long>(rt.rank), rt_ok});
  auto F = builtin_test_family()[3];
  auto tg = reconstruct(F.evaluator(), lat, sp, opt);
  bool tg_ok = tg.converged && tg.residual <= target_tol;
  t.add_row({F.label, tg.residual, static_cast<long long>(tg.atoms),
             static_cast<long long>(tg.rank), tg_ok});
  echo_config(t, cfg, "reconstruct");
  res.tables.push_back(std::move(t));
  res.exit_code = rt_ok && tg_ok ? 0 : 1;
  return res;
}

inline ExperimentResult exp_derivative_check(const ExperimentConfig& cfg) {
  ExperimentResult res;
  double p = cfg.kv.get_double("p", 2.0);
  double q = cfg.kv.get_double("q", 2.0);
  double alpha = cfg.kv.get_double("alpha", 0.0);
  double bracket = cfg.kv.get_double("bracket", 100.0);
  auto klist = parse_list(cfg.kv.get_string("k_list", "-1,0,1"));
  SpaceParams params(p, q, alpha, 0.0);
  Table t;
  t.name = "derivative-check";
  t.columns = {"function", "k", "forward_ratio", "inverse_ratio"};
  bool pass = true;
  for (const auto& F : builtin_test_family())
    for (double k : klist) {
      WeightSpec w{1, 1, k, GrowthFunction::power(1.0)};
      auto r = derivative_char_check(F, params, w);
      if (!(r.forward >= 1.0 / bracket && r.forward <= bracket)) pass = false;
      t.add_row({F.label, k, r.forward, r.inverse});
    }
  echo_config(t, cfg, "derivative-check");
  res.tables.push_back(std::move(t));
  res.exit_code = pass ? 0 : 1;
  return res;
}

inline ExperimentResult exp_script_i(const ExperimentConfig& cfg) {
  ExperimentResult res;
  WeightSpec w = weight_from_config(cfg.kv);
  double delta = cfg.kv.get_double("delta", 0.5);
  LatticeConfig lc;
  lc.delta = delta;
  DeltaLattice probe(lc);
  lc.j_max = static_cast<int>(std::ceil(10.0 / probe.gamma));
  lc.j_min = -lc.j_max;
  lc.l_max = 1000000000;
  lc.l_min = -lc.l_max;
  DeltaLattice lat(lc);
  SequenceSpaceParams sp;
  sp.p = cfg.kv.get_double("p", 2.0);
  sp.q = cfg.kv.get_double("q", 2.0);
  sp.alpha = cfg.kv.get_double("alpha", 0.0);
  sp.spec = w;
  sp.gamma = lat.gamma;
  Table t;
  t.name = "script-i";
  t.columns = {"function", "value", "norm_q", "ratio", "tail_decay"};
  bool pass = true;
  for (size_t fi : {size_t{1}, size_t{3}}) {
    auto F = builtin_test_family()[fi];
    double v[3];
    int spans[3] = {7, 9, 11};
    for (int i = 0; i < 3; ++i) {
      ScriptIScheme sc;
      sc.j_lo = -spans[i];
      sc.j_hi = spans[i];
      v[i] = script_I(F, lat, sp, sc).value;
    }
    auto r = script_I(F, lat, sp);
    double tail_decay = std::abs(v[1] - v[0]) > 0.0
                            ? std::abs(v[2] - v[1]) / std::abs(v[1] - v[0])
                            : 0.0;
    if (!(r.value > 0.0) || !std::isfinite(r.ratio) || tail_decay > 0.6) pass = false;
    t.add_row({F.label, r.value, r.norm_q, r.ratio, tail_decay});
  }
  echo_config(t, cfg, "script-i");
  res.tables.push_back(std::move(t));
  res.exit_code = pass ? 0 : 1;
  return res;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const std::string& e = cfg.experiment;
  if (e == "weights-check") return detail::exp_weights_check(cfg);
  if (e == "interval-mass") return detail::exp_interval_mass(cfg);
  if (e == "forelli-rudin") return detail::exp_forelli_rudin(cfg);
  if (e == "hilbert-norm") return detail::exp_hilbert_norm(cfg);
  if (e == "schur-check") return detail::exp_schur_check(cfg);
  if (e == "threshold-map") return detail::exp_threshold_map(cfg);
  if (e == "bergman-project") return detail::exp_bergman_project(cfg);
  if (e == "adjoint-witness") return detail::exp_adjoint_witness(cfg);
  if (e == "lattice-audit") return detail::exp_lattice_audit(cfg);
  if (e == "sampling-check") return detail::exp_sampling_check(cfg);
  if (e == "atomic-synthesize") return detail::exp_atomic_synthesize(cfg);
  if (e == "reconstruct") return detail::exp_reconstruct(cfg);
  if (e == "derivative-check") return detail::exp_derivative_check(cfg);
  if (e == "script-i") return detail::exp_script_i(cfg);
  throw ConfigError("experiment", "unknown experiment '" + e + "'");
}

// Runs the experiment once per axis value and merges per-table rows in axis
// order with the axis prepended as a column.  Points run concurrently up to
// the worker cap; merge order never depends on completion order.
inline ExperimentResult sweep(const ExperimentConfig& base, const std::string& axis,
                              const std::vector<std::string>& values) {
  ExperimentResult merged;
  if (values.empty()) {
    Table t;
    t.name = base.experiment + "-sweep";
    t.columns = {axis};
    detail::echo_config(t, base, base.experiment + "-sweep");
    merged.tables.push_back(std::move(t));
    return merged;
  }
  std::vector<ExperimentResult> results(values.size());
  detail::parallel_for(
      static_cast<int>(values.size()),
      [&](int i) {
        ExperimentConfig cfg = base;
        cfg.kv.set(axis, values[i]);
        results[i] = run_experiment(cfg);
      },
      std::max(1, base.workers));
  for (size_t i = 0; i < values.size(); ++i) {
    merged.exit_code = std::max(merged.exit_code, results[i].exit_code);
    for (auto& t : results[i].tables) {
      Table* dst = nullptr;
      for (auto& mt : merged.tables)
        if (mt.name == t.name) dst = &mt;
      if (!dst) {
        Table nt;
        nt.name = t.name;
        nt.columns = t.columns;
        nt.columns.insert(nt.columns.begin(), axis);
        nt.provenance = t.provenance;
        nt.provenance.emplace_back("sweep_axis", axis);
        merged.tables.push_back(std::move(nt));
        dst = &merged.tables.back();
      }
      for (auto& row : t.rows) {
        std::vector<Cell> r;
        r.reserve(row.size() + 1);
        r.emplace_back(values[i]);
        for (auto& c : row) r.push_back(std::move(c));
        dst->add_row(std::move(r));
      }
    }
  }
  return merged;
}

// Writes each table of the result under out_dir and returns the paths.
inline std::vector<std::string> write_outputs(const ExperimentResult& res,
                                              const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  std::vector<std::string> paths;
  for (const auto& t : res.tables) {
    std::string ext = cfg.format == "json" ? ".json" : ".csv";
    fs::path p = fs::path(cfg.out_dir) / (t.name + ext);
    std::ofstream f(p);
    if (cfg.format == "json")
      f << t.to_json().dump(2) << "\n";
    else
      f << t.to_csv();
    paths.push_back(p.string());
  }
  return paths;
}

}  // namespace uhplab
