#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <future>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace uhplab {

using complex = std::complex<double>;

// Point of the open upper half-plane.  The constructor enforces Im z > 0,
// so code holding a ComplexPoint never needs to re-check.
struct ComplexPoint {
  double re = 0.0;
  double im = 1.0;

  ComplexPoint() = default;
  ComplexPoint(double x, double y) : re(x), im(y) {
    if (!(y > 0.0)) throw std::domain_error("ComplexPoint: Im z must be positive");
  }
  explicit ComplexPoint(complex z) : ComplexPoint(z.real(), z.imag()) {}

  complex z() const { return {re, im}; }
};

// Exponents and measure powers of the mixed norm space L^{p,q}(omega^k dV_alpha).
struct SpaceParams {
  double p = 2.0;
  double q = 2.0;
  double alpha = 0.0;
  double beta = 0.0;

  SpaceParams() = default;
  SpaceParams(double p_, double q_, double alpha_, double beta_)
      : p(p_), q(q_), alpha(alpha_), beta(beta_) {
    validate();
  }

  void validate() const {
    if (!(p >= 1.0) || !(q >= 1.0))
      throw std::domain_error("SpaceParams: exponents must lie in [1,inf)");
    if (!(alpha > -1.0) || !(beta > -1.0))
      throw std::domain_error("SpaceParams: alpha and beta must exceed -1");
  }

  // Conjugate exponents; p = 1 maps to +inf.
  double p_conj() const { return p > 1.0 ? p / (p - 1.0) : std::numeric_limits<double>::infinity(); }
  double q_conj() const { return q > 1.0 ? q / (q - 1.0) : std::numeric_limits<double>::infinity(); }
};

namespace detail {

inline int default_workers() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Deterministic uniform draws; the bit-to-double map is fixed here rather
// than left to the standard library's distribution implementations.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(uint64_t seed) : gen(seed) {}
  double uniform() { return (gen() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double log_uniform(double a, double b) { return a * std::exp(uniform() * std::log(b / a)); }
};

// Runs fn(i) for i in [0, n).  Work items must be independent; results are
// expected to land in preallocated slots so that any later reduction happens
// in index order and output stays deterministic.
template <class Fn>
void parallel_for(int n, Fn&& fn, int workers = default_workers()) {
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  int nt = std::min(workers, n);
  pool.reserve(nt - 1);
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace detail

}  // namespace uhplab
