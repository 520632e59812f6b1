#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "flatcover/geometry.hpp"
#include "flatcover/polynomial.hpp"

namespace fctest {

using namespace flatcover;

inline Polynomial random_poly(std::mt19937_64& rng, int n, int d, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Polynomial p(n, d);
  MultiIndex a;
  for (std::size_t k = 0; k < p.raw().size(); ++k) {
    p.decode(k, a);
    int tot = 0;
    for (int v : a) tot += v;
    if (tot <= d) p.set_coeff(a, scale * u(rng));
  }
  return p;
}

/// Coefficients scaled to unit l1 norm, which bounds sup |p| on the cube by 1.
inline Polynomial random_l1_poly(std::mt19937_64& rng, int n, int d) {
  Polynomial p = random_poly(rng, n, d);
  return p * (1.0 / p.l1_norm());
}

inline Vec random_point(std::mt19937_64& rng, int n, double half = 1.0) {
  std::uniform_real_distribution<double> u(-half, half);
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = u(rng);
  return x;
}

/// Naive sum of c_alpha x^alpha.
inline double naive_eval(const Polynomial& p, const Vec& x) {
  double s = 0.0;
  p.for_each_term([&](const MultiIndex& a, double c) {
    double t = c;
    for (std::size_t i = 0; i < a.size(); ++i) t *= std::pow(x[static_cast<int>(i)], a[i]);
    s += t;
  });
  return s;
}

inline Parallelogram random_box_piece(std::mt19937_64& rng, int n, double min_half, double max_half) {
  std::uniform_real_distribution<double> u(min_half, max_half);
  Parallelogram r = Parallelogram::cube(n);
  for (int i = 0; i < n; ++i) r.halflens[i] = u(rng);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  for (int i = 0; i < n; ++i) r.center[i] = c(rng) * (1.0 - r.halflens[i]);
  return r;
}

inline Parallelogram random_sheared_piece(std::mt19937_64& rng, int n, double min_half, double max_half) {
  Parallelogram r = random_box_piece(rng, n, min_half, max_half);
  std::normal_distribution<double> g;
  for (;;) {
    Mat u(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) u(i, j) = g(rng);
    for (int j = 0; j < n; ++j) u.col(j).normalize();
    if (std::abs(u.determinant()) > 0.3) {
      r.normals = u;
      return r;
    }
  }
}

inline double max_coeff_diff(const Polynomial& a, const Polynomial& b) {
  const int d = std::max(a.degree(), b.degree());
  return (a.with_degree(d) - b.with_degree(d)).max_abs_coeff();
}

}  // namespace fctest
