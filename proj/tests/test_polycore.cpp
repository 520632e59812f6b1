#include <doctest.h>

#include "flatcover/polyjson.hpp"
#include "flatcover/polynomial.hpp"
#include "support.hpp"

using namespace flatcover;
using fctest::max_coeff_diff;

namespace {

Polynomial x(int n, int j) { return Polynomial::variable(n, j); }

}  // namespace

TEST_CASE("eval examples") {
  Polynomial p = x(2, 0) * x(2, 0) + x(2, 1) * x(2, 1);
  CHECK(p(Vec::Ones(2)) == doctest::Approx(2.0));
  Polynomial q = x(3, 0) * x(3, 1) * x(3, 2);
  Vec v(3);
  v << 0.0, 5.0, 7.0;
  CHECK(q(v) == 0.0);
  CHECK_THROWS_AS(p(Vec::Ones(3)), InvalidArgument);
}

TEST_CASE("eval matches the naive monomial sum") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    Polynomial p = fctest::random_poly(rng, 3, 4);
    Vec v = fctest::random_point(rng, 3, 1.5);
    const double ref = fctest::naive_eval(p, v);
    CHECK(std::abs(p(v) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("partial examples") {
  Polynomial p = x(2, 0) * x(2, 0) * x(2, 1);
  CHECK(max_coeff_diff(partial(p, 0), 2.0 * x(2, 0) * x(2, 1)) == 0.0);
  CHECK(partial(x(2, 0) * x(2, 0), 1).is_zero());
  CHECK(partial(p, 0).degree() == p.degree() - 1);
  CHECK_THROWS_AS(partial(p, 2), InvalidArgument);
  CHECK_THROWS_AS(partial(p, -1), InvalidArgument);
}

TEST_CASE("partial agrees with central differences") {
  std::mt19937_64 rng(12);
  const double h = 1e-5;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 3;
    Polynomial p = fctest::random_poly(rng, n, 4);
    Vec v = fctest::random_point(rng, n);
    for (int j = 0; j < n; ++j) {
      Vec a = v, b = v;
      a[j] += h;
      b[j] -= h;
      const double fd = (p(a) - p(b)) / (2 * h);
      const double d = partial(p, j)(v);
      CHECK(std::abs(d - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("hessian_det examples") {
  Polynomial p = x(2, 0) * x(2, 1);
  Polynomial h = hessian_det(p);
  CHECK(h.effective_degree() <= 0);
  CHECK(h.coeff({0, 0}) == -1.0);
  Polynomial q = x(2, 0) * x(2, 0) + x(2, 1) * x(2, 1);
  CHECK(hessian_det(q).coeff({0, 0}) == 4.0);
  CHECK(hessian_det(q).effective_degree() == 0);
  Polynomial c = univariate(std::vector<double>{1, 2, 3, 4});
  CHECK(max_coeff_diff(hessian_det(c), univariate(std::vector<double>{6, 24})) == 0.0);
}

TEST_CASE("hessian_det of near-affine trivariates cancels exactly") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    Polynomial phi(3, 5);
    for (int i = 0; i < 3; ++i) {
      Polynomial a = fctest::random_poly(rng, 1, 4);
      Polynomial term = embed_variables(a, 3, std::vector<int>{0});
      if (i > 0) term = term * x(3, i);
      phi += term.with_degree(5);
    }
    CHECK(hessian_det(phi).is_zero());
  }
}

TEST_CASE("hessian_det commutes with translations") {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 30; ++t) {
    const int n = 2 + t % 2;
    Polynomial p = fctest::random_poly(rng, n, 4);
    AffineMap tau = AffineMap::identity(n);
    tau.offset = fctest::random_point(rng, n, 0.5);
    const Polynomial lhs = hessian_det(compose_affine(p, tau));
    const Polynomial rhs = compose_affine(hessian_det(p), tau);
    CHECK(max_coeff_diff(lhs, rhs) <= 1e-10);
  }
}

TEST_CASE("compose_affine examples") {
  Polynomial p = x(1, 0) * x(1, 0);
  CHECK(max_coeff_diff(compose_affine(p, AffineMap::identity(1)), p) == 0.0);
  AffineMap m = AffineMap::identity(1);
  m.matrix(0, 0) = 0.5;
  m.offset[0] = 0.5;
  CHECK(max_coeff_diff(compose_affine(p, m), univariate(std::vector<double>{0.25, 0.5, 0.25})) <= 1e-15);
  CHECK_THROWS_AS(compose_affine(p, AffineMap::identity(2)), InvalidArgument);
}

TEST_CASE("compose_affine agrees with evaluation") {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + t % 3;
    Polynomial p = fctest::random_poly(rng, n, 4);
    AffineMap m = AffineMap::identity(n);
    for (int i = 0; i < n; ++i) {
      m.offset[i] = fctest::random_point(rng, 1)[0];
      for (int j = 0; j < n; ++j) m.matrix(i, j) = fctest::random_point(rng, 1)[0];
    }
    const Polynomial c = compose_affine(p, m);
    CHECK(c.degree() == p.degree());
    for (int k = 0; k < 100; ++k) {
      Vec v = fctest::random_point(rng, n);
      CHECK(std::abs(c(v) - p(m(v))) <= 1e-10);
    }
  }
}

TEST_CASE("range_bound examples") {
  Polynomial p = x(1, 0) * x(1, 0);
  RangeBound r = range_bound(p, Box::cube(1));
  CHECK(r.lo <= 0.0);
  CHECK(r.hi >= 1.0);
  CHECK(r.hi <= 1.0 + 1e-9);
  CHECK(r.certified);
  const double d = 0.125;
  Box b{Vec::Zero(2), Vec::Constant(2, d)};
  RangeBound q = range_bound(x(2, 0) * x(2, 1), b);
  CHECK(q.hi >= d * d);
  CHECK(q.hi <= d * d + 1e-9);
  CHECK(q.lo <= 0.0);
  CHECK(q.lo >= -1e-9);
}

TEST_CASE("range_bound encloses dense grid extrema") {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.01, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + t % 2;
    Polynomial p = fctest::random_poly(rng, n, 3);
    Box b{Vec(n), Vec(n)};
    for (int i = 0; i < n; ++i) {
      b.lo[i] = u(rng);
      b.hi[i] = b.lo[i] + w(rng);
    }
    const RangeBound r = range_bound(p, b);
    const int g = t < 10 ? 200 : 24;
    double mn = INFINITY, mx = -INFINITY;
    Vec v(n);
    const int steps = n == 1 ? g * g : g;
    std::vector<int> idx(n, 0);
    for (;;) {
      for (int i = 0; i < n; ++i) v[i] = b.lo[i] + (b.hi[i] - b.lo[i]) * idx[i] / (steps - 1);
      const double f = p(v);
      mn = std::min(mn, f);
      mx = std::max(mx, f);
      int i = 0;
      while (i < n && ++idx[i] == steps) idx[i++] = 0;
      if (i == n) break;
    }
    CHECK(r.lo <= mn + 1e-12);
    CHECK(r.hi >= mx - 1e-12);
  }
}

TEST_CASE("strip_affine") {
  Polynomial p = Polynomial::constant(2, 3.0) + 2.0 * x(2, 0) + x(2, 0) * x(2, 1);
  AffineSplit s = strip_affine(p);
  CHECK(max_coeff_diff(s.affine, Polynomial::constant(2, 3.0) + 2.0 * x(2, 0)) == 0.0);
  CHECK(max_coeff_diff(s.rest, x(2, 0) * x(2, 1)) == 0.0);
  CHECK(strip_affine(Polynomial::constant(2, 1.0) + x(2, 1)).rest.is_zero());
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    Polynomial q = fctest::random_poly(rng, 3, 4);
    AffineSplit z = strip_affine(q);
    CHECK(max_coeff_diff(z.affine + z.rest, q) == 0.0);
    CHECK(z.affine.effective_degree() <= 1);
    z.rest.for_each_term([&](const MultiIndex& a, double c) {
      int tot = 0;
      for (int v : a) tot += v;
      if (tot <= 1) CHECK(c == 0.0);
    });
  }
}

TEST_CASE("normalize") {
  Normalized a = normalize(4.0 * x(1, 0) * x(1, 0));
  CHECK(a.scale >= 4.0);
  CHECK(a.scale <= 4.0 + 1e-8);
  CHECK(max_coeff_diff(a.unit, x(1, 0) * x(1, 0)) <= 1e-8);
  Normalized b = normalize(x(2, 0) + x(2, 1));
  CHECK(b.scale >= 2.0);
  CHECK(b.scale <= 2.0 + 1e-8);
  CHECK_THROWS_AS(normalize(Polynomial(2, 3)), DegenerateInput);
  std::mt19937_64 rng(18);
  for (int t = 0; t < 50; ++t) {
    Normalized c = normalize(fctest::random_poly(rng, 1 + t % 3, 4, 5.0));
    CHECK(range_bound(c.unit, Box::cube(c.unit.nvars())).hi <= 1.0 + 1e-9);
  }
}

TEST_CASE("Hessian determinant is Lipschitz with a certified constant") {
  // Per-(n, d) table of observed certified constants for unit-normalized inputs.
  const double table[4][5] = {{}, {0, 0, 0, 0, 64}, {0, 0, 0, 0, 4096}, {0, 0, 0, 400000, 0}};
  std::mt19937_64 rng(19);
  for (int t = 0; t < 40; ++t) {
    const int n = t % 2 == 0 ? 2 : 3;
    const int d = n == 2 ? 4 : 3;
    Polynomial p = normalize(fctest::random_poly(rng, n, d)).unit;
    Polynomial h = hessian_det(p);
    double l2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double b = abs_range_bound(partial(h, j), Box::cube(n)).hi;
      l2 += b * b;
    }
    const double l = std::sqrt(l2);
    CHECK(l <= table[n][d]);
    for (int k = 0; k < 50; ++k) {
      Vec a = fctest::random_point(rng, n), b = fctest::random_point(rng, n);
      CHECK(std::abs(h(a) - h(b)) <= l * (a - b).norm() + 1e-12);
    }
  }
}

TEST_CASE("rescaling inequality for the Hessian determinant") {
  std::mt19937_64 rng(20);
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + t % 3;
    Polynomial p = fctest::random_poly(rng, n, n == 3 ? 3 : 4);
    Parallelogram r = fctest::random_box_piece(rng, n, 0.01, 1.0);
    const double mu = r.width();
    const AffineMap lam = chart(r);
    Vec v = fctest::random_point(rng, n);
    const double inner = std::abs(hessian_det(compose_affine(p, lam))(v));
    const double outer = std::abs(hessian_det(p)(lam(v)));
    const double slack = 1e-9 * std::max(1.0, outer);
    CHECK(std::pow(mu, 2 * n) * outer <= inner + slack);
    CHECK(inner <= outer + slack);
  }
}

TEST_CASE("polynomial JSON round trip") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    Polynomial p = fctest::random_poly(rng, 1 + t % 3, 3);
    Polynomial q = polynomial_from_json(nlohmann::json::parse(to_json(p).dump()));
    CHECK(max_coeff_diff(p, q) == 0.0);
  }
  CHECK_THROWS_AS(polynomial_from_json(nlohmann::json::parse(R"({"nvars": 2})")), InvalidArgument);
  CHECK_THROWS_AS(polynomial_from_json(nlohmann::json::parse(R"({"nvars": 1, "degree": 1, "terms": [{"alpha": [2], "c": 1}]})")),
                  InvalidArgument);
}
