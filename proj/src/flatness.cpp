#include "flatcover/flatness.hpp"

#include <algorithm>
#include <cmath>

namespace flatcover {

namespace {

// Affine polynomial a(x) in original coordinates from its chart form b(t) and the chart x = M t + w.
Polynomial pull_back_affine(const Polynomial& chart_affine, const AffineMap& ch) {
  const int n = chart_affine.nvars();
  Vec g(n);
  MultiIndex a(static_cast<std::size_t>(n), 0);
  const double c0 = chart_affine.coeff(a);
  for (int j = 0; j < n; ++j) {
    a.assign(static_cast<std::size_t>(n), 0);
    a[j] = 1;
    g[j] = chart_affine.coeff(a);
  }
  // b(t) = c0 + g.t with t = M^{-1}(x - w)
  const AffineMap inv = ch.inverse();
  Vec grad = inv.matrix.transpose() * g;
  const double c = c0 + g.dot(inv.offset);
  std::vector<double> gv(grad.data(), grad.data() + n);
  return Polynomial::affine(c, gv);
}

}  // namespace

FlatnessCertificate flat_certificate(const Polynomial& phi, const Parallelogram& r, double delta,
                                     const FlatOptions& opt) {
  if (!(delta > 0.0)) throw InvalidArgument("scale must be positive");
  if (r.dim() != phi.nvars()) throw InvalidArgument("parallelogram dimension does not match polynomial");
  const AffineMap ch = chart(r);
  const Polynomial g = compose_affine(phi, ch);
  const AffineSplit s = strip_affine(g);
  FlatnessCertificate c;
  c.witness = pull_back_affine(s.affine, ch);
  c.bound = s.rest.is_zero() ? RangeBound{0.0, 0.0, true, false}
                             : abs_range_bound(s.rest, Box::cube(phi.nvars()), opt.range);
  c.scale = delta;
  c.constant = c.bound.hi / delta;
  c.ok = c.bound.hi <= opt.c_flat * delta;
  return c;
}

FlatnessCertificate check_witness(const Polynomial& phi, const Polynomial& witness, const Parallelogram& r,
                                  double delta, const FlatOptions& opt) {
  if (witness.effective_degree() > 1) throw InvalidArgument("witness must be affine");
  const AffineMap ch = chart(r);
  Polynomial diff = phi - witness;
  const Polynomial g = compose_affine(diff, ch);
  FlatnessCertificate c;
  c.witness = witness;
  c.bound = abs_range_bound(g, Box::cube(phi.nvars()), opt.range);
  c.scale = delta;
  c.constant = c.bound.hi / delta;
  c.ok = c.bound.hi <= opt.c_flat * delta;
  return c;
}

SublevelCertificate sublevel_certificate(const Polynomial& phi, const Parallelogram& r, double delta,
                                         double c_sub, const RangeOptions& opt) {
  if (!(delta > 0.0)) throw InvalidArgument("scale must be positive");
  const Polynomial g = compose_affine(phi, chart(r));
  SublevelCertificate c;
  RangeBound b = abs_range_bound(g, Box::cube(phi.nvars()), opt);
  c.bound = {0.0, b.hi, true, b.depth_capped};
  c.scale = delta;
  c.constant = b.hi / delta;
  c.ok = b.hi <= c_sub * delta;
  return c;
}

Rescaled rescale_flat(const Polynomial& phi, const Parallelogram& r, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  Rescaled out;
  out.chart = chart(r);
  const Polynomial g = compose_affine(phi, out.chart);
  AffineSplit s = strip_affine(g);
  out.affine = s.affine;
  if (s.rest.is_zero()) {
    out.c = 1.0;
    out.psi = Polynomial(phi.nvars(), phi.degree());
    out.degenerate = true;
    return out;
  }
  const RangeBound b = abs_range_bound(s.rest, Box::cube(phi.nvars()));
  out.c = b.hi / sigma;
  out.psi = s.rest * (1.0 / b.hi);
  return out;
}

std::vector<Polynomial> near_affine_parts(const Polynomial& phi, double tol) {
  const int n = phi.nvars();
  const int d = phi.degree();
  std::vector<Polynomial> a(static_cast<std::size_t>(n), Polynomial(1, std::max(0, d)));
  phi.for_each_term([&](const MultiIndex& al, double c) {
    if (std::abs(c) <= tol) return;
    int k = -1, others = 0;
    for (int i = 1; i < n; ++i)
      if (al[i] > 0) {
        others += al[i];
        k = i;
      }
    if (others > 1) throw InvalidArgument("polynomial is not near-affine (degree > 1 in x_2..x_n)");
    const int slot = others == 0 ? 0 : k;
    a[slot].add_coeff({al[0]}, c);
  });
  for (auto& p : a) p = p.trimmed();
  return a;
}

Polynomial assemble_near_affine(const std::vector<Polynomial>& a) {
  const int n = static_cast<int>(a.size());
  if (n < 1) throw InvalidArgument("need at least A_1");
  int d = 0;
  for (int i = 0; i < n; ++i) {
    if (a[i].nvars() != 1) throw InvalidArgument("near-affine parts must be univariate");
    d = std::max(d, a[i].degree() + (i > 0 ? 1 : 0));
  }
  Polynomial phi(n, d);
  for (int i = 0; i < n; ++i) {
    const auto c = univariate_coeffs(a[i]);
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (c[k] == 0.0) continue;
      MultiIndex al(static_cast<std::size_t>(n), 0);
      al[0] = static_cast<int>(k);
      if (i > 0) al[i] = 1;
      phi.add_coeff(al, c[k]);
    }
  }
  return phi;
}

Polynomial near_affine_h0(const std::vector<Polynomial>& a) {
  Polynomial h = Polynomial::constant(1, 0.0);
  for (std::size_t i = 1; i < a.size(); ++i) {
    Polynomial d = partial(a[i], 0);
    h += d * d;
  }
  return h;
}

DegenerateApprox degenerate_approximation(const Polynomial& phi, double sigma, DegeneracyContext ctx,
                                          bool two_variable) {
  const int n = phi.nvars();
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be non-negative");
  DegenerateApprox out;
  if (ctx == DegeneracyContext::NearAffine) {
    auto a = near_affine_parts(phi);
    const Polynomial h0 = near_affine_h0(a);
    const RangeBound hb = range_bound(h0, Box::cube(1));
    if (hb.hi > sigma * (1.0 + 1e-9) + 1e-15)
      throw InvalidArgument("degenerate approximation needs |H0| <= sigma on [-1,1]");
    std::vector<Polynomial> frozen = a;
    for (std::size_t i = 1; i < frozen.size(); ++i) {
      const double c0 = frozen[i].coeff({0});
      frozen[i] = Polynomial::constant(1, c0);
    }
    out.psi = assemble_near_affine(frozen).with_degree(std::max(phi.degree(), assemble_near_affine(frozen).degree()));
    out.psi = out.psi.trimmed();
    Polynomial diff = phi - out.psi;
    out.err = diff.is_zero() ? RangeBound{0.0, 0.0, true, false} : range_bound(diff, Box::cube(n));
    return out;
  }
  // Hessian context
  if (n == 1) {
    const Polynomial h = hessian_det(phi);
    const RangeBound hb = abs_range_bound(h, Box::cube(1));
    if (hb.hi > sigma * (1.0 + 1e-9) + 1e-15)
      throw InvalidArgument("degenerate approximation needs |H phi| <= sigma on [-1,1]");
    out.psi = strip_affine(phi).affine;
    Polynomial diff = phi - out.psi;
    out.err = diff.is_zero() ? RangeBound{0.0, 0.0, true, false} : range_bound(diff, Box::cube(1));
    return out;
  }
  if (n == 2 && two_variable) {
    // Drop the quadratic residue along the eigen-direction of D^2 phi(0) with the
    // smaller curvature; the certified error is reported, not assumed.
    const Polynomial h = hessian_det(phi);
    const RangeBound hb = abs_range_bound(h, Box::cube(2));
    if (hb.hi > sigma * (1.0 + 1e-9) + 1e-15)
      throw InvalidArgument("degenerate approximation needs |H phi| <= sigma on [-1,1]^2");
    Eigen::Matrix2d hess;
    const double z[2] = {0.0, 0.0};
    hess(0, 0) = partial(partial(phi, 0), 0)(z);
    hess(0, 1) = hess(1, 0) = partial(partial(phi, 0), 1)(z);
    hess(1, 1) = partial(partial(phi, 1), 1)(z);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hess);
    const int small = std::abs(es.eigenvalues()[0]) <= std::abs(es.eigenvalues()[1]) ? 0 : 1;
    const Eigen::Vector2d v = es.eigenvectors().col(small);
    const double lam = es.eigenvalues()[small];
    std::vector<double> g = {v[0], v[1]};
    Polynomial s = Polynomial::affine(0.0, g);
    out.psi = phi - (s * s) * (0.5 * lam);
    Polynomial diff = phi - out.psi;
    out.err = diff.is_zero() ? RangeBound{0.0, 0.0, true, false} : range_bound(diff, Box::cube(2));
    return out;
  }
  if (n == 2) throw Unsupported("two-variable degenerate approximation is behind a capability flag (disabled)");
  throw Unsupported("degenerate approximation for the Hessian determinant needs n <= 2; n >= 3 requires a normal-form witness");
}

DegeneracyProfile degeneracy_profile(const Polynomial& phi, DegeneracyContext ctx) {
  DegeneracyProfile p;
  const int n = phi.nvars();
  Polynomial h;
  if (ctx == DegeneracyContext::NearAffine) {
    h = embed_variables(near_affine_h0(near_affine_parts(phi)), n, std::vector<int>{0});
    p.beta = 0.5;
    p.approx_constant = std::max(1.0, static_cast<double>(n - 1));
  } else {
    h = hessian_det(phi);
    p.beta = 1.0;
    p.approx_constant = 1.0;
  }
  double lip = 0.0;
  for (int j = 0; j < n; ++j) {
    const RangeBound b = abs_range_bound(partial(h, j), Box::cube(n));
    lip += b.hi * b.hi;
  }
  p.lipschitz = std::max(1.0, std::sqrt(lip));
  p.rescale_exponent = 2.0 * n;
  return p;
}

}  // namespace flatcover
