#include <algorithm>
#include <cmath>
#include <optional>

#include "engine_internal.hpp"
#include "flatcover/polyjson.hpp"
#include "flatcover/roots.hpp"

namespace flatcover {

namespace detail {

namespace {

Vec with_coord(const Vec& xp, int j, double t) {
  const int n = static_cast<int>(xp.size()) + 1;
  Vec x(n);
  for (int i = 0, k = 0; i < n; ++i) x[i] = i == j ? t : xp[k++];
  return x;
}

// Root of t -> phi(x', t) in [a, b] closest to `target`.
std::optional<double> fibre_root(const Polynomial& phi, const Vec& xp, int j, double a, double b, double target) {
  Polynomial p = phi;
  for (int i = phi.nvars() - 1, k = static_cast<int>(xp.size()) - 1; i >= 0; --i)
    if (i != j) p = restrict_axis(p, i, xp[k--]);
  std::optional<double> best;
  if (p.is_zero()) return target;
  for (double r : real_roots(p, a, b))
    if (!best || std::abs(r - target) < std::abs(*best - target)) best = r;
  return best;
}

int sign_of(const RangeBound& b) { return b.lo > 0.0 ? 1 : (b.hi < 0.0 ? -1 : 0); }

Box make_box(const Vec& cell_lo, const Vec& cell_hi, int j, double tlo, double thi) {
  return Box{with_coord(cell_lo, j, tlo), with_coord(cell_hi, j, thi)};
}

}  // namespace

bool slab_cover(const SlabJob& job, const Vec& cell_lo, const Vec& cell_hi, std::vector<Piece>& out, SlabStats& st,
                int depth) {
  const Polynomial& phi = *job.phi;
  const EngineConfig& cfg = *job.cfg;
  const int n = phi.nvars();
  const int j = job.j;
  const double delta = job.delta;
  const Box base = make_box(cell_lo, cell_hi, j, job.tlo, job.thi);
  const RangeBound e = range_bound(phi, base, cfg.range);
  if (e.lo > delta || e.hi < -delta) {
    ++st.discarded;
    return true;
  }
  if (e.abs_max() <= cfg.c_sub * delta) {
    SublevelCertificate sc;
    sc.bound = {0.0, e.abs_max(), true, e.depth_capped};
    sc.scale = delta;
    sc.constant = e.abs_max() / delta;
    sc.ok = true;
    out.push_back({Parallelogram::from_box(base), to_piece_certificate(sc), depth});
    ++st.cells;
    return true;
  }
  const Vec c = 0.5 * (cell_lo + cell_hi);
  const Vec h = 0.5 * (cell_hi - cell_lo);
  int split_axis = -1;
  h.maxCoeff(&split_axis);
  const bool can_split = 0.5 * h[split_axis] >= delta * (1.0 - 1e-12);
  auto split = [&]() {
    if (out.size() > cfg.piece_budget) throw EngineError("piece budget exceeded in slab refinement");
    Vec mid_hi = cell_hi, mid_lo = cell_lo;
    mid_hi[split_axis] = c[split_axis];
    mid_lo[split_axis] = c[split_axis];
    const bool a = slab_cover(job, cell_lo, mid_hi, out, st, depth + 1);
    const bool b = slab_cover(job, mid_lo, cell_hi, out, st, depth + 1);
    return a && b;
  };
  // after a failed slab: halve the longest side, the fibre range included
  const double ht = 0.5 * (job.thi - job.tlo);
  const bool can_split_t = 0.5 * ht >= delta * (1.0 - 1e-12);
  auto refine = [&](auto&& fallback) {
    if (can_split_t && (!can_split || ht > h[split_axis])) {
      SlabJob a = job, b = job;
      a.thi = b.tlo = job.tlo + ht;
      const bool ra = slab_cover(a, cell_lo, cell_hi, out, st, depth + 1);
      const bool rb = slab_cover(b, cell_lo, cell_hi, out, st, depth + 1);
      return ra && rb;
    }
    return can_split ? split() : fallback();
  };
  auto emit_box = [&]() {
    Piece p = sublevel_piece(phi, Parallelogram::from_box(base), delta, cfg, depth);
    const bool ok = p.certificate.bound.hi <= cfg.c_sub * delta;
    if (!ok) ++st.failed;
    out.push_back(std::move(p));
    return ok;
  };

  const double span = job.thi - job.tlo;
  const double ea = job.tlo - span, eb = job.thi + span;
  const std::optional<double> t0 = fibre_root(phi, c, j, ea, eb, 0.5 * (job.tlo + job.thi));
  if (!t0) return refine(emit_box);

  const Vec x0 = with_coord(c, j, *t0);
  Vec grad(n);
  for (int i = 0; i < n; ++i) grad[i] = partial(phi, i)(x0);
  const double dj = grad[j];
  if (dj == 0.0) return refine(emit_box);
  st.dominance = std::min(st.dominance, std::abs(dj) / grad.norm());
  Vec g(n - 1);
  for (int i = 0, k = 0; i < n; ++i)
    if (i != j) g[k++] = -grad[i] / dj;
  const double s = std::sqrt(1.0 + g.squaredNorm());

  // deviation of the root from its tangent plane at the cell corners
  double dev = 0.0;
  const int m = n - 1;
  for (int mask = 0; mask < (1 << m); ++mask) {
    Vec corner = c;
    for (int k = 0; k < m; ++k) corner[k] += (mask >> k & 1) ? h[k] : -h[k];
    const double lt = *t0 + g.dot(corner - c);
    const std::optional<double> r = fibre_root(phi, corner, j, ea, eb, lt);
    dev = std::max(dev, r ? std::abs(*r - lt) : INFINITY);
  }
  if (job.flat_target > 0.0 && dev > job.flat_target && can_split) return split();
  if (!std::isfinite(dev)) return refine(emit_box);

  const int sigma = dj > 0 ? 1 : -1;
  const double lspan = g.cwiseAbs().dot(h);
  const double lmin = *t0 - lspan, lmax = *t0 + lspan;
  double eta = std::max(delta * s * (1.0 + 1e-9), 1.1 * delta / std::abs(dj) + 1.5 * dev);
  std::optional<Piece> last;
  for (int attempt = 0; attempt < 3; ++attempt, eta *= 1.5) {
    const Parallelogram slab = slab_shape(c, h, j, *t0, g, eta);
    const Box bb = slab.bounding_box();
    if (bb.lo.minCoeff() < -2.0 || bb.hi.maxCoeff() > 2.0) break;
    // monotonicity of phi along x_j on the parts of the slab outside the base box
    bool mono = true;
    if (lmin - eta < job.tlo)
      mono = mono && sign_of(range_bound(partial(phi, j), make_box(cell_lo, cell_hi, j, lmin - eta, job.tlo),
                                         cfg.range)) == sigma;
    if (lmax + eta > job.thi)
      mono = mono && sign_of(range_bound(partial(phi, j), make_box(cell_lo, cell_hi, j, job.thi, lmax + eta),
                                         cfg.range)) == sigma;
    if (!mono) break;
    const Polynomial ps = compose_affine(phi, chart(slab));
    const RangeBound up = range_bound(restrict_axis(ps, j, 1.0), Box::cube(n - 1), cfg.range);
    const RangeBound dn = range_bound(restrict_axis(ps, j, -1.0), Box::cube(n - 1), cfg.range);
    const bool faces = sigma > 0 ? (up.lo > delta && dn.hi < -delta) : (up.hi < -delta && dn.lo > delta);
    const RangeBound sup = abs_range_bound(ps, Box::cube(n), cfg.range);
    SublevelCertificate sc;
    sc.bound = {0.0, sup.hi, true, sup.depth_capped};
    sc.scale = delta;
    sc.constant = sup.hi / delta;
    sc.ok = sup.hi <= cfg.c_sub * delta;
    last = Piece{slab, to_piece_certificate(sc), depth};
    if (!faces) continue;
    if (!sc.ok) break;
    ++st.cells;
    out.push_back(std::move(*last));
    return true;
  }
  return refine([&]() {
    if (!last) return emit_box();
    ++st.failed;
    out.push_back(std::move(*last));
    return false;
  });
}

}  // namespace detail

namespace {

struct BoxStats {
  int boxes = 0;
  int discarded = 0;
  int failed = 0;
};

void sublevel_boxes(const Polynomial& phi, const std::vector<Polynomial>& grad, double delta, const EngineConfig& cfg,
                    const Vec& lo, const Vec& hi, std::vector<Piece>& out, BoxStats& bs, detail::SlabStats& ss,
                    int depth) {
  const int n = phi.nvars();
  const Box b{lo, hi};
  const RangeBound e = range_bound(phi, b, cfg.range);
  if (e.lo > delta || e.hi < -delta) {
    ++bs.discarded;
    return;
  }
  const Vec c = 0.5 * (lo + hi);
  const Vec h = 0.5 * (hi - lo);
  if (e.abs_max() <= cfg.c_sub * delta) {
    SublevelCertificate sc;
    sc.bound = {0.0, e.abs_max(), true, e.depth_capped};
    sc.scale = delta;
    sc.constant = e.abs_max() / delta;
    sc.ok = true;
    out.push_back({Parallelogram::from_box(b), to_piece_certificate(sc), depth});
    ++bs.boxes;
    return;
  }
  int axis = -1;
  h.maxCoeff(&axis);
  const bool can_split = 0.5 * h[axis] >= delta * (1.0 - 1e-12);
  // dominant direction at the centre: |d_j phi(c)| >= |grad phi(c)| / sqrt(n) >= (2n)^{-1/2} |grad phi(c)|
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = grad[i](c);
  int j = 0;
  v.cwiseAbs().maxCoeff(&j);
  const RangeBound dj = range_bound(grad[j], b, cfg.range);
  const bool signed_j = dj.lo > 0.0 || dj.hi < 0.0;
  if (signed_j && n >= 2) {
    if (std::abs(v[j]) < std::sqrt(1.0 / (2.0 * n)) * v.norm()) throw EngineError("dominant-index selection violated");
    detail::SlabJob job{&phi, j, delta, lo[j], hi[j], 0.0, &cfg};
    Vec clo(n - 1), chi(n - 1);
    for (int i = 0, k = 0; i < n; ++i)
      if (i != j) {
        clo[k] = lo[i];
        chi[k++] = hi[i];
      }
    detail::slab_cover(job, clo, chi, out, ss, depth);
    return;
  }
  if (can_split) {
    if (out.size() > cfg.piece_budget) throw EngineError("piece budget exceeded in sublevel recursion");
    Vec mhi = hi, mlo = lo;
    mhi[axis] = c[axis];
    mlo[axis] = c[axis];
    sublevel_boxes(phi, grad, delta, cfg, lo, mhi, out, bs, ss, depth + 1);
    sublevel_boxes(phi, grad, delta, cfg, mlo, hi, out, bs, ss, depth + 1);
    return;
  }
  SublevelCertificate sc;
  sc.bound = {0.0, e.abs_max(), true, e.depth_capped};
  sc.scale = delta;
  sc.constant = e.abs_max() / delta;
  sc.ok = false;
  out.push_back({Parallelogram::from_box(b), to_piece_certificate(sc), depth});
  ++bs.failed;
}

Cover sublevel_on_cube(const Polynomial& phi, double delta, double eps, const EngineConfig& cfg) {
  const int n = phi.nvars();
  Cover cov;
  cov.nvars = n;
  cov.scale = delta;
  cov.eps = eps;
  cov.kind = CoverKind::Sublevel;
  cov.provenance.push_back({"sublevel_cover", delta, "d=" + std::to_string(phi.effective_degree())});
  if (phi.is_zero()) {
    cov.pieces.push_back(detail::sublevel_piece(phi, Parallelogram::cube(n), delta, cfg));
    return cov;
  }
  if (n == 1) {
    Cover c1 = sublevel1(phi, delta, -1.0, 1.0, cfg);
    c1.eps = eps;
    c1.provenance.insert(c1.provenance.begin(), cov.provenance.front());
    return c1;
  }
  std::vector<Polynomial> grad;
  for (int i = 0; i < n; ++i) grad.push_back(partial(phi, i));
  BoxStats bs;
  detail::SlabStats ss;
  sublevel_boxes(phi, grad, delta, cfg, Vec::Constant(n, -1.0), Vec::Constant(n, 1.0), cov.pieces, bs, ss, 0);
  cov.provenance.push_back({"sublevel.boxes", delta,
                            "emitted=" + std::to_string(bs.boxes) + " discarded=" + std::to_string(bs.discarded) +
                                " failed=" + std::to_string(bs.failed)});
  cov.provenance.push_back({"sublevel.slabs", delta,
                            "emitted=" + std::to_string(ss.cells) + " discarded=" + std::to_string(ss.discarded) +
                                " failed=" + std::to_string(ss.failed) +
                                " dominance=" + format_double(ss.dominance)});
  detail::check_budget(cov.pieces.size(), cfg, cov.provenance);
  cov.canonicalize();
  return cov;
}

Parallelogram lift_graph_piece(const Parallelogram& t, const Polynomial& witness, double eta) {
  const int m = t.dim();
  const int n = m + 1;
  Vec g(m);
  for (int i = 0; i < m; ++i) {
    MultiIndex a(static_cast<std::size_t>(m), 0);
    a[i] = 1;
    g[i] = witness.coeff(a);
  }
  const double a0 = witness(t.center);
  Parallelogram r;
  r.center = Vec(n);
  r.center.head(m) = t.center;
  r.center[m] = a0;
  r.normals = Mat::Zero(n, n);
  r.normals.topLeftCorner(m, m) = t.normals;
  Vec nrm(n);
  nrm.head(m) = -g;
  nrm[m] = 1.0;
  const double s = nrm.norm();
  r.normals.col(m) = nrm / s;
  r.halflens = Vec(n);
  r.halflens.head(m) = t.halflens;
  r.halflens[m] = eta / s;
  return r;
}

}  // namespace

Cover sublevel_cover(const Polynomial& phi, double delta, double eps, std::optional<Parallelogram> r,
                     const EngineConfig& cfg) {
  detail::check_request(phi, delta, eps, cfg);
  const int n = phi.nvars();
  if (!r || (r->is_axis_aligned() && (r->center.cwiseAbs().maxCoeff() == 0.0) &&
             (r->halflens.array() == 1.0).all()))
    return sublevel_on_cube(phi, delta, eps, cfg);
  r->validate();
  // cover phi o chart(R) on the cube, then map back; widths are restored by padding
  const AffineMap ch = chart(*r);
  Cover inner = sublevel_on_cube(compose_affine(phi, ch), delta, eps, cfg);
  Cover cov;
  cov.nvars = n;
  cov.scale = delta;
  cov.eps = eps;
  cov.kind = CoverKind::Sublevel;
  cov.provenance = inner.provenance;
  cov.provenance.push_back({"sublevel.chart", delta, "R width=" + format_double(r->width())});
  for (const Piece& p : inner.pieces) {
    Parallelogram s = map_parallelogram(ch, p.shape);
    if (s.width() < delta) s = pad_to_width(s, delta);
    cov.pieces.push_back(detail::sublevel_piece(phi, s, delta, cfg, p.depth));
  }
  cov.canonicalize();
  return cov;
}

PseudoPolynomial PseudoPolynomial::make(const Polynomial& phi, std::optional<Box> box, double floor) {
  const int n = phi.nvars();
  if (n < 2) throw InvalidArgument("pseudo-polynomials need at least two variables");
  PseudoPolynomial pp;
  pp.phi = phi;
  pp.box = box.value_or(Box::cube(n));
  const RangeBound d = range_bound(partial(phi, n - 1), pp.box);
  pp.m = d.lo > 0.0 ? d.lo : (d.hi < 0.0 ? -d.hi : 0.0);
  if (!(pp.m >= floor))
    throw InvalidArgument("d phi / d x_n is not certified away from zero on the box (min " + format_double(pp.m) + ")");
  return pp;
}

std::optional<double> PseudoPolynomial::solve(const Vec& xprime, double tol, int max_steps) const {
  const int n = phi.nvars();
  const double lo = box.lo[n - 1], hi = box.hi[n - 1];
  const double span = hi - lo;
  Vec x(n);
  x.head(n - 1) = xprime;
  x[n - 1] = 0.5 * (lo + hi);
  const Polynomial d = partial(phi, n - 1);
  for (int it = 0; it < max_steps; ++it) {
    const double f = phi(x);
    if (std::abs(f) <= tol) return x[n - 1];
    const double df = d(x);
    if (df == 0.0) return std::nullopt;
    x[n - 1] -= f / df;
    if (x[n - 1] < lo - span || x[n - 1] > hi + span) return std::nullopt;
  }
  return std::abs(phi(x)) <= tol ? std::optional<double>(x[n - 1]) : std::nullopt;
}

Cover pseudo_cover(const PseudoPolynomial& pp, double delta, double eps, const EngineConfig& cfg) {
  detail::check_request(pp.phi, delta, eps, cfg);
  const int n = pp.phi.nvars();
  const int j = n - 1;
  Cover cov;
  cov.nvars = n;
  cov.scale = delta;
  cov.eps = eps;
  cov.kind = CoverKind::Sublevel;
  cov.provenance.push_back({"pseudo_cover", delta, "m=" + format_double(pp.m)});

  // x'-cells refined along the ladder delta_i until the implicit root is flat at delta_i / 4
  struct Cell {
    Vec lo, hi;
  };
  std::vector<Cell> cells{{pp.box.lo.head(n - 1), pp.box.hi.head(n - 1)}};
  auto deviation = [&](const Cell& cl) {
    const Vec c = 0.5 * (cl.lo + cl.hi), h = 0.5 * (cl.hi - cl.lo);
    const std::optional<double> t0 = pp.solve(c, delta / 10.0);
    if (!t0) throw EngineError("Newton failed to converge at a cell centre", cov.provenance);
    Vec x(n);
    x.head(n - 1) = c;
    x[j] = *t0;
    const double dj = partial(pp.phi, j)(x);
    Vec g(n - 1);
    for (int i = 0; i < n - 1; ++i) g[i] = -partial(pp.phi, i)(x) / dj;
    double dev = 0.0;
    // corners and edge midpoints
    const int m = n - 1;
    int pts = 1;
    for (int k = 0; k < m; ++k) pts *= 3;
    for (int q = 0; q < pts; ++q) {
      Vec y = c;
      int r = q;
      for (int k = 0; k < m; ++k, r /= 3) y[k] += (r % 3 - 1) * h[k];
      const std::optional<double> t = pp.solve(y, delta / 10.0);
      if (!t) throw EngineError("Newton failed to converge inside the box", cov.provenance);
      dev = std::max(dev, std::abs(*t - *t0 - g.dot(y - c)));
    }
    return dev;
  };
  for (double di : stage_scales(delta, eps)) {
    std::vector<Cell> next;
    std::vector<Cell> work = cells;
    while (!work.empty()) {
      Cell cl = work.back();
      work.pop_back();
      const Vec h = 0.5 * (cl.hi - cl.lo);
      int axis = 0;
      h.maxCoeff(&axis);
      if (deviation(cl) <= 0.25 * di * (1.0 + 1e-9) || 0.5 * h[axis] < delta) {
        next.push_back(cl);
        continue;
      }
      Cell a = cl, b = cl;
      a.hi[axis] = b.lo[axis] = 0.5 * (cl.lo[axis] + cl.hi[axis]);
      work.push_back(b);
      work.push_back(a);
      if (next.size() + work.size() > cfg.piece_budget) throw EngineError("piece budget exceeded", cov.provenance);
    }
    cells = std::move(next);
    cov.provenance.push_back({"pseudo.stage", di, "cells=" + std::to_string(cells.size())});
  }
  detail::SlabJob job{&pp.phi, j, delta, pp.box.lo[j], pp.box.hi[j], 0.25 * delta, &cfg};
  detail::SlabStats st;
  for (const Cell& cl : cells) detail::slab_cover(job, cl.lo, cl.hi, cov.pieces, st, 0);
  cov.provenance.push_back({"pseudo.slabs", delta,
                            "emitted=" + std::to_string(st.cells) + " discarded=" + std::to_string(st.discarded) +
                                " failed=" + std::to_string(st.failed)});
  cov.canonicalize();
  return cov;
}

Cover graph_sublevel_cover(const Polynomial& p, double delta, double eps, std::optional<Parallelogram> r,
                           const EngineConfig& cfg) {
  const int m = p.nvars();
  const int n = m + 1;
  if (m < 1) throw InvalidArgument("P needs at least one variable");
  if (n > cfg.max_dim) throw Unsupported("no uniform cover available for dimension " + std::to_string(m));
  const Parallelogram dom = r.value_or(Parallelogram::cube(n));
  dom.validate();
  const Box bb = dom.bounding_box();
  Parallelogram proj = Parallelogram::from_box(Box{bb.lo.head(m), bb.hi.head(m)});
  const double xlo = bb.lo[m], xhi = bb.hi[m];

  Cover cov;
  cov.nvars = n;
  cov.scale = delta;
  cov.eps = eps;
  cov.kind = CoverKind::Sublevel;
  cov.provenance.push_back({"graph_sublevel_cover", delta, ""});
  // the flat cover runs at delta/16 so that the lifted slabs keep |x_n - P| <= 4 delta
  const double inner = delta / 16.0;
  std::vector<Piece> flat = detail::uniform_pieces(p, proj, inner, eps, cfg, cov.provenance);

  std::vector<int> target(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) target[i] = i;
  Polynomial phi = Polynomial::variable(n, m) - embed_variables(p, n, target);
  for (const Piece& t : flat) {
    const Polynomial& w = *t.certificate.witness;
    Vec g(m);
    for (int i = 0; i < m; ++i) {
      MultiIndex a(static_cast<std::size_t>(m), 0);
      a[i] = 1;
      g[i] = w.coeff(a);
    }
    const double s = std::sqrt(1.0 + g.squaredNorm());
    const double eta = std::max(t.certificate.bound.hi + delta, delta * s * (1.0 + 1e-9));
    Parallelogram slab = lift_graph_piece(t.shape, w, eta);
    const Box sb = slab.bounding_box();
    if (sb.hi[m] < xlo || sb.lo[m] > xhi) continue;
    cov.pieces.push_back(detail::sublevel_piece(phi, slab, delta, cfg, t.depth));
  }
  detail::check_budget(cov.pieces.size(), cfg, cov.provenance);
  cov.canonicalize();
  return cov;
}

Cover homog_reparam(const Polynomial& p, int d, double delta, double eps, const EngineConfig& cfg) {
  if (d < 0) throw InvalidArgument("homogeneity degree must be non-negative");
  if (p.effective_degree() > d) throw InvalidArgument("P has degree above d");
  const int n = p.nvars();
  if (n + 1 > cfg.max_dim + 1) throw Unsupported("dimension above the configured maximum");
  Cover base = sublevel_cover(p, delta, eps, std::nullopt, cfg);
  Cover cov;
  cov.nvars = n + 1;
  cov.scale = delta;
  cov.eps = eps;
  cov.kind = CoverKind::Sublevel;
  cov.provenance = base.provenance;
  cov.provenance.push_back({"homog_reparam", delta, "d=" + std::to_string(d)});
  for (const Piece& s : base.pieces) cov.pieces.push_back({detail::extrude(s.shape, 1.5, 0.5), s.certificate, s.depth});
  cov.canonicalize();
  return cov;
}

}  // namespace flatcover
