#include <algorithm>
#include <cmath>

#include "engine_internal.hpp"
#include "flatcover/polyjson.hpp"

namespace flatcover {

namespace {

struct UniformStats {
  int flat = 0;
  int bd_shells = 0;
  int bd_tiles = 0;
  int splits = 0;
  int failed = 0;
};

bool variables_used(const Polynomial& p, int axis) {
  bool used = false;
  p.for_each_term([&](const MultiIndex& a, double c) {
    if (c != 0.0 && a[axis] > 0) used = true;
  });
  return used;
}

bool certified_nondegenerate(const Polynomial& h, const Parallelogram& s, double k, const EngineConfig& cfg) {
  const RangeBound b = range_bound(compose_affine(h, chart(s)), Box::cube(h.nvars()), cfg.range);
  return b.lo >= (1.0 - 1e-9) / k || b.hi <= -(1.0 - 1e-9) / k;
}

void bd_tiles(const Polynomial& phi, const Parallelogram& s, double delta, const Vec& floor, const EngineConfig& cfg,
              std::vector<Piece>& out, UniformStats& st, int depth) {
  const int n = phi.nvars();
  const double side = std::sqrt(delta);
  std::vector<int> counts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) counts[i] = std::max(1, static_cast<int>(std::ceil(2.0 * s.halflens[i] / side - 1e-12)));
  ++st.bd_shells;
  for (const Parallelogram& t : partition_grid(s, counts)) {
    ++st.bd_tiles;
    Piece p = detail::flat_piece(phi, t, delta, cfg, depth);
    if (p.certificate.bound.hi <= cfg.c_flat * delta || !cfg.strict)
      out.push_back(std::move(p));
    else
      detail::flat_refine(phi, t, delta, floor, cfg, out, depth + 1);
  }
}

void locate(const Polynomial& phi, const Polynomial& h, const Parallelogram& s, double delta, double k,
            const Vec& floor, const EngineConfig& cfg, std::vector<Piece>& out, UniformStats& st, int depth) {
  const FlatnessCertificate fc = flat_certificate(phi, s, delta, detail::flat_options(cfg));
  if (fc.ok) {
    ++st.flat;
    out.push_back({s, to_piece_certificate(fc), depth});
    return;
  }
  if (certified_nondegenerate(h, s, k, cfg)) {
    bd_tiles(phi, s, delta, floor, cfg, out, st, depth);
    return;
  }
  const int axis = detail::split_axis(phi, s, floor);
  if (axis < 0) {
    ++st.failed;
    out.push_back({s, to_piece_certificate(fc), depth});
    return;
  }
  if (out.size() > cfg.piece_budget) throw EngineError("piece budget exceeded in uniform recursion");
  ++st.splits;
  auto [a, b] = bisect(s, axis);
  locate(phi, h, a, delta, k, floor, cfg, out, st, depth + 1);
  locate(phi, h, b, delta, k, floor, cfg, out, st, depth + 1);
}

// Zero-Hessian polynomial in two variables whose non-affine part is g(q.x): strips across q.
bool rank_one_strips(const Polynomial& phi, const Parallelogram& r, double delta, const EngineConfig& cfg,
                     std::vector<Piece>& out) {
  if (phi.nvars() != 2 || !(r.is_axis_aligned() && r.center.isZero() && (r.halflens.array() == 1.0).all()))
    return false;
  // D^2 phi at a point where it does not vanish is lambda q q^T
  Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
  const Polynomial pxx = partial(partial(phi, 0), 0), pxy = partial(partial(phi, 0), 1), pyy = partial(partial(phi, 1), 1);
  for (double t : {0.0, 0.5, -0.7, 0.9}) {
    const double x[2] = {t, 0.3 * t + 0.1};
    Eigen::Matrix2d m;
    m << pxx(x), pxy(x), pxy(x), pyy(x);
    if (m.norm() > hess.norm()) hess = m;
  }
  if (hess.norm() == 0.0) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hess);
  const Eigen::Vector2d q = es.eigenvectors().col(std::abs(es.eigenvalues()[0]) > std::abs(es.eigenvalues()[1]) ? 0 : 1);
  // phi o rotation must be non-affine in the first rotated variable only
  AffineMap rot = AffineMap::identity(2);
  rot.matrix.col(0) = q;
  rot.matrix.col(1) = Eigen::Vector2d(-q[1], q[0]);
  const Polynomial rest = strip_affine(compose_affine(phi, rot)).rest;
  Polynomial clean = rest;
  double scale = rest.max_abs_coeff();
  bool second = false;
  rest.for_each_term([&](const MultiIndex& a, double c) {
    if (a[1] > 0 && std::abs(c) > 1e-10 * scale) second = true;
  });
  if (second) return false;
  // flat intervals of the profile s -> phi(s q) over the range of q.x on the square
  const double wmax = q.lpNorm<1>();
  const Vec qv = q;
  Polynomial g(1, phi.degree());
  {
    std::vector<int> to = {0};
    AffineMap line;
    line.matrix = Mat::Zero(2, 2);
    line.matrix.col(0) = qv;
    line.offset = Vec::Zero(2);
    const Polynomial on_line = compose_affine(phi, line);
    g = restrict_axis(on_line, 1, 0.0);
  }
  std::vector<Piece> ivs;
  detail::flat_refine(g, Parallelogram::interval(-wmax, wmax), delta, Vec::Constant(1, delta), cfg, ivs);
  // profile intervals no longer than delta^{1/2}, the lattice of the nondegenerate one-variable case
  std::vector<Piece> capped;
  const double side = std::sqrt(delta);
  for (const Piece& iv : ivs) {
    const int parts = std::max(1, static_cast<int>(std::ceil(2.0 * iv.shape.halflens[0] / side - 1e-9)));
    if (parts == 1) {
      capped.push_back(iv);
      continue;
    }
    for (const Parallelogram& sub : partition_grid(iv.shape, {parts})) capped.push_back(detail::flat_piece(g, sub, delta, cfg, iv.depth + 1));
  }
  ivs = std::move(capped);
  std::sort(ivs.begin(), ivs.end(), [](const Piece& a, const Piece& b) { return a.shape.center[0] < b.shape.center[0]; });
  const int k = std::abs(q[0]) <= std::abs(q[1]) ? 0 : 1;
  const int o = 1 - k;
  for (const Piece& iv : ivs) {
    const double w0 = iv.shape.center[0] - iv.shape.halflens[0], w1 = iv.shape.center[0] + iv.shape.halflens[0];
    double kmin = INFINITY, kmax = -INFINITY;
    auto take = [&](double xk, double xo) {
      const double w = q[k] * xk + q[o] * xo;
      if (std::abs(xk) <= 1.0 + 1e-12 && std::abs(xo) <= 1.0 + 1e-12 && w >= w0 - 1e-12 && w <= w1 + 1e-12) {
        kmin = std::min(kmin, xk);
        kmax = std::max(kmax, xk);
      }
    };
    for (double s1 : {-1.0, 1.0})
      for (double s2 : {-1.0, 1.0}) take(s1, s2);
    for (double w : {w0, w1})
      for (double s : {-1.0, 1.0}) {
        take(s, (w - q[k] * s) / q[o]);
        if (q[k] != 0.0) take((w - q[o] * s) / q[k], s);
      }
    if (!(kmin <= kmax)) continue;
    kmin = std::max(kmin, -1.0);
    kmax = std::min(kmax, 1.0);
    if (kmax - kmin < 2.0 * delta) {
      const double c = std::clamp(0.5 * (kmin + kmax), -1.0 + delta, 1.0 - delta);
      kmin = c - delta;
      kmax = c + delta;
    }
    Parallelogram t;
    t.normals = Mat::Zero(2, 2);
    t.normals.col(0) = qv;
    t.normals(k, 1) = 1.0;
    t.halflens = Vec(2);
    t.halflens[0] = 0.5 * (w1 - w0);
    t.halflens[1] = 0.5 * (kmax - kmin);
    Eigen::Matrix2d sys;
    sys.row(0) = q.transpose();
    sys.row(1) = Eigen::RowVector2d::Zero();
    sys(1, k) = 1.0;
    t.center = sys.inverse() * Eigen::Vector2d(0.5 * (w0 + w1), 0.5 * (kmin + kmax));
    out.push_back(detail::flat_piece(phi, t, delta, cfg, iv.depth));
  }
  return true;
}

Cover witness_route(const Polynomial& phi, const NearAffineWitness& w, double delta, double eps,
                    const EngineConfig& cfg) {
  const int n = phi.nvars();
  const Polynomial psi = compose_affine(phi, w.xi);
  (void)near_affine_parts(psi, 1e-12 * std::max(1.0, psi.max_abs_coeff()));
  // cover the bounding box of xi^{-1}([-1,1]^n) in the normal-form coordinates
  const Parallelogram pre = image_of_cube(w.xi.inverse());
  const Box bb = pre.bounding_box();
  const AffineMap lb = chart(Parallelogram::from_box(bb));
  const Polynomial psib = compose_affine(psi, lb);
  Cover inner = nearaffine_cover(near_affine_parts(psib, 1e-12 * std::max(1.0, psib.max_abs_coeff())), delta, eps, cfg);
  const AffineMap m = w.xi.compose(lb);
  Cover cov;
  cov.nvars = n;
  cov.scale = delta;
  cov.eps = eps;
  cov.kind = CoverKind::GraphFlat;
  cov.provenance = inner.provenance;
  cov.provenance.insert(cov.provenance.begin(), ProvenanceStep{"uniform.witness", delta, "near-affine normal form"});
  const Parallelogram cube = Parallelogram::cube(n);
  for (const Piece& p : inner.pieces) {
    Parallelogram s = map_parallelogram(m, p.shape);
    if (!interiors_intersect(s, cube)) continue;
    if (s.width() < delta) s = pad_to_width(s, delta);
    cov.pieces.push_back(detail::flat_piece(phi, s, delta, cfg, p.depth));
  }
  cov.canonicalize();
  return cov;
}

}  // namespace

namespace detail {

std::vector<Piece> uniform_pieces(const Polynomial& phi, const Parallelogram& r, double delta, double eps,
                                  const EngineConfig& cfg, std::vector<ProvenanceStep>& trace) {
  const int n = phi.nvars();
  const Vec floor = Vec::Constant(n, delta);
  std::vector<Piece> out;
  const FlatnessCertificate fc = flat_certificate(phi, r, delta, flat_options(cfg));
  if (fc.ok) {
    trace.push_back({"uniform.flat", delta, "single piece"});
    out.push_back({r, to_piece_certificate(fc), 0});
    return out;
  }
  const Polynomial h = hessian_det(phi);
  if (h.is_zero(1e-12 * std::max(1.0, phi.max_abs_coeff()))) {
    const Polynomial rest = strip_affine(phi).rest;
    int used = 0;
    for (int i = 0; i < n; ++i) used += variables_used(rest, i) ? 1 : 0;
    if (used < n) {
      trace.push_back({"uniform.lower_dim", delta, "variables=" + std::to_string(used)});
      std::vector<Piece> coarse;
      flat_refine(phi, r, delta, floor, cfg, coarse);
      // pieces kept on the delta^{1/2} lattice along the variables phi depends on
      const double side = std::sqrt(delta);
      for (Piece& p : coarse) {
        std::vector<int> counts(static_cast<std::size_t>(n), 1);
        bool split = false;
        for (int i = 0; i < n; ++i)
          if (r.is_axis_aligned() && variables_used(rest, i)) {
            counts[i] = std::max(1, static_cast<int>(std::ceil(2.0 * p.shape.halflens[i] / side - 1e-9)));
            split = split || counts[i] > 1;
          }
        if (!split) {
          out.push_back(std::move(p));
          continue;
        }
        for (const Parallelogram& t : partition_grid(p.shape, counts)) out.push_back(flat_piece(phi, t, delta, cfg, p.depth + 1));
      }
      return out;
    }
    if (n == 2) {
      if (!cfg.two_variable)
        throw Unsupported("two-variable degenerate route is disabled by configuration");
      trace.push_back({"uniform.degenerate", delta, "rank-one profile"});
      if (rank_one_strips(phi, r, delta, cfg, out)) return out;
      flat_refine(phi, r, delta, floor, cfg, out);
      return out;
    }
    throw Unsupported(
        "degenerate branch in dimension 3 needs a near-affine normal-form witness (affine map xi with phi o xi "
        "near-affine)");
  }
  const double k = std::pow(delta, -eps);
  UniformStats st;
  if (certified_nondegenerate(h, r, k, cfg)) {
    bd_tiles(phi, r, delta, floor, cfg, out, st, 0);
    trace.push_back({"uniform.nondegenerate", delta, "K=" + format_double(k)});
    return out;
  }
  locate(phi, h, r, delta, k, floor, cfg, out, st, 0);
  trace.push_back({"uniform.locate", delta,
                   "K=" + format_double(k) + " flat=" + std::to_string(st.flat) + " bd_shells=" +
                       std::to_string(st.bd_shells) + " bd_tiles=" + std::to_string(st.bd_tiles) +
                       " splits=" + std::to_string(st.splits) + " failed=" + std::to_string(st.failed)});
  return out;
}

}  // namespace detail

Cover uniform_cover(const Polynomial& phi, double delta, double eps, const EngineConfig& cfg,
                    std::optional<NearAffineWitness> witness) {
  detail::check_request(phi, delta, eps, cfg);
  const int n = phi.nvars();
  if (witness && n == 3 && hessian_det(phi).is_zero(1e-12 * std::max(1.0, phi.max_abs_coeff())))
    return witness_route(phi, *witness, delta, eps, cfg);
  Cover cov;
  cov.nvars = n;
  cov.scale = delta;
  cov.eps = eps;
  cov.kind = CoverKind::GraphFlat;
  cov.provenance.push_back({"uniform_cover", delta, ""});
  cov.pieces = detail::uniform_pieces(phi, Parallelogram::cube(n), delta, eps, cfg, cov.provenance);
  detail::check_budget(cov.pieces.size(), cfg, cov.provenance);
  cov.canonicalize();
  return cov;
}

Cover sub_parallelogram_cover(const Polynomial& phi, const Parallelogram& r, double delta, double eps,
                              const EngineConfig& cfg) {
  detail::check_request(phi, delta, eps, cfg);
  const int n = phi.nvars();
  if (r.dim() != n) throw InvalidArgument("parallelogram dimension does not match polynomial");
  r.validate();
  const double w = r.width();
  if (w < delta) throw InvalidArgument("parallelogram width is below delta");
  if (!contains(Parallelogram::cube(n), r, 1e-12)) throw InvalidArgument("parallelogram must lie in [-1,1]^n");
  if (r.is_axis_aligned() && r.center.isZero() && (r.halflens.array() == 1.0).all())
    return uniform_cover(phi, delta, eps, cfg);
  Cover cov;
  cov.nvars = n;
  cov.scale = delta;
  cov.eps = eps;
  cov.kind = CoverKind::GraphFlat;
  cov.provenance.push_back({"sub_parallelogram_cover", delta, "w=" + format_double(w)});
  const Rescaled rs = rescale_flat(phi, r, w);
  cov.provenance.push_back({"sub_parallelogram.stage1", w, "C=" + format_double(rs.c)});
  cov.provenance.push_back({"sub_parallelogram.stage2", rs.degenerate ? delta : delta / (rs.c * w), "rescaled"});
  cov.pieces = detail::uniform_pieces(phi, r, delta, eps, cfg, cov.provenance);
  detail::check_budget(cov.pieces.size(), cfg, cov.provenance);
  cov.canonicalize();
  return cov;
}

}  // namespace flatcover
