#include <algorithm>
#include <cmath>

#include "engine_internal.hpp"

namespace flatcover {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Uniform: return "uniform";
    case Mode::Degenerate: return "degenerate";
    case Mode::Sublevel: return "sublevel";
    case Mode::Nondegenerate: return "nondegenerate";
    case Mode::NearAffine: return "near-affine";
    case Mode::Pseudo: return "pseudo";
  }
  return "uniform";
}

Mode mode_from_string(const std::string& s) {
  if (s == "uniform") return Mode::Uniform;
  if (s == "degenerate") return Mode::Degenerate;
  if (s == "sublevel") return Mode::Sublevel;
  if (s == "nondegenerate" || s == "bd") return Mode::Nondegenerate;
  if (s == "near-affine" || s == "nearaffine") return Mode::NearAffine;
  if (s == "pseudo") return Mode::Pseudo;
  throw InvalidArgument("unknown mode '" + s + "'");
}

int stage_count(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in (0, 1]");
  return std::max(1, static_cast<int>(std::lround(1.0 / eps)));
}

std::vector<double> stage_scales(double delta, double eps) {
  const int n = stage_count(eps);
  const double e = 1.0 / n;
  std::vector<double> out;
  for (int i = 1; i <= n; ++i) out.push_back(i == n ? delta : std::pow(delta, i * e));
  return out;
}

namespace detail {

Piece flat_piece(const Polynomial& phi, const Parallelogram& shape, double delta, const EngineConfig& cfg, int depth) {
  Piece p;
  p.shape = shape;
  p.certificate = to_piece_certificate(flat_certificate(phi, shape, delta, flat_options(cfg)));
  p.depth = depth;
  return p;
}

Piece sublevel_piece(const Polynomial& phi, const Parallelogram& shape, double delta, const EngineConfig& cfg,
                     int depth) {
  Piece p;
  p.shape = shape;
  p.certificate = to_piece_certificate(sublevel_certificate(phi, shape, delta, cfg.c_sub, cfg.range));
  p.depth = depth;
  return p;
}

Parallelogram box_shape(const Vec& lo, const Vec& hi) { return Parallelogram::from_box(Box{lo, hi}); }

// Estimated error reduction from halving chart axis i: terms t^alpha shrink by 2^{-alpha_i}.
int split_axis(const Polynomial& phi, const Parallelogram& r, const Vec& floor) {
  const Polynomial rest = strip_affine(compose_affine(phi, chart(r))).rest;
  const int n = rest.nvars();
  Vec gain = Vec::Zero(n);
  rest.for_each_term([&](const MultiIndex& a, double c) {
    if (c == 0.0) return;
    for (int i = 0; i < n; ++i)
      if (a[i] > 0) gain[i] += std::abs(c) * (1.0 - std::ldexp(1.0, -a[i]));
  });
  int best = -1;
  double bg = -1.0;
  for (int i = 0; i < n; ++i) {
    if (0.5 * r.halflens[i] < floor[i] * (1.0 - 1e-12)) continue;
    // prefer the longer side on ties
    const double g = gain[i] + 1e-15 * r.halflens[i];
    if (g > bg) {
      bg = g;
      best = i;
    }
  }
  return best;
}

void flat_refine(const Polynomial& phi, const Parallelogram& r, double delta, const Vec& floor, const EngineConfig& cfg,
                 std::vector<Piece>& out, int depth) {
  const FlatnessCertificate c = flat_certificate(phi, r, delta, flat_options(cfg));
  if (c.ok) {
    out.push_back({r, to_piece_certificate(c), depth});
    return;
  }
  const int axis = split_axis(phi, r, floor);
  if (axis < 0) {
    out.push_back({r, to_piece_certificate(c), depth});
    return;
  }
  if (out.size() > cfg.piece_budget) throw EngineError("piece budget exceeded during flat refinement");
  auto [a, b] = bisect(r, axis);
  flat_refine(phi, a, delta, floor, cfg, out, depth + 1);
  flat_refine(phi, b, delta, floor, cfg, out, depth + 1);
}

void check_budget(std::size_t count, const EngineConfig& cfg, const std::vector<ProvenanceStep>& trace) {
  if (count > cfg.piece_budget) throw EngineError("piece budget exceeded", trace);
}

void check_request(const Polynomial& phi, double delta, double eps, const EngineConfig& cfg) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (delta > 0.25) throw InvalidArgument("delta exceeds the small-scale threshold 1/4");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in (0, 1]");
  if (phi.nvars() < 1) throw InvalidArgument("polynomial needs at least one variable");
  if (phi.nvars() > cfg.max_dim) throw Unsupported("dimension above the configured maximum");
}

Parallelogram extrude(const Parallelogram& r, double center, double half) {
  const int n = r.dim();
  Parallelogram out;
  out.center = Vec::Zero(n + 1);
  out.center.head(n) = r.center;
  out.center[n] = center;
  out.normals = Mat::Zero(n + 1, n + 1);
  out.normals.topLeftCorner(n, n) = r.normals;
  out.normals(n, n) = 1.0;
  out.halflens = Vec::Zero(n + 1);
  out.halflens.head(n) = r.halflens;
  out.halflens[n] = half;
  return out;
}

Parallelogram slab_shape(const Vec& cell_center, const Vec& cell_half, int j, double t0, const Vec& g, double eta) {
  const int n = static_cast<int>(cell_center.size()) + 1;
  Parallelogram r;
  r.center = Vec::Zero(n);
  r.normals = Mat::Zero(n, n);
  r.halflens = Vec::Zero(n);
  Vec nrm = Vec::Zero(n);
  nrm[j] = 1.0;
  for (int i = 0, k = 0; i < n; ++i) {
    if (i == j) continue;
    r.center[i] = cell_center[k];
    r.normals(i, i) = 1.0;
    r.halflens[i] = cell_half[k];
    nrm[i] = -g[k];
    ++k;
  }
  const double s = nrm.norm();
  r.center[j] = t0;
  r.normals.col(j) = nrm / s;
  r.halflens[j] = eta / s;
  return r;
}

}  // namespace detail

Cover build_cover(const CoverRequest& req, const EngineConfig& cfg) {
  detail::check_request(req.phi, req.delta, req.eps, cfg);
  switch (req.mode) {
    case Mode::Uniform:
      if (req.domain) return sub_parallelogram_cover(req.phi, *req.domain, req.delta, req.eps, cfg);
      return uniform_cover(req.phi, req.delta, req.eps, cfg, req.witness);
    case Mode::Nondegenerate: {
      const double k = req.k.value_or(std::pow(req.delta, -req.eps));
      return bd_cover(req.phi, req.delta, k, cfg, req.domain);
    }
    case Mode::NearAffine:
      return nearaffine_cover(near_affine_parts(req.phi), req.delta, req.eps, cfg);
    case Mode::Degenerate: {
      if (!hessian_det(req.phi).is_zero(1e-12))
        throw InvalidArgument("degenerate mode needs det D^2 phi identically zero");
      bool near_affine = true;
      try {
        (void)near_affine_parts(req.phi);
      } catch (const InvalidArgument&) {
        near_affine = false;
      }
      if (near_affine && req.phi.nvars() >= 2) return nearaffine_cover(near_affine_parts(req.phi), req.delta, req.eps, cfg);
      return uniform_cover(req.phi, req.delta, req.eps, cfg, req.witness);
    }
    case Mode::Sublevel:
      return sublevel_cover(req.phi, req.delta, req.eps, req.domain, cfg);
    case Mode::Pseudo:
      return pseudo_cover(PseudoPolynomial::make(req.phi), req.delta, req.eps, cfg);
  }
  throw InvalidArgument("unknown mode");
}

}  // namespace flatcover
