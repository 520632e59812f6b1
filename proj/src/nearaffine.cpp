#include <algorithm>
#include <cmath>

#include "engine_internal.hpp"
#include "flatcover/polyjson.hpp"
#include "flatcover/roots.hpp"

namespace flatcover {

namespace {

struct NearAffineJob {
  std::vector<Polynomial> a;
  std::vector<Polynomial> da;  // A_i'
  Polynomial phi;
  double delta = 0.0;
  double h = 0.0;
  const EngineConfig* cfg = nullptr;
};

double eval1(const Polynomial& p, double x) { return p(std::span<const double>(&x, 1)); }

// Piece [alpha, beta] x T with T given in x' = (x_2..x_n) coordinates.
Parallelogram lift(double alpha, double beta, const Parallelogram& t) {
  const int m = t.dim();
  Parallelogram r;
  r.center = Vec::Zero(m + 1);
  r.center[0] = 0.5 * (alpha + beta);
  r.center.tail(m) = t.center;
  r.normals = Mat::Zero(m + 1, m + 1);
  r.normals(0, 0) = 1.0;
  r.normals.bottomRightCorner(m, m) = t.normals;
  r.halflens = Vec::Zero(m + 1);
  r.halflens[0] = 0.5 * (beta - alpha);
  r.halflens.tail(m) = t.halflens;
  return r;
}

// Splits [lo, hi] into consecutive pieces of length `step` anchored at lo; a last piece
// shorter than `minlen` is merged into its neighbour.
std::vector<std::pair<double, double>> chop(double lo, double hi, double step, double minlen) {
  std::vector<std::pair<double, double>> out;
  const int k = std::max(1, static_cast<int>(std::ceil((hi - lo) / step - 1e-9)));
  for (int i = 0; i < k; ++i) out.emplace_back(lo + i * step, i + 1 == k ? hi : lo + (i + 1) * step);
  if (out.size() > 1 && out.back().second - out.back().first < minlen) {
    const double e = out.back().second;
    out.pop_back();
    out.back().second = e;
  }
  return out;
}

// Cross-sections T of the strips {a.x' in [v, v + hv]} covering [-1,1]^{n-1}.
std::vector<Parallelogram> strips(const Vec& a, double h, double delta) {
  const int m = static_cast<int>(a.size());
  const double na = a.norm();
  std::vector<Parallelogram> out;
  const double range = 2.0 * a.lpNorm<1>();  // length of {a.x'} over the cube
  double hv = std::max(h, 2.0 * delta * na);
  if (na == 0.0 || range <= hv) {
    out.push_back(Parallelogram::cube(m));
    return out;
  }
  // strip width in x' units, kept <= 1/2 so pieces stay inside [-2,2]^n
  double sw = hv / na;
  if (m > 1 && sw > 0.5) sw = (range / na) / std::ceil((range / na) / 0.5);
  const Vec ah = a / na;
  const double wmax = ah.lpNorm<1>();
  if (m == 1) {
    // exact x_2 intervals
    for (auto [lo, hi] : chop(-1.0, 1.0, sw, 2.0 * delta)) out.push_back(Parallelogram::interval(lo, hi));
    return out;
  }
  // m == 2: normals (ah, e_k) with k the axis where ah is smallest
  const int k = std::abs(ah[0]) <= std::abs(ah[1]) ? 0 : 1;
  const int o = 1 - k;
  for (auto [w0, w1] : chop(-wmax, wmax, sw, 2.0 * delta)) {
    // extent of x_k over {w0 <= ah.x' <= w1} cap square
    double kmin = INFINITY, kmax = -INFINITY;
    auto take = [&](double xk, double xo) {
      const double w = ah[k] * xk + ah[o] * xo;
      if (std::abs(xk) <= 1.0 + 1e-12 && std::abs(xo) <= 1.0 + 1e-12 && w >= w0 - 1e-12 && w <= w1 + 1e-12) {
        kmin = std::min(kmin, xk);
        kmax = std::max(kmax, xk);
      }
    };
    for (double s1 : {-1.0, 1.0})
      for (double s2 : {-1.0, 1.0}) take(s1, s2);
    for (double w : {w0, w1})
      for (double s : {-1.0, 1.0}) {
        take(s, (w - ah[k] * s) / ah[o]);  // x_k = s
        if (ah[k] != 0.0) take((w - ah[o] * s) / ah[k], s);  // x_o = s
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
    t.center = Vec::Zero(2);
    t.normals = Mat::Zero(2, 2);
    t.normals.col(0) = ah;
    t.normals(k, 1) = 1.0;
    t.halflens = Vec(2);
    t.halflens[0] = 0.5 * (w1 - w0);
    t.halflens[1] = 0.5 * (kmax - kmin);
    // centre: ah.c = (w0 + w1)/2, c_k = (kmin + kmax)/2
    Eigen::Matrix2d sys;
    sys.row(0) = ah.transpose();
    sys.row(1) = Eigen::RowVector2d::Zero();
    sys(1, k) = 1.0;
    t.center = sys.inverse() * Eigen::Vector2d(0.5 * (w0 + w1), 0.5 * (kmin + kmax));
    out.push_back(t);
  }
  return out;
}

void lattice_interval(const NearAffineJob& job, double alpha, double beta, std::vector<Piece>& out, int depth) {
  const int n = job.phi.nvars();
  const double u0 = 0.5 * (alpha + beta);
  Vec a(n - 1);
  for (int i = 1; i < n; ++i) a[i - 1] = eval1(job.da[i], u0);
  std::vector<Piece> local;
  bool failed = false;
  for (const Parallelogram& t : strips(a, job.h, job.delta)) {
    Piece p = detail::flat_piece(job.phi, lift(alpha, beta, t), job.delta, *job.cfg, depth);
    failed = failed || p.certificate.bound.hi > job.cfg->c_flat * job.delta;
    local.push_back(std::move(p));
  }
  if (failed && job.cfg->strict && 0.5 * (beta - alpha) >= 2.0 * job.delta) {
    lattice_interval(job, alpha, u0, out, depth + 1);
    lattice_interval(job, u0, beta, out, depth + 1);
    return;
  }
  detail::check_budget(out.size() + local.size(), *job.cfg, {});
  for (auto& p : local) out.push_back(std::move(p));
}

// The u-lattice of step h anchored at -1, clipped to the shell [s0, s1].
void shell_slabs(const NearAffineJob& job, double s0, double s1, std::vector<Piece>& out) {
  std::vector<std::pair<double, double>> ivs;
  const int k0 = static_cast<int>(std::floor((s0 + 1.0) / job.h + 1e-9));
  for (int k = k0;; ++k) {
    const double u = -1.0 + k * job.h;
    if (u >= s1 - 1e-15) break;
    const double lo = std::max(u, s0), hi = std::min(u + job.h, s1);
    if (hi > lo) ivs.emplace_back(lo, hi);
  }
  // merge pieces shorter than 2 delta into a neighbour
  std::vector<std::pair<double, double>> merged;
  for (auto iv : ivs) {
    if (!merged.empty() && (iv.second - iv.first < 2.0 * job.delta ||
                            merged.back().second - merged.back().first < 2.0 * job.delta))
      merged.back().second = iv.second;
    else
      merged.push_back(iv);
  }
  for (auto [lo, hi] : merged) lattice_interval(job, lo, hi, out, 0);
}

NearAffineJob make_job(const std::vector<Polynomial>& a, double delta, const EngineConfig& cfg) {
  if (a.empty()) throw InvalidArgument("need at least A_1");
  for (const auto& p : a)
    if (p.nvars() != 1) throw InvalidArgument("near-affine parts must be univariate");
  NearAffineJob job;
  job.a = a;
  for (const auto& p : a) job.da.push_back(partial(p, 0));
  job.phi = assemble_near_affine(a);
  job.delta = delta;
  job.h = std::sqrt(delta);
  job.cfg = &cfg;
  return job;
}

// Scale ladder delta_i = delta^{i eps}: at each rung, the certified Taylor drop of A_j over
// lattice intervals of length delta_i^{1/2}, as a multiple of delta_i.
void stage_trace(const NearAffineJob& job, double delta, double eps, const std::string& algo,
                 std::vector<ProvenanceStep>& trace) {
  for (double di : stage_scales(delta, eps)) {
    const double hi = std::sqrt(di);
    double worst = 0.0;
    for (double u = -1.0; u < 1.0 - 1e-15; u += hi) {
      const double e = std::min(u + hi, 1.0);
      const double c = 0.5 * (u + e), r = 0.5 * (e - u);
      AffineMap m{Mat::Constant(1, 1, r), Vec::Constant(1, c)};
      for (const auto& p : job.a) {
        const AffineSplit s = strip_affine(compose_affine(p, m));
        if (s.rest.is_zero()) continue;
        worst = std::max(worst, abs_range_bound(s.rest, Box::cube(1), job.cfg->range).hi);
      }
    }
    trace.push_back({algo + ".stage", di, "taylor_ratio=" + format_double(worst / di)});
  }
}

Cover empty_cover(int n, double delta, double eps) {
  Cover c;
  c.nvars = n;
  c.scale = delta;
  c.eps = eps;
  c.kind = CoverKind::GraphFlat;
  return c;
}

}  // namespace

Cover nearaffine_nondeg_cover(const std::vector<Polynomial>& a, double delta, double eps, double k,
                              const EngineConfig& cfg) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (!(k > 0.0)) throw InvalidArgument("K must be positive");
  NearAffineJob job = make_job(a, delta, cfg);
  const int n = job.phi.nvars();
  if (n < 2) throw InvalidArgument("near-affine covers need n >= 2");
  const Polynomial h0 = near_affine_h0(a);
  const RangeBound hb = range_bound(h0, Box::cube(1), cfg.range);
  if (!(hb.lo >= (1.0 - 1e-9) / (k * k)))
    throw PreconditionError("cannot certify H0 >= K^-2 on [-1,1] (enclosure [" + format_double(hb.lo) + ", " +
                                format_double(hb.hi) + "])",
                            hb);
  Cover cov = empty_cover(n, delta, eps);
  cov.provenance.push_back({"nearaffine_nondeg_cover", delta, "K=" + format_double(k)});
  stage_trace(job, delta, eps, "nearaffine_nondeg", cov.provenance);
  shell_slabs(job, -1.0, 1.0, cov.pieces);
  cov.canonicalize();
  return cov;
}

Cover nearaffine_cover(const std::vector<Polynomial>& a, double delta, double eps, const EngineConfig& cfg) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  NearAffineJob job = make_job(a, delta, cfg);
  const int n = job.phi.nvars();
  if (n >= 3 && !hessian_det(job.phi).is_zero(1e-12))
    throw InvalidArgument("assembled near-affine polynomial has nonzero Hessian determinant");
  Cover cov = empty_cover(n, delta, eps);
  cov.provenance.push_back({"nearaffine_cover", delta, ""});
  const Parallelogram cube = Parallelogram::cube(n);
  const Vec floor = Vec::Constant(n, delta);

  const Polynomial h0 = near_affine_h0(a).trimmed();
  if (n == 1 || h0.is_zero()) {
    // phi = A_1(x_1) + affine in x': flat pieces in x_1 only
    cov.provenance.push_back({"nearaffine.lower_dim", delta, "H0=0"});
    detail::flat_refine(job.phi, cube, delta, floor, cfg, cov.pieces);
    cov.canonicalize();
    return cov;
  }

  // degenerate part {H0 < delta}, padded, merged
  std::vector<std::pair<double, double>> deg;
  for (auto [lo, hi] : sublevel_intervals(h0, delta, -1.0, 1.0)) {
    if (hi - lo < 2.0 * delta) {
      const double c = 0.5 * (lo + hi);
      lo = c - delta;
      hi = c + delta;
    }
    lo = std::max(lo, -1.0);
    hi = std::min(hi, 1.0);
    if (!deg.empty() && lo <= deg.back().second)
      deg.back().second = std::max(deg.back().second, hi);
    else
      deg.emplace_back(lo, hi);
  }
  // shells of the complement; those shorter than 2 delta join the degenerate part
  std::vector<std::pair<double, double>> shells;
  double cur = -1.0;
  for (auto [lo, hi] : deg) {
    if (lo > cur) shells.emplace_back(cur, lo);
    cur = std::max(cur, hi);
  }
  if (cur < 1.0) shells.emplace_back(cur, 1.0);
  std::vector<std::pair<double, double>> keep;
  for (auto s : shells) {
    if (s.second - s.first >= 2.0 * delta) {
      keep.push_back(s);
      continue;
    }
    deg.push_back(s);
  }
  std::sort(deg.begin(), deg.end());
  std::vector<std::pair<double, double>> dm;
  for (auto d : deg) {
    if (!dm.empty() && d.first <= dm.back().second + 1e-15)
      dm.back().second = std::max(dm.back().second, d.second);
    else
      dm.push_back(d);
  }

  for (auto [lo, hi] : dm) {
    cov.provenance.push_back({"nearaffine.degenerate", delta, "[" + format_double(lo) + "," + format_double(hi) + "]"});
    Parallelogram r = cube;
    r.center[0] = 0.5 * (lo + hi);
    r.halflens[0] = 0.5 * (hi - lo);
    detail::flat_refine(job.phi, r, delta, floor, cfg, cov.pieces);
  }
  if (!keep.empty()) stage_trace(job, delta, eps, "nearaffine_nondeg", cov.provenance);
  for (auto [lo, hi] : keep) {
    const double mid = 0.5 * (lo + hi);
    int j = 1;
    double best = -1.0;
    for (int i = 1; i < n; ++i) {
      const double v = std::abs(eval1(job.da[i], mid));
      if (v > best) {
        best = v;
        j = i;
      }
    }
    const int level = best > 0.0 ? static_cast<int>(std::floor(std::log2(best))) : -1000;
    cov.provenance.push_back({"nearaffine.shell", delta,
                              "[" + format_double(lo) + "," + format_double(hi) + "] j=" + std::to_string(j + 1) +
                                  " level=" + std::to_string(level)});
    shell_slabs(job, lo, hi, cov.pieces);
  }
  detail::check_budget(cov.pieces.size(), cfg, cov.provenance);
  cov.canonicalize();
  return cov;
}

}  // namespace flatcover
