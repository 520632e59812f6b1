#include "flatcover/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "flatcover/polyjson.hpp"
#include "flatcover/roots.hpp"
#include "flatcover/spatial.hpp"

namespace flatcover {

namespace {

constexpr std::size_t kMaxIssues = 64;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Raster {
  Vec lo, hi;
  double step = 0.0;
  std::vector<long> count;
};

Raster make_raster(const Box& d, double step) {
  Raster r{d.lo, d.hi, step, {}};
  for (int i = 0; i < d.dim(); ++i) r.count.push_back(static_cast<long>(std::floor((d.hi[i] - d.lo[i]) / step + 1e-9)) + 1);
  return r;
}

// Parameter interval of {t : (t, y) in R}; empty when lo > hi.
std::pair<double, double> line_interval(const Parallelogram& r, const Vec& y) {
  const int n = r.dim();
  double lo = -INFINITY, hi = INFINITY;
  for (int i = 0; i < n; ++i) {
    const double a = r.normals(0, i);
    double g = -r.center[0] * a;
    for (int k = 1; k < n; ++k) g += (y[k - 1] - r.center[k]) * r.normals(k, i);
    const double l = r.halflens[i];
    if (std::abs(a) < 1e-300) {
      if (std::abs(g) > l * (1.0 + 1e-12)) return {1.0, -1.0};
      continue;
    }
    double t1 = (-l - g) / a, t2 = (l - g) / a;
    if (t1 > t2) std::swap(t1, t2);
    lo = std::max(lo, t1);
    hi = std::min(hi, t2);
  }
  return {lo, hi};
}

Polynomial restrict_to_line(const Polynomial& phi, const Vec& y) {
  Polynomial p = phi;
  for (int k = phi.nvars() - 1; k >= 1; --k) p = restrict_axis(p, k, y[k - 1]);
  return p;
}

void check_coverage(const Polynomial& phi, const Cover& cover, const Box& dom, const VerifyOptions& opt,
                    VerificationReport& rep) {
  const int n = cover.nvars;
  const double delta = cover.scale;
  const Raster ras = make_raster(dom, opt.raster * delta);
  std::vector<Parallelogram> shapes;
  shapes.reserve(cover.pieces.size());
  for (const auto& p : cover.pieces) shapes.push_back(p.shape);
  const PieceIndex index(shapes);

  // lines along x_1, indexed by the raster coordinates of x_2..x_n
  std::size_t total = 1;
  for (int i = 1; i < n; ++i) total *= static_cast<std::size_t>(ras.count[i]);
  rep.lines_total = total;
  long stride = 1;
  if (total > opt.line_budget && n > 1) {
    stride = static_cast<long>(std::ceil(std::pow(static_cast<double>(total) / opt.line_budget, 1.0 / (n - 1)) - 1e-9));
    rep.subsampled = true;
  }
  std::vector<long> blocks(static_cast<std::size_t>(std::max(0, n - 1)));
  std::size_t nblocks = 1;
  for (int i = 1; i < n; ++i) {
    blocks[i - 1] = (ras.count[i] + stride - 1) / stride;
    nblocks *= static_cast<std::size_t>(blocks[i - 1]);
  }
  const double tol = 1e-12 + 1e-9 * delta;
  std::vector<std::pair<double, double>> ivs, merged;
  // raster indices along x_1 that must be covered, as inclusive ranges
  std::vector<std::pair<long, long>> need;
  Vec y(std::max(0, n - 1));
  Vec qlo(n), qhi(n);
  for (std::size_t b = 0; b < nblocks; ++b) {
    std::size_t rem = b;
    const std::uint64_t hsh = splitmix(b);
    for (int i = n - 1; i >= 1; --i) {
      const long bi = static_cast<long>(rem % static_cast<std::size_t>(blocks[i - 1]));
      rem /= static_cast<std::size_t>(blocks[i - 1]);
      long off = stride > 1 ? static_cast<long>((hsh >> (8 * i)) % static_cast<std::uint64_t>(stride)) : 0;
      long k = std::min(bi * stride + off, ras.count[i] - 1);
      y[i - 1] = ras.lo[i] + k * ras.step;
    }
    ++rep.lines_checked;
    need.clear();
    if (cover.kind == CoverKind::GraphFlat) {
      need.emplace_back(0, ras.count[0] - 1);
    } else {
      const Polynomial p = restrict_to_line(phi, y);
      std::vector<std::pair<double, double>> sub;
      if (p.is_zero())
        sub.emplace_back(dom.lo[0], dom.hi[0]);
      else
        sub = sublevel_intervals(p, delta, dom.lo[0], dom.hi[0]);
      for (auto [a, c] : sub) {
        long k0 = std::max(0L, static_cast<long>(std::ceil((a - ras.lo[0]) / ras.step - 1e-12)));
        const long k1 = std::min(ras.count[0] - 1, static_cast<long>(std::floor((c - ras.lo[0]) / ras.step + 1e-12)));
        if (!need.empty()) k0 = std::max(k0, need.back().second + 1);
        if (k0 <= k1) need.emplace_back(k0, k1);
      }
    }
    if (need.empty()) continue;
    for (auto [k0, k1] : need) rep.points_checked += static_cast<std::size_t>(k1 - k0 + 1);
    qlo[0] = ras.lo[0] + need.front().first * ras.step;
    qhi[0] = ras.lo[0] + need.back().second * ras.step;
    for (int i = 1; i < n; ++i) qlo[i] = qhi[i] = y[i - 1];
    ivs.clear();
    for (int k : index.query(qlo, qhi)) {
      auto iv = line_interval(shapes[k], y);
      if (iv.first <= iv.second) ivs.push_back(iv);
    }
    std::sort(ivs.begin(), ivs.end());
    merged.clear();
    for (auto iv : ivs) {
      if (!merged.empty() && iv.first <= merged.back().second)
        merged.back().second = std::max(merged.back().second, iv.second);
      else
        merged.push_back(iv);
    }
    // walk the raster, jumping over each covered run
    std::size_t j = 0;
    for (auto [k0, k1] : need) {
      for (long k = k0; k <= k1;) {
        const double t = ras.lo[0] + k * ras.step;
        while (j < merged.size() && merged[j].second < t - tol) ++j;
        if (j < merged.size() && merged[j].first <= t + tol) {
          k = std::max(k + 1, static_cast<long>(std::floor((merged[j].second + tol - ras.lo[0]) / ras.step)) + 1);
          continue;
        }
        rep.coverage_ok = false;
        if (rep.misses.size() < opt.max_misses) {
          Vec x(n);
          x[0] = t;
          for (int i = 1; i < n; ++i) x[i] = y[i - 1];
          rep.misses.push_back(x);
          ++k;
        } else {
          // nothing more to record on this gap
          k = j < merged.size() ? std::max(k + 1, static_cast<long>(std::ceil((merged[j].first - tol - ras.lo[0]) / ras.step)))
                                : k1 + 1;
        }
      }
    }
  }
}

VerificationReport verify_common(const Polynomial& phi, const Cover& cover, const VerifyOptions& opt,
                                 CoverKind expected) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.kind = cover.kind;
  rep.scale = cover.scale;
  const int n = cover.nvars;
  if (cover.kind != expected) throw InvalidArgument("cover kind does not match the verifier");
  if (phi.nvars() != n) throw InvalidArgument("polynomial and cover dimensions differ");
  if (!(cover.scale > 0.0)) throw InvalidArgument("cover scale must be positive");
  const double delta = cover.scale;
  const Box dom = opt.domain.value_or(Box::cube(n));
  const Parallelogram outer = dilate(Parallelogram::from_box(dom), 2.0);
  rep.constant_limit = expected == CoverKind::GraphFlat ? opt.c_flat : opt.c_sub;
  rep.width_min = cover.pieces.empty() ? 0.0 : INFINITY;

  auto issue = [&](std::size_t k, const std::string& clause, double v) {
    if (rep.issues.size() < kMaxIssues) rep.issues.push_back({k, clause, v});
  };
  for (std::size_t k = 0; k < cover.pieces.size(); ++k) {
    const Parallelogram& s = cover.pieces[k].shape;
    if (s.dim() != n) throw InvalidArgument("piece dimension does not match the cover");
    double bound;
    if (expected == CoverKind::GraphFlat)
      bound = flat_certificate(phi, s, delta, FlatOptions{opt.c_flat, opt.range}).bound.hi;
    else
      bound = sublevel_certificate(phi, s, delta, opt.c_sub, opt.range).bound.hi;
    const double c = bound / delta;
    if (c > rep.worst_constant || k == 0) {
      rep.worst_constant = std::max(rep.worst_constant, c);
      rep.worst_piece = k;
    }
    if (c > rep.constant_limit * (1.0 + 1e-9)) {
      rep.certificate_ok = false;
      issue(k, "certificate", c);
    }
    const double w = s.width();
    if (w < rep.width_min) {
      rep.width_min = w;
      rep.narrowest_piece = k;
    }
    if (w < delta * (1.0 - 1e-9)) {
      rep.width_ok = false;
      issue(k, "width", w);
    }
    if (!contains(outer, s, 1e-9)) {
      rep.containment_ok = false;
      issue(k, "containment", 0.0);
    }
  }
  if (cover.pieces.empty()) {
    // an empty sublevel set is legitimately covered by nothing
    if (expected == CoverKind::GraphFlat)
      rep.coverage_ok = false;
    else
      check_coverage(phi, cover, dom, opt, rep);
  } else {
    check_coverage(phi, cover, dom, opt, rep);
    rep.overlap = overlap_profile(cover, opt.mus, opt.exact_overlap);
    rep.overlap_bound = opt.overlap_bound;
    bool mono = true;
    for (std::size_t i = 1; i < rep.overlap.b.size(); ++i) mono = mono && rep.overlap.b[i] >= rep.overlap.b[i - 1];
    const int b1 = rep.overlap.b.empty() ? 0 : rep.overlap.b.front();
    rep.overlap_ok = mono && b1 >= 1 && b1 <= opt.overlap_bound;
  }
  rep.count = cover.pieces.size();
  rep.budget = opt.budget_constant * std::pow(delta, -(n + cover.eps));
  rep.count_ok = static_cast<double>(rep.count) <= rep.budget;
  rep.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace

VerificationReport verify_graph_cover(const Polynomial& phi, const Cover& cover, const VerifyOptions& opt) {
  return verify_common(phi, cover, opt, CoverKind::GraphFlat);
}

VerificationReport verify_sublevel_cover(const Polynomial& phi, const Cover& cover, const VerifyOptions& opt) {
  return verify_common(phi, cover, opt, CoverKind::Sublevel);
}

VerificationReport verify_cover(const Polynomial& phi, const Cover& cover, const VerifyOptions& opt) {
  return verify_common(phi, cover, opt, cover.kind);
}

nlohmann::json to_json(const VerificationReport& r, bool include_runtime) {
  using nlohmann::json;
  json misses = json::array();
  for (const Vec& m : r.misses) {
    json p = json::array();
    for (int i = 0; i < m.size(); ++i) p.push_back(m[i]);
    misses.push_back(p);
  }
  json issues = json::array();
  for (const auto& i : r.issues) issues.push_back({{"piece", i.piece}, {"clause", i.clause}, {"value", i.value}});
  json j = {
      {"pass", r.pass()},
      {"kind", to_string(r.kind)},
      {"scale", r.scale},
      {"coverage",
       {{"ok", r.coverage_ok},
        {"points", r.points_checked},
        {"lines", r.lines_checked},
        {"lines_total", r.lines_total},
        {"subsampled", r.subsampled},
        {"misses", misses}}},
      {"certificate",
       {{"ok", r.certificate_ok},
        {"worst_constant", r.worst_constant},
        {"worst_piece", r.worst_piece},
        {"limit", r.constant_limit}}},
      {"width", {{"ok", r.width_ok}, {"min", r.width_min}, {"narrowest_piece", r.narrowest_piece}}},
      {"containment", {{"ok", r.containment_ok}}},
      {"overlap",
       {{"ok", r.overlap_ok},
        {"mu", r.overlap.mu},
        {"B", r.overlap.b},
        {"method", r.overlap.method},
        {"fallback", r.overlap.fallback},
        {"bound", r.overlap_bound}}},
      {"count", {{"ok", r.count_ok}, {"pieces", r.count}, {"budget", r.budget}}},
      {"issues", issues},
  };
  if (include_runtime) j["runtime"] = r.runtime;
  return j;
}

}  // namespace flatcover
