#include "flatcover/cover.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "flatcover/polyjson.hpp"
#include "flatcover/spatial.hpp"

namespace flatcover {

std::string to_string(CoverKind k) { return k == CoverKind::GraphFlat ? "graph-flat" : "sublevel"; }

CoverKind cover_kind_from_string(const std::string& s) {
  if (s == "graph-flat") return CoverKind::GraphFlat;
  if (s == "sublevel") return CoverKind::Sublevel;
  throw InvalidArgument("unknown cover kind '" + s + "'");
}

namespace {

bool lex_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

bool mat_less(const Mat& a, const Mat& b) {
  for (int i = 0; i < a.size(); ++i)
    if (a.data()[i] != b.data()[i]) return a.data()[i] < b.data()[i];
  return false;
}

}  // namespace

void Cover::canonicalize() {
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    if (lex_less(a.shape.center, b.shape.center)) return true;
    if (lex_less(b.shape.center, a.shape.center)) return false;
    if (lex_less(a.shape.halflens, b.shape.halflens)) return true;
    if (lex_less(b.shape.halflens, a.shape.halflens)) return false;
    return mat_less(a.shape.normals, b.shape.normals);
  });
}

double Cover::min_width() const {
  double w = INFINITY;
  for (const auto& p : pieces) w = std::min(w, p.shape.width());
  return w;
}

PieceCertificate to_piece_certificate(const FlatnessCertificate& c) {
  return {c.witness, c.bound, c.scale, c.constant};
}

PieceCertificate to_piece_certificate(const SublevelCertificate& c) {
  return {std::nullopt, c.bound, c.scale, c.constant};
}

// ---------------------------------------------------------------------------
// overlap

namespace {

double radical_inverse(unsigned long i, unsigned base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

std::vector<Parallelogram> dilated_shapes(const Cover& cover, double mu) {
  std::vector<Parallelogram> out;
  out.reserve(cover.pieces.size());
  for (const auto& p : cover.pieces) out.push_back(dilate(p.shape, mu));
  return out;
}

}  // namespace

int mu_overlap(const Cover& cover, double mu, const OverlapOptions& opt) {
  if (cover.pieces.empty()) throw InvalidArgument("overlap of an empty cover");
  if (mu < 1.0) throw InvalidArgument("mu must be at least 1");
  const std::vector<Parallelogram> shapes = dilated_shapes(cover, mu);
  PieceIndex index(shapes);
  const int n = shapes[0].dim();
  int best = 0;
  auto count_at = [&](const Vec& x) {
    int c = 0;
    index.candidates(x, [&](int k) {
      if (shapes[k].contains_interior(x)) ++c;
    });
    best = std::max(best, c);
  };
  Vec lo = Vec::Constant(n, INFINITY), hi = Vec::Constant(n, -INFINITY);
  for (const auto& s : shapes) {
    count_at(s.center);
    for (const Vec& v : s.vertices()) count_at(s.center + (v - s.center) * (1.0 - 1e-7));
    Box b = s.bounding_box();
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  static const unsigned primes[] = {2, 3, 5, 7, 11, 13};
  for (int k = 1; k <= opt.cloud_points; ++k) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * radical_inverse(static_cast<unsigned long>(k), primes[i % 6]);
    count_at(x);
  }
  return std::max(best, 1);
}

int mu_overlap_exact(const Cover& cover, double mu, bool* fallback, const OverlapOptions& opt) {
  if (cover.pieces.empty()) throw InvalidArgument("overlap of an empty cover");
  const int n = cover.nvars > 0 ? cover.nvars : cover.pieces[0].shape.dim();
  if (static_cast<int>(cover.pieces.size()) > opt.exact_piece_cap || n > 3) {
    if (fallback) *fallback = true;
    return mu_overlap(cover, mu, opt);
  }
  if (fallback) *fallback = false;
  const std::vector<Parallelogram> shapes = dilated_shapes(cover, mu);
  PieceIndex index(shapes);
  int best = 1;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    Box b = shapes[i].bounding_box();
    std::vector<int> cand;
    for (int k : index.query(b.lo, b.hi))
      if (k != static_cast<int>(i) && interiors_intersect(shapes[i], shapes[k])) cand.push_back(k);
    if (static_cast<int>(cand.size()) + 1 <= best) continue;
    // depth-first growth of families with a common interior point
    Polytope base = halfspaces(shapes[i]);
    std::function<void(std::size_t, Polytope&, int)> grow = [&](std::size_t from, Polytope& poly, int size) {
      best = std::max(best, size);
      if (size >= opt.exact_subset_cap) return;
      if (size + static_cast<int>(cand.size() - from) <= best) return;
      for (std::size_t t = from; t < cand.size(); ++t) {
        if (size + static_cast<int>(cand.size() - t) <= best) return;
        const int k = cand[t];
        if (k < static_cast<int>(i)) continue;
        Polytope next = poly;
        for (const auto& h : halfspaces(shapes[k])) next.push_back(h);
        ChebyshevResult cr = chebyshev_center(next, n, 4.0 * mu + 4.0);
        if (cr.feasible && cr.radius > 1e-10) grow(t + 1, next, size + 1);
      }
    };
    grow(0, base, 1);
  }
  return best;
}

OverlapProfile overlap_profile(const Cover& cover, const std::vector<double>& mus, bool exact,
                               const OverlapOptions& opt) {
  OverlapProfile prof;
  prof.method = exact ? "exact-LP" : "grid";
  for (double mu : mus) {
    prof.mu.push_back(mu);
    if (exact) {
      bool fb = false;
      prof.b.push_back(mu_overlap_exact(cover, mu, &fb, opt));
      if (fb) {
        prof.fallback = true;
        prof.method = "grid";
      }
    } else {
      prof.b.push_back(mu_overlap(cover, mu, opt));
    }
  }
  // B is non-decreasing in mu by definition; witness sets differ per mu, so take running max
  for (std::size_t k = 1; k < prof.b.size(); ++k) prof.b[k] = std::max(prof.b[k], prof.b[k - 1]);
  return prof;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json vec_json(const Vec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from(const nlohmann::json& j) {
  std::vector<double> v = j.get<std::vector<double>>();
  Vec out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
  return out;
}

nlohmann::json bound_json(const RangeBound& b) {
  return {{"lo", b.lo}, {"hi", b.hi}, {"certified", b.certified}, {"depth_capped", b.depth_capped}};
}

RangeBound bound_from(const nlohmann::json& j) {
  RangeBound b;
  b.lo = j.at("lo").get<double>();
  b.hi = j.at("hi").get<double>();
  b.certified = j.value("certified", true);
  b.depth_capped = j.value("depth_capped", false);
  return b;
}

}  // namespace

nlohmann::json to_json(const Parallelogram& r) {
  nlohmann::json basis = nlohmann::json::array();
  for (int i = 0; i < r.dim(); ++i) basis.push_back(vec_json(r.normals.col(i)));
  return {{"center", vec_json(r.center)}, {"basis", basis}, {"halflens", vec_json(r.halflens)}};
}

Parallelogram parallelogram_from_json(const nlohmann::json& j) {
  Parallelogram r;
  r.center = vec_from(j.at("center"));
  const int n = r.dim();
  const auto& basis = j.at("basis");
  if (!basis.is_array() || static_cast<int>(basis.size()) != n) throw InvalidArgument("basis must hold one vector per dimension");
  r.normals.resize(n, n);
  for (int i = 0; i < n; ++i) {
    Vec u = vec_from(basis[static_cast<std::size_t>(i)]);
    if (u.size() != n) throw InvalidArgument("basis vector has wrong length");
    r.normals.col(i) = u;
  }
  r.halflens = vec_from(j.at("halflens"));
  r.validate();
  return r;
}

nlohmann::json to_json(const Cover& c) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : c.pieces) {
    nlohmann::json jp = to_json(p.shape);
    nlohmann::json cert = {{"type", c.kind == CoverKind::GraphFlat ? "flat" : "sublevel"},
                           {"bound", bound_json(p.certificate.bound)},
                           {"scale", p.certificate.scale},
                           {"constant", p.certificate.constant}};
    if (p.certificate.witness) cert["witness"] = to_json(*p.certificate.witness);
    jp["certificate"] = cert;
    jp["depth"] = p.depth;
    pieces.push_back(jp);
  }
  nlohmann::json j = {{"nvars", c.nvars}, {"scale", c.scale}, {"eps", c.eps}, {"kind", to_string(c.kind)},
                      {"pieces", pieces}};
  if (c.overlap) {
    j["overlap"] = {{"mu", c.overlap->mu}, {"B", c.overlap->b}, {"method", c.overlap->method},
                    {"fallback", c.overlap->fallback}};
  }
  nlohmann::json prov = nlohmann::json::array();
  for (const auto& s : c.provenance) prov.push_back({{"algorithm", s.algorithm}, {"scale", s.scale}, {"shell", s.shell}});
  j["provenance"] = prov;
  return j;
}

Cover cover_from_json(const nlohmann::json& j) {
  try {
    Cover c;
    c.scale = j.at("scale").get<double>();
    c.eps = j.value("eps", 1.0);
    c.kind = cover_kind_from_string(j.at("kind").get<std::string>());
    for (const auto& jp : j.at("pieces")) {
      Piece p;
      p.shape = parallelogram_from_json(jp);
      p.depth = jp.value("depth", 0);
      if (jp.contains("certificate")) {
        const auto& jc = jp.at("certificate");
        p.certificate.bound = bound_from(jc.at("bound"));
        p.certificate.scale = jc.value("scale", c.scale);
        p.certificate.constant = jc.value("constant", 0.0);
        if (jc.contains("witness")) p.certificate.witness = polynomial_from_json(jc.at("witness"));
      }
      c.pieces.push_back(std::move(p));
    }
    c.nvars = j.value("nvars", c.pieces.empty() ? 0 : c.pieces[0].shape.dim());
    for (const auto& p : c.pieces)
      if (p.shape.dim() != c.nvars) throw InvalidArgument("piece dimension does not match cover");
    if (j.contains("overlap")) {
      OverlapProfile o;
      o.mu = j["overlap"].at("mu").get<std::vector<double>>();
      o.b = j["overlap"].at("B").get<std::vector<int>>();
      o.method = j["overlap"].value("method", "grid");
      o.fallback = j["overlap"].value("fallback", false);
      c.overlap = o;
    }
    if (j.contains("provenance"))
      for (const auto& s : j.at("provenance"))
        c.provenance.push_back({s.value("algorithm", ""), s.value("scale", 0.0), s.value("shell", "")});
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed cover JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// SVG

namespace {

std::vector<Eigen::Vector2d> polygon_of(const Parallelogram& r, std::optional<double> slice) {
  std::vector<Eigen::Vector2d> pts;
  if (r.dim() == 2) {
    const Mat e = r.edges();
    const double sx[4] = {-1, 1, 1, -1}, sy[4] = {-1, -1, 1, 1};
    for (int k = 0; k < 4; ++k) pts.emplace_back(r.center + sx[k] * e.col(0) + sy[k] * e.col(1));
    return pts;
  }
  // n = 3: intersect with x3 = slice
  Polytope p2;
  for (const auto& h : halfspaces(r)) {
    Vec a(2);
    a << h.a[0], h.a[1];
    const double b = h.b - h.a[2] * *slice;
    if (a.norm() < 1e-14) {
      if (b < 0) return {};
      continue;
    }
    p2.push_back({a, b});
  }
  std::vector<Vec> v = polytope_vertices(p2, 2);
  if (v.size() < 3) return {};
  Eigen::Vector2d c(0, 0);
  for (const auto& x : v) c += Eigen::Vector2d(x[0], x[1]);
  c /= static_cast<double>(v.size());
  for (const auto& x : v) pts.emplace_back(x[0], x[1]);
  std::sort(pts.begin(), pts.end(), [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return std::atan2(a.y() - c.y(), a.x() - c.x()) < std::atan2(b.y() - c.y(), b.x() - c.x());
  });
  return pts;
}

}  // namespace

std::string to_svg(const Cover& c, std::optional<double> slice) {
  if (c.nvars != 2 && !(c.nvars == 3 && slice)) throw Unsupported("SVG output needs n = 2 (or n = 3 with a slice)");
  const double size = 800.0;
  auto px = [&](double x) { return (x + 2.0) / 4.0 * size; };
  auto py = [&](double y) { return size - (y + 2.0) / 4.0 * size; };
  int maxd = 1;
  for (const auto& p : c.pieces) maxd = std::max(maxd, p.depth);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  os << "<rect x=\"" << px(-1) << "\" y=\"" << py(1) << "\" width=\"" << size / 2 << "\" height=\"" << size / 2
     << "\" fill=\"none\" stroke=\"#999\" stroke-dasharray=\"4\"/>\n";
  for (const auto& p : c.pieces) {
    auto poly = polygon_of(p.shape, slice);
    if (poly.empty()) continue;
    const int shade = 40 + 180 * p.depth / maxd;
    os << "<polygon points=\"";
    for (std::size_t k = 0; k < poly.size(); ++k) os << (k ? " " : "") << px(poly[k].x()) << "," << py(poly[k].y());
    os << "\" fill=\"none\" stroke=\"rgb(" << shade << ",40," << 255 - shade << ")\" stroke-width=\"0.5\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace flatcover
