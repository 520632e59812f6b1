#include "flatcover/estimate.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include "flatcover/polyjson.hpp"

namespace flatcover {

std::string to_string(Trial t) {
  switch (t) {
    case Trial::Gaussian: return "gaussian";
    case Trial::RandomPhase: return "phase";
    case Trial::AllOnes: return "ones";
  }
  return "gaussian";
}

Trial trial_from_string(const std::string& s) {
  if (s == "gaussian") return Trial::Gaussian;
  if (s == "phase" || s == "random-phase") return Trial::RandomPhase;
  if (s == "ones" || s == "all-ones") return Trial::AllOnes;
  throw InvalidArgument("unknown trial type '" + s + "'");
}

std::size_t CellEmbedding::total() const {
  std::size_t t = 1;
  for (int v : m) t *= static_cast<std::size_t>(v);
  return t;
}

namespace {

int next_pow2(double x) {
  int m = 1;
  while (m < x && m < (1 << 30)) m <<= 1;
  return m;
}

int floor_pow2(double x) {
  int m = 1;
  while (2.0 * m <= x) m <<= 1;
  return m;
}

bool even_integer(double p) { return std::abs(p - std::round(p)) < 1e-12 && static_cast<long>(std::round(p)) % 2 == 0; }

// cell centre on [-2, 2) at resolution m
double centre(long k, int m) { return -2.0 + (k + 0.5) * 4.0 / m; }

// index range [k0, k1] of centres inside [a, b]
std::pair<long, long> centre_range(double a, double b, int m) {
  const double h = 4.0 / m;
  return {static_cast<long>(std::ceil((a + 2.0) / h - 0.5 - 1e-12)),
          static_cast<long>(std::floor((b + 2.0) / h - 0.5 + 1e-12))};
}

long wrap(long k, int m) {
  k %= m;
  return k < 0 ? k + m : k;
}

class Plans {
 public:
  ~Plans() {
    for (auto& [k, v] : plans_) fftw_destroy_plan(v.second);
  }
  // Backward in-place transform on a buffer owned by the cache.
  std::pair<fftw_complex*, fftw_plan> get(const std::vector<int>& dims) {
    auto it = plans_.find(dims);
    if (it != plans_.end()) return it->second;
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
    if (!buf) throw EngineError("out of memory allocating the transform grid");
    bufs_.emplace_back(buf);
    fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    plans_[dims] = {buf, p};
    return {buf, p};
  }

 private:
  struct Free {
    void operator()(fftw_complex* p) const { fftw_free(p); }
  };
  std::map<std::vector<int>, std::pair<fftw_complex*, fftw_plan>> plans_;
  std::vector<std::unique_ptr<fftw_complex, Free>> bufs_;
};

double mean_abs_pow(const fftw_complex* f, std::size_t total, double p) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < total; ++i) s += std::pow(std::hypot(f[i][0], f[i][1]), p);
  return static_cast<double>(s / static_cast<long double>(total));
}

std::vector<int> unravel(std::int64_t idx, const std::vector<int>& m) {
  std::vector<int> k(m.size());
  for (int i = static_cast<int>(m.size()) - 1; i >= 0; --i) {
    k[i] = static_cast<int>(idx % m[i]);
    idx /= m[i];
  }
  return k;
}

// L^p norm of one piece function: exact torus average on a shifted grid of size G_i per axis
// whenever p is an even integer and G_i > p (b_i - 1); otherwise the full grid.
double piece_norm(const std::vector<std::int64_t>& cells, const std::vector<std::complex<double>>& coef,
                  const std::vector<int>& m, double p, Plans& plans) {
  const int d = static_cast<int>(m.size());
  std::vector<std::vector<int>> ks;
  ks.reserve(cells.size());
  std::vector<int> lo(d, INT32_MAX), hi(d, INT32_MIN);
  for (auto c : cells) {
    ks.push_back(unravel(c, m));
    for (int i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], ks.back()[i]);
      hi[i] = std::max(hi[i], ks.back()[i]);
    }
  }
  std::vector<int> g(d);
  const bool even = even_integer(p);
  for (int i = 0; i < d; ++i) {
    const int b = hi[i] - lo[i] + 1;
    g[i] = even ? std::min(m[i], next_pow2(p * b + 1)) : m[i];
  }
  auto [buf, plan] = plans.get(g);
  std::size_t total = 1;
  for (int v : g) total *= static_cast<std::size_t>(v);
  std::fill(reinterpret_cast<double*>(buf), reinterpret_cast<double*>(buf) + 2 * total, 0.0);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i) idx = idx * g[i] + static_cast<std::size_t>(wrap(ks[c][i] - lo[i], g[i]));
    buf[idx][0] += coef[c].real();
    buf[idx][1] += coef[c].imag();
  }
  fftw_execute(plan);
  return std::pow(mean_abs_pow(buf, total, p), 1.0 / p);
}

}  // namespace

std::vector<int> grid_sizes(const Cover& cover, const EstimateOptions& opt) {
  const int n = cover.nvars;
  const double delta = cover.scale;
  if (!(delta > 0.0)) throw InvalidArgument("cover scale must be positive");
  const bool graph = cover.kind == CoverKind::GraphFlat;
  const int d = graph ? n + 1 : n;
  if (d > 3) throw Unsupported("estimation is limited to tori of dimension 3");
  auto check = [](int v) {
    if (v < 1 || (v & (v - 1)) != 0) throw InvalidArgument("grid size must be a power of two");
    return v;
  };
  std::vector<int> m(d);
  if (graph) {
    const int mv = opt.m_vertical ? check(*opt.m_vertical) : std::min(opt.axis_cap, next_pow2(8.0 / delta));
    const double room = static_cast<double>(opt.cell_cap) / mv;
    const int mh = opt.m_horizontal ? check(*opt.m_horizontal)
                                    : std::min(mv, floor_pow2(std::pow(room, 1.0 / n) * (1.0 + 1e-12)));
    for (int i = 0; i < n; ++i) m[i] = mh;
    m[n] = mv;
  } else {
    int mm = opt.m_vertical ? check(*opt.m_vertical) : std::min(opt.axis_cap, next_pow2(8.0 / delta));
    if (!opt.m_vertical)
      mm = std::min(mm, floor_pow2(std::pow(static_cast<double>(opt.cell_cap), 1.0 / n) * (1.0 + 1e-12)));
    std::fill(m.begin(), m.end(), mm);
  }
  if (m.back() * delta < 4.0 * (1.0 - 1e-12))
    throw InvalidArgument("grid too coarse: need at least 4/delta cells across the neighbourhood axis");
  return m;
}

CellEmbedding embed(const Polynomial& phi, const Cover& cover, const EstimateOptions& opt) {
  const int n = cover.nvars;
  if (phi.nvars() != n) throw InvalidArgument("polynomial and cover dimensions differ");
  const double delta = cover.scale;
  const bool graph = cover.kind == CoverKind::GraphFlat;
  CellEmbedding e;
  e.m = grid_sizes(cover, opt);
  const int d = static_cast<int>(e.m.size());
  const int mv = e.m.back();
  std::vector<char> owned;
  if (opt.disjoint) owned.assign(e.total(), 0);

  Vec xi(n);
  std::vector<long> lo(n), hi(n), k(n);
  for (const Piece& piece : cover.pieces) {
    std::vector<std::int64_t> cells;
    const Box bb = piece.shape.bounding_box();
    bool empty = false;
    for (int i = 0; i < n; ++i) {
      auto [a, b] = centre_range(std::max(bb.lo[i], -1.0), std::min(bb.hi[i], 1.0), e.m[i]);
      lo[i] = a;
      hi[i] = b;
      empty = empty || a > b;
    }
    if (!empty) {
      k = lo;
      for (;;) {
        for (int i = 0; i < n; ++i) xi[i] = centre(k[i], e.m[i]);
        if (piece.shape.contains(xi, 1e-12)) {
          const double v = phi(xi);
          std::int64_t base = 0;
          for (int i = 0; i < n; ++i) base = base * e.m[i] + k[i];
          if (graph) {
            auto [v0, v1] = centre_range(v - delta, v + delta, mv);
            for (long t = v0; t <= v1; ++t) cells.push_back(base * mv + wrap(t, mv));
          } else if (std::abs(v) <= delta) {
            cells.push_back(base);
          }
        }
        int ax = n - 1;
        while (ax >= 0 && ++k[ax] > hi[ax]) {
          k[ax] = lo[ax];
          --ax;
        }
        if (ax < 0) break;
      }
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    if (opt.disjoint) {
      std::vector<std::int64_t> keep;
      for (auto c : cells)
        if (!owned[static_cast<std::size_t>(c)]) {
          owned[static_cast<std::size_t>(c)] = 1;
          keep.push_back(c);
        }
      cells.swap(keep);
    } else if (graph && cells.empty() && (piece.shape.center.array().abs() < 1.0).all()) {
      throw InvalidArgument("grid too coarse: a piece received no frequency cells");
    }
    e.cells.push_back(std::move(cells));
  }
  (void)d;
  std::size_t used = 0;
  for (const auto& c : e.cells) used += c.size();
  if (used == 0) throw InvalidArgument("grid too coarse: no frequency cells in any piece");
  return e;
}

DecouplingEstimate estimate_ratio(const Polynomial& phi, const Cover& cover, const EstimateOptions& opt) {
  return estimate_ratio(phi, cover, embed(phi, cover, opt), opt);
}

DecouplingEstimate estimate_ratio(const Polynomial&, const Cover& cover, const CellEmbedding& emb,
                                  const EstimateOptions& opt) {
  if (!(opt.p >= 2.0 && std::isfinite(opt.p))) throw InvalidArgument("p must be finite and at least 2");
  if (!(opt.q >= 2.0 && std::isfinite(opt.q))) throw InvalidArgument("q must be finite and at least 2");
  if (opt.trials < 1) throw InvalidArgument("trials must be at least 1");
  if (opt.portfolio.empty()) throw InvalidArgument("empty trial portfolio");
  DecouplingEstimate est;
  est.p = opt.p;
  est.q = opt.q;
  est.delta = cover.scale;
  est.m = emb.m;
  est.trials = opt.trials;
  std::size_t active = 0;
  for (const auto& c : emb.cells) {
    est.cells += c.size();
    if (!c.empty()) ++active;
  }
  est.pieces = active;

  Plans plans;
  const std::size_t total = emb.total();
  auto [big, big_plan] = plans.get(emb.m);
  std::vector<std::vector<std::complex<double>>> coef(emb.cells.size());
  for (int t = 0; t < opt.trials; ++t) {
    const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(t);
    const Trial kind = opt.portfolio[static_cast<std::size_t>(t) % opt.portfolio.size()];
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    double energy = 0.0;
    for (std::size_t r = 0; r < emb.cells.size(); ++r) {
      coef[r].resize(emb.cells[r].size());
      for (auto& c : coef[r]) {
        switch (kind) {
          case Trial::Gaussian: {
            const double re = gauss(rng);
            c = {re, gauss(rng)};
            break;
          }
          case Trial::RandomPhase: c = std::polar(1.0, angle(rng)); break;
          case Trial::AllOnes: c = 1.0; break;
        }
        energy += std::norm(c);
      }
    }
    const double scale = opt.amplitude * (opt.normalize && energy > 0.0 ? 1.0 / std::sqrt(energy) : 1.0);
    std::fill(reinterpret_cast<double*>(big), reinterpret_cast<double*>(big) + 2 * total, 0.0);
    for (std::size_t r = 0; r < emb.cells.size(); ++r)
      for (std::size_t i = 0; i < emb.cells[r].size(); ++i) {
        coef[r][i] *= scale;
        const auto idx = static_cast<std::size_t>(emb.cells[r][i]);
        big[idx][0] += coef[r][i].real();
        big[idx][1] += coef[r][i].imag();
      }
    fftw_execute(big_plan);
    const double lhs = std::pow(mean_abs_pow(big, total, opt.p), 1.0 / opt.p);
    double sq = 0.0;
    for (std::size_t r = 0; r < emb.cells.size(); ++r) {
      if (emb.cells[r].empty()) continue;
      sq += std::pow(piece_norm(emb.cells[r], coef[r], emb.m, opt.p, plans), opt.q);
    }
    const double rhs = std::pow(static_cast<double>(active), 0.5 - 1.0 / opt.q) * std::pow(sq, 1.0 / opt.q);
    const double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
    if (t == 0 || ratio > est.ratio) {
      est.ratio = ratio;
      est.best_seed = seed;
    }
    est.history.push_back(est.ratio);
  }
  return est;
}

double loglog_slope(const std::vector<double>& deltas, const std::vector<double>& ratios) {
  const std::size_t k = std::min(deltas.size(), ratios.size());
  if (k < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = std::log(1.0 / deltas[i]), y = std::log(ratios[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = k * sxx - sx * sx;
  return den > 0.0 ? (k * sxy - sx * sy) / den : 0.0;
}

SweepTable sweep(const Polynomial& phi, const std::vector<double>& deltas, const CoverBuilder& build,
                 const EstimateOptions& opt, double eps, double slope_tol) {
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1])) throw InvalidArgument("sweep deltas must be decreasing");
  SweepTable t;
  t.eps = eps;
  t.slope_tol = slope_tol;
  std::vector<double> xs, ys;
  for (double d : deltas) {
    const Cover c = build(d);
    SweepRow row{estimate_ratio(phi, c, opt), 0.0};
    xs.push_back(d);
    ys.push_back(row.est.ratio);
    row.slope_partial = loglog_slope(xs, ys);
    t.rows.push_back(row);
  }
  t.slope = loglog_slope(xs, ys);
  t.slope_ok = t.slope <= eps + slope_tol;
  return t;
}

SweepTable sweep(const Polynomial& phi, const std::vector<double>& deltas, Mode mode, double eps,
                 const EstimateOptions& opt, const EngineConfig& cfg, double slope_tol) {
  auto build = [&](double d) {
    CoverRequest req;
    req.phi = phi;
    req.delta = d;
    req.eps = eps;
    req.mode = mode;
    return build_cover(req, cfg);
  };
  return sweep(phi, deltas, build, opt, eps, slope_tol);
}

Cover tile_cover(const Polynomial& phi, double delta, double side, const EngineConfig& cfg) {
  const int n = phi.nvars();
  if (!(side >= 2.0 * delta * (1.0 - 1e-12))) throw InvalidArgument("tile side below the width floor 2 delta");
  const int k = static_cast<int>(std::ceil(2.0 / side - 1e-9));
  Cover c;
  c.nvars = n;
  c.scale = delta;
  c.kind = CoverKind::GraphFlat;
  const std::vector<int> counts(static_cast<std::size_t>(n), k);
  for (const auto& r : partition_grid(Parallelogram::cube(n), counts)) {
    Piece p{r, to_piece_certificate(flat_certificate(phi, r, delta, FlatOptions{cfg.c_flat, cfg.range})), 0};
    c.pieces.push_back(std::move(p));
  }
  c.provenance.push_back({"tile_cover", delta, "side=" + format_double(side)});
  c.canonicalize();
  return c;
}

nlohmann::json to_json(const DecouplingEstimate& e) {
  return {{"delta", e.delta}, {"p", e.p},         {"q", e.q},          {"pieces", e.pieces},
          {"ratio", e.ratio}, {"trials", e.trials}, {"best_seed", e.best_seed}, {"m", e.m},
          {"cells", e.cells}, {"history", e.history}};
}

nlohmann::json to_json(const SweepTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    auto j = to_json(r.est);
    j["slope_partial"] = r.slope_partial;
    rows.push_back(j);
  }
  return {{"rows", rows}, {"slope", t.slope}, {"eps", t.eps}, {"slope_tol", t.slope_tol}, {"slope_ok", t.slope_ok}};
}

std::string to_csv(const SweepTable& t) {
  std::ostringstream os;
  os << "delta,p,q,pieces,ratio,slope_partial\n";
  for (const auto& r : t.rows)
    os << format_double(r.est.delta) << ',' << format_double(r.est.p) << ',' << format_double(r.est.q) << ','
       << r.est.pieces << ',' << format_double(r.est.ratio) << ',' << format_double(r.slope_partial) << '\n';
  return os.str();
}

}  // namespace flatcover
