#include <doctest.h>

#include <set>

#include "flatcover/engine.hpp"
#include "flatcover/estimate.hpp"
#include "support.hpp"

using namespace flatcover;

namespace {

Polynomial x(int n, int j) { return Polynomial::variable(n, j); }

Cover single_piece(int n, double delta, CoverKind kind = CoverKind::GraphFlat) {
  Cover c;
  c.nvars = n;
  c.scale = delta;
  c.kind = kind;
  c.pieces.push_back(Piece{Parallelogram::cube(n), {}, 0});
  return c;
}

double centre(long k, int m) { return -2.0 + (k + 0.5) * 4.0 / m; }

}  // namespace

TEST_CASE("grid sizes") {
  Cover c = single_piece(1, 1.0 / 64);
  auto m = grid_sizes(c);
  REQUIRE(m.size() == 2);
  CHECK(m[1] == 512);
  CHECK(m[0] == 512);
  Cover s = single_piece(2, 1.0 / 1024, CoverKind::Sublevel);
  auto ms = grid_sizes(s);
  REQUIRE(ms.size() == 2);
  CHECK(ms[0] == 4096);
  EstimateOptions bad;
  bad.m_vertical = 100;
  CHECK_THROWS_AS(grid_sizes(c, bad), InvalidArgument);
  bad.m_vertical = 128;
  CHECK_THROWS_AS(grid_sizes(c, bad), InvalidArgument);  // 128 / 64 < 4
  CHECK_THROWS_AS(grid_sizes(single_piece(3, 0.1)), Unsupported);
}

TEST_CASE("flat graph embeds as a slab of the expected thickness") {
  const double delta = 1.0 / 64;
  EstimateOptions opt;
  opt.m_vertical = 1024;
  opt.m_horizontal = 256;
  Cover c = single_piece(1, delta);
  CellEmbedding e = embed(Polynomial(1, 1), c, opt);
  const int mv = 1024;
  const long thick = static_cast<long>(std::ceil(2 * delta * mv / 4));
  std::map<long, long> per_column;
  for (auto cell : e.cells[0]) ++per_column[cell / mv];
  CHECK(per_column.size() == 128);  // centres inside [-1, 1]
  for (auto [col, cnt] : per_column) CHECK(cnt == thick);
}

TEST_CASE("parabola cap cells match the cap area") {
  const double delta = 1.0 / 64;
  Polynomial phi = x(1, 0) * x(1, 0);
  Cover c = bd_cover(phi, delta, 1.0);
  EstimateOptions opt;
  opt.m_vertical = 1024;
  opt.m_horizontal = 1024;
  CellEmbedding e = embed(phi, c, opt);
  const double cell_area = (4.0 / 1024) * (4.0 / 1024);
  for (std::size_t k = 0; k < c.pieces.size(); ++k) {
    const double area = 2 * c.pieces[k].shape.halflens[0] * 2 * delta;
    const double got = e.cells[k].size() * cell_area;
    CHECK(std::abs(got - area) <= 0.2 * area);
  }
}

TEST_CASE("cells stay within one cell of R cap S") {
  const double delta = 1.0 / 64;
  Polynomial phi = x(2, 0) * x(2, 1) + 0.5 * x(2, 0) * x(2, 0);
  Cover c = uniform_cover(phi, delta, 0.5);
  EstimateOptions opt;
  opt.cell_cap = std::size_t{1} << 20;
  CellEmbedding e = embed(phi, c, opt);
  const auto& m = e.m;
  for (std::size_t k = 0; k < c.pieces.size(); ++k)
    for (auto cell : e.cells[k]) {
      long rem = cell;
      const long kv = rem % m[2];
      rem /= m[2];
      const long k1 = rem % m[1], k0 = rem / m[1];
      Vec xi(2);
      xi << centre(k0, m[0]), centre(k1, m[1]);
      const double h = 4.0 / m[0];
      CHECK(dilate(c.pieces[k].shape, 1.0).contains(xi, h));
      // vertical distance on the torus of circumference 4
      double dv = std::fmod(std::abs(centre(kv, m[2]) - phi(xi)), 4.0);
      dv = std::min(dv, 4.0 - dv);
      CHECK(dv <= delta + 4.0 / m[2]);
    }
}

TEST_CASE("first-owner rule gives disjoint cell sets") {
  Polynomial phi = x(1, 0) * x(1, 0);
  Cover c = bd_cover(phi, 1.0 / 64, 1.0);
  c.pieces.push_back(c.pieces[3]);
  EstimateOptions opt;
  opt.disjoint = true;
  CellEmbedding e = embed(phi, c, opt);
  std::set<std::int64_t> seen;
  std::size_t total = 0;
  for (const auto& cells : e.cells) {
    total += cells.size();
    seen.insert(cells.begin(), cells.end());
  }
  CHECK(seen.size() == total);
  CHECK(e.cells.back().empty());
}

TEST_CASE("a too coarse grid is an error") {
  Polynomial phi = x(1, 0) * x(1, 0);
  Cover c = bd_cover(phi, 1.0 / 64, 1.0);
  EstimateOptions opt;
  opt.m_vertical = 256;
  opt.m_horizontal = 2;
  CHECK_THROWS_AS(embed(phi, c, opt), InvalidArgument);
}

TEST_CASE("single piece ratio is one") {
  for (double p : {2.0, 3.0, 4.0, 6.0})
    for (double q : {2.0, 4.0, 7.0}) {
      EstimateOptions opt;
      opt.p = p;
      opt.q = q;
      opt.trials = 3;
      Polynomial phi = x(1, 0) * x(1, 0);
      DecouplingEstimate e = estimate_ratio(phi, single_piece(1, 1.0 / 64), opt);
      CHECK(e.pieces == 1);
      CHECK(std::abs(e.ratio - 1.0) <= 1e-9);
    }
  EstimateOptions opt;
  Polynomial circle = x(2, 0) * x(2, 0) + x(2, 1) * x(2, 1) - Polynomial::constant(2, 0.25);
  DecouplingEstimate s = estimate_ratio(circle, single_piece(2, 1.0 / 64, CoverKind::Sublevel), opt);
  CHECK(std::abs(s.ratio - 1.0) <= 1e-9);
}

TEST_CASE("Plancherel bound for disjoint cells at p = q = 2") {
  Polynomial phi = x(1, 0) * x(1, 0);
  for (double delta : {1.0 / 64, 1.0 / 256}) {
    EstimateOptions opt;
    opt.p = opt.q = 2.0;
    opt.disjoint = true;
    opt.trials = 6;
    DecouplingEstimate e = estimate_ratio(phi, bd_cover(phi, delta, 1.0), opt);
    CHECK(e.ratio <= 1.0 + 1e-6);
    CHECK(e.ratio >= 1.0 - 1e-6);
  }
}

TEST_CASE("ratio is homogeneous in the spectra") {
  Polynomial phi = x(1, 0) * x(1, 0);
  Cover c = bd_cover(phi, 1.0 / 64, 1.0);
  EstimateOptions a;
  a.p = 6.0;
  a.q = 6.0;
  a.trials = 3;
  EstimateOptions b = a;
  b.normalize = false;
  b.amplitude = 37.5;
  CHECK(estimate_ratio(phi, c, a).ratio == doctest::Approx(estimate_ratio(phi, c, b).ratio).epsilon(1e-9));
}

TEST_CASE("running maximum never decreases") {
  Polynomial phi = x(1, 0) * x(1, 0);
  Cover c = bd_cover(phi, 1.0 / 64, 1.0);
  EstimateOptions opt;
  opt.p = 6.0;
  opt.trials = 7;
  DecouplingEstimate e = estimate_ratio(phi, c, opt);
  REQUIRE(e.history.size() == 7);
  for (std::size_t i = 1; i < e.history.size(); ++i) CHECK(e.history[i] >= e.history[i - 1]);
  CHECK(e.ratio == e.history.back());
  CHECK(e.best_seed >= opt.seed);
  CHECK(e.best_seed < opt.seed + 7);
  for (int t = 1; t < 7; ++t) {
    EstimateOptions shorter = opt;
    shorter.trials = t;
    CHECK(estimate_ratio(phi, c, shorter).ratio <= e.ratio);
  }
}

TEST_CASE("estimates are reproducible") {
  Polynomial phi = x(2, 0) * x(2, 1);
  Cover c = uniform_cover(phi, 1.0 / 16, 0.5);
  EstimateOptions opt;
  opt.seed = 99;
  opt.cell_cap = std::size_t{1} << 18;
  CHECK(to_json(estimate_ratio(phi, c, opt)).dump() == to_json(estimate_ratio(phi, c, opt)).dump());
}

TEST_CASE("equal piece norms make the ratio independent of q") {
  Polynomial phi = x(1, 0) * x(1, 0);
  Cover c = bd_cover(phi, 1.0 / 64, 1.0);
  EstimateOptions opt;
  opt.p = 4.0;
  opt.q = 2.0;
  opt.trials = 1;
  opt.portfolio = {Trial::AllOnes};
  // all-ones spectra on congruent caps: every piece has the same norm
  DecouplingEstimate e = estimate_ratio(phi, c, opt);
  EstimateOptions q4 = opt;
  q4.q = 4.0;
  DecouplingEstimate f = estimate_ratio(phi, c, q4);
  // with equal norms, the q-aggregate times #R^{1/2-1/q} is sqrt(#R) * norm for any q
  CHECK(e.ratio == doctest::Approx(f.ratio).epsilon(0.05));
  CHECK(e.pieces == 16);
}

TEST_CASE("affine sweep is flat") {
  Polynomial phi = Polynomial::affine(0.1, std::vector<double>{0.5}).with_degree(2);
  EstimateOptions opt;
  opt.trials = 2;
  SweepTable t = sweep(phi, {1.0 / 16, 1.0 / 32, 1.0 / 64}, Mode::Uniform, 0.5, opt);
  REQUIRE(t.rows.size() == 3);
  for (const auto& r : t.rows) CHECK(std::abs(r.est.ratio - 1.0) <= 1e-9);
  CHECK(std::abs(t.slope) <= 1e-9);
  CHECK(t.slope_ok);
  const std::string csv = to_csv(t);
  CHECK(csv.rfind("delta,p,q,pieces,ratio,slope_partial\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("sweep rejects increasing deltas") {
  EstimateOptions opt;
  CHECK_THROWS_AS(sweep(x(1, 0), {1.0 / 64, 1.0 / 16}, Mode::Uniform, 0.5, opt), InvalidArgument);
}

TEST_CASE("log-log slope oracle") {
  std::vector<double> d = {1.0 / 16, 1.0 / 64, 1.0 / 256}, r;
  for (double v : d) r.push_back(3.0 * std::pow(v, -0.3));
  CHECK(loglog_slope(d, r) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("tile cover needs side at least twice delta") {
  Polynomial phi = x(1, 0) * x(1, 0);
  CHECK_THROWS_AS(tile_cover(phi, 1.0 / 64, 1.0 / 64), InvalidArgument);
  Cover c = tile_cover(phi, 1.0 / 64, 2.0 / 64);
  CHECK(c.pieces.size() == 64);
  CHECK(c.min_width() >= 1.0 / 64);
}
