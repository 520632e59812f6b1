#include <doctest.h>

#include "flatcover/engine.hpp"
#include "flatcover/harness.hpp"
#include "support.hpp"

using namespace flatcover;

namespace {

Polynomial x(int n, int j) { return Polynomial::variable(n, j); }

Polynomial paraboloid() { return x(2, 0) * x(2, 0) + x(2, 1) * x(2, 1); }

bool has_issue(const VerificationReport& r, std::size_t piece, const std::string& clause) {
  for (const auto& i : r.issues)
    if (i.piece == piece && i.clause == clause) return true;
  return false;
}

}  // namespace

TEST_CASE("bd cover of the paraboloid passes every clause") {
  Cover c = bd_cover(paraboloid(), 1.0 / 16, 1.0);
  VerificationReport r = verify_graph_cover(paraboloid(), c);
  CHECK(r.pass());
  CHECK(r.coverage_ok);
  CHECK(r.certificate_ok);
  CHECK(r.width_ok);
  CHECK(r.containment_ok);
  CHECK(r.overlap_ok);
  CHECK(r.count_ok);
  CHECK(r.worst_constant <= 0.5 + 1e-9);
  CHECK(r.count == 64);
  CHECK(r.misses.empty());
}

TEST_CASE("planted narrow piece fails the width clause") {
  const double delta = 1.0 / 16;
  Cover c = bd_cover(paraboloid(), delta, 1.0);
  c.pieces[5].shape.halflens[0] = delta / 2;
  VerificationReport r = verify_graph_cover(paraboloid(), c);
  CHECK_FALSE(r.pass());
  CHECK_FALSE(r.width_ok);
  CHECK(r.narrowest_piece == 5);
  CHECK(r.width_min == doctest::Approx(delta / 2));
  CHECK(has_issue(r, 5, "width"));
}

TEST_CASE("missing corner cube fails coverage with a witness point") {
  const double delta = 1.0 / 16;
  Cover c = bd_cover(paraboloid(), delta, 1.0);
  Vec corner = Vec::Constant(2, -0.95);
  Parallelogram gone;
  for (std::size_t k = 0; k < c.pieces.size(); ++k)
    if (c.pieces[k].shape.contains(corner)) {
      gone = c.pieces[k].shape;
      c.pieces.erase(c.pieces.begin() + static_cast<long>(k));
      break;
    }
  REQUIRE(c.pieces.size() == 63);
  VerificationReport r = verify_graph_cover(paraboloid(), c);
  CHECK_FALSE(r.coverage_ok);
  CHECK_FALSE(r.pass());
  REQUIRE_FALSE(r.misses.empty());
  for (const Vec& m : r.misses) CHECK(gone.contains(m, 1e-12));
  CHECK(r.certificate_ok);
  CHECK(r.width_ok);
}

TEST_CASE("sublevel1 of a shifted parabola verifies") {
  Polynomial p = univariate(std::vector<double>{-0.25, 0, 1});
  Cover c = sublevel1(p, 0.01);
  VerificationReport r = verify_sublevel_cover(p, c);
  CHECK(r.pass());
  CHECK(r.worst_constant <= 6.0);
}

TEST_CASE("planted sublevel piece with large |phi| is flagged") {
  Polynomial p = univariate(std::vector<double>{-0.25, 0, 1});
  Cover c = sublevel1(p, 0.01);
  c.pieces.push_back(Piece{Parallelogram::interval(-0.1, 0.1), {}, 0});
  VerificationReport r = verify_sublevel_cover(p, c);
  CHECK_FALSE(r.certificate_ok);
  CHECK(has_issue(r, c.pieces.size() - 1, "certificate"));
  CHECK(r.worst_piece == c.pieces.size() - 1);
  CHECK(r.worst_constant >= 24.0);
}

TEST_CASE("sublevel cover of a line verifies") {
  Polynomial phi = x(2, 0) - x(2, 1);
  VerificationReport r = verify_sublevel_cover(phi, sublevel_cover(phi, 1.0 / 64, 0.5));
  CHECK(r.pass());
}

TEST_CASE("containment, count and overlap clauses") {
  const double delta = 1.0 / 16;
  Cover c = bd_cover(paraboloid(), delta, 1.0);
  Cover far = c;
  far.pieces[0].shape.center = Vec::Constant(2, 2.5);
  VerificationReport r1 = verify_graph_cover(paraboloid(), far);
  CHECK_FALSE(r1.containment_ok);
  CHECK(has_issue(r1, 0, "containment"));

  VerifyOptions tight;
  tight.budget_constant = 1e-3;
  VerificationReport r2 = verify_graph_cover(paraboloid(), c, tight);
  CHECK_FALSE(r2.count_ok);
  CHECK(r2.coverage_ok);

  Cover stacked = c;
  for (int k = 0; k < 9; ++k) stacked.pieces.push_back(c.pieces[0]);
  VerificationReport r3 = verify_graph_cover(paraboloid(), stacked);
  CHECK_FALSE(r3.overlap_ok);
  CHECK(r3.overlap.b.front() == 10);
}

TEST_CASE("a cover of the wrong kind is rejected") {
  Cover c = bd_cover(paraboloid(), 1.0 / 16, 1.0);
  CHECK_THROWS_AS(verify_sublevel_cover(paraboloid(), c), InvalidArgument);
  CHECK_THROWS_AS(verify_graph_cover(x(3, 0), c), InvalidArgument);
}

TEST_CASE("verification ignores provenance and stored certificates") {
  Polynomial phi = paraboloid() - Polynomial::constant(2, 0.25);
  Cover c = sublevel_cover(phi, 1.0 / 64, 0.5);
  Cover bare = c;
  bare.provenance.clear();
  for (auto& p : bare.pieces) p.certificate = {};
  CHECK(to_json(verify_cover(phi, c), false).dump() == to_json(verify_cover(phi, bare), false).dump());
}

TEST_CASE("verification after a serialization round trip is idempotent") {
  std::mt19937_64 rng(61);
  Polynomial phi = fctest::random_l1_poly(rng, 2, 4);
  Cover c = uniform_cover(phi, 1.0 / 256, 0.5);
  const std::string a = to_json(verify_cover(phi, c), false).dump();
  Cover d = cover_from_json(nlohmann::json::parse(to_json(c).dump()));
  const std::string b = to_json(verify_cover(phi, d), false).dump();
  CHECK(a == b);
}

TEST_CASE("stratified line subsampling still finds a planted hole") {
  const double delta = 1.0 / 256;
  Polynomial phi = x(2, 0) * x(2, 0) - x(2, 1) * x(2, 1);
  Cover c = uniform_cover(phi, delta, 0.5);
  VerifyOptions opt;
  opt.line_budget = 64;
  VerificationReport ok = verify_graph_cover(phi, c, opt);
  CHECK(ok.pass());
  CHECK(ok.subsampled);
  CHECK(ok.lines_checked < ok.lines_total);
  // a hole taller than the sampling stride is always hit
  Cover holed = c;
  std::erase_if(holed.pieces, [](const Piece& p) { return p.shape.center[0] > 0.5 && p.shape.center[1] > 0.0; });
  CHECK_FALSE(verify_graph_cover(phi, holed, opt).coverage_ok);
}

TEST_CASE("empty sublevel sets need no pieces") {
  Polynomial p = univariate(std::vector<double>{0.5, 0, 0.1});
  Cover c = sublevel1(p, 1.0 / 64);
  CHECK(c.pieces.empty());
  CHECK(verify_sublevel_cover(p, c).pass());
  Cover g;
  g.nvars = 1;
  g.scale = 1.0 / 64;
  CHECK_FALSE(verify_graph_cover(p, g).pass());
}

TEST_CASE("report JSON mirrors the clause structure") {
  Cover c = bd_cover(paraboloid(), 1.0 / 16, 1.0);
  auto j = to_json(verify_graph_cover(paraboloid(), c));
  for (const char* k : {"coverage", "certificate", "width", "containment", "overlap", "count", "issues", "runtime"})
    CHECK(j.contains(k));
  CHECK(j["pass"] == true);
  CHECK_FALSE(to_json(verify_graph_cover(paraboloid(), c), false).contains("runtime"));
}
