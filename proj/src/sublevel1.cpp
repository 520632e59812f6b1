#include "engine_internal.hpp"
#include "flatcover/roots.hpp"

namespace flatcover {

Cover sublevel1(const Polynomial& phi, double delta, double a, double b, const EngineConfig& cfg) {
  if (phi.nvars() != 1) throw InvalidArgument("sublevel1 expects a univariate polynomial");
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  if (!(a < b) || a < -1.0 || b > 1.0) throw InvalidArgument("interval must be a nonempty subset of [-1, 1]");
  Cover cov;
  cov.nvars = 1;
  cov.scale = delta;
  cov.kind = CoverKind::Sublevel;
  cov.provenance.push_back({"sublevel1", delta, ""});
  if (phi.is_zero()) {
    cov.pieces.push_back(detail::sublevel_piece(phi, Parallelogram::interval(a, b), delta, cfg));
    return cov;
  }
  for (const auto& [lo, hi] : sublevel_intervals(phi, delta, a, b)) {
    const Parallelogram r = pad_to_width(Parallelogram::interval(lo, hi), delta);
    cov.pieces.push_back(detail::sublevel_piece(phi, r, delta, cfg));
  }
  cov.canonicalize();
  return cov;
}

}  // namespace flatcover
