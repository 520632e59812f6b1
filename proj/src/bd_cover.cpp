#include <cmath>

#include "engine_internal.hpp"
#include "flatcover/polyjson.hpp"

namespace flatcover {

Cover bd_cover(const Polynomial& phi, double delta, double k, const EngineConfig& cfg,
               std::optional<Parallelogram> domain) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (!(k > 0.0)) throw InvalidArgument("K must be positive");
  const int n = phi.nvars();
  const Parallelogram dom = domain.value_or(Parallelogram::cube(n));
  dom.validate();

  const Polynomial h = compose_affine(hessian_det(phi), chart(dom));
  const RangeBound hb = range_bound(h, Box::cube(n), cfg.range);
  // the enclosure carries a rounding margin, so the threshold gets a matching relative slack
  const double hmin = (1.0 - 1e-9) / k;
  if (!(hb.lo >= hmin || hb.hi <= -hmin))
    throw PreconditionError("cannot certify |H phi| >= 1/K on the domain (enclosure [" + format_double(hb.lo) + ", " +
                                format_double(hb.hi) + "])",
                            hb);

  Cover cov;
  cov.nvars = n;
  cov.scale = delta;
  cov.kind = CoverKind::GraphFlat;
  cov.provenance.push_back({"bd_cover", delta, "K=" + format_double(k)});

  const double side = std::sqrt(delta);
  std::vector<int> counts(static_cast<std::size_t>(n));
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    counts[i] = std::max(1, static_cast<int>(std::ceil(2.0 * dom.halflens[i] / side - 1e-12)));
    total *= static_cast<std::size_t>(counts[i]);
  }
  detail::check_budget(total, cfg, cov.provenance);
  const Vec floor = Vec::Constant(n, delta);
  for (const Parallelogram& t : partition_grid(dom, counts)) {
    Piece p = detail::flat_piece(phi, t, delta, cfg);
    const bool ok = p.certificate.bound.hi <= cfg.c_flat * delta;
    if (ok || !cfg.strict)
      cov.pieces.push_back(std::move(p));
    else
      detail::flat_refine(phi, t, delta, floor, cfg, cov.pieces, 1);
  }
  detail::check_budget(cov.pieces.size(), cfg, cov.provenance);
  cov.canonicalize();
  return cov;
}

}  // namespace flatcover
