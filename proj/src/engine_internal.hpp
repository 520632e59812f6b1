#pragma once

#include <string>
#include <vector>

#include "flatcover/engine.hpp"

namespace flatcover::detail {

inline FlatOptions flat_options(const EngineConfig& cfg) { return FlatOptions{cfg.c_flat, cfg.range}; }

Piece flat_piece(const Polynomial& phi, const Parallelogram& shape, double delta, const EngineConfig& cfg,
                 int depth = 0);
Piece sublevel_piece(const Polynomial& phi, const Parallelogram& shape, double delta, const EngineConfig& cfg,
                     int depth = 0);

Parallelogram box_shape(const Vec& lo, const Vec& hi);

/// Flat cover of `r` by adaptive bisection. The split axis is the one whose halving
/// shrinks the Taylor error most; halflens never drop below floor[i].
void flat_refine(const Polynomial& phi, const Parallelogram& r, double delta, const Vec& floor, const EngineConfig& cfg,
                 std::vector<Piece>& out, int depth = 0);

/// Axis whose halving most reduces the chart-Taylor error of phi on r (-1 if every
/// axis is at its floor).
int split_axis(const Polynomial& phi, const Parallelogram& r, const Vec& floor);

/// Graph-flat pieces covering r (the body of uniform_cover, usable on any sub-parallelogram).
std::vector<Piece> uniform_pieces(const Polynomial& phi, const Parallelogram& r, double delta, double eps,
                                  const EngineConfig& cfg, std::vector<ProvenanceStep>& trace);

void check_budget(std::size_t count, const EngineConfig& cfg, const std::vector<ProvenanceStep>& trace);

void check_request(const Polynomial& phi, double delta, double eps, const EngineConfig& cfg);

/// Lifts an n-dim piece into n+1 dims by appending an axis with the given centre and halflen.
Parallelogram extrude(const Parallelogram& r, double center, double half);

/// Slab {x' in cell, |x_j - l(x')| <= eta} with l(x') = t0 + g.(x' - c').
Parallelogram slab_shape(const Vec& cell_center, const Vec& cell_half, int j, double t0, const Vec& g, double eta);

/// Sublevel slabs of phi along direction j over x'-box `cell` inside the t-range [tlo, thi].
/// Cells are refined until the slab is certified; `flat_target` optionally forces cells
/// on which the implicit root is flat to that level. Returns false if a cell at the width
/// floor could not be certified (the failing slab is still emitted).
struct SlabJob {
  const Polynomial* phi = nullptr;
  int j = 0;
  double delta = 0.0;
  double tlo = -1.0, thi = 1.0;
  double flat_target = 0.0;
  const EngineConfig* cfg = nullptr;
};
struct SlabStats {
  int cells = 0;
  int discarded = 0;
  int failed = 0;
  double dominance = 1.0;
};
bool slab_cover(const SlabJob& job, const Vec& cell_lo, const Vec& cell_hi, std::vector<Piece>& out, SlabStats& st,
                int depth = 0);

}  // namespace flatcover::detail
