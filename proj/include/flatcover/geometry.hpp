#pragma once

#include <vector>

#include "flatcover/polynomial.hpp"

namespace flatcover {

/// {x : |(x - center) . u_i| <= halflens_i}, u_i the unit columns of `normals`.
struct Parallelogram {
  Vec center;
  Mat normals;
  Vec halflens;

  static Parallelogram from_box(const Box& b);
  static Parallelogram cube(int n, double half = 1.0);
  static Parallelogram interval(double a, double b);

  int dim() const { return static_cast<int>(center.size()); }
  double width() const { return halflens.minCoeff(); }
  bool contains(const Vec& x, double tol = 1e-12) const;
  /// Strict membership with a relative margin, used for interior overlap counts.
  bool contains_interior(const Vec& x, double rel_margin = 1e-9) const;
  /// Edge vectors e_i with u_j . e_i = halflens_i * [i == j]; columns of the chart matrix.
  Mat edges() const;
  std::vector<Vec> vertices() const;
  Box bounding_box() const;
  bool is_axis_aligned(double tol = 1e-14) const;
  /// Throws InvalidArgument unless the basis is unit, independent and lengths positive.
  void validate(double tol_det = 1e-12) const;
};

/// lambda_R: [-1,1]^n -> R.
AffineMap chart(const Parallelogram& r);
/// Parallelogram image of [-1,1]^n under an invertible affine map.
Parallelogram image_of_cube(const AffineMap& m);
/// Image of a parallelogram under an invertible affine map.
Parallelogram map_parallelogram(const AffineMap& m, const Parallelogram& r);

Parallelogram dilate(const Parallelogram& r, double c);
/// Halflens grow by delta in every basis direction.
Parallelogram thicken(const Parallelogram& r, double delta);
/// Halflens raised to at least delta (minimal padding, centre kept).
Parallelogram pad_to_width(const Parallelogram& r, double delta);
double volume(const Parallelogram& r);

/// Grid of k_i = ceil(2 l_i / s) cubes (in chart units scaled back) per axis, centred on R.
std::vector<Parallelogram> tile_cubes(const Parallelogram& r, double s);
/// Equal subdivision of R into counts[i] pieces along basis direction i.
std::vector<Parallelogram> partition_grid(const Parallelogram& r, const std::vector<int>& counts);
/// Split R into two halves across basis direction `axis`.
std::pair<Parallelogram, Parallelogram> bisect(const Parallelogram& r, int axis);

/// C^{-1} R subset of S subset of C R, decided on corners.
bool equivalent(const Parallelogram& s, const Parallelogram& r, double c);
bool contains(const Parallelogram& outer, const Parallelogram& inner, double tol = 1e-12);

/// Halfspace a.x <= b.
struct Halfspace {
  Vec a;
  double b = 0.0;
};
using Polytope = std::vector<Halfspace>;

Polytope halfspaces(const Parallelogram& r);
Polytope halfspaces(const Box& b);
/// Vertices of a bounded polytope in dimension <= 3 (brute-force hyperplane intersection).
std::vector<Vec> polytope_vertices(const Polytope& p, int n, double tol = 1e-12);

/// Result of max_x min_i (b_i - a_i.x)/|a_i| over a polytope, i.e. the Chebyshev radius.
struct ChebyshevResult {
  bool feasible = false;
  double radius = 0.0;
  Vec center;
};
/// Largest inscribed ball of a polytope (simplex solver on a small dense LP).
ChebyshevResult chebyshev_center(const Polytope& p, int n, double box_half = 4.0);

/// True if the interiors of two parallelograms intersect.
bool interiors_intersect(const Parallelogram& a, const Parallelogram& b, double tol = 1e-10);

}  // namespace flatcover
