#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace flatcover {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised for dimension mismatches, bad axes and other malformed arguments.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation reaches a declared capability boundary.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for degenerate inputs (e.g. normalizing the zero polynomial).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using MultiIndex = std::vector<int>;

/// Dense real polynomial in `nvars` variables with total degree <= `degree`.
///
/// Coefficients live in a (degree+1)^nvars tensor indexed lexicographically
/// by exponent tuple (first variable most significant); entries with total
/// degree above the bound are kept at zero.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(int nvars, int degree);

  static Polynomial constant(int nvars, double c);
  /// The coordinate function x_j (0-based axis).
  static Polynomial variable(int nvars, int axis);
  /// Affine function c0 + sum_j g[j] x_j.
  static Polynomial affine(double c0, std::span<const double> gradient);

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  /// Highest total degree with a nonzero coefficient (-1 for the zero polynomial).
  int effective_degree() const;
  bool is_zero(double tol = 0.0) const;

  double coeff(const MultiIndex& alpha) const;
  void set_coeff(const MultiIndex& alpha, double c);
  void add_coeff(const MultiIndex& alpha, double c);

  /// Visits every stored term with total degree <= degree() (zeros included).
  template <class F>
  void for_each_term(F&& f) const {
    MultiIndex a(static_cast<std::size_t>(nvars_), 0);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      decode(k, a);
      int tot = 0;
      for (int v : a) tot += v;
      if (tot <= degree_) f(a, coeffs_[k]);
    }
  }

  const std::vector<double>& raw() const { return coeffs_; }
  std::size_t flat_index(const MultiIndex& alpha) const;
  void decode(std::size_t k, MultiIndex& alpha) const;

  /// Same polynomial stored with a different degree bound (must not drop terms).
  Polynomial with_degree(int degree) const;
  /// Drops trailing degree slack so degree() == effective_degree() (min 0).
  Polynomial trimmed() const;

  double operator()(std::span<const double> x) const;
  double operator()(const Vec& x) const { return (*this)(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))); }

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  /// Sum of absolute coefficient values.
  double l1_norm() const;
  double max_abs_coeff() const;

  friend bool operator==(const Polynomial& a, const Polynomial& b);

 private:
  int nvars_ = 0;
  int degree_ = 0;
  std::vector<double> coeffs_;
  std::vector<std::size_t> stride_;

  double horner(int var, std::size_t offset, std::span<const double> x) const;
};

/// Affine map x -> matrix * x + offset on R^n.
struct AffineMap {
  Mat matrix;
  Vec offset;

  static AffineMap identity(int n);
  int dim() const { return static_cast<int>(offset.size()); }
  Vec operator()(const Vec& x) const { return matrix * x + offset; }
  /// this o inner, i.e. x -> this(inner(x)).
  AffineMap compose(const AffineMap& inner) const;
  AffineMap inverse() const;
  /// Largest entry magnitude of matrix and offset (the "bounded by C" constant).
  double bound() const;
  bool is_diagonal(double tol = 0.0) const;
};

/// Certified enclosure [lo, hi] of a quantity over a box.
struct RangeBound {
  double lo = 0.0;
  double hi = 0.0;
  bool certified = true;
  /// Set when the refinement depth cap stopped tightening early.
  bool depth_capped = false;

  double abs_max() const { return std::max(-lo, hi); }
  double width() const { return hi - lo; }
};

/// Axis-parallel box [lo_i, hi_i].
struct Box {
  Vec lo;
  Vec hi;

  static Box cube(int n, double half = 1.0);
  int dim() const { return static_cast<int>(lo.size()); }
  Vec center() const { return 0.5 * (lo + hi); }
};

struct RangeOptions {
  double tol_abs = 1e-12;
  double tol_rel = 1e-9;
  int max_depth = 12;
};

double eval(const Polynomial& p, std::span<const double> x);
/// Derivative along axis j (0-based).
Polynomial partial(const Polynomial& p, int axis);
Polynomial gradient_component(const Polynomial& p, int axis);
/// det of the matrix of second partials, expanded exactly (n=1 gives p'').
Polynomial hessian_det(const Polynomial& p);
/// Coefficients of p o m.
Polynomial compose_affine(const Polynomial& p, const AffineMap& m);

/// Enclosure of {p(x) : x in box} by Bernstein coefficients with adaptive bisection.
RangeBound range_bound(const Polynomial& p, const Box& box, const RangeOptions& opt = {});
/// Enclosure of p tightened only on the side that determines sup |p|.
RangeBound abs_range_bound(const Polynomial& p, const Box& box, const RangeOptions& opt = {});

struct AffineSplit {
  Polynomial affine;
  Polynomial rest;
};
/// p = affine + rest, affine holding every term of total degree <= 1.
AffineSplit strip_affine(const Polynomial& p);

struct Normalized {
  double scale = 0.0;
  Polynomial unit;
};
/// scale = certified upper bound of sup_{[-1,1]^n} |p|; unit = p / scale.
Normalized normalize(const Polynomial& p);

/// Restriction of p to x_axis = value (result keeps nvars-1 variables).
Polynomial restrict_axis(const Polynomial& p, int axis, double value);
/// Embeds p into more variables: new_vars[k] gives the target axis of old variable k.
Polynomial embed_variables(const Polynomial& p, int nvars, std::span<const int> new_vars);

/// Univariate helpers.
Polynomial univariate(std::span<const double> coeffs_low_to_high);
std::vector<double> univariate_coeffs(const Polynomial& p);

}  // namespace flatcover
