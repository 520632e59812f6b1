#pragma once

#include <string>
#include <vector>

#include "flatcover/geometry.hpp"
#include "flatcover/polynomial.hpp"

namespace flatcover {

/// Affine witness a with a certified bound on sup_R |phi - a|.
struct FlatnessCertificate {
  Polynomial witness;
  RangeBound bound;
  double scale = 0.0;
  /// bound.hi / scale, the achieved constant.
  double constant = 0.0;
  bool ok = false;
};

/// Certified bound on sup_R |phi|.
struct SublevelCertificate {
  RangeBound bound;
  double scale = 0.0;
  double constant = 0.0;
  bool ok = false;
};

struct DegeneracyProfile {
  double lipschitz = 1.0;
  double beta = 1.0;
  double approx_constant = 1.0;
  double rescale_exponent = 1.0;
};

struct FlatOptions {
  double c_flat = 4.0;
  RangeOptions range{};
};

/// Chart-Taylor witness: degree <= 1 part of phi o chart(R), pulled back.
FlatnessCertificate flat_certificate(const Polynomial& phi, const Parallelogram& r, double delta,
                                     const FlatOptions& opt = {});
/// Recomputes the error of a given affine witness over R.
FlatnessCertificate check_witness(const Polynomial& phi, const Polynomial& witness, const Parallelogram& r,
                                  double delta, const FlatOptions& opt = {});

SublevelCertificate sublevel_certificate(const Polynomial& phi, const Parallelogram& r, double delta,
                                         double c_sub = 4.0, const RangeOptions& opt = {});

struct Rescaled {
  double c = 1.0;
  Polynomial psi;
  /// Affine part of phi o chart(R).
  Polynomial affine;
  AffineMap chart;
  bool degenerate = false;
};

/// phi o chart(R) = c * sigma * psi + affine with sup_{[-1,1]^n} |psi| <= 1.
Rescaled rescale_flat(const Polynomial& phi, const Parallelogram& r, double sigma);

enum class DegeneracyContext { NearAffine, Hessian };

struct DegenerateApprox {
  Polynomial psi;
  RangeBound err;
};

/// Lower-degeneracy surrogate psi with a certified sup error.
/// NearAffine: keep A_1, freeze A_i at A_i(0). Hessian: n = 1 keeps the affine
/// part; n = 2 needs `two_variable` enabled; n >= 3 is unsupported.
DegenerateApprox degenerate_approximation(const Polynomial& phi, double sigma, DegeneracyContext ctx,
                                          bool two_variable = false);

/// A_1..A_n of a near-affine polynomial A_1(x_1) + sum_{i>=2} A_i(x_1) x_i.
/// Throws InvalidArgument if phi is not of that form.
std::vector<Polynomial> near_affine_parts(const Polynomial& phi, double tol = 0.0);
Polynomial assemble_near_affine(const std::vector<Polynomial>& a);
/// H0(x_1) = sum_{i>=2} A_i'(x_1)^2 as a univariate polynomial.
Polynomial near_affine_h0(const std::vector<Polynomial>& a);

DegeneracyProfile degeneracy_profile(const Polynomial& phi, DegeneracyContext ctx);

}  // namespace flatcover
