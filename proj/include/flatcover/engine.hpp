#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flatcover/cover.hpp"
#include "flatcover/flatness.hpp"

namespace flatcover {

enum class Mode { Uniform, Degenerate, Sublevel, Nondegenerate, NearAffine, Pseudo };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct EngineConfig {
  double c_flat = 4.0;
  double c_sub = 4.0;
  /// Re-subdivide pieces whose certificate fails instead of emitting them.
  bool strict = true;
  int max_dim = 3;
  /// Enables the two-variable degenerate route for n = 2.
  bool two_variable = true;
  RangeOptions range{1e-12, 1e-3, 12};
  /// Safety cap on emitted pieces.
  std::size_t piece_budget = 4'000'000;
};

/// Normal-form witness for a zero-Hessian trivariate polynomial: phi o xi is near-affine.
struct NearAffineWitness {
  AffineMap xi;
};

struct CoverRequest {
  Polynomial phi;
  double delta = 0.0;
  double eps = 1.0;
  std::optional<Parallelogram> domain;
  double p = 4.0;
  Mode mode = Mode::Uniform;
  std::optional<double> k;
  std::optional<NearAffineWitness> witness;
};

/// round(1/eps), at least 1.
int stage_count(double eps);
/// delta_i = delta^{i eps}, i = 1..N.
std::vector<double> stage_scales(double delta, double eps);

/// Raised when the engine hits a budget or depth cap; carries the trace so far.
class EngineError : public std::runtime_error {
 public:
  EngineError(const std::string& what, std::vector<ProvenanceStep> trace = {})
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<ProvenanceStep>& trace() const { return trace_; }

 private:
  std::vector<ProvenanceStep> trace_;
};

/// Raised when a precondition enclosure cannot be certified; carries the enclosure.
class PreconditionError : public std::runtime_error {
 public:
  PreconditionError(const std::string& what, RangeBound enclosure)
      : std::runtime_error(what), enclosure_(enclosure) {}
  const RangeBound& enclosure() const { return enclosure_; }

 private:
  RangeBound enclosure_;
};

/// Cubes of side delta^{1/2} on a domain where |H phi| >= 1/K is certified.
Cover bd_cover(const Polynomial& phi, double delta, double k, const EngineConfig& cfg = {},
               std::optional<Parallelogram> domain = std::nullopt);

/// Components of {|phi| < delta} in I, padded to width delta.
Cover sublevel1(const Polynomial& phi, double delta, double a = -1.0, double b = 1.0, const EngineConfig& cfg = {});

/// Slabs over the delta^{1/2}-lattice when H0 >= K^{-2} on [-1,1].
Cover nearaffine_nondeg_cover(const std::vector<Polynomial>& a, double delta, double eps, double k,
                              const EngineConfig& cfg = {});
/// Full near-affine decomposition (degenerate intervals, shells, slabs).
Cover nearaffine_cover(const std::vector<Polynomial>& a, double delta, double eps, const EngineConfig& cfg = {});

/// Sublevel cover of x_n - P(x') over R via a flat cover of P.
Cover graph_sublevel_cover(const Polynomial& p, double delta, double eps, std::optional<Parallelogram> r = std::nullopt,
                           const EngineConfig& cfg = {});

struct PseudoPolynomial {
  Polynomial phi;
  /// Certified lower bound of |d phi / d x_n| on the box.
  double m = 0.0;
  Box box;

  /// Checks the invariants (derivative floor, unique root per fibre) and returns the instance.
  static PseudoPolynomial make(const Polynomial& phi, std::optional<Box> box = std::nullopt, double floor = 1e-6);
  /// Newton solve of phi(x', t) = 0 for t; returns nullopt if no root in the extended range.
  std::optional<double> solve(const Vec& xprime, double tol, int max_steps = 50) const;
};

Cover pseudo_cover(const PseudoPolynomial& pp, double delta, double eps, const EngineConfig& cfg = {});

Cover sublevel_cover(const Polynomial& phi, double delta, double eps, std::optional<Parallelogram> r = std::nullopt,
                     const EngineConfig& cfg = {});

Cover uniform_cover(const Polynomial& phi, double delta, double eps, const EngineConfig& cfg = {},
                    std::optional<NearAffineWitness> witness = std::nullopt);

Cover sub_parallelogram_cover(const Polynomial& phi, const Parallelogram& r, double delta, double eps,
                              const EngineConfig& cfg = {});

/// Sublevel cover of P in s, crossed with r in [1, 2]; coordinates (s, r).
Cover homog_reparam(const Polynomial& p, int d, double delta, double eps, const EngineConfig& cfg = {});

/// Dispatch on request.mode.
Cover build_cover(const CoverRequest& req, const EngineConfig& cfg = {});

}  // namespace flatcover
