#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flatcover/cover.hpp"

namespace flatcover {

struct VerifyOptions {
  double c_flat = 4.0;
  double c_sub = 4.0;
  /// Raster spacing as a multiple of delta.
  double raster = 0.25;
  std::vector<double> mus = {1.0, 2.0, 4.0};
  bool exact_overlap = false;
  /// B_0: configured bound on the measured B(1).
  int overlap_bound = 8;
  /// C in the count budget C * delta^{-n-eps}.
  double budget_constant = 64.0;
  /// Raster lines swept along x_1; above this a stratified subset is checked.
  std::size_t line_budget = std::size_t{1} << 18;
  std::size_t max_misses = 16;
  /// Region to cover (default [-1,1]^n); pieces must lie in its concentric double.
  std::optional<Box> domain;
  RangeOptions range{1e-12, 1e-3, 12};
};

struct PieceIssue {
  std::size_t piece = 0;
  std::string clause;
  double value = 0.0;
};

struct VerificationReport {
  CoverKind kind = CoverKind::GraphFlat;
  double scale = 0.0;

  bool coverage_ok = true;
  std::vector<Vec> misses;
  std::size_t points_checked = 0;
  std::size_t lines_checked = 0;
  std::size_t lines_total = 0;
  bool subsampled = false;

  bool certificate_ok = true;
  double worst_constant = 0.0;
  std::size_t worst_piece = 0;
  double constant_limit = 0.0;

  bool width_ok = true;
  double width_min = 0.0;
  std::size_t narrowest_piece = 0;

  bool containment_ok = true;

  OverlapProfile overlap;
  bool overlap_ok = true;
  int overlap_bound = 0;

  std::size_t count = 0;
  double budget = 0.0;
  bool count_ok = true;

  std::vector<PieceIssue> issues;
  double runtime = 0.0;

  bool pass() const { return coverage_ok && certificate_ok && width_ok && containment_ok && overlap_ok && count_ok; }
};

VerificationReport verify_graph_cover(const Polynomial& phi, const Cover& cover, const VerifyOptions& opt = {});
VerificationReport verify_sublevel_cover(const Polynomial& phi, const Cover& cover, const VerifyOptions& opt = {});
/// Dispatch on cover.kind.
VerificationReport verify_cover(const Polynomial& phi, const Cover& cover, const VerifyOptions& opt = {});

nlohmann::json to_json(const VerificationReport& r, bool include_runtime = true);

}  // namespace flatcover
