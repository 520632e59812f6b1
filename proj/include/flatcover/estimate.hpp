#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flatcover/cover.hpp"
#include "flatcover/engine.hpp"

namespace flatcover {

enum class Trial { Gaussian, RandomPhase, AllOnes };

std::string to_string(Trial t);
Trial trial_from_string(const std::string& s);

struct EstimateOptions {
  double p = 4.0;
  double q = 4.0;
  int trials = 3;
  std::uint64_t seed = 1;
  /// Trial t uses portfolio[t % size].
  std::vector<Trial> portfolio = {Trial::Gaussian, Trial::RandomPhase, Trial::AllOnes};
  /// Grid overrides; vertical is the last torus axis for graph covers.
  std::optional<int> m_vertical;
  std::optional<int> m_horizontal;
  int axis_cap = 4096;
  std::size_t cell_cap = std::size_t{1} << 25;
  /// First-owner rule: each cell feeds only the first piece that claims it.
  bool disjoint = false;
  /// Spectra are rescaled to unit total energy unless disabled; `amplitude` multiplies them afterwards.
  bool normalize = true;
  double amplitude = 1.0;
};

/// Frequency cells per piece on the torus; row-major linear indices, last axis fastest.
struct CellEmbedding {
  std::vector<int> m;
  std::vector<std::vector<std::int64_t>> cells;
  std::size_t total() const;
};

/// Marks the cells of R cap S for every piece, S the vertical delta-neighbourhood of the
/// graph over [-1,1]^n (graph covers) or {|phi| <= delta} (sublevel covers).
CellEmbedding embed(const Polynomial& phi, const Cover& cover, const EstimateOptions& opt = {});
/// Grid sizes chosen for a cover (power of two per axis).
std::vector<int> grid_sizes(const Cover& cover, const EstimateOptions& opt = {});

struct DecouplingEstimate {
  double p = 0.0;
  double q = 0.0;
  double delta = 0.0;
  std::size_t pieces = 0;
  double ratio = 0.0;
  int trials = 0;
  std::uint64_t best_seed = 0;
  std::vector<int> m;
  std::size_t cells = 0;
  /// Running maximum after each trial.
  std::vector<double> history;
};

DecouplingEstimate estimate_ratio(const Polynomial& phi, const Cover& cover, const EstimateOptions& opt = {});
DecouplingEstimate estimate_ratio(const Polynomial& phi, const Cover& cover, const CellEmbedding& cells,
                                  const EstimateOptions& opt);

struct SweepRow {
  DecouplingEstimate est;
  /// Slope fitted over this row and all earlier ones (0 for the first row).
  double slope_partial = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  double slope = 0.0;
  double eps = 0.0;
  double slope_tol = 0.0;
  bool slope_ok = true;
};

/// Least-squares slope of log(ratio) against log(1/delta).
double loglog_slope(const std::vector<double>& deltas, const std::vector<double>& ratios);

using CoverBuilder = std::function<Cover(double delta)>;

SweepTable sweep(const Polynomial& phi, const std::vector<double>& deltas, const CoverBuilder& build,
                 const EstimateOptions& opt, double eps, double slope_tol = 0.05);
/// Engine covers built through build_cover with the given mode.
SweepTable sweep(const Polynomial& phi, const std::vector<double>& deltas, Mode mode, double eps,
                 const EstimateOptions& opt, const EngineConfig& cfg = {}, double slope_tol = 0.05);

/// Axis-aligned cubes of the given side tiling [-1,1]^n, certified flat at scale delta.
Cover tile_cover(const Polynomial& phi, double delta, double side, const EngineConfig& cfg = {});

nlohmann::json to_json(const DecouplingEstimate& e);
nlohmann::json to_json(const SweepTable& t);
/// Columns: delta,p,q,pieces,ratio,slope_partial.
std::string to_csv(const SweepTable& t);

}  // namespace flatcover
