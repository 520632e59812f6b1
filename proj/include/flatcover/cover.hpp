#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flatcover/flatness.hpp"
#include "flatcover/geometry.hpp"

namespace flatcover {

enum class CoverKind { GraphFlat, Sublevel };

std::string to_string(CoverKind k);
CoverKind cover_kind_from_string(const std::string& s);

/// Per-piece certificate; `witness` is only meaningful for graph-flat pieces.
struct PieceCertificate {
  std::optional<Polynomial> witness;
  RangeBound bound;
  double scale = 0.0;
  double constant = 0.0;
};

struct Piece {
  Parallelogram shape;
  PieceCertificate certificate;
  /// Recursion depth used for SVG stroke and audit.
  int depth = 0;
};

struct OverlapProfile {
  std::vector<double> mu;
  std::vector<int> b;
  std::string method = "grid";
  bool fallback = false;
};

struct ProvenanceStep {
  std::string algorithm;
  double scale = 0.0;
  std::string shell;
};

struct Cover {
  int nvars = 0;
  double scale = 0.0;
  double eps = 1.0;
  CoverKind kind = CoverKind::GraphFlat;
  std::vector<Piece> pieces;
  std::optional<OverlapProfile> overlap;
  std::vector<ProvenanceStep> provenance;

  /// Sort pieces into a canonical order (by centre, then half-lengths).
  void canonicalize();
  double min_width() const;
};

PieceCertificate to_piece_certificate(const FlatnessCertificate& c);
PieceCertificate to_piece_certificate(const SublevelCertificate& c);

struct OverlapOptions {
  int cloud_points = 1 << 13;
  int exact_piece_cap = 10000;
  int exact_subset_cap = 32;
};

/// Max number of mu-dilated pieces whose interior contains a witness point.
int mu_overlap(const Cover& cover, double mu, const OverlapOptions& opt = {});
/// Max depth of a family of mu-dilated pieces with a common interior point (LP mode).
/// Falls back to the witness method for large covers; `fallback` reports it.
int mu_overlap_exact(const Cover& cover, double mu, bool* fallback = nullptr, const OverlapOptions& opt = {});
OverlapProfile overlap_profile(const Cover& cover, const std::vector<double>& mus = {1.0, 2.0, 4.0},
                               bool exact = false, const OverlapOptions& opt = {});

nlohmann::json to_json(const Parallelogram& r);
Parallelogram parallelogram_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Cover& c);
Cover cover_from_json(const nlohmann::json& j);

/// One polygon per piece, stroke shade by depth; n = 2 only (n = 3 sliced at x3 = slice).
std::string to_svg(const Cover& c, std::optional<double> slice = std::nullopt);

}  // namespace flatcover
