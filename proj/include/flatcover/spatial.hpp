#pragma once

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "flatcover/geometry.hpp"

namespace flatcover {

/// Uniform grid over a bounding box holding piece indices by bounding-box overlap.
class PieceIndex {
 public:
  PieceIndex(const std::vector<Parallelogram>& shapes) : shapes_(shapes) {
    const int n = shapes.empty() ? 1 : shapes[0].dim();
    n_ = n;
    lo_ = Vec::Constant(n, INFINITY);
    hi_ = Vec::Constant(n, -INFINITY);
    std::vector<double> sizes;
    boxes_.reserve(shapes.size());
    for (const auto& s : shapes) {
      Box b = s.bounding_box();
      // vertices carry rounding; keep boundary points as candidates
      b.lo.array() -= 1e-9;
      b.hi.array() += 1e-9;
      lo_ = lo_.cwiseMin(b.lo);
      hi_ = hi_.cwiseMax(b.hi);
      sizes.push_back((b.hi - b.lo).maxCoeff());
      boxes_.push_back(b);
    }
    if (shapes.empty()) return;
    std::nth_element(sizes.begin(), sizes.begin() + static_cast<long>(sizes.size() / 2), sizes.end());
    double cell = std::max(sizes[sizes.size() / 2], 1e-9);
    // keep the number of cells bounded
    const double span = (hi_ - lo_).maxCoeff();
    const double max_cells_axis = n == 1 ? 1 << 20 : (n == 2 ? 2048.0 : 160.0);
    cell = std::max(cell, span / max_cells_axis);
    cell_ = cell;
    dims_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) dims_[i] = std::max(1, static_cast<int>(std::ceil((hi_[i] - lo_[i]) / cell_)) + 1);
    for (std::size_t k = 0; k < shapes.size(); ++k) {
      std::vector<int> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        a[i] = coord(boxes_[k].lo[i], i);
        b[i] = coord(boxes_[k].hi[i], i);
      }
      for_range(a, b, [&](std::size_t key) { cells_[key].push_back(static_cast<int>(k)); });
    }
  }

  template <class F>
  void candidates(const Vec& x, F&& f) const {
    if (shapes_.empty()) return;
    std::size_t key = 0;
    for (int i = 0; i < n_; ++i) {
      if (x[i] < lo_[i] || x[i] > hi_[i]) return;
      key = key * static_cast<std::size_t>(dims_[i]) + static_cast<std::size_t>(coord(x[i], i));
    }
    auto it = cells_.find(key);
    if (it == cells_.end()) return;
    for (int k : it->second) f(k);
  }

  /// Pieces whose bounding boxes meet the box [lo, hi].
  std::vector<int> query(const Vec& lo, const Vec& hi) const {
    std::vector<int> out;
    if (shapes_.empty()) return out;
    std::vector<int> a(static_cast<std::size_t>(n_)), b(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      a[i] = coord(std::max(lo[i], lo_[i]), i);
      b[i] = coord(std::min(hi[i], hi_[i]), i);
      if (lo[i] > hi_[i] || hi[i] < lo_[i]) return out;
    }
    for_range(a, b, [&](std::size_t key) {
      auto it = cells_.find(key);
      if (it != cells_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    std::vector<int> hit;
    for (int k : out) {
      bool ok = true;
      for (int i = 0; i < n_ && ok; ++i) ok = boxes_[k].lo[i] <= hi[i] && boxes_[k].hi[i] >= lo[i];
      if (ok) hit.push_back(k);
    }
    return hit;
  }

 private:
  const std::vector<Parallelogram>& shapes_;
  std::vector<Box> boxes_;
  int n_ = 1;
  Vec lo_, hi_;
  double cell_ = 1.0;
  std::vector<int> dims_;
  std::unordered_map<std::size_t, std::vector<int>> cells_;

  int coord(double v, int i) const {
    int c = static_cast<int>(std::floor((v - lo_[i]) / cell_));
    return std::clamp(c, 0, dims_[i] - 1);
  }

  template <class F>
  void for_range(const std::vector<int>& a, const std::vector<int>& b, F&& f) const {
    std::vector<int> c = a;
    while (true) {
      std::size_t key = 0;
      for (int i = 0; i < n_; ++i) key = key * static_cast<std::size_t>(dims_[i]) + static_cast<std::size_t>(c[i]);
      f(key);
      int i = n_ - 1;
      while (i >= 0 && c[i] == b[i]) {
        c[i] = a[i];
        --i;
      }
      if (i < 0) break;
      ++c[i];
    }
  }
};

}  // namespace flatcover
