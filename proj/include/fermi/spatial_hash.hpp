#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fermi/geometry.hpp"

namespace fermi {

// Uniform grid over points in the plane, stored in compressed rows. Built once,
// then queried read-only (safe to share between threads).
class UniformGrid {
 public:
  UniformGrid() = default;

  UniformGrid(const std::vector<Vec2>& pts, const std::vector<int>& ids, double cell) : cell_(cell) {
    if (pts.empty()) return;
    lo_ = pts[0];
    Vec2 hi = pts[0];
    for (const auto& p : pts) {
      lo_.x = std::min(lo_.x, p.x);
      lo_.y = std::min(lo_.y, p.y);
      hi.x = std::max(hi.x, p.x);
      hi.y = std::max(hi.y, p.y);
    }
    if (!(cell_ > 0.0)) cell_ = std::max({hi.x - lo_.x, hi.y - lo_.y, 1e-300});
    nx_ = static_cast<int>(std::floor((hi.x - lo_.x) / cell_)) + 1;
    ny_ = static_cast<int>(std::floor((hi.y - lo_.y) / cell_)) + 1;
    start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    std::vector<std::size_t> cell_of(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      cell_of[i] = flat(cx(pts[i].x), cy(pts[i].y));
      ++start_[cell_of[i] + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    items_.resize(pts.size());
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < pts.size(); ++i) items_[fill[cell_of[i]]++] = ids[i];
  }

  double cell() const { return cell_; }

  // Calls f(id) for every stored point whose cell meets [x0, x1] x [y0, y1];
  // callers filter exactly.
  template <class F>
  void query(double x0, double x1, double y0, double y1, F&& f) const {
    if (items_.empty() || x1 < x0 || y1 < y0) return;
    int i0 = std::max(0, cx(x0));
    int i1 = std::min(nx_ - 1, cx(x1));
    int j0 = std::max(0, cy(y0));
    int j1 = std::min(ny_ - 1, cy(y1));
    for (int i = i0; i <= i1; ++i) {
      for (int j = j0; j <= j1; ++j) {
        std::size_t c = flat(i, j);
        for (std::uint32_t k = start_[c]; k < start_[c + 1]; ++k) f(items_[k]);
      }
    }
  }

 private:
  int cx(double x) const {
    double v = std::floor((x - lo_.x) / cell_);
    return static_cast<int>(std::clamp(v, -1.0, static_cast<double>(nx_)));
  }
  int cy(double y) const {
    double v = std::floor((y - lo_.y) / cell_);
    return static_cast<int>(std::clamp(v, -1.0, static_cast<double>(ny_)));
  }
  std::size_t flat(int i, int j) const { return static_cast<std::size_t>(i) * ny_ + j; }

  double cell_ = 0.0;
  Vec2 lo_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::uint32_t> start_;
  std::vector<int> items_;
};

}  // namespace fermi
