#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "crossflow/geometry.hpp"
#include "crossflow/ped.hpp"

namespace crossflow {

// Uniform bucket grid for pedestrian neighbor queries. Cell size equals the
// force cutoff, so scanning the 3x3 block around a position covers every
// in-range neighbor. Buckets hold indices in ascending-id order and queries
// walk cells in a fixed order, which makes force accumulation independent of
// the pedestrian storage order (and therefore bitwise reproducible).
class NeighborGrid {
 public:
  NeighborGrid(Rect bounds, double cell_size)
      : origin_{bounds.x_min, bounds.y_min}, cell_(cell_size) {
    nx_ = std::max(1, static_cast<int>(std::ceil(bounds.width() / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(bounds.height() / cell_)));
    buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  }

  void rebuild(const std::vector<Pedestrian>& peds) {
    for (auto& b : buckets_) b.clear();
    order_.resize(peds.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(),
              [&](int a, int b) { return peds[a].id < peds[b].id; });
    for (const int idx : order_) {
      buckets_[cell_index(peds[idx].pos)].push_back(idx);
    }
  }

  // Visits indices of all pedestrians in the 3x3 cell block around pos
  // (including the one at pos itself) in a canonical order.
  template <class F>
  void for_each_neighbor(Vec2 pos, F&& fn) const {
    const int cx = cell_x(pos.x);
    const int cy = cell_y(pos.y);
    for (int gy = std::max(0, cy - 1); gy <= std::min(ny_ - 1, cy + 1); ++gy) {
      for (int gx = std::max(0, cx - 1); gx <= std::min(nx_ - 1, cx + 1); ++gx) {
        for (const int idx : buckets_[static_cast<std::size_t>(gy) * nx_ + gx]) {
          fn(idx);
        }
      }
    }
  }

 private:
  int cell_x(double x) const {
    return std::clamp(static_cast<int>(std::floor((x - origin_.x) / cell_)), 0, nx_ - 1);
  }
  int cell_y(double y) const {
    return std::clamp(static_cast<int>(std::floor((y - origin_.y) / cell_)), 0, ny_ - 1);
  }
  std::size_t cell_index(Vec2 p) const {
    return static_cast<std::size_t>(cell_y(p.y)) * nx_ + cell_x(p.x);
  }

  Vec2 origin_;
  double cell_;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::vector<int>> buckets_;
  std::vector<int> order_;
};

}  // namespace crossflow
