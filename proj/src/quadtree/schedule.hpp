// SPDX-License-Identifier: Apache-2.0
//
// Quadtree partition of a latent grid into four channel groups x four cell
// positions, coded in four causal steps. The step assignment is a fixed
// 4x4 Latin square, so at every step exactly one group (a quarter of the
// channels) is coded at each spatial position, and after step s every
// position carries s+1 decoded groups.

#ifndef QUADSIM_QUADTREE_SCHEDULE_HPP
#define QUADSIM_QUADTREE_SCHEDULE_HPP

#include <array>
#include <utility>
#include <vector>

#include "core/latent.hpp"

namespace quadsim {

struct Coord {
  int i = 0;
  int j = 0;
  bool operator==(const Coord&) const = default;
};

class CodingSchedule {
 public:
  // Requires h_y, w_y even and c_y divisible by 4.
  CodingSchedule(int h_y, int w_y, int c_y);

  int h_y() const { return h_y_; }
  int w_y() const { return w_y_; }
  int c_y() const { return c_y_; }
  int group_size() const { return c_y_ / 4; }

  // Cell-position class of a grid coordinate: p0=(0,0) p1=(0,1) p2=(1,0)
  // p3=(1,1) by row/column parity.
  static int position_class(int i, int j) { return (i & 1) * 2 + (j & 1); }

  // Step at which `group` is coded at cell position class `pos`.
  int step_of(int group, int pos) const { return kStepOf[group][pos]; }

  // Group coded at (step, position class); unique by the Latin square.
  int group_at(int step, int pos) const { return group_at_[step][pos]; }

  // Cell-local offset (dy, dx) where `group` is coded at `step`.
  std::pair<int, int> cell_offset(int group, int step) const {
    int p = pos_of_[group][step];
    return {p >> 1, p & 1};
  }

  int group_of_channel(int c) const { return c / group_size(); }

  // Spatial reference offsets used at a step: none at step 0, the
  // distance-1 cross at steps 1-2, cross plus diagonals at step 3.
  // These windows reproduce the 0/4/4/8 interior reference counts.
  const std::vector<std::pair<int, int>>& context_offsets(int step) const;

  // In-grid reference positions for an element at (i, j, c) coded at
  // `step`. Throws if (i, j, c) is not coded at that step.
  std::vector<Coord> context_refs(int step, int i, int j, int c) const;

 private:
  static constexpr int kStepOf[4][4] = {
      {0, 1, 2, 3},
      {3, 2, 1, 0},
      {1, 0, 3, 2},
      {2, 3, 0, 1},
  };

  int h_y_, w_y_, c_y_;
  std::array<std::array<int, 4>, 4> group_at_;  // [step][pos] -> group
  std::array<std::array<int, 4>, 4> pos_of_;    // [group][step] -> pos
};

enum class PartitionMode { kConcat, kAdd };

// Four step tensors produced by quadtree partition. In concat mode each
// tensor is (h/2, w/2, c_y) and fusion is exact; in add mode the four group
// extracts are summed into (h/2, w/2, c_y/4) and fusion is undefined.
struct PartitionedLatent {
  PartitionMode mode = PartitionMode::kConcat;
  int h_y = 0, w_y = 0, c_y = 0;  // source dims
  std::array<LatentGrid, 4> steps;
};

PartitionedLatent partition(const LatentGrid& y, const CodingSchedule& schedule,
                            PartitionMode mode);

// Exact inverse of concat-mode partition; throws for add mode.
LatentGrid fuse(const PartitionedLatent& p, const CodingSchedule& schedule);

}  // namespace quadsim

#endif
