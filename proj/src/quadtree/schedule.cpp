// SPDX-License-Identifier: Apache-2.0

#include "quadtree/schedule.hpp"

namespace quadsim {

namespace {

const std::vector<std::pair<int, int>> kNoRefs{};
const std::vector<std::pair<int, int>> kCross{{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
const std::vector<std::pair<int, int>> kCrossDiag{{-1, 0}, {1, 0},  {0, -1}, {0, 1},
                                                  {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};

}  // namespace

CodingSchedule::CodingSchedule(int h_y, int w_y, int c_y)
    : h_y_(h_y), w_y_(w_y), c_y_(c_y) {
  if (h_y < 2 || w_y < 2 || h_y % 2 != 0 || w_y % 2 != 0)
    throw Error("schedule: spatial dims must be even and >= 2");
  if (c_y < 4 || c_y % 4 != 0)
    throw Error("schedule: c_y must be a positive multiple of 4");
  for (int g = 0; g < 4; ++g) {
    for (int p = 0; p < 4; ++p) {
      int s = kStepOf[g][p];
      group_at_[s][p] = g;
      pos_of_[g][s] = p;
    }
  }
}

const std::vector<std::pair<int, int>>& CodingSchedule::context_offsets(int step) const {
  if (step < 0 || step > 3) throw Error("schedule: step out of range");
  if (step == 0) return kNoRefs;
  if (step == 3) return kCrossDiag;
  return kCross;
}

std::vector<Coord> CodingSchedule::context_refs(int step, int i, int j, int c) const {
  if (i < 0 || i >= h_y_ || j < 0 || j >= w_y_ || c < 0 || c >= c_y_)
    throw Error("schedule: coordinate out of grid");
  int g = group_of_channel(c);
  if (step_of(g, position_class(i, j)) != step)
    throw Error("schedule: coordinate is not coded at this step");
  std::vector<Coord> refs;
  for (auto [dy, dx] : context_offsets(step)) {
    int ri = i + dy, rj = j + dx;
    if (ri >= 0 && ri < h_y_ && rj >= 0 && rj < w_y_) refs.push_back({ri, rj});
  }
  return refs;
}

PartitionedLatent partition(const LatentGrid& y, const CodingSchedule& schedule,
                            PartitionMode mode) {
  if (y.h_y != schedule.h_y() || y.w_y != schedule.w_y() || y.c_y != schedule.c_y())
    throw Error("partition: grid does not match schedule dims");
  const int hc = y.h_y / 2, wc = y.w_y / 2;
  const int gs = schedule.group_size();

  PartitionedLatent out;
  out.mode = mode;
  out.h_y = y.h_y;
  out.w_y = y.w_y;
  out.c_y = y.c_y;
  for (int s = 0; s < 4; ++s) {
    out.steps[s] = LatentGrid(hc, wc, mode == PartitionMode::kConcat ? y.c_y : gs);
    LatentGrid& t = out.steps[s];
    for (int g = 0; g < 4; ++g) {
      auto [dy, dx] = schedule.cell_offset(g, s);
      for (int ci = 0; ci < hc; ++ci) {
        for (int cj = 0; cj < wc; ++cj) {
          int i = 2 * ci + dy, j = 2 * cj + dx;
          for (int k = 0; k < gs; ++k) {
            double v = y.at(i, j, g * gs + k);
            if (mode == PartitionMode::kConcat) {
              t.at(ci, cj, g * gs + k) = v;
            } else {
              t.at(ci, cj, k) += v;
            }
          }
        }
      }
    }
  }
  return out;
}

LatentGrid fuse(const PartitionedLatent& p, const CodingSchedule& schedule) {
  if (p.mode != PartitionMode::kConcat)
    throw Error("fuse: fusion undefined for additive mode");
  if (p.h_y != schedule.h_y() || p.w_y != schedule.w_y() || p.c_y != schedule.c_y())
    throw Error("fuse: partition does not match schedule dims");
  const int hc = p.h_y / 2, wc = p.w_y / 2;
  const int gs = schedule.group_size();
  LatentGrid y(p.h_y, p.w_y, p.c_y);
  for (int s = 0; s < 4; ++s) {
    const LatentGrid& t = p.steps[s];
    if (t.h_y != hc || t.w_y != wc || t.c_y != p.c_y)
      throw Error("fuse: step tensor has wrong shape");
    for (int g = 0; g < 4; ++g) {
      auto [dy, dx] = schedule.cell_offset(g, s);
      for (int ci = 0; ci < hc; ++ci)
        for (int cj = 0; cj < wc; ++cj)
          for (int k = 0; k < gs; ++k)
            y.at(2 * ci + dy, 2 * cj + dx, g * gs + k) = t.at(ci, cj, g * gs + k);
    }
  }
  return y;
}

}  // namespace quadsim
