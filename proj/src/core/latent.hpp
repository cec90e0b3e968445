// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_CORE_LATENT_HPP
#define QUADSIM_CORE_LATENT_HPP

#include <cstddef>
#include <vector>

#include "core/error.hpp"

namespace quadsim {

// Real-valued latent grid (h_y, w_y, c_y), channel-minor layout. Grids fed
// to the coding schedule need even spatial dims (2x2 cells must tile); that
// is enforced where a schedule is built, since partition step tensors and
// other derived views may be odd-sized.
struct LatentGrid {
  int h_y = 0;
  int w_y = 0;
  int c_y = 0;
  std::vector<double> values;

  LatentGrid() = default;
  LatentGrid(int h, int w, int c, double fill = 0.0)
      : h_y(h), w_y(w), c_y(c),
        values(static_cast<std::size_t>(h) * w * c, fill) {
    if (h < 0 || w < 0 || c < 0) throw Error("LatentGrid: negative dims");
  }

  std::size_t index(int i, int j, int c) const {
    return (static_cast<std::size_t>(i) * w_y + j) * c_y + c;
  }
  double& at(int i, int j, int c) { return values[index(i, j, c)]; }
  double at(int i, int j, int c) const { return values[index(i, j, c)]; }
  std::size_t size() const { return values.size(); }
  bool same_shape(const LatentGrid& o) const {
    return h_y == o.h_y && w_y == o.w_y && c_y == o.c_y;
  }
};

}  // namespace quadsim

#endif
