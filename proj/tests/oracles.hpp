#pragma once

// Reference computations for the tests, deliberately written without any
// library search code: distances come from repeated full-grid relaxation.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "maw/geometry.hpp"

namespace oracle {

inline maw::FreeMask mask_from(const std::vector<std::string>& rows) {
  maw::FreeMask m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t y = 0; y < rows.size(); ++y)
    for (std::size_t x = 0; x < rows[y].size(); ++x) m(y, x) = rows[y][x] == '.';
  return m;
}

// Distances from (sx, sy) over free cells by Bellman-Ford style sweeps.
inline std::vector<double> relax_distances(const maw::FreeMask& free, maw::Metric metric, int sx, int sy) {
  const int h = static_cast<int>(free.rows()), w = static_cast<int>(free.cols());
  std::vector<double> d(static_cast<std::size_t>(w) * h, maw::kInf);
  d[static_cast<std::size_t>(sy) * w + sx] = 0.0;
  const bool diag = metric != maw::Metric::L1;
  const double dcost = metric == maw::Metric::L2Approx ? std::sqrt(2.0) : 1.0;
  for (bool changed = true; changed;) {
    changed = false;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!free(y, x)) continue;
        double& here = d[static_cast<std::size_t>(y) * w + x];
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx == 0 && dy == 0) || (!diag && dx != 0 && dy != 0)) continue;
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h || !free(ny, nx)) continue;
            const double c = d[static_cast<std::size_t>(ny) * w + nx] + (dx != 0 && dy != 0 ? dcost : 1.0);
            if (c < here - 1e-12) {
              here = c;
              changed = true;
            }
          }
      }
  }
  return d;
}

inline double closed_form(maw::Metric m, maw::Cell a, maw::Cell b) {
  const int dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
  switch (m) {
    case maw::Metric::L1: return dx + dy;
    case maw::Metric::Linf: return std::max(dx, dy);
    case maw::Metric::L2Approx: return std::abs(dx - dy) + std::sqrt(2.0) * std::min(dx, dy);
  }
  return 0;
}

// Free mask with every cell free except those listed as (x, y).
inline maw::FreeMask open_grid(int w, int h) { return maw::FreeMask::Constant(h, w, true); }

}  // namespace oracle
