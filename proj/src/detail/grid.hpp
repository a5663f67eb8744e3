#pragma once

#include <vector>

#include "randopt/random_function.hpp"

namespace randopt::detail {

/// Coordinates of an m-per-dimension grid along each axis. Endpoints are hit
/// exactly; m <= 1 gives the midpoint and a degenerate axis a single value.
inline std::vector<std::vector<double>> grid_axes(const Box& box, int m) {
  const std::size_t n = box.dimension();
  std::vector<std::vector<double>> axes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = box.lower[i];
    const double hi = box.upper[i];
    if (m <= 1 || lo == hi) {
      axes[i] = {m <= 1 ? 0.5 * (lo + hi) : lo};
      continue;
    }
    axes[i].resize(m);
    for (int k = 0; k < m; ++k) axes[i][k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(m - 1);
    axes[i].back() = hi;
  }
  return axes;
}

/// Visits grid points in lexicographic order (first coordinate most
/// significant).
template <typename Fn>
void for_each_grid_point(const Box& box, int m, Fn&& fn) {
  const auto axes = grid_axes(box, m);
  const std::size_t n = axes.size();
  if (n == 0) return;
  std::vector<std::size_t> idx(n, 0);
  Point x(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) x[i] = axes[i][idx[i]];
    fn(static_cast<const Point&>(x));
    std::size_t d = n;
    for (;;) {
      --d;
      if (++idx[d] < axes[d].size()) break;
      idx[d] = 0;
      if (d == 0) return;
    }
  }
}

}  // namespace randopt::detail
