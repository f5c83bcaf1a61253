#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>

#include "vhpf/error.hpp"
#include "vhpf/geometry.hpp"

namespace vhpf {

using CellId = std::size_t;

/// Uniform cell-centered lattice. Cell (i,j,k) has center
/// origin + h * (i + 1/2, j + 1/2, k + 1/2). Unused axes have extent 1.
struct Grid {
  Vec origin = Vec::Zero();
  double h = 1.0;
  std::array<int, 3> n{1, 1, 1};
  int dim = 2;

  /// Lattice covering `bounds` with cell size h.
  static Grid covering(const Box& bounds, double h, int dim) {
    if (!(h > 0.0)) throw ConfigError("grid resolution must be positive");
    if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3");
    Grid g;
    g.origin = bounds.lo;
    g.h = h;
    g.dim = dim;
    for (int a = 0; a < dim; ++a) {
      const double extent = bounds.hi[a] - bounds.lo[a];
      if (!(extent > 0.0)) throw ConfigError("workspace bounds must have positive extent");
      g.n[a] = std::max(1, static_cast<int>(std::ceil(extent / h - 1e-9)));
    }
    if (dim == 2) g.origin[2] = 0.0;
    return g;
  }

  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) *
           static_cast<std::size_t>(n[2]);
  }

  CellId index(int i, int j, int k = 0) const {
    return static_cast<CellId>(i) +
           static_cast<CellId>(n[0]) * (static_cast<CellId>(j) + static_cast<CellId>(n[1]) * k);
  }

  std::array<int, 3> coords(CellId c) const {
    const int i = static_cast<int>(c % n[0]);
    const int j = static_cast<int>((c / n[0]) % n[1]);
    const int k = static_cast<int>(c / (static_cast<CellId>(n[0]) * n[1]));
    return {i, j, k};
  }

  Vec center(CellId c) const {
    const auto ijk = coords(c);
    Vec p = origin;
    for (int a = 0; a < dim; ++a) p[a] += h * (ijk[a] + 0.5);
    return p;
  }

  /// Cell containing p, or nullopt when p lies outside the lattice.
  std::optional<CellId> locate(const Vec& p) const {
    std::array<int, 3> ijk{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      const double f = (p[a] - origin[a]) / h;
      if (f < 0.0 || f > n[a]) return std::nullopt;
      ijk[a] = std::min(n[a] - 1, static_cast<int>(std::floor(f)));
    }
    return index(ijk[0], ijk[1], ijk[2]);
  }

  /// Neighbor along axis a in direction s (+1 / -1), if inside the lattice.
  std::optional<CellId> neighbor(CellId c, int a, int s) const {
    auto ijk = coords(c);
    ijk[a] += s;
    if (ijk[a] < 0 || ijk[a] >= n[a]) return std::nullopt;
    return index(ijk[0], ijk[1], ijk[2]);
  }

  bool on_outer_ring(CellId c) const {
    const auto ijk = coords(c);
    for (int a = 0; a < dim; ++a) {
      if (n[a] > 1 && (ijk[a] == 0 || ijk[a] == n[a] - 1)) return true;
    }
    return false;
  }

  /// Visit every cell whose index range intersects the axis-aligned box
  /// [p - r, p + r].
  template <typename Fn>
  void for_each_in_box(const Vec& p, double r, Fn&& fn) const {
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      lo[a] = std::max(0, static_cast<int>(std::floor((p[a] - r - origin[a]) / h)));
      hi[a] = std::min(n[a] - 1, static_cast<int>(std::floor((p[a] + r - origin[a]) / h)));
      if (lo[a] > hi[a]) return;
    }
    for (int k = lo[2]; k <= hi[2]; ++k)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i) fn(index(i, j, k));
  }

  bool operator==(const Grid& o) const {
    return origin == o.origin && h == o.h && n == o.n && dim == o.dim;
  }
};

}  // namespace vhpf
