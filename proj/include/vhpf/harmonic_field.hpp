#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "vhpf/error.hpp"
#include "vhpf/geometry.hpp"
#include "vhpf/grid.hpp"
#include "vhpf/world.hpp"

namespace vhpf {

enum class CellClass : std::uint8_t { Free, ObstacleBc, GoalBc, OuterBc };

inline const char* to_string(CellClass c) {
  switch (c) {
    case CellClass::Free: return "free";
    case CellClass::ObstacleBc: return "obstacle";
    case CellClass::GoalBc: return "goal";
    case CellClass::OuterBc: return "outer";
  }
  return "?";
}

inline double pinned_value(CellClass c) { return c == CellClass::GoalBc ? 0.0 : 1.0; }

/// Relaxation over-relaxation factor.
inline constexpr double kSorOmega = 1.8;
inline constexpr double kDefaultSolverTol = 1e-8;

/// Discrete harmonic potential on a cell lattice with Dirichlet cells.
///
/// The residual of a free cell is |mean(axis neighbors) - value|, taking
/// the mean over the neighbors that exist inside the lattice.
struct ScalarGridField {
  Grid grid;
  std::vector<double> values;
  std::vector<CellClass> cls;
  /// Cells that are known obstacle boundary (queries there are errors).
  /// Inflation cells are pinned but remain queryable.
  std::vector<std::uint8_t> hard;
  /// Known obstacle cells are inflated by this world distance.
  double inflate = 0.0;
  double residual = 0.0;
  int iterations = 0;
  double tol = kDefaultSolverTol;

  /// Lattice with the given classes; pinned cells take their Dirichlet
  /// values and free cells start at 1.
  static ScalarGridField from_classes(const Grid& g, std::vector<CellClass> classes) {
    if (classes.size() != g.size()) throw ConfigError("class vector does not match grid size");
    ScalarGridField f;
    f.grid = g;
    f.cls = std::move(classes);
    f.values.resize(f.cls.size());
    f.hard.assign(f.cls.size(), 0);
    for (std::size_t c = 0; c < f.cls.size(); ++c) {
      f.values[c] = f.cls[c] == CellClass::Free ? 1.0 : pinned_value(f.cls[c]);
    }
    return f;
  }

  double neighbor_mean(CellId c) const {
    double sum = 0.0;
    int count = 0;
    for (int a = 0; a < grid.dim; ++a) {
      for (int s : {-1, 1}) {
        if (auto nb = grid.neighbor(c, a, s)) {
          sum += values[*nb];
          ++count;
        }
      }
    }
    return count ? sum / count : values[c];
  }

  double max_residual() const {
    double r = 0.0;
    for (CellId c = 0; c < cls.size(); ++c) {
      if (cls[c] == CellClass::Free) r = std::max(r, std::abs(neighbor_mean(c) - values[c]));
    }
    return r;
  }

  int iteration_cap() const {
    int sum = 0;
    for (int a = 0; a < grid.dim; ++a) sum += grid.n[a];
    return 100 * sum;
  }
};

/// Successive over-relaxation until the max residual is below tol. The sweep
/// continues to tol * (1 - cos(pi / n_max)) so that the converged values,
/// not just the residual, lie within about tol of the exact discrete solution.
inline void relax(ScalarGridField& f, double tol) {
  if (!(tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  f.tol = tol;
  int n_max = 1;
  for (int a = 0; a < f.grid.dim; ++a) n_max = std::max(n_max, f.grid.n[a]);
  const double target = tol * std::min(1.0, 1.0 - std::cos(std::numbers::pi / n_max));

  std::vector<CellId> free_cells;
  for (CellId c = 0; c < f.cls.size(); ++c) {
    if (f.cls[c] == CellClass::Free) free_cells.push_back(c);
  }
  const int cap = f.iteration_cap();
  f.iterations = 0;
  f.residual = f.max_residual();
  while (f.residual >= target) {
    if (f.iterations >= cap) {
      if (f.residual < tol) break;
      throw SolverError("harmonic relaxation did not converge: residual " + std::to_string(f.residual),
                        f.residual);
    }
    double sweep_max = 0.0;
    for (CellId c : free_cells) {
      const double r = f.neighbor_mean(c) - f.values[c];
      sweep_max = std::max(sweep_max, std::abs(r));
      f.values[c] += kSorOmega * r;
    }
    ++f.iterations;
    // The in-sweep residual is cheap; only confirm with a full pass near the end.
    if (sweep_max < target) f.residual = f.max_residual();
  }
  for (CellId c : free_cells) f.values[c] = std::clamp(f.values[c], 0.0, 1.0);
}

namespace detail {

inline void pin_inflated(ScalarGridField& f, const CellSet& cells) {
  const Grid& g = f.grid;
  for (CellId c : cells) {
    f.cls[c] = CellClass::ObstacleBc;
    f.values[c] = 1.0;
    f.hard[c] = 1;
    if (f.inflate <= 0.0) continue;
    const Vec p = g.center(c);
    g.for_each_in_box(p, f.inflate, [&](CellId q) {
      if (f.cls[q] != CellClass::Free) return;
      if ((g.center(q) - p).norm() <= f.inflate) {
        f.cls[q] = CellClass::ObstacleBc;
        f.values[q] = 1.0;
      }
    });
  }
}

}  // namespace detail

/// Solves the Dirichlet problem on the workspace lattice: 0 at the goal
/// cell, 1 on the outer ring and on known obstacle cells (inflated by
/// `inflate`). Obstacle cells that are not known stay free.
inline ScalarGridField solve_dirichlet(const Workspace& ws, const CellSet& known, const Vec& goal, double tol,
                                       double inflate = 0.0) {
  if (!(tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  const Grid& g = ws.grid();
  std::vector<CellClass> classes(g.size(), CellClass::Free);
  for (CellId c = 0; c < g.size(); ++c) {
    if (g.on_outer_ring(c)) classes[c] = CellClass::OuterBc;
  }
  ScalarGridField f = ScalarGridField::from_classes(g, std::move(classes));
  f.inflate = inflate;
  detail::pin_inflated(f, known);
  const auto goal_cell = g.locate(goal);
  if (!goal_cell) throw ConfigError("goal lies outside the workspace");
  if (f.cls[*goal_cell] != CellClass::Free) throw ConfigError("goal lies inside a known obstacle or on the outer boundary");
  f.cls[*goal_cell] = CellClass::GoalBc;
  f.values[*goal_cell] = 0.0;
  relax(f, tol);
  return f;
}

/// Pins newly discovered cells and re-relaxes from the previous values.
inline ScalarGridField resolve_incremental(ScalarGridField field, const CellSet& new_cells, double tol) {
  for (CellId c : new_cells) {
    if (field.cls[c] == CellClass::GoalBc) throw ConfigError("goal lies inside a known obstacle");
  }
  // A goal cell caught by the inflation radius keeps its pin.
  std::vector<CellId> goals;
  for (CellId c = 0; c < field.cls.size(); ++c) {
    if (field.cls[c] == CellClass::GoalBc) goals.push_back(c);
  }
  detail::pin_inflated(field, new_cells);
  for (CellId c : goals) {
    field.cls[c] = CellClass::GoalBc;
    field.values[c] = 0.0;
  }
  relax(field, tol);
  return field;
}

namespace detail {

inline bool is_open(CellClass c) { return c == CellClass::Free || c == CellClass::GoalBc; }

/// Cell-centered gradient estimate. Free cells use central differences
/// (one-sided at the lattice edge); pinned obstacle cells use one-sided
/// differences toward open neighbors; the goal cell is a flat minimum.
inline Vec cell_gradient(const ScalarGridField& f, CellId c) {
  Vec grad = Vec::Zero();
  if (f.cls[c] == CellClass::GoalBc) return grad;
  const double h = f.grid.h;
  const bool pinned = f.cls[c] != CellClass::Free;
  for (int a = 0; a < f.grid.dim; ++a) {
    auto fwd = f.grid.neighbor(c, a, +1);
    auto bwd = f.grid.neighbor(c, a, -1);
    if (pinned) {
      if (fwd && !is_open(f.cls[*fwd])) fwd.reset();
      if (bwd && !is_open(f.cls[*bwd])) bwd.reset();
    }
    if (fwd && bwd) {
      grad[a] = (f.values[*fwd] - f.values[*bwd]) / (2.0 * h);
    } else if (fwd) {
      grad[a] = (f.values[*fwd] - f.values[c]) / h;
    } else if (bwd) {
      grad[a] = (f.values[c] - f.values[*bwd]) / h;
    }
  }
  return grad;
}

/// Multilinear interpolation stencil over the surrounding cell centers.
struct Stencil {
  std::array<CellId, 8> cells{};
  std::array<double, 8> weights{};
  int count = 0;
};

inline Stencil stencil(const Grid& g, const Vec& x) {
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> t{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) {
    if (g.n[a] == 1) continue;
    const double f = (x[a] - g.origin[a]) / g.h - 0.5;
    int i0 = static_cast<int>(std::floor(f));
    i0 = std::clamp(i0, 0, g.n[a] - 2);
    base[a] = i0;
    t[a] = std::clamp(f - i0, 0.0, 1.0);
  }
  Stencil s;
  const int corners = 1 << g.dim;
  for (int m = 0; m < corners; ++m) {
    std::array<int, 3> ijk = base;
    double w = 1.0;
    bool valid = true;
    for (int a = 0; a < g.dim; ++a) {
      const int bit = (m >> a) & 1;
      if (g.n[a] == 1) {
        if (bit) valid = false;
        continue;
      }
      ijk[a] += bit;
      w *= bit ? t[a] : 1.0 - t[a];
    }
    if (!valid || w == 0.0) continue;
    s.cells[s.count] = g.index(ijk[0], ijk[1], ijk[2]);
    s.weights[s.count] = w;
    ++s.count;
  }
  return s;
}

inline CellId checked_cell(const ScalarGridField& f, const Vec& x) {
  const auto cell = f.grid.locate(x);
  if (!cell) throw QueryError("field query outside the lattice");
  if (f.hard[*cell]) throw QueryError("field query inside a known obstacle");
  return *cell;
}

}  // namespace detail

/// Gradient of V at x, interpolated from cell-centered differences. Callers
/// descend along its negation.
inline Vec gradient_at(const ScalarGridField& f, const Vec& x) {
  detail::checked_cell(f, x);
  const auto s = detail::stencil(f.grid, x);
  Vec g = Vec::Zero();
  for (int i = 0; i < s.count; ++i) g += s.weights[i] * detail::cell_gradient(f, s.cells[i]);
  return g;
}

inline double value_at(const ScalarGridField& f, const Vec& x) {
  detail::checked_cell(f, x);
  const auto s = detail::stencil(f.grid, x);
  double v = 0.0;
  for (int i = 0; i < s.count; ++i) v += s.weights[i] * f.values[s.cells[i]];
  return v;
}

struct FieldStats {
  /// Largest gradient magnitude over free cells.
  double max_gradient = 0.0;
  double min_interior_value = 1.0;
  int iterations = 0;
};

inline FieldStats field_stats(const ScalarGridField& f) {
  FieldStats s;
  s.iterations = f.iterations;
  bool has_goal = false;
  for (CellId c = 0; c < f.cls.size(); ++c) {
    if (f.cls[c] == CellClass::GoalBc) has_goal = true;
    if (f.cls[c] != CellClass::Free) continue;
    s.max_gradient = std::max(s.max_gradient, detail::cell_gradient(f, c).norm());
    s.min_interior_value = std::min(s.min_interior_value, f.values[c]);
  }
  if (!has_goal) throw ConfigError("field statistics need a goal cell");
  return s;
}

/// Debug dump: one row per cell (index, class, value).
inline void write_field_csv(std::ostream& os, const ScalarGridField& f) {
  os << "cell,class,value\n";
  for (CellId c = 0; c < f.cls.size(); ++c) {
    os << c << ',' << to_string(f.cls[c]) << ',' << f.values[c] << '\n';
  }
}

}  // namespace vhpf
