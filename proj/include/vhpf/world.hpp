#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vhpf/error.hpp"
#include "vhpf/geometry.hpp"
#include "vhpf/grid.hpp"

namespace vhpf {

using CellSet = std::set<CellId>;

/// Static environment: bounds, exact obstacle shapes, and their rasterization.
///
/// A cell is occupied when its center lies inside (or on) any shape. The
/// boundary set holds occupied cells that share a face with a free cell.
class Workspace {
 public:
  Workspace() = default;

  Workspace(int dim, Box bounds, std::vector<Shape> obstacles, double h)
      : dim_(dim), bounds_(std::move(bounds)), obstacles_(std::move(obstacles)) {
    if (dim != 2 && dim != 3) throw ConfigError("workspace dimension must be 2 or 3");
    if (dim == 2) {
      bounds_.lo[2] = 0.0;
      bounds_.hi[2] = 0.0;
    }
    for (const auto& s : obstacles_) {
      if (!contained_in(s, bounds_, dim_)) throw ConfigError("obstacle lies outside workspace bounds");
    }
    grid_ = Grid::covering(bounds_, h, dim_);
    rasterize();
    if (free_cells_ == 0) throw ConfigError("workspace has no free space");
  }

  int dim() const { return dim_; }
  const Box& bounds() const { return bounds_; }
  const std::vector<Shape>& obstacles() const { return obstacles_; }
  const Grid& grid() const { return grid_; }
  double h() const { return grid_.h; }

  bool occupied(CellId c) const { return occupied_[c] != 0; }
  bool is_boundary(CellId c) const { return boundary_mask_[c] != 0; }
  const CellSet& boundary() const { return boundary_; }
  std::size_t free_cell_count() const { return free_cells_; }

  bool in_bounds(const Vec& p) const { return inside_box(bounds_, p, dim_); }

  /// Signed distance from p to the nearest obstacle surface
  /// (+inf without obstacles).
  double obstacle_distance(const Vec& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : obstacles_) best = std::min(best, signed_distance(s, p, dim_));
    return best;
  }

 private:
  void rasterize() {
    const std::size_t total = grid_.size();
    occupied_.assign(total, 0);
    boundary_mask_.assign(total, 0);
    free_cells_ = 0;
    for (CellId c = 0; c < total; ++c) {
      const Vec p = grid_.center(c);
      for (const auto& s : obstacles_) {
        if (signed_distance(s, p, dim_) <= 0.0) {
          occupied_[c] = 1;
          break;
        }
      }
      if (!occupied_[c]) ++free_cells_;
    }
    for (CellId c = 0; c < total; ++c) {
      if (!occupied_[c]) continue;
      for (int a = 0; a < dim_ && !boundary_mask_[c]; ++a) {
        for (int s : {-1, 1}) {
          const auto nb = grid_.neighbor(c, a, s);
          if (nb && !occupied_[*nb]) {
            boundary_mask_[c] = 1;
            boundary_.insert(c);
            break;
          }
        }
      }
    }
  }

  int dim_ = 2;
  Box bounds_;
  std::vector<Shape> obstacles_;
  Grid grid_;
  std::vector<std::uint8_t> occupied_;
  std::vector<std::uint8_t> boundary_mask_;
  CellSet boundary_;
  std::size_t free_cells_ = 0;
};

/// A spherical agent with its sensing ring and (optional) target zone.
struct AgentBody {
  int id = 0;
  Vec position = Vec::Zero();
  double radius = 1.0;
  /// Width of the sensing ring; the expanded radius is radius + delta.
  double delta = 1.0;
  /// Absent for agents driven by a constant drift with no finite goal.
  std::optional<Vec> goal;
  double r_target = 1.0;

  double expanded_radius() const { return radius + delta; }

  bool in_target() const {
    return goal && (position - *goal).norm() <= r_target;
  }

  void check() const {
    if (!(radius > 0.0)) throw ConfigError("agent " + std::to_string(id) + ": radius must be positive");
    if (!(delta > 0.0)) throw ConfigError("agent " + std::to_string(id) + ": ring width must be positive");
    if (goal && r_target < radius)
      throw ConfigError("agent " + std::to_string(id) + ": target radius must be at least the body radius");
  }

  bool operator==(const AgentBody&) const = default;
};

/// The boundary cells an agent has discovered so far.
struct KnowledgeMap {
  int agent_id = 0;
  CellSet cells;
  /// Number of ticks at which the map grew.
  int discoveries = 0;
  /// Whether the most recent update grew the map.
  bool novel = false;

  bool knows(CellId c) const { return cells.contains(c); }
};

struct KnowledgeUpdate {
  KnowledgeMap map;
  bool novel = false;
  CellSet added;
};

/// Boundary cells whose centers fall inside the agent's sensing ring
/// radius < |c - x| <= radius + delta.
inline CellSet sense_obstacles(const AgentBody& agent, const Workspace& ws) {
  if (!ws.in_bounds(agent.position))
    throw ConfigError("agent " + std::to_string(agent.id) + " is outside the workspace bounds");
  CellSet sensed;
  const double outer = agent.expanded_radius();
  ws.grid().for_each_in_box(agent.position, outer, [&](CellId c) {
    if (!ws.is_boundary(c)) return;
    const double d = (ws.grid().center(c) - agent.position).norm();
    if (d > agent.radius && d <= outer) sensed.insert(c);
  });
  return sensed;
}

inline KnowledgeUpdate update_knowledge(const KnowledgeMap& km, const CellSet& sensed) {
  KnowledgeUpdate out{km, false, {}};
  for (CellId c : sensed) {
    if (out.map.cells.insert(c).second) out.added.insert(c);
  }
  out.novel = !out.added.empty();
  out.map.novel = out.novel;
  if (out.novel) ++out.map.discoveries;
  return out;
}

/// Indices (into `all`) of agents whose bodies touch the sensing ring of
/// all[self]: |x_i - x_j| <= radius_i + delta_i + radius_j.
inline std::vector<std::size_t> neighbor_indices(std::size_t self, const std::vector<AgentBody>& all) {
  std::vector<std::size_t> out;
  const auto& a = all[self];
  for (std::size_t j = 0; j < all.size(); ++j) {
    if (j == self) continue;
    const double d = (a.position - all[j].position).norm();
    if (d <= a.expanded_radius() + all[j].radius) out.push_back(j);
  }
  return out;
}

inline std::vector<AgentBody> neighbors(const AgentBody& agent, const std::vector<AgentBody>& all) {
  std::vector<AgentBody> out;
  for (const auto& other : all) {
    if (other.id == agent.id) continue;
    const double d = (agent.position - other.position).norm();
    if (d <= agent.expanded_radius() + other.radius) out.push_back(other);
  }
  return out;
}

struct PassageReport {
  double xi = 0.0;
  /// Free cells with no ball of radius xi inside free space within reach xi.
  std::vector<CellId> violating;
  bool ok() const { return violating.empty(); }
};

/// Checks that every free point lies inside some ball of radius xi that is
/// entirely obstacle-free. Ball centers are restricted to cell centers, with
/// half a cell diagonal of slack on both the clearance and the reach.
/// Only obstacle shapes constrain the balls; the bounds do not.
inline PassageReport passage_width_audit(const Workspace& ws, double xi) {
  if (!(xi > 0.0)) throw ConfigError("passage width must be positive");
  const Grid& g = ws.grid();
  const double slack = 0.5 * g.h * std::sqrt(static_cast<double>(ws.dim()));
  std::vector<std::uint8_t> covered(g.size(), 0);
  for (CellId c = 0; c < g.size(); ++c) {
    if (ws.occupied(c)) continue;
    const Vec p = g.center(c);
    if (ws.obstacle_distance(p) < xi - slack) continue;
    const double reach = xi + slack;
    g.for_each_in_box(p, reach, [&](CellId q) {
      if (!covered[q] && (g.center(q) - p).norm() <= reach) covered[q] = 1;
    });
  }
  PassageReport report;
  report.xi = xi;
  for (CellId c = 0; c < g.size(); ++c) {
    if (!ws.occupied(c) && !covered[c]) report.violating.push_back(c);
  }
  return report;
}

/// The passage width for a group: sum of the two largest expanded radii.
inline double passage_width_for(const std::vector<AgentBody>& agents) {
  std::vector<double> r;
  for (const auto& a : agents) r.push_back(a.expanded_radius());
  std::sort(r.begin(), r.end(), std::greater<>());
  if (r.empty()) return 0.0;
  if (r.size() == 1) return 2.0 * r[0];
  return r[0] + r[1];
}

enum class ViolationKind {
  ConflictingTargets,
  UnattainableTarget,
  OverlappingBodies,
  BodyInObstacle,
  OutOfBounds,
  InvalidAgent,
};

struct Violation {
  ViolationKind kind;
  std::string message;
  int agent = 0;
  int other = 0;
};

inline std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::ConflictingTargets: return "conflicting targets";
    case ViolationKind::UnattainableTarget: return "unattainable target";
    case ViolationKind::OverlappingBodies: return "overlapping bodies";
    case ViolationKind::BodyInObstacle: return "body intersects obstacle";
    case ViolationKind::OutOfBounds: return "outside workspace";
    case ViolationKind::InvalidAgent: return "invalid agent";
  }
  return "unknown";
}

/// Target zones must be pairwise disjoint and obstacle-free; initial bodies
/// must be pairwise disjoint, obstacle-free, and inside the bounds.
inline std::vector<Violation> validate_scenario(const Workspace& ws, const std::vector<AgentBody>& agents) {
  std::vector<Violation> out;
  auto add = [&](ViolationKind k, int a, int b, const std::string& detail) {
    out.push_back({k, to_string(k) + ": " + detail, a, b});
  };
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& a = agents[i];
    try {
      a.check();
    } catch (const ConfigError& e) {
      add(ViolationKind::InvalidAgent, a.id, a.id, e.what());
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (agents[j].id == a.id) add(ViolationKind::InvalidAgent, a.id, a.id, "duplicate agent id");
    }
    if (!ws.in_bounds(a.position)) add(ViolationKind::OutOfBounds, a.id, a.id, "agent " + std::to_string(a.id));
    if (ws.obstacle_distance(a.position) < a.radius)
      add(ViolationKind::BodyInObstacle, a.id, a.id, "agent " + std::to_string(a.id));
    if (a.goal) {
      if (!ws.in_bounds(*a.goal) || ws.obstacle_distance(*a.goal) < a.r_target)
        add(ViolationKind::UnattainableTarget, a.id, a.id, "agent " + std::to_string(a.id));
    }
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      const auto& b = agents[j];
      if ((a.position - b.position).norm() < a.radius + b.radius)
        add(ViolationKind::OverlappingBodies, a.id, b.id,
            "agents " + std::to_string(a.id) + " and " + std::to_string(b.id));
      if (a.goal && b.goal && (*a.goal - *b.goal).norm() <= a.r_target + b.r_target)
        add(ViolationKind::ConflictingTargets, a.id, b.id,
            "agents " + std::to_string(a.id) + " and " + std::to_string(b.id));
    }
  }
  return out;
}

}  // namespace vhpf
