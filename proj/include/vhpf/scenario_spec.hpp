#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vhpf/controller.hpp"
#include "vhpf/geometry.hpp"
#include "vhpf/interaction_field.hpp"
#include "vhpf/world.hpp"

namespace vhpf {

enum class Integrator { Euler, Rk4 };

struct SimConfig {
  double dt = 0.01;
  double t_max = 200.0;
  Integrator integrator = Integrator::Rk4;
  /// Deadlock speed threshold; 0 picks 1e-3 of the largest initial
  /// purpose-field speed.
  double v_eps = 0.0;
  double w_dead = 5.0;
  double collision_tol = 1e-6;
  /// Keep integrating this long after every agent first reaches its target.
  double settle_time = 0.0;
  double solver_tol = 1e-8;

  void check() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(t_max > dt)) throw ConfigError("t_max must exceed dt");
    if (v_eps < 0.0) throw ConfigError("v_eps must be non-negative");
    if (!(w_dead > 0.0)) throw ConfigError("deadlock window must be positive");
    if (collision_tol < 0.0) throw ConfigError("collision tolerance must be non-negative");
    if (settle_time < 0.0) throw ConfigError("settle time must be non-negative");
    if (!(solver_tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  }
  bool operator==(const SimConfig&) const = default;
};

struct WorkspaceSpec {
  int dim = 2;
  Box bounds;
  std::vector<Shape> obstacles;
  /// Cell size; absent means a quarter of the smallest agent radius.
  std::optional<double> grid_h;
  bool operator==(const WorkspaceSpec&) const = default;
};

struct AgentSpec {
  AgentBody body;
  PrfSource prf = PrfSource::SpringToGoal;
  Vec drift = Vec::Zero();
  bool cooperative = true;
  bool prior_knowledge = false;
  /// Harmonic agents: when positive, u_g = -prf_speed grad V / |grad V|.
  double prf_speed = 0.0;
  bool operator==(const AgentSpec&) const = default;
};

enum class SuccessKind {
  /// Every agent with a goal ends inside its target zone.
  Converge,
  /// Two drifting groups end fully past each other along x.
  GroupsPass,
};

struct SuccessCriteria {
  SuccessKind kind = SuccessKind::Converge;
  /// GroupsPass: the group drifting toward -x, then the one toward +x.
  std::vector<int> left_group;
  std::vector<int> right_group;
  bool operator==(const SuccessCriteria&) const = default;
};

struct ScenarioSpec {
  std::string name;
  WorkspaceSpec workspace;
  std::vector<AgentSpec> agents;
  CrfParams crf;
  WeightProfile profile;
  ObstacleRepulsionSpec obstacle_repulsion;
  SimConfig sim;
  SuccessCriteria success;

  std::vector<AgentBody> bodies() const {
    std::vector<AgentBody> out;
    for (const auto& a : agents) out.push_back(a.body);
    return out;
  }

  double grid_h() const {
    if (workspace.grid_h) return *workspace.grid_h;
    double r = 1.0;
    bool first = true;
    for (const auto& a : agents) {
      if (first || a.body.radius < r) r = a.body.radius;
      first = false;
    }
    return r / 4.0;
  }

  Workspace build_workspace() const {
    return Workspace(workspace.dim, workspace.bounds, workspace.obstacles, grid_h());
  }

  bool operator==(const ScenarioSpec&) const = default;
};

}  // namespace vhpf
