#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vhpf/error.hpp"
#include "vhpf/harmonic_field.hpp"
#include "vhpf/interaction_field.hpp"
#include "vhpf/world.hpp"

namespace vhpf {

enum class PrfSource { SpringToGoal, ConstantDrift, Harmonic };

enum class RepulsionKind { Boundary, Rails };

struct ObstacleRepulsionSpec {
  bool enabled = true;
  RepulsionKind kind = RepulsionKind::Boundary;
  ObstacleRepulsionParams boundary;
  RailParams rails;
  bool operator==(const ObstacleRepulsionSpec&) const = default;
};

/// Parameters shared by every agent of a scenario.
struct ControlContext {
  const Workspace* ws = nullptr;
  CrfParams crf;
  WeightProfile profile;
  ObstacleRepulsionSpec repulsion;
  double solver_tol = kDefaultSolverTol;
};

/// Per-agent self-controller: purpose field, conflict resolution, and
/// obstacle repulsion. Owns the agent's knowledge and potential.
struct AgentController {
  int agent_id = 0;
  PrfSource prf = PrfSource::SpringToGoal;
  Vec drift = Vec::Zero();
  /// When false the agent ignores others (they still react to it).
  bool cooperative = true;
  /// Harmonic agents: when positive, u_g = -prf_speed grad V / |grad V|.
  double prf_speed = 0.0;
  KnowledgeMap knowledge;
  std::optional<ScalarGridField> field;

  /// Harmonic controller with its initial field solved. With prior
  /// knowledge the agent starts out knowing the whole obstacle boundary.
  static AgentController harmonic(const AgentBody& body, const Workspace& ws, bool prior_knowledge, double tol) {
    if (!body.goal) throw ConfigError("harmonic agent " + std::to_string(body.id) + " needs a goal");
    AgentController c;
    c.agent_id = body.id;
    c.prf = PrfSource::Harmonic;
    c.knowledge.agent_id = body.id;
    if (prior_knowledge) c.knowledge.cells = ws.boundary();
    c.field = solve_dirichlet(ws, c.knowledge.cells, *body.goal, tol, body.radius);
    return c;
  }

  static AgentController spring(const AgentBody& body) {
    if (!body.goal) throw ConfigError("spring agent " + std::to_string(body.id) + " needs a goal");
    AgentController c;
    c.agent_id = body.id;
    c.prf = PrfSource::SpringToGoal;
    c.knowledge.agent_id = body.id;
    return c;
  }

  static AgentController constant_drift(const AgentBody& body, const Vec& velocity) {
    AgentController c;
    c.agent_id = body.id;
    c.prf = PrfSource::ConstantDrift;
    c.drift = velocity;
    c.knowledge.agent_id = body.id;
    return c;
  }
};

struct ControlOutput {
  Vec u = Vec::Zero();
  Vec u_g = Vec::Zero();
  Vec u_c = Vec::Zero();
  Vec u_o = Vec::Zero();
  /// Sum of sigma over interacting neighbors (whether or not applied).
  double sigma_activity = 0.0;
  bool penetrating = false;
};

inline Vec purpose_control(const AgentController& ctrl, const AgentBody& self, const ControlContext& ctx) {
  switch (ctrl.prf) {
    case PrfSource::SpringToGoal:
      return ctx.crf.k_g * (*self.goal - self.position);
    case PrfSource::ConstantDrift:
      return ctrl.drift;
    case PrfSource::Harmonic: {
      if (!ctrl.field) throw ConfigError("harmonic controller queried before its field was solved");
      const Vec g = gradient_at(*ctrl.field, self.position);
      if (ctrl.prf_speed <= 0.0) return -ctx.crf.k_g * g;
      const double n = g.norm();
      return n > 0.0 ? Vec(-ctrl.prf_speed / n * g) : Vec::Zero();
    }
  }
  return Vec::Zero();
}

/// u_i = u_g + sum_j pair_force(i, j) + u_o, where `others` holds the
/// agents in the sensing neighborhood (ordered by id).
inline ControlOutput self_control(const AgentController& ctrl, const AgentBody& self,
                                  std::span<const AgentBody* const> others, const ControlContext& ctx) {
  ControlOutput out;
  const int dim = ctx.ws ? ctx.ws->dim() : 2;
  out.u_g = purpose_control(ctrl, self, ctx);
  const WeightProfile profile = ctx.profile.with_delta(self.delta);
  for (const AgentBody* other : others) {
    const double r = (self.position - other->position).norm();
    out.sigma_activity += weight_sigma(r, self.radius + other->radius, profile);
    if (ctx.crf.enabled && ctrl.cooperative) out.u_c += pair_force(self, *other, ctx.crf, profile, dim);
  }
  if (ctx.repulsion.enabled && ctx.ws) {
    if (ctx.repulsion.kind == RepulsionKind::Rails) {
      out.u_o = rail_repulsion(self.position, ctx.repulsion.rails);
    } else {
      const auto rep = obstacle_repulsion(self.position, self.radius, *ctx.ws, ctrl.knowledge, ctx.repulsion.boundary);
      out.u_o = rep.force;
      out.penetrating = rep.penetrating;
    }
  }
  out.u = out.u_g + out.u_c + out.u_o;
  return out;
}

struct DiscoveryEvent {
  int agent_id = 0;
  double t = 0.0;
  std::size_t new_cells = 0;
};

/// Sense, merge into the knowledge map, and re-solve the field when the map
/// grew. Every agent keeps a map for obstacle repulsion; only harmonic
/// controllers carry a field to re-solve.
inline std::optional<DiscoveryEvent> on_tick_sense(AgentController& ctrl, const AgentBody& self, const Workspace& ws,
                                                   double t, double tol) {
  if (ws.boundary().empty()) return std::nullopt;
  auto update = update_knowledge(ctrl.knowledge, sense_obstacles(self, ws));
  ctrl.knowledge = std::move(update.map);
  if (!update.novel) return std::nullopt;
  if (ctrl.field) ctrl.field = resolve_incremental(std::move(*ctrl.field), update.added, tol);
  return DiscoveryEvent{self.id, t, update.added.size()};
}

}  // namespace vhpf
