#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vhpf/controller.hpp"
#include "vhpf/error.hpp"
#include "vhpf/parallel.hpp"
#include "vhpf/scenario_spec.hpp"
#include "vhpf/world.hpp"

namespace vhpf {

enum class Outcome { Converged, Deadlock, Timeout, Collision };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Converged: return "CONVERGED";
    case Outcome::Deadlock: return "DEADLOCK";
    case Outcome::Timeout: return "TIMEOUT";
    case Outcome::Collision: return "COLLISION";
  }
  return "?";
}

enum class EventKind { Discovery, Penetration, Collision, Deadlock, Converged, Warning };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Discovery: return "discovery";
    case EventKind::Penetration: return "penetration";
    case EventKind::Collision: return "collision";
    case EventKind::Deadlock: return "deadlock";
    case EventKind::Converged: return "converged";
    case EventKind::Warning: return "warning";
  }
  return "?";
}

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::Warning;
  int agent = -1;
  int other = -1;
  std::size_t count = 0;
  std::string detail;
};

struct AgentSample {
  double t = 0.0;
  Vec x = Vec::Zero();
  Vec u = Vec::Zero();
  double sigma_activity = 0.0;
};

/// One record per agent per tick, plus run events and the outcome.
struct TrajectoryLog {
  int dim = 2;
  std::vector<int> ids;
  /// samples[i] is the time series of agent ids[i].
  std::vector<std::vector<AgentSample>> samples;
  std::vector<Event> events;
  /// Sum of agent potentials per tick (empty when unavailable).
  std::vector<double> xi;
  bool xi_available = false;
  /// Why the loop stopped (never Collision).
  Outcome termination = Outcome::Timeout;
  /// Termination, overridden by Collision when any violation was logged.
  Outcome outcome = Outcome::Timeout;
  double t_end = 0.0;
  double v_eps = 0.0;

  std::size_t ticks() const { return samples.empty() ? 0 : samples.front().size(); }
};

struct CollisionViolation {
  int agent = 0;
  /// Other agent id, or -1 for an obstacle violation.
  int other = -1;
  double overlap = 0.0;
};

/// Body pairs with |x_i - x_j| < rho_i + rho_j - tol and bodies with
/// obstacle clearance < -tol.
inline std::vector<CollisionViolation> collision_audit(const std::vector<AgentBody>& bodies, const Workspace& ws,
                                                       double tol) {
  std::vector<CollisionViolation> out;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const auto& a = bodies[i];
    const double clearance = ws.obstacle_distance(a.position) - a.radius;
    if (clearance < -tol) out.push_back({a.id, -1, -clearance});
    for (std::size_t j = i + 1; j < bodies.size(); ++j) {
      const auto& b = bodies[j];
      const double gap = (a.position - b.position).norm() - a.radius - b.radius;
      if (gap < -tol) out.push_back({a.id, b.id, -gap});
    }
  }
  return out;
}

struct CurvatureProfile {
  std::vector<double> s;
  std::vector<double> kappa;
  double kappa_max = 0.0;
  bool degenerate = false;
};

/// Curvature of a sampled path. Samples slower than v_eps are dropped, the
/// rest is resampled uniformly in arc length with spacing 4x the mean step,
/// and kappa = |tau(s + ds) - tau(s)| / ds with tau the unit chord tangent.
inline CurvatureProfile curvature_profile(const std::vector<Vec>& points, const std::vector<double>& speeds,
                                          double v_eps, double spacing_factor = 4.0) {
  CurvatureProfile out;
  std::vector<Vec> kept;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i < speeds.size() && speeds[i] < v_eps) continue;
    if (!kept.empty() && (points[i] - kept.back()).norm() == 0.0) continue;
    kept.push_back(points[i]);
  }
  if (kept.size() < 3) {
    out.degenerate = true;
    return out;
  }
  std::vector<double> cum(kept.size(), 0.0);
  for (std::size_t i = 1; i < kept.size(); ++i) cum[i] = cum[i - 1] + (kept[i] - kept[i - 1]).norm();
  const double total = cum.back();
  const double ds = spacing_factor * total / static_cast<double>(kept.size() - 1);
  const auto n = static_cast<std::size_t>(std::floor(total / ds)) + 1;
  if (n < 3 || !(ds > 0.0)) {
    out.degenerate = true;
    return out;
  }
  std::vector<Vec> res;
  res.reserve(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = static_cast<double>(k) * ds;
    while (seg + 2 < kept.size() && cum[seg + 1] < s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double w = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
    res.push_back(kept[seg] + w * (kept[seg + 1] - kept[seg]));
  }
  std::vector<Vec> tau;
  for (std::size_t k = 0; k + 1 < res.size(); ++k) {
    const Vec d = res[k + 1] - res[k];
    const double l = d.norm();
    tau.push_back(l > 0.0 ? Vec(d / l) : Vec::Zero());
  }
  for (std::size_t k = 0; k + 1 < tau.size(); ++k) {
    const double kap = (tau[k + 1] - tau[k]).norm() / ds;
    out.s.push_back((static_cast<double>(k) + 1.0) * ds);
    out.kappa.push_back(kap);
    out.kappa_max = std::max(out.kappa_max, kap);
  }
  return out;
}

struct MetricsReport {
  std::vector<int> ids;
  std::vector<double> kappa_max;
  std::vector<bool> kappa_degenerate;
  std::vector<double> path_length;
  /// Absent with fewer than two agents.
  std::optional<double> min_pair_clearance;
  /// Absent without obstacles.
  std::optional<double> min_obstacle_clearance;
  bool xi_available = false;
  double xi_initial = 0.0;
  double xi_final = 0.0;
};

struct LyapunovTrace {
  bool available = false;
  std::vector<double> t;
  std::vector<double> xi;
  /// Forward differences (xi[k+1] - xi[k]) / dt, one shorter than xi.
  std::vector<double> dxi;
};

inline LyapunovTrace lyapunov_trace(const TrajectoryLog& log) {
  LyapunovTrace out;
  out.available = log.xi_available;
  if (!out.available || log.samples.empty()) return out;
  out.xi = log.xi;
  for (const auto& s : log.samples.front()) out.t.push_back(s.t);
  for (std::size_t k = 0; k + 1 < out.xi.size(); ++k) {
    const double dt = out.t[k + 1] - out.t[k];
    out.dxi.push_back((out.xi[k + 1] - out.xi[k]) / dt);
  }
  return out;
}

/// True when every agent stayed slower than v_eps over the trailing window
/// of length w_dead while some agent with a goal was outside its target.
inline bool detect_deadlock(const TrajectoryLog& log, const std::vector<AgentBody>& bodies, double v_eps,
                            double w_dead) {
  if (log.samples.empty() || log.samples.front().empty()) return false;
  const auto& first = log.samples.front();
  const double t_end = first.back().t;
  if (t_end - first.front().t < w_dead - 1e-9) return false;
  bool someone_outside = false;
  for (std::size_t i = 0; i < log.samples.size(); ++i) {
    const auto& series = log.samples[i];
    const auto& body = bodies[i];
    if (body.goal && (series.back().x - *body.goal).norm() > body.r_target) someone_outside = true;
    for (auto it = series.rbegin(); it != series.rend() && t_end - it->t <= w_dead + 1e-9; ++it) {
      if (it->u.norm() >= v_eps) return false;
    }
  }
  return someone_outside;
}

struct RunResult {
  TrajectoryLog log;
  MetricsReport metrics;
  std::vector<std::string> warnings;
};

/// Synchronous multi-agent integrator over a validated scenario.
class Simulation {
 public:
  explicit Simulation(const ScenarioSpec& spec, int threads = thread_count_from_env())
      : spec_(spec), cfg_(spec.sim), pool_(std::make_unique<WorkerPool>(threads)) {
    cfg_.check();
    ws_ = std::make_unique<Workspace>(spec_.build_workspace());
    std::vector<AgentSpec> agents = spec_.agents;
    std::sort(agents.begin(), agents.end(), [](const auto& a, const auto& b) { return a.body.id < b.body.id; });
    for (const auto& a : agents) bodies_.push_back(a.body);

    const auto violations = validate_scenario(*ws_, bodies_);
    if (!violations.empty()) {
      std::string msg = "scenario '" + spec_.name + "' failed validation:";
      for (const auto& v : violations) msg += "\n  " + v.message;
      throw ConfigError(msg);
    }
    ctx_.ws = ws_.get();
    ctx_.crf = spec_.crf;
    ctx_.profile = spec_.profile;
    ctx_.repulsion = spec_.obstacle_repulsion;
    ctx_.solver_tol = cfg_.solver_tol;

    for (std::size_t i = 0; i < agents.size(); ++i) {
      const auto& a = agents[i];
      switch (a.prf) {
        case PrfSource::SpringToGoal: controllers_.push_back(AgentController::spring(a.body)); break;
        case PrfSource::ConstantDrift: controllers_.push_back(AgentController::constant_drift(a.body, a.drift)); break;
        case PrfSource::Harmonic:
          controllers_.push_back(AgentController::harmonic(a.body, *ws_, a.prior_knowledge, cfg_.solver_tol));
          break;
      }
      controllers_.back().cooperative = a.cooperative;
      controllers_.back().prf_speed = a.prf_speed;
    }

    log_.dim = ws_->dim();
    for (const auto& b : bodies_) log_.ids.push_back(b.id);
    log_.samples.resize(bodies_.size());
    log_.xi_available = std::none_of(controllers_.begin(), controllers_.end(),
                                     [](const auto& c) { return c.prf == PrfSource::ConstantDrift; });

    preflight_warnings();

    if (cfg_.v_eps > 0.0) {
      v_eps_ = cfg_.v_eps;
    } else {
      double typical = 0.0;
      for (std::size_t i = 0; i < bodies_.size(); ++i) {
        typical = std::max(typical, purpose_control(controllers_[i], bodies_[i], ctx_).norm());
      }
      v_eps_ = typical > 0.0 ? 1e-3 * typical : 1e-6;
    }
    log_.v_eps = v_eps_;
    for (const auto& v : collision_audit(bodies_, *ws_, cfg_.collision_tol)) note_collision(v);
  }

  const Workspace& workspace() const { return *ws_; }
  const std::vector<AgentBody>& bodies() const { return bodies_; }
  const std::vector<AgentController>& controllers() const { return controllers_; }
  const ControlContext& context() const { return ctx_; }
  const TrajectoryLog& log() const { return log_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  double time() const { return t_; }
  double v_eps() const { return v_eps_; }

  /// Controls of every agent on the given position snapshot.
  std::vector<ControlOutput> evaluate(const std::vector<Vec>& positions) const {
    std::vector<AgentBody> snap = bodies_;
    for (std::size_t i = 0; i < snap.size(); ++i) snap[i].position = positions[i];
    std::vector<ControlOutput> out(snap.size());
    pool_->run(snap.size(), [&](std::size_t i) {
      std::vector<const AgentBody*> near;
      for (std::size_t j : neighbor_indices(i, snap)) near.push_back(&snap[j]);
      out[i] = self_control(controllers_[i], snap[i], near, ctx_);
    });
    return out;
  }

  /// Sense, evaluate, and record at the current instant.
  std::vector<ControlOutput> observe() {
    std::vector<std::optional<DiscoveryEvent>> found(bodies_.size());
    pool_->run(bodies_.size(), [&](std::size_t i) {
      found[i] = on_tick_sense(controllers_[i], bodies_[i], *ws_, t_, cfg_.solver_tol);
    });
    for (const auto& d : found) {
      if (d) log_.events.push_back({d->t, EventKind::Discovery, d->agent_id, -1, d->new_cells, ""});
    }
    auto controls = evaluate(positions());
    for (std::size_t i = 0; i < bodies_.size(); ++i) {
      log_.samples[i].push_back({t_, bodies_[i].position, controls[i].u, controls[i].sigma_activity});
      if (controls[i].penetrating && !penetrating_[i]) {
        log_.events.push_back({t_, EventKind::Penetration, bodies_[i].id, -1, 0, "body overlaps a known obstacle"});
      }
      penetrating_[i] = controls[i].penetrating;
      if (controls[i].u.norm() >= v_eps_) last_fast_ = t_;
    }
    if (log_.xi_available) log_.xi.push_back(lyapunov_value());
    return controls;
  }

  /// Advance one step from the controls observed at the current instant.
  void integrate(const std::vector<ControlOutput>& k1) {
    const double dt = cfg_.dt;
    const std::size_t n = bodies_.size();
    std::vector<Vec> x0 = positions();
    std::vector<Vec> next(n);
    if (cfg_.integrator == Integrator::Euler) {
      for (std::size_t i = 0; i < n; ++i) next[i] = x0[i] + dt * k1[i].u;
    } else {
      auto shifted = [&](const std::vector<ControlOutput>& k, double scale) {
        std::vector<Vec> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = x0[i] + scale * k[i].u;
        return x;
      };
      const auto k2 = evaluate(shifted(k1, 0.5 * dt));
      const auto k3 = evaluate(shifted(k2, 0.5 * dt));
      const auto k4 = evaluate(shifted(k3, dt));
      for (std::size_t i = 0; i < n; ++i) {
        next[i] = x0[i] + (dt / 6.0) * (k1[i].u + 2.0 * k2[i].u + 2.0 * k3[i].u + k4[i].u);
      }
    }
    ++tick_;
    t_ = static_cast<double>(tick_) * dt;
    for (std::size_t i = 0; i < n; ++i) bodies_[i].position = next[i];
    auto current = collision_audit(bodies_, *ws_, cfg_.collision_tol);
    for (const auto& v : current) note_collision(v);
    active_collisions_.clear();
    for (const auto& v : current) active_collisions_.push_back({v.agent, v.other});
  }

  /// One full tick: observe then integrate.
  void step() { integrate(observe()); }

  RunResult run() {
    std::optional<double> converged_at;
    for (;;) {
      const auto controls = observe();
      const bool all_in = all_in_targets();
      if (all_in && !converged_at) {
        converged_at = t_;
        log_.events.push_back({t_, EventKind::Converged, -1, -1, 0, "all agents inside their targets"});
      } else if (!all_in) {
        converged_at.reset();
      }
      if (converged_at && t_ - *converged_at >= cfg_.settle_time - 1e-12) {
        finish(Outcome::Converged);
        break;
      }
      if (t_ - last_fast_ >= cfg_.w_dead - 1e-9 && has_goal_agents() && !all_in) {
        log_.events.push_back({t_, EventKind::Deadlock, -1, -1, 0, "all agents below the speed threshold"});
        finish(Outcome::Deadlock);
        break;
      }
      if (t_ >= cfg_.t_max - 1e-9) {
        finish(horizon_outcome());
        break;
      }
      integrate(controls);
    }
    RunResult result;
    result.log = log_;
    result.metrics = compute_metrics();
    result.warnings = warnings_;
    return result;
  }

  std::vector<Vec> positions() const {
    std::vector<Vec> x;
    for (const auto& b : bodies_) x.push_back(b.position);
    return x;
  }

  /// Sum of agent potentials: spring agents use K_g |x - C|^2 / 2,
  /// harmonic agents their field value.
  double lyapunov_value() const {
    double xi = 0.0;
    for (std::size_t i = 0; i < bodies_.size(); ++i) {
      const auto& c = controllers_[i];
      const auto& b = bodies_[i];
      if (c.prf == PrfSource::SpringToGoal) xi += 0.5 * ctx_.crf.k_g * (b.position - *b.goal).squaredNorm();
      if (c.prf == PrfSource::Harmonic) xi += value_at(*c.field, b.position);
    }
    return xi;
  }

  MetricsReport compute_metrics() const {
    MetricsReport m;
    m.ids = log_.ids;
    for (std::size_t i = 0; i < log_.samples.size(); ++i) {
      std::vector<Vec> pts;
      std::vector<double> speeds;
      double length = 0.0;
      for (std::size_t k = 0; k < log_.samples[i].size(); ++k) {
        const auto& s = log_.samples[i][k];
        pts.push_back(s.x);
        speeds.push_back(s.u.norm());
        if (k > 0) length += (s.x - log_.samples[i][k - 1].x).norm();
      }
      const auto prof = curvature_profile(pts, speeds, v_eps_);
      m.kappa_max.push_back(prof.kappa_max);
      m.kappa_degenerate.push_back(prof.degenerate);
      m.path_length.push_back(length);
    }
    const std::size_t ticks = log_.ticks();
    for (std::size_t k = 0; k < ticks; ++k) {
      for (std::size_t i = 0; i < bodies_.size(); ++i) {
        const Vec& xi = log_.samples[i][k].x;
        if (!ws_->obstacles().empty()) {
          const double c = ws_->obstacle_distance(xi) - bodies_[i].radius;
          m.min_obstacle_clearance = std::min(m.min_obstacle_clearance.value_or(c), c);
        }
        for (std::size_t j = i + 1; j < bodies_.size(); ++j) {
          const double c = (xi - log_.samples[j][k].x).norm() - bodies_[i].radius - bodies_[j].radius;
          m.min_pair_clearance = std::min(m.min_pair_clearance.value_or(c), c);
        }
      }
    }
    m.xi_available = log_.xi_available;
    if (log_.xi_available && !log_.xi.empty()) {
      m.xi_initial = log_.xi.front();
      m.xi_final = log_.xi.back();
    }
    return m;
  }

 private:
  bool has_goal_agents() const {
    return std::any_of(bodies_.begin(), bodies_.end(), [](const auto& b) { return b.goal.has_value(); });
  }

  bool all_in_targets() const {
    if (spec_.success.kind == SuccessKind::GroupsPass) return false;
    if (bodies_.empty()) return true;
    if (!has_goal_agents()) return false;
    return std::all_of(bodies_.begin(), bodies_.end(), [](const auto& b) { return !b.goal || b.in_target(); });
  }

  Outcome horizon_outcome() const {
    if (spec_.success.kind != SuccessKind::GroupsPass) return Outcome::Timeout;
    auto x_of = [&](int id) {
      for (const auto& b : bodies_)
        if (b.id == id) return b.position[0];
      throw ConfigError("success group references unknown agent " + std::to_string(id));
    };
    auto initial_x = [&](int id) {
      for (const auto& a : spec_.agents)
        if (a.body.id == id) return a.body.position[0];
      throw ConfigError("success group references unknown agent " + std::to_string(id));
    };
    double right_start_min = std::numeric_limits<double>::infinity();
    double left_start_max = -std::numeric_limits<double>::infinity();
    for (int id : spec_.success.right_group) right_start_min = std::min(right_start_min, initial_x(id));
    for (int id : spec_.success.left_group) left_start_max = std::max(left_start_max, initial_x(id));
    for (int id : spec_.success.left_group)
      if (!(x_of(id) < right_start_min)) return Outcome::Timeout;
    for (int id : spec_.success.right_group)
      if (!(x_of(id) > left_start_max)) return Outcome::Timeout;
    return Outcome::Converged;
  }

  void finish(Outcome termination) {
    log_.termination = termination;
    log_.outcome = collided_ ? Outcome::Collision : termination;
    log_.t_end = t_;
  }

  void note_collision(const CollisionViolation& v) {
    collided_ = true;
    const bool active = std::any_of(active_collisions_.begin(), active_collisions_.end(),
                                    [&](const auto& p) { return p.first == v.agent && p.second == v.other; });
    if (active) return;
    log_.events.push_back({t_, EventKind::Collision, v.agent, v.other, 0,
                           v.other < 0 ? "body intersects obstacle" : "bodies overlap"});
  }

  void preflight_warnings() {
    penetrating_.assign(bodies_.size(), false);
    if (!ws_->obstacles().empty() && !bodies_.empty()) {
      const auto report = passage_width_audit(*ws_, passage_width_for(bodies_));
      if (!report.ok()) {
        warn("passage width audit: " + std::to_string(report.violating.size()) +
             " free cells lack room for two agents to pass");
      }
    }
    if (ctx_.crf.mode == CrfMode::Unit && ctx_.crf.enabled) {
      std::vector<FieldStats> stats;
      for (const auto& c : controllers_) {
        if (!c.field) continue;
        auto s = field_stats(*c.field);
        s.max_gradient = c.prf_speed > 0.0 ? c.prf_speed : s.max_gradient * ctx_.crf.k_g;
        stats.push_back(s);
      }
      if (stats.size() == controllers_.size()) {
        const auto check = circulation_bound_check(ctx_.crf.k_t, stats);
        if (!check.ok) warn(check.message);
      }
    }
  }

  void warn(const std::string& msg) {
    warnings_.push_back(msg);
    log_.events.push_back({t_, EventKind::Warning, -1, -1, 0, msg});
  }

  ScenarioSpec spec_;
  SimConfig cfg_;
  std::unique_ptr<WorkerPool> pool_;
  std::unique_ptr<Workspace> ws_;
  std::vector<AgentBody> bodies_;
  std::vector<AgentController> controllers_;
  ControlContext ctx_;
  TrajectoryLog log_;
  std::vector<std::string> warnings_;
  std::vector<bool> penetrating_;
  std::vector<std::pair<int, int>> active_collisions_;
  bool collided_ = false;
  double v_eps_ = 1e-6;
  double t_ = 0.0;
  long long tick_ = 0;
  double last_fast_ = 0.0;
};

inline RunResult run(const ScenarioSpec& spec) { return Simulation(spec).run(); }

inline RunResult run(ScenarioSpec spec, const SimConfig& cfg) {
  spec.sim = cfg;
  return Simulation(spec).run();
}

}  // namespace vhpf
