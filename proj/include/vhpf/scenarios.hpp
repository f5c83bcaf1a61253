#pragma once

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vhpf/error.hpp"
#include "vhpf/scenario_spec.hpp"

namespace vhpf {

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {
      "case1",         "case2_linear",       "case2_sin",         "case2_exp",     "case3_3d",
      "case4",         "case4_malfunction",  "case5_lanes",       "case6_no_circulation",
      "case6_circulation", "case7_unknown",  "case8_tight",
  };
  return names;
}

namespace detail {

inline AgentSpec spring_agent(int id, Vec start, Vec goal, double radius, double delta) {
  AgentSpec a;
  a.body.id = id;
  a.body.position = start;
  a.body.radius = radius;
  a.body.delta = delta;
  a.body.goal = goal;
  a.body.r_target = radius;
  a.prf = PrfSource::SpringToGoal;
  return a;
}

/// Two discs exchanging positions on a line, spring purpose fields and the
/// spring-form interaction: K_g = 0.4, K_r = 2, K_t = 1, rho = 1, delta = 1.5.
inline ScenarioSpec exchange_pair() {
  ScenarioSpec s;
  s.name = "case1";
  s.workspace.dim = 2;
  s.workspace.bounds = Box{Vec(-10, -10, 0), Vec(10, 10, 0)};
  s.agents.push_back(spring_agent(1, vec2(-4, 0), vec2(4, 0), 1.0, 1.5));
  s.agents.push_back(spring_agent(2, vec2(4, 0), vec2(-4, 0), 1.0, 1.5));
  s.crf = CrfParams{2.0, 1.0, 0.4, CrfMode::Spring, Circulation::Ccw, Vec(0, 0, 1), true};
  s.profile = WeightProfile{ProfileKind::Spring, 1.5, 0.05};
  s.obstacle_repulsion.enabled = false;
  s.sim.settle_time = 10.0;
  return s;
}

inline ScenarioSpec profile_variant(const std::string& name, ProfileKind kind) {
  ScenarioSpec s = exchange_pair();
  s.name = name;
  s.profile.kind = kind;
  return s;
}

inline ScenarioSpec exchange_3d() {
  ScenarioSpec s = exchange_pair();
  s.name = "case3_3d";
  s.workspace.dim = 3;
  s.workspace.bounds = Box{Vec(-8, -6, -6), Vec(8, 6, 6)};
  s.workspace.grid_h = 0.5;
  s.agents[0].body.position = Vec(-4, 0, 0);
  s.agents[0].body.goal = Vec(4, 0, 0);
  s.agents[1].body.position = Vec(4, 0, 0);
  s.agents[1].body.goal = Vec(-4, 0, 0);
  return s;
}

/// Three agents on an equilateral triangle (side 8) heading to the
/// reflections of their starts through the centroid, so all straight paths
/// cross at the centroid.
inline ScenarioSpec triangle(bool malfunction) {
  ScenarioSpec s = exchange_pair();
  s.name = malfunction ? "case4_malfunction" : "case4";
  s.agents.clear();
  const double side = 8.0;
  const double circumradius = side / std::sqrt(3.0);
  for (int k = 0; k < 3; ++k) {
    const double ang = std::numbers::pi / 2.0 + k * 2.0 * std::numbers::pi / 3.0;
    const Vec start = vec2(circumradius * std::cos(ang), circumradius * std::sin(ang));
    s.agents.push_back(spring_agent(k + 1, start, Vec(-start), 1.0, 1.5));
  }
  if (malfunction) s.agents[1].cooperative = false;
  return s;
}

/// Two groups of four drifting in opposite directions between rails.
inline ScenarioSpec lanes() {
  ScenarioSpec s;
  s.name = "case5_lanes";
  s.workspace.dim = 2;
  s.workspace.bounds = Box{Vec(-40, -5, 0), Vec(40, 5, 0)};
  // Rail faces sit where the rail spring reaches its body contact point.
  s.workspace.obstacles.push_back(Box{Vec(-40, 3.5, 0), Vec(40, 5, 0)});
  s.workspace.obstacles.push_back(Box{Vec(-40, -5, 0), Vec(40, -3.5, 0)});
  const double init[16] = {2, 1.3, 5, 1.3, 2, -1.3, 5, -1.3, -2, 1.3, -5, 1.3, -2, -1.3, -5, -1.3};
  for (int i = 0; i < 8; ++i) {
    AgentSpec a;
    a.body.id = i + 1;
    a.body.position = vec2(init[2 * i], init[2 * i + 1]);
    a.body.radius = 1.0;
    a.body.delta = 0.2;
    a.body.r_target = 1.0;
    a.prf = PrfSource::ConstantDrift;
    a.drift = i < 4 ? vec2(-1, 0) : vec2(1, 0);
    s.agents.push_back(a);
  }
  s.crf = CrfParams{20.0, 10.0, 0.0, CrfMode::Spring, Circulation::Ccw, Vec(0, 0, 1), true};
  s.profile = WeightProfile{ProfileKind::Spring, 0.2, 0.05};
  s.obstacle_repulsion.enabled = true;
  s.obstacle_repulsion.kind = RepulsionKind::Rails;
  s.obstacle_repulsion.rails = RailParams{30.0, 2.0, 1};
  s.sim.t_max = 25.0;
  s.success.kind = SuccessKind::GroupsPass;
  s.success.left_group = {1, 2, 3, 4};
  s.success.right_group = {5, 6, 7, 8};
  return s;
}

/// Reconstruction: seven holders in a hexagonal cluster keep their positions
/// while agent 8 crosses from left to right. The spacing sits just outside
/// the interaction range, and agent 8 heads into the notch between the two
/// leftmost holders.
inline ScenarioSpec cluster_crossing(bool circulation) {
  ScenarioSpec s = exchange_pair();
  s.name = circulation ? "case6_circulation" : "case6_no_circulation";
  s.workspace.bounds = Box{Vec(-16, -10, 0), Vec(16, 10, 0)};
  s.agents.clear();
  const double spacing = 3.6;
  s.agents.push_back(spring_agent(1, vec2(0, 0), vec2(0, 0), 1.0, 1.5));
  for (int k = 0; k < 6; ++k) {
    const double ang = std::numbers::pi * (2 * k + 1) / 6.0;
    const Vec p = vec2(spacing * std::cos(ang), spacing * std::sin(ang));
    s.agents.push_back(spring_agent(k + 2, p, p, 1.0, 1.5));
  }
  s.agents.push_back(spring_agent(8, vec2(-11, 0), vec2(11, 0), 1.0, 1.5));
  // Softer goal springs than the exchange pair, so the drive on agent 8
  // stays below the peak push two holders can exert.
  s.crf.k_g = 0.15;
  if (!circulation) s.crf.k_t = 0.0;
  s.sim.t_max = 150.0;
  return s;
}

/// Reconstruction: a room (the bounds) with two discs between swapped
/// start/goal pairs, spaced so the room passes the passage-width audit;
/// harmonic purpose fields with no prior map. The purpose
/// term follows the normalized gradient at unit speed, since a harmonic
/// potential pinned at a single cell is nearly flat far from the goal.
inline ScenarioSpec unknown_room() {
  ScenarioSpec s;
  s.name = "case7_unknown";
  s.workspace.dim = 2;
  s.workspace.bounds = Box{Vec(-13, -7, 0), Vec(13, 7, 0)};
  s.workspace.obstacles.push_back(Sphere{vec2(-6, 1.5), 1.75});
  s.workspace.obstacles.push_back(Sphere{vec2(6, -1.5), 1.75});
  for (int k = 0; k < 2; ++k) {
    AgentSpec a;
    a.body.id = k + 1;
    a.body.position = k == 0 ? vec2(-10.5, 0) : vec2(10.5, 0);
    a.body.goal = k == 0 ? vec2(10.5, 0) : vec2(-10.5, 0);
    a.body.radius = 1.0;
    a.body.delta = 1.5;
    a.body.r_target = 1.0;
    a.prf = PrfSource::Harmonic;
    a.prf_speed = 1.0;
    s.agents.push_back(a);
  }
  s.crf = CrfParams{2.0, 1.0, 1.0, CrfMode::Unit, Circulation::Ccw, Vec(0, 0, 1), true};
  s.profile = WeightProfile{ProfileKind::Linear, 1.5, 0.05};
  s.obstacle_repulsion.enabled = true;
  s.obstacle_repulsion.kind = RepulsionKind::Boundary;
  s.obstacle_repulsion.boundary = ObstacleRepulsionParams{0.5, 2.0};
  s.sim.t_max = 120.0;
  return s;
}

/// Reconstruction: two rooms joined by a short corridor exactly as wide as
/// the sum of the two expanded radii, too narrow for the bodies to pass each
/// other.
inline ScenarioSpec tight_passage() {
  ScenarioSpec s = unknown_room();
  s.name = "case8_tight";
  s.workspace.bounds = Box{Vec(-12, -6, 0), Vec(12, 6, 0)};
  s.workspace.obstacles.clear();
  const double delta = 0.5;
  const double xi = 2.0 * (1.0 + delta);
  s.workspace.obstacles.push_back(Box{vec2(-1, xi / 2), vec2(1, 6)});
  s.workspace.obstacles.push_back(Box{vec2(-1, -6), vec2(1, -xi / 2)});
  for (int k = 0; k < 2; ++k) {
    auto& a = s.agents[k];
    a.body.position = k == 0 ? vec2(-6, 0) : vec2(6, 0);
    a.body.goal = k == 0 ? vec2(6, 0) : vec2(-6, 0);
    a.body.delta = delta;
    a.prior_knowledge = true;
  }
  s.profile.delta = delta;
  s.sim.t_max = 120.0;
  return s;
}

}  // namespace detail

/// Built-in scenario by name.
inline ScenarioSpec builtin(const std::string& name) {
  if (name == "case1") return detail::exchange_pair();
  if (name == "case2_linear") return detail::profile_variant(name, ProfileKind::Linear);
  if (name == "case2_sin") return detail::profile_variant(name, ProfileKind::Sinusoidal);
  if (name == "case2_exp") return detail::profile_variant(name, ProfileKind::Exponential);
  if (name == "case3_3d") return detail::exchange_3d();
  if (name == "case4") return detail::triangle(false);
  if (name == "case4_malfunction") return detail::triangle(true);
  if (name == "case5_lanes") return detail::lanes();
  if (name == "case6_no_circulation") return detail::cluster_crossing(false);
  if (name == "case6_circulation") return detail::cluster_crossing(true);
  if (name == "case7_unknown") return detail::unknown_room();
  if (name == "case8_tight") return detail::tight_passage();
  throw ConfigError("unknown built-in scenario '" + name + "'");
}

// ---------------------------------------------------------------------------
// JSON scenario files
// ---------------------------------------------------------------------------

namespace detail {

using nlohmann::json;

inline std::string profile_name(ProfileKind k) {
  switch (k) {
    case ProfileKind::Linear: return "linear";
    case ProfileKind::Sinusoidal: return "sin";
    case ProfileKind::Exponential: return "exp";
    case ProfileKind::Spring: return "spring";
  }
  return "spring";
}

inline json vec_json(const Vec& v, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(v[i]);
  return a;
}

/// Field accessor that reports the offending path on type errors.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  Reader child(const std::string& key) const {
    if (!has(key)) fail(key, "missing required field");
    return Reader(j_.at(key), path_ + "." + key);
  }

  Reader at(std::size_t i) const { return Reader(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }
  std::size_t size() const { return j_.is_array() ? j_.size() : 0; }
  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key) const {
    if (!has(key)) fail(key, "missing required field");
    return number(key, 0.0);
  }
  int integer(const std::string& key) const {
    if (!has(key) || !j_.at(key).is_number_integer()) fail(key, "expected an integer");
    return j_.at(key).get<int>();
  }
  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) fail(key, "expected true or false");
    return j_.at(key).get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_string()) fail(key, "expected a string");
    return j_.at(key).get<std::string>();
  }
  Vec vec(const std::string& key, int dim) const {
    if (!has(key)) fail(key, "missing required field");
    const auto& v = j_.at(key);
    if (!v.is_array() || static_cast<int>(v.size()) != dim) fail(key, "expected an array of " + std::to_string(dim) + " numbers");
    Vec out = Vec::Zero();
    for (int i = 0; i < dim; ++i) {
      if (!v[i].is_number()) fail(key, "expected numbers");
      out[i] = v[i].get<double>();
    }
    return out;
  }
  std::vector<int> ints(const std::string& key) const {
    std::vector<int> out;
    if (!has(key)) return out;
    const auto& v = j_.at(key);
    if (!v.is_array()) fail(key, "expected an array of integers");
    for (const auto& e : v) {
      if (!e.is_number_integer()) fail(key, "expected an array of integers");
      out.push_back(e.get<int>());
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("field '" + path_ + "." + key + "': " + what);
  }

 private:
  const json& j_;
  std::string path_;
};

inline ProfileKind parse_profile(const std::string& s, const Reader& r) {
  if (s == "linear") return ProfileKind::Linear;
  if (s == "sin" || s == "sinusoidal") return ProfileKind::Sinusoidal;
  if (s == "exp" || s == "exponential") return ProfileKind::Exponential;
  if (s == "spring") return ProfileKind::Spring;
  r.fail("kind", "unknown profile '" + s + "'");
}

}  // namespace detail

inline ProfileKind profile_from_string(const std::string& s) {
  nlohmann::json dummy = nlohmann::json::object();
  return detail::parse_profile(s, detail::Reader(dummy, "profile"));
}

inline std::string to_string(ProfileKind k) { return detail::profile_name(k); }

inline nlohmann::json to_json(const ScenarioSpec& s) {
  using nlohmann::json;
  using detail::vec_json;
  const int dim = s.workspace.dim;
  json j;
  j["name"] = s.name;
  json ws;
  ws["dim"] = dim;
  ws["bounds"] = {{"min", vec_json(s.workspace.bounds.lo, dim)}, {"max", vec_json(s.workspace.bounds.hi, dim)}};
  if (s.workspace.grid_h) ws["grid_h"] = *s.workspace.grid_h;
  ws["obstacles"] = json::array();
  for (const auto& o : s.workspace.obstacles) {
    if (const auto* b = std::get_if<Box>(&o)) {
      ws["obstacles"].push_back({{"type", "box"}, {"min", vec_json(b->lo, dim)}, {"max", vec_json(b->hi, dim)}});
    } else {
      const auto& sp = std::get<Sphere>(o);
      ws["obstacles"].push_back({{"type", "sphere"}, {"center", vec_json(sp.center, dim)}, {"radius", sp.radius}});
    }
  }
  j["workspace"] = ws;
  j["agents"] = json::array();
  for (const auto& a : s.agents) {
    json aj;
    aj["id"] = a.body.id;
    aj["position"] = vec_json(a.body.position, dim);
    aj["radius"] = a.body.radius;
    aj["delta"] = a.body.delta;
    if (a.body.goal) aj["goal"] = vec_json(*a.body.goal, dim);
    aj["r_target"] = a.body.r_target;
    switch (a.prf) {
      case PrfSource::SpringToGoal: aj["prf"] = {{"type", "spring"}}; break;
      case PrfSource::ConstantDrift: aj["prf"] = {{"type", "drift"}, {"velocity", vec_json(a.drift, dim)}}; break;
      case PrfSource::Harmonic:
        aj["prf"] = {{"type", "harmonic"}};
        if (a.prf_speed > 0.0) aj["prf"]["speed"] = a.prf_speed;
        break;
    }
    aj["cooperative"] = a.cooperative;
    aj["prior_knowledge"] = a.prior_knowledge;

    j["agents"].push_back(aj);
  }
  j["crf"] = {{"k_r", s.crf.k_r},
              {"k_t", s.crf.k_t},
              {"k_g", s.crf.k_g},
              {"mode", s.crf.mode == CrfMode::Unit ? "unit" : "spring"},
              {"circulation", s.crf.circulation == Circulation::Ccw ? "ccw" : "cw"},
              {"axis3d", vec_json(s.crf.axis3d, 3)},
              {"enabled", s.crf.enabled}};
  j["profile"] = {{"kind", detail::profile_name(s.profile.kind)}, {"delta", s.profile.delta}, {"beta", s.profile.beta}};
  const auto& r = s.obstacle_repulsion;
  j["obstacle_repulsion"] = {{"enabled", r.enabled},
                             {"kind", r.kind == RepulsionKind::Rails ? "rails" : "boundary"},
                             {"epsilon", r.boundary.epsilon},
                             {"amplitude", r.boundary.amplitude},
                             {"rail_gain", r.rails.gain},
                             {"rail_limit", r.rails.limit},
                             {"rail_axis", r.rails.axis}};
  j["sim"] = {{"dt", s.sim.dt},
              {"t_max", s.sim.t_max},
              {"integrator", s.sim.integrator == Integrator::Rk4 ? "rk4" : "euler"},
              {"v_eps", s.sim.v_eps},
              {"w_dead", s.sim.w_dead},
              {"collision_tol", s.sim.collision_tol},
              {"settle_time", s.sim.settle_time},
              {"solver_tol", s.sim.solver_tol}};
  if (s.success.kind == SuccessKind::GroupsPass) {
    j["success"] = {{"kind", "groups_pass"}, {"left_group", s.success.left_group}, {"right_group", s.success.right_group}};
  } else {
    j["success"] = {{"kind", "converge"}};
  }
  return j;
}

/// Scenario from a parsed document. Omitted optional fields take the
/// defaults of the corresponding structs.
inline ScenarioSpec from_json(const nlohmann::json& doc) {
  using detail::Reader;
  Reader root(doc, "$");
  if (!doc.is_object()) throw ConfigError("scenario document must be a JSON object");
  ScenarioSpec s;
  s.name = root.string("name", "scenario");

  const Reader ws = root.child("workspace");
  s.workspace.dim = root.child("workspace").integer("dim");
  const int dim = s.workspace.dim;
  if (dim != 2 && dim != 3) ws.fail("dim", "must be 2 or 3");
  const Reader bounds = ws.child("bounds");
  s.workspace.bounds = Box{bounds.vec("min", dim), bounds.vec("max", dim)};
  if (ws.has("grid_h")) s.workspace.grid_h = ws.number("grid_h");
  if (ws.has("obstacles")) {
    const Reader obs = ws.child("obstacles");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const Reader o = obs.at(i);
      const std::string type = o.string("type", "");
      if (type == "box") {
        s.workspace.obstacles.push_back(Box{o.vec("min", dim), o.vec("max", dim)});
      } else if (type == "sphere" || type == "disc") {
        s.workspace.obstacles.push_back(Sphere{o.vec("center", dim), o.number("radius")});
      } else {
        o.fail("type", "expected \"box\" or \"sphere\"");
      }
    }
  }

  const WeightProfile default_profile;
  if (root.has("profile")) {
    const Reader p = root.child("profile");
    s.profile.kind = detail::parse_profile(p.string("kind", "spring"), p);
    s.profile.delta = p.number("delta", default_profile.delta);
    s.profile.beta = p.number("beta", default_profile.beta);
    if (!(s.profile.delta > 0.0)) p.fail("delta", "must be positive");
    if (!(s.profile.beta > 0.0 && s.profile.beta < 1.0)) p.fail("beta", "must lie in (0, 1)");
  }

  const Reader agents = root.child("agents");
  if (!agents.raw().is_array()) throw ConfigError("field '$.agents': expected an array");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const Reader a = agents.at(i);
    AgentSpec spec;
    spec.body.id = a.integer("id");
    spec.body.position = a.vec("position", dim);
    spec.body.radius = a.number("radius", 1.0);
    spec.body.delta = a.number("delta", s.profile.delta);
    if (a.has("goal")) spec.body.goal = a.vec("goal", dim);
    spec.body.r_target = a.number("r_target", spec.body.radius);
    spec.cooperative = a.boolean("cooperative", true);
    spec.prior_knowledge = a.boolean("prior_knowledge", false);
    std::string type = "spring";
    if (a.has("prf")) {
      const Reader prf = a.child("prf");
      type = prf.string("type", "spring");
      if (type == "drift") spec.drift = prf.vec("velocity", dim);
      if (type == "harmonic") spec.prf_speed = prf.number("speed", 0.0);
      if (spec.prf_speed < 0.0) prf.fail("speed", "must be non-negative");
    }
    if (type == "spring") {
      spec.prf = PrfSource::SpringToGoal;
    } else if (type == "drift") {
      spec.prf = PrfSource::ConstantDrift;
    } else if (type == "harmonic") {
      spec.prf = PrfSource::Harmonic;
    } else {
      a.fail("prf.type", "expected \"spring\", \"drift\" or \"harmonic\"");
    }
    if (spec.prf != PrfSource::ConstantDrift && !spec.body.goal) a.fail("goal", "required for this purpose field");
    s.agents.push_back(spec);
  }

  const CrfParams default_crf;
  if (root.has("crf")) {
    const Reader c = root.child("crf");
    s.crf.k_r = c.number("k_r", default_crf.k_r);
    s.crf.k_t = c.number("k_t", default_crf.k_t);
    s.crf.k_g = c.number("k_g", default_crf.k_g);
    const std::string mode = c.string("mode", "spring");
    if (mode == "unit") s.crf.mode = CrfMode::Unit;
    else if (mode == "spring") s.crf.mode = CrfMode::Spring;
    else c.fail("mode", "expected \"unit\" or \"spring\"");
    const std::string circ = c.string("circulation", "ccw");
    if (circ == "ccw") s.crf.circulation = Circulation::Ccw;
    else if (circ == "cw") s.crf.circulation = Circulation::Cw;
    else c.fail("circulation", "expected \"ccw\" or \"cw\"");
    if (c.has("axis3d")) s.crf.axis3d = c.vec("axis3d", 3).normalized();
    s.crf.enabled = c.boolean("enabled", true);
    if (s.crf.k_r < 0.0) c.fail("k_r", "must be non-negative");
    if (s.crf.k_t < 0.0) c.fail("k_t", "must be non-negative");
  }

  if (root.has("obstacle_repulsion")) {
    const Reader r = root.child("obstacle_repulsion");
    auto& o = s.obstacle_repulsion;
    o.enabled = r.boolean("enabled", true);
    const std::string kind = r.string("kind", "boundary");
    if (kind == "boundary") o.kind = RepulsionKind::Boundary;
    else if (kind == "rails") o.kind = RepulsionKind::Rails;
    else r.fail("kind", "expected \"boundary\" or \"rails\"");
    o.boundary.epsilon = r.number("epsilon", o.boundary.epsilon);
    o.boundary.amplitude = r.number("amplitude", o.boundary.amplitude);
    o.rails.gain = r.number("rail_gain", o.rails.gain);
    o.rails.limit = r.number("rail_limit", o.rails.limit);
    o.rails.axis = static_cast<int>(r.number("rail_axis", o.rails.axis));
    if (!(o.boundary.epsilon > 0.0)) r.fail("epsilon", "must be positive");
    if (o.boundary.amplitude < 0.0) r.fail("amplitude", "must be non-negative");
  }

  if (root.has("sim")) {
    const Reader m = root.child("sim");
    const SimConfig d;
    s.sim.dt = m.number("dt", d.dt);
    s.sim.t_max = m.number("t_max", d.t_max);
    const std::string integ = m.string("integrator", "rk4");
    if (integ == "rk4") s.sim.integrator = Integrator::Rk4;
    else if (integ == "euler") s.sim.integrator = Integrator::Euler;
    else m.fail("integrator", "expected \"euler\" or \"rk4\"");
    s.sim.v_eps = m.number("v_eps", d.v_eps);
    s.sim.w_dead = m.number("w_dead", d.w_dead);
    s.sim.collision_tol = m.number("collision_tol", d.collision_tol);
    s.sim.settle_time = m.number("settle_time", d.settle_time);
    s.sim.solver_tol = m.number("solver_tol", d.solver_tol);
    s.sim.check();
  }

  if (root.has("success")) {
    const Reader su = root.child("success");
    const std::string kind = su.string("kind", "converge");
    if (kind == "converge") {
      s.success.kind = SuccessKind::Converge;
    } else if (kind == "groups_pass") {
      s.success.kind = SuccessKind::GroupsPass;
      s.success.left_group = su.ints("left_group");
      s.success.right_group = su.ints("right_group");
    } else {
      su.fail("kind", "expected \"converge\" or \"groups_pass\"");
    }
  }
  return s;
}

/// Reads and validates a scenario file.
inline ScenarioSpec load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  ScenarioSpec s = from_json(doc);
  const Workspace ws = s.build_workspace();
  const auto violations = validate_scenario(ws, s.bodies());
  if (!violations.empty()) {
    std::string msg = path + ": scenario failed validation:";
    for (const auto& v : violations) msg += "\n  " + v.message;
    throw ConfigError(msg);
  }
  return s;
}

/// Built-in name or path to a scenario file.
inline ScenarioSpec resolve(const std::string& ref) {
  for (const auto& n : builtin_names()) {
    if (n == ref) return builtin(ref);
  }
  return load(ref);
}

inline std::string serialize(const ScenarioSpec& s) { return to_json(s).dump(2) + "\n"; }

}  // namespace vhpf
