#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "vhpf/error.hpp"
#include "vhpf/geometry.hpp"
#include "vhpf/harmonic_field.hpp"
#include "vhpf/world.hpp"

namespace vhpf {

enum class ProfileKind { Linear, Sinusoidal, Exponential, Spring };

/// Locality envelope of the conflict-resolving field. The support starts at
/// contact distance rho and ends at rho + delta.
struct WeightProfile {
  ProfileKind kind = ProfileKind::Spring;
  double delta = 1.5;
  /// Exponential profile: value of the raw exponential at rho + delta.
  double beta = 0.05;

  WeightProfile with_delta(double d) const {
    WeightProfile p = *this;
    p.delta = d;
    return p;
  }
  bool operator==(const WeightProfile&) const = default;
};

/// sigma(r) with contact distance rho_sum. Step convention u(0) = 1.
///
/// The exponential form is shifted so it reaches exactly zero at the support
/// edge: (exp(alpha (r - rho)) - beta) / (1 - beta), alpha = ln(beta) / delta.
inline double weight_sigma(double r, double rho_sum, const WeightProfile& p) {
  if (r < rho_sum) return 0.0;
  const double x = r - rho_sum;
  switch (p.kind) {
    case ProfileKind::Linear:
    case ProfileKind::Spring:
      return x <= p.delta ? 1.0 - x / p.delta : 0.0;
    case ProfileKind::Sinusoidal:
      return x <= p.delta ? 0.5 * (std::cos(std::numbers::pi * x / p.delta) + 1.0) : 0.0;
    case ProfileKind::Exponential: {
      const double alpha = std::log(p.beta) / p.delta;
      const double raw = std::exp(alpha * x);
      return raw > p.beta ? (raw - p.beta) / (1.0 - p.beta) : 0.0;
    }
  }
  return 0.0;
}

enum class CrfMode { Unit, Spring };
enum class Circulation { Ccw, Cw };

struct CrfParams {
  double k_r = 2.0;
  double k_t = 1.0;
  /// Goal gain for spring-to-goal and harmonic purpose fields.
  double k_g = 0.4;
  CrfMode mode = CrfMode::Spring;
  Circulation circulation = Circulation::Ccw;
  Vec axis3d = Vec(0.0, 0.0, 1.0);
  bool enabled = true;
  bool operator==(const CrfParams&) const = default;
};

inline Vec radial_dir(const Vec& rel) {
  const double n = rel.norm();
  if (n == 0.0) throw CoincidentCentersError("radial direction undefined for coincident centers");
  return rel / n;
}

/// Unit circulating direction, orthogonal to rel. 2-D CCW is the +90 degree
/// rotation; 3-D uses axis3d x rel with (1,0,0) as the fallback axis.
inline Vec tangential_dir(const Vec& rel, const CrfParams& params, int dim = 2) {
  const double n = rel.norm();
  if (n == 0.0) throw CoincidentCentersError("tangential direction undefined for coincident centers");
  Vec t;
  if (dim == 2) {
    t = Vec(-rel[1], rel[0], 0.0) / n;
  } else {
    Vec c = params.axis3d.cross(rel);
    if (c.norm() < 1e-9 * n) c = Vec(1.0, 0.0, 0.0).cross(rel);
    if (c.norm() < 1e-9 * n) c = Vec(0.0, 1.0, 0.0).cross(rel);
    t = c.normalized();
  }
  return params.circulation == Circulation::Ccw ? t : Vec(-t);
}

namespace detail {

/// Deterministic direction for numerically coincident centers: a coordinate
/// axis picked by (id_i + id_j) mod dim, signed so the pair separates.
inline Vec fallback_dir(int id_i, int id_j, int dim) {
  Vec d = Vec::Zero();
  d[(id_i + id_j) % dim] = id_i < id_j ? -1.0 : 1.0;
  return d;
}

}  // namespace detail

/// Conflict-resolving contribution to agent i from agent j. The envelope
/// uses contact distance radius_i + radius_j and agent i's ring width.
inline Vec pair_force(const AgentBody& i, const AgentBody& j, const CrfParams& params, const WeightProfile& p,
                      int dim = 2) {
  if (i.id == j.id) throw ConfigError("pair force needs two distinct agents");
  const Vec rel = i.position - j.position;
  const double r = rel.norm();
  const double sigma = weight_sigma(r, i.radius + j.radius, p);
  if (sigma == 0.0) return Vec::Zero();
  Vec radial;
  Vec tangential;
  double scale = 1.0;
  if (r < 1e-12) {
    radial = detail::fallback_dir(i.id, j.id, dim);
    tangential = tangential_dir(radial, params, dim);
  } else {
    radial = rel / r;
    tangential = tangential_dir(rel, params, dim);
    if (params.mode == CrfMode::Spring) scale = r;
  }
  return sigma * scale * (params.k_r * radial + params.k_t * tangential);
}

/// Repulsion from known obstacles. Zero at clearance >= epsilon.
struct ObstacleRepulsionParams {
  double epsilon = 0.5;
  double amplitude = 2.0;
  bool operator==(const ObstacleRepulsionParams&) const = default;
};

/// Linear spring pushing back into the lane |x[axis]| <= limit.
struct RailParams {
  double gain = 30.0;
  double limit = 2.0;
  int axis = 1;
  bool operator==(const RailParams&) const = default;
};

struct Repulsion {
  Vec force = Vec::Zero();
  /// Distance from the body surface to the nearest known obstacle.
  double clearance = std::numeric_limits<double>::infinity();
  bool penetrating = false;
};

/// alpha(d) n with alpha(d) = A (1 - d/eps)^2 on [0, eps] and n the unit
/// vector from the nearest known boundary point toward x. Known cells are
/// treated as solid squares (cubes) of side h.
inline Repulsion obstacle_repulsion(const Vec& x, double radius, const Workspace& ws, const KnowledgeMap& known,
                                    const ObstacleRepulsionParams& params) {
  if (!(params.epsilon > 0.0)) throw ConfigError("repulsion influence distance must be positive");
  Repulsion out;
  if (known.cells.empty()) return out;
  const Grid& g = ws.grid();
  const int dim = ws.dim();
  double best = std::numeric_limits<double>::infinity();
  Vec nearest = x;
  const double reach = radius + params.epsilon + g.h;
  g.for_each_in_box(x, reach, [&](CellId c) {
    if (!known.knows(c)) return;
    const Vec ctr = g.center(c);
    Box cell;
    cell.lo = ctr - Vec::Constant(0.5 * g.h);
    cell.hi = ctr + Vec::Constant(0.5 * g.h);
    Vec q = x;
    for (int a = 0; a < dim; ++a) q[a] = std::clamp(x[a], cell.lo[a], cell.hi[a]);
    const double d = (x - q).norm();
    if (d < best) {
      best = d;
      nearest = q;
    }
  });
  if (!std::isfinite(best)) return out;
  const double d = best - radius;
  out.clearance = d;
  if (d >= params.epsilon) return out;
  Vec n = x - nearest;
  if (n.norm() == 0.0) return out;
  n.normalize();
  out.penetrating = d < 0.0;
  const double s = 1.0 - std::max(d, 0.0) / params.epsilon;
  out.force = params.amplitude * s * s * n;
  return out;
}

inline Vec rail_repulsion(const Vec& x, const RailParams& p) {
  Vec f = Vec::Zero();
  const double y = x[p.axis];
  const double below = -y - p.limit;
  const double above = y - p.limit;
  f[p.axis] = p.gain * ((below >= 0.0 ? below : 0.0) - (above >= 0.0 ? above : 0.0));
  return f;
}

struct CirculationCheck {
  bool ok = true;
  /// Sum of the purpose-field gradient bounds.
  double bound = 0.0;
  std::string message;
};

/// Warns when K_t is below the sum of the purpose-field gradient bounds.
inline CirculationCheck circulation_bound_check(double k_t, const std::vector<FieldStats>& stats) {
  CirculationCheck out;
  if (stats.size() < 2) return out;
  for (const auto& s : stats) out.bound += s.max_gradient;
  if (k_t < out.bound) {
    out.ok = false;
    out.message = "tangential gain " + std::to_string(k_t) + " is below the circulation bound " +
                  std::to_string(out.bound);
  }
  return out;
}

}  // namespace vhpf
