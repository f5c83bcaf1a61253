#pragma once

#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vhpf/error.hpp"
#include "vhpf/scenario_spec.hpp"
#include "vhpf/sim_engine.hpp"

namespace vhpf {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline std::string trajectory_header(int dim) {
  return dim == 3 ? "t,agent_id,x,y,z,ux,uy,uz,sigma_activity" : "t,agent_id,x,y,ux,uy,sigma_activity";
}

/// Rows ordered by tick, then by agent id.
inline void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log) {
  os << trajectory_header(log.dim) << '\n';
  for (std::size_t k = 0; k < log.ticks(); ++k) {
    for (std::size_t i = 0; i < log.ids.size(); ++i) {
      const auto& s = log.samples[i][k];
      os << format_double(s.t) << ',' << log.ids[i];
      for (int a = 0; a < log.dim; ++a) os << ',' << format_double(s.x[a]);
      for (int a = 0; a < log.dim; ++a) os << ',' << format_double(s.u[a]);
      os << ',' << format_double(s.sigma_activity) << '\n';
    }
  }
}

struct TrajectoryRow {
  double t = 0.0;
  int agent_id = 0;
  Vec x = Vec::Zero();
  Vec u = Vec::Zero();
  double sigma_activity = 0.0;
};

struct TrajectoryTable {
  int dim = 2;
  std::vector<TrajectoryRow> rows;
};

inline TrajectoryTable read_trajectory_csv(std::istream& is) {
  TrajectoryTable out;
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("trajectory file is empty");
  if (line == trajectory_header(3)) {
    out.dim = 3;
  } else if (line != trajectory_header(2)) {
    throw ConfigError("unrecognized trajectory header '" + line + "'");
  }
  const std::size_t fields = static_cast<std::size_t>(3 + 2 * out.dim);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw ConfigError("trajectory line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      vals.push_back(v);
    }
    if (vals.size() != fields) throw ConfigError("trajectory line " + std::to_string(lineno) + ": wrong field count");
    TrajectoryRow row;
    row.t = vals[0];
    row.agent_id = static_cast<int>(vals[1]);
    for (int a = 0; a < out.dim; ++a) {
      row.x[a] = vals[2 + a];
      row.u[a] = vals[2 + out.dim + a];
    }
    row.sigma_activity = vals.back();
    out.rows.push_back(row);
  }
  return out;
}

inline nlohmann::json events_json(const TrajectoryLog& log) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : log.events) {
    nlohmann::json ej = {{"t", e.t}, {"kind", to_string(e.kind)}};
    if (e.agent >= 0) ej["agent"] = e.agent;
    if (e.other >= 0) ej["other"] = e.other;
    if (e.kind == EventKind::Discovery) ej["new_cells"] = e.count;
    if (!e.detail.empty()) ej["detail"] = e.detail;
    j.push_back(ej);
  }
  return j;
}

inline nlohmann::json metrics_json(const RunResult& r) {
  const auto& m = r.metrics;
  nlohmann::json j;
  j["outcome"] = to_string(r.log.outcome);
  j["termination"] = to_string(r.log.termination);
  j["t_end"] = r.log.t_end;
  j["v_eps"] = r.log.v_eps;
  j["agents"] = nlohmann::json::array();
  for (std::size_t i = 0; i < m.ids.size(); ++i) {
    j["agents"].push_back({{"id", m.ids[i]},
                           {"kappa_max", m.kappa_max[i]},
                           {"kappa_degenerate", static_cast<bool>(m.kappa_degenerate[i])},
                           {"path_length", m.path_length[i]}});
  }
  j["min_pair_clearance"] = m.min_pair_clearance ? nlohmann::json(*m.min_pair_clearance) : nlohmann::json(nullptr);
  j["min_obstacle_clearance"] =
      m.min_obstacle_clearance ? nlohmann::json(*m.min_obstacle_clearance) : nlohmann::json(nullptr);
  if (m.xi_available) {
    j["xi_initial"] = m.xi_initial;
    j["xi_final"] = m.xi_final;
  } else {
    j["xi_initial"] = nullptr;
    j["xi_final"] = nullptr;
  }
  j["warnings"] = r.warnings;
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

inline const char* agent_color(int id) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};
  const int n = static_cast<int>(std::size(palette));
  return palette[((id % n) + n) % n];
}

struct PlotData {
  ScenarioSpec spec;
  std::vector<int> ids;
  /// paths[i] is the xy polyline of agent ids[i].
  std::vector<std::vector<Vec>> paths;
};

inline PlotData plot_data(const ScenarioSpec& spec, const TrajectoryLog& log) {
  PlotData d{spec, log.ids, {}};
  for (const auto& series : log.samples) {
    std::vector<Vec> p;
    for (const auto& s : series) p.push_back(s.x);
    d.paths.push_back(std::move(p));
  }
  return d;
}

inline PlotData plot_data(const ScenarioSpec& spec, const TrajectoryTable& table) {
  PlotData d{spec, {}, {}};
  for (const auto& row : table.rows) {
    std::size_t i = 0;
    while (i < d.ids.size() && d.ids[i] != row.agent_id) ++i;
    if (i == d.ids.size()) {
      d.ids.push_back(row.agent_id);
      d.paths.emplace_back();
    }
    d.paths[i].push_back(row.x);
  }
  return d;
}

/// Top-down (x, y) drawing of the workspace and trajectories. The output is
/// a pure function of the input.
inline std::string render_svg(const PlotData& d) {
  const Box& b = d.spec.workspace.bounds;
  const double w = b.hi[0] - b.lo[0];
  const double h = b.hi[1] - b.lo[1];
  const double px = 800.0 / std::max(w, h);
  const double margin = 20.0;
  const double width = w * px + 2 * margin;
  const double height = h * px + 2 * margin + 30.0;
  auto X = [&](double x) { return format_double(std::round((margin + (x - b.lo[0]) * px) * 100.0) / 100.0); };
  auto Y = [&](double y) { return format_double(std::round((margin + (b.hi[1] - y) * px) * 100.0) / 100.0); };
  auto L = [&](double l) { return format_double(std::round(l * px * 100.0) / 100.0); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(std::round(width)) << "\" height=\""
     << format_double(std::round(height)) << "\">\n";
  os << "<rect x=\"" << X(b.lo[0]) << "\" y=\"" << Y(b.hi[1]) << "\" width=\"" << L(w) << "\" height=\"" << L(h)
     << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (const auto& o : d.spec.workspace.obstacles) {
    if (const auto* box = std::get_if<Box>(&o)) {
      os << "<rect x=\"" << X(box->lo[0]) << "\" y=\"" << Y(box->hi[1]) << "\" width=\"" << L(box->hi[0] - box->lo[0])
         << "\" height=\"" << L(box->hi[1] - box->lo[1]) << "\" fill=\"#999999\"/>\n";
    } else {
      const auto& s = std::get<Sphere>(o);
      os << "<circle cx=\"" << X(s.center[0]) << "\" cy=\"" << Y(s.center[1]) << "\" r=\"" << L(s.radius)
         << "\" fill=\"#999999\"/>\n";
    }
  }
  for (std::size_t i = 0; i < d.ids.size(); ++i) {
    const int id = d.ids[i];
    const char* color = agent_color(id);
    const auto& path = d.paths[i];
    if (path.empty()) continue;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < path.size(); ++k) os << (k ? " " : "") << X(path[k][0]) << ',' << Y(path[k][1]);
    os << "\"/>\n";
    double radius = 1.0;
    const AgentSpec* spec = nullptr;
    for (const auto& a : d.spec.agents)
      if (a.body.id == id) spec = &a;
    if (spec) radius = spec->body.radius;
    os << "<rect x=\"" << X(path.front()[0] - 0.25) << "\" y=\"" << Y(path.front()[1] + 0.25) << "\" width=\""
       << L(0.5) << "\" height=\"" << L(0.5) << "\" fill=\"" << color << "\"/>\n";
    if (spec && spec->body.goal) {
      const Vec& g = *spec->body.goal;
      os << "<circle cx=\"" << X(g[0]) << "\" cy=\"" << Y(g[1]) << "\" r=\"" << L(spec->body.r_target)
         << "\" fill=\"none\" stroke=\"" << color << "\" stroke-dasharray=\"4 3\"/>\n";
    }
    os << "<circle cx=\"" << X(path.back()[0]) << "\" cy=\"" << Y(path.back()[1]) << "\" r=\"" << L(radius)
       << "\" fill=\"" << color << "\" fill-opacity=\"0.35\" stroke=\"" << color << "\"/>\n";
  }
  const double bar = std::pow(10.0, std::floor(std::log10(std::max(w, h) / 4.0)));
  const double ybar = margin + h * px + 18.0;
  os << "<line x1=\"" << X(b.lo[0]) << "\" y1=\"" << format_double(ybar) << "\" x2=\"" << X(b.lo[0] + bar)
     << "\" y2=\"" << format_double(ybar) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  os << "<text x=\"" << X(b.lo[0] + bar + 0.3) << "\" y=\"" << format_double(ybar + 4.0)
     << "\" font-family=\"monospace\" font-size=\"12\">" << format_double(bar) << " units</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace vhpf
