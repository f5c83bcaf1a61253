// vhpf: run scenarios, sweep the ring width, and plot trajectories.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vhpf/vhpf.hpp"

namespace fs = std::filesystem;
using namespace vhpf;

namespace {

enum Exit : int { kOk = 0, kIo = 1, kDeadlock = 2, kCollision = 3, kTimeout = 4, kConfig = 5 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::Converged: return kOk;
    case Outcome::Deadlock: return kDeadlock;
    case Outcome::Collision: return kCollision;
    case Outcome::Timeout: return kTimeout;
  }
  return kIo;
}

struct Overrides {
  std::optional<double> dt, tmax, kt, kr, delta, grid_h;
  std::optional<std::string> integrator, profile;
  bool no_crf = false;
  bool no_uo = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--dt", dt, "Integration step");
    cmd->add_option("--tmax", tmax, "Time horizon");
    cmd->add_option("--integrator", integrator, "euler or rk4")->check(CLI::IsMember({"euler", "rk4"}));
    cmd->add_option("--profile", profile, "Weight profile")->check(CLI::IsMember({"linear", "sin", "exp", "spring"}));
    cmd->add_option("--kt", kt, "Tangential gain K_t");
    cmd->add_option("--kr", kr, "Radial gain K_r");
    cmd->add_option("--delta", delta, "Ring width for every agent");
    cmd->add_option("--grid-h", grid_h, "Workspace lattice spacing");
    cmd->add_flag("--no-crf", no_crf, "Disable the conflict-resolving field");
    cmd->add_flag("--no-uo", no_uo, "Disable obstacle repulsion");
  }

  void apply(ScenarioSpec& s) const {
    if (dt) s.sim.dt = *dt;
    if (tmax) s.sim.t_max = *tmax;
    if (integrator) s.sim.integrator = *integrator == "euler" ? Integrator::Euler : Integrator::Rk4;
    if (profile) s.profile.kind = profile_from_string(*profile);
    if (kt) s.crf.k_t = *kt;
    if (kr) s.crf.k_r = *kr;
    if (delta) set_delta(s, *delta);
    if (grid_h) s.workspace.grid_h = *grid_h;
    if (no_crf) s.crf.enabled = false;
    if (no_uo) s.obstacle_repulsion.enabled = false;
    s.sim.check();
  }

  static void set_delta(ScenarioSpec& s, double delta) {
    if (!(delta > 0.0)) throw ConfigError("ring width must be positive");
    s.profile.delta = delta;
    for (auto& a : s.agents) a.body.delta = delta;
  }
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

void write_file(const fs::path& path, const std::string& text) {
  try {
    write_text(path.string(), text);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

int cmd_run(const std::string& ref, const Overrides& ov, const std::string& out) {
  ScenarioSpec spec = resolve(ref);
  ov.apply(spec);
  const RunResult r = Simulation(spec).run();

  const fs::path dir(out);
  ensure_dir(dir);
  std::ostringstream csv;
  write_trajectory_csv(csv, r.log);
  write_file(dir / "trajectory.csv", csv.str());
  write_file(dir / "events.json", events_json(r.log).dump(2) + "\n");
  write_file(dir / "metrics.json", metrics_json(r).dump(2) + "\n");
  write_file(dir / "trajectory.svg", render_svg(plot_data(spec, r.log)));

  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << spec.name << ": " << to_string(r.log.outcome) << " at t=" << r.log.t_end << "\n";
  return exit_code(r.log.outcome);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ConfigError("bad number '" + item + "' in list");
    out.push_back(v);
  }
  return out;
}

struct SweepRow {
  std::string profile;
  double delta = 0.0;
  double kappa_max = 0.0;
};

int cmd_sweep_delta(const std::string& ref, const std::string& deltas_text, const std::string& profiles_text,
                    const Overrides& ov, const std::string& out) {
  ScenarioSpec base = resolve(ref);
  ov.apply(base);
  if (base.agents.size() != 2) throw ConfigError("delta sweep needs a two-agent exchange scenario");
  const auto deltas = parse_list(deltas_text);
  if (deltas.empty()) throw ConfigError("delta list is empty");
  std::vector<std::string> profiles;
  {
    std::stringstream ss(profiles_text);
    std::string p;
    while (std::getline(ss, p, ',')) {
      if (p.empty()) continue;
      profile_from_string(p);
      profiles.push_back(p);
    }
  }
  if (profiles.empty()) throw ConfigError("profile list is empty");

  std::vector<ScenarioSpec> specs;
  std::vector<SweepRow> rows;
  for (const auto& p : profiles) {
    for (double d : deltas) {
      ScenarioSpec s = base;
      s.profile.kind = profile_from_string(p);
      Overrides::set_delta(s, d);
      const Workspace ws = s.build_workspace();
      const auto violations = validate_scenario(ws, s.bodies());
      if (!violations.empty()) throw ConfigError("sweep run (" + p + ", " + format_double(d) + "): " + violations[0].message);
      specs.push_back(std::move(s));
      rows.push_back({p, d, 0.0});
    }
  }

  std::vector<std::string> errors(specs.size());
  WorkerPool pool(thread_count_from_env());
  pool.run(specs.size(), [&](std::size_t i) {
    try {
      const RunResult r = Simulation(specs[i], 0).run();
      rows[i].kappa_max = *std::max_element(r.metrics.kappa_max.begin(), r.metrics.kappa_max.end());
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) throw ConfigError(e);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.profile != b.profile ? a.profile < b.profile : a.delta < b.delta;
  });

  std::ostringstream csv;
  csv << "profile,delta,kappa_max\n";
  for (const auto& r : rows) csv << r.profile << ',' << format_double(r.delta) << ',' << format_double(r.kappa_max) << '\n';
  const fs::path dir(out);
  ensure_dir(dir);
  write_file(dir / "sweep_delta.csv", csv.str());
  std::cout << csv.str();
  return kOk;
}

int cmd_plot(const std::string& csv_path, const std::string& ref, const std::string& out) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open '" + csv_path + "'");
  const TrajectoryTable table = read_trajectory_csv(in);
  const ScenarioSpec spec = resolve(ref);
  if (table.dim != spec.workspace.dim) throw ConfigError("trajectory dimension does not match the workspace");
  const fs::path target(out);
  if (target.has_parent_path()) ensure_dir(target.parent_path());
  write_file(target, render_svg(plot_data(spec, table)));
  return kOk;
}

int cmd_audit(const std::string& ref) {
  const ScenarioSpec spec = resolve(ref);
  const Workspace ws = spec.build_workspace();
  const auto bodies = spec.bodies();
  const auto violations = validate_scenario(ws, bodies);
  for (const auto& v : violations) std::cout << "invalid: " << v.message << "\n";
  if (!ws.obstacles().empty() && !bodies.empty()) {
    const auto report = passage_width_audit(ws, passage_width_for(bodies));
    std::cout << "passage width " << format_double(report.xi) << ": " << report.violating.size()
              << " violating free cells\n";
  } else {
    std::cout << "passage width: no obstacles\n";
  }
  return violations.empty() ? kOk : kConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent vector-harmonic potential field navigation"};
  app.require_subcommand(1);

  Overrides run_ov;
  std::string run_ref;
  std::string run_out = "out";
  auto* run = app.add_subcommand("run", "Run a scenario and write trajectory, events, metrics and plot");
  run->add_option("scenario", run_ref, "Built-in name or scenario file")->required();
  run->add_option("--out", run_out, "Output directory");
  run_ov.add_to(run);

  Overrides sweep_ov;
  std::string sweep_ref;
  std::string sweep_out = "out";
  std::string sweep_deltas = "0.5,1.0,1.5,2.0,2.5,3.0";
  std::string sweep_profiles = "linear,sin,exp";
  auto* sweep = app.add_subcommand("sweep-delta", "Maximum curvature as a function of ring width");
  sweep->add_option("scenario", sweep_ref, "Two-agent exchange scenario")->required();
  sweep->add_option("--deltas", sweep_deltas, "Comma-separated ring widths");
  sweep->add_option("--profiles", sweep_profiles, "Comma-separated profiles");
  sweep->add_option("--out", sweep_out, "Output directory");
  sweep_ov.add_to(sweep);

  std::string plot_csv;
  std::string plot_ref;
  std::string plot_out = "trajectory.svg";
  auto* plot = app.add_subcommand("plot", "Render a trajectory CSV over its workspace as SVG");
  plot->add_option("csv", plot_csv, "Trajectory CSV")->required();
  plot->add_option("scenario", plot_ref, "Scenario the trajectory belongs to")->required();
  plot->add_option("--out", plot_out, "SVG file to write");

  std::string audit_ref;
  auto* audit = app.add_subcommand("audit", "Validate a scenario and report the passage-width audit");
  audit->add_option("scenario", audit_ref, "Built-in name or scenario file")->required();

  std::string export_ref;
  auto* exp = app.add_subcommand("export", "Print a scenario as JSON");
  exp->add_option("scenario", export_ref, "Built-in name or scenario file")->required();

  app.add_subcommand("list", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(run_ref, run_ov, run_out);
    if (*sweep) return cmd_sweep_delta(sweep_ref, sweep_deltas, sweep_profiles, sweep_ov, sweep_out);
    if (*plot) return cmd_plot(plot_csv, plot_ref, plot_out);
    if (*audit) return cmd_audit(audit_ref);
    if (*exp) {
      std::cout << serialize(resolve(export_ref));
      return kOk;
    }
    for (const auto& n : builtin_names()) std::cout << n << "\n";
    return kOk;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
}
