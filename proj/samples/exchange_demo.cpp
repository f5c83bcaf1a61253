// Two agents swap places; prints the outcome and the closest approach.

#include <iostream>

#include "vhpf/vhpf.hpp"

int main() {
  vhpf::ScenarioSpec spec = vhpf::builtin("case1");
  const vhpf::RunResult r = vhpf::run(spec);

  std::cout << spec.name << ": " << vhpf::to_string(r.log.outcome) << " after " << r.log.t_end << " time units\n";
  for (std::size_t i = 0; i < r.metrics.ids.size(); ++i) {
    const auto& last = r.log.samples[i].back();
    std::cout << "  agent " << r.metrics.ids[i] << " ends at (" << last.x[0] << ", " << last.x[1]
              << "), path length " << r.metrics.path_length[i] << ", max curvature " << r.metrics.kappa_max[i] << "\n";
  }
  if (r.metrics.min_pair_clearance) std::cout << "  closest body gap " << *r.metrics.min_pair_clearance << "\n";
  return r.log.outcome == vhpf::Outcome::Converged ? 0 : 1;
}
