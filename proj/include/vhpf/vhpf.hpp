#pragma once

#include "vhpf/controller.hpp"
#include "vhpf/error.hpp"
#include "vhpf/geometry.hpp"
#include "vhpf/grid.hpp"
#include "vhpf/harmonic_field.hpp"
#include "vhpf/interaction_field.hpp"
#include "vhpf/io.hpp"
#include "vhpf/parallel.hpp"
#include "vhpf/scenario_spec.hpp"
#include "vhpf/scenarios.hpp"
#include "vhpf/sim_engine.hpp"
#include "vhpf/world.hpp"
