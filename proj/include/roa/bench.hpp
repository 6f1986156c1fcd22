#pragma once

// The four benchmark systems with their published run configurations: round
// tables, shape matrices and angles, verification boxes, and integration
// parameters sized to each system's slowest mode.

#include <string>
#include <vector>

#include "roa/kernels.hpp"
#include "roa/verify.hpp"
#include "roa/vsiter.hpp"

namespace roa::bench {

struct BenchmarkPreset {
  std::string name;
  DynamicalSystem system;
  std::vector<RoundConfig> rounds;
  IterationConfig iteration;
  Box box;
  kernels::SimParams sim;
  // Known non-members of the origin's region of attraction (saddles, other
  // attractors); estimates must exclude them.
  std::vector<std::vector<double>> excluded_points;
  std::string notes;

  explicit BenchmarkPreset(int nvars) : iteration(IterationConfig::defaults(nvars)) {}
};

// Preset names, in listing order: vdp, ex2, ex3, ex4.
const std::vector<std::string>& names();

// Throws std::invalid_argument for unknown names.
BenchmarkPreset get(const std::string& name);

struct Summary {
  std::string name;
  int nvars = 0;
  int rounds = 0;
  std::string notes;
};
std::vector<Summary> list();

// The coupled system's nonzero equilibrium in closed form; the commonly
// quoted (1.45, 18.17) is this point rounded.
std::vector<double> ex3_saddle();

}  // namespace roa::bench
