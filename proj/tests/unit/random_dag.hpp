#pragma once

#include <random>
#include <string>

#include "spillover/sem_graph.hpp"

namespace spillover::testing {

// Random DAG over 3..7 nodes: forward edges with probability 0.4,
// coefficients in +-[0.1, 2], noise variances in [0.5, 2].
inline ModelSpec random_dag(std::mt19937_64& gen, int min_nodes = 3, int max_nodes = 7) {
  std::uniform_int_distribution<int> size(min_nodes, max_nodes);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = size(gen);
  ModelSpec spec;
  for (int i = 0; i < n; ++i)
    spec.variables.push_back({"X" + std::to_string(i), VariableKind::outcome, 0.5 + 1.5 * unit(gen)});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (unit(gen) < 0.4) {
        const double magnitude = 0.1 + 1.9 * unit(gen);
        const double c = unit(gen) < 0.5 ? -magnitude : magnitude;
        spec.edges.push_back({"X" + std::to_string(i), "X" + std::to_string(j), c,
                              "b" + std::to_string(i) + "_" + std::to_string(j)});
      }
  return spec;
}

} // namespace spillover::testing
