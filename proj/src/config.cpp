// SPDX-License-Identifier: Apache-2.0
#include "speccalc/config.hpp"

#include <cstdlib>
#include <thread>

#include "speccalc/errors.hpp"

namespace speccalc {

void RunConfig::validate() const {
  if (!(tol > 0.0) || !(tol < 1e-3)) throw InputError("tol must lie in (0, 1e-3)");
  if (max_panel_depth <= 0) throw InputError("max_panel_depth must be positive");
  if (nodes_per_panel <= 0) throw InputError("nodes_per_panel must be positive");
  if (truncation_K < 4) throw InputError("truncation_K must be at least 4");
  if (!(rank_gap_ratio > 1.0)) throw InputError("rank_gap_ratio must exceed 1");
}

CalculusOptions RunConfig::calculus_options() const {
  CalculusOptions o;
  o.tol = tol;
  o.max_depth = max_panel_depth;
  o.nodes_per_panel = nodes_per_panel;
  return o;
}

int thread_count() {
  int n = 0;
  if (const char* env = std::getenv("SPECCALC_THREADS")) n = std::atoi(env);
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

}  // namespace speccalc
