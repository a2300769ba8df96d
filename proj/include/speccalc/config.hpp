// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "speccalc/calculus.hpp"

namespace speccalc {

struct RunConfig {
  double tol = 1e-9;
  int max_panel_depth = 12;
  int nodes_per_panel = 8;
  /// Number of enumerated tail elements for diagonal models.
  int truncation_K = kDefaultHorizon;
  double rank_gap_ratio = 10.0;
  std::uint64_t seed = 20240917;
  std::string output_dir = ".";

  /// Throws InputError when a field is out of range.
  void validate() const;
  CalculusOptions calculus_options() const;
};

/// Worker count from SPECCALC_THREADS (0 or unset means hardware concurrency).
int thread_count();

}  // namespace speccalc
