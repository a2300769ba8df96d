// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace speccalc {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (exact for polynomials of degree 2n-1).
/// Rules are cached per thread.
const GaussRule& gauss_legendre(int n);

}  // namespace speccalc
