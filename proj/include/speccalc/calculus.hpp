// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "speccalc/function.hpp"
#include "speccalc/operators.hpp"

namespace speccalc {

struct CalculusOptions {
  double tol = 1e-9;
  int max_depth = 12;
  int nodes_per_panel = 8;
  bool check_independence = true;
  /// Base point b; defaults to a + 1.
  std::optional<Complex> b;
};

struct QuadratureReport {
  int panels = 0;
  int nodes = 0;
  double tail_estimate = 0.0;
  int refinement_steps = 0;
};

struct CalculusResult {
  OperatorModel op;
  bool bounded = true;
  /// Regularizer e; empty for the primary calculus.
  std::optional<RationalFactors> regularizer;
  QuadratureReport report;
  /// Difference to the result computed with e·1/(b−z) (regularized path only).
  std::optional<double> independence_error;
  std::vector<std::string> warnings;
};

Complex default_base_point(const OperatorModel& op);

/// r(A) for a rational r; negative powers are LU solves.
Matrix apply_rational(const RationalFactors& r, const Matrix& a);

/// Primary calculus on E(A).
CalculusResult apply_primary(const MeromFn& f, const OperatorModel& op, const CalculusOptions& opts = {});

/// f(A) := e(A)^{-1} (ef)(A) with the default regularizer.
CalculusResult apply_regularized(const MeromFn& f, const OperatorModel& op, const CalculusOptions& opts = {});

/// f(A) with a caller-supplied regularizer.
CalculusResult apply_with_regularizer(const MeromFn& f, const RationalFactors& e, const OperatorModel& op,
                                      const CalculusOptions& opts = {});

/// Contour used for f0(A) on a dense operator.
ContourPath calculus_contour(const MeromFn& f, const DenseOperator& op, int nodes_per_panel = 8);

/// Value f takes on the spectral point λ of a diagonal model: declared
/// limits at ±a and ∞, evaluation elsewhere.
Extended scalar_image(const MeromFn& f, const Extended& lambda, double omega);

using Selector = std::function<bool(const SpectralPoint&)>;

struct ProjectionResult {
  OperatorModel projector;
  SpectralSet lambda_set;
  bool complement_rank_finite = true;
  /// Selection per dense eigenvalue cluster, or per diagonal atom and tail.
  std::vector<bool> selected_clusters;
  std::vector<bool> selected_atoms;
  std::vector<bool> selected_tails;
};

ProjectionResult spectral_projection(const OperatorModel& op, const Selector& selector);
OperatorModel restrict_to_projection(const OperatorModel& op, const ProjectionResult& proj);

}  // namespace speccalc
