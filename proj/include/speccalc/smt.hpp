// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <vector>

#include "speccalc/calculus.hpp"
#include "speccalc/fredholm.hpp"

namespace speccalc {

enum class Verdict { Equal, LhsSubset, RhsSubset, Violation, Skipped };
enum class Expectation { Equal, LhsSubset, RhsSubset, Unknown };

std::string to_string(Verdict v);
std::string to_string(Expectation e);

/// Relation the mapping theorem predicts between f(σ̃_i(A)) and σ̃_i(f(A)).
Expectation expected_relation(int i);

struct SMTEntry {
  int index = 0;
  SpectralSet lhs;
  SpectralSet rhs;
  Verdict verdict = Verdict::Skipped;
  Expectation expected = Expectation::Unknown;
  std::string note;
};

struct SMTReport {
  std::vector<SMTEntry> entries;
  /// Violations where the expectation is known.
  int violations() const;
};

inline constexpr double kSetTol = 1e-8;

/// f(S): atoms by value, accumulation points and ∞ by declared limits.
SpectralSet image_under_f(const SpectralSet& s, const MeromFn& f, double omega);

SMTReport verify_smt(const OperatorModel& op, const MeromFn& f, const std::set<int>& indices,
                     const CalculusOptions& opts = {});

struct PointSpectrumReport {
  bool forward = false;
  bool backward = false;
  /// Condition (P) held, so equality was also required for backward.
  bool condition_p = false;
  double transport_error = 0.0;
};

/// Point spectrum σ_p(A) as a set of finite eigenvalues.
SpectralSet point_spectrum(const OperatorModel& op);

PointSpectrumReport verify_point_spectrum(const OperatorModel& op, const MeromFn& f,
                                          const CalculusOptions& opts = {});

struct FactorizationReport {
  bool ok = false;
  double residual = 0.0;
  /// Points λ_j with f(λ_j) = μ and their orders.
  std::vector<Pole> zeros;
  /// Lemma check: f(A) − μ ∈ Φ_i implies λ_j − A ∈ Φ_i for all j, i.
  bool profiles_consistent = true;
};

/// Checks f(A) − μ = r(A) g(A) with r = ∏((λ_j − z)/(b − z))^{n_j}.
FactorizationReport verify_factorization(const OperatorModel& op, const MeromFn& f, Complex mu,
                                         const CalculusOptions& opts = {});

/// σ̃_i(f(A)) = σ̃_i(f(A_Λ)) for Λ = σ̃(A) ∖ (M_A ∖ σ̃_i(A)), sampled over a few f.
bool verify_projection_reduction(const OperatorModel& op, int i, const CalculusOptions& opts = {});

}  // namespace speccalc
