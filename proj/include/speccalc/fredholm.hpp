// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>

#include "speccalc/operators.hpp"
#include "speccalc/spectral_set.hpp"

namespace speccalc {

inline constexpr double kRankGapRatio = 10.0;

struct FredholmProfile {
  Count nul;
  Count def;
  Count ascent;
  Count descent;
  bool range_closed = true;
  bool range_complemented = true;
  bool kernel_complemented = true;

  friend bool operator==(const FredholmProfile&, const FredholmProfile&) = default;
};

std::string to_string(const FredholmProfile& p);

struct PhiMembership {
  std::array<bool, 10> member{};

  bool operator[](int i) const { return member.at(static_cast<std::size_t>(i)); }
  friend bool operator==(const PhiMembership&, const PhiMembership&) = default;
  /// Digits 0..9 of the classes that contain the operator, e.g. "0123456789".
  std::string to_string() const;
};

/// Edges of the inclusion diagram between the classes, as (sub, super).
const std::vector<std::pair<int, int>>& phi_inclusions();
bool respects_inclusions(const PhiMembership& m);

/// Profile of the matrix T itself. Rank thresholds use max(σ_max(T), scale).
FredholmProfile matrix_profile(const Matrix& t, double gap_ratio = kRankGapRatio, double scale = 0.0);

/// Profile of μ − A.
FredholmProfile profile(const DenseOperator& op, Complex mu, double gap_ratio = kRankGapRatio);
FredholmProfile profile(const DiagonalModel& op, Complex mu);
FredholmProfile profile(const OperatorModel& op, Complex mu, double gap_ratio = kRankGapRatio);

PhiMembership classify(const FredholmProfile& p);

/// Point of ρ(A) used to decide whether ∞ belongs to an extended spectrum.
Complex resolvent_point(const OperatorModel& op);

/// σ̃_i(A) for i in 0..9.
SpectralSet extended_spectrum(const OperatorModel& op, int i, double gap_ratio = kRankGapRatio);

/// Whether μ − A and (μ − A)(b − A)^{-1} have the same class memberships.
bool resolvent_transfer_check(const OperatorModel& op, Complex mu, Complex b);

/// Memberships of (μ − A)(b − A)^{-1}.
PhiMembership transformed_membership(const OperatorModel& op, Complex mu, Complex b);

}  // namespace speccalc
