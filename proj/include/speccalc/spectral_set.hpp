// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "speccalc/core.hpp"

namespace speccalc {

enum class PointTag { AtomFinite, AtomInfinite, Accumulation, Infinity };

std::string to_string(PointTag tag);

struct SpectralPoint {
  Extended value;
  PointTag tag = PointTag::AtomFinite;
  /// Eigenvalue multiplicity carried by this point (0 for non-eigenvalues).
  Count multiplicity{0};
  /// Raw tail samples converging to an accumulation point. They are kept
  /// unmerged so that images under a function stay comparable.
  std::vector<Complex> approach;
};

/// Finite symbolic subset of the Riemann sphere. Points closer than
/// kMergeTol are merged on insertion.
class SpectralSet {
public:
  SpectralSet() = default;

  void add(SpectralPoint point);
  void add_atom(Complex value, Count multiplicity);
  void add_accumulation(Complex value, std::vector<Complex> approach = {});
  void add_infinity();

  const std::vector<SpectralPoint>& points() const { return points_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  bool includes_infinity() const;

  /// True if some point lies within tol of value.
  bool contains(const Extended& value, double tol = kMergeTol) const;
  /// True if value is covered by a point or by an approach sample.
  bool covers(const Extended& value, double tol) const;

  const SpectralPoint* find(const Extended& value, double tol = kMergeTol) const;
  std::vector<Complex> finite_values() const;

  /// Largest modulus over finite points (0 when there are none).
  double max_modulus() const;

private:
  std::vector<SpectralPoint> points_;
};

enum class SetRelation { Equal, LhsSubset, RhsSubset, Incomparable };

std::string to_string(SetRelation relation);

/// Compares the point sets up to tol, ignoring tags.
SetRelation compare_sets(const SpectralSet& lhs, const SpectralSet& rhs, double tol);

}  // namespace speccalc
