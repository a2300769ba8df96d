// SPDX-License-Identifier: Apache-2.0
#include "speccalc/spectral_set.hpp"

#include <algorithm>
#include <cstdio>

namespace speccalc {

bool Extended::near(const Extended& other, double tol) const {
  if (infinite_ || other.infinite_) return infinite_ == other.infinite_;
  return is_close(value_, other.value_, tol);
}

std::string Extended::to_string() const {
  if (infinite_) return "inf";
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.12g%+.12gi", value_.real(), value_.imag());
  return buf;
}

std::string to_string(PointTag tag) {
  switch (tag) {
    case PointTag::AtomFinite: return "atom_finite";
    case PointTag::AtomInfinite: return "atom_infinite";
    case PointTag::Accumulation: return "accumulation";
    case PointTag::Infinity: return "infinity";
  }
  return "?";
}

std::string to_string(SetRelation relation) {
  switch (relation) {
    case SetRelation::Equal: return "Equal";
    case SetRelation::LhsSubset: return "LhsSubset";
    case SetRelation::RhsSubset: return "RhsSubset";
    case SetRelation::Incomparable: return "Incomparable";
  }
  return "?";
}

void SpectralSet::add(SpectralPoint point) {
  for (auto& existing : points_) {
    if (!existing.value.near(point.value, kMergeTol)) continue;
    existing.multiplicity = existing.multiplicity + point.multiplicity;
    if (existing.tag == PointTag::Infinity || point.tag == PointTag::Infinity) {
      existing.tag = PointTag::Infinity;
    } else if (existing.tag == PointTag::Accumulation || point.tag == PointTag::Accumulation) {
      existing.tag = PointTag::Accumulation;
    } else if (existing.multiplicity.is_infinite()) {
      existing.tag = PointTag::AtomInfinite;
    }
    existing.approach.insert(existing.approach.end(), point.approach.begin(),
                             point.approach.end());
    return;
  }
  if (point.tag == PointTag::AtomFinite && point.multiplicity.is_infinite()) {
    point.tag = PointTag::AtomInfinite;
  }
  points_.push_back(std::move(point));
}

void SpectralSet::add_atom(Complex value, Count multiplicity) {
  add({Extended(value),
       multiplicity.is_infinite() ? PointTag::AtomInfinite : PointTag::AtomFinite,
       multiplicity,
       {}});
}

void SpectralSet::add_accumulation(Complex value, std::vector<Complex> approach) {
  add({Extended(value), PointTag::Accumulation, Count(0), std::move(approach)});
}

void SpectralSet::add_infinity() {
  add({Extended::infinity(), PointTag::Infinity, Count(0), {}});
}

bool SpectralSet::includes_infinity() const {
  return std::any_of(points_.begin(), points_.end(),
                     [](const SpectralPoint& p) { return p.value.is_infinite(); });
}

const SpectralPoint* SpectralSet::find(const Extended& value, double tol) const {
  for (const auto& p : points_) {
    if (p.value.near(value, tol)) return &p;
  }
  return nullptr;
}

bool SpectralSet::contains(const Extended& value, double tol) const {
  return find(value, tol) != nullptr;
}

bool SpectralSet::covers(const Extended& value, double tol) const {
  if (contains(value, tol)) return true;
  if (value.is_infinite()) return false;
  const Complex z = value.value();
  for (const auto& p : points_) {
    for (const Complex& s : p.approach) {
      if (is_close(s, z, tol)) return true;
    }
  }
  return false;
}

std::vector<Complex> SpectralSet::finite_values() const {
  std::vector<Complex> out;
  for (const auto& p : points_) {
    if (p.value.is_finite()) out.push_back(p.value.value());
  }
  return out;
}

double SpectralSet::max_modulus() const {
  double m = 0.0;
  for (const auto& p : points_) {
    if (p.value.is_finite()) m = std::max(m, std::abs(p.value.value()));
  }
  return m;
}

SetRelation compare_sets(const SpectralSet& lhs, const SpectralSet& rhs, double tol) {
  const bool lhs_in_rhs = std::all_of(lhs.points().begin(), lhs.points().end(),
                                      [&](const SpectralPoint& p) { return rhs.covers(p.value, tol); });
  const bool rhs_in_lhs = std::all_of(rhs.points().begin(), rhs.points().end(),
                                      [&](const SpectralPoint& p) { return lhs.covers(p.value, tol); });
  if (lhs_in_rhs && rhs_in_lhs) return SetRelation::Equal;
  if (lhs_in_rhs) return SetRelation::LhsSubset;
  if (rhs_in_lhs) return SetRelation::RhsSubset;
  return SetRelation::Incomparable;
}

}  // namespace speccalc
