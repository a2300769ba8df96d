// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "speccalc/core.hpp"
#include "speccalc/spectral_set.hpp"

namespace speccalc {

/// Singular points of the bisector. When a = 0 the points -a and +a
/// coincide and only PlusA is used.
enum class SingularPoint { MinusA, PlusA, Infinity };

std::string to_string(SingularPoint d);
SingularPoint singular_point_from_string(const std::string& key);

/// Location of d on the sphere for half-width a.
Extended location(SingularPoint d, double a);

/// The distinct singular points for half-width a.
std::vector<SingularPoint> singular_points(double a);

using RadiusMap = std::map<SingularPoint, double>;

struct BisectorRegion {
  double omega = kPi / 2;
  double a = 0.0;
  /// Excluded ball radii s_d for d in U_A. Missing keys are points of M_A.
  RadiusMap excluded;

  /// Throws GeometryError on invalid parameters.
  void validate() const;
  bool is_excluded(SingularPoint d) const { return excluded.count(d) != 0; }
};

/// z in the open bisector of the given angle (iR when angle = π/2, a = 0).
bool in_bisector(double angle, double a, Complex z);

/// Distance from z to the closed bisector of the given angle.
double distance_to_closed_bisector(double angle, double a, Complex z);

/// z in BS_{ω,a} minus the closed excluded balls.
bool membership(const BisectorRegion& region, Complex z);

/// r_d for every d in U_A. U_A is read off the spectrum: ±a when they are
/// not spectral points, ∞ when the spectrum is bounded.
RadiusMap distance_data(const SpectralSet& spectrum, const BisectorRegion& region);

enum class SegmentKind { Ray, Arc, TruncationArc };

/// Piece of the contour parametrized over t in [0, 1]. Rays graded toward
/// their end run t from the end back to the start.
struct ContourSegment {
  SegmentKind kind = SegmentKind::Ray;
  Complex start{}, end{};
  Complex center{};
  double radius = 0.0;
  double theta0 = 0.0, theta1 = 0.0;
  /// Geometric panel grading toward an endpoint lying on M_A.
  bool grade_start = false;
  bool grade_end = false;

  Complex point(double t) const;
  Complex derivative(double t) const;
  double length() const;
};

struct ContourNode {
  int segment = 0;
  double t = 0.0;
  Complex z{};
  /// dz weight including the Gauss-Legendre weight.
  Complex weight{};
};

struct Panel {
  int segment = 0;
  double t0 = 0.0, t1 = 0.0;
};

struct ContourPath {
  std::vector<ContourSegment> segments;
  std::vector<Panel> panels;
  std::vector<ContourNode> nodes;
  double truncation_radius = 0.0;
  int nodes_per_panel = 8;
};

/// Quadrature nodes of one panel.
std::vector<ContourNode> panel_nodes(const ContourPath& path, const Panel& panel, int n);

/// Builds the positively oriented boundary of Ω(φ′, (s′_d)).
/// radii holds s′_d for d in U_A; truncation_R closes unbounded pieces.
ContourPath build_contour(const BisectorRegion& region, double phi_prime, const RadiusMap& radii,
                          double truncation_R, int nodes_per_panel);

/// (1/2πi) ∮ dz/(z−z0) over every node, truncation arcs included.
double winding_number(const ContourPath& path, Complex z0);

struct ContourParams {
  double phi_prime = 0.0;
  RadiusMap radii;
  double truncation_R = 0.0;
};

/// Midpoint choices φ′ = (φ+ω)/2 and s′_d = (s_d+r_d)/2, clamped so the
/// excluded balls stay inside the geometry.
ContourParams default_contour_params(const BisectorRegion& region, double phi,
                                     const RadiusMap& r, double spectral_bound);

/// Exports nodes as CSV: segment_id,t,re,im,weight_re,weight_im.
std::string contour_csv(const ContourPath& path);

}  // namespace speccalc
