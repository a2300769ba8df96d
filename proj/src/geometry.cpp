// SPDX-License-Identifier: Apache-2.0
#include "speccalc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "speccalc/errors.hpp"
#include "speccalc/quadrature.hpp"

namespace speccalc {

namespace {

constexpr int kGradingLevels = 60;
constexpr double kPanelArc = kPi / 8;

Complex polar1(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Angle of z in (-π, π], folded to [0, π] as a deviation from the axis.
double deviation(Complex z) { return std::abs(std::arg(z)); }

// Distance from w to the complement of the open sector {|arg w| < angle}.
double depth_in_wedge(Complex w, double angle) {
  const double r = std::abs(w);
  if (r == 0.0) return 0.0;
  const double margin = angle - deviation(w);
  if (margin <= 0.0) return 0.0;
  if (margin >= kPi / 2) return r;
  return r * std::sin(margin);
}

}  // namespace

std::string to_string(SingularPoint d) {
  switch (d) {
    case SingularPoint::MinusA: return "-a";
    case SingularPoint::PlusA: return "a";
    case SingularPoint::Infinity: return "inf";
  }
  return "?";
}

SingularPoint singular_point_from_string(const std::string& key) {
  if (key == "-a") return SingularPoint::MinusA;
  if (key == "a" || key == "+a" || key == "0") return SingularPoint::PlusA;
  if (key == "inf" || key == "infinity") return SingularPoint::Infinity;
  throw InputError("unknown singular point '" + key + "'");
}

Extended location(SingularPoint d, double a) {
  switch (d) {
    case SingularPoint::MinusA: return Extended(Complex(-a, 0.0));
    case SingularPoint::PlusA: return Extended(Complex(a, 0.0));
    case SingularPoint::Infinity: return Extended::infinity();
  }
  return Extended::infinity();
}

std::vector<SingularPoint> singular_points(double a) {
  if (a == 0.0) return {SingularPoint::PlusA, SingularPoint::Infinity};
  return {SingularPoint::MinusA, SingularPoint::PlusA, SingularPoint::Infinity};
}

void BisectorRegion::validate() const {
  if (!(omega > 0.0) || omega > kPi / 2 + 1e-15) {
    throw GeometryError("omega must lie in (0, π/2]");
  }
  if (!(a >= 0.0) || !std::isfinite(a)) throw GeometryError("half-width must be finite and ≥ 0");
  for (const auto& [d, s] : excluded) {
    if (a == 0.0 && d == SingularPoint::MinusA) {
      throw GeometryError("-a is not a separate point when a = 0");
    }
    if (!(s >= 0.0) || !std::isfinite(s)) throw GeometryError("excluded radius must be finite");
  }
}

bool in_bisector(double angle, double a, Complex z) {
  if (a == 0.0 && angle >= kPi / 2) {
    return std::abs(z.real()) <= 1e-14 * std::max(1.0, std::abs(z));
  }
  const Complex from_left = z + a;
  const Complex from_right = Complex(a, 0.0) - z;
  if (from_left == 0.0 || from_right == 0.0) return false;
  return deviation(from_left) < kPi - angle && deviation(from_right) < kPi - angle;
}

double distance_to_closed_bisector(double angle, double a, Complex z) {
  // The closure is the complement of the two open wedges at ±a.
  const double right = depth_in_wedge(z - a, angle);
  const double left = depth_in_wedge(Complex(-a, 0.0) - z, angle);
  return std::max(right, left);
}

bool membership(const BisectorRegion& region, Complex z) {
  if (!in_bisector(region.omega, region.a, z)) return false;
  for (const auto& [d, s] : region.excluded) {
    if (d == SingularPoint::Infinity) {
      if (s > 0.0 && std::abs(z) >= 1.0 / s) return false;
    } else {
      if (std::abs(z - location(d, region.a).value()) <= s) return false;
    }
  }
  return true;
}

RadiusMap distance_data(const SpectralSet& spectrum, const BisectorRegion& region) {
  std::vector<Complex> finite;
  for (const auto& p : spectrum.points()) {
    if (p.value.is_finite()) finite.push_back(p.value.value());
    finite.insert(finite.end(), p.approach.begin(), p.approach.end());
  }
  RadiusMap out;
  for (SingularPoint d : singular_points(region.a)) {
    if (d == SingularPoint::Infinity) {
      if (spectrum.includes_infinity()) continue;
      double rho = 0.0;
      for (Complex z : finite) rho = std::max(rho, std::abs(z));
      out[d] = rho > 0.0 ? 1.0 / rho : kInf;
      continue;
    }
    const Complex c = location(d, region.a).value();
    if (spectrum.contains(Extended(c))) continue;
    double r = kInf;
    for (Complex z : finite) r = std::min(r, std::abs(z - c));
    out[d] = r;
  }
  return out;
}

// Rays graded toward their end are parametrized from the end so that nodes
// close to the touching point stay representable.
Complex ContourSegment::point(double t) const {
  if (kind == SegmentKind::Ray) return grade_end ? end + t * (start - end) : start + t * (end - start);
  return center + radius * polar1(theta0 + t * (theta1 - theta0));
}

Complex ContourSegment::derivative(double t) const {
  if (kind == SegmentKind::Ray) return grade_end ? start - end : end - start;
  const double dtheta = theta1 - theta0;
  return Complex(0.0, 1.0) * radius * dtheta * polar1(theta0 + t * dtheta);
}

double ContourSegment::length() const {
  if (kind == SegmentKind::Ray) return std::abs(end - start);
  return radius * std::abs(theta1 - theta0);
}

std::vector<ContourNode> panel_nodes(const ContourPath& path, const Panel& panel, int n) {
  const GaussRule& rule = gauss_legendre(n);
  const ContourSegment& seg = path.segments.at(panel.segment);
  const double mid = 0.5 * (panel.t0 + panel.t1);
  const double half = 0.5 * (panel.t1 - panel.t0);
  const double orientation = seg.kind == SegmentKind::Ray && seg.grade_end ? -1.0 : 1.0;
  std::vector<ContourNode> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = mid + half * rule.nodes[i];
    out.push_back({panel.segment, t, seg.point(t), orientation * half * rule.weights[i] * seg.derivative(t)});
  }
  return out;
}

namespace {

void add_panels(ContourPath& path, int index) {
  const ContourSegment& seg = path.segments[index];
  std::vector<std::pair<double, double>> spans;
  if (seg.kind != SegmentKind::Ray) {
    const int count = std::max(2, static_cast<int>(std::ceil(std::abs(seg.theta1 - seg.theta0) / kPanelArc)));
    for (int k = 0; k < count; ++k) spans.emplace_back(double(k) / count, double(k + 1) / count);
  } else if (seg.grade_start || seg.grade_end) {
    // Dyadic panels toward the touching end; the innermost one is dropped.
    for (int k = 0; k < 4; ++k) spans.emplace_back(0.5 + 0.125 * k, 0.5 + 0.125 * (k + 1));
    for (int j = 1; j < kGradingLevels; ++j) spans.emplace_back(std::ldexp(1.0, -j - 1), std::ldexp(1.0, -j));
    if (seg.grade_start && seg.grade_end) {
      throw GeometryError("a ray cannot touch M_A at both ends");
    }
  } else {
    for (int k = 0; k < 8; ++k) spans.emplace_back(k / 8.0, (k + 1) / 8.0);
  }
  std::sort(spans.begin(), spans.end());
  if (seg.kind == SegmentKind::Ray && seg.grade_end) std::reverse(spans.begin(), spans.end());
  for (const auto& [t0, t1] : spans) path.panels.push_back({index, t0, t1});
}

ContourSegment ray(Complex from, Complex to, bool grade_start, bool grade_end) {
  ContourSegment s;
  s.kind = SegmentKind::Ray;
  s.start = from;
  s.end = to;
  s.grade_start = grade_start;
  s.grade_end = grade_end;
  return s;
}

ContourSegment arc(SegmentKind kind, Complex center, double radius, double theta0, double theta1) {
  ContourSegment s;
  s.kind = kind;
  s.center = center;
  s.radius = radius;
  s.theta0 = theta0;
  s.theta1 = theta1;
  s.start = s.point(0.0);
  s.end = s.point(1.0);
  return s;
}

}  // namespace

ContourPath build_contour(const BisectorRegion& region, double phi_prime, const RadiusMap& radii,
                          double truncation_R, int nodes_per_panel) {
  region.validate();
  if (nodes_per_panel < 1) throw GeometryError("nodes_per_panel must be positive");
  if (!(phi_prime > 0.0) || phi_prime >= region.omega) {
    throw GeometryError("phi_prime must lie in (0, omega)");
  }
  const double a = region.a;
  for (const auto& [d, s] : region.excluded) {
    auto it = radii.find(d);
    if (it == radii.end()) throw GeometryError("missing contour radius for " + to_string(d));
    if (!(it->second > s)) throw GeometryError("contour radius must exceed the excluded radius at " + to_string(d));
  }
  for (const auto& [d, s] : radii) {
    if (!region.is_excluded(d)) throw GeometryError(to_string(d) + " is not excluded from the region");
    if (!(s > 0.0) || !std::isfinite(s)) throw GeometryError("contour radius must be positive and finite");
    if (a > 0.0 && d != SingularPoint::Infinity && s >= std::min(a, 2.0 * a * std::sin(phi_prime))) {
      throw GeometryError("excluded ball at " + to_string(d) + " meets the opposite boundary");
    }
  }

  auto radius_at = [&](SingularPoint d) {
    auto it = radii.find(d);
    return it == radii.end() ? 0.0 : it->second;
  };
  const bool inf_excluded = radii.count(SingularPoint::Infinity) != 0;
  const double R = inf_excluded ? 1.0 / radius_at(SingularPoint::Infinity) : truncation_R;
  const SegmentKind outer = inf_excluded ? SegmentKind::Arc : SegmentKind::TruncationArc;
  const double rho_plus = radius_at(SingularPoint::PlusA);
  const double rho_minus = a > 0.0 ? radius_at(SingularPoint::MinusA) : rho_plus;
  const bool touch_plus = rho_plus == 0.0;
  const bool touch_minus = rho_minus == 0.0;

  // Parameter where a + t e^{iφ′} reaches |z| = R.
  const double c = std::cos(phi_prime);
  const double disc = a * a * c * c - a * a + R * R;
  const double t_R = -a * c + std::sqrt(std::max(disc, 0.0));
  if (!(R > a) || !(t_R > std::max(rho_plus, rho_minus) * 1.000001)) {
    throw GeometryError("truncation radius too small for the excluded balls");
  }

  ContourPath path;
  path.truncation_radius = R;
  path.nodes_per_panel = nodes_per_panel;
  const Complex up = polar1(phi_prime);
  const Complex up_left = polar1(kPi - phi_prime);
  const Complex down_left = polar1(kPi + phi_prime);
  const Complex down = polar1(-phi_prime);
  const Complex pa(a, 0.0);
  const Complex ma(-a, 0.0);
  const double theta1 = std::arg(pa + t_R * up);

  if (a > 0.0) {
    path.segments.push_back(ray(pa + rho_plus * up, pa + t_R * up, touch_plus, false));
    path.segments.push_back(arc(outer, 0.0, R, theta1, kPi - theta1));
    path.segments.push_back(ray(ma + t_R * up_left, ma + rho_minus * up_left, false, touch_minus));
    if (!touch_minus) {
      path.segments.push_back(arc(SegmentKind::Arc, ma, rho_minus, kPi - phi_prime, -(kPi - phi_prime)));
    }
    path.segments.push_back(ray(ma + rho_minus * down_left, ma + t_R * down_left, touch_minus, false));
    path.segments.push_back(arc(outer, 0.0, R, kPi + theta1, 2 * kPi - theta1));
    path.segments.push_back(ray(pa + t_R * down, pa + rho_plus * down, false, touch_plus));
    if (!touch_plus) {
      path.segments.push_back(arc(SegmentKind::Arc, pa, rho_plus, 2 * kPi - phi_prime, phi_prime));
    }
  } else {
    const double rho = rho_plus;
    path.segments.push_back(ray(rho * up, R * up, touch_plus, false));
    path.segments.push_back(arc(outer, 0.0, R, phi_prime, kPi - phi_prime));
    path.segments.push_back(ray(R * up_left, rho * up_left, false, touch_plus));
    if (!touch_plus) path.segments.push_back(arc(SegmentKind::Arc, 0.0, rho, kPi - phi_prime, phi_prime));
    path.segments.push_back(ray(rho * down_left, R * down_left, touch_plus, false));
    path.segments.push_back(arc(outer, 0.0, R, kPi + phi_prime, 2 * kPi - phi_prime));
    path.segments.push_back(ray(R * down, rho * down, false, touch_plus));
    if (!touch_plus) {
      path.segments.push_back(arc(SegmentKind::Arc, 0.0, rho, 2 * kPi - phi_prime, kPi + phi_prime));
    }
  }

  for (int i = 0; i < static_cast<int>(path.segments.size()); ++i) add_panels(path, i);
  for (const Panel& p : path.panels) {
    auto nodes = panel_nodes(path, p, nodes_per_panel);
    path.nodes.insert(path.nodes.end(), nodes.begin(), nodes.end());
  }
  return path;
}

namespace {

Complex panel_winding(const ContourPath& path, const Panel& p, Complex z0, int n) {
  Complex sum = 0.0;
  for (const ContourNode& node : panel_nodes(path, p, n)) sum += node.weight / (node.z - z0);
  return sum;
}

// Bisects a panel until the two halves reproduce the whole; points close to
// the contour need much finer panels than the calculus itself.
Complex adaptive_winding(const ContourPath& path, const Panel& p, Complex z0, int n, Complex whole, int depth) {
  const double mid = 0.5 * (p.t0 + p.t1);
  const Panel left{p.segment, p.t0, mid}, right{p.segment, mid, p.t1};
  const Complex l = panel_winding(path, left, z0, n), r = panel_winding(path, right, z0, n);
  if (std::abs(l + r - whole) <= 1e-13 || depth >= 40) return l + r;
  return adaptive_winding(path, left, z0, n, l, depth + 1) + adaptive_winding(path, right, z0, n, r, depth + 1);
}

}  // namespace

double winding_number(const ContourPath& path, Complex z0) {
  Complex sum = 0.0;
  for (const Panel& p : path.panels) {
    sum += adaptive_winding(path, p, z0, path.nodes_per_panel, panel_winding(path, p, z0, path.nodes_per_panel), 0);
  }
  return (sum / Complex(0.0, 2.0 * kPi)).real();
}

ContourParams default_contour_params(const BisectorRegion& region, double phi,
                                     const RadiusMap& r, double spectral_bound) {
  region.validate();
  if (!(phi > 0.0) || phi >= region.omega) throw GeometryError("phi must lie in (0, omega)");
  ContourParams params;
  params.phi_prime = 0.5 * (phi + region.omega);
  const double a = region.a;
  const double cap = a > 0.0 ? 0.9 * std::min(a, 2.0 * a * std::sin(params.phi_prime)) : kInf;
  double rho_max = 0.0;
  for (const auto& [d, s] : region.excluded) {
    if (d == SingularPoint::Infinity) continue;
    auto it = r.find(d);
    if (it == r.end()) throw GeometryError("no clearance known for " + to_string(d));
    double sp = std::isfinite(it->second) ? 0.5 * (s + it->second) : (s > 0.0 ? 2.0 * s : 0.5);
    sp = std::min(sp, cap);
    if (!(sp > s)) throw GeometryError("excluded ball at " + to_string(d) + " leaves no room for the contour");
    params.radii[d] = sp;
    rho_max = std::max(rho_max, sp);
  }
  const double min_R = 2.0 * (a + rho_max) + 1.0;
  auto inf_it = region.excluded.find(SingularPoint::Infinity);
  if (inf_it != region.excluded.end()) {
    const double s = inf_it->second;
    auto it = r.find(SingularPoint::Infinity);
    if (it == r.end()) throw GeometryError("no clearance known for inf");
    double sp = std::isfinite(it->second) ? 0.5 * (s + it->second) : (s > 0.0 ? 2.0 * s : 1.0 / min_R);
    if (1.0 / sp < min_R) sp = 1.0 / min_R;
    if (!(sp > s)) throw GeometryError("excluded ball at inf leaves no room for the contour");
    params.radii[SingularPoint::Infinity] = sp;
    params.truncation_R = 1.0 / sp;
  } else {
    params.truncation_R = std::max(min_R, 2.0 * spectral_bound + 1.0);
  }
  return params;
}

std::string contour_csv(const ContourPath& path) {
  std::ostringstream out;
  out << "segment_id,t,re,im,weight_re,weight_im\n";
  char buf[256];
  for (const ContourNode& n : path.nodes) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", n.segment, n.t, n.z.real(),
                  n.z.imag(), n.weight.real(), n.weight.imag());
    out << buf;
  }
  return out.str();
}

}  // namespace speccalc
