// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "speccalc/core.hpp"
#include "speccalc/geometry.hpp"

namespace speccalc {

/// Behaviour of a function at one singular point.
struct PointMeta {
  std::optional<Extended> limit;
  /// β > 0 with |f − c| ≍ dist^β (dist = |z − d|, or 1/|z| at ∞).
  std::optional<double> decay;
  /// α > 0 with |f − c| ≍ |log dist|^(−α); only meaningful for c = 0 or finite c.
  std::optional<double> log_decay;
  /// γ ≥ 0 with |f| ≍ dist^(−γ) when the limit is ∞.
  std::optional<double> growth;
  /// α > 0 with |f| ≍ |log dist|^α when the limit is ∞.
  std::optional<double> log_growth;
};

struct Pole {
  Complex location;
  int order = 1;
};

/// scale · ∏ (z − root)^power with integer powers.
struct RationalFactors {
  Complex scale{1.0, 0.0};
  std::vector<std::pair<Complex, int>> factors;

  /// Coefficients in ascending order of degree.
  static RationalFactors from_coefficients(const std::vector<Complex>& numerator,
                                           const std::vector<Complex>& denominator);

  Complex operator()(Complex z) const;
  /// Signed order at d: zero order if positive, minus the pole order if negative.
  int order_at(Complex d) const;
  /// Numerator degree minus denominator degree.
  int degree() const;
  bool is_identity() const { return factors.empty() && scale == Complex(1.0, 0.0); }

  RationalFactors operator*(const RationalFactors& other) const;
  RationalFactors reciprocal() const;
  /// Merges coincident roots and drops zero powers.
  void normalize();

  /// Expanded numerator and denominator (ascending coefficients).
  std::pair<std::vector<Complex>, std::vector<Complex>> polynomials() const;
  std::string to_string() const;
};

/// Parameters (φ, s_d) of the domain Ω(φ, (s_d)) on which f is meromorphic.
struct FunctionDomain {
  std::optional<double> phi;
  RadiusMap s;
};

/// Meromorphic function on a bisector domain with declared behaviour at the
/// singular points ±a, ∞.
struct MeromFn {
  std::function<Complex(Complex)> eval;
  std::vector<Pole> poles;
  std::vector<Pole> zeros;
  std::map<SingularPoint, PointMeta> meta;
  FunctionDomain domain;
  double a = 0.0;
  /// Exact form when the function is rational.
  std::optional<RationalFactors> rational;
  std::string label;

  Complex operator()(Complex z) const { return eval(z); }
  PointMeta at(SingularPoint d) const;
  bool has_limit(SingularPoint d) const { return at(d).limit.has_value(); }
  /// Declared limit; throws UndeclaredLimit.
  Extended limit(SingularPoint d) const;
  /// Angle φ of the domain, defaulting to ω/2.
  double phi_for(double omega) const;
  /// Poles that lie in the closed domain bisector and outside the excluded balls.
  std::vector<Pole> active_poles(double omega) const;
};

MeromFn make_rational(const RationalFactors& r, double a, std::string label = "rational");
MeromFn make_constant(Complex c, double a);
/// The identity function ζ(z) = z.
MeromFn make_identity(double a);
/// scale · (z − center)^(1/2), principal branch.
MeromFn make_sqrt_branch(double a, Complex center = 0.0, Complex scale = 1.0);
/// scale · log(z − center)^power, principal branch.
MeromFn make_log_branch(double a, Complex center, double power, Complex scale = 1.0);

MeromFn product(const MeromFn& f, const MeromFn& g);
MeromFn reciprocal(const MeromFn& f);

/// Numeric limit along rays into d; empty when the samples do not settle.
std::optional<Extended> estimate_limit(const MeromFn& f, SingularPoint d, double phi_prime);

/// Least-squares exponent of |f − c| along a ray into d (positive means decay).
std::optional<double> estimate_order(const MeromFn& f, SingularPoint d, double phi_prime,
                                     const Extended& c);

enum class Regularity { Regular, QuasiRegular, Inconclusive };
std::string to_string(Regularity r);

/// Unit directions of the probe rays into d, and the starting distance.
struct ProbeRay {
  Complex origin;
  Complex direction;
  bool at_infinity = false;
  double t0 = 0.5;
};
std::vector<ProbeRay> probe_rays(SingularPoint d, double a, double phi_prime);

Regularity regularity_probe(const MeromFn& f, SingularPoint d, const BisectorRegion& region);

struct EDecomposition {
  MeromFn f0;
  Complex coef_plus{};
  Complex coef_minus{};
  Complex coef_one{};
  Complex base_b{};
};

/// Splits f = f0 + coef_plus/(b+z) + coef_minus/(b−z) + coef_one with f0
/// vanishing on M_A.
EDecomposition decompose_E(const MeromFn& f, const std::vector<SingularPoint>& m_a, Complex b);

/// ∏ ((λ_j − z)/(b − z))^(n_j).
RationalFactors rational_factor_factors(const std::vector<Pole>& zeros, Complex b);
MeromFn rational_factor(const std::vector<Pole>& zeros, Complex b, double a);

/// Operator data needed to build a regularizer.
struct RegularizerContext {
  BisectorRegion region;
  std::vector<SingularPoint> m_a;
  Complex b{};
  std::function<bool(Complex)> is_eigenvalue;
};

struct Regularizer {
  RationalFactors e;
  int l = 0, m = 0, n = 0;
  bool identity() const { return e.is_identity(); }
};

Regularizer default_regularizer(const MeromFn& f, const RegularizerContext& ctx);

/// Condition (P) at every d in M_A whose limit misses sigma_p_image ∪ {∞}.
bool condition_P_check(const MeromFn& f, const std::vector<SingularPoint>& m_a,
                       const std::vector<Extended>& sigma_p_image, const BisectorRegion& region);

}  // namespace speccalc
