// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "speccalc/errors.hpp"
#include "speccalc/function.hpp"
#include "speccalc/quadrature.hpp"

namespace speccalc {

namespace {

constexpr int kProbeSamples = 40;
constexpr double kIncrementRatio = 1.2;
constexpr int kFitWindow = 10;

Complex polar1(double theta) { return {std::cos(theta), std::sin(theta)}; }

double sample_t(const ProbeRay& ray, int j) {
  return ray.at_infinity ? std::ldexp(ray.t0, j) : std::ldexp(ray.t0, -j);
}

Complex ray_point(const ProbeRay& ray, double t) { return ray.origin + t * ray.direction; }

double floor_for(Complex c) {
  return 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(c));
}

// Integrability of |g − c|/dist along the ray, using ∫ |g − c| d(log t)
// over dyadic shells.
bool integrable_along(const std::function<Complex(Complex)>& g, Complex c, const ProbeRay& ray) {
  const GaussRule& rule = gauss_legendre(8);
  const double floor = floor_for(c);
  std::vector<double> inc;
  bool all_zero = true;
  for (int j = 0; j < kProbeSamples - 1; ++j) {
    const double s0 = std::log(sample_t(ray, j));
    const double s1 = std::log(sample_t(ray, j + 1));
    const double mid = 0.5 * (s0 + s1);
    const double half = 0.5 * std::abs(s1 - s0);
    double sum = 0.0;
    double peak = 0.0;
    for (int k = 0; k < 8; ++k) {
      const double t = std::exp(mid + half * rule.nodes[k]);
      const double v = std::abs(g(ray_point(ray, t)) - c);
      if (!std::isfinite(v)) return false;
      sum += half * rule.weights[k] * v;
      peak = std::max(peak, v);
    }
    if (sum != 0.0) all_zero = false;
    inc.push_back(sum);
    if (peak <= floor && j >= 3) {
      // Round-off floor reached: accept if the increments were shrinking.
      const std::size_t n = inc.size();
      return inc[n - 4] >= kIncrementRatio * inc[n - 3] || inc[n - 4] == 0.0;
    }
  }
  if (all_zero) return true;
  const std::size_t n = inc.size();
  for (std::size_t i = n - 3; i + 1 < n; ++i) {
    if (inc[i + 1] == 0.0) continue;
    if (inc[i] < kIncrementRatio * inc[i + 1]) return false;
  }
  return true;
}

bool integrable(const std::function<Complex(Complex)>& g, Complex c, SingularPoint d, double a,
                double phi_prime) {
  for (const ProbeRay& ray : probe_rays(d, a, phi_prime)) {
    if (!integrable_along(g, c, ray)) return false;
  }
  return true;
}

double probe_phi_prime(const MeromFn& f, const BisectorRegion& region) {
  return 0.5 * (f.phi_for(region.omega) + region.omega);
}

}  // namespace

std::vector<ProbeRay> probe_rays(SingularPoint d, double a, double phi_prime) {
  std::vector<ProbeRay> rays;
  const double near = a > 0.0 ? 0.5 * std::min(a, 1.0) : 0.5;
  switch (d) {
    case SingularPoint::PlusA:
      if (a > 0.0) {
        rays.push_back({Complex(a, 0.0), polar1(kPi - phi_prime), false, near});
        rays.push_back({Complex(a, 0.0), polar1(-(kPi - phi_prime)), false, near});
      } else {
        for (double th : {phi_prime, kPi - phi_prime, -phi_prime, -(kPi - phi_prime)}) {
          rays.push_back({0.0, polar1(th), false, near});
        }
      }
      break;
    case SingularPoint::MinusA:
      rays.push_back({Complex(-a, 0.0), polar1(phi_prime), false, near});
      rays.push_back({Complex(-a, 0.0), polar1(-phi_prime), false, near});
      break;
    case SingularPoint::Infinity:
      for (double th : {phi_prime, kPi - phi_prime, -phi_prime, -(kPi - phi_prime)}) {
        rays.push_back({0.0, polar1(th), true, std::max(2.0, 4.0 * a)});
      }
      break;
  }
  return rays;
}

std::optional<Extended> estimate_limit(const MeromFn& f, SingularPoint d, double phi_prime) {
  std::optional<Extended> result;
  for (const ProbeRay& ray : probe_rays(d, f.a, phi_prime)) {
    Complex prev = f(ray_point(ray, sample_t(ray, kProbeSamples - 2)));
    Complex last = f(ray_point(ray, sample_t(ray, kProbeSamples - 1)));
    Complex before = f(ray_point(ray, sample_t(ray, kProbeSamples - 3)));
    Extended here;
    if (std::isfinite(std::abs(last)) && std::abs(last - prev) <= 1e-7 * std::max(1.0, std::abs(last))) {
      here = Extended(last);
    } else if (!std::isfinite(std::abs(last)) ||
               (std::abs(last) > 1e6 && std::abs(last) > std::abs(prev) && std::abs(prev) > std::abs(before))) {
      here = Extended::infinity();
    } else {
      return std::nullopt;
    }
    if (result && !result->near(here, 1e-6)) return std::nullopt;
    if (!result) result = here;
  }
  return result;
}

std::optional<double> estimate_order(const MeromFn& f, SingularPoint d, double phi_prime,
                                     const Extended& c) {
  const ProbeRay ray = probe_rays(d, f.a, phi_prime).front();
  const double floor = c.is_finite() ? floor_for(c.value()) : 0.0;
  std::vector<double> xs, ys;
  for (int j = 0; j < kProbeSamples; ++j) {
    const double t = sample_t(ray, j);
    const Complex v = f(ray_point(ray, t));
    const double m = c.is_finite() ? std::abs(v - c.value()) : std::abs(v);
    if (!std::isfinite(m)) return std::nullopt;
    if (m == 0.0) return kInf;
    if (m <= floor) break;
    // dist = t near a finite point, 1/t at infinity.
    xs.push_back(ray.at_infinity ? -std::log(t) : std::log(t));
    ys.push_back(std::log(m));
  }
  if (xs.size() < 4) return std::nullopt;
  const std::size_t n = std::min<std::size_t>(kFitWindow, xs.size());
  const std::size_t start = xs.size() - n;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = start; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = start; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

Regularity regularity_probe(const MeromFn& f, SingularPoint d, const BisectorRegion& region) {
  const double phi_prime = probe_phi_prime(f, region);
  PointMeta meta = f.at(d);
  if (!meta.limit) meta.limit = estimate_limit(f, d, phi_prime);
  if (!meta.limit) return Regularity::Inconclusive;
  if (meta.limit->is_finite()) {
    if (integrable(f.eval, meta.limit->value(), d, f.a, phi_prime)) return Regularity::Regular;
    if ((meta.decay && *meta.decay > 0.0) || (meta.log_decay && *meta.log_decay > 1.0)) {
      return Regularity::Regular;
    }
    return Regularity::Inconclusive;
  }
  const auto fe = f.eval;
  const auto inv = [fe](Complex z) { return 1.0 / fe(z); };
  if (integrable(inv, 0.0, d, f.a, phi_prime)) return Regularity::QuasiRegular;
  if ((meta.growth && *meta.growth > 0.0) || (meta.log_growth && *meta.log_growth > 1.0)) {
    return Regularity::QuasiRegular;
  }
  return Regularity::Inconclusive;
}

EDecomposition decompose_E(const MeromFn& f, const std::vector<SingularPoint>& m_a, Complex b) {
  std::vector<SingularPoint> points;
  for (SingularPoint d : m_a) {
    if (f.a == 0.0 && d == SingularPoint::MinusA) d = SingularPoint::PlusA;
    if (std::find(points.begin(), points.end(), d) == points.end()) points.push_back(d);
  }
  const int k = static_cast<int>(points.size());
  if (k > 3) throw SingularSystem("more than three singular points");
  auto basis_row = [&](SingularPoint d) {
    Eigen::RowVector3cd row;
    if (d == SingularPoint::Infinity) {
      row << 1.0, 0.0, 0.0;
    } else {
      const Complex p = location(d, f.a).value();
      row << 1.0, 1.0 / (b - p), 1.0 / (b + p);
    }
    return row;
  };
  Eigen::Vector3cd coef = Eigen::Vector3cd::Zero();
  if (k > 0) {
    Eigen::MatrixXcd sys(k, k);
    Eigen::VectorXcd rhs(k);
    for (int i = 0; i < k; ++i) {
      sys.row(i) = basis_row(points[i]).head(k);
      const Extended c = f.limit(points[i]);
      if (c.is_infinite()) {
        throw PreconditionError("decompose_E needs a finite limit at " + to_string(points[i]));
      }
      rhs(i) = c.value();
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(sys);
    if (lu.rank() < k) throw SingularSystem("basis values at M_A are linearly dependent");
    coef.head(k) = lu.solve(rhs);
  }

  EDecomposition out;
  out.base_b = b;
  out.coef_one = coef(0);
  out.coef_minus = coef(1);
  out.coef_plus = coef(2);
  const Complex c1 = out.coef_one, cm = out.coef_minus, cp = out.coef_plus;
  const auto fe = f.eval;
  MeromFn f0;
  f0.a = f.a;
  f0.eval = [fe, c1, cm, cp, b](Complex z) { return fe(z) - c1 - cm / (b - z) - cp / (b + z); };
  f0.poles = f.poles;
  f0.zeros.clear();
  f0.domain = f.domain;
  f0.label = "E0(" + f.label + ")";
  const bool pure_constant = cm == 0.0 && cp == 0.0;
  for (SingularPoint d : singular_points(f.a)) {
    PointMeta m = f.at(d);
    PointMeta out_meta;
    const bool in_m_a = std::find(points.begin(), points.end(), d) != points.end();
    if (m.limit && m.limit->is_finite()) {
      Complex e_part = c1;
      if (d != SingularPoint::Infinity) {
        const Complex p = location(d, f.a).value();
        e_part += cm / (b - p) + cp / (b + p);
      }
      out_meta.limit = in_m_a ? Extended(0.0) : Extended(m.limit->value() - e_part);
      if (m.decay) out_meta.decay = pure_constant ? *m.decay : std::min(*m.decay, 1.0);
      out_meta.log_decay = m.log_decay;
    } else {
      out_meta = m;
    }
    f0.meta[d] = out_meta;
  }
  out.f0 = std::move(f0);
  return out;
}

RationalFactors rational_factor_factors(const std::vector<Pole>& zeros, Complex b) {
  RationalFactors r;
  for (const Pole& z : zeros) {
    if (std::abs(z.location - b) <= kMergeTol) throw PreconditionError("rational factor zero coincides with b");
    r.factors.emplace_back(z.location, z.order);
    r.factors.emplace_back(b, -z.order);
  }
  r.normalize();
  return r;
}

MeromFn rational_factor(const std::vector<Pole>& zeros, Complex b, double a) {
  return make_rational(rational_factor_factors(zeros, b), a, "rational_factor");
}

Regularizer default_regularizer(const MeromFn& f, const RegularizerContext& ctx) {
  const BisectorRegion& region = ctx.region;
  const double a = region.a;
  const double phi_prime = probe_phi_prime(f, region);
  Regularizer out;
  const std::vector<Pole> poles = f.active_poles(region.omega);
  for (const Pole& p : poles) {
    if (ctx.is_eigenvalue && ctx.is_eigenvalue(p.location)) {
      throw RegularizerNotInjective("pole of f at an eigenvalue of A");
    }
  }
  RationalFactors e = rational_factor_factors(poles, ctx.b);

  for (SingularPoint d : ctx.m_a) {
    if (a == 0.0 && d == SingularPoint::MinusA) d = SingularPoint::PlusA;
    const bool eigen = d != SingularPoint::Infinity && ctx.is_eigenvalue &&
                       ctx.is_eigenvalue(location(d, a).value());
    PointMeta meta = f.at(d);
    if (!meta.limit) meta.limit = estimate_limit(f, d, phi_prime);
    if (!meta.limit) throw NoRegularizer("limit at " + to_string(d) + " undeclared and probe inconclusive");
    int k = 0;
    if (meta.limit->is_finite()) {
      const bool regular = (meta.decay && *meta.decay > 0.0) || (meta.log_decay && *meta.log_decay > 1.0) ||
                           regularity_probe(f, d, region) == Regularity::Regular;
      if (!regular) {
        if (eigen) throw RegularizerNotInjective(to_string(d) + " is an eigenvalue where f is irregular");
        k = 1;
      }
    } else {
      if (eigen) throw RegularizerNotInjective(to_string(d) + " is an eigenvalue where f is unbounded");
      double gamma = 0.0;
      if (meta.growth) {
        gamma = *meta.growth;
      } else if (!meta.log_growth) {
        const auto s1 = estimate_order(f, d, phi_prime, Extended::infinity());
        if (!s1) throw NoRegularizer("growth at " + to_string(d) + " undeclared and probe inconclusive");
        gamma = std::max(0.0, -*s1);
      }
      k = static_cast<int>(std::ceil(gamma - 1e-9));
      if (std::abs(k - gamma) > 1e-9 && k - gamma < 0.25) ++k;
      k = std::max(k, 1);
    }
    if (d == SingularPoint::Infinity) {
      out.l = k;
    } else if (d == SingularPoint::PlusA) {
      out.m = k;
    } else {
      out.n = k;
    }
  }

  const int total = out.l + out.m + out.n;
  if (total > 0) {
    RationalFactors h;
    h.scale = (total % 2 == 0) ? 1.0 : -1.0;
    if (out.m > 0) h.factors.emplace_back(Complex(a, 0.0), out.m);
    if (out.n > 0) h.factors.emplace_back(Complex(-a, 0.0), out.n);
    h.factors.emplace_back(ctx.b, -total);
    e = e * h;
  }
  e.normalize();
  out.e = e;
  return out;
}

bool condition_P_check(const MeromFn& f, const std::vector<SingularPoint>& m_a,
                       const std::vector<Extended>& sigma_p_image, const BisectorRegion& region) {
  const double phi_prime = probe_phi_prime(f, region);
  for (SingularPoint d : m_a) {
    const PointMeta meta = f.at(d);
    if (!meta.limit) return false;
    if (meta.limit->is_infinite()) continue;
    const bool hit = std::any_of(sigma_p_image.begin(), sigma_p_image.end(),
                                 [&](const Extended& v) { return v.near(*meta.limit, 1e-8); });
    if (hit) continue;
    if (!meta.decay || !(*meta.decay > 0.0)) return false;
    const auto slope = estimate_order(f, d, phi_prime, *meta.limit);
    if (!slope || *slope > *meta.decay + 0.1) return false;
  }
  return true;
}

}  // namespace speccalc
