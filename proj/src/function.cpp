// SPDX-License-Identifier: Apache-2.0
#include "speccalc/function.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "speccalc/errors.hpp"

namespace speccalc {

namespace {

constexpr double kRootTol = 1e-9;

bool same_point(Complex x, Complex y) {
  return std::abs(x - y) <= kRootTol * std::max(1.0, std::abs(x));
}

Complex ipow(Complex z, int k) {
  if (k < 0) return 1.0 / ipow(z, -k);
  Complex r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

void trim(std::vector<Complex>& p) {
  double norm = 0.0;
  for (Complex c : p) norm = std::max(norm, std::abs(c));
  while (!p.empty() && std::abs(p.back()) <= 1e-13 * norm) p.pop_back();
}

std::vector<Complex> poly_mul(const std::vector<Complex>& p, const std::vector<Complex>& q) {
  std::vector<Complex> out(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
  }
  return out;
}

std::vector<Complex> roots_of(std::vector<Complex> p) {
  trim(p);
  const int n = static_cast<int>(p.size()) - 1;
  if (n <= 0) return {};
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -p[i] / p[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<Complex> out(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  return out;
}

// Vanishing order of the polynomial p at d (by repeated synthetic division).
int vanishing_order(std::vector<Complex> p, Complex d) {
  trim(p);
  if (p.empty()) return -1;
  double norm = 0.0;
  for (Complex c : p) norm += std::abs(c);
  const double scale = std::pow(std::max(1.0, std::abs(d)), static_cast<double>(p.size()));
  int order = 0;
  while (p.size() > 1) {
    std::vector<Complex> q(p.size() - 1);
    Complex acc = p.back();
    for (int i = static_cast<int>(p.size()) - 2; i >= 0; --i) {
      q[i] = acc;
      acc = acc * d + p[i];
    }
    if (std::abs(acc) > 1e-10 * norm * scale) break;
    p = std::move(q);
    ++order;
  }
  return order;
}

PointMeta rational_meta(const RationalFactors& r, SingularPoint d, double a) {
  PointMeta m;
  if (r.scale == 0.0) {
    m.limit = Extended(0.0);
    m.decay = kInf;
    return m;
  }
  const auto [num, den] = r.polynomials();
  if (d == SingularPoint::Infinity) {
    const int deg = r.degree();
    if (deg > 0) {
      m.limit = Extended::infinity();
      m.growth = deg;
    } else if (deg < 0) {
      m.limit = Extended(0.0);
      m.decay = -deg;
    } else {
      m.limit = Extended(r.scale);
      std::vector<Complex> diff = num;
      diff.resize(std::max(num.size(), den.size()), 0.0);
      for (std::size_t i = 0; i < den.size(); ++i) diff[i] -= r.scale * den[i];
      trim(diff);
      std::vector<Complex> dd = den;
      trim(dd);
      m.decay = diff.empty() ? kInf : static_cast<double>(dd.size()) - static_cast<double>(diff.size());
    }
    return m;
  }
  const Complex p = location(d, a).value();
  const int k = r.order_at(p);
  if (k > 0) {
    m.limit = Extended(0.0);
    m.decay = k;
  } else if (k < 0) {
    m.limit = Extended::infinity();
    m.growth = -k;
  } else {
    const Complex c = r(p);
    m.limit = Extended(c);
    std::vector<Complex> diff = num;
    diff.resize(std::max(num.size(), den.size()), 0.0);
    for (std::size_t i = 0; i < den.size(); ++i) diff[i] -= c * den[i];
    const int v = vanishing_order(diff, p);
    m.decay = v < 0 ? kInf : static_cast<double>(std::max(v, 1));
  }
  return m;
}

bool is_zero(const Extended& e) { return e.is_finite() && e.value() == 0.0; }

std::optional<double> min_opt(std::optional<double> x, std::optional<double> y) {
  if (x && y) return std::min(*x, *y);
  return std::nullopt;
}

// Behaviour of f·g at one singular point from the two declarations.
PointMeta combine_product(const PointMeta& f, const PointMeta& g,
                          const std::function<std::optional<Extended>()>& numeric) {
  PointMeta out;
  if (!f.limit || !g.limit) return out;
  const Extended cf = *f.limit;
  const Extended cg = *g.limit;
  if (cf.is_finite() && cg.is_finite()) {
    out.limit = Extended(cf.value() * cg.value());
    const bool fz = is_zero(cf);
    const bool gz = is_zero(cg);
    if (!fz && !gz) {
      if (f.log_decay || g.log_decay) {
        out.log_decay = f.log_decay && g.log_decay ? std::min(*f.log_decay, *g.log_decay)
                                                   : (f.log_decay ? f.log_decay : g.log_decay);
      } else {
        out.decay = min_opt(f.decay, g.decay);
      }
    } else if (fz && !gz) {
      out.decay = f.decay;
      out.log_decay = f.log_decay;
    } else if (!fz && gz) {
      out.decay = g.decay;
      out.log_decay = g.log_decay;
    } else {
      if (f.decay && g.decay) {
        out.decay = *f.decay + *g.decay;
      } else if (f.decay || g.decay) {
        out.decay = f.decay ? f.decay : g.decay;
      } else if (f.log_decay && g.log_decay) {
        out.log_decay = *f.log_decay + *g.log_decay;
      }
    }
    return out;
  }
  if (cf.is_infinite() && cg.is_infinite()) {
    out.limit = Extended::infinity();
    if (f.growth && g.growth) {
      out.growth = *f.growth + *g.growth;
    } else if (f.growth || g.growth) {
      out.growth = f.growth ? f.growth : g.growth;
    } else if (f.log_growth && g.log_growth) {
      out.log_growth = *f.log_growth + *g.log_growth;
    }
    return out;
  }
  const PointMeta& inf_side = cf.is_infinite() ? f : g;
  const PointMeta& fin_side = cf.is_infinite() ? g : f;
  if (!is_zero(*fin_side.limit)) {
    out.limit = Extended::infinity();
    out.growth = inf_side.growth;
    out.log_growth = inf_side.log_growth;
    return out;
  }
  // 0 · ∞: compare orders.
  if (fin_side.decay && inf_side.growth) {
    const double s = *fin_side.decay - *inf_side.growth;
    if (s > 1e-12) {
      out.limit = Extended(0.0);
      out.decay = s;
    } else if (s < -1e-12) {
      out.limit = Extended::infinity();
      out.growth = -s;
    } else {
      out.limit = numeric();
    }
  } else if (fin_side.decay && inf_side.log_growth) {
    out.limit = Extended(0.0);
    out.decay = *fin_side.decay;
  } else if (fin_side.log_decay && inf_side.growth && *inf_side.growth > 0.0) {
    out.limit = Extended::infinity();
    out.growth = *inf_side.growth;
  } else {
    out.limit = numeric();
  }
  return out;
}

PointMeta reciprocal_meta(const PointMeta& m) {
  PointMeta out;
  if (!m.limit) return out;
  if (m.limit->is_infinite()) {
    out.limit = Extended(0.0);
    if (m.growth && *m.growth > 0.0) out.decay = m.growth;
    out.log_decay = m.log_growth;
  } else if (m.limit->value() == 0.0) {
    out.limit = Extended::infinity();
    out.growth = m.decay;
    out.log_growth = m.log_decay;
  } else {
    out.limit = Extended(1.0 / m.limit->value());
    out.decay = m.decay;
    out.log_decay = m.log_decay;
  }
  return out;
}

std::vector<std::pair<Complex, int>> divisor_of(const MeromFn& f) {
  std::vector<std::pair<Complex, int>> out;
  for (const Pole& p : f.poles) out.emplace_back(p.location, p.order);
  for (const Pole& z : f.zeros) out.emplace_back(z.location, -z.order);
  return out;
}

void set_divisor(MeromFn& f, const std::vector<std::pair<Complex, int>>& entries) {
  std::vector<std::pair<Complex, int>> merged;
  for (const auto& [loc, ord] : entries) {
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const auto& e) { return same_point(e.first, loc); });
    if (it == merged.end()) {
      merged.emplace_back(loc, ord);
    } else {
      it->second += ord;
    }
  }
  f.poles.clear();
  f.zeros.clear();
  for (const auto& [loc, ord] : merged) {
    if (ord > 0) f.poles.push_back({loc, ord});
    if (ord < 0) f.zeros.push_back({loc, -ord});
  }
}

double probe_angle(const MeromFn& f) {
  if (f.domain.phi && *f.domain.phi > kPi / 4) return 0.5 * (*f.domain.phi + kPi / 2);
  return kPi / 4;
}

}  // namespace

RationalFactors RationalFactors::from_coefficients(const std::vector<Complex>& numerator,
                                                   const std::vector<Complex>& denominator) {
  std::vector<Complex> num = numerator;
  std::vector<Complex> den = denominator;
  trim(num);
  trim(den);
  if (den.empty()) throw InputError("denominator polynomial is zero");
  RationalFactors r;
  if (num.empty()) {
    r.scale = 0.0;
    return r;
  }
  r.scale = num.back() / den.back();
  for (Complex z : roots_of(num)) r.factors.emplace_back(z, 1);
  for (Complex z : roots_of(den)) r.factors.emplace_back(z, -1);
  r.normalize();
  return r;
}

Complex RationalFactors::operator()(Complex z) const {
  Complex v = scale;
  for (const auto& [root, power] : factors) v *= ipow(z - root, power);
  return v;
}

int RationalFactors::order_at(Complex d) const {
  int k = 0;
  for (const auto& [root, power] : factors) {
    if (same_point(root, d)) k += power;
  }
  return k;
}

int RationalFactors::degree() const {
  int k = 0;
  for (const auto& f : factors) k += f.second;
  return k;
}

RationalFactors RationalFactors::operator*(const RationalFactors& other) const {
  RationalFactors r;
  r.scale = scale * other.scale;
  r.factors = factors;
  r.factors.insert(r.factors.end(), other.factors.begin(), other.factors.end());
  r.normalize();
  return r;
}

RationalFactors RationalFactors::reciprocal() const {
  if (scale == 0.0) throw PreconditionError("reciprocal of the zero function");
  RationalFactors r;
  r.scale = 1.0 / scale;
  for (const auto& [root, power] : factors) r.factors.emplace_back(root, -power);
  return r;
}

void RationalFactors::normalize() {
  std::vector<std::pair<Complex, int>> merged;
  for (const auto& [root, power] : factors) {
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const auto& e) { return same_point(e.first, root); });
    if (it == merged.end()) {
      merged.emplace_back(root, power);
    } else {
      it->second += power;
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(), [](const auto& e) { return e.second == 0; }),
               merged.end());
  if (scale == 0.0) merged.clear();
  factors = std::move(merged);
}

std::pair<std::vector<Complex>, std::vector<Complex>> RationalFactors::polynomials() const {
  std::vector<Complex> num{scale};
  std::vector<Complex> den{1.0};
  for (const auto& [root, power] : factors) {
    const std::vector<Complex> lin{-root, 1.0};
    for (int i = 0; i < std::abs(power); ++i) {
      if (power > 0) {
        num = poly_mul(num, lin);
      } else {
        den = poly_mul(den, lin);
      }
    }
  }
  return {num, den};
}

std::string RationalFactors::to_string() const {
  std::ostringstream out;
  out << "(" << scale.real() << (scale.imag() < 0 ? "" : "+") << scale.imag() << "i)";
  for (const auto& [root, power] : factors) {
    out << "(z-(" << root.real() << (root.imag() < 0 ? "" : "+") << root.imag() << "i))^" << power;
  }
  return out.str();
}

PointMeta MeromFn::at(SingularPoint d) const {
  if (a == 0.0 && d == SingularPoint::MinusA) d = SingularPoint::PlusA;
  auto it = meta.find(d);
  return it == meta.end() ? PointMeta{} : it->second;
}

Extended MeromFn::limit(SingularPoint d) const {
  const PointMeta m = at(d);
  if (!m.limit) throw UndeclaredLimit("no limit declared for " + label + " at " + to_string(d));
  return *m.limit;
}

double MeromFn::phi_for(double omega) const {
  const double phi = domain.phi.value_or(omega / 2);
  if (!(phi > 0.0) || phi >= omega) {
    throw GeometryError("function domain angle must lie in (0, omega)");
  }
  return phi;
}

std::vector<Pole> MeromFn::active_poles(double omega) const {
  const double phi = domain.phi.value_or(omega / 2);
  std::vector<Pole> out;
  for (const Pole& p : poles) {
    if (distance_to_closed_bisector(phi, a, p.location) > 1e-12 * std::max(1.0, std::abs(p.location))) {
      continue;
    }
    bool inside_ball = false;
    for (const auto& [d, s] : domain.s) {
      if (d == SingularPoint::Infinity) {
        inside_ball = inside_ball || (s > 0.0 && std::abs(p.location) > 1.0 / s);
      } else {
        inside_ball = inside_ball || std::abs(p.location - location(d, a).value()) < s;
      }
    }
    if (!inside_ball) out.push_back(p);
  }
  return out;
}

MeromFn make_rational(const RationalFactors& r, double a, std::string label) {
  MeromFn f;
  f.a = a;
  f.rational = r;
  f.rational->normalize();
  const RationalFactors rr = *f.rational;
  f.eval = [rr](Complex z) { return rr(z); };
  std::vector<std::pair<Complex, int>> divisor;
  for (const auto& [root, power] : rr.factors) divisor.emplace_back(root, -power);
  set_divisor(f, divisor);
  for (SingularPoint d : singular_points(a)) f.meta[d] = rational_meta(rr, d, a);
  f.label = std::move(label);
  return f;
}

MeromFn make_constant(Complex c, double a) {
  RationalFactors r;
  r.scale = c;
  std::ostringstream label;
  label << "const(" << c.real() << "," << c.imag() << ")";
  return make_rational(r, a, label.str());
}

MeromFn make_identity(double a) {
  RationalFactors r;
  r.factors.emplace_back(0.0, 1);
  return make_rational(r, a, "z");
}

MeromFn make_sqrt_branch(double a, Complex center, Complex scale) {
  MeromFn f;
  f.a = a;
  f.eval = [center, scale](Complex z) { return scale * std::sqrt(z - center); };
  for (SingularPoint d : singular_points(a)) {
    PointMeta m;
    if (d == SingularPoint::Infinity) {
      m.limit = Extended::infinity();
      m.growth = 0.5;
    } else {
      const Complex p = location(d, a).value();
      if (std::abs(p - center) <= 1e-12) {
        m.limit = Extended(0.0);
        m.decay = 0.5;
      } else {
        m.limit = Extended(scale * std::sqrt(p - center));
        m.decay = 1.0;
      }
    }
    f.meta[d] = m;
  }
  f.label = "sqrt";
  return f;
}

MeromFn make_log_branch(double a, Complex center, double power, Complex scale) {
  MeromFn f;
  f.a = a;
  f.eval = [center, power, scale](Complex z) { return scale * std::pow(std::log(z - center), power); };
  for (SingularPoint d : singular_points(a)) {
    PointMeta m;
    const bool at_center = d != SingularPoint::Infinity && std::abs(location(d, a).value() - center) <= 1e-12;
    if (d == SingularPoint::Infinity || at_center) {
      if (power > 0) {
        m.limit = Extended::infinity();
        m.log_growth = power;
      } else if (power < 0) {
        m.limit = Extended(0.0);
        m.log_decay = -power;
      } else {
        m.limit = Extended(scale);
        m.decay = kInf;
      }
    } else {
      const Complex w = std::log(location(d, a).value() - center);
      if (w == 0.0) {
        if (power > 0) {
          m.limit = Extended(0.0);
          m.decay = power;
        } else if (power < 0) {
          m.limit = Extended::infinity();
          m.growth = -power;
        } else {
          m.limit = Extended(scale);
          m.decay = kInf;
        }
      } else {
        m.limit = Extended(scale * std::pow(w, power));
        m.decay = 1.0;
      }
    }
    f.meta[d] = m;
  }
  f.label = "log^" + std::to_string(power);
  return f;
}

MeromFn product(const MeromFn& f, const MeromFn& g) {
  if (f.a != g.a) throw PreconditionError("product of functions on different half-widths");
  MeromFn h;
  h.a = f.a;
  const auto fe = f.eval;
  const auto ge = g.eval;
  h.eval = [fe, ge](Complex z) { return fe(z) * ge(z); };
  h.label = "(" + f.label + ")*(" + g.label + ")";
  if (f.domain.phi || g.domain.phi) {
    h.domain.phi = std::max(f.domain.phi.value_or(0.0), g.domain.phi.value_or(0.0));
  }
  h.domain.s = f.domain.s;
  for (const auto& [d, s] : g.domain.s) h.domain.s[d] = std::max(h.domain.s[d], s);
  if (f.rational && g.rational) {
    MeromFn exact = make_rational(*f.rational * *g.rational, f.a, h.label);
    exact.domain = h.domain;
    return exact;
  }
  auto divisor = divisor_of(f);
  const auto gd = divisor_of(g);
  divisor.insert(divisor.end(), gd.begin(), gd.end());
  set_divisor(h, divisor);
  const double angle = probe_angle(h);
  for (SingularPoint d : singular_points(h.a)) {
    h.meta[d] = combine_product(f.at(d), g.at(d), [&h, d, angle]() { return estimate_limit(h, d, angle); });
  }
  return h;
}

MeromFn reciprocal(const MeromFn& f) {
  if (f.rational) {
    MeromFn r = make_rational(f.rational->reciprocal(), f.a, "1/(" + f.label + ")");
    r.domain = f.domain;
    return r;
  }
  MeromFn r;
  r.a = f.a;
  const auto fe = f.eval;
  r.eval = [fe](Complex z) { return 1.0 / fe(z); };
  r.poles = f.zeros;
  r.zeros = f.poles;
  r.domain = f.domain;
  for (SingularPoint d : singular_points(f.a)) r.meta[d] = reciprocal_meta(f.at(d));
  r.label = "1/(" + f.label + ")";
  return r;
}

std::string to_string(Regularity r) {
  switch (r) {
    case Regularity::Regular: return "Regular";
    case Regularity::QuasiRegular: return "QuasiRegular";
    case Regularity::Inconclusive: return "Inconclusive";
  }
  return "?";
}

}  // namespace speccalc
