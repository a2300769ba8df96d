// SPDX-License-Identifier: Apache-2.0
#include "speccalc/smt.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "speccalc/errors.hpp"

namespace speccalc {
namespace {

/// Values of spectral points that make up σ̃(A), including tail samples.
std::vector<Extended> spectral_values(const SpectralSet& s) {
  std::vector<Extended> out;
  for (const SpectralPoint& p : s.points()) {
    out.push_back(p.value);
    for (Complex z : p.approach) out.push_back(Extended(z));
  }
  return out;
}

bool in_list(const std::vector<Extended>& values, const Extended& v, double tol) {
  return std::any_of(values.begin(), values.end(), [&](const Extended& w) { return w.near(v, tol); });
}

/// Values f takes at M_A.
std::vector<Extended> image_of_singular_set(const OperatorModel& op, const MeromFn& f) {
  std::vector<Extended> out;
  for (SingularPoint d : singular_set(op)) {
    if (f.has_limit(d)) out.push_back(f.limit(d));
  }
  return out;
}

Verdict judge(SetRelation rel, Expectation expected) {
  Verdict v = Verdict::Violation;
  switch (rel) {
    case SetRelation::Equal: v = Verdict::Equal; break;
    case SetRelation::LhsSubset: v = Verdict::LhsSubset; break;
    case SetRelation::RhsSubset: v = Verdict::RhsSubset; break;
    case SetRelation::Incomparable: return Verdict::Violation;
  }
  switch (expected) {
    case Expectation::Equal: return v == Verdict::Equal ? v : Verdict::Violation;
    case Expectation::LhsSubset: return v == Verdict::RhsSubset ? Verdict::Violation : v;
    case Expectation::RhsSubset: return v == Verdict::LhsSubset ? Verdict::Violation : v;
    case Expectation::Unknown: return v;
  }
  return v;
}

/// Order of the zero of f − μ at λ from Cauchy coefficients on a small circle.
int zero_order(const MeromFn& f, Complex lambda, Complex mu, double rho) {
  constexpr int kNodes = 32;
  std::vector<Complex> vals(kNodes);
  double vmax = 0.0;
  for (int j = 0; j < kNodes; ++j) {
    vals[j] = f(lambda + std::polar(rho, 2.0 * kPi * j / kNodes)) - mu;
    vmax = std::max(vmax, std::abs(vals[j]));
  }
  for (int k = 1; k < kNodes / 2; ++k) {
    Complex c{};
    for (int j = 0; j < kNodes; ++j) c += vals[j] * std::polar(1.0, -2.0 * kPi * j * k / kNodes);
    c /= static_cast<double>(kNodes);
    if (std::abs(c) > 1e-8 * std::max(vmax, 1e-300)) return k;
  }
  return kNodes / 2;
}

/// f − μ with shifted limits.
MeromFn shifted(const MeromFn& f, Complex mu) {
  MeromFn out = f;
  out.eval = [f, mu](Complex z) { return f(z) - mu; };
  for (auto& [d, m] : out.meta) {
    if (m.limit && m.limit->is_finite()) m.limit = Extended(m.limit->value() - mu);
  }
  out.zeros.clear();
  if (f.rational) {
    auto [num, den] = f.rational->polynomials();
    num.resize(std::max(num.size(), den.size()), Complex{});
    for (std::size_t k = 0; k < den.size(); ++k) num[k] -= mu * den[k];
    out.rational = RationalFactors::from_coefficients(num, den);
  }
  out.label = f.label + " - mu";
  return out;
}

/// (f − μ)/r with removable points evaluated by the mean value over a circle.
MeromFn quotient(const MeromFn& fm, const RationalFactors& r, const std::vector<Pole>& zeros, double a) {
  MeromFn g = fm;
  auto raw = [fm, r](Complex z) { return fm(z) / r(z); };
  g.eval = [raw, zeros](Complex z) {
    for (const Pole& p : zeros) {
      const double rho = 1e-3 * std::max(1.0, std::abs(p.location));
      if (std::abs(z - p.location) < 0.5 * rho) {
        constexpr int kNodes = 16;
        Complex sum{};
        for (int j = 0; j < kNodes; ++j) sum += raw(z + std::polar(rho, 2.0 * kPi * (j + 0.5) / kNodes));
        return sum / static_cast<double>(kNodes);
      }
    }
    return raw(z);
  };
  for (auto& [d, m] : g.meta) {
    if (!m.limit || m.limit->is_infinite()) continue;
    const Extended loc = location(d, a);
    const Complex rd = loc.is_infinite() ? Complex(1.0) : r(loc.value());
    m.limit = Extended(m.limit->value() / rd);
  }
  if (fm.rational) {
    RationalFactors q = *fm.rational * r.reciprocal();
    q.normalize();
    g.rational = q;
  }
  g.label = "g";
  return g;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Equal: return "Equal";
    case Verdict::LhsSubset: return "LhsSubset";
    case Verdict::RhsSubset: return "RhsSubset";
    case Verdict::Violation: return "Violation";
    case Verdict::Skipped: return "Skipped";
  }
  return "?";
}

std::string to_string(Expectation e) {
  switch (e) {
    case Expectation::Equal: return "Equal";
    case Expectation::LhsSubset: return "LhsSubset";
    case Expectation::RhsSubset: return "RhsSubset";
    case Expectation::Unknown: return "Unknown";
  }
  return "?";
}

Expectation expected_relation(int i) {
  if (i == 6) return Expectation::LhsSubset;
  if (i == 7) return Expectation::RhsSubset;
  if (i == 9) return Expectation::Unknown;
  return Expectation::Equal;
}

int SMTReport::violations() const {
  int n = 0;
  for (const auto& e : entries) {
    if (e.verdict == Verdict::Violation && e.expected != Expectation::Unknown) ++n;
  }
  return n;
}

SpectralSet image_under_f(const SpectralSet& s, const MeromFn& f, double omega) {
  SpectralSet out;
  for (const SpectralPoint& p : s.points()) {
    const Extended v = scalar_image(f, p.value, omega);
    std::vector<Complex> approach;
    for (Complex z : p.approach) {
      const Extended w = scalar_image(f, Extended(z), omega);
      if (w.is_finite()) approach.push_back(w.value());
    }
    if (v.is_infinite()) {
      out.add({Extended::infinity(), PointTag::Infinity, Count(0), std::move(approach)});
      continue;
    }
    if (p.tag == PointTag::Accumulation || p.tag == PointTag::Infinity) {
      const std::size_t n = approach.size();
      const bool constant =
          n >= 2 && std::all_of(approach.begin() + static_cast<std::ptrdiff_t>(n / 2), approach.end(),
                                [&](Complex z) { return z == v.value(); });
      if (constant) {
        out.add_atom(v.value(), Count::infinite());
        for (Complex z : approach) {
          if (z != v.value()) out.add_atom(z, Count(1));
        }
      } else {
        out.add_accumulation(v.value(), std::move(approach));
      }
      continue;
    }
    out.add_atom(v.value(), p.multiplicity);
  }
  return out;
}

SMTReport verify_smt(const OperatorModel& op, const MeromFn& f, const std::set<int>& indices,
                     const CalculusOptions& opts) {
  const double omega = region_of(op).omega;
  const CalculusResult fa = apply_regularized(f, op, opts);
  SMTReport report;
  for (int i : indices) {
    if (i < 0 || i > 9) throw InputError("spectrum index must lie in 0..9");
    SMTEntry e;
    e.index = i;
    e.expected = expected_relation(i);
    e.lhs = image_under_f(extended_spectrum(op, i), f, omega);
    e.rhs = extended_spectrum(fa.op, i);
    e.verdict = judge(compare_sets(e.lhs, e.rhs, kSetTol), e.expected);
    report.entries.push_back(std::move(e));
  }
  return report;
}

SpectralSet point_spectrum(const OperatorModel& op) {
  SpectralSet out;
  if (const auto* dense = std::get_if<DenseOperator>(&op)) {
    for (const auto& c : dense->clusters()) out.add_atom(c.value, Count(static_cast<std::uint64_t>(c.multiplicity)));
    return out;
  }
  const auto& diag = std::get<DiagonalModel>(op);
  for (const Atom& at : diag.atoms()) {
    if (std::isfinite(std::abs(at.value))) out.add_atom(at.value, at.mult);
  }
  for (const Tail& t : diag.tails()) {
    for (Complex z : t.enumerate(diag.horizon())) {
      if (t.limit.is_finite() && is_close(z, t.limit.value(), kMergeTol)) continue;
      out.add_atom(z, Count(1));
    }
  }
  return out;
}

PointSpectrumReport verify_point_spectrum(const OperatorModel& op, const MeromFn& f, const CalculusOptions& opts) {
  const double omega = region_of(op).omega;
  const CalculusResult fa = apply_regularized(f, op, opts);
  PointSpectrumReport rep;

  const SpectralSet sp = point_spectrum(op);
  std::vector<Extended> image;
  for (Complex z : sp.finite_values()) image.push_back(scalar_image(f, Extended(z), omega));
  const SpectralSet sp_f = point_spectrum(fa.op);
  const std::vector<Extended> sp_f_values = spectral_values(sp_f);

  rep.forward = true;
  if (const auto* dense = std::get_if<DenseOperator>(&op)) {
    const Matrix& fm = std::get<DenseOperator>(fa.op).matrix();
    Eigen::ComplexEigenSolver<Matrix> es(dense->matrix());
    const double scale = std::max(1.0, dense->norm());
    for (int k = 0; k < dense->size(); ++k) {
      const Complex lambda = es.eigenvalues()(k);
      Vector x = es.eigenvectors().col(k);
      x.normalize();
      // Skip numerically defective directions.
      if ((dense->matrix() * x - lambda * x).norm() > 1e-10 * scale) continue;
      const Extended fl = scalar_image(f, Extended(lambda), omega);
      if (fl.is_infinite()) {
        rep.forward = false;
        continue;
      }
      const double err = (fm * x - fl.value() * x).norm();
      rep.transport_error = std::max(rep.transport_error, err / std::max(1.0, std::abs(fl.value())));
      if (err > 1e-8 * std::max(1.0, std::abs(fl.value()))) rep.forward = false;
    }
  } else {
    for (const Extended& v : image) {
      if (v.is_infinite() || !in_list(sp_f_values, v, kSetTol)) rep.forward = false;
    }
  }

  std::vector<Extended> allowed = image;
  const std::vector<Extended> fm_a = image_of_singular_set(op, f);
  allowed.insert(allowed.end(), fm_a.begin(), fm_a.end());
  rep.condition_p = condition_P_check(f, singular_set(op), image, region_of(op));
  rep.backward = true;
  for (const Extended& v : sp_f_values) {
    if (!in_list(allowed, v, kSetTol)) rep.backward = false;
    if (rep.condition_p && !in_list(image, v, kSetTol)) rep.backward = false;
  }
  return rep;
}

FactorizationReport verify_factorization(const OperatorModel& op, const MeromFn& f, Complex mu,
                                         const CalculusOptions& opts) {
  const BisectorRegion region = region_of(op);
  const double tol_mu = 1e-9 * std::max(1.0, std::abs(mu));
  for (const Extended& v : image_of_singular_set(op, f)) {
    if (v.is_finite() && is_close(v.value(), mu, 1e-9)) {
      throw ZeroAtSingularPoint("mu is a value of f at a singular point of A");
    }
  }
  const std::vector<SingularPoint> m_a = singular_set(op);
  auto in_m_a = [&](Complex z) {
    return std::any_of(m_a.begin(), m_a.end(), [&](SingularPoint d) {
      const Extended loc = location(d, region.a);
      return loc.is_finite() && is_close(loc.value(), z, kMergeTol);
    });
  };

  const SpectralSet s = spectrum(op);
  std::vector<Complex> points;
  for (const Extended& v : spectral_values(s)) {
    if (v.is_finite()) points.push_back(v.value());
  }
  FactorizationReport rep;
  for (Complex z : points) {
    if (in_m_a(z)) continue;
    const Extended fz = scalar_image(f, Extended(z), region.omega);
    if (fz.is_infinite() || std::abs(fz.value() - mu) > tol_mu) continue;
    if (std::any_of(rep.zeros.begin(), rep.zeros.end(),
                    [&](const Pole& p) { return is_close(p.location, z, kMergeTol); })) {
      continue;
    }
    double rho = 0.1 * std::max(1.0, std::abs(z));
    for (Complex w : points) {
      if (!is_close(w, z, kMergeTol)) rho = std::min(rho, 0.25 * std::abs(w - z));
    }
    for (const Pole& p : f.poles) rho = std::min(rho, 0.25 * std::abs(p.location - z));
    rep.zeros.push_back({z, zero_order(f, z, mu, rho)});
  }

  const Complex b = opts.b.value_or(default_base_point(op));
  const RationalFactors r = rational_factor_factors(rep.zeros, b);
  const MeromFn fm = shifted(f, mu);
  const MeromFn g = quotient(fm, r, rep.zeros, region.a);

  const CalculusResult fa = apply_regularized(f, op, opts);
  if (const auto* dense = std::get_if<DenseOperator>(&op)) {
    const int n = dense->size();
    const Matrix lhs = std::get<DenseOperator>(fa.op).matrix() - mu * Matrix::Identity(n, n);
    const CalculusResult ga = apply_regularized(g, op, opts);
    const Matrix rhs = apply_rational(r, dense->matrix()) * std::get<DenseOperator>(ga.op).matrix();
    rep.residual = (lhs - rhs).norm() / std::max(1.0, lhs.norm());
    rep.ok = rep.residual <= 1e-7;
    const double scale = std::max(std::abs(mu), std::get<DenseOperator>(fa.op).norm());
    const PhiMembership m_f = classify(matrix_profile(lhs, kRankGapRatio, scale));
    for (const Pole& z : rep.zeros) {
      const PhiMembership m_z = classify(profile(op, z.location));
      for (int i = 0; i < 10; ++i) {
        if (m_f[i] && !m_z[i]) rep.profiles_consistent = false;
      }
    }
    return rep;
  }

  const auto& diag = std::get<DiagonalModel>(op);
  double worst = 0.0;
  auto check = [&](Complex lambda) {
    const Extended fl = scalar_image(f, Extended(lambda), region.omega);
    if (fl.is_infinite()) return;
    const Complex lhs = fl.value() - mu;
    const Complex rhs = r(lambda) * g(lambda);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  };
  for (const Atom& at : diag.atoms()) check(at.value);
  for (const Tail& t : diag.tails()) {
    for (Complex z : t.enumerate(diag.horizon())) check(z);
  }
  rep.residual = worst;
  rep.ok = worst <= 1e-8;
  const PhiMembership m_f = classify(profile(fa.op, mu));
  for (const Pole& z : rep.zeros) {
    const PhiMembership m_z = classify(profile(op, z.location));
    for (int i = 0; i < 10; ++i) {
      if (m_f[i] && !m_z[i]) rep.profiles_consistent = false;
    }
  }
  return rep;
}

bool verify_projection_reduction(const OperatorModel& op, int i, const CalculusOptions& opts) {
  if (i < 1 || i > 6) throw InputError("projection reduction applies to indices 1..6");
  if (std::holds_alternative<DenseOperator>(op)) return true;
  const BisectorRegion region = region_of(op);
  const SpectralSet sigma_i = extended_spectrum(op, i);
  std::vector<Complex> removed;
  for (SingularPoint d : singular_set(op)) {
    const Extended loc = location(d, region.a);
    if (loc.is_infinite() || sigma_i.contains(loc)) continue;
    removed.push_back(loc.value());
  }
  const Selector keep = [&](const SpectralPoint& p) {
    if (p.value.is_infinite()) return true;
    return std::none_of(removed.begin(), removed.end(),
                        [&](Complex z) { return is_close(z, p.value.value(), kMergeTol); });
  };
  const ProjectionResult proj = spectral_projection(op, keep);
  if (!proj.complement_rank_finite) return false;
  const OperatorModel restricted = restrict_to_projection(op, proj);

  const Complex b = opts.b.value_or(default_base_point(op));
  RationalFactors res;
  res.scale = -1.0;
  res.factors.emplace_back(b, -1);
  const std::vector<MeromFn> samples = {make_identity(region.a), make_rational(res, region.a, "1/(b-z)")};
  for (const MeromFn& f : samples) {
    const OperatorModel fa = apply_regularized(f, op, opts).op;
    const OperatorModel fr = apply_regularized(f, restricted, opts).op;
    if (compare_sets(extended_spectrum(fa, i), extended_spectrum(fr, i), kSetTol) != SetRelation::Equal) {
      return false;
    }
  }
  return true;
}

}  // namespace speccalc
