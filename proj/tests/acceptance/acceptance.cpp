// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "speccalc/calculus.hpp"
#include "speccalc/errors.hpp"
#include "speccalc/fredholm.hpp"
#include "speccalc/smt.hpp"
#include "support/oracles.hpp"

using namespace speccalc;

namespace {

const Complex I(0.0, 1.0);

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void fail(const std::string& what) {
    pass = false;
    if (failures.size() < 8) failures.push_back(what);
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Matrix& dense_of(const OperatorModel& op) { return std::get<DenseOperator>(op).matrix(); }

// ---------------------------------------------------------------------------
// Dense corpus shared by several criteria

struct TestFn {
  std::string name;
  std::vector<Complex> num, den;
  std::function<Complex(Complex)> exact;
};

std::vector<Complex> poly_mul(const std::vector<Complex>& p, const std::vector<Complex>& q) {
  std::vector<Complex> r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

std::vector<Complex> poly_add(std::vector<Complex> p, const std::vector<Complex>& q) {
  if (p.size() < q.size()) p.resize(q.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) p[i] += q[i];
  return p;
}

// Ten rational functions holomorphic on the closed bisector; poles sit on the
// real axis beyond ±a where no bisector reaches.
std::vector<TestFn> rational_family(double a) {
  const double p = a + 3.0, q = a + 4.5;
  const std::vector<Complex> zp{-p, 1.0}, zq{-q, 1.0}, pz{p, -1.0}, zmp{p, 1.0}, zmq{q, 1.0};
  std::vector<TestFn> out;
  out.push_back({"1/(p-z)", {1.0}, pz, [=](Complex z) { return 1.0 / (p - z); }});
  out.push_back({"z/(p-z)^2", {0.0, 1.0}, poly_mul(pz, pz), [=](Complex z) { return z / ((p - z) * (p - z)); }});
  out.push_back({"(z^2+1)/((z-p)(z+p))", {1.0, 0.0, 1.0}, poly_mul(zp, zmp),
                 [=](Complex z) { return (z * z + 1.0) / ((z - p) * (z + p)); }});
  out.push_back({"z", {0.0, 1.0}, {1.0}, [](Complex z) { return z; }});
  out.push_back({"z^2", {0.0, 0.0, 1.0}, {1.0}, [](Complex z) { return z * z; }});
  out.push_back({"z^3-2z+1", {1.0, -2.0, 0.0, 1.0}, {1.0}, [](Complex z) { return z * z * z - 2.0 * z + 1.0; }});
  // 1/(z−q) + 1/(z+p)^2
  out.push_back({"1/(z-q)+1/(z+p)^2", poly_add(poly_mul(zmp, zmp), zq), poly_mul(zq, poly_mul(zmp, zmp)),
                 [=](Complex z) { return 1.0 / (z - q) + 1.0 / ((z + p) * (z + p)); }});
  out.push_back({"(z-i)/(z+p)", {-I, 1.0}, zmp, [=](Complex z) { return (z - I) / (z + p); }});
  out.push_back({"(2z^2-z+3)/((z-p)(z^2-q^2))", {3.0, -1.0, 2.0}, poly_mul(zp, poly_mul(zq, zmq)),
                 [=](Complex z) { return (2.0 * z * z - z + 3.0) / ((z - p) * (z - q) * (z + q)); }});
  out.push_back({"(z/(p-z))^3", {0.0, 0.0, 0.0, 1.0}, poly_mul(pz, poly_mul(pz, pz)),
                 [=](Complex z) { return std::pow(z / (p - z), 3); }});
  return out;
}

struct DenseCase {
  oracle::RandomDense rd;
  OperatorModel op;
  std::vector<TestFn> fns;
  std::vector<Matrix> results;  // apply_primary per function
};

std::vector<DenseCase> build_corpus(int& rejected) {
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double as[3] = {0.0, 0.5, 1.0};
  std::vector<DenseCase> out;
  rejected = 0;
  int k = 0;
  while (out.size() < 20) {
    const int n = 2 + static_cast<int>(out.size() % 11);
    const double omega = 0.5 + 0.9 * u(rng);
    const double a = as[k++ % 3];
    DenseCase c;
    c.rd = oracle::random_dense(rng, n, omega, a);
    DenseOperator dense(c.rd.matrix, omega, a);
    bool ok = false;
    try {
      ok = certify_bisectorial(dense).certified;
    } catch (const Error&) {
    }
    if (!ok) {
      ++rejected;
      continue;
    }
    c.op = dense;
    c.fns = rational_family(a);
    out.push_back(std::move(c));
  }
  return out;
}

MeromFn as_fn(const TestFn& t, double a) {
  return make_rational(RationalFactors::from_coefficients(t.num, t.den), a, t.name);
}

// ---------------------------------------------------------------------------

Outcome criterion1(std::vector<DenseCase>& corpus, int rejected) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int cases = 0;
  for (std::size_t ci = 0; ci < corpus.size(); ++ci) {
    DenseCase& c = corpus[ci];
    for (const TestFn& t : c.fns) {
      Matrix x;
      try {
        x = dense_of(apply_primary(as_fn(t, c.rd.a), c.op).op);
      } catch (const std::exception& e) {
        o.fail("op " + std::to_string(ci) + " f=" + t.name + ": " + e.what());
        c.results.emplace_back();
        continue;
      }
      c.results.push_back(x);
      const Matrix ref = oracle::eigen_function(c.rd.matrix, t.exact);
      const double err = (x - ref).norm() / ref.norm();
      worst = std::max(worst, err);
      ++cases;
      if (!(err <= 1e-8)) o.fail("op " + std::to_string(ci) + " f=" + t.name + " rel err " + fmt(err));
    }
  }
  const double secs = seconds_since(t0);
  if (!(secs < 30.0)) o.fail("runtime " + std::to_string(secs) + " s");
  o.detail = std::to_string(corpus.size()) + " operators x 10 functions (" + std::to_string(cases) +
             " cases, " + std::to_string(rejected) + " uncertified draws skipped), worst rel err " + fmt(worst) +
             ", " + fmt(secs) + " s";
  return o;
}

Outcome criterion2(const std::vector<DenseCase>& corpus) {
  Outcome o;
  double worst_axiom = 0.0, worst_mult = 0.0;
  for (std::size_t ci = 0; ci < corpus.size(); ++ci) {
    const DenseCase& c = corpus[ci];
    const double a = c.rd.a;
    const Matrix& A = c.rd.matrix;
    const int n = static_cast<int>(A.rows());
    const Matrix id = Matrix::Identity(n, n);
    const Complex b = a + 2.0;
    auto check = [&](const std::string& what, const Matrix& got, const Matrix& want) {
      const double err = (got - want).norm() / std::max(1.0, want.norm());
      worst_axiom = std::max(worst_axiom, err);
      if (!(err <= 1e-9)) o.fail("op " + std::to_string(ci) + " " + what + " err " + fmt(err));
    };
    try {
      check("1", dense_of(apply_primary(make_constant(1.0, a), c.op).op), id);
      const MeromFn rm = make_rational(RationalFactors::from_coefficients({1.0}, {b, -1.0}), a);
      const MeromFn rp = make_rational(RationalFactors::from_coefficients({1.0}, {b, 1.0}), a);
      check("1/(b-z)", dense_of(apply_primary(rm, c.op).op), (b * id - A).inverse());
      check("1/(b+z)", dense_of(apply_primary(rp, c.op).op), (b * id + A).inverse());
      check("z", dense_of(apply_regularized(make_identity(a), c.op).op), A);
    } catch (const std::exception& e) {
      o.fail("op " + std::to_string(ci) + ": " + e.what());
    }
    for (std::size_t k = 0; k + 1 < c.fns.size(); ++k) {
      if (c.results[k].size() == 0 || c.results[k + 1].size() == 0) continue;
      const MeromFn f = as_fn(c.fns[k], a), g = as_fn(c.fns[k + 1], a);
      try {
        const Matrix fg = dense_of(apply_primary(product(f, g), c.op).op);
        const Matrix prod = c.results[k] * c.results[k + 1];
        const double err = (fg - prod).norm() / std::max(1.0, c.results[k].norm() * c.results[k + 1].norm());
        worst_mult = std::max(worst_mult, err);
        if (!(err <= 1e-8)) o.fail("op " + std::to_string(ci) + " " + c.fns[k].name + " * " + c.fns[k + 1].name + " err " + fmt(err));
      } catch (const std::exception& e) {
        o.fail("op " + std::to_string(ci) + " product: " + e.what());
      }
    }
  }
  o.detail = "unit, resolvents at ±b and identity worst " + fmt(worst_axiom) + "; multiplicativity over " +
             std::to_string(corpus.size() * 9) + " pairs worst " + fmt(worst_mult);
  return o;
}

// Two regularizers: the default e and e·1/(b2 − z) with b2 on the far side.
RationalFactors second_regularizer(const RationalFactors& e, double a) {
  RationalFactors h;
  h.scale = -1.0;
  h.factors.emplace_back(Complex(a + 5.0, 0.0), -1);
  RationalFactors out = e * h;
  out.normalize();
  return out;
}

Outcome criterion3(std::vector<std::pair<OperatorModel, Matrix>>& dense_results) {
  Outcome o;
  std::ostringstream detail;
  int functions = 0;
  double worst_dense = 0.0;

  auto regularizer_for = [](const MeromFn& f, const OperatorModel& op) {
    RegularizerContext ctx;
    ctx.region = region_of(op);
    ctx.m_a = singular_set(op);
    ctx.b = default_base_point(op);
    ctx.is_eigenvalue = [&op](Complex z) { return is_eigenvalue(op, z); };
    return default_regularizer(f, ctx);
  };

  // Diagonal scenarios: the two regularized results must coincide exactly.
  for (const char* name : {"s06_diag_sqrt.json", "s10_diag_pole_in_bisector.json", "s09_diag_log.json"}) {
    const auto s = oracle::load(oracle::scenario_dir() / name);
    try {
      const Regularizer reg = regularizer_for(s.f, s.op);
      if (reg.identity()) o.fail(std::string(name) + ": function needs no regularization");
      const RationalFactors e2 = second_regularizer(reg.e, region_of(s.op).a);
      const auto r1 = apply_with_regularizer(s.f, reg.e, s.op);
      const auto r2 = apply_with_regularizer(s.f, e2, s.op);
      const auto& m1 = std::get<DiagonalModel>(r1.op);
      const auto& m2 = std::get<DiagonalModel>(r2.op);
      bool same = m1.atoms().size() == m2.atoms().size() && m1.tails().size() == m2.tails().size();
      for (std::size_t i = 0; same && i < m1.atoms().size(); ++i) {
        same = m1.atoms()[i].value == m2.atoms()[i].value && m1.atoms()[i].mult == m2.atoms()[i].mult;
      }
      for (std::size_t i = 0; same && i < m1.tails().size(); ++i) {
        same = m1.tails()[i].samples == m2.tails()[i].samples && m1.tails()[i].limit == m2.tails()[i].limit;
      }
      if (!same) o.fail(std::string(name) + ": regularized models differ");
      ++functions;
    } catch (const std::exception& e) {
      o.fail(std::string(name) + ": " + e.what());
    }
  }

  // Dense operators with poles of f inside the bisector.
  std::mt19937_64 rng(99);
  struct DenseFn {
    std::string name;
    MeromFn f;
    std::function<Complex(Complex)> exact;
  };
  const double a = 0.0;
  std::vector<DenseFn> fns;
  fns.push_back({"1/(z-2i)", make_rational(RationalFactors::from_coefficients({1.0}, {-2.0 * I, 1.0}), a),
                 [](Complex z) { return 1.0 / (z - 2.0 * I); }});
  fns.push_back({"1/(z-0.5i)^2+z",
                 make_rational(RationalFactors::from_coefficients(
                                   poly_add({1.0}, poly_mul({0.0, 1.0}, poly_mul({-0.5 * I, 1.0}, {-0.5 * I, 1.0}))),
                                   poly_mul({-0.5 * I, 1.0}, {-0.5 * I, 1.0})),
                               a),
                 [](Complex z) { return 1.0 / ((z - 0.5 * I) * (z - 0.5 * I)) + z; }});
  fns.push_back({"z/(z-3i)", make_rational(RationalFactors::from_coefficients({0.0, 1.0}, {-3.0 * I, 1.0}), a),
                 [](Complex z) { return z / (z - 3.0 * I); }});
  for (const DenseFn& df : fns) {
    oracle::RandomDense rd;
    // Keep eigenvalues clear of the pole.
    for (;;) {
      rd = oracle::random_dense(rng, 6, 1.1, a);
      bool clear = true;
      for (const auto& pole : df.f.poles) {
        for (Complex l : rd.eigenvalues) clear = clear && std::abs(l - pole.location) > 0.3;
      }
      if (clear) break;
    }
    const OperatorModel op = DenseOperator(rd.matrix, rd.omega, rd.a);
    try {
      const Regularizer reg = regularizer_for(df.f, op);
      if (reg.identity()) o.fail(df.name + ": function needs no regularization");
      const RationalFactors e2 = second_regularizer(reg.e, a);
      CalculusOptions opts;
      opts.check_independence = false;
      const Matrix x1 = dense_of(apply_with_regularizer(df.f, reg.e, op, opts).op);
      const Matrix x2 = dense_of(apply_with_regularizer(df.f, e2, op, opts).op);
      const double diff = (x1 - x2).norm() / x1.norm();
      worst_dense = std::max(worst_dense, diff);
      if (!(diff <= 1e-8)) o.fail(df.name + ": regularizers differ by " + fmt(diff));
      const Matrix ref = oracle::eigen_function(rd.matrix, df.exact);
      const double err = (x1 - ref).norm() / ref.norm();
      if (!(err <= 1e-8)) o.fail(df.name + ": differs from eigendecomposition by " + fmt(err));
      dense_results.emplace_back(op, x1);
      ++functions;
    } catch (const std::exception& e) {
      o.fail(df.name + ": " + e.what());
    }
  }
  detail << functions << " functions (3 diagonal identical, 3 dense worst " << fmt(worst_dense) << ")";
  o.detail = detail.str();
  return o;
}

// ‖f(A)x − f(λ)x‖ ≤ 1e-8‖x‖ for every eigenpair of A.
double transport_error(const Matrix& a, const Matrix& fa, const std::function<Complex(Complex)>& f) {
  Eigen::ComplexEigenSolver<Matrix> es(a);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    const Eigen::VectorXcd x = es.eigenvectors().col(k);
    const Complex lambda = es.eigenvalues()(k);
    // Skip numerically defective directions.
    if ((a * x - lambda * x).norm() > 1e-10 * std::max(1.0, a.norm()) * x.norm()) continue;
    worst = std::max(worst, (fa * x - f(lambda) * x).norm() / x.norm());
  }
  return worst;
}

Outcome criterion4(const std::vector<DenseCase>& corpus, const std::vector<oracle::LoadedScenario>& scenarios) {
  Outcome o;
  double worst = 0.0;
  int count = 0;
  for (std::size_t ci = 0; ci < corpus.size(); ++ci) {
    const DenseCase& c = corpus[ci];
    for (std::size_t k = 0; k < c.fns.size(); ++k) {
      if (c.results[k].size() == 0) continue;
      const double e = transport_error(c.rd.matrix, c.results[k], c.fns[k].exact);
      worst = std::max(worst, e);
      ++count;
      if (!(e <= 1e-8)) o.fail("op " + std::to_string(ci) + " f=" + c.fns[k].name + " " + fmt(e));
    }
  }
  for (const auto& s : scenarios) {
    try {
      const CalculusResult r = apply_regularized(s.f, s.op);
      ++count;
      if (const auto* d = std::get_if<DenseOperator>(&s.op)) {
        const double e = transport_error(d->matrix(), dense_of(r.op), [&](Complex z) { return s.f(z); });
        worst = std::max(worst, e);
        if (!(e <= 1e-8)) o.fail(s.meta.name + " " + fmt(e));
        continue;
      }
      // Diagonal: the k-th basis vector is an eigenvector, so its entry in
      // f(A) must be f(λ_k).
      const auto& a = std::get<DiagonalModel>(s.op);
      const auto& fa = std::get<DiagonalModel>(r.op);
      const double omega = a.omega();
      for (std::size_t i = 0; i < a.atoms().size(); ++i) {
        const Extended want = scalar_image(s.f, Extended(a.atoms()[i].value), omega);
        if (want.is_infinite()) continue;
        const double e = std::abs(fa.atoms()[i].value - want.value());
        worst = std::max(worst, e);
        if (!(e <= 1e-8)) o.fail(s.meta.name + " atom " + std::to_string(i) + " " + fmt(e));
      }
    } catch (const std::exception& e) {
      o.fail(s.meta.name + ": " + e.what());
    }
  }
  o.detail = std::to_string(count) + " computed f(A), worst " + fmt(worst) + "·‖x‖";
  return o;
}

void add_regularized_transport(Outcome& o, const std::vector<std::pair<OperatorModel, Matrix>>& regularized,
                               const std::vector<std::function<Complex(Complex)>>& exact) {
  for (std::size_t k = 0; k < regularized.size() && k < exact.size(); ++k) {
    const double e = transport_error(dense_of(regularized[k].first), regularized[k].second, exact[k]);
    if (!(e <= 1e-8)) o.fail("regularized dense case " + std::to_string(k) + " " + fmt(e));
  }
}

Outcome criterion5(const std::vector<oracle::LoadedScenario>& scenarios) {
  Outcome o;
  int used = 0, probes = 0;
  bool separated = false;
  for (const auto& s : scenarios) {
    const auto* m = std::get_if<DiagonalModel>(&s.op);
    if (!m) continue;
    ++used;
    for (Complex mu : s.meta.probes) {
      ++probes;
      const FredholmProfile want = oracle::truncation_profile(*m, mu);
      FredholmProfile got;
      try {
        got = profile(*m, mu);
      } catch (const std::exception& e) {
        o.fail(s.meta.name + " at " + Extended(mu).to_string() + ": " + e.what());
        continue;
      }
      if (!(got == want)) {
        o.fail(s.meta.name + " at " + Extended(mu).to_string() + ": model " + to_string(got) + " vs truncation " +
               to_string(want));
      }
      const PhiMembership c = classify(got);
      if (c[9] && !c[8] && !c[7]) separated = true;
    }
    if (s.meta.probes.size() < 10) o.fail(s.meta.name + " has fewer than 10 probes");
  }
  if (used < 6) o.fail("only " + std::to_string(used) + " diagonal scenarios");
  if (!separated) o.fail("no probe separates the last two classes");
  o.detail = std::to_string(probes) + " probes across " + std::to_string(used) +
             " diagonal scenarios, N = 50/100/200 truncations";
  return o;
}

Outcome criterion6(const std::vector<oracle::LoadedScenario>& scenarios) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  int entries = 0, dense = 0, diag = 0, unknown_violations = 0;
  bool accumulation_at_singular = false, isolated_singular = false;
  for (const auto& s : scenarios) {
    (std::holds_alternative<DenseOperator>(s.op) ? dense : diag)++;
    const auto m_a = singular_set(s.op);
    const SpectralSet spec = spectrum(s.op);
    for (SingularPoint d : m_a) {
      const SpectralPoint* p = spec.find(location(d, region_of(s.op).a));
      if (!p) continue;
      if (p->tag == PointTag::Accumulation) accumulation_at_singular = true;
      if (p->tag == PointTag::AtomFinite) isolated_singular = true;
    }
    SMTReport r;
    try {
      r = verify_smt(s.op, s.f, s.meta.indices);
    } catch (const std::exception& e) {
      o.fail(s.meta.name + ": " + e.what());
      continue;
    }
    for (const SMTEntry& e : r.entries) {
      ++entries;
      bool ok = true;
      switch (e.index) {
        case 6: ok = e.verdict == Verdict::Equal || e.verdict == Verdict::LhsSubset; break;
        case 7: ok = e.verdict == Verdict::Equal || e.verdict == Verdict::RhsSubset; break;
        case 9: ok = true; unknown_violations += e.verdict == Verdict::Violation; break;
        default: ok = e.verdict == Verdict::Equal;
      }
      if (!ok) o.fail(s.meta.name + " i=" + std::to_string(e.index) + " verdict " + to_string(e.verdict) + " " + e.note);
    }
    if (r.violations() != 0) o.fail(s.meta.name + ": " + std::to_string(r.violations()) + " violations");
  }
  const double secs = seconds_since(t0);
  if (dense + diag < 8 || dense == 0 || diag == 0) o.fail("scenario mix too small");
  if (!accumulation_at_singular) o.fail("no scenario accumulates at a singular point");
  if (!isolated_singular) o.fail("no scenario with an isolated singular eigenvalue");
  if (!(secs < 60.0)) o.fail("runtime " + std::to_string(secs) + " s");
  o.detail = std::to_string(dense + diag) + " scenarios (" + std::to_string(dense) + " dense), " +
             std::to_string(entries) + " entries, i=9 informational mismatches " +
             std::to_string(unknown_violations) + ", " + fmt(secs) + " s";
  return o;
}

Outcome criterion7(const std::vector<oracle::LoadedScenario>& scenarios) {
  Outcome o;
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int triples = 0, at_spectrum = 0;
  std::vector<const oracle::LoadedScenario*> diag;
  for (const auto& s : scenarios) {
    if (std::holds_alternative<DiagonalModel>(s.op)) diag.push_back(&s);
  }
  while (triples < 50) {
    OperatorModel op;
    Complex mu;
    if (triples % 2 == 0) {
      // Dense with Jordan structure.
      const double a = (triples % 4 == 0) ? 0.0 : 1.0;
      const Complex l1(0.0, 1.0 + 2.0 * u(rng)), l2(0.0, -0.5 - 2.0 * u(rng));
      const int s1 = 1 + static_cast<int>(3 * u(rng)), s2 = 1 + static_cast<int>(2 * u(rng));
      const Matrix m = oracle::jordan_matrix(rng, {{l1, s1}, {l2, s2}, {l1, 1}});
      op = DenseOperator(m, 0.9, a);
      const double pick = u(rng);
      mu = pick < 0.4 ? l1 : pick < 0.7 ? l2 : Complex(0.0, 4.0 + u(rng));
    } else {
      const auto* s = diag[static_cast<std::size_t>(u(rng) * diag.size()) % diag.size()];
      op = s->op;
      mu = s->meta.probes[static_cast<std::size_t>(u(rng) * s->meta.probes.size()) % s->meta.probes.size()];
    }
    const double a = region_of(op).a;
    const Complex b = u(rng) < 0.5 ? Complex(a + 0.5 + 3.0 * u(rng), 0.0) : Complex(-(a + 0.5 + 3.0 * u(rng)), 0.0);
    ++triples;
    try {
      const PhiMembership direct = classify(profile(op, mu));
      const PhiMembership moved = transformed_membership(op, mu, b);
      if (!direct[0]) ++at_spectrum;
      if (!(direct == moved)) {
        o.fail("mu=" + Extended(mu).to_string() + " b=" + Extended(b).to_string() + ": " + direct.to_string() +
               " vs " + moved.to_string());
      }
      if (!resolvent_transfer_check(op, mu, b)) o.fail("transfer check disagrees at mu=" + Extended(mu).to_string());
    } catch (const std::exception& e) {
      o.fail(std::string("mu=") + Extended(mu).to_string() + ": " + e.what());
    }
  }
  o.detail = std::to_string(triples) + " triples (" + std::to_string(at_spectrum) + " with mu in the spectrum)";
  return o;
}

Outcome criterion8(const std::vector<oracle::LoadedScenario>& scenarios) {
  Outcome o;
  int equality = 0;
  for (const auto& s : scenarios) {
    try {
      const PointSpectrumReport r = verify_point_spectrum(s.op, s.f);
      if (!r.forward) o.fail(s.meta.name + ": forward inclusion fails");
      if (!r.backward) o.fail(s.meta.name + ": backward bound fails");
      if (s.meta.condition_p && r.condition_p) ++equality;
    } catch (const std::exception& e) {
      o.fail(s.meta.name + ": " + e.what());
    }
  }
  o.detail = std::to_string(scenarios.size()) + " scenarios, equality enforced on " + std::to_string(equality);
  return o;
}

// Clopen components of a diagonal spectrum: each tail together with its limit
// (and any atom sitting on it), every other atom on its own.
std::vector<std::vector<Extended>> components(const DiagonalModel& m) {
  std::vector<std::vector<Extended>> out;
  auto find = [&](const Extended& v) -> int {
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (const auto& w : out[i]) {
        if (w.near(v, kMergeTol)) return static_cast<int>(i);
      }
    }
    return -1;
  };
  for (const Tail& t : m.tails()) {
    int idx = find(t.limit);
    if (idx < 0) {
      out.push_back({t.limit});
      idx = static_cast<int>(out.size()) - 1;
    }
    for (Complex s : t.enumerate(m.horizon())) out[idx].push_back(Extended(s));
  }
  for (const Atom& at : m.atoms()) {
    if (find(Extended(at.value)) < 0) out.push_back({Extended(at.value)});
  }
  return out;
}

Outcome criterion9(const std::vector<oracle::LoadedScenario>& scenarios, const std::vector<DenseCase>& corpus) {
  Outcome o;
  int selections = 0;
  double worst = 0.0;
  auto dense_check = [&](const std::string& name, const OperatorModel& op) {
    const auto& d = std::get<DenseOperator>(op);
    const int k = static_cast<int>(d.clusters().size());
    std::vector<unsigned> masks;
    if (k <= 5) {
      for (unsigned m = 1; m < (1u << k); ++m) masks.push_back(m);
    } else {
      for (int i = 0; i < k; ++i) masks.push_back(1u << i);
    }
    for (unsigned mask : masks) {
      std::vector<Complex> chosen;
      for (int i = 0; i < k; ++i) {
        if (mask & (1u << i)) chosen.push_back(d.clusters()[i].value);
      }
      const Selector sel = [&](const SpectralPoint& p) {
        for (Complex c : chosen) {
          if (p.value.is_finite() && std::abs(p.value.value() - c) < 1e-9) return true;
        }
        return false;
      };
      ++selections;
      try {
        const ProjectionResult pr = spectral_projection(op, sel);
        const Matrix& P = dense_of(pr.projector);
        const Matrix& A = d.matrix();
        const double pn = std::max(1.0, P.norm());
        const double idem = (P * P - P).norm() / (pn * pn);
        const double comm = (P * A - A * P).norm() / (pn * std::max(1.0, A.norm()));
        worst = std::max({worst, idem, comm});
        if (!(idem <= 1e-8)) o.fail(name + ": P^2 != P by " + fmt(idem));
        if (!(comm <= 1e-8)) o.fail(name + ": PA != AP by " + fmt(comm));
        const SpectralSet restricted = spectrum(restrict_to_projection(op, pr));
        if (compare_sets(restricted, pr.lambda_set, 1e-8) != SetRelation::Equal) {
          o.fail(name + ": spectrum of the restriction differs from the selection");
        }
      } catch (const std::exception& e) {
        o.fail(name + ": " + e.what());
      }
    }
  };
  for (const auto& s : scenarios) {
    if (std::holds_alternative<DenseOperator>(s.op)) {
      dense_check(s.meta.name, s.op);
      continue;
    }
    const auto& m = std::get<DiagonalModel>(s.op);
    const auto comps = components(m);
    const unsigned count = static_cast<unsigned>(comps.size());
    for (unsigned mask = 1; mask < (1u << count); ++mask) {
      auto in_selection = [&](const Extended& v) {
        for (unsigned i = 0; i < count; ++i) {
          if (!(mask & (1u << i))) continue;
          for (const auto& w : comps[i]) {
            if (w.near(v, kMergeTol)) return true;
          }
        }
        return false;
      };
      const Selector sel = [&](const SpectralPoint& p) { return in_selection(p.value); };
      ++selections;
      try {
        const ProjectionResult pr = spectral_projection(s.op, sel);
        const auto& P = std::get<DiagonalModel>(pr.projector);
        bool idem = true, comm = true;
        for (std::size_t i = 0; i < m.atoms().size(); ++i) {
          const Complex p = P.atoms()[i].value;
          idem = idem && p * p == p;
          comm = comm && p * m.atoms()[i].value == m.atoms()[i].value * p;
        }
        for (const Atom& at : P.atoms()) idem = idem && at.value * at.value == at.value;
        for (const Tail& t : P.tails()) {
          for (Complex v : t.samples) idem = idem && v * v == v;
        }
        if (!idem) o.fail(s.meta.name + ": projector entries are not 0/1");
        if (!comm) o.fail(s.meta.name + ": projector does not commute");
        const SpectralSet restricted = spectrum(restrict_to_projection(s.op, pr));
        if (compare_sets(restricted, pr.lambda_set, 0.0) != SetRelation::Equal) {
          o.fail(s.meta.name + " mask " + std::to_string(mask) + ": spectrum of the restriction differs");
        }
      } catch (const std::exception& e) {
        o.fail(s.meta.name + ": " + e.what());
      }
    }
  }
  for (std::size_t ci = 0; ci < corpus.size(); ci += 4) dense_check("corpus op " + std::to_string(ci), corpus[ci].op);
  o.detail = std::to_string(selections) + " clopen selections, dense worst " + fmt(worst) + ", diagonal exact";
  return o;
}

Outcome criterion10(const std::vector<DenseCase>& corpus, const std::vector<oracle::LoadedScenario>& scenarios) {
  Outcome o;
  int contours = 0, windings = 0;
  auto wind = [&](const std::string& name, const ContourPath& path, Complex z, double want) {
    ++windings;
    const double w = winding_number(path, z);
    if (!(std::abs(w - want) <= 1e-6)) {
      o.fail(name + ": winding " + std::to_string(w) + " about " + Extended(z).to_string());
    }
  };
  auto dense_contours = [&](const std::string& name, const DenseOperator& d, const std::vector<MeromFn>& fns) {
    const auto m_a = singular_set(OperatorModel(d));
    for (const MeromFn& f : fns) {
      ContourPath path;
      try {
        path = calculus_contour(f, d, 8);
      } catch (const std::exception& e) {
        o.fail(name + ": " + e.what());
        continue;
      }
      ++contours;
      for (const auto& cl : d.clusters()) {
        bool touching = false;
        for (SingularPoint p : m_a) {
          const Extended loc = location(p, d.a());
          touching = touching || (loc.is_finite() && std::abs(loc.value() - cl.value) < 1e-8);
        }
        if (!touching) wind(name, path, cl.value, 1.0);
      }
      wind(name, path, default_base_point(OperatorModel(d)), 0.0);
      wind(name, path, Complex(-(d.a() + 2.0), 0.0), 0.0);
    }
  };
  for (std::size_t ci = 0; ci < corpus.size(); ++ci) {
    std::vector<MeromFn> fns;
    for (const TestFn& t : corpus[ci].fns) fns.push_back(as_fn(t, corpus[ci].rd.a));
    dense_contours("corpus op " + std::to_string(ci), std::get<DenseOperator>(corpus[ci].op), fns);
  }
  for (const auto& s : scenarios) {
    if (const auto* d = std::get_if<DenseOperator>(&s.op)) dense_contours(s.meta.name, *d, {s.f});
  }

  // Nesting of domains and winding about interior points on random parameters.
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int pairs = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double omega = 0.4 + (kPi / 2 - 0.4) * u(rng);
    const double a = trial % 3 == 0 ? 0.0 : 0.3 + 1.2 * u(rng);
    const double phi = omega * (0.1 + 0.4 * u(rng));
    const double phi2 = phi + (omega - phi) * (0.2 + 0.7 * u(rng));
    BisectorRegion outer, inner;
    outer.omega = phi;
    inner.omega = phi2;
    outer.a = inner.a = a;
    RadiusMap radii;
    const double cap = a > 0.0 ? 0.8 * std::min(a, 2.0 * a * std::sin(phi2)) : 1.0;
    for (SingularPoint d : singular_points(a)) {
      if (u(rng) < 0.4) continue;
      double s2, s1;
      if (d == SingularPoint::Infinity) {
        s2 = 1.0 / (4.0 + 6.0 * u(rng));
        s1 = s2 * (0.3 + 0.6 * u(rng));
      } else {
        s2 = cap * (0.3 + 0.7 * u(rng));
        s1 = s2 * (0.3 + 0.6 * u(rng));
      }
      outer.excluded[d] = s1;
      inner.excluded[d] = s2;
      radii[d] = s2;
    }
    const double R = radii.count(SingularPoint::Infinity) ? 1.0 / radii[SingularPoint::Infinity] : 8.0;
    ContourPath path;
    try {
      BisectorRegion base = outer;
      base.omega = omega;
      path = build_contour(base, phi2, radii, R, 8);
    } catch (const std::exception& e) {
      o.fail("trial " + std::to_string(trial) + ": " + e.what());
      continue;
    }
    ++pairs;
    ++contours;
    bool nested = true;
    for (int k = 0; k < 300; ++k) {
      const Complex z((2.0 * u(rng) - 1.0) * 1.2 * R, (2.0 * u(rng) - 1.0) * 1.2 * R);
      if (membership(inner, z) && !membership(outer, z)) nested = false;
    }
    // Graded nodes on a touching ray round onto the apex itself; those are boundary points.
    const auto at_touching_apex = [&](Complex z) {
      const double eps = 1e-12 * std::max(1.0, outer.a);
      return (!outer.excluded.count(SingularPoint::PlusA) && std::abs(z - outer.a) < eps) ||
             (!outer.excluded.count(SingularPoint::MinusA) && std::abs(z + outer.a) < eps);
    };
    for (const ContourNode& n : path.nodes) nested = nested && (at_touching_apex(n.z) || membership(outer, n.z));
    if (!nested) o.fail("trial " + std::to_string(trial) + ": domains not nested");
    // Interior and exterior sample points away from the contour.
    for (int k = 0, found = 0; k < 400 && found < 3; ++k) {
      const Complex z((2.0 * u(rng) - 1.0) * R, (2.0 * u(rng) - 1.0) * R);
      if (std::abs(z) > 0.9 * R) continue;
      double gap = kInf;
      for (const ContourNode& n : path.nodes) gap = std::min(gap, std::abs(n.z - z));
      if (gap < 0.05) continue;
      if (membership(inner, z)) {
        wind("trial " + std::to_string(trial), path, z, 1.0);
        ++found;
      } else if (!in_bisector(phi, a, z)) {
        wind("trial " + std::to_string(trial), path, z, 0.0);
      }
    }
  }
  o.detail = std::to_string(contours) + " contours, " + std::to_string(windings) + " winding checks, " +
             std::to_string(pairs) + " nested parameter pairs";
  return o;
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  int rejected = 0;
  std::vector<DenseCase> corpus = build_corpus(rejected);
  const std::vector<oracle::LoadedScenario> scenarios = oracle::load_all();
  std::vector<std::pair<OperatorModel, Matrix>> regularized;

  std::vector<std::pair<std::string, Outcome>> results;
  results.emplace_back("quadrature matches eigendecomposition", criterion1(corpus, rejected));
  results.emplace_back("calculus axioms", criterion2(corpus));
  results.emplace_back("regularizer independence", criterion3(regularized));
  Outcome c4 = criterion4(corpus, scenarios);
  add_regularized_transport(c4, regularized,
                            {[](Complex z) { return 1.0 / (z - 2.0 * I); },
                             [](Complex z) { return 1.0 / ((z - 0.5 * I) * (z - 0.5 * I)) + z; },
                             [](Complex z) { return z / (z - 3.0 * I); }});
  results.emplace_back("eigenvector transport", c4);
  results.emplace_back("Fredholm profiles vs truncation", criterion5(scenarios));
  results.emplace_back("spectral mapping matrix", criterion6(scenarios));
  results.emplace_back("resolvent transfer of class membership", criterion7(scenarios));
  results.emplace_back("point spectrum mapping", criterion8(scenarios));
  results.emplace_back("projection laws", criterion9(scenarios, corpus));
  results.emplace_back("contour winding and domain nesting", criterion10(corpus, scenarios));

  int failed = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& [name, out] = results[i];
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << name << " -- " << out.detail
              << "\n";
    for (const auto& f : out.failures) std::cout << "    " << f << "\n";
    failed += out.pass ? 0 : 1;
  }
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed in "
            << fmt(seconds_since(t0)) << " s\n";
  return failed == 0 ? 0 : 1;
}
