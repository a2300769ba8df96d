// SPDX-License-Identifier: Apache-2.0
#include "speccalc/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "speccalc/errors.hpp"
#include "speccalc/quadrature.hpp"

namespace speccalc {

namespace {

constexpr int kCircleNodes = 128;

// (zI − A)^{-1} without the eigenvalue guard; graded contours come closer to
// the spectrum than the public resolvent allows.
Matrix raw_resolvent(const Matrix& a, Complex z) {
  const Matrix shifted = z * Matrix::Identity(a.rows(), a.cols()) - a;
  return shifted.partialPivLu().inverse();
}

class PanelIntegrator {
public:
  PanelIntegrator(const std::function<Complex(Complex)>& g, const Matrix& a, const ContourPath& path,
                  const CalculusOptions& opts, QuadratureReport& report)
      : g_(g), a_(a), path_(path), opts_(opts), report_(report) {
    int segments = 0;
    for (const auto& s : path.segments) segments += s.kind == SegmentKind::TruncationArc ? 0 : 1;
    threshold_ = opts.tol / std::max(1, segments);
  }

  Matrix run() {
    Matrix total = Matrix::Zero(a_.rows(), a_.cols());
    for (const Panel& p : path_.panels) {
      if (path_.segments[p.segment].kind == SegmentKind::TruncationArc) continue;
      total += refine(p, sum(p), 0);
    }
    return total;
  }

private:
  Matrix sum(const Panel& p) {
    Matrix acc = Matrix::Zero(a_.rows(), a_.cols());
    for (const ContourNode& node : panel_nodes(path_, p, opts_.nodes_per_panel)) {
      ++report_.nodes;
      const Complex v = g_(node.z);
      if (v == 0.0) continue;
      if (!std::isfinite(std::abs(v))) throw QuadratureDiverged("integrand not finite on the contour");
      acc += (v * node.weight / Complex(0.0, 2.0 * kPi)) * raw_resolvent(a_, node.z);
    }
    return acc;
  }

  Matrix refine(const Panel& p, const Matrix& whole, int depth) {
    const double mid = 0.5 * (p.t0 + p.t1);
    const Panel left{p.segment, p.t0, mid};
    const Panel right{p.segment, mid, p.t1};
    const Matrix ql = sum(left);
    const Matrix qr = sum(right);
    const Matrix halves = ql + qr;
    const double err = (whole - halves).norm();
    if (err <= threshold_ * std::max(1.0, halves.norm())) {
      ++report_.panels;
      return halves;
    }
    if (depth >= opts_.max_depth) {
      throw QuadratureDiverged("panel refinement exceeded depth " + std::to_string(opts_.max_depth));
    }
    ++report_.refinement_steps;
    return refine(left, ql, depth + 1) + refine(right, qr, depth + 1);
  }

  const std::function<Complex(Complex)>& g_;
  const Matrix& a_;
  const ContourPath& path_;
  const CalculusOptions& opts_;
  QuadratureReport& report_;
  double threshold_ = 0.0;
};

bool result_bounded(const DiagonalModel& m) {
  if (m.unbounded()) return false;
  return std::all_of(m.atoms().begin(), m.atoms().end(),
                     [](const Atom& at) { return std::isfinite(std::abs(at.value)); });
}

DiagonalModel map_function(const MeromFn& f, const DiagonalModel& op) {
  const double omega = op.omega();
  auto g = [&](Complex lambda) {
    const Extended v = scalar_image(f, Extended(lambda), omega);
    return v.is_infinite() ? Complex(kInf, 0.0) : v.value();
  };
  auto lim = [&](const Extended& d) { return scalar_image(f, d, omega); };
  return map_model(op, g, lim);
}

RationalFactors times_resolvent_factor(const RationalFactors& e, Complex b) {
  // e · 1/(b − z) = e · (−1)(z − b)^{-1}
  RationalFactors extra;
  extra.scale = -1.0;
  extra.factors.emplace_back(b, -1);
  return e * extra;
}

Matrix regularized_dense(const MeromFn& f, const RationalFactors& e, const DenseOperator& dense,
                         const OperatorModel& op, const CalculusOptions& opts, QuadratureReport& report,
                         std::vector<std::string>& warnings) {
  const MeromFn ef = product(make_rational(e, dense.a(), "e"), f);
  CalculusOptions inner = opts;
  inner.check_independence = false;
  CalculusResult x = apply_primary(ef, op, inner);
  report.panels += x.report.panels;
  report.nodes += x.report.nodes;
  report.refinement_steps += x.report.refinement_steps;
  const Matrix E = apply_rational(e, dense.matrix());
  Eigen::JacobiSVD<Matrix> svd(E);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
  if (sv.size() && !(smin > 1e-13 * smax)) throw RegularizerNotInjective("e(A) is singular");
  if (sv.size() && smax / smin > 1e10) warnings.push_back("e(A) is ill-conditioned");
  return E.partialPivLu().solve(std::get<DenseOperator>(x.op).matrix());
}

}  // namespace

Complex default_base_point(const OperatorModel& op) { return Complex(region_of(op).a + 1.0, 0.0); }

Matrix apply_rational(const RationalFactors& r, const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  const Matrix id = Matrix::Identity(n, n);
  Matrix out = r.scale * id;
  for (const auto& [root, power] : r.factors) {
    if (power > 0) {
      for (int k = 0; k < power; ++k) out = out * (a - root * id);
    }
  }
  for (const auto& [root, power] : r.factors) {
    if (power < 0) {
      const Matrix m = a - root * id;
      Eigen::FullPivLU<Matrix> lu(m);
      if (!lu.isInvertible()) throw SingularResolvent("rational factor pole at an eigenvalue");
      for (int k = 0; k < -power; ++k) out = lu.solve(out);
    }
  }
  return out;
}

ContourPath calculus_contour(const MeromFn& f, const DenseOperator& op, int nodes_per_panel) {
  BisectorRegion region = op.region();
  const SpectralSet spec = spectrum(op);
  const RadiusMap r = distance_data(spec, region);
  for (const auto& [d, rd] : r) {
    auto it = f.domain.s.find(d);
    region.excluded[d] = it == f.domain.s.end() ? 0.0 : it->second;
    if (region.excluded[d] >= rd) throw GeometryError("function domain ball at " + to_string(d) + " reaches the spectrum");
  }
  const double phi = f.phi_for(region.omega);
  const ContourParams params = default_contour_params(region, phi, r, spec.max_modulus());
  return build_contour(region, params.phi_prime, params.radii, params.truncation_R, nodes_per_panel);
}

Extended scalar_image(const MeromFn& f, const Extended& lambda, double omega) {
  if (lambda.is_infinite()) return f.limit(SingularPoint::Infinity);
  const Complex z = lambda.value();
  for (SingularPoint d : singular_points(f.a)) {
    if (d == SingularPoint::Infinity) continue;
    if (is_close(z, location(d, f.a).value(), kMergeTol) && f.has_limit(d)) return f.limit(d);
  }
  for (const Pole& p : f.active_poles(omega)) {
    if (is_close(z, p.location, kMergeTol)) return Extended::infinity();
  }
  const Complex v = f(z);
  if (!std::isfinite(std::abs(v))) return Extended::infinity();
  return Extended(v);
}

CalculusResult apply_primary(const MeromFn& f, const OperatorModel& op, const CalculusOptions& opts) {
  CalculusResult result;
  if (const auto* diag = std::get_if<DiagonalModel>(&op)) {
    DiagonalModel image = map_function(f, *diag);
    for (const Atom& at : image.atoms()) {
      if (!std::isfinite(std::abs(at.value))) throw PreconditionError("f has a pole at an eigenvalue");
    }
    result.bounded = result_bounded(image);
    result.op = std::move(image);
    return result;
  }
  const DenseOperator& dense = std::get<DenseOperator>(op);
  const BisectorRegion region = dense.region();
  const Complex b = opts.b.value_or(default_base_point(op));
  if (distance_to_closed_bisector(region.omega, region.a, b) <= 0.0) {
    throw PreconditionError("base point b must lie outside the closed bisector");
  }
  if (!f.active_poles(region.omega).empty()) {
    throw PreconditionError("f has poles in its domain; use the regularized calculus");
  }
  const std::vector<SingularPoint> m_a = singular_set(op);
  for (SingularPoint d : m_a) {
    if (regularity_probe(f, d, region) != Regularity::Regular) {
      throw PreconditionError("f is not regular at " + to_string(d));
    }
  }
  const EDecomposition dec = decompose_E(f, m_a, b);
  const int n = dense.size();
  const Matrix& A = dense.matrix();
  const Matrix id = Matrix::Identity(n, n);
  Matrix out = dec.coef_one * id;
  if (dec.coef_minus != 0.0) out += dec.coef_minus * (b * id - A).partialPivLu().inverse();
  if (dec.coef_plus != 0.0) out += dec.coef_plus * (b * id + A).partialPivLu().inverse();
  if (n > 0) {
    const ContourPath path = calculus_contour(f, dense, opts.nodes_per_panel);
    const auto f0 = dec.f0.eval;
    PanelIntegrator integrator(f0, A, path, opts, result.report);
    out += integrator.run();
  }
  result.op = DenseOperator(out, dense.omega(), dense.a());
  result.bounded = true;
  return result;
}

CalculusResult apply_with_regularizer(const MeromFn& f, const RationalFactors& e, const OperatorModel& op,
                                      const CalculusOptions& opts) {
  CalculusResult result;
  result.regularizer = e;
  const Complex b = opts.b.value_or(default_base_point(op));
  const RationalFactors e2 = times_resolvent_factor(e, b);
  if (const auto* diag = std::get_if<DiagonalModel>(&op)) {
    for (const Atom& at : diag->atoms()) {
      if (e(at.value) == 0.0) throw RegularizerNotInjective("e vanishes at an eigenvalue");
    }
    DiagonalModel image = map_function(f, *diag);
    if (opts.check_independence) {
      // Both regularizers reproduce f on every eigenvalue.
      double worst = 0.0;
      auto compare = [&](Complex lambda) {
        const Extended direct = scalar_image(f, Extended(lambda), diag->omega());
        if (direct.is_infinite()) return;
        const Complex v1 = (e(lambda) * direct.value()) / e(lambda);
        const Complex v2 = (e2(lambda) * direct.value()) / e2(lambda);
        worst = std::max(worst, std::abs(v1 - v2) / std::max(1.0, std::abs(v1)));
      };
      for (const Atom& at : diag->atoms()) compare(at.value);
      for (const Tail& t : diag->tails()) {
        for (Complex s : t.enumerate(diag->horizon())) compare(s);
      }
      result.independence_error = worst;
    }
    result.bounded = result_bounded(image);
    result.op = std::move(image);
    return result;
  }
  const DenseOperator& dense = std::get<DenseOperator>(op);
  const Matrix y = regularized_dense(f, e, dense, op, opts, result.report, result.warnings);
  if (opts.check_independence) {
    QuadratureReport scratch;
    std::vector<std::string> w2;
    const Matrix y2 = regularized_dense(f, e2, dense, op, opts, scratch, w2);
    result.independence_error = (y - y2).norm() / std::max(1.0, y.norm());
  }
  result.op = DenseOperator(y, dense.omega(), dense.a());
  result.bounded = true;
  return result;
}

CalculusResult apply_regularized(const MeromFn& f, const OperatorModel& op, const CalculusOptions& opts) {
  RegularizerContext ctx;
  ctx.region = region_of(op);
  ctx.m_a = singular_set(op);
  ctx.b = opts.b.value_or(default_base_point(op));
  ctx.is_eigenvalue = [&op](Complex z) { return is_eigenvalue(op, z); };
  const Regularizer reg = default_regularizer(f, ctx);
  return apply_with_regularizer(f, reg.e, op, opts);
}

ProjectionResult spectral_projection(const OperatorModel& op, const Selector& selector) {
  ProjectionResult out;
  if (const auto* dense = std::get_if<DenseOperator>(&op)) {
    const auto& clusters = dense->clusters();
    const int n = dense->size();
    Matrix p = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      SpectralPoint point{Extended(clusters[i].value), PointTag::AtomFinite,
                          Count(static_cast<std::uint64_t>(clusters[i].multiplicity)), {}};
      const bool chosen = selector(point);
      out.selected_clusters.push_back(chosen);
      if (!chosen) continue;
      out.lambda_set.add(point);
      double rho = std::max(1.0, dense->norm());
      for (std::size_t j = 0; j < clusters.size(); ++j) {
        if (j != i) rho = std::min(rho, 0.5 * std::abs(clusters[i].value - clusters[j].value));
      }
      for (int k = 0; k < kCircleNodes; ++k) {
        const Complex w = std::polar(rho, 2.0 * kPi * k / kCircleNodes);
        p += (w / static_cast<double>(kCircleNodes)) * raw_resolvent(dense->matrix(), clusters[i].value + w);
      }
    }
    out.projector = DenseOperator(p, dense->omega(), dense->a());
    out.complement_rank_finite = true;
    return out;
  }
  const DiagonalModel& diag = std::get<DiagonalModel>(op);
  const SpectralSet spec = spectrum(diag);
  auto chosen_at = [&](const Extended& v) {
    const SpectralPoint* p = spec.find(v);
    if (!p) throw PreconditionError("value not in the spectrum");
    return selector(*p);
  };
  for (const Tail& t : diag.tails()) {
    const bool sel = chosen_at(t.limit);
    for (Complex s : t.enumerate(diag.horizon())) {
      if (chosen_at(Extended(s)) != sel) throw NotClopen("selection splits a tail from its limit point");
    }
    out.selected_tails.push_back(sel);
  }
  for (const Atom& at : diag.atoms()) out.selected_atoms.push_back(chosen_at(Extended(at.value)));
  for (const auto& p : spec.points()) {
    if (selector(p)) out.lambda_set.add(p);
  }
  out.complement_rank_finite = true;
  for (std::size_t i = 0; i < diag.atoms().size(); ++i) {
    if (!out.selected_atoms[i] && diag.atoms()[i].mult.is_infinite()) out.complement_rank_finite = false;
  }
  for (std::size_t i = 0; i < diag.tails().size(); ++i) {
    if (!out.selected_tails[i]) out.complement_rank_finite = false;
  }
  auto indicator = [&](Complex lambda) { return chosen_at(Extended(lambda)) ? Complex(1.0) : Complex(0.0); };
  auto limit_indicator = [&](const Extended& d) { return Extended(chosen_at(d) ? 1.0 : 0.0); };
  out.projector = map_model(diag, indicator, limit_indicator);
  return out;
}

OperatorModel restrict_to_projection(const OperatorModel& op, const ProjectionResult& proj) {
  if (const auto* dense = std::get_if<DenseOperator>(&op)) {
    const Matrix& p = std::get<DenseOperator>(proj.projector).matrix();
    Eigen::JacobiSVD<Matrix> svd(p, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
      if (sv(i) > 1e-8 * std::max(1.0, sv(0))) ++rank;
    }
    const Matrix q = svd.matrixU().leftCols(rank);
    return DenseOperator(q.adjoint() * dense->matrix() * q, dense->omega(), dense->a());
  }
  const DiagonalModel& diag = std::get<DiagonalModel>(op);
  std::vector<Atom> atoms;
  std::vector<Tail> tails;
  for (std::size_t i = 0; i < diag.atoms().size(); ++i) {
    if (proj.selected_atoms.at(i)) atoms.push_back(diag.atoms()[i]);
  }
  for (std::size_t i = 0; i < diag.tails().size(); ++i) {
    if (proj.selected_tails.at(i)) tails.push_back(diag.tails()[i]);
  }
  return DiagonalModel(std::move(atoms), std::move(tails), diag.omega(), diag.a(), diag.horizon());
}

}  // namespace speccalc
