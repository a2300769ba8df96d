// SPDX-License-Identifier: Apache-2.0
#include "speccalc/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "speccalc/errors.hpp"

namespace speccalc {

namespace {

Complex polar1(double theta) { return {std::cos(theta), std::sin(theta)}; }

std::vector<EigenCluster> cluster_eigenvalues(const Eigen::VectorXcd& eig, double tol) {
  const int n = static_cast<int>(eig.size());
  std::vector<int> label(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    label[i] = next;
    std::vector<int> stack{i};
    while (!stack.empty()) {
      const int j = stack.back();
      stack.pop_back();
      for (int k = 0; k < n; ++k) {
        if (label[k] < 0 && std::abs(eig(k) - eig(j)) <= tol) {
          label[k] = next;
          stack.push_back(k);
        }
      }
    }
    ++next;
  }
  std::vector<EigenCluster> out(next, EigenCluster{0.0, 0});
  for (int i = 0; i < n; ++i) {
    out[label[i]].value += eig(i);
    out[label[i]].multiplicity += 1;
  }
  for (auto& c : out) {
    c.value /= static_cast<double>(c.multiplicity);
    // Snap round-off noise so exact inputs give exact values.
    if (std::abs(c.value.real()) <= tol * 1e-3) c.value.real(0.0);
    if (std::abs(c.value.imag()) <= tol * 1e-3) c.value.imag(0.0);
  }
  return out;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

std::string fmt(Complex z) {
  std::ostringstream out;
  out << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return out.str();
}

}  // namespace

DenseOperator::DenseOperator(Matrix matrix, double omega, double a)
    : matrix_(std::move(matrix)), omega_(omega), a_(a) {
  if (matrix_.rows() != matrix_.cols()) throw InputError("matrix must be square");
  region().validate();
  norm_ = matrix_.rows() > 0 ? spectral_norm(matrix_) : 0.0;
  if (matrix_.rows() > 0) {
    Eigen::ComplexEigenSolver<Matrix> solver(matrix_, false);
    clusters_ = cluster_eigenvalues(solver.eigenvalues(), 1e-8 * std::max(1.0, norm_));
  }
}

BisectorRegion DenseOperator::region() const {
  BisectorRegion r;
  r.omega = omega_;
  r.a = a_;
  return r;
}

bool DenseOperator::is_eigenvalue(Complex z) const {
  const double tol = 1e-8 * std::max(1.0, norm_);
  return std::any_of(clusters_.begin(), clusters_.end(),
                     [&](const EigenCluster& c) { return std::abs(c.value - z) <= tol; });
}

void DenseOperator::check_regular(Complex z) const {
  for (const auto& c : clusters_) {
    if (std::abs(c.value - z) <= kSingularTol * std::max(1.0, std::abs(z))) {
      throw SingularResolvent("z = " + fmt(z) + " is an eigenvalue");
    }
  }
}

Vector DenseOperator::resolve(Complex z, const Vector& rhs) const {
  check_regular(z);
  const Matrix shifted = z * Matrix::Identity(size(), size()) - matrix_;
  return shifted.partialPivLu().solve(rhs);
}

Matrix DenseOperator::resolvent(Complex z) const {
  check_regular(z);
  const Matrix shifted = z * Matrix::Identity(size(), size()) - matrix_;
  return shifted.partialPivLu().inverse();
}

Complex Tail::sample(int k) const {
  if (k < 1) throw PreconditionError("tail index starts at 1");
  if (kind == Kind::Samples) {
    if (k > static_cast<int>(samples.size())) throw PreconditionError("tail sample beyond the stored horizon");
    return samples[k - 1];
  }
  const Complex step = base * std::pow(ratio, k);
  return limit.is_infinite() ? step : limit.value() + step;
}

std::vector<Complex> Tail::enumerate(int horizon) const {
  std::vector<Complex> out;
  const int n = kind == Kind::Samples ? std::min<int>(horizon, static_cast<int>(samples.size())) : horizon;
  out.reserve(n);
  for (int k = 1; k <= n; ++k) out.push_back(sample(k));
  return out;
}

DiagonalModel::DiagonalModel(std::vector<Atom> atoms, std::vector<Tail> tails, double omega, double a,
                             int horizon)
    : atoms_(std::move(atoms)), tails_(std::move(tails)), omega_(omega), a_(a), horizon_(horizon) {
  if (horizon_ < 4) throw InputError("tail horizon must be at least 4");
}

BisectorRegion DiagonalModel::region() const {
  BisectorRegion r;
  r.omega = omega_;
  r.a = a_;
  return r;
}

bool DiagonalModel::unbounded() const {
  return std::any_of(tails_.begin(), tails_.end(), [](const Tail& t) { return t.limit.is_infinite(); });
}

void DiagonalModel::validate() const {
  region().validate();
  auto check = [&](Complex z, const std::string& what) {
    if (distance_to_closed_bisector(omega_, a_, z) > 1e-9 * std::max(1.0, std::abs(z))) {
      throw GeometryError(what + " " + fmt(z) + " lies outside the closed bisector");
    }
  };
  for (const Atom& atom : atoms_) {
    if (atom.mult == Count(0)) throw InputError("atom multiplicity must be positive");
    check(atom.value, "atom");
  }
  for (const Tail& tail : tails_) {
    if (tail.limit.is_finite()) check(tail.limit.value(), "tail limit");
    const auto s = tail.enumerate(horizon_);
    for (Complex z : s) check(z, "tail element");
    if (tail.kind == Tail::Kind::Geometric) {
      const double r = std::abs(tail.ratio);
      if (tail.base == 0.0) throw InputError("geometric tail needs a nonzero base");
      if (tail.limit.is_finite() && !(r < 1.0)) throw InputError("tail with finite limit needs |ratio| < 1");
      if (tail.limit.is_infinite() && !(r > 1.0)) throw InputError("tail towards infinity needs |ratio| > 1");
    }
  }
}

bool DiagonalModel::is_eigenvalue(Complex z, double tol) const {
  for (const Atom& atom : atoms_) {
    if (is_close(atom.value, z, tol)) return true;
  }
  for (const Tail& tail : tails_) {
    for (Complex s : tail.enumerate(horizon_)) {
      if (tail.limit.is_finite() && is_close(s, tail.limit.value(), kMergeTol)) continue;
      if (is_close(s, z, tol)) return true;
    }
  }
  return false;
}

DiagonalModel DiagonalModel::resolve(Complex z) const {
  auto guard = [&](Complex lambda) {
    if (std::abs(lambda - z) <= kSingularTol * std::max(1.0, std::abs(z))) {
      throw SingularResolvent("z = " + fmt(z) + " is in the spectrum");
    }
  };
  for (const Atom& atom : atoms_) guard(atom.value);
  for (const Tail& tail : tails_) {
    if (tail.limit.is_finite()) guard(tail.limit.value());
    for (Complex s : tail.enumerate(horizon_)) guard(s);
  }
  return map_model(
      *this, [z](Complex lambda) { return 1.0 / (z - lambda); },
      [z](const Extended& d) { return d.is_infinite() ? Extended(0.0) : Extended(1.0 / (z - d.value())); });
}

DiagonalModel map_model(const DiagonalModel& op, const std::function<Complex(Complex)>& g,
                        const std::function<Extended(const Extended&)>& limit_image) {
  std::vector<Atom> atoms;
  for (const Atom& atom : op.atoms()) atoms.push_back({g(atom.value), atom.mult});
  std::vector<Tail> tails;
  const int K = op.horizon();
  for (const Tail& tail : op.tails()) {
    // Elements that have merged with the limit are not separate eigenvalues.
    std::vector<Complex> pre;
    for (Complex s : tail.enumerate(K)) {
      if (tail.limit.is_finite() && is_close(s, tail.limit.value(), kMergeTol)) continue;
      pre.push_back(s);
    }
    if (pre.empty()) continue;
    std::vector<Complex> image;
    for (Complex s : pre) image.push_back(g(s));
    const int n = static_cast<int>(image.size());
    const Complex v = image.back();
    int k0 = n - 1;
    while (k0 > 0 && image[k0 - 1] == v) --k0;
    // Constancy only counts where the preimages are still resolvable from the
    // limit; otherwise it is round-off collapsing onto f(limit).
    const bool resolvable =
        tail.limit.is_infinite() ||
        std::abs(pre[k0] - tail.limit.value()) > 1e-6 * std::max(1.0, std::abs(tail.limit.value()));
    if (n >= 2 && k0 <= n / 2 && resolvable) {
      // Eventually constant image: all but finitely many eigenvectors share v.
      for (int k = 0; k < k0; ++k) atoms.push_back({image[k], Count(1)});
      atoms.push_back({v, Count::infinite()});
      continue;
    }
    Tail mapped;
    mapped.kind = Tail::Kind::Samples;
    mapped.samples = std::move(image);
    mapped.limit = limit_image(tail.limit);
    tails.push_back(std::move(mapped));
  }
  return DiagonalModel(std::move(atoms), std::move(tails), op.omega(), op.a(), K);
}

BisectorRegion region_of(const OperatorModel& op) {
  return std::visit([](const auto& o) { return o.region(); }, op);
}

SpectralSet spectrum(const DenseOperator& op) {
  SpectralSet s;
  for (const auto& c : op.clusters()) s.add_atom(c.value, Count(static_cast<std::uint64_t>(c.multiplicity)));
  return s;
}

SpectralSet spectrum(const DiagonalModel& op) {
  SpectralSet s;
  for (const Atom& atom : op.atoms()) s.add_atom(atom.value, atom.mult);
  for (const Tail& tail : op.tails()) {
    const auto samples = tail.enumerate(op.horizon());
    for (Complex z : samples) {
      if (tail.limit.is_finite() && is_close(z, tail.limit.value(), kMergeTol)) continue;
      s.add_atom(z, Count(1));
    }
    if (tail.limit.is_infinite()) {
      s.add({Extended::infinity(), PointTag::Infinity, Count(0), samples});
    } else {
      s.add_accumulation(tail.limit.value(), samples);
    }
  }
  return s;
}

SpectralSet spectrum(const OperatorModel& op) {
  return std::visit([](const auto& o) { return spectrum(o); }, op);
}

std::vector<SingularPoint> singular_set(const OperatorModel& op) {
  const BisectorRegion region = region_of(op);
  const SpectralSet s = spectrum(op);
  std::vector<SingularPoint> out;
  for (SingularPoint d : singular_points(region.a)) {
    const Extended p = location(d, region.a);
    const double tol = std::holds_alternative<DenseOperator>(op)
                           ? 1e-8 * std::max(1.0, std::get<DenseOperator>(op).norm())
                           : kMergeTol;
    if (s.contains(p, tol)) out.push_back(d);
  }
  return out;
}

bool is_eigenvalue(const OperatorModel& op, Complex z) {
  return std::visit([z](const auto& o) { return o.is_eigenvalue(z); }, op);
}

CertifyResult certify_bisectorial(const DenseOperator& op, int sample_count) {
  const double omega = op.omega();
  const double a = op.a();
  const double tol = 1e-8 * std::max(1.0, op.norm());
  for (const auto& c : op.clusters()) {
    if (distance_to_closed_bisector(omega, a, c.value) > tol) {
      throw NotBisectorial("eigenvalue " + fmt(c.value) + " lies outside the closed bisector");
    }
  }
  CertifyResult result;
  if (op.size() == 0) {
    result.certified = true;
    return result;
  }
  const int half = std::max(30, sample_count / 2);
  auto bound_at = [&](Complex lambda) {
    const Matrix r = op.resolvent(lambda);
    const double weight = std::min(std::abs(lambda - a), std::abs(lambda + a));
    return weight * spectral_norm(r);
  };
  for (double frac : {0.25, 0.5, 0.75, 0.9}) {
    const double wp = omega * frac;
    for (int side = 0; side < 2; ++side) {
      const Complex apex = side == 0 ? Complex(a, 0.0) : Complex(-a, 0.0);
      const Complex axis = side == 0 ? 1.0 : -1.0;
      for (int m = 0; m <= 4; ++m) {
        const double theta = -wp + 2.0 * wp * m / 4.0;
        const Complex dir = axis * polar1(theta);
        std::vector<double> near_values;
        for (int j = -half; j <= half; ++j) {
          const double t = std::ldexp(1.0, j);
          const Complex lambda = apex + t * dir;
          double v = 0.0;
          try {
            v = bound_at(lambda);
          } catch (const SingularResolvent&) {
            throw NotBisectorial("resolvent singular at sample " + fmt(lambda));
          }
          if (!std::isfinite(v)) throw NotBisectorial("resolvent bound not finite at " + fmt(lambda));
          result.constant = std::max(result.constant, v);
          if (j <= -20 && j >= -30) near_values.push_back(v);
        }
        // Geometric growth as the sample approaches ±a.
        if (near_values.size() == 11 && near_values.front() > 100.0 * std::max(near_values.back(), 1e-300) &&
            near_values.front() > 1.0) {
          throw NotBisectorial("resolvent bound grows near " + fmt(apex));
        }
      }
    }
  }
  result.certified = true;
  return result;
}

}  // namespace speccalc
