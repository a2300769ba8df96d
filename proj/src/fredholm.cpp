// SPDX-License-Identifier: Apache-2.0
#include "speccalc/fredholm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "speccalc/errors.hpp"

namespace speccalc {
namespace {

const double kSqrtEps = std::sqrt(std::numeric_limits<double>::epsilon());

/// Numerical rank with the gap check; the threshold uses max(σ_max, scale).
int numerical_rank(const Matrix& t, double gap_ratio, double scale = 0.0) {
  const int n = static_cast<int>(std::max(t.rows(), t.cols()));
  if (t.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(t);
  const auto& s = svd.singularValues();
  const double smax = std::max(s(0), scale);
  if (smax == 0.0) return 0;
  const double tau = kSqrtEps * smax * n;
  int rank = 0;
  while (rank < s.size() && s(rank) > tau) ++rank;
  if (rank > 0 && rank < s.size()) {
    const double above = s(rank - 1);
    const double below = s(rank);
    if (below > 0.0 && above / below < gap_ratio) {
      std::ostringstream os;
      os << "singular values " << above << " and " << below << " straddle the threshold " << tau;
      throw RankIndeterminate(os.str());
    }
  }
  return rank;
}

/// Orthonormal basis of the generalized null space of t, via the Riesz
/// projection of the eigenvalue cluster at 0. Perturbed Jordan blocks split
/// the zero eigenvalue by roughly δ^{1/k}, so the cluster is cut at the
/// widest relative gap among the small eigenvalues rather than at a fixed
/// tolerance.
Matrix generalized_kernel_basis(const Matrix& t, double norm, int nul) {
  const int n = static_cast<int>(t.rows());
  Eigen::ComplexEigenSolver<Matrix> es(t, false);
  std::vector<double> mod(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) mod[static_cast<std::size_t>(k)] = std::abs(es.eigenvalues()(k));
  std::sort(mod.begin(), mod.end());
  const double scale = std::max(1.0, norm);
  const double floor = std::numeric_limits<double>::epsilon() * scale;
  int cut = nul;
  double best = 0.0;
  for (int c = nul; c <= n; ++c) {
    if (c > 0 && mod[static_cast<std::size_t>(c - 1)] > 1e-3 * scale) break;
    const double lo = c > 0 ? std::max(mod[static_cast<std::size_t>(c - 1)], floor) : floor;
    const double hi = c < n ? mod[static_cast<std::size_t>(c)] : kInf;
    const double ratio = hi / lo;
    if (ratio > best) {
      best = ratio;
      cut = c;
    }
  }
  if (cut == 0) return Matrix(n, 0);
  const double lo = std::max(mod[static_cast<std::size_t>(cut - 1)], floor);
  const double radius = cut < n ? std::sqrt(lo * mod[static_cast<std::size_t>(cut)]) : norm + 1.0;
  const int nodes = 128;
  Matrix p = Matrix::Zero(n, n);
  const Matrix id = Matrix::Identity(n, n);
  for (int j = 0; j < nodes; ++j) {
    const Complex z = std::polar(radius, 2.0 * kPi * (j + 0.5) / nodes);
    // (1/2πi)∮(z − T)^{-1} dz with dz = i z dθ.
    p += (z / static_cast<double>(nodes)) * (z * id - t).partialPivLu().solve(id);
  }
  Eigen::JacobiSVD<Matrix> svd(p, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(cut);
}

Count finite(int k) { return Count(static_cast<std::uint64_t>(k)); }

}  // namespace

std::string to_string(const FredholmProfile& p) {
  std::ostringstream os;
  os << "nul=" << p.nul.to_string() << " def=" << p.def.to_string() << " ascent=" << p.ascent.to_string()
     << " descent=" << p.descent.to_string() << " range_closed=" << (p.range_closed ? "true" : "false");
  return os.str();
}

std::string PhiMembership::to_string() const {
  std::string out;
  for (int i = 0; i < 10; ++i) {
    if (member[static_cast<std::size_t>(i)]) out += static_cast<char>('0' + i);
  }
  return out;
}

const std::vector<std::pair<int, int>>& phi_inclusions() {
  static const std::vector<std::pair<int, int>> edges = {
      {0, 8}, {8, 7}, {7, 1}, {1, 3}, {1, 2}, {3, 5}, {2, 4}, {5, 6}, {4, 6}, {8, 9}};
  return edges;
}

bool respects_inclusions(const PhiMembership& m) {
  for (const auto& [sub, super] : phi_inclusions()) {
    if (m[sub] && !m[super]) return false;
  }
  return true;
}

FredholmProfile matrix_profile(const Matrix& t, double gap_ratio, double scale) {
  FredholmProfile p;
  const int n = static_cast<int>(t.rows());
  if (n == 0) return p;
  const double norm = std::max(t.cwiseAbs().rowwise().sum().maxCoeff(), scale);
  const int rank = numerical_rank(t, gap_ratio, scale);
  const int nul = n - rank;
  p.nul = finite(nul);
  p.def = finite(nul);
  if (nul == 0) return p;

  // Ranks of powers: rank(T^k) = (n − m) + rank(N^k) where N is T on its
  // generalized kernel of dimension m.
  const Matrix q = generalized_kernel_basis(t, norm, nul);
  const int m = static_cast<int>(q.cols());
  if (m < nul) throw RankIndeterminate("kernel dimension exceeds the algebraic multiplicity of 0");
  const Matrix nil = q.adjoint() * t * q;
  const double base = std::max(norm, std::numeric_limits<double>::min());
  Matrix power = Matrix::Identity(m, m);
  int prev = m;
  int ascent = m;
  for (int k = 1; k <= m + 1; ++k) {
    power = power * nil;
    const int r = numerical_rank(power, gap_ratio, std::pow(base, k));
    if (r == prev) {
      ascent = k - 1;
      break;
    }
    prev = r;
  }
  p.ascent = finite(ascent);
  p.descent = finite(ascent);
  return p;
}

FredholmProfile profile(const DenseOperator& op, Complex mu, double gap_ratio) {
  const int n = op.size();
  // Rank decisions are made relative to the size of A, not of μ − A, so that
  // μ − A ≈ 0 is recognized as rank deficient.
  return matrix_profile(mu * Matrix::Identity(n, n) - op.matrix(), gap_ratio,
                        std::max(std::abs(mu), op.norm()));
}

FredholmProfile profile(const DiagonalModel& op, Complex mu) {
  Count nul{0};
  bool accumulation = false;
  for (const Atom& atom : op.atoms()) {
    if (is_close(atom.value, mu, kMergeTol)) nul = nul + atom.mult;
  }
  for (const Tail& tail : op.tails()) {
    const bool finite_limit = tail.limit.is_finite();
    if (finite_limit && is_close(tail.limit.value(), mu, kMergeTol)) accumulation = true;
    for (Complex s : tail.enumerate(op.horizon())) {
      if (finite_limit && is_close(s, tail.limit.value(), kMergeTol)) continue;
      if (is_close(s, mu, kMergeTol)) nul = nul + Count(1);
    }
  }
  FredholmProfile p;
  p.nul = nul;
  p.range_closed = !accumulation;
  p.def = accumulation ? Count::infinite() : nul;
  // Normal operators: N(T) = N(T²), and the range of T^k stabilizes iff it is closed.
  p.ascent = nul == Count(0) ? Count(0) : Count(1);
  p.descent = accumulation ? Count::infinite() : p.ascent;
  // Hilbert space model: closed subspaces are complemented.
  p.range_complemented = p.range_closed;
  p.kernel_complemented = true;
  return p;
}

FredholmProfile profile(const OperatorModel& op, Complex mu, double gap_ratio) {
  if (const auto* dense = std::get_if<DenseOperator>(&op)) return profile(*dense, mu, gap_ratio);
  return profile(std::get<DiagonalModel>(op), mu);
}

PhiMembership classify(const FredholmProfile& p) {
  const bool nul_f = p.nul.is_finite();
  const bool def_f = p.def.is_finite() && p.range_closed;
  const bool ad_f = p.ascent.is_finite() && p.descent.is_finite();
  PhiMembership m;
  auto& b = m.member;
  b[0] = p.nul == Count(0) && p.def == Count(0) && p.range_closed;
  b[1] = nul_f && def_f;
  b[2] = nul_f && p.range_closed && p.range_complemented;
  b[3] = def_f && p.kernel_complemented;
  b[4] = nul_f && p.range_closed;
  b[5] = def_f;
  b[6] = b[4] || b[5];
  b[7] = b[1] && p.nul == p.def;
  b[8] = b[7] && ad_f && p.ascent == p.descent;
  b[9] = ad_f;
  return m;
}

Complex resolvent_point(const OperatorModel& op) {
  const BisectorRegion region = region_of(op);
  const SpectralSet s = spectrum(op);
  const double base = std::max(1.0, s.max_modulus());
  // Points off the bisector, away from every eigenvalue.
  for (int k = 0; k < 16; ++k) {
    for (const Complex dir : {Complex(1.0, 0.0), Complex(-1.0, 0.0)}) {
      const Complex z = dir * (region.a + base * (1.0 + 0.37 * k)) + Complex(0.0, 0.11 * k);
      if (in_bisector(region.omega, region.a, z)) continue;
      if (distance_to_closed_bisector(region.omega, region.a, z) <= 1e-6) continue;
      if (s.covers(Extended(z), 1e-6)) continue;
      return z;
    }
  }
  // Inside the bisector, away from the spectrum.
  for (int k = 1; k <= 64; ++k) {
    const Complex z = std::polar(base * (1.0 + 0.5 * k), 0.3 + 0.7 * k);
    if (!s.covers(Extended(z), 1e-6) && !is_eigenvalue(op, z)) return z;
  }
  throw EmptyResolvent("no point of the resolvent set was found");
}

SpectralSet extended_spectrum(const OperatorModel& op, int i, double gap_ratio) {
  if (i < 0 || i > 9) throw InputError("spectrum index must lie in 0..9");
  const SpectralSet s = spectrum(op);
  SpectralSet out;
  auto fails = [&](Complex mu) { return !classify(profile(op, mu, gap_ratio))[i]; };
  for (const SpectralPoint& point : s.points()) {
    if (point.value.is_infinite()) continue;
    const Complex mu = point.value.value();
    if (!fails(mu)) continue;
    SpectralPoint kept = point;
    if (point.tag == PointTag::Accumulation) {
      // Keep only the approach samples that are themselves in σ̃_i.
      std::vector<Complex> approach;
      for (Complex z : point.approach) {
        if (is_close(z, mu, kMergeTol) || fails(z)) approach.push_back(z);
      }
      kept.approach = std::move(approach);
    }
    out.add(kept);
  }
  // ∞ ∈ σ̃_i(A) iff 0 ∈ σ_i((μ0 − A)^{-1}).
  const Complex mu0 = resolvent_point(op);
  bool infinite = false;
  if (const auto* dense = std::get_if<DenseOperator>(&op)) {
    infinite = !classify(matrix_profile(dense->resolvent(mu0), gap_ratio))[i];
  } else {
    const DiagonalModel r = std::get<DiagonalModel>(op).resolve(mu0);
    infinite = !classify(profile(r, Complex(0.0)))[i];
  }
  if (infinite) {
    const SpectralPoint* inf = s.find(Extended::infinity());
    out.add(inf ? *inf : SpectralPoint{Extended::infinity(), PointTag::Infinity, Count(0), {}});
  }
  return out;
}

PhiMembership transformed_membership(const OperatorModel& op, Complex mu, Complex b) {
  if (is_eigenvalue(op, b)) throw PreconditionError("b must lie in the resolvent set");
  if (const auto* dense = std::get_if<DenseOperator>(&op)) {
    const int n = dense->size();
    const Matrix t = mu * Matrix::Identity(n, n) - dense->matrix();
    const double scale = std::max(std::abs(mu), dense->norm()) * dense->resolvent(b).norm();
    return classify(matrix_profile(t * dense->resolvent(b), kRankGapRatio, scale));
  }
  const auto& diag = std::get<DiagonalModel>(op);
  for (const Tail& tail : diag.tails()) {
    if (tail.limit.is_finite() && is_close(tail.limit.value(), b, kMergeTol)) {
      throw PreconditionError("b must lie in the resolvent set");
    }
  }
  const DiagonalModel t = map_model(
      diag, [mu, b](Complex l) { return (mu - l) / (b - l); },
      [mu, b](const Extended& l) {
        return l.is_infinite() ? Extended(1.0) : Extended((mu - l.value()) / (b - l.value()));
      });
  return classify(profile(t, Complex(0.0)));
}

bool resolvent_transfer_check(const OperatorModel& op, Complex mu, Complex b) {
  return classify(profile(op, mu)) == transformed_membership(op, mu, b);
}

}  // namespace speccalc
