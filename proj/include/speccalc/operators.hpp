// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <variant>
#include <vector>

#include "speccalc/core.hpp"
#include "speccalc/geometry.hpp"
#include "speccalc/spectral_set.hpp"

namespace speccalc {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kDefaultHorizon = 64;

struct EigenCluster {
  Complex value;
  int multiplicity = 1;
};

class DenseOperator {
public:
  DenseOperator() = default;
  DenseOperator(Matrix matrix, double omega, double a);

  const Matrix& matrix() const { return matrix_; }
  int size() const { return static_cast<int>(matrix_.rows()); }
  BisectorRegion region() const;
  double omega() const { return omega_; }
  double a() const { return a_; }

  /// Eigenvalue clusters (tolerance 1e-8·max(1, ‖A‖)) with algebraic multiplicity.
  const std::vector<EigenCluster>& clusters() const { return clusters_; }
  double norm() const { return norm_; }
  bool is_eigenvalue(Complex z) const;

  /// Solves (z − A)x = rhs.
  Vector resolve(Complex z, const Vector& rhs) const;
  /// (z − A)^{-1}.
  Matrix resolvent(Complex z) const;

private:
  void check_regular(Complex z) const;

  Matrix matrix_;
  double omega_ = kPi / 2;
  double a_ = 0.0;
  double norm_ = 0.0;
  std::vector<EigenCluster> clusters_;
};

struct Atom {
  Complex value;
  Count mult{1};
};

/// Sequence of simple eigenvalues s_1, s_2, ... converging to limit.
struct Tail {
  enum class Kind { Geometric, Samples };
  Extended limit;
  Kind kind = Kind::Geometric;
  /// Geometric: s_k = limit + base·ratio^k, or base·ratio^k when limit = ∞.
  Complex base{};
  Complex ratio{};
  /// Samples: explicit s_1..s_K.
  std::vector<Complex> samples;

  Complex sample(int k) const;
  std::vector<Complex> enumerate(int horizon) const;
};

/// Normal operator with eigenvalue atoms and convergent eigenvalue tails.
class DiagonalModel {
public:
  DiagonalModel() = default;
  DiagonalModel(std::vector<Atom> atoms, std::vector<Tail> tails, double omega, double a,
                int horizon = kDefaultHorizon);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Tail>& tails() const { return tails_; }
  BisectorRegion region() const;
  double omega() const { return omega_; }
  double a() const { return a_; }
  int horizon() const { return horizon_; }
  bool unbounded() const;

  bool is_eigenvalue(Complex z, double tol = kMergeTol) const;
  /// Model of (z − A)^{-1}.
  DiagonalModel resolve(Complex z) const;

  /// Throws GeometryError when a value lies outside the closed bisector.
  void validate() const;

private:
  std::vector<Atom> atoms_;
  std::vector<Tail> tails_;
  double omega_ = kPi / 2;
  double a_ = 0.0;
  int horizon_ = kDefaultHorizon;
};

using OperatorModel = std::variant<DenseOperator, DiagonalModel>;

BisectorRegion region_of(const OperatorModel& op);
SpectralSet spectrum(const DenseOperator& op);
SpectralSet spectrum(const DiagonalModel& op);
SpectralSet spectrum(const OperatorModel& op);

/// M_A = σ̃(A) ∩ {−a, a, ∞}.
std::vector<SingularPoint> singular_set(const OperatorModel& op);
bool is_eigenvalue(const OperatorModel& op, Complex z);

struct CertifyResult {
  bool certified = false;
  double constant = 0.0;
};

/// Eigenvalue location plus sampled resolvent bound outside BS_{ω′,a}.
CertifyResult certify_bisectorial(const DenseOperator& op, int sample_count = 61);

/// Builds a diagonal model with entries g(λ). Tails map sample-wise; a tail
/// whose image is eventually constant becomes an atom of infinite multiplicity.
DiagonalModel map_model(const DiagonalModel& op, const std::function<Complex(Complex)>& g,
                        const std::function<Extended(const Extended&)>& limit_image);

}  // namespace speccalc
