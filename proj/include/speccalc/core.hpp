// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace speccalc {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Points closer than this are the same spectral point.
inline constexpr double kMergeTol = 1e-9;
/// Resolvent evaluations closer than this to an eigenvalue are refused.
inline constexpr double kSingularTol = 1e-12;

/// A point of the Riemann sphere: a finite complex number or infinity.
class Extended {
public:
  Extended() = default;
  Extended(Complex z) : value_(z) {}
  Extended(double x) : value_(x, 0.0) {}

  static Extended infinity() {
    Extended e;
    e.infinite_ = true;
    return e;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  /// Finite value; throws when infinite.
  Complex value() const {
    if (infinite_) throw std::logic_error("Extended::value() on infinity");
    return value_;
  }

  /// Distance-like closeness on the sphere: finite points compared absolutely
  /// (relatively for large magnitudes), infinity only matches infinity.
  bool near(const Extended& other, double tol) const;

  std::string to_string() const;

  friend bool operator==(const Extended& a, const Extended& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

private:
  Complex value_{0.0, 0.0};
  bool infinite_ = false;
};

/// Cardinal in N ∪ {∞}, used for nullity, defect, ascent and descent.
class Count {
public:
  constexpr Count() = default;
  constexpr Count(std::uint64_t n) : n_(n) {}
  static constexpr Count infinite() {
    Count c;
    c.inf_ = true;
    return c;
  }

  constexpr bool is_infinite() const { return inf_; }
  constexpr bool is_finite() const { return !inf_; }
  std::uint64_t value() const {
    if (inf_) throw std::logic_error("Count::value() on infinity");
    return n_;
  }

  friend constexpr bool operator==(const Count& a, const Count& b) {
    if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
    return a.n_ == b.n_;
  }
  friend constexpr Count operator+(const Count& a, const Count& b) {
    if (a.inf_ || b.inf_) return infinite();
    return Count(a.n_ + b.n_);
  }
  friend constexpr bool operator<(const Count& a, const Count& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.n_ < b.n_;
  }

  std::string to_string() const { return inf_ ? "inf" : std::to_string(n_); }

private:
  std::uint64_t n_ = 0;
  bool inf_ = false;
};

inline bool is_close(Complex a, Complex b, double tol) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

}  // namespace speccalc
