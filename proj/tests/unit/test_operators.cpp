// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "speccalc/errors.hpp"
#include "speccalc/operators.hpp"

using namespace speccalc;

namespace {
const Complex I(0.0, 1.0);

Matrix diag2(Complex x, Complex y) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = x;
  m(1, 1) = y;
  return m;
}

Tail geometric(Extended limit, Complex base, Complex ratio) {
  Tail t;
  t.limit = limit;
  t.base = base;
  t.ratio = ratio;
  return t;
}
}  // namespace

TEST_CASE("certification") {
  const CertifyResult r = certify_bisectorial(DenseOperator(diag2(I, -I), kPi / 4, 0.0));
  CHECK(r.certified);
  CHECK(r.constant > 0.0);
  CHECK(r.constant < 10.0);

  Matrix one(1, 1);
  one(0, 0) = 1.0;
  CHECK_THROWS_AS(certify_bisectorial(DenseOperator(one, kPi / 2, 0.0)), NotBisectorial);

  Matrix j = Matrix::Zero(2, 2);
  j(0, 1) = 1.0;
  CHECK(certify_bisectorial(DenseOperator(j, kPi / 4, 1.0)).certified);
}

TEST_CASE("dense resolvent") {
  const DenseOperator op(diag2(I, -I), kPi / 4, 0.0);
  Vector rhs(2);
  rhs << 1.0, 0.0;
  const Vector x = op.resolve(3.0, rhs);
  CHECK(std::abs(x(0) - 1.0 / (3.0 - I)) < 1e-15);
  CHECK(std::abs(x(1)) < 1e-15);
  CHECK_THROWS_AS(op.resolve(I, rhs), SingularResolvent);

  Matrix j = Matrix::Zero(2, 2);
  j(0, 1) = 1.0;
  const DenseOperator jo(j, kPi / 4, 1.0);
  rhs << 0.0, 1.0;
  const Vector y = jo.resolve(1.0, rhs);
  CHECK(std::abs(y(0) - 1.0) < 1e-15);
  CHECK(std::abs(y(1) - 1.0) < 1e-15);
}

TEST_CASE("diagonal resolvent model") {
  const DiagonalModel m({{2.0 * I, Count::infinite()}}, {}, kPi / 2, 0.0);
  const DiagonalModel r = m.resolve(0.0);
  REQUIRE(r.atoms().size() == 1);
  CHECK(std::abs(r.atoms()[0].value - (-1.0 / (2.0 * I))) < 1e-15);
  CHECK(r.atoms()[0].mult.is_infinite());
}

TEST_CASE("spectra") {
  SUBCASE("dense") {
    const SpectralSet s = spectrum(DenseOperator(diag2(I, -I), kPi / 4, 0.0));
    CHECK(s.size() == 2);
    CHECK(s.contains(Extended(I)));
    CHECK(s.find(Extended(-I))->tag == PointTag::AtomFinite);
    CHECK(s.find(Extended(-I))->multiplicity == Count(1));
  }
  SUBCASE("diagonal with a tail to zero") {
    const DiagonalModel m({{2.0 * I, Count::infinite()}, {I, Count(3)}}, {geometric(Extended(0.0), I, 0.5)},
                          kPi / 2, 0.0);
    const SpectralSet s = spectrum(m);
    CHECK(s.find(Extended(2.0 * I))->tag == PointTag::AtomInfinite);
    CHECK(s.find(Extended(I))->multiplicity == Count(3));
    CHECK(s.find(Extended(0.0))->tag == PointTag::Accumulation);
    CHECK(s.find(Extended(0.5 * I))->tag == PointTag::AtomFinite);
    CHECK(s.find(Extended(0.25 * I))->multiplicity == Count(1));
    CHECK_FALSE(s.includes_infinity());
    const auto m_a = singular_set(OperatorModel(m));
    CHECK(m_a == std::vector<SingularPoint>{SingularPoint::PlusA});
  }
  SUBCASE("unbounded tail") {
    const DiagonalModel m({}, {geometric(Extended::infinity(), I, 2.0)}, kPi / 2, 0.0);
    CHECK(spectrum(m).includes_infinity());
    CHECK(m.unbounded());
  }
}

TEST_CASE("diagonal models must sit inside the bisector") {
  const DiagonalModel m({{Complex(1.0), Count(1)}}, {}, kPi / 2, 0.0);
  CHECK_THROWS_AS(m.validate(), GeometryError);
}

TEST_CASE("map_model collapses constant tails into an infinite atom") {
  const DiagonalModel m({}, {geometric(Extended(0.0), I, 0.5)}, kPi / 2, 0.0);
  const DiagonalModel c = map_model(m, [](Complex) { return Complex(2.0); },
                                    [](const Extended&) { return Extended(2.0); });
  REQUIRE(c.atoms().size() == 1);
  CHECK(c.atoms()[0].mult.is_infinite());
  CHECK(c.tails().empty());
}
