// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "speccalc/errors.hpp"
#include "speccalc/smt.hpp"
#include "support/oracles.hpp"

using namespace speccalc;

namespace {
const Complex I(0.0, 1.0);

Matrix diag2(Complex x, Complex y) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = x;
  m(1, 1) = y;
  return m;
}

MeromFn rational(std::vector<Complex> num, std::vector<Complex> den, double a) {
  return make_rational(RationalFactors::from_coefficients(num, den), a);
}

const std::set<int> kAll{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
}  // namespace

TEST_CASE("expected relations") {
  for (int i : {0, 1, 2, 3, 4, 5, 8}) CHECK(expected_relation(i) == Expectation::Equal);
  CHECK(expected_relation(6) == Expectation::LhsSubset);
  CHECK(expected_relation(7) == Expectation::RhsSubset);
  CHECK(expected_relation(9) == Expectation::Unknown);
}

TEST_CASE("images of spectral sets") {
  SUBCASE("finite atom") {
    SpectralSet s;
    s.add_atom(I, Count(3));
    const SpectralSet t = image_under_f(s, rational({0.0, 0.0, 1.0}, {1.0}, 0.0), kPi / 4);
    REQUIRE(t.size() == 1);
    CHECK(t.points()[0].value.near(Extended(-1.0), 1e-14));
    CHECK(t.points()[0].multiplicity == Count(3));
  }
  SUBCASE("accumulation point") {
    SpectralSet s;
    s.add_accumulation(0.0);
    const SpectralSet t = image_under_f(s, rational({1.0}, {3.0, -1.0}, 0.0), kPi / 4);
    REQUIRE(t.size() == 1);
    CHECK(t.points()[0].value.near(Extended(1.0 / 3.0), 1e-14));
  }
  SUBCASE("infinity") {
    SpectralSet s;
    s.add_infinity();
    const SpectralSet t = image_under_f(s, rational({1.0}, {3.0, -1.0}, 0.0), kPi / 4);
    REQUIRE(t.size() == 1);
    CHECK(t.points()[0].value.near(Extended(0.0), 1e-14));
  }
}

TEST_CASE("spectral mapping on small examples") {
  SUBCASE("dense normal square") {
    const SMTReport r = verify_smt(DenseOperator(diag2(I, -I), kPi / 4, 0.0),
                                   rational({0.0, 0.0, 1.0}, {1.0}, 0.0), kAll);
    CHECK(r.violations() == 0);
    CHECK(r.entries.at(0).verdict == Verdict::Equal);
    CHECK(r.entries.at(0).rhs.size() == 1);
  }
  SUBCASE("diagonal infinite atoms squared") {
    const OperatorModel op = DiagonalModel({{I, Count::infinite()}, {-I, Count::infinite()}}, {}, kPi / 2, 0.0);
    const SMTReport r = verify_smt(op, rational({0.0, 0.0, 1.0}, {1.0}, 0.0), {1});
    REQUIRE(r.entries.size() == 1);
    CHECK(r.entries[0].verdict == Verdict::Equal);
    CHECK(r.entries[0].lhs.size() == 1);
    CHECK(r.entries[0].lhs.contains(Extended(-1.0)));
  }
}

TEST_CASE("point spectrum mapping") {
  SUBCASE("dense") {
    const PointSpectrumReport r =
        verify_point_spectrum(DenseOperator(diag2(I, -I), kPi / 4, 0.0), rational({0.0, 0.0, 1.0}, {1.0}, 0.0));
    CHECK(r.forward);
    CHECK(r.backward);
  }
  SUBCASE("constant on an infinite atom") {
    const OperatorModel op = DiagonalModel({{2.0 * I, Count::infinite()}}, {}, kPi / 2, 0.0);
    const PointSpectrumReport r = verify_point_spectrum(op, make_constant(5.0, 0.0));
    CHECK(r.forward);
    CHECK(r.backward);
    CHECK(point_spectrum(apply_regularized(make_constant(5.0, 0.0), op).op).contains(Extended(5.0)));
  }
}

TEST_CASE("factorization through the rational factor") {
  SUBCASE("z^2 + 1 on diag(i, -i)") {
    const FactorizationReport r = verify_factorization(DenseOperator(diag2(I, -I), kPi / 4, 0.0),
                                                       rational({1.0, 0.0, 1.0}, {1.0}, 0.0), 0.0);
    CHECK(r.ok);
    CHECK(r.zeros.size() == 2);
  }
  SUBCASE("mu off the spectrum") {
    const FactorizationReport r =
        verify_factorization(DenseOperator(diag2(I, -I), kPi / 4, 0.0), make_identity(0.0), 3.0 * I);
    CHECK(r.ok);
    CHECK(r.zeros.empty());
  }
  SUBCASE("Jordan block and a simple eigenvalue") {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 1) = 1.0;
    m(2, 2) = 3.0 * I;
    const OperatorModel op = DenseOperator(m, 0.8, 1.0);
    const MeromFn f = rational({0.0, 3.0 * I, -1.0}, {4.0, -4.0, 1.0}, 1.0);
    const FactorizationReport r = verify_factorization(op, f, 0.0);
    CHECK(r.ok);
    CHECK(r.profiles_consistent);
    CHECK(r.residual < 1e-7);
  }
}

TEST_CASE("projection reduction") {
  const auto s = oracle::load(oracle::scenario_dir() / "s07_diag_isolated_singular.json");
  for (int i = 1; i <= 6; ++i) CHECK(verify_projection_reduction(s.op, i));
  CHECK(verify_projection_reduction(DenseOperator(diag2(I, -I), kPi / 4, 0.0), 1));
}
