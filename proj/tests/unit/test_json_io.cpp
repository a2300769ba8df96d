// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "speccalc/config.hpp"
#include "speccalc/json_io.hpp"
#include "support/oracles.hpp"

using namespace speccalc;

namespace {
bool has_error_at(const std::vector<Diagnostic>& d, const std::string& path) {
  for (const auto& x : d) {
    if (x.path == path) return true;
  }
  return false;
}
}  // namespace

TEST_CASE("operator schema") {
  SUBCASE("omega above the right angle") {
    const Json doc = Json::parse(R"J({"kind": "dense", "omega": 2.0, "a": 0, "matrix": [[[0, 1]]]})J");
    const auto d = validate_schema(doc, DocKind::Operator);
    REQUIRE(has_error_at(d, "/omega"));
    bool mentions = false;
    for (const auto& x : d) mentions = mentions || x.message.find("exceeds") != std::string::npos;
    CHECK(mentions);
    CHECK_THROWS_AS(load_operator(doc), SchemaError);
  }
  SUBCASE("eigenvalue outside the bisector") {
    const Json doc = Json::parse(R"J({"kind": "diagonal", "omega": 1.5, "a": 0, "atoms": [{"value": 3, "multiplicity": 1}]})J");
    CHECK_FALSE(validate_schema(doc, DocKind::Operator).empty());
  }
  SUBCASE("round trip") {
    const Json doc = Json::parse(R"J({"kind": "diagonal", "omega": 1.2, "a": 0.5,
      "atoms": [{"value": "2i", "multiplicity": "inf"}, {"value": [0, -1], "multiplicity": 2}],
      "tails": [{"limit": "inf", "kind": "geometric", "base": [0, 1], "ratio": 3}]})J");
    CHECK(validate_schema(doc, DocKind::Operator).empty());
    const OperatorModel op = load_operator(doc);
    const OperatorModel back = load_operator(operator_to_json(op));
    CHECK(compare_sets(spectrum(op), spectrum(back), 1e-12) == SetRelation::Equal);
  }
}

TEST_CASE("function schema") {
  const std::vector<SingularPoint> m_a{SingularPoint::PlusA};
  SUBCASE("missing limit at a singular point of the operator") {
    const Json doc = Json::parse(R"J({"type": "expression", "expr": "exp(z)"})J");
    CHECK_THROWS_AS(load_function(doc, 0.0, m_a), SchemaError);
  }
  SUBCASE("declared limit") {
    const Json doc = Json::parse(R"J({"type": "expression", "expr": "z/(1+z^2)", "poles": [{"at": "i"}, {"at": "-i"}],
                                     "limits": {"a": {"limit": 0, "decay": 1}}})J");
    const MeromFn f = load_function(doc, 0.0, m_a);
    CHECK(f.limit(SingularPoint::PlusA).near(Extended(0.0), 0.0));
    CHECK(f.poles.size() == 2);
  }
  SUBCASE("rational from zeros and poles") {
    const Json doc = Json::parse(R"J({"type": "rational", "scale": 2, "zeros": [{"at": "i"}], "poles": [{"at": 3}]})J");
    const MeromFn f = load_function(doc, 0.0);
    CHECK(std::abs(f(Complex(1.0)) - 2.0 * (1.0 - Complex(0, 1)) / (1.0 - 3.0)) < 1e-14);
  }
}

TEST_CASE("bundled scenarios validate") {
  for (const auto& p : oracle::scenario_files()) {
    INFO(p.string());
    const Json doc = read_json_file(p.string());
    CHECK(validate_schema(doc, DocKind::Scenario).empty());
    CHECK_NOTHROW(oracle::load(p));
  }
}

TEST_CASE("configuration") {
  const RunConfig c = load_config(Json::parse(R"J({"tol": 1e-10, "truncation_K": 100})J"));
  CHECK(c.tol == 1e-10);
  CHECK(c.truncation_K == 100);
  CHECK(c.nodes_per_panel == 8);
  CHECK_THROWS(load_config(Json::parse(R"J({"tol": -1})J")));
  const RunConfig d = load_config(config_to_json(c));
  CHECK(d.truncation_K == 100);
}

TEST_CASE("profile serialization") {
  FredholmProfile p{Count(1), Count::infinite(), Count(0), Count::infinite(), false, false, true};
  const Json j = profile_to_json(p);
  CHECK(j["nul"] == 1);
  CHECK(j["def"] == "inf");
  CHECK(j["range_closed"] == false);
}
