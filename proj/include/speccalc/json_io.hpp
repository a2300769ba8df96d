// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "speccalc/config.hpp"
#include "speccalc/errors.hpp"
#include "speccalc/fredholm.hpp"
#include "speccalc/smt.hpp"

namespace speccalc {

using Json = nlohmann::json;

struct Diagnostic {
  std::string path;  ///< JSON pointer
  std::string message;
};

/// Raised by the loaders; carries every diagnostic found.
class SchemaError : public InputError {
public:
  explicit SchemaError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
  std::vector<Diagnostic> diags_;
};

enum class DocKind { Operator, Function, Scenario, Config };

/// Structural and semantic checks; an empty result means the document is valid.
std::vector<Diagnostic> validate_schema(const Json& doc, DocKind kind);

Json complex_to_json(Complex z);
Json extended_to_json(const Extended& z);
Json count_to_json(const Count& c);

OperatorModel load_operator(const Json& doc, std::optional<int> horizon = std::nullopt);
Json operator_to_json(const OperatorModel& op);

/// Builds f on the region of a with the given M_A; a missing limit at a point
/// of M_A is a schema error for non-rational expressions.
MeromFn load_function(const Json& doc, double a, const std::vector<SingularPoint>& m_a = {});

RunConfig load_config(const Json& doc);
Json config_to_json(const RunConfig& cfg);

struct Scenario {
  std::string name;
  std::string description;
  Json op_doc;
  Json fn_doc;
  std::set<int> indices;
  /// Overrides of the expected verdict per index.
  std::map<int, Verdict> expected;
  std::vector<Complex> probes;
  std::optional<Complex> factor_mu;
  std::vector<int> projection_indices;
  bool condition_p = false;
};

Scenario load_scenario(const Json& doc);

Json spectral_set_to_json(const SpectralSet& s);
Json profile_to_json(const FredholmProfile& p);
Json membership_to_json(const PhiMembership& m);
Json report_to_json(const QuadratureReport& r);
Json smt_report_to_json(const SMTReport& r);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& doc);

}  // namespace speccalc
