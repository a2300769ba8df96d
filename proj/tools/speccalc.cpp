// SPDX-License-Identifier: Apache-2.0
// speccalc command-line front end.

#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "speccalc/calculus.hpp"
#include "speccalc/config.hpp"
#include "speccalc/errors.hpp"
#include "speccalc/fredholm.hpp"
#include "speccalc/json_io.hpp"
#include "speccalc/smt.hpp"

using namespace speccalc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;

struct Common {
  std::string config_path;
  std::string output_dir;
  double tol = 0.0;
};

RunConfig resolve_config(const Common& c) {
  RunConfig cfg;
  if (!c.config_path.empty()) cfg = load_config(read_json_file(c.config_path));
  if (c.tol > 0.0) cfg.tol = c.tol;
  if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);
  return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

OperatorModel read_operator_file(const std::string& path, const RunConfig& cfg) {
  const Json doc = read_json_file(path);
  std::optional<int> horizon;
  if (!doc.contains("horizon")) horizon = cfg.truncation_K;
  return load_operator(doc, horizon);
}

MeromFn read_function_file(const std::string& path, const OperatorModel& op) {
  return load_function(read_json_file(path), region_of(op).a, singular_set(op));
}

Complex complex_arg(const std::string& text) {
  // Accepts "1.5", "[1,2]" or an expression such as "2i" or "1-0.5i".
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception&) {
    j = text;
  }
  const Json doc = {{"type", "constant"}, {"value", j}};
  return load_function(doc, 0.0)(Complex(0.0));
}

int cmd_certify(const Common& common, const std::string& op_path) {
  const RunConfig cfg = resolve_config(common);
  const OperatorModel op = read_operator_file(op_path, cfg);
  Json out;
  if (const auto* dense = std::get_if<DenseOperator>(&op)) {
    try {
      const CertifyResult r = certify_bisectorial(*dense);
      out = {{"certified", r.certified}, {"constant", r.constant}};
    } catch (const NotBisectorial& e) {
      out = {{"certified", false}, {"reason", e.what()}};
    }
  } else {
    std::get<DiagonalModel>(op).validate();
    out = {{"certified", true}, {"constant", 1.0}, {"note", "normal diagonal model"}};
  }
  write_json_file(out_path(cfg, "certify.json"), out);
  std::cout << out.dump(2) << "\n";
  return out["certified"].get<bool>() ? kExitOk : kExitViolation;
}

int cmd_apply(const Common& common, const std::string& op_path, const std::string& fn_path, bool primary) {
  const RunConfig cfg = resolve_config(common);
  const OperatorModel op = read_operator_file(op_path, cfg);
  const MeromFn f = read_function_file(fn_path, op);
  const CalculusOptions opts = cfg.calculus_options();
  const CalculusResult r = primary ? apply_primary(f, op, opts) : apply_regularized(f, op, opts);
  Json out;
  out["operator"] = operator_to_json(r.op);
  out["bounded"] = r.bounded;
  out["regularizer"] = r.regularizer ? Json(r.regularizer->to_string()) : Json(nullptr);
  out["quadrature_report"] = report_to_json(r.report);
  out["independence_error"] = r.independence_error ? Json(*r.independence_error) : Json(nullptr);
  out["warnings"] = r.warnings;
  write_json_file(out_path(cfg, "result.json"), out);
  std::cout << "wrote " << out_path(cfg, "result.json") << "\n";
  return kExitOk;
}

int cmd_spectrum(const Common& common, const std::string& op_path, int index) {
  const RunConfig cfg = resolve_config(common);
  const OperatorModel op = read_operator_file(op_path, cfg);
  const SpectralSet s = extended_spectrum(op, index, cfg.rank_gap_ratio);
  const Json out = {{"index", index}, {"set", spectral_set_to_json(s)}};
  write_json_file(out_path(cfg, "spectrum.json"), out);
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_classify(const Common& common, const std::string& op_path, const std::vector<std::string>& mus) {
  const RunConfig cfg = resolve_config(common);
  const OperatorModel op = read_operator_file(op_path, cfg);
  std::vector<Complex> points;
  for (const auto& m : mus) points.push_back(complex_arg(m));
  if (points.empty()) {
    for (const SpectralPoint& p : spectrum(op).points()) {
      if (p.value.is_finite()) points.push_back(p.value.value());
    }
  }
  Json rows = Json::array();
  for (Complex mu : points) {
    const FredholmProfile p = profile(op, mu, cfg.rank_gap_ratio);
    rows.push_back({{"mu", complex_to_json(mu)},
                    {"profile", profile_to_json(p)},
                    {"membership", membership_to_json(classify(p))}});
  }
  const Json out = {{"points", rows}};
  write_json_file(out_path(cfg, "classify.json"), out);
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_project(const Common& common, const std::string& op_path, const std::string& center, double radius) {
  const RunConfig cfg = resolve_config(common);
  const OperatorModel op = read_operator_file(op_path, cfg);
  const Complex c = complex_arg(center);
  const Selector sel = [&](const SpectralPoint& p) {
    return p.value.is_finite() && std::abs(p.value.value() - c) < radius;
  };
  const ProjectionResult proj = spectral_projection(op, sel);
  const OperatorModel restricted = restrict_to_projection(op, proj);
  Json out;
  out["projector"] = operator_to_json(proj.projector);
  out["lambda"] = spectral_set_to_json(proj.lambda_set);
  out["complement_rank_finite"] = proj.complement_rank_finite;
  out["restricted"] = operator_to_json(restricted);
  if (const auto* p = std::get_if<DenseOperator>(&proj.projector)) {
    const Matrix& pm = p->matrix();
    out["idempotence_error"] = (pm * pm - pm).norm();
  }
  write_json_file(out_path(cfg, "projection.json"), out);
  std::cout << "wrote " << out_path(cfg, "projection.json") << "\n";
  return kExitOk;
}

int cmd_contour(const Common& common, const std::string& op_path, const std::string& fn_path) {
  const RunConfig cfg = resolve_config(common);
  const OperatorModel op = read_operator_file(op_path, cfg);
  const auto* dense = std::get_if<DenseOperator>(&op);
  if (!dense) throw InputError("contour export needs a dense operator");
  const MeromFn f = read_function_file(fn_path, op);
  const ContourPath path = calculus_contour(f, *dense, cfg.nodes_per_panel);
  {
    std::ofstream csv(out_path(cfg, "contour.csv"));
    csv << contour_csv(path);
  }
  bool ok = true;
  const std::vector<SingularPoint> m_a = singular_set(op);
  const BisectorRegion region = dense->region();
  for (const auto& cl : dense->clusters()) {
    bool touching = false;
    for (SingularPoint d : m_a) {
      const Extended loc = location(d, region.a);
      if (loc.is_finite() && std::abs(loc.value() - cl.value) < 1e-8 * std::max(1.0, dense->norm())) touching = true;
    }
    if (touching) continue;
    const double w = winding_number(path, cl.value);
    const bool good = std::abs(w - 1.0) <= 1e-6;
    ok = ok && good;
    std::cout << "winding around " << Extended(cl.value).to_string() << ": " << w << (good ? " ok" : " FAILED")
              << "\n";
  }
  const Complex b = default_base_point(op);
  const double wb = winding_number(path, b);
  const bool good_b = std::abs(wb) <= 1e-6;
  ok = ok && good_b;
  std::cout << "winding around b = " << Extended(b).to_string() << ": " << wb << (good_b ? " ok" : " FAILED")
            << "\n";
  std::cout << "wrote " << out_path(cfg, "contour.csv") << " (" << path.nodes.size() << " nodes)\n";
  return ok ? kExitOk : kExitViolation;
}

struct ScenarioOutcome {
  std::string name;
  Json report;
  std::string table;
  int violations = 0;
  std::string error;
  bool input_error = false;
};

ScenarioOutcome run_scenario(const std::string& file, const std::set<int>& cli_indices, const RunConfig& cfg) {
  ScenarioOutcome out;
  out.name = file;
  try {
    const Scenario sc = load_scenario(read_json_file(file));
    out.name = sc.name;
    std::optional<int> horizon;
    if (!sc.op_doc.contains("horizon")) horizon = cfg.truncation_K;
    const OperatorModel op = load_operator(sc.op_doc, horizon);
    const MeromFn f = load_function(sc.fn_doc, region_of(op).a, singular_set(op));
    const std::set<int> indices = cli_indices.empty() ? sc.indices : cli_indices;
    const CalculusOptions opts = cfg.calculus_options();
    const SMTReport rep = verify_smt(op, f, indices, opts);
    out.report = smt_report_to_json(rep);
    out.violations = rep.violations();
    std::ostringstream table;
    table << sc.name << "\n";
    for (const SMTEntry& e : rep.entries) {
      std::string flag;
      auto it = sc.expected.find(e.index);
      if (it != sc.expected.end() && it->second != e.verdict) {
        ++out.violations;
        flag = "  (scenario expects " + to_string(it->second) + ")";
      }
      char line[160];
      std::snprintf(line, sizeof line, "  i=%d  expected=%-9s  verdict=%-9s  |lhs|=%zu  |rhs|=%zu", e.index,
                    to_string(e.expected).c_str(), to_string(e.verdict).c_str(), e.lhs.size(), e.rhs.size());
      table << line << flag << "\n";
    }
    const PointSpectrumReport ps = verify_point_spectrum(op, f, opts);
    out.report["point_spectrum"] = {{"forward", ps.forward},
                                    {"backward", ps.backward},
                                    {"condition_p", ps.condition_p},
                                    {"transport_error", ps.transport_error}};
    if (!ps.forward || !ps.backward) ++out.violations;
    table << "  point spectrum: forward=" << ps.forward << " backward=" << ps.backward << "\n";
    if (sc.factor_mu) {
      const FactorizationReport fr = verify_factorization(op, f, *sc.factor_mu, opts);
      out.report["factorization"] = {
          {"ok", fr.ok}, {"residual", fr.residual}, {"profiles_consistent", fr.profiles_consistent}};
      if (!fr.ok || !fr.profiles_consistent) ++out.violations;
      table << "  factorization: ok=" << fr.ok << " residual=" << fr.residual << "\n";
    }
    for (int i : sc.projection_indices) {
      const bool ok = verify_projection_reduction(op, i, opts);
      out.report["projection_reduction"][std::to_string(i)] = ok;
      if (!ok) ++out.violations;
      table << "  projection reduction i=" << i << ": " << ok << "\n";
    }
    out.report["name"] = sc.name;
    out.table = table.str();
  } catch (const InputError& e) {
    out.error = e.what();
    out.input_error = true;
  } catch (const ParseError& e) {
    out.error = e.what();
    out.input_error = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

std::set<int> parse_indices(const std::string& text) {
  std::set<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    int i = -1;
    try {
      i = std::stoi(item);
    } catch (const std::exception&) {
    }
    if (i < 0 || i > 9) throw InputError("index " + item + " outside 0..9");
    out.insert(i);
  }
  return out;
}

int cmd_verify(const Common& common, const std::vector<std::string>& files, const std::string& indices_text) {
  const RunConfig cfg = resolve_config(common);
  const std::set<int> indices = parse_indices(indices_text);
  std::vector<ScenarioOutcome> outcomes(files.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::min<int>(thread_count(), static_cast<int>(files.size()));
  std::vector<std::thread> pool;
  for (int w = 0; w < std::max(1, workers); ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < files.size(); k = next++) outcomes[k] = run_scenario(files[k], indices, cfg);
    });
  }
  for (auto& t : pool) t.join();

  Json all = Json::array();
  int violations = 0;
  bool input_error = false;
  for (const auto& o : outcomes) {
    if (!o.error.empty()) {
      std::cerr << o.name << ": " << o.error << "\n";
      input_error = input_error || o.input_error;
      if (!o.input_error) ++violations;
      all.push_back({{"name", o.name}, {"error", o.error}});
      continue;
    }
    std::cout << o.table;
    violations += o.violations;
    all.push_back(o.report);
  }
  write_json_file(out_path(cfg, "verify.json"), {{"scenarios", all}, {"violations", violations}});
  if (input_error) return kExitInput;
  return violations == 0 ? kExitOk : kExitViolation;
}

int cmd_validate(const std::string& file, const std::string& kind_text) {
  static const std::map<std::string, DocKind> kinds = {{"operator", DocKind::Operator},
                                                       {"function", DocKind::Function},
                                                       {"scenario", DocKind::Scenario},
                                                       {"config", DocKind::Config}};
  const auto it = kinds.find(kind_text);
  if (it == kinds.end()) throw InputError("unknown document kind " + kind_text);
  const auto diags = validate_schema(read_json_file(file), it->second);
  for (const auto& d : diags) std::cerr << (d.path.empty() ? "/" : d.path) << ": " << d.message << "\n";
  if (diags.empty()) std::cout << "ok\n";
  return diags.empty() ? kExitOk : kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speccalc: regularized functional calculus and extended essential spectra"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "Run configuration JSON");
    sub->add_option("--output-dir", common.output_dir, "Directory for result files");
    sub->add_option("--tol", common.tol, "Quadrature tolerance");
  };

  std::string op_path, fn_path, center = "0", kind = "operator", indices_text, doc_path;
  int index = 0;
  double radius = 1.0;
  bool primary = false;
  std::vector<std::string> mus, scenarios;

  auto* certify = app.add_subcommand("certify", "Check bisectoriality of an operator");
  certify->add_option("--op", op_path, "Operator JSON")->required();
  add_common(certify);

  auto* apply = app.add_subcommand("apply", "Compute f(A)");
  apply->add_option("--op", op_path, "Operator JSON")->required();
  apply->add_option("--fn", fn_path, "Function JSON")->required();
  apply->add_flag("--primary", primary, "Use the primary calculus only");
  add_common(apply);

  auto* spec = app.add_subcommand("spectrum", "Extended spectrum of index i");
  spec->add_option("--op", op_path, "Operator JSON")->required();
  spec->add_option("--index", index, "Index 0..9")->required()->check(CLI::Range(0, 9));
  add_common(spec);

  auto* cls = app.add_subcommand("classify", "Fredholm profiles and class memberships of mu - A");
  cls->add_option("--op", op_path, "Operator JSON")->required();
  cls->add_option("--mu", mus, "Probe point (repeatable); defaults to the spectral points");
  add_common(cls);

  auto* proj = app.add_subcommand("project", "Spectral projection onto the points inside a disc");
  proj->add_option("--op", op_path, "Operator JSON")->required();
  proj->add_option("--center", center, "Disc center");
  proj->add_option("--radius", radius, "Disc radius")->check(CLI::PositiveNumber);
  add_common(proj);

  auto* verify = app.add_subcommand("verify", "Run spectral mapping scenarios");
  verify->add_option("--scenario", scenarios, "Scenario JSON (repeatable)")->required();
  verify->add_option("--indices", indices_text, "Comma separated indices, e.g. 0,1,5,8");
  add_common(verify);

  auto* contour = app.add_subcommand("contour", "Export the calculus contour as CSV");
  contour->add_option("--op", op_path, "Operator JSON")->required();
  contour->add_option("--fn", fn_path, "Function JSON")->required();
  add_common(contour);

  auto* validate = app.add_subcommand("validate", "Validate a JSON document");
  validate->add_option("file", doc_path, "Document")->required();
  validate->add_option("--kind", kind, "operator, function, scenario or config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*certify) return cmd_certify(common, op_path);
    if (*apply) return cmd_apply(common, op_path, fn_path, primary);
    if (*spec) return cmd_spectrum(common, op_path, index);
    if (*cls) return cmd_classify(common, op_path, mus);
    if (*proj) return cmd_project(common, op_path, center, radius);
    if (*verify) return cmd_verify(common, scenarios, indices_text);
    if (*contour) return cmd_contour(common, op_path, fn_path);
    if (*validate) return cmd_validate(doc_path, kind);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitViolation;
  }
  return kExitInput;
}
