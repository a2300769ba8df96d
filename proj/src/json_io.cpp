// SPDX-License-Identifier: Apache-2.0
#include "speccalc/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "speccalc/expression.hpp"

namespace speccalc {
namespace {

std::string join(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += "; ";
    out += (d.path.empty() ? "/" : d.path) + ": " + d.message;
  }
  return out;
}

std::string escape_key(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

/// Collects diagnostics while walking a document.
class Reader {
public:
  std::vector<Diagnostic> diags;

  void error(const std::string& path, const std::string& message) { diags.push_back({path, message}); }

  void finish() const {
    if (!diags.empty()) throw SchemaError(diags);
  }

  const Json* child(const Json& doc, const std::string& path, const std::string& key, bool required) {
    if (!doc.is_object()) {
      error(path, "expected an object");
      return nullptr;
    }
    auto it = doc.find(key);
    if (it == doc.end()) {
      if (required) error(path + "/" + escape_key(key), "missing required field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const Json& doc, const std::string& path, const std::string& key, bool required) {
    const Json* v = child(doc, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      error(path + "/" + key, "expected a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<int> integer(const Json& doc, const std::string& path, const std::string& key, bool required) {
    const Json* v = child(doc, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) {
      error(path + "/" + key, "expected an integer");
      return std::nullopt;
    }
    return v->get<int>();
  }

  std::optional<Complex> complex(const Json& v, const std::string& path) {
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      return Complex(v[0].get<double>(), v[1].get<double>());
    }
    if (v.is_object() && v.contains("re")) {
      const double re = v["re"].is_number() ? v["re"].get<double>() : 0.0;
      const double im = v.contains("im") && v["im"].is_number() ? v["im"].get<double>() : 0.0;
      return Complex(re, im);
    }
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s == "inf") return Complex(kInf, 0.0);
      try {
        return Expression::parse(s)(Complex(0.0));
      } catch (const Error& e) {
        error(path, e.what());
        return std::nullopt;
      }
    }
    error(path, "expected a complex number: a number, [re, im] or a string");
    return std::nullopt;
  }

  std::optional<Extended> extended(const Json& v, const std::string& path) {
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) {
      return Extended::infinity();
    }
    auto z = complex(v, path);
    if (!z) return std::nullopt;
    return Extended(*z);
  }

  std::optional<Count> count(const Json& v, const std::string& path) {
    if (v.is_string() && v.get<std::string>() == "inf") return Count::infinite();
    if (v.is_number_integer() && v.get<long long>() > 0) return Count(v.get<std::uint64_t>());
    error(path, "expected a positive integer or \"inf\"");
    return std::nullopt;
  }
};

OperatorModel read_operator(Reader& rd, const Json& doc, const std::string& path, std::optional<int> horizon) {
  if (!doc.is_object()) {
    rd.error(path, "expected an object");
    return DenseOperator();
  }
  std::string kind;
  if (const Json* k = rd.child(doc, path, "kind", true)) {
    if (!k->is_string() || (k->get<std::string>() != "dense" && k->get<std::string>() != "diagonal")) {
      rd.error(path + "/kind", "must be \"dense\" or \"diagonal\"");
    } else {
      kind = k->get<std::string>();
    }
  }
  const double omega = rd.number(doc, path, "omega", true).value_or(kPi / 2);
  if (omega > kPi / 2 + 1e-15) rd.error(path + "/omega", "exceeds π/2");
  if (!(omega > 0.0)) rd.error(path + "/omega", "must be positive");
  const double a = rd.number(doc, path, "a", false).value_or(0.0);
  if (a < 0.0) rd.error(path + "/a", "must be nonnegative");
  const bool region_ok = omega > 0.0 && omega <= kPi / 2 + 1e-15 && a >= 0.0;
  const double w = std::min(omega, kPi / 2);

  if (kind == "dense") {
    const Json* m = rd.child(doc, path, "matrix", true);
    if (!m) return DenseOperator();
    if (!m->is_array()) {
      rd.error(path + "/matrix", "expected an array of rows");
      return DenseOperator();
    }
    const int n = static_cast<int>(m->size());
    Matrix mat = Matrix::Zero(n, n);
    for (int r = 0; r < n; ++r) {
      const std::string rp = path + "/matrix/" + std::to_string(r);
      const Json& row = (*m)[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<int>(row.size()) != n) {
        rd.error(rp, "expected a row of length " + std::to_string(n));
        continue;
      }
      for (int c = 0; c < n; ++c) {
        auto z = rd.complex(row[static_cast<std::size_t>(c)], rp + "/" + std::to_string(c));
        if (z) {
          if (!std::isfinite(std::abs(*z))) {
            rd.error(rp + "/" + std::to_string(c), "entries must be finite");
          } else {
            mat(r, c) = *z;
          }
        }
      }
    }
    if (!rd.diags.empty()) return DenseOperator();
    return DenseOperator(mat, w, a);
  }
  if (kind != "diagonal") return DenseOperator();

  int h = horizon.value_or(rd.integer(doc, path, "horizon", false).value_or(kDefaultHorizon));
  if (h < 4) {
    rd.error(path + "/horizon", "must be at least 4");
    h = kDefaultHorizon;
  }
  std::vector<Atom> atoms;
  if (const Json* arr = rd.child(doc, path, "atoms", false)) {
    if (!arr->is_array()) rd.error(path + "/atoms", "expected an array");
    for (std::size_t k = 0; arr->is_array() && k < arr->size(); ++k) {
      const std::string ap = path + "/atoms/" + std::to_string(k);
      const Json& item = (*arr)[k];
      const Json* v = rd.child(item, ap, "value", true);
      if (!v) continue;
      auto z = rd.complex(*v, ap + "/value");
      Count mult{1};
      if (const Json* m = rd.child(item, ap, "multiplicity", false)) {
        if (auto c = rd.count(*m, ap + "/multiplicity")) mult = *c;
      }
      if (!z) continue;
      if (region_ok && std::isfinite(std::abs(*z)) &&
          distance_to_closed_bisector(w, a, *z) > 1e-9 * std::max(1.0, std::abs(*z))) {
        rd.error(ap + "/value", "lies outside the closed bisector");
      }
      atoms.push_back({*z, mult});
    }
  }
  std::vector<Tail> tails;
  if (const Json* arr = rd.child(doc, path, "tails", false)) {
    if (!arr->is_array()) rd.error(path + "/tails", "expected an array");
    for (std::size_t k = 0; arr->is_array() && k < arr->size(); ++k) {
      const std::string tp = path + "/tails/" + std::to_string(k);
      const Json& item = (*arr)[k];
      Tail t;
      const Json* lim = rd.child(item, tp, "limit", true);
      if (!lim) continue;
      auto l = rd.extended(*lim, tp + "/limit");
      if (!l) continue;
      t.limit = *l;
      std::string tk = "geometric";
      if (const Json* kk = rd.child(item, tp, "kind", false)) {
        tk = kk->is_string() ? kk->get<std::string>() : "";
      }
      if (tk == "geometric") {
        t.kind = Tail::Kind::Geometric;
        const Json* b = rd.child(item, tp, "base", true);
        const Json* r = rd.child(item, tp, "ratio", true);
        if (!b || !r) continue;
        auto bz = rd.complex(*b, tp + "/base");
        auto rz = rd.complex(*r, tp + "/ratio");
        if (!bz || !rz) continue;
        t.base = *bz;
        t.ratio = *rz;
        if (t.base == 0.0) rd.error(tp + "/base", "must be nonzero");
        const double rr = std::abs(t.ratio);
        if (t.limit.is_finite() && !(rr < 1.0)) rd.error(tp + "/ratio", "needs modulus below 1 for a finite limit");
        if (t.limit.is_infinite() && !(rr > 1.0)) rd.error(tp + "/ratio", "needs modulus above 1 for an infinite limit");
      } else if (tk == "samples") {
        t.kind = Tail::Kind::Samples;
        const Json* s = rd.child(item, tp, "samples", true);
        if (!s) continue;
        if (!s->is_array() || s->size() < 4) {
          rd.error(tp + "/samples", "expected at least 4 samples");
          continue;
        }
        for (std::size_t j = 0; j < s->size(); ++j) {
          if (auto z = rd.complex((*s)[j], tp + "/samples/" + std::to_string(j))) t.samples.push_back(*z);
        }
      } else {
        rd.error(tp + "/kind", "must be \"geometric\" or \"samples\"");
        continue;
      }
      if (region_ok && rd.diags.empty()) {
        if (t.limit.is_finite() && distance_to_closed_bisector(w, a, t.limit.value()) > 1e-9) {
          rd.error(tp + "/limit", "lies outside the closed bisector");
        }
        const auto samples = t.enumerate(h);
        for (std::size_t j = 0; j < samples.size(); ++j) {
          if (distance_to_closed_bisector(w, a, samples[j]) > 1e-9 * std::max(1.0, std::abs(samples[j]))) {
            rd.error(tp, "element " + std::to_string(j + 1) + " lies outside the closed bisector");
            break;
          }
        }
      }
      tails.push_back(std::move(t));
    }
  }
  if (atoms.empty() && tails.empty()) rd.error(path, "a diagonal model needs at least one atom or tail");
  if (!rd.diags.empty()) return DenseOperator();
  return DiagonalModel(std::move(atoms), std::move(tails), w, a, h);
}

void read_meta(Reader& rd, const Json& doc, const std::string& path, PointMeta& meta) {
  if (!doc.is_object()) {
    rd.error(path, "expected an object");
    return;
  }
  if (const Json* l = rd.child(doc, path, "limit", false)) {
    if (auto v = rd.extended(*l, path + "/limit")) meta.limit = *v;
  }
  for (const char* key : {"decay", "log_decay", "growth", "log_growth"}) {
    auto v = rd.number(doc, path, key, false);
    if (!v) continue;
    if (*v < 0.0) rd.error(path + "/" + key, "must be nonnegative");
    if (std::string(key) == "decay") meta.decay = *v;
    if (std::string(key) == "log_decay") meta.log_decay = *v;
    if (std::string(key) == "growth") meta.growth = *v;
    if (std::string(key) == "log_growth") meta.log_growth = *v;
  }
}

std::vector<Pole> read_divisor(Reader& rd, const Json& doc, const std::string& path, const std::string& key) {
  std::vector<Pole> out;
  const Json* arr = rd.child(doc, path, key, false);
  if (!arr) return out;
  if (!arr->is_array()) {
    rd.error(path + "/" + key, "expected an array");
    return out;
  }
  for (std::size_t k = 0; k < arr->size(); ++k) {
    const std::string pp = path + "/" + key + "/" + std::to_string(k);
    const Json& item = (*arr)[k];
    const Json* at = rd.child(item, pp, "at", true);
    if (!at) continue;
    auto z = rd.complex(*at, pp + "/at");
    if (!z) continue;
    int order = rd.integer(item, pp, "order", false).value_or(1);
    if (order < 1) rd.error(pp + "/order", "must be positive");
    out.push_back({*z, order});
  }
  return out;
}

std::vector<Complex> read_coefficients(Reader& rd, const Json& doc, const std::string& path, const std::string& key) {
  std::vector<Complex> out;
  const Json* arr = rd.child(doc, path, key, true);
  if (!arr) return out;
  if (!arr->is_array() || arr->empty()) {
    rd.error(path + "/" + key, "expected a nonempty coefficient array");
    return out;
  }
  for (std::size_t k = 0; k < arr->size(); ++k) {
    if (auto z = rd.complex((*arr)[k], path + "/" + key + "/" + std::to_string(k))) out.push_back(*z);
  }
  return out;
}

MeromFn read_function(Reader& rd, const Json& doc, const std::string& path, double a,
                      std::vector<SingularPoint> m_a) {
  MeromFn f = make_constant(0.0, a);
  if (!doc.is_object()) {
    rd.error(path, "expected an object");
    return f;
  }
  std::string type;
  if (const Json* t = rd.child(doc, path, "type", true)) {
    if (t->is_string()) type = t->get<std::string>();
  }
  const std::size_t before = rd.diags.size();
  if (type == "identity") {
    f = make_identity(a);
  } else if (type == "constant") {
    if (const Json* v = rd.child(doc, path, "value", true)) {
      if (auto z = rd.complex(*v, path + "/value")) f = make_constant(*z, a);
    }
  } else if (type == "rational") {
    if (doc.contains("numerator")) {
      const auto num = read_coefficients(rd, doc, path, "numerator");
      std::vector<Complex> den{Complex(1.0)};
      if (doc.contains("denominator")) den = read_coefficients(rd, doc, path, "denominator");
      if (rd.diags.size() == before) {
        if (std::all_of(den.begin(), den.end(), [](Complex c) { return c == 0.0; })) {
          rd.error(path + "/denominator", "must not vanish identically");
        } else {
          f = make_rational(RationalFactors::from_coefficients(num, den), a);
        }
      }
    } else {
      RationalFactors r;
      if (const Json* s = rd.child(doc, path, "scale", false)) {
        if (auto z = rd.complex(*s, path + "/scale")) r.scale = *z;
      }
      for (const Pole& z : read_divisor(rd, doc, path, "zeros")) r.factors.emplace_back(z.location, z.order);
      for (const Pole& p : read_divisor(rd, doc, path, "poles")) r.factors.emplace_back(p.location, -p.order);
      r.normalize();
      f = make_rational(r, a);
    }
  } else if (type == "sqrt" || type == "log") {
    Complex center{}, scale{1.0};
    if (const Json* c = rd.child(doc, path, "center", false)) center = rd.complex(*c, path + "/center").value_or(center);
    if (const Json* s = rd.child(doc, path, "scale", false)) scale = rd.complex(*s, path + "/scale").value_or(scale);
    if (type == "sqrt") {
      f = make_sqrt_branch(a, center, scale);
    } else {
      const double power = rd.number(doc, path, "power", false).value_or(1.0);
      f = make_log_branch(a, center, power, scale);
    }
  } else if (type == "expression") {
    if (const Json* e = rd.child(doc, path, "expr", true)) {
      if (!e->is_string()) {
        rd.error(path + "/expr", "expected a string");
      } else {
        try {
          const Expression expr = Expression::parse(e->get<std::string>());
          f = MeromFn{};
          f.a = a;
          f.eval = [expr](Complex z) { return expr(z); };
          f.label = e->get<std::string>();
        } catch (const Error& err) {
          rd.error(path + "/expr", err.what());
        }
      }
    }
    f.poles = read_divisor(rd, doc, path, "poles");
    f.zeros = read_divisor(rd, doc, path, "zeros");
  } else if (type == "product") {
    const Json* fs = rd.child(doc, path, "factors", true);
    if (fs && (!fs->is_array() || fs->size() < 1)) rd.error(path + "/factors", "expected a nonempty array");
    if (fs && fs->is_array() && !fs->empty()) {
      f = read_function(rd, (*fs)[0], path + "/factors/0", a, {});
      for (std::size_t k = 1; k < fs->size(); ++k) {
        f = product(f, read_function(rd, (*fs)[k], path + "/factors/" + std::to_string(k), a, {}));
      }
    }
  } else if (type == "reciprocal") {
    if (const Json* of = rd.child(doc, path, "of", true)) f = reciprocal(read_function(rd, *of, path + "/of", a, {}));
  } else {
    rd.error(path + "/type",
             "must be one of identity, constant, rational, sqrt, log, expression, product, reciprocal");
  }

  if (const Json* lim = rd.child(doc, path, "limits", false)) {
    if (!lim->is_object()) rd.error(path + "/limits", "expected an object");
    for (auto it = lim->begin(); lim->is_object() && it != lim->end(); ++it) {
      const std::string lp = path + "/limits/" + escape_key(it.key());
      try {
        SingularPoint d = singular_point_from_string(it.key());
        if (a == 0.0 && d == SingularPoint::MinusA) d = SingularPoint::PlusA;
        PointMeta meta = f.meta.count(d) ? f.meta[d] : PointMeta{};
        read_meta(rd, it.value(), lp, meta);
        f.meta[d] = meta;
      } catch (const Error& err) {
        rd.error(lp, err.what());
      }
    }
  }
  if (auto phi = rd.number(doc, path, "phi", false)) {
    if (!(*phi > 0.0) || *phi > kPi / 2) rd.error(path + "/phi", "must lie in (0, π/2]");
    f.domain.phi = *phi;
  }
  if (const Json* radii = rd.child(doc, path, "radii", false)) {
    for (auto it = radii->begin(); radii->is_object() && it != radii->end(); ++it) {
      const std::string rp = path + "/radii/" + escape_key(it.key());
      try {
        if (!it.value().is_number() || !(it.value().get<double>() > 0.0)) {
          rd.error(rp, "expected a positive number");
          continue;
        }
        f.domain.s[singular_point_from_string(it.key())] = it.value().get<double>();
      } catch (const Error& err) {
        rd.error(rp, err.what());
      }
    }
  }
  if (const Json* l = rd.child(doc, path, "label", false)) {
    if (l->is_string()) f.label = l->get<std::string>();
  }
  if (const Json* declared = rd.child(doc, path, "m_a", false)) {
    for (std::size_t k = 0; declared->is_array() && k < declared->size(); ++k) {
      try {
        m_a.push_back(singular_point_from_string((*declared)[k].get<std::string>()));
      } catch (const std::exception& err) {
        rd.error(path + "/m_a/" + std::to_string(k), err.what());
      }
    }
  }

  for (std::size_t k = 0; k < f.poles.size(); ++k) {
    const Complex p = f.poles[k].location;
    for (SingularPoint d : singular_points(a)) {
      const Extended loc = location(d, a);
      if (loc.is_finite() && is_close(loc.value(), p, kMergeTol)) {
        rd.error(path + "/poles/" + std::to_string(k) + "/at", "pole at the singular point " + to_string(d));
      }
    }
  }
  if (rd.diags.size() == before) {
    for (SingularPoint d : m_a) {
      if (!f.has_limit(d)) {
        rd.error(path + "/limits/" + escape_key(to_string(d)), "missing limit at a point of M_A");
      }
    }
  }
  return f;
}

RunConfig read_config(Reader& rd, const Json& doc, const std::string& path) {
  RunConfig cfg;
  if (!doc.is_object()) {
    rd.error(path, "expected an object");
    return cfg;
  }
  static const std::set<std::string> known = {"tol",           "max_panel_depth", "nodes_per_panel", "truncation_K",
                                              "rank_gap_ratio", "seed",           "output_dir"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!known.count(it.key())) rd.error(path + "/" + escape_key(it.key()), "unknown field");
  }
  if (auto v = rd.number(doc, path, "tol", false)) cfg.tol = *v;
  if (auto v = rd.integer(doc, path, "max_panel_depth", false)) cfg.max_panel_depth = *v;
  if (auto v = rd.integer(doc, path, "nodes_per_panel", false)) cfg.nodes_per_panel = *v;
  if (auto v = rd.integer(doc, path, "truncation_K", false)) cfg.truncation_K = *v;
  if (auto v = rd.number(doc, path, "rank_gap_ratio", false)) cfg.rank_gap_ratio = *v;
  if (const Json* s = rd.child(doc, path, "seed", false)) {
    if (s->is_number_unsigned()) {
      cfg.seed = s->get<std::uint64_t>();
    } else {
      rd.error(path + "/seed", "expected a nonnegative integer");
    }
  }
  if (const Json* o = rd.child(doc, path, "output_dir", false)) {
    if (o->is_string()) {
      cfg.output_dir = o->get<std::string>();
    } else {
      rd.error(path + "/output_dir", "expected a string");
    }
  }
  if (!(cfg.tol > 0.0)) rd.error(path + "/tol", "must be positive");
  if (!(cfg.tol < 1e-3)) rd.error(path + "/tol", "must be below 1e-3");
  if (cfg.max_panel_depth <= 0) rd.error(path + "/max_panel_depth", "must be positive");
  if (cfg.nodes_per_panel <= 0) rd.error(path + "/nodes_per_panel", "must be positive");
  if (cfg.truncation_K < 4) rd.error(path + "/truncation_K", "must be at least 4");
  if (!(cfg.rank_gap_ratio > 1.0)) rd.error(path + "/rank_gap_ratio", "must exceed 1");
  return cfg;
}

std::optional<Verdict> verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::Equal, Verdict::LhsSubset, Verdict::RhsSubset, Verdict::Violation, Verdict::Skipped}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

Scenario read_scenario(Reader& rd, const Json& doc) {
  Scenario sc;
  if (!doc.is_object()) {
    rd.error("", "expected an object");
    return sc;
  }
  if (const Json* n = rd.child(doc, "", "name", true)) {
    if (n->is_string()) {
      sc.name = n->get<std::string>();
    } else {
      rd.error("/name", "expected a string");
    }
  }
  if (const Json* d = rd.child(doc, "", "description", false)) {
    if (d->is_string()) sc.description = d->get<std::string>();
  }
  const Json* op = rd.child(doc, "", "operator", true);
  const Json* fn = rd.child(doc, "", "function", true);
  if (op) {
    sc.op_doc = *op;
    const std::size_t before = rd.diags.size();
    const OperatorModel model = read_operator(rd, *op, "/operator", std::nullopt);
    if (fn) {
      sc.fn_doc = *fn;
      if (rd.diags.size() == before) {
        read_function(rd, *fn, "/function", region_of(model).a, singular_set(model));
      } else {
        read_function(rd, *fn, "/function", 0.0, {});
      }
    }
  }
  sc.indices = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  if (const Json* idx = rd.child(doc, "", "indices", false)) {
    sc.indices.clear();
    for (std::size_t k = 0; idx->is_array() && k < idx->size(); ++k) {
      const Json& v = (*idx)[k];
      if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > 9) {
        rd.error("/indices/" + std::to_string(k), "expected an integer in 0..9");
      } else {
        sc.indices.insert(v.get<int>());
      }
    }
  }
  if (const Json* ex = rd.child(doc, "", "expected", false)) {
    for (auto it = ex->begin(); ex->is_object() && it != ex->end(); ++it) {
      const std::string ep = "/expected/" + escape_key(it.key());
      int i = -1;
      try {
        i = std::stoi(it.key());
      } catch (const std::exception&) {
      }
      auto v = it.value().is_string() ? verdict_from_string(it.value().get<std::string>()) : std::nullopt;
      if (i < 0 || i > 9) {
        rd.error(ep, "key must be an index in 0..9");
      } else if (!v) {
        rd.error(ep, "unknown verdict");
      } else {
        sc.expected[i] = *v;
      }
    }
  }
  if (const Json* pr = rd.child(doc, "", "probes", false)) {
    for (std::size_t k = 0; pr->is_array() && k < pr->size(); ++k) {
      if (auto z = rd.complex((*pr)[k], "/probes/" + std::to_string(k))) sc.probes.push_back(*z);
    }
  }
  if (const Json* fac = rd.child(doc, "", "factorization", false)) {
    if (const Json* mu = rd.child(*fac, "/factorization", "mu", true)) sc.factor_mu = rd.complex(*mu, "/factorization/mu");
  }
  if (const Json* pi = rd.child(doc, "", "projection_indices", false)) {
    for (std::size_t k = 0; pi->is_array() && k < pi->size(); ++k) {
      const Json& v = (*pi)[k];
      if (!v.is_number_integer() || v.get<int>() < 1 || v.get<int>() > 6) {
        rd.error("/projection_indices/" + std::to_string(k), "expected an integer in 1..6");
      } else {
        sc.projection_indices.push_back(v.get<int>());
      }
    }
  }
  if (const Json* cp = rd.child(doc, "", "condition_p", false)) {
    if (cp->is_boolean()) {
      sc.condition_p = cp->get<bool>();
    } else {
      rd.error("/condition_p", "expected a boolean");
    }
  }
  return sc;
}

}  // namespace

SchemaError::SchemaError(std::vector<Diagnostic> diags) : InputError(join(diags)), diags_(std::move(diags)) {}

std::vector<Diagnostic> validate_schema(const Json& doc, DocKind kind) {
  Reader rd;
  try {
    switch (kind) {
      case DocKind::Operator: read_operator(rd, doc, "", std::nullopt); break;
      case DocKind::Function: {
        const double a = doc.is_object() && doc.contains("a") && doc["a"].is_number() ? doc["a"].get<double>() : 0.0;
        read_function(rd, doc, "", a, {});
        break;
      }
      case DocKind::Scenario: read_scenario(rd, doc); break;
      case DocKind::Config: read_config(rd, doc, ""); break;
    }
  } catch (const std::exception& e) {
    rd.error("", e.what());
  }
  return rd.diags;
}

Json complex_to_json(Complex z) {
  if (!std::isfinite(std::abs(z))) return "inf";
  return Json::array({z.real(), z.imag()});
}

Json extended_to_json(const Extended& z) { return z.is_infinite() ? Json("inf") : complex_to_json(z.value()); }

Json count_to_json(const Count& c) { return c.is_infinite() ? Json("inf") : Json(c.value()); }

OperatorModel load_operator(const Json& doc, std::optional<int> horizon) {
  Reader rd;
  OperatorModel op = read_operator(rd, doc, "", horizon);
  rd.finish();
  return op;
}

Json operator_to_json(const OperatorModel& op) {
  Json j;
  const BisectorRegion region = region_of(op);
  j["omega"] = region.omega;
  j["a"] = region.a;
  if (const auto* dense = std::get_if<DenseOperator>(&op)) {
    j["kind"] = "dense";
    Json rows = Json::array();
    for (int r = 0; r < dense->size(); ++r) {
      Json row = Json::array();
      for (int c = 0; c < dense->size(); ++c) row.push_back(complex_to_json(dense->matrix()(r, c)));
      rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
    return j;
  }
  const auto& diag = std::get<DiagonalModel>(op);
  j["kind"] = "diagonal";
  j["horizon"] = diag.horizon();
  Json atoms = Json::array();
  for (const Atom& at : diag.atoms()) {
    atoms.push_back({{"value", complex_to_json(at.value)}, {"multiplicity", count_to_json(at.mult)}});
  }
  j["atoms"] = std::move(atoms);
  Json tails = Json::array();
  for (const Tail& t : diag.tails()) {
    Json tj;
    tj["limit"] = extended_to_json(t.limit);
    if (t.kind == Tail::Kind::Geometric) {
      tj["kind"] = "geometric";
      tj["base"] = complex_to_json(t.base);
      tj["ratio"] = complex_to_json(t.ratio);
    } else {
      tj["kind"] = "samples";
      Json s = Json::array();
      for (Complex z : t.samples) s.push_back(complex_to_json(z));
      tj["samples"] = std::move(s);
    }
    tails.push_back(std::move(tj));
  }
  j["tails"] = std::move(tails);
  return j;
}

MeromFn load_function(const Json& doc, double a, const std::vector<SingularPoint>& m_a) {
  Reader rd;
  MeromFn f = read_function(rd, doc, "", a, m_a);
  rd.finish();
  return f;
}

RunConfig load_config(const Json& doc) {
  Reader rd;
  RunConfig cfg = read_config(rd, doc, "");
  rd.finish();
  return cfg;
}

Json config_to_json(const RunConfig& cfg) {
  return {{"tol", cfg.tol},
          {"max_panel_depth", cfg.max_panel_depth},
          {"nodes_per_panel", cfg.nodes_per_panel},
          {"truncation_K", cfg.truncation_K},
          {"rank_gap_ratio", cfg.rank_gap_ratio},
          {"seed", cfg.seed},
          {"output_dir", cfg.output_dir}};
}

Scenario load_scenario(const Json& doc) {
  Reader rd;
  Scenario sc = read_scenario(rd, doc);
  rd.finish();
  return sc;
}

Json spectral_set_to_json(const SpectralSet& s) {
  Json out = Json::array();
  for (const SpectralPoint& p : s.points()) {
    Json j = {{"value", extended_to_json(p.value)},
              {"tag", to_string(p.tag)},
              {"multiplicity", count_to_json(p.multiplicity)}};
    if (!p.approach.empty()) j["approach_samples"] = p.approach.size();
    out.push_back(std::move(j));
  }
  return out;
}

Json profile_to_json(const FredholmProfile& p) {
  return {{"nul", count_to_json(p.nul)},
          {"def", count_to_json(p.def)},
          {"ascent", count_to_json(p.ascent)},
          {"descent", count_to_json(p.descent)},
          {"range_closed", p.range_closed},
          {"range_complemented", p.range_complemented},
          {"kernel_complemented", p.kernel_complemented}};
}

Json membership_to_json(const PhiMembership& m) {
  Json j = Json::object();
  for (int i = 0; i < 10; ++i) j["phi" + std::to_string(i)] = m[i];
  return j;
}

Json report_to_json(const QuadratureReport& r) {
  return {{"panels", r.panels},
          {"nodes", r.nodes},
          {"tail_estimate", r.tail_estimate},
          {"refinement_steps", r.refinement_steps}};
}

Json smt_report_to_json(const SMTReport& r) {
  Json entries = Json::array();
  for (const SMTEntry& e : r.entries) {
    entries.push_back({{"index", e.index},
                       {"expected", to_string(e.expected)},
                       {"verdict", to_string(e.verdict)},
                       {"lhs", spectral_set_to_json(e.lhs)},
                       {"rhs", spectral_set_to_json(e.rhs)}});
  }
  return {{"entries", std::move(entries)}, {"violations", r.violations()}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace speccalc
