#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "padicdm/json_io.hpp"

namespace padicdm {

inline const std::vector<std::string>& known_outputs() {
  static const std::vector<std::string> names{"tree", "vandermonde", "direct-image", "fundamental",
                                              "optimal", "checks"};
  return names;
}

struct ModuleSpec {
  enum class Kind { Trivial, Exp, Matrix };
  Kind kind = Kind::Trivial;
  int rank = 1;
  Json lambda;                        // Exp
  Json A;                             // Matrix
  std::optional<std::vector<Rational>> radii;  // Matrix: caller-asserted exponents
};

struct JobSpec {
  std::string name = "job";
  Json field;
  int N = 32;
  int R = 64;
  Json f;
  std::optional<int> degree;
  std::optional<Json> hints;
  Json center = "0";
  ModuleSpec module;
  std::set<std::string> outputs;
  std::uint64_t seed = 1;
  int trials = 50;
  DropRule drop_rule = DropRule::SmallestLeastIndex;

  bool wants(const std::string& o) const { return outputs.count(o) > 0; }
};

struct JobOverrides {
  std::optional<int> N;
  std::optional<int> R;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
};

inline JobSpec job_from_json(const Json& j, const JobOverrides& ov = {}) {
  if (!j.is_object()) throw Error(Errc::SchemaError, "job spec must be a JSON object");
  JobSpec s;
  s.name = j.value("name", std::string("job"));
  s.field = detail::require(j, "field");
  s.N = j.contains("series_order") ? j["series_order"].get<int>() : j.value("N", 32);
  s.R = j.contains("digits") ? j["digits"].get<int>() : s.field.value("digits", 64);
  if (ov.N) s.N = *ov.N;
  if (ov.R) s.R = *ov.R;
  if (s.N < 8) throw Error(Errc::SchemaError, "series order " + std::to_string(s.N) + " is below the minimum 8");
  if (s.R < 8) throw Error(Errc::SchemaError, "digit cap " + std::to_string(s.R) + " is below the minimum 8");
  const Json& m = detail::require(j, "morphism");
  s.f = detail::require(m, "f");
  if (m.contains("d")) s.degree = m["d"].get<int>();
  if (m.contains("hints")) s.hints = m["hints"];
  if (j.contains("center")) s.center = j["center"];
  if (j.contains("module")) {
    const Json& mod = j["module"];
    std::string kind = mod.value("kind", std::string("trivial"));
    if (kind == "trivial") {
      s.module.kind = ModuleSpec::Kind::Trivial;
      s.module.rank = mod.value("rank", 1);
      if (s.module.rank < 1) throw Error(Errc::SchemaError, "module rank must be positive");
    } else if (kind == "exp") {
      s.module.kind = ModuleSpec::Kind::Exp;
      s.module.lambda = detail::require(mod, "lambda");
    } else if (kind == "matrix") {
      s.module.kind = ModuleSpec::Kind::Matrix;
      s.module.A = detail::require(mod, "A");
      if (!s.module.A.is_array() || s.module.A.empty())
        throw Error(Errc::SchemaError, "module matrix must be a nonempty array of rows");
      s.module.rank = static_cast<int>(s.module.A.size());
      if (mod.contains("radii")) {
        std::vector<Rational> r;
        for (const auto& x : mod["radii"]) r.push_back(parse_rational(x.get<std::string>()));
        s.module.radii = std::move(r);
      }
    } else {
      throw Error(Errc::SchemaError, "module kind must be trivial, exp or matrix");
    }
  }
  if (j.contains("outputs")) {
    for (const auto& o : j["outputs"]) {
      std::string name = o.get<std::string>();
      const auto& known = known_outputs();
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw Error(Errc::SchemaError, "unknown output '" + name + "'");
      s.outputs.insert(name);
    }
  } else {
    s.outputs.insert(known_outputs().begin(), known_outputs().end());
  }
  s.seed = j.value("seed", std::uint64_t{1});
  s.trials = j.value("trials", 50);
  if (j.contains("drop_rule")) s.drop_rule = parse_drop_rule(j["drop_rule"].get<std::string>());
  if (ov.seed) s.seed = *ov.seed;
  if (ov.trials) s.trials = *ov.trials;
  if (s.trials < 1) throw Error(Errc::SchemaError, "trials must be positive");
  return s;
}

// Everything the pipeline produced; stages that failed or were not needed stay empty.
struct PipelineState {
  FieldPtr F;
  PadicScalar b;
  std::optional<DiscMorphism> phi;
  std::optional<Fiber> fib;
  std::optional<TreeOverPoint> tree;
  std::vector<TruncatedSeries> u;
  std::optional<VandermondeData> vand;
  std::optional<MonicRelation> relation;
  std::optional<DiffModule> M;
  std::optional<DiffModule> Mphi;
  std::vector<UpstairsBasis> linked;
  std::vector<FundamentalPair> pairs;
  std::optional<SeriesMatrix> fundamental;
  std::optional<OptimalBasis> trivial_basis;
  std::optional<OptimalBasis> basis;
};

class CheckLedger {
 public:
  void add(const std::string& name, bool pass, std::optional<Rational> worst = std::nullopt,
           const std::string& detail = "") {
    Json e{{"name", name}, {"pass", pass}, {"worst", to_json(worst)}};
    if (!detail.empty()) e["detail"] = detail;
    entries_.push_back(e);
    pass_ = pass_ && pass;
  }
  const Json& entries() const { return entries_; }
  bool pass() const { return pass_; }

 private:
  Json entries_ = Json::array();
  bool pass_ = true;
};

struct JobReport {
  Json json;
  bool pass = false;
  PipelineState state;
};

namespace detail {

// Lowest absolute precision among the coefficients; nullopt when all are exact.
inline std::optional<Rational> min_precision(const std::vector<const TruncatedSeries*>& xs) {
  std::optional<Rational> best;
  for (const auto* f : xs)
    for (const auto& c : f->coeffs()) {
      auto p = c.precision();
      if (p && (!best || *p < *best)) best = p;
    }
  return best;
}

inline std::optional<Rational> min_precision(const SeriesMatrix& m) {
  std::vector<const TruncatedSeries*> xs;
  for (const auto& row : m)
    for (const auto& x : row) xs.push_back(&x);
  return min_precision(xs);
}

inline std::optional<Rational> min_precision(const SeriesVector& v) {
  std::vector<const TruncatedSeries*> xs;
  for (const auto& x : v) xs.push_back(&x);
  return min_precision(xs);
}

// Smallest guaranteed valuation of the coefficients of r, all of which must
// vanish at precision for the identity to hold.
inline std::pair<bool, std::optional<Rational>> vanishes(const SeriesMatrix& r) {
  bool ok = true;
  std::optional<Rational> worst;
  for (const auto& row : r)
    for (const auto& x : row)
      for (const auto& c : x.coeffs()) {
        if (!c.is_zero()) ok = false;
        if (c.is_exact_zero()) continue;
        Rational m(c.magnitude_ticks(), c.field()->e());
        if (!worst || m < *worst) worst = m;
      }
  return {ok, worst};
}

inline SeriesMatrix column_matrix(const SeriesVector& v) {
  SeriesMatrix m;
  for (const auto& x : v) m.push_back({x});
  return m;
}

}  // namespace detail

inline void check_horizontal(CheckLedger& ledger, const std::string& name,
                             const std::vector<SeriesVector>& cols, const DiffModule& Mphi) {
  bool ok = true;
  std::optional<Rational> worst;
  std::string detail;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    HorizontalReport h = horizontal_check(cols[k], Mphi);
    if (h.worst && (!worst || *h.worst < *worst)) worst = h.worst;
    if (!h.pass) {
      ok = false;
      if (detail.empty())
        detail = "column " + std::to_string(k) + " row " + std::to_string(h.worst_row) + " order " +
                 std::to_string(h.worst_order);
    }
  }
  ledger.add(name, ok, worst, detail);
}

inline void check_basis(CheckLedger& ledger, const std::string& label, const OptimalBasis& B,
                        int expected, const PipelineState& st, const JobSpec& spec, Json& out) {
  ledger.add(label + ".count", B.size() == expected, std::nullopt,
             std::to_string(B.size()) + " of " + std::to_string(expected));
  ledger.add(label + ".independent", columns_independent(B));
  if (st.Mphi) {
    std::vector<SeriesVector> cols;
    for (const auto& c : B.columns) cols.push_back(c.entries);
    check_horizontal(ledger, label + ".horizontal", cols, *st.Mphi);
  }
  bool agree = true;
  std::string detail;
  for (std::size_t k = 0; k < B.columns.size(); ++k) {
    const auto& c = B.columns[k];
    if (c.estimate.stable && c.estimate.q != c.predicted_q) {
      agree = false;
      if (detail.empty())
        detail = "column " + std::to_string(k) + " predicted " + to_string(c.predicted_q) +
                 " estimated " + to_string(c.estimate.q);
    }
  }
  ledger.add(label + ".radius_agreement", agree, std::nullopt, detail);
  OptimalityReport rep = optimality_check(B, spec.trials, spec.seed);
  ledger.add(label + ".optimality", rep.pass);
  out[label + "_optimality"] = to_json(rep);
}

// Pipeline fiber -> tree -> local solutions -> Vandermonde -> direct image ->
// bases -> checks. Stage errors are recorded and stop dependent stages only.
inline JobReport run(const JobSpec& spec) {
  JobReport rep;
  PipelineState& st = rep.state;
  CheckLedger ledger;
  Json errors = Json::array();
  Json outputs = Json::object();
  Json precision = Json::object();
  const bool checks = spec.wants("checks");
  const bool need_vand = checks || spec.wants("vandermonde") || spec.wants("direct-image") ||
                         spec.wants("fundamental") || spec.wants("optimal");
  const bool need_basis = checks || spec.wants("optimal");

  auto stage = [&](const std::string& name, const std::function<void()>& body) {
    try {
      body();
      return true;
    } catch (const Error& e) {
      errors.push_back({{"stage", name}, {"code", errc_name(e.code())}, {"message", e.what()}});
    }
    return false;
  };

  bool ok = stage("morphism", [&] {
    st.F = field_from_json(spec.field, spec.R);
    st.b = scalar_from_json(st.F, spec.center);
    PadicScalar zero = PadicScalar::zero(st.F);
    TruncatedSeries f = series_from_json(st.F, spec.f, zero, spec.N, "t");
    if (!f.center().is_zero()) throw Error(Errc::CenterMismatch, "the morphism must be given at t = 0");
    st.phi.emplace(f, spec.degree);
  });
  ok = ok && stage("fiber", [&] {
    std::optional<std::vector<PadicScalar>> hints;
    if (spec.hints) {
      hints.emplace();
      for (const auto& h : *spec.hints) hints->push_back(scalar_from_json(st.F, h));
    }
    st.fib = fiber(*st.phi, st.b, hints);
  });
  ok = ok && stage("tree", [&] {
    st.tree = tree_over_point(*st.phi, *st.fib);
    if (spec.wants("tree")) outputs["tree"] = to_json(*st.tree);
    if (!checks) return;
    bool euler_ok = true;
    std::string detail;
    auto test = [&](int c, const Rational& l) {
      EulerCount e = euler_count(*st.tree, c, l);
      if (e.lhs != e.rhs && detail.empty())
        detail = "disc at preimage " + std::to_string(c) + " exponent " + to_string(l);
      euler_ok = euler_ok && e.lhs == e.rhs;
    };
    test(0, Rational(0));
    for (const auto& bp : st.tree->branch_points) {
      test(bp.representative, bp.t_radius - Rational(1, 2));
      for (const auto& part : bp.branches) test(part.front(), bp.t_radius);
    }
    ledger.add("tree.euler_identity", euler_ok, std::nullopt, detail);
  });
  if (ok && need_vand) {
    ok = stage("vandermonde", [&] {
      st.u = local_solutions(*st.phi, *st.fib);
      st.vand = vandermonde(*st.fib, st.u);
      st.relation = monic_relation_from(st.u);
      precision["vandermonde"] = to_json(detail::min_precision(st.vand->V));
      if (spec.wants("vandermonde")) {
        Json v;
        Json us = Json::array();
        for (const auto& x : st.u) us.push_back(to_json(x));
        v["local_solutions"] = us;
        v["V"] = to_json(st.vand->V);
        outputs["vandermonde"] = v;
      }
      if (!checks) return;
      const TruncatedSeries& like = st.u.front();
      SeriesMatrix I = identity_matrix(st.fib->size(), like.center(), st.vand->V[0][0].order(), like.var());
      auto [uv_ok, uv_worst] = detail::vanishes(add(multiply(st.vand->U, st.vand->V), negate(I)));
      ledger.add("vandermonde.uv_identity", uv_ok, uv_worst);
      SeriesVector ones(static_cast<std::size_t>(st.fib->size()),
                        TruncatedSeries::constant(scalar(st.F, 1), like.center(), I[0][0].order(), like.var()));
      SeriesVector e1 = mat_vec(st.vand->V, ones);
      SeriesVector diff;
      for (int i = 0; i < st.fib->size(); ++i) diff.push_back(e1[i] - I[i][0]);
      auto [e1_ok, e1_worst] = detail::vanishes(detail::column_matrix(diff));
      ledger.add("vandermonde.ones_to_e1", e1_ok, e1_worst);
    });
  }
  if (ok && need_vand) {
    stage("module", [&] {
      PadicScalar zero = PadicScalar::zero(st.F);
      switch (spec.module.kind) {
        case ModuleSpec::Kind::Trivial:
          st.M = trivial_module(spec.module.rank, zero, spec.N, "t");
          break;
        case ModuleSpec::Kind::Exp:
          st.M = exp_module(scalar_from_json(st.F, spec.module.lambda), zero, spec.N, "t");
          break;
        case ModuleSpec::Kind::Matrix: {
          SeriesMatrix A;
          for (const auto& row : spec.module.A) {
            SeriesVector r;
            for (const auto& x : row) r.push_back(series_from_json(st.F, x, zero, spec.N, "t"));
            A.push_back(std::move(r));
          }
          st.M = DiffModule::from_matrix(std::move(A));
          if (!st.M->center.is_zero()) throw Error(Errc::CenterMismatch, "the module must be given at t = 0");
          if (st.M->var != "t") throw Error(Errc::VariableMismatch, "the module variable must be t");
          break;
        }
      }
    });
  }
  const bool want_di = checks || spec.wants("direct-image");
  if (ok && st.M && want_di) {
    stage("direct-image", [&] {
      st.Mphi = direct_image(*st.M, *st.phi, *st.relation);
      precision["direct-image"] = to_json(detail::min_precision(st.Mphi->A));
      if (spec.wants("direct-image")) outputs["direct-image"] = to_json(*st.Mphi, true);
      if (checks)
        ledger.add("direct-image.rank", st.Mphi->rank == st.M->rank * st.phi->degree());
    });
  }
  if (ok && st.M && (checks || spec.wants("fundamental"))) {
    stage("fundamental", [&] {
      std::vector<HorizontalMatrix> hs;
      for (const auto& a : st.fib->points) hs.push_back(local_solution_matrix(*st.M, a, spec.N));
      st.fundamental = fundamental_solution_matrix(hs, *st.vand);
      precision["fundamental"] = to_json(detail::min_precision(*st.fundamental));
      if (spec.wants("fundamental")) outputs["fundamental"] = to_json(*st.fundamental);
      if (!checks) return;
      std::vector<SeriesVector> columns;
      for (int l = 0; l < cols(*st.fundamental); ++l) {
        SeriesVector c;
        for (const auto& row : *st.fundamental) c.push_back(row[l]);
        columns.push_back(std::move(c));
      }
      ledger.add("fundamental.independent", constant_rank(columns) == static_cast<int>(columns.size()));
      if (st.Mphi) check_horizontal(ledger, "fundamental.horizontal", columns, *st.Mphi);
    });
  }
  if (ok && st.M && need_basis) {
    stage("optimal", [&] {
      std::vector<UpstairsBasis> up;
      switch (spec.module.kind) {
        case ModuleSpec::Kind::Trivial:
          up = trivial_upstairs_bases(*st.fib, spec.module.rank, spec.N);
          break;
        case ModuleSpec::Kind::Exp:
          up = exp_upstairs_bases(*st.fib, *st.M, scalar_from_json(st.F, spec.module.lambda), spec.N);
          break;
        case ModuleSpec::Kind::Matrix:
          up = estimated_upstairs_bases(*st.fib, *st.M, spec.N, spec.module.radii);
          break;
      }
      st.linked = linked_bases(std::move(up), *st.fib, *st.M);
      st.pairs = fundamental_pairs(st.linked);
      Json out;
      Json pairs = Json::array();
      for (const auto& P : st.pairs)
        pairs.push_back({{"id", P.id}, {"anchor", P.anchor}, {"q", to_string(P.q)}, {"members", P.members}});
      out["pairs"] = pairs;
      const int d = st.phi->degree();
      if (spec.module.kind == ModuleSpec::Kind::Trivial && spec.module.rank == 1) {
        st.trivial_basis = trivial_optimal_basis(*st.tree, *st.vand, &*st.phi, spec.drop_rule);
        out["trivial_basis"] = to_json(*st.trivial_basis);
      }
      st.basis = optimal_basis(st.linked, st.pairs, *st.tree, *st.vand, *st.phi, spec.drop_rule);
      out["basis"] = to_json(*st.basis);
      precision["optimal"] = [&] {
        std::vector<const TruncatedSeries*> xs;
        for (const auto& c : st.basis->columns)
          for (const auto& x : c.entries) xs.push_back(&x);
        return to_json(detail::min_precision(xs));
      }();
      if (checks) {
        ledger.add("optimal.linked", is_linked(st.linked, *st.fib));
        if (st.trivial_basis) check_basis(ledger, "trivial_basis", *st.trivial_basis, d, st, spec, out);
        check_basis(ledger, "basis", *st.basis, st.M->rank * d, st, spec, out);
      }
      if (spec.wants("optimal")) outputs["optimal"] = out;
    });
  }

  Json j;
  j["job"] = spec.name;
  j["field"] = st.F ? to_json(*st.F) : spec.field;
  j["series_order"] = spec.N;
  j["digits"] = spec.R;
  j["seed"] = spec.seed;
  j["trials"] = spec.trials;
  j["drop_rule"] = drop_rule_name(spec.drop_rule);
  j["outputs"] = outputs;
  j["checks"] = ledger.entries();
  j["errors"] = errors;
  j["precision"] = precision;
  rep.pass = ledger.pass() && errors.empty();
  j["pass"] = rep.pass;
  rep.json = std::move(j);
  return rep;
}

// ---- polygon emission ------------------------------------------------------

struct PolygonData {
  std::string selector;
  ValuationPolygon polygon;
  std::vector<std::pair<Rational, Rational>> samples;  // (l, vq(l))
};

namespace detail {

inline std::vector<int> selector_indices(const std::string& text, std::size_t count) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      int v = std::stoi(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(Errc::SelectorError, "bad index '" + part + "' in selector");
    }
  }
  if (out.size() != count) throw Error(Errc::SelectorError, "selector expects " + std::to_string(count) + " indices");
  return out;
}

inline const TruncatedSeries& pick(const SeriesMatrix& m, int i, int k) {
  if (i < 0 || i >= rows(m) || k < 0 || k >= cols(m)) throw Error(Errc::SelectorError, "index out of range");
  return m[i][k];
}

}  // namespace detail

// Selectors: f, shift:I, u:I, V:I,K, system:I,K, basis:C,K (column C, entry K).
inline PolygonData emit_polygon(const JobReport& rep, const std::string& selector) {
  const PipelineState& st = rep.state;
  auto colon = selector.find(':');
  std::string head = selector.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : selector.substr(colon + 1);
  auto need = [&](bool present, const char* what) {
    if (!present) throw Error(Errc::SelectorError, std::string(what) + " is not available in this report");
  };
  TruncatedSeries target;
  if (head == "f" && rest.empty()) {
    need(st.phi.has_value(), "the morphism");
    target = st.phi->f();
  } else if (head == "shift") {
    need(st.fib.has_value(), "the fiber");
    int i = detail::selector_indices(rest, 1)[0];
    if (i < 0 || i >= st.fib->size()) throw Error(Errc::SelectorError, "preimage index out of range");
    target = taylor_shift(st.phi->f(), st.fib->points[i]);
  } else if (head == "u") {
    need(!st.u.empty(), "local solutions");
    int i = detail::selector_indices(rest, 1)[0];
    if (i < 0 || i >= static_cast<int>(st.u.size())) throw Error(Errc::SelectorError, "preimage index out of range");
    target = st.u[i];
  } else if (head == "V") {
    need(st.vand.has_value(), "V");
    auto ix = detail::selector_indices(rest, 2);
    target = detail::pick(st.vand->V, ix[0], ix[1]);
  } else if (head == "system") {
    need(st.Mphi.has_value(), "the direct image");
    auto ix = detail::selector_indices(rest, 2);
    target = detail::pick(st.Mphi->system_matrix(), ix[0], ix[1]);
  } else if (head == "basis") {
    need(st.basis.has_value(), "the optimal basis");
    auto ix = detail::selector_indices(rest, 2);
    if (ix[0] < 0 || ix[0] >= st.basis->size()) throw Error(Errc::SelectorError, "column out of range");
    const auto& col = st.basis->columns[ix[0]].entries;
    if (ix[1] < 0 || ix[1] >= static_cast<int>(col.size())) throw Error(Errc::SelectorError, "entry out of range");
    target = col[ix[1]];
  } else {
    throw Error(Errc::SelectorError, "unknown selector '" + selector + "'");
  }
  PolygonData out{selector, valuation_polygon(target), {}};
  Rational top(1);
  for (const auto& b : out.polygon.breakpoints()) top = std::max(top, b + Rational(1));
  long steps = 4 * static_cast<long>(ceil(top));
  for (long k = 0; k <= steps; ++k) {
    Rational l(k, 4);
    out.samples.emplace_back(l, out.polygon.vq(l));
  }
  return out;
}

inline Json to_json(const PolygonData& d) {
  Json j = to_json(d.polygon);
  j["selector"] = d.selector;
  Json s = Json::array();
  for (const auto& [l, v] : d.samples) s.push_back({to_string(l), to_string(v)});
  j["samples"] = s;
  return j;
}

inline std::string to_csv(const PolygonData& d) {
  std::ostringstream os;
  os << "kind,x,y\n";
  for (const auto& [i, a] : d.polygon.vertices()) os << "vertex," << i << "," << to_string(a) << "\n";
  for (const auto& [l, v] : d.samples) os << "sample," << to_string(l) << "," << to_string(v) << "\n";
  return os.str();
}

}  // namespace padicdm
