#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "padicdm/diffmod.hpp"
#include "padicdm/morphism.hpp"
#include "padicdm/optimal.hpp"
#include "padicdm/polygon.hpp"

namespace padicdm {

using Json = nlohmann::ordered_json;

namespace detail {

inline mpq_class parse_mpq(const std::string& text) {
  mpq_class q;
  if (text.empty() || q.set_str(text, 10) != 0)
    throw Error(Errc::SchemaError, "not a rational number: '" + text + "'");
  q.canonicalize();
  return q;
}

inline mpq_class json_mpq(const Json& j) {
  if (j.is_number_integer()) return mpq_class(j.get<long>());
  if (j.is_string()) return parse_mpq(j.get<std::string>());
  throw Error(Errc::SchemaError, "expected an integer or a rational string, got " + j.dump());
}

inline const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(Errc::SchemaError, std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace detail

// ---- field ---------------------------------------------------------------

inline Json to_json(const Field& F) {
  Json j;
  j["p"] = F.p();
  if (F.degree() == 1) {
    j["ext"] = "base";
  } else {
    Json poly = Json::array();
    for (const auto& c : F.poly()) poly.push_back(c.get_str());
    j["ext"] = {{"poly", poly}, {"e", F.e()}, {"f", F.f()}};
  }
  j["digits"] = F.digits();
  return j;
}

inline FieldPtr field_from_json(const Json& j, std::optional<int> digits_override = std::nullopt) {
  long p = detail::require(j, "p").get<long>();
  int digits = digits_override ? *digits_override : j.value("digits", 64);
  if (!j.contains("ext") || (j["ext"].is_string() && j["ext"] == "base")) return Field::base(p, digits);
  const Json& ext = j["ext"];
  std::vector<mpz_class> poly;
  for (const auto& c : detail::require(ext, "poly")) {
    mpq_class q = detail::json_mpq(c);
    if (q.get_den() != 1) throw Error(Errc::SchemaError, "defining polynomial must be integral");
    poly.push_back(q.get_num());
  }
  return Field::extension(p, std::move(poly), detail::require(ext, "e").get<int>(),
                          detail::require(ext, "f").get<int>(), digits);
}

// ---- scalars and rationals ----------------------------------------------

inline Json to_json(const Rational& r) { return to_string(r); }

inline Json to_json(const std::optional<Rational>& r) { return r ? Json(to_string(*r)) : Json(nullptr); }

inline Json to_json(const PadicScalar& x) {
  Json j;
  j["val"] = to_json(x.valuation());
  Json coords = Json::array();
  for (const auto& [m, e] : x.coordinates()) coords.push_back({m.get_str(), std::to_string(e)});
  j["coords"] = coords;
  j["prec"] = to_json(x.precision());
  return j;
}

// Accepts an integer, a rational string, an array of coordinate rationals, or
// the object form written by to_json.
inline PadicScalar scalar_from_json(const FieldPtr& F, const Json& j) {
  if (j.is_number_integer() || j.is_string()) return scalar(F, detail::json_mpq(j));
  if (j.is_array()) {
    std::vector<mpq_class> q;
    for (const auto& c : j) q.push_back(detail::json_mpq(c));
    return PadicScalar::from_coords(F, q);
  }
  if (j.is_object()) {
    std::vector<mpq_class> q;
    for (const auto& c : detail::require(j, "coords")) {
      if (!c.is_array() || c.size() != 2) throw Error(Errc::SchemaError, "coordinate must be [mantissa, exponent]");
      mpq_class m = detail::json_mpq(c[0]);
      long e = std::stol(c[1].is_string() ? c[1].get<std::string>() : c[1].dump());
      mpq_class pe(1);
      mpz_class pp = F->pow_p(std::labs(e));
      if (e >= 0) pe = mpq_class(pp); else pe = mpq_class(mpz_class(1), pp);
      q.push_back(m * pe);
    }
    long prec = PadicScalar::kInf;
    if (j.contains("prec") && !j["prec"].is_null()) {
      Rational P = parse_rational(j["prec"].get<std::string>());
      prec = floor(P * Rational(F->e()));
    }
    return PadicScalar::from_rational_coords(F, q, 0, prec);
  }
  throw Error(Errc::SchemaError, "unrecognised scalar " + j.dump());
}

// ---- series, polygons, matrices --------------------------------------------

inline Json to_json(const TruncatedSeries& f) {
  Json j;
  j["center"] = to_json(f.center());
  j["var"] = f.var();
  j["N"] = f.order();
  Json c = Json::array();
  for (const auto& x : f.coeffs()) c.push_back(to_json(x));
  j["coeffs"] = c;
  return j;
}

// An object in the to_json layout, or a bare coefficient list read at
// `center` in `var`. Either way the result is padded or cut to order N.
inline TruncatedSeries series_from_json(const FieldPtr& F, const Json& j, const PadicScalar& center,
                                        int N, const std::string& var) {
  if (j.is_array()) {
    std::vector<PadicScalar> c;
    for (const auto& x : j) c.push_back(scalar_from_json(F, x));
    if (static_cast<int>(c.size()) > N) c.resize(static_cast<std::size_t>(N));
    return TruncatedSeries::from_coeffs(center, std::move(c), N, var);
  }
  PadicScalar c0 = j.contains("center") ? scalar_from_json(F, j["center"]) : center;
  std::string v = j.value("var", var);
  std::vector<PadicScalar> c;
  for (const auto& x : detail::require(j, "coeffs")) c.push_back(scalar_from_json(F, x));
  if (static_cast<int>(c.size()) > N) c.resize(static_cast<std::size_t>(N));
  return TruncatedSeries::from_coeffs(c0, std::move(c), N, v);
}

inline Json to_json(const ValuationPolygon& P) {
  Json j;
  Json v = Json::array();
  for (const auto& [i, a] : P.vertices()) v.push_back({std::to_string(i), to_string(a)});
  j["vertices"] = v;
  return j;
}

inline Json to_json(const SeriesMatrix& m) {
  Json j = Json::array();
  for (const auto& row : m) {
    Json r = Json::array();
    for (const auto& x : row) r.push_back(to_json(x));
    j.push_back(r);
  }
  return j;
}

inline Json to_json(const DiffModule& M, bool with_system) {
  Json j;
  j["rank"] = M.rank;
  j["var"] = M.var;
  j["A"] = to_json(M.A);
  if (with_system) j["system"] = to_json(M.system_matrix());
  return j;
}

inline const char* mode_name(RadiusMode m) {
  return m == RadiusMode::ExactClosedForm ? "exact" : "tail-slope";
}

inline Json to_json(const RadiusEstimate& r) {
  return {{"q", to_string(r.q)},
          {"q_unclamped", to_string(r.q_unclamped)},
          {"raw", to_string(r.raw)},
          {"tolerance", to_string(r.tolerance)},
          {"mode", mode_name(r.mode)},
          {"window", {r.window_begin, r.window_end}},
          {"stable", r.stable},
          {"nonzero_in_window", r.nonzero_in_window}};
}

// ---- trees and bases -----------------------------------------------------

inline Json to_json(const TreeOverPoint& tree) {
  Json j;
  Json pts = Json::array();
  for (const auto& a : tree.fib.points) pts.push_back(to_json(a));
  j["fiber"] = pts;
  Json bps = Json::array();
  for (const auto& bp : tree.branch_points) {
    Json b;
    b["representative"] = bp.representative;
    b["t_radius"] = to_string(bp.t_radius);
    b["branch_radius"] = to_json(bp.branch_radius);
    b["delta"] = bp.delta;
    b["branches"] = bp.branches;
    bps.push_back(b);
  }
  j["branch_points"] = bps;
  return j;
}

inline Json to_json(const OptimalBasis& B, bool with_entries = true) {
  Json j;
  j["rank"] = B.rank;
  j["degree"] = B.degree;
  Json cols = Json::array();
  for (const auto& c : B.columns) {
    Json col;
    col["origin"] = {{"pair", c.pair_id}, {"anchor", c.pair_anchor}, {"branch", c.branch}};
    col["disc"] = {{"center", c.disc.center}, {"q", to_string(c.disc.q)}};
    col["members"] = c.members;
    col["predicted_q"] = to_string(c.predicted_q);
    col["estimated_q"] = to_string(c.estimate.q);
    col["stable"] = c.estimate.stable;
    col["estimate"] = to_json(c.estimate);
    if (with_entries) {
      Json e = Json::array();
      for (const auto& x : c.entries) e.push_back(to_json(x));
      col["entries"] = e;
    }
    cols.push_back(col);
  }
  j["columns"] = cols;
  return j;
}

inline Json to_json(const OptimalityReport& r) {
  Json j;
  j["pass"] = r.pass;
  Json classes = Json::array();
  for (const auto& c : r.classes) {
    Json x{{"q", to_string(c.q)},
           {"columns", c.columns},
           {"exhaustive", c.exhaustive},
           {"combinations", c.combinations},
           {"failures", c.failures}};
    if (c.failures > 0) {
      x["first_failure"] = c.first_failure;
      x["first_failure_q"] = to_string(c.first_failure_q);
    }
    classes.push_back(x);
  }
  j["classes"] = classes;
  Json agree = Json::array();
  for (const auto& a : r.agreement)
    agree.push_back({{"column", a.column},
                     {"predicted", to_string(a.predicted)},
                     {"estimated", to_string(a.estimated)},
                     {"stable", a.stable},
                     {"pass", a.pass}});
  j["agreement"] = agree;
  return j;
}

}  // namespace padicdm
