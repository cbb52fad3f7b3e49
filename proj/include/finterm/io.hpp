#pragma once

// JSON serialization for towers, certificates, descent reports, and the
// auxiliary result types the command-line tool exposes.  Schemas:
//
// Tower file:
//   {"levels": [{"kind": "base"},
//               {"kind": "log"|"exp"|"primitive"|"hyperexp",
//                "arg": expr, "name"?: str},
//               {"kind": "algebraic", "minpoly": [expr, ...], "name"?: str},
//               {"kind": "dihedral", "minpoly": [expr, expr, expr],
//                "gamma": expr, "alpha_name"?, "eta_name"?},
//               {"kind": "sl2", "r": expr, "s": expr, "omega": expr,
//                "alpha_name"?, "y_name"?, "eta_name"?, "xi_name"?},
//               {"kind": "weierstrass", "g0": algnum, "g1": algnum,
//                "alpha": expr, "theta_name"?, "thetap_name"?}]}
//   Each entry is a layer; expressions refer to generators of earlier layers.
//   "minpoly" arrays list coefficients ascending (constant term first).
//
// Certificate file:
//   {"level": int, "terms": [{"c": algnum, "u": elem}], "v": elem, "f": elem,
//    "rootsums"?: [{"q": [algnum...], "c": [algnum...],
//                   "u": [[algnum...], ...]}]}
//   elem is an expression string, or — for base-level data whose constants
//   are not rational — {"num": [algnum...], "den": [algnum...]} with
//   coefficients ascending in x.  A rootsum entry denotes the sum over the
//   roots z of q of c(z) u(x,z)'/u(x,z); the inner "u" arrays list, for each
//   power of x ascending, the coefficients of that power as a polynomial in
//   z (ascending).
//
// Algebraic number (algnum):
//   "p/q" for rationals, otherwise {"field": str, "coords": ["p/q", ...]}
//   where field is the comma-separated rational coefficients of the monic
//   minimal polynomial over Q, leading coefficient first, and coords are the
//   coordinates in the power basis (constant coordinate first).  Constant
//   fields nested over a proper extension have no serialized form.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "finterm/certificate.hpp"
#include "finterm/descent.hpp"
#include "finterm/expr.hpp"
#include "finterm/ratint.hpp"
#include "finterm/riccati.hpp"
#include "finterm/tower.hpp"

namespace finterm {

using nlohmann::json;

namespace io_detail {

inline Rat rat_from_string(const std::string& s) {
  try {
    Rat r(s, 10);
    r.canonicalize();
    return r;
  } catch (const std::exception&) {
    throw std::domain_error("not a rational number: '" + s + "'");
  }
}

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

// shared registry so equal field strings map to one FieldPtr per file
struct FieldRegistry {
  std::map<std::string, FieldPtr> by_id;

  FieldPtr get(const std::string& id) {
    auto it = by_id.find(id);
    if (it != by_id.end()) return it->second;
    // parse comma-separated coefficients, leading first
    std::vector<Rat> desc;
    std::size_t start = 0;
    while (start <= id.size()) {
      std::size_t comma = id.find(',', start);
      std::string piece = id.substr(start, comma == std::string::npos ? comma : comma - start);
      desc.push_back(rat_from_string(piece));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    std::vector<Rat> asc(desc.rbegin(), desc.rend());
    Poly<Rat> m(asc);
    if (m.degree() < 2) throw std::domain_error("field polynomial must have degree >= 2");
    std::vector<AlgNum> lifted((std::size_t)m.degree() + 1);
    for (int i = 0; i <= m.degree(); ++i) lifted[(std::size_t)i] = AlgNum(m[i]);
    auto adj = adjoin_root(nullptr, Poly<AlgNum>(std::move(lifted)));
    if (!adj.field || adj.field->minpoly != m.monic())
      throw std::domain_error("field polynomial is not irreducible over Q: " + id);
    by_id.emplace(id, adj.field);
    return adj.field;
  }
};

}  // namespace io_detail

inline json algnum_to_json(const AlgNum& a) {
  if (a.is_rational()) return io_detail::rat_to_string(a.rational_value());
  const FieldPtr& f = a.field();
  if (f->parent)
    throw std::domain_error(
        "serialization: constants in a nested field extension have no JSON form");
  json co = json::array();
  std::vector<Rat> cs = a.coords();
  cs.resize((std::size_t)f->degree(), Rat(0));
  for (auto& c : cs) co.push_back(io_detail::rat_to_string(c));
  return json{{"field", f->id()}, {"coords", co}};
}

inline AlgNum algnum_from_json(const json& j, io_detail::FieldRegistry& reg) {
  if (j.is_string()) return AlgNum(io_detail::rat_from_string(j.get<std::string>()));
  if (!j.is_object() || !j.contains("field") || !j.contains("coords"))
    throw std::domain_error("algebraic number must be a string or {field, coords}");
  FieldPtr f = reg.get(j.at("field").get<std::string>());
  std::vector<Rat> co;
  for (auto& c : j.at("coords"))
    co.push_back(io_detail::rat_from_string(c.get<std::string>()));
  if ((int)co.size() != f->degree())
    throw std::domain_error("coords length must equal the field degree");
  return AlgNum(f, std::move(co));
}

// ---- tower ----

inline json tower_to_json(const TowerPtr& tw) {
  json levels = json::array();
  for (const TowerLayer& L : tw->layers) {
    const SimpleLevel& lv = tw->levels[(std::size_t)L.first_level];
    json e;
    e["kind"] = L.kind;
    if (L.kind == "base") {
      // nothing else
    } else if (L.kind == "log" || L.kind == "exp" || L.kind == "primitive" ||
               L.kind == "hyperexp") {
      e["arg"] = to_expr_string(lv.arg);
      e["name"] = lv.name;
    } else if (L.kind == "algebraic") {
      json mp = json::array();
      for (int i = 0; i <= lv.minpoly.degree(); ++i)
        mp.push_back(to_expr_string(lv.minpoly[i]));
      e["minpoly"] = mp;
      e["name"] = lv.name;
    } else if (L.kind == "dihedral") {
      json mp = json::array();
      for (int i = 0; i <= lv.minpoly.degree(); ++i)
        mp.push_back(to_expr_string(lv.minpoly[i]));
      e["minpoly"] = mp;
      e["gamma"] = to_expr_string(lv.arg);
      e["alpha_name"] = lv.name;
      e["eta_name"] = tw->levels[(std::size_t)L.first_level + 1].name;
    } else if (L.kind == "sl2") {
      const SimpleLevel& lxi = tw->levels[(std::size_t)L.first_level + 3];
      TowerElem y = tw->gen(L.first_level + 1);
      CoerceResult om = coerce_down(-(lxi.minpoly[0]) * y, L.first_level - 1);
      if (!om.ok) throw std::domain_error("serialization: cannot recover the sl2 weight");
      e["r"] = to_expr_string(lv.arg);
      e["s"] = to_expr_string(lv.arg2);
      e["omega"] = to_expr_string(om.value);
      e["alpha_name"] = lv.name;
      e["y_name"] = tw->levels[(std::size_t)L.first_level + 1].name;
      e["eta_name"] = tw->levels[(std::size_t)L.first_level + 2].name;
      e["xi_name"] = tw->levels[(std::size_t)L.first_level + 3].name;
    } else if (L.kind == "weierstrass") {
      e["g0"] = algnum_to_json(lv.g0);
      e["g1"] = algnum_to_json(lv.g1);
      e["alpha"] = to_expr_string(lv.alpha);
      e["theta_name"] = lv.name;
      e["thetap_name"] = tw->levels[(std::size_t)L.first_level + 1].name;
    } else {
      throw std::domain_error("serialization: unknown layer kind " + L.kind);
    }
    levels.push_back(std::move(e));
  }
  return json{{"levels", levels}};
}

inline TowerPtr tower_from_json(const json& j) {
  if (!j.is_object() || !j.contains("levels") || !j.at("levels").is_array())
    throw std::domain_error("tower file must be {\"levels\": [...]}");
  const json& levels = j.at("levels");
  if (levels.empty() || levels[0].value("kind", "") != "base")
    throw std::domain_error("the first level must have kind \"base\"");
  TowerPtr tw = Tower::create();
  io_detail::FieldRegistry reg;
  auto name_of = [&](const json& e, const char* key, const std::string& dflt) {
    std::string n = e.value(key, dflt);
    for (auto& lv : tw->levels)
      if (lv.name == n)
        throw std::domain_error("duplicate generator name '" + n + "'");
    return n;
  };
  auto expr_of = [&](const json& e, const char* key) {
    if (!e.contains(key) || !e.at(key).is_string())
      throw std::domain_error(std::string("layer is missing expression field \"") + key + "\"");
    return parse_expr(e.at(key).get<std::string>(), tw);
  };
  auto minpoly_of = [&](const json& e) {
    if (!e.contains("minpoly") || !e.at("minpoly").is_array() || e.at("minpoly").size() < 3)
      throw std::domain_error("layer needs a \"minpoly\" array of expression strings");
    std::vector<TowerElem> co;
    for (auto& s : e.at("minpoly")) co.push_back(parse_expr(s.get<std::string>(), tw));
    return Poly<TowerElem>(std::move(co));
  };
  for (std::size_t li = 1; li < levels.size(); ++li) {
    const json& e = levels[li];
    std::string kind = e.value("kind", "");
    std::string dflt = "t" + std::to_string(tw->size());
    if (kind == "log")
      tw->add_log(expr_of(e, "arg"), name_of(e, "name", dflt));
    else if (kind == "exp")
      tw->add_exp(expr_of(e, "arg"), name_of(e, "name", dflt));
    else if (kind == "primitive")
      tw->add_primitive(expr_of(e, "arg"), name_of(e, "name", dflt));
    else if (kind == "hyperexp")
      tw->add_hyperexp(expr_of(e, "arg"), name_of(e, "name", dflt));
    else if (kind == "algebraic")
      tw->add_algebraic(minpoly_of(e), name_of(e, "name", dflt));
    else if (kind == "dihedral")
      tw->add_dihedral(minpoly_of(e), expr_of(e, "gamma"),
                       name_of(e, "alpha_name", "alpha"), name_of(e, "eta_name", "eta"));
    else if (kind == "sl2")
      tw->add_sl2(expr_of(e, "r"), expr_of(e, "s"), expr_of(e, "omega"),
                  name_of(e, "alpha_name", "alpha"), name_of(e, "y_name", "y"),
                  name_of(e, "eta_name", "eta"), name_of(e, "xi_name", "xi"));
    else if (kind == "weierstrass") {
      if (!e.contains("g0") || !e.contains("g1"))
        throw std::domain_error("weierstrass layer needs \"g0\" and \"g1\"");
      tw->add_weierstrass(algnum_from_json(e.at("g0"), reg), algnum_from_json(e.at("g1"), reg),
                          expr_of(e, "alpha"), name_of(e, "theta_name", "theta"),
                          name_of(e, "thetap_name", "thetap"));
    } else {
      throw std::domain_error("unknown layer kind '" + kind + "'");
    }
  }
  return tw;
}

// ---- tower elements (expression string, or base-level coefficient form) ----

inline json elem_to_json(const TowerElem& e) {
  try {
    return to_expr_string(e);
  } catch (const std::domain_error&) {
    if (e.level() > 0)
      throw std::domain_error(
          "serialization: non-rational constants above the base level have no JSON form");
  }
  json num = json::array(), den = json::array();
  if (e.is_constant()) {
    num.push_back(algnum_to_json(e.constant()));
    den.push_back(algnum_to_json(AlgNum(Rat(1))));
  } else {
    const auto& pr = e.parts();
    for (int i = 0; i <= pr.num().degree(); ++i)
      num.push_back(algnum_to_json(pr.num()[i].constant()));
    for (int i = 0; i <= pr.den().degree(); ++i)
      den.push_back(algnum_to_json(pr.den()[i].constant()));
  }
  return json{{"num", num}, {"den", den}};
}

inline TowerElem elem_from_json(const json& j, const TowerPtr& tw,
                                io_detail::FieldRegistry& reg) {
  if (j.is_string()) return parse_expr(j.get<std::string>(), tw);
  if (!j.is_object() || !j.contains("num") || !j.contains("den"))
    throw std::domain_error("element must be an expression string or {num, den}");
  TowerElem x = tw->gen(0);
  auto build = [&](const json& arr) {
    TowerElem acc, pw = one_like(x);
    for (auto& c : arr) {
      acc = acc + TowerElem(algnum_from_json(c, reg)) * pw;
      pw = pw * x;
    }
    return acc;
  };
  TowerElem den = build(j.at("den"));
  if (is_zero(den)) throw std::domain_error("element has a zero denominator");
  return build(j.at("num")) / den;
}

// ---- certificates (with optional root-sum terms from rational integration) ----

namespace io_detail {

inline json alg_poly_to_json(const Poly<AlgNum>& p) {
  json out = json::array();
  for (int i = 0; i <= p.degree(); ++i) out.push_back(algnum_to_json(p[i]));
  return out;
}

inline Poly<AlgNum> alg_poly_from_json(const json& j, FieldRegistry& reg) {
  if (!j.is_array()) throw std::domain_error("polynomial must be an array of algebraic numbers");
  std::vector<AlgNum> co;
  for (auto& c : j) co.push_back(algnum_from_json(c, reg));
  return Poly<AlgNum>(std::move(co));
}

}  // namespace io_detail

inline json rootsum_to_json(const RootSumTerm& t) {
  json ux = json::array();
  for (auto& p : t.u_x) ux.push_back(io_detail::alg_poly_to_json(p));
  return json{{"q", io_detail::alg_poly_to_json(t.q)},
              {"c", io_detail::alg_poly_to_json(t.c)},
              {"u", ux}};
}

inline json cert_to_json(const Certificate& c,
                         const std::vector<RootSumTerm>& rootsums = {}) {
  json terms = json::array();
  for (auto& t : c.terms)
    terms.push_back(json{{"c", algnum_to_json(t.c)}, {"u", elem_to_json(t.u)}});
  json out{{"level", c.level},
           {"terms", terms},
           {"v", elem_to_json(c.v)},
           {"f", elem_to_json(c.f)}};
  if (!rootsums.empty()) {
    json rs = json::array();
    for (auto& t : rootsums) rs.push_back(rootsum_to_json(t));
    out["rootsums"] = rs;
  }
  return out;
}

inline Certificate cert_from_json(const json& j, const TowerPtr& tw,
                                  std::vector<RootSumTerm>* rootsums = nullptr) {
  if (!j.is_object() || !j.contains("level") || !j.contains("terms") ||
      !j.contains("v") || !j.contains("f"))
    throw std::domain_error("certificate file must have level, terms, v and f");
  io_detail::FieldRegistry reg;
  Certificate c;
  c.level = j.at("level").get<int>();
  for (auto& t : j.at("terms")) {
    if (!t.is_object() || !t.contains("c") || !t.contains("u"))
      throw std::domain_error("certificate term must have \"c\" and \"u\"");
    c.terms.push_back({algnum_from_json(t.at("c"), reg), elem_from_json(t.at("u"), tw, reg)});
  }
  c.v = elem_from_json(j.at("v"), tw, reg);
  c.f = elem_from_json(j.at("f"), tw, reg);
  if (j.contains("rootsums") && !j.at("rootsums").empty()) {
    if (!rootsums)
      throw std::domain_error(
          "certificates with root-sum terms are supported by verify-cert only");
    for (auto& r : j.at("rootsums")) {
      RootSumTerm t;
      t.q = io_detail::alg_poly_from_json(r.at("q"), reg);
      t.c = io_detail::alg_poly_from_json(r.at("c"), reg);
      for (auto& p : r.at("u")) t.u_x.push_back(io_detail::alg_poly_from_json(p, reg));
      rootsums->push_back(std::move(t));
    }
  }
  return c;
}

// ---- bridges between base-level tower elements and rational functions ----

inline TowerElem from_base_ratfunc(const RatFunc<AlgNum>& r, const TowerPtr& tw) {
  TowerElem x = tw->gen(0);
  auto build = [&](const Poly<AlgNum>& p) {
    TowerElem acc, pw = one_like(x);
    for (int i = 0; i <= p.degree(); ++i) {
      acc = acc + TowerElem(p[i]) * pw;
      pw = pw * x;
    }
    return acc;
  };
  return build(r.num()) / build(r.den());
}

// Certificate shape of a rational integration result (root sums kept intact).
inline Certificate ratint_to_cert(const RatIntResult& r, const RatFunc<AlgNum>& f,
                                  const TowerPtr& tw) {
  Certificate c;
  c.level = 0;
  c.v = from_base_ratfunc(r.v, tw);
  c.f = from_base_ratfunc(f, tw);
  for (auto& t : r.terms) c.terms.push_back({t.c, from_base_ratfunc(RatFunc<AlgNum>(t.u), tw)});
  return c;
}

// Verification that also accounts for root-sum terms attached to a base-level
// certificate.
inline bool verify_with_rootsums(const Certificate& c, const TowerPtr& tw,
                                 const std::vector<RootSumTerm>& rootsums) {
  if (rootsums.empty()) return verify(c, tw);
  cert_detail::check_shape(c, tw);
  TowerElem acc = derive(c.v);
  for (auto& t : c.terms) acc = acc + TowerElem(t.c) * logderiv(t.u);
  for (auto& t : rootsums) acc = acc + from_base_ratfunc(rootsum_value(t), tw);
  return acc == c.f;
}

// ---- descent reports ----

inline json report_to_json(const DescentReport& r) {
  json trace = json::array();
  for (auto& s : r.trace) {
    json e{{"layer", s.layer_index}, {"kind", s.kind}, {"rule", s.rule}};
    if (!s.note.empty()) e["note"] = s.note;
    trace.push_back(std::move(e));
  }
  json out{{"ok", r.ok}, {"input", cert_to_json(r.input)}, {"trace", trace}};
  if (r.ok) {
    out["output"] = cert_to_json(r.output);
  } else {
    out["code"] = r.code;
    out["message"] = r.message;
    if (!r.diagnostics.empty()) out["diagnostics"] = r.diagnostics;
  }
  return out;
}

// ---- riccati ----

inline json riccati_to_json(const RiccatiSolutions& s, const TowerPtr& tw) {
  json sols = json::array();
  for (auto& u : s.solutions) sols.push_back(elem_to_json(from_base_ratfunc(u, tw)));
  json out{{"solutions", sols}, {"complete", s.complete}};
  if (s.family) {
    out["family"] = true;
    out["family_note"] = s.family_note;
  }
  return out;
}

}  // namespace finterm
