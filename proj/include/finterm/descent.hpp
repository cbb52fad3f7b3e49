#pragma once

// Layer-by-layer descent of elementary-integral certificates: given a
// verified certificate f = sum_i c_i u_i'/u_i + v' over the top of a tower
// whose integrand f lies in the base field, rewrite it as a certificate over
// the base.  Each layer kind has its own rule:
//   - monomial (log / exp / primitive / hyperexponential generators): the
//     arguments split as v_i * t^{m_i}, the remainder is (at most) linear in
//     the generator, and the leftover generator term folds into the sum (log
//     layers) or the remainder (exp layers);
//   - algebraic: the conjugate-trace move, replacing arguments by their norms
//     with constants scaled by 1/deg and the remainder by its trace / deg;
//   - dihedral: the monomial rule on the hyperexponential generator followed
//     by the quadratic trace move, with the collected generator coefficient e
//     re-emitted as the term (e/4) * gamma'/gamma;
//   - sl2: the resolved chain is processed in the fixed order
//     quadratic -> primitive -> hyperexponential, then membership of the
//     surviving data in the base of the chain and vanishing of the collected
//     exponent sum are asserted;
//   - weierstrassian: after constant normalization every argument and the
//     remainder must already lie below the layer, and are simply re-leveled.
//
// A violated assertion always means a violated hypothesis (unverified input,
// integrand outside the base, new constants in the tower); it raises a
// DescentError carrying one of the documented diagnostic codes:
//   UNVERIFIED                     input fails verification at its level
//   F_NOT_IN_BASE                  integrand lives above the target level
//   BAD_LAYER                      rule applied to a layer of the wrong kind
//   MONOMIAL_ARG_STRUCTURE         argument is not of the form v * t^m
//   MONOMIAL_REMAINDER_STRUCTURE   remainder is not the guaranteed polynomial
//                                  shape in the generator
//   NEW_CONSTANT                   a generator monomial with vanishing
//                                  derivative (a fresh constant) was found
//   RESIDUAL_GENERATOR_TERM        leftover multiple of the generator
//                                  derivative cannot fold below the layer
//   ALGEBRAIC_STRUCTURE            an argument has zero norm (reducible
//                                  minimal polynomial)
//   SL2_RESIDUE                    surviving argument or remainder is not in
//                                  the base of the chain (series-order data
//                                  at constant poles attached)
//   SL2_EXPONENT                   collected exponent sum e != 0 (reported
//                                  separately: not known to be reachable for
//                                  verified inputs over honest towers)
//   WEIER_MEMBER                   argument or remainder still involves the
//                                  weierstrassian generators (constant-point
//                                  divisor attached)

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "finterm/certificate.hpp"
#include "finterm/laurent.hpp"
#include "finterm/tower.hpp"
#include "finterm/weierstrass.hpp"

namespace finterm {

struct DescentError : std::runtime_error {
  std::string code;
  std::string diagnostics;
  DescentError(std::string code_, const std::string& msg, std::string diag = {})
      : std::runtime_error(code_ + ": " + msg),
        code(std::move(code_)),
        diagnostics(std::move(diag)) {}
};

namespace descent_detail {

inline const TowerLayer& layer_of(const TowerPtr& tw, int level) {
  for (const auto& L : tw->layers)
    if (level >= L.first_level && level < L.first_level + L.level_count) return L;
  throw std::domain_error("descent: level outside the tower");
}

inline bool is_primitive_kind(LevelKind k) {
  return k == LevelKind::Log || k == LevelKind::Primitive;
}
inline bool is_hyperexp_kind(LevelKind k) {
  return k == LevelKind::Exp || k == LevelKind::Hyperexp;
}

inline std::string an_str(const AlgNum& a) {
  std::string s = "[";
  const auto& co = a.coords();
  if (co.empty()) s += "0";
  for (std::size_t i = 0; i < co.size(); ++i) {
    if (i) s += ",";
    s += co[i].get_str();
  }
  return s + "]";
}

inline void require_integrand_below(const Certificate& c, int level) {
  if (c.f.level() >= level)
    throw DescentError("F_NOT_IN_BASE", "integrand does not lie below the descended layer");
}

inline void require_verified(const Certificate& c, const TowerPtr& tw) {
  if (!verify(c, tw))
    throw DescentError("UNVERIFIED", "certificate does not verify at its declared level");
}

// One transcendental-generator step.  On success the returned data satisfy
//   f = sum_i c_i u_i'/u_i + v' + e * mult
// with every element below `level`; mult is t' (primitive kinds) or t'/t
// (hyperexponential kinds).  `carry` admits one extra additive term carry*t
// in the input identity (used by the sl2 chain, where the primitive step
// hands its residue to the hyperexponential step below it).
struct MonomialStep {
  std::vector<CertTerm> terms;
  TowerElem v;
  AlgNum e = AlgNum(Rat(0));
  TowerElem mult;
};

inline MonomialStep monomial_step(const Certificate& c, const TowerPtr& tw, int level,
                                  const AlgNum& carry = AlgNum(Rat(0))) {
  const SimpleLevel& lv = tw->levels[(std::size_t)level];
  Poly<TowerElem> tp = gen_derivative_poly(tw, level);
  MonomialStep out;
  const std::string& gname = lv.name;

  if (is_primitive_kind(lv.kind)) {
    if (!is_zero(carry))
      throw DescentError("MONOMIAL_REMAINDER_STRUCTURE",
                         "primitive step cannot absorb a pending generator term");
    out.mult = tp[0];
    for (const auto& t : c.terms) {
      if (t.u.level() >= level)
        throw DescentError("MONOMIAL_ARG_STRUCTURE",
                           "argument involves the primitive generator " + gname);
      out.terms.push_back(t);
    }
    if (c.v.level() < level) {
      out.v = c.v;
      return out;
    }
    const auto& pr = c.v.parts();
    if (pr.den().degree() != 0)
      throw DescentError("MONOMIAL_REMAINDER_STRUCTURE",
                         "remainder is not a polynomial in the generator " + gname);
    TowerElem d0 = pr.den()[0];
    for (int j = 2; j <= pr.num().degree(); ++j)
      if (!is_zero(pr.num()[j]))
        throw DescentError("MONOMIAL_REMAINDER_STRUCTURE",
                           "remainder has degree > 1 in the generator " + gname);
    TowerElem b1 = pr.num().degree() >= 1 ? pr.num()[1] / d0 : TowerElem();
    if (!b1.is_constant()) {
      if (is_zero(derive(b1)))
        throw DescentError("NEW_CONSTANT",
                           "linear remainder coefficient is a fresh constant of the tower");
      throw DescentError("MONOMIAL_REMAINDER_STRUCTURE",
                         "linear remainder coefficient in " + gname + " is not constant");
    }
    out.e = is_zero(b1) ? AlgNum(Rat(0)) : b1.constant();
    out.v = pr.num().degree() >= 0 ? pr.num()[0] / d0 : TowerElem();
    return out;
  }

  if (!is_hyperexp_kind(lv.kind))
    throw DescentError("BAD_LAYER", "monomial rule applied to a non-monomial generator");

  out.mult = tp[1];  // t'/t
  auto single_term = [](const Poly<TowerElem>& p) -> std::optional<int> {
    int j = -1;
    for (int i = 0; i <= p.degree(); ++i) {
      if (is_zero(p[i])) continue;
      if (j >= 0) return std::nullopt;
      j = i;
    }
    return j;
  };
  AlgNum esum(Rat(0));
  for (const auto& t : c.terms) {
    if (t.u.level() < level) {
      out.terms.push_back(t);
      continue;
    }
    const auto& pr = t.u.parts();
    auto jn = single_term(pr.num()), jd = single_term(pr.den());
    if (!jn || !jd)
      throw DescentError("MONOMIAL_ARG_STRUCTURE",
                         "argument is not a monomial multiple of the generator " + gname);
    long m = *jn - *jd;
    TowerElem vi = pr.num()[*jn] / pr.den()[*jd];
    esum = esum + t.c * AlgNum(Rat(m));
    if (!vi.is_constant()) out.terms.push_back({t.c, vi});
  }
  out.e = esum;

  if (c.v.level() < level) {
    if (!is_zero(carry))
      throw DescentError("MONOMIAL_REMAINDER_STRUCTURE",
                         "pending generator term has no matching linear remainder part");
    out.v = c.v;
    return out;
  }
  const auto& pr = c.v.parts();
  auto jd = single_term(pr.den());
  if (!jd)
    throw DescentError("MONOMIAL_REMAINDER_STRUCTURE",
                       "remainder denominator is not a monomial in the generator " + gname);
  TowerElem dcoef = pr.den()[*jd];
  for (int j = 0; j <= pr.num().degree(); ++j) {
    if (is_zero(pr.num()[j])) continue;
    int s = j - *jd;
    TowerElem bs = pr.num()[j] / dcoef;
    if (s == 0) {
      out.v = bs;
      continue;
    }
    if (s == 1) {
      // the linear part b1*t is consumed by the pending carry*t term exactly
      // when (b1*t)' + carry*t = 0, i.e. b1' + (t'/t) b1 + carry = 0
      TowerElem chk = derive(bs) + out.mult * bs + TowerElem(carry);
      if (is_zero(chk)) {
        if (is_zero(carry))
          throw DescentError("NEW_CONSTANT",
                             "generator-linear remainder part is a fresh constant of the tower");
        continue;
      }
      throw DescentError("MONOMIAL_REMAINDER_STRUCTURE",
                         "generator-linear remainder part is not matched by the pending term");
    }
    TowerElem chk = derive(bs) + k_int(s, out.mult) * bs;
    if (is_zero(chk))
      throw DescentError("NEW_CONSTANT",
                         "generator monomial in the remainder is a fresh constant of the tower");
    throw DescentError("MONOMIAL_REMAINDER_STRUCTURE",
                       "remainder has generator exponent outside {0,1} in " + gname);
  }
  return out;
}

// series-order diagnostic for an element stuck at a Riccati-type level:
// report its orders at the constant poles of its denominator
inline std::string order_diagnostic(const TowerPtr& tw, int level, const TowerElem& e,
                                    const std::string& what) {
  std::string s = what;
  if (e.level() < 0) return s;
  s += " involves generator " + tw->levels[(std::size_t)e.level()].name;
  if (e.level() != level) return s;
  try {
    Poly<AlgNum> cr = weier_detail::constant_root_part(e.parts().den());
    if (cr.degree() >= 1) {
      cr = divrem(cr, poly_gcd(cr, cr.derivative())).first.monic();
      FieldPtr F;
      for (int i = 0; i <= cr.degree(); ++i) {
        const FieldPtr& cf = cr[i].field();
        if (cf && (!F || cf->depth > F->depth)) F = cf;
      }
      for (const auto& fac : factor_squarefree_over_field(F, cr)) {
        if (fac.factor.degree() != 1) continue;
        AlgNum a = -fac.factor[0] / fac.factor[1];
        auto o = ord_at(e, tw, level, TowerElem(a));
        s += "; ord at " + an_str(a) + " = " + (o ? std::to_string(*o) : "+inf");
      }
    }
  } catch (const std::exception&) {
    // diagnostics stay best-effort
  }
  return s;
}

// constant-point divisor diagnostic for an element stuck on a weierstrassian
// layer
inline std::string divisor_diagnostic(const TowerPtr& tw, int theta_level, const TowerElem& e,
                                      const std::string& what) {
  std::string s = what + " involves the weierstrassian generators";
  try {
    WeierstrassCurve C = curve_at(tw, theta_level);
    DivisorResult dr = constant_point_divisor(C, e);
    s += "; constant-point divisor:";
    for (const auto& en : dr.divisor.entries) {
      if (en.point.infinity)
        s += " [oo: " + std::to_string(en.value) + "]";
      else
        s += " [(" + an_str(en.point.x) + "," + an_str(en.point.y) +
             ")x" + std::to_string(en.conjugates) + ": " + std::to_string(en.value) + "]";
    }
    if (dr.residual) s += " (residual non-constant places remain)";
  } catch (const std::exception&) {
    s += "; divisor unavailable";
  }
  return s;
}

// final sl2 assertions: everything must lie strictly below the chain and the
// collected exponent sum must vanish
inline Certificate sl2_finish(std::vector<CertTerm> terms, TowerElem v, const AlgNum& e,
                              const TowerPtr& tw, int alpha_level, const TowerElem& f) {
  for (const auto& t : terms)
    if (t.u.level() >= alpha_level)
      throw DescentError("SL2_RESIDUE",
                         "argument does not descend to the base of the chain",
                         order_diagnostic(tw, alpha_level, t.u, "argument"));
  if (v.level() >= alpha_level)
    throw DescentError("SL2_RESIDUE",
                       "remainder does not descend to the base of the chain",
                       order_diagnostic(tw, alpha_level, v, "remainder"));
  if (!is_zero(e))
    throw DescentError("SL2_EXPONENT", "collected exponent sum is nonzero",
                       "e = " + an_str(e));
  Certificate out;
  out.level = alpha_level - 1;
  out.terms = std::move(terms);
  out.v = std::move(v);
  out.f = f;
  return normalize_constants(out);
}

}  // namespace descent_detail

// Monomial rule at the certificate's level (a log / exp / primitive /
// hyperexponential generator).  Log layers fold the leftover e*t' = e*a'/a
// into a new term (e, a); exp layers fold e*t'/t = e*a' into the remainder.
inline Certificate descend_monomial(const Certificate& c, const TowerPtr& tw) {
  using namespace descent_detail;
  int level = c.level;
  if (level <= 0) throw DescentError("BAD_LAYER", "no layer to descend at the base");
  const SimpleLevel& lv = tw->levels[(std::size_t)level];
  if (!is_primitive_kind(lv.kind) && !is_hyperexp_kind(lv.kind))
    throw DescentError("BAD_LAYER", "monomial rule applied to a non-monomial generator");
  require_integrand_below(c, level);
  require_verified(c, tw);
  MonomialStep st = monomial_step(normalize_constants(c), tw, level);
  Certificate out;
  out.level = level - 1;
  out.terms = std::move(st.terms);
  out.v = st.v;
  out.f = c.f;
  if (!is_zero(st.e)) {
    switch (lv.kind) {
      case LevelKind::Log:
        out.terms.push_back({st.e, lv.arg});
        break;
      case LevelKind::Exp:
        out.v = out.v + TowerElem(st.e) * lv.arg;
        break;
      default:
        throw DescentError("RESIDUAL_GENERATOR_TERM",
                           "leftover multiple of the generator derivative of " + lv.name +
                               " cannot fold below this layer",
                           "e = " + an_str(st.e));
    }
  }
  return normalize_constants(out);
}

// Conjugate-trace rule at an algebraic level of degree d: arguments at the
// level become their norms with constants scaled by 1/d, the remainder its
// trace / d; data already below the level pass through unchanged.
inline Certificate descend_algebraic(const Certificate& c, const TowerPtr& tw) {
  using namespace descent_detail;
  int level = c.level;
  if (level <= 0) throw DescentError("BAD_LAYER", "no layer to descend at the base");
  const SimpleLevel& lv = tw->levels[(std::size_t)level];
  if (!tower_detail::is_algebraic_kind(lv.kind))
    throw DescentError("BAD_LAYER", "trace rule applied to a non-algebraic generator");
  require_integrand_below(c, level);
  require_verified(c, tw);
  Certificate n = normalize_constants(c);
  AlgNum d(Rat(lv.minpoly.degree()));
  Certificate out;
  out.level = level - 1;
  out.f = c.f;
  for (const auto& t : n.terms) {
    if (t.u.level() < level) {
      out.terms.push_back(t);
      continue;
    }
    TraceNorm tn = trace_norm(t.u, level);
    if (is_zero(tn.nr))
      throw DescentError("ALGEBRAIC_STRUCTURE",
                         "argument has zero norm; the minimal polynomial of " + lv.name +
                             " is reducible");
    if (!tn.nr.is_constant()) out.terms.push_back({t.c / d, tn.nr});
  }
  if (n.v.level() < level)
    out.v = n.v;
  else
    out.v = trace_norm(n.v, level).tr / TowerElem(d);
  return normalize_constants(out);
}

// Dihedral rule: monomial step on the hyperexponential generator (collecting
// the coefficient e of the quadratic generator), then the quadratic trace
// move; the collected term e*alpha traces to (e/4) * gamma'/gamma.
inline Certificate descend_dihedral(const Certificate& c, const TowerPtr& tw) {
  using namespace descent_detail;
  const TowerLayer& L = layer_of(tw, c.level);
  if (L.kind != "dihedral")
    throw DescentError("BAD_LAYER", "dihedral rule applied to a non-dihedral layer");
  int alpha_level = L.first_level, eta_level = alpha_level + 1;
  require_integrand_below(c, alpha_level);
  require_verified(c, tw);
  Certificate n = normalize_constants(c);

  MonomialStep st;
  if (c.level >= eta_level) {
    st = monomial_step(n, tw, eta_level);
  } else {
    st.terms = n.terms;
    st.v = n.v;
  }

  // trace move over the quadratic level:
  //   2f = sum 2c_i u_i'/u_i (below) + sum c_i nr(a_i)'/nr(a_i) (at level)
  //        + e tr(alpha) + tr(v)',   tr(alpha) = gamma'/(2 gamma)
  AlgNum two(Rat(2));
  Certificate out;
  out.level = alpha_level - 1;
  out.f = c.f;
  for (const auto& t : st.terms) {
    if (t.u.level() < alpha_level) {
      out.terms.push_back(t);
      continue;
    }
    TraceNorm tn = trace_norm(t.u, alpha_level);
    if (is_zero(tn.nr))
      throw DescentError("ALGEBRAIC_STRUCTURE", "argument has zero norm at the quadratic level");
    if (!tn.nr.is_constant()) out.terms.push_back({t.c / two, tn.nr});
  }
  if (!is_zero(st.e)) {
    const TowerElem& gamma = tw->levels[(std::size_t)alpha_level].arg;
    if (!gamma.is_constant()) out.terms.push_back({st.e / AlgNum(Rat(4)), gamma});
  }
  if (st.v.level() < alpha_level)
    out.v = st.v;
  else
    out.v = trace_norm(st.v, alpha_level).tr / TowerElem(two);
  return normalize_constants(out);
}

// sl2 rule over the resolved chain base < (riccati alpha) < (hyperexp y) <
// (primitive eta) < (quadratic xi): quadratic trace, then the primitive step
// (residue e1 pending on y), then the hyperexponential step consuming it,
// then the membership and exponent assertions.
inline Certificate descend_sl2(const Certificate& c, const TowerPtr& tw,
                               std::string* note = nullptr) {
  using namespace descent_detail;
  const TowerLayer& L = layer_of(tw, c.level);
  if (L.kind != "sl2") throw DescentError("BAD_LAYER", "sl2 rule applied to a non-sl2 layer");
  int alpha_level = L.first_level;
  int y_level = alpha_level + 1, eta_level = alpha_level + 2, xi_level = alpha_level + 3;
  require_integrand_below(c, alpha_level);
  require_verified(c, tw);
  Certificate cur = normalize_constants(c);

  // quadratic generator first
  bool at_xi = cur.v.level() >= xi_level;
  for (const auto& t : cur.terms) at_xi = at_xi || t.u.level() >= xi_level;
  if (at_xi) {
    cur.level = xi_level;
    cur = descend_algebraic(cur, tw);
  }
  cur.level = eta_level;

  // primitive generator: residue e1 stays pending as the term e1 * y
  MonomialStep s2 = monomial_step(cur, tw, eta_level);
  Certificate mid;
  mid.level = y_level;
  mid.terms = std::move(s2.terms);
  mid.v = s2.v;
  mid.f = c.f;

  // hyperexponential generator, consuming the pending term
  MonomialStep s3 = monomial_step(mid, tw, y_level, s2.e);
  if (note) *note = "e = " + an_str(s3.e);
  return sl2_finish(std::move(s3.terms), s3.v, s3.e, tw, alpha_level, c.f);
}

// weierstrassian rule: once the constants are normalized, every argument and
// the remainder must already lie below the layer and are simply re-leveled
inline Certificate descend_weierstrass(const Certificate& c, const TowerPtr& tw) {
  using namespace descent_detail;
  const TowerLayer& L = layer_of(tw, c.level);
  if (L.kind != "weierstrass")
    throw DescentError("BAD_LAYER", "weierstrassian rule applied to the wrong layer");
  int theta_level = L.first_level;
  require_integrand_below(c, theta_level);
  require_verified(c, tw);
  Certificate n = normalize_constants(c);
  for (const auto& t : n.terms)
    if (!coerce_down(t.u, theta_level - 1).ok)
      throw DescentError("WEIER_MEMBER", "argument does not descend below the layer",
                         divisor_diagnostic(tw, theta_level, t.u, "argument"));
  if (!coerce_down(n.v, theta_level - 1).ok)
    throw DescentError("WEIER_MEMBER", "remainder does not descend below the layer",
                       divisor_diagnostic(tw, theta_level, n.v, "remainder"));
  n.level = theta_level - 1;
  return n;
}

struct LayerStep {
  int layer_index = 0;
  std::string kind;
  std::string rule;
  std::string note;
};

struct DescentReport {
  Certificate input;
  Certificate output;
  std::vector<LayerStep> trace;
  bool ok = false;
  std::string code;         // diagnostic code on failure
  std::string message;      // human-readable failure message
  std::string diagnostics;  // attached data (series orders, divisor, ...)
};

// top-level driver: dispatch per layer kind from the top of the tower down
inline DescentReport descend_all(const Certificate& c, const TowerPtr& tw) {
  using namespace descent_detail;
  DescentReport rep;
  rep.input = c;
  try {
    require_verified(c, tw);
    if (c.f.level() > 0)
      throw DescentError("F_NOT_IN_BASE", "integrand does not lie in the base field");
    Certificate cur = c;
    for (std::size_t li = tw->layers.size(); li-- > 1;) {
      const TowerLayer& L = tw->layers[li];
      if (cur.level < L.first_level) continue;
      LayerStep step;
      step.layer_index = (int)li;
      step.kind = L.kind;
      if (L.kind == "log" || L.kind == "exp" || L.kind == "primitive" ||
          L.kind == "hyperexp") {
        step.rule = "monomial";
        cur = descend_monomial(cur, tw);
      } else if (L.kind == "algebraic") {
        step.rule = "algebraic-trace";
        cur = descend_algebraic(cur, tw);
      } else if (L.kind == "dihedral") {
        step.rule = "dihedral";
        cur = descend_dihedral(cur, tw);
      } else if (L.kind == "sl2") {
        step.rule = "sl2";
        cur = descend_sl2(cur, tw, &step.note);
      } else if (L.kind == "weierstrass") {
        step.rule = "weierstrass";
        cur = descend_weierstrass(cur, tw);
      } else {
        throw DescentError("BAD_LAYER", "unknown layer kind " + L.kind);
      }
      rep.trace.push_back(std::move(step));
    }
    rep.output = std::move(cur);
    rep.ok = true;
  } catch (const DescentError& ex) {
    rep.ok = false;
    rep.code = ex.code;
    rep.message = ex.what();
    rep.diagnostics = ex.diagnostics;
  }
  return rep;
}

}  // namespace finterm
