#pragma once

// Arithmetic of the Weierstrass curve y^2 = 4x^3 - g1 x - g0 attached to a
// curve layer of a tower: point group over the constants, translation
// automorphisms of the function field, valuations at constant-coordinate
// points, and divisor bookkeeping.  The curve coordinate theta and its
// derivative satisfy theta'^2 = alpha^2 (4 theta^3 - g1 theta - g0), and the
// function field element w = theta' corresponds to the curve function
// alpha * y.

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "finterm/laurent.hpp"
#include "finterm/numfield.hpp"
#include "finterm/tower.hpp"

namespace finterm {

struct EllipticPoint {
  bool infinity = true;
  AlgNum x, y;

  static EllipticPoint at_infinity() { return EllipticPoint{}; }
  static EllipticPoint affine(AlgNum px, AlgNum py) {
    return EllipticPoint{false, std::move(px), std::move(py)};
  }

  friend bool operator==(const EllipticPoint& p, const EllipticPoint& q) {
    if (p.infinity || q.infinity) return p.infinity == q.infinity;
    return p.x == q.x && p.y == q.y;
  }
  friend bool operator!=(const EllipticPoint& p, const EllipticPoint& q) { return !(p == q); }
};

struct WeierstrassCurve {
  TowerPtr tw;
  int theta_level = -1;  // level of the curve coordinate; its derivative lives one above
  AlgNum g0, g1;
  TowerElem alpha;

  TowerElem theta() const { return tw->gen(theta_level); }
  TowerElem w() const { return tw->gen(theta_level + 1); }
  // 4 X^3 - g1 X - g0 over the constants
  Poly<AlgNum> rhs_poly() const {
    return Poly<AlgNum>(std::vector<AlgNum>{-g0, -g1, AlgNum(Rat(0)), AlgNum(Rat(4))});
  }
};

inline WeierstrassCurve curve_at(const TowerPtr& tw, int theta_level) {
  if (theta_level < 0 || theta_level >= tw->size())
    throw std::domain_error("curve_at: bad level");
  const SimpleLevel& lv = tw->levels[(std::size_t)theta_level];
  if (lv.kind != LevelKind::WeierTheta)
    throw std::domain_error("curve_at: level is not a curve coordinate");
  return WeierstrassCurve{tw, theta_level, lv.g0, lv.g1, lv.alpha};
}

inline bool on_curve(const WeierstrassCurve& C, const EllipticPoint& p) {
  if (p.infinity) return true;
  return p.y * p.y == C.rhs_poly().eval(p.x);
}

inline EllipticPoint ec_neg(const EllipticPoint& p) {
  if (p.infinity) return p;
  return EllipticPoint::affine(p.x, -p.y);
}

// chord-tangent group law for y^2 = 4x^3 - g1 x - g0; the cubic's leading 4
// puts a factor 1/4 on the slope-squared term
inline EllipticPoint ec_add(const WeierstrassCurve& C, const EllipticPoint& p,
                            const EllipticPoint& q) {
  if (!on_curve(C, p) || !on_curve(C, q)) throw std::domain_error("ec_add: point off curve");
  if (p.infinity) return q;
  if (q.infinity) return p;
  AlgNum lam;
  if (p.x == q.x) {
    if (p.y == -q.y) return EllipticPoint::at_infinity();
    // tangent: lambda = (12x^2 - g1) / (2y)
    lam = (AlgNum(Rat(12)) * p.x * p.x - C.g1) / (AlgNum(Rat(2)) * p.y);
  } else {
    lam = (q.y - p.y) / (q.x - p.x);
  }
  AlgNum x3 = AlgNum(Rat(1, 4)) * lam * lam - p.x - q.x;
  AlgNum y3 = lam * (p.x - x3) - p.y;
  return EllipticPoint::affine(std::move(x3), std::move(y3));
}

// derivation of the curve layer's function field in canonical a + b*theta' form
inline TowerElem w_derive(const TowerElem& u) { return u.derivative(); }

namespace weier_detail {

// split u = a + b * theta' with a, b in k(theta)
inline std::pair<TowerElem, TowerElem> w_split(const WeierstrassCurve& C, const TowerElem& u) {
  int lw = C.theta_level + 1;
  if (u.level() > lw)
    throw std::domain_error("element lives above the curve layer");
  if (u.level() < lw) return {u, TowerElem()};
  const Poly<TowerElem>& n = u.parts().num();  // canonical: degree < 2, denominator 1
  TowerElem a = n.degree() >= 0 ? n[0] : TowerElem();
  TowerElem b = n.degree() >= 1 ? n[1] : TowerElem();
  return {a, b};
}

// substitute theta -> T, theta' -> W through the canonical representation
inline TowerElem subst_theta(const WeierstrassCurve& C, const TowerElem& u, const TowerElem& T,
                             const TowerElem& W) {
  int lt = C.theta_level, lw = lt + 1;
  if (u.level() < lt) return u;
  const TowerElem& val = u.level() == lt ? T : W;
  if (u.level() > lw) throw std::domain_error("element lives above the curve layer");
  auto map_poly = [&](const Poly<TowerElem>& P) {
    TowerElem acc;
    for (int i = P.degree(); i >= 0; --i) acc = acc * val + subst_theta(C, P[i], T, W);
    return acc;
  };
  return map_poly(u.parts().num()) / map_poly(u.parts().den());
}

// theta-degree (num minus den) of an element of k(theta)
inline int theta_degree(const WeierstrassCurve& C, const TowerElem& e) {
  if (e.level() < C.theta_level) return 0;
  return e.parts().num().degree() - e.parts().den().degree();
}

// valuation at the place at infinity: theta has order -2 and theta' order -3,
// so the two parts of a + b*theta' have orders of opposite parity
inline int val_infinity(const WeierstrassCurve& C, const TowerElem& a, const TowerElem& b) {
  std::optional<int> va, vb;
  if (!is_zero(a)) va = -2 * theta_degree(C, a);
  if (!is_zero(b)) vb = -2 * theta_degree(C, b) - 3;
  if (!va) return *vb;
  if (!vb) return *va;
  return std::min(*va, *vb);
}

// valuation at a 2-torsion point (x0, 0): theta' is the uniformizer, and
// theta - x0 has order 2, so again the two parts cannot interfere
inline int val_two_torsion(const WeierstrassCurve& C, const TowerElem& a, const TowerElem& b,
                           const AlgNum& x0) {
  TowerElem x0el{x0};
  std::optional<int> va, vb;
  if (!is_zero(a)) va = 2 * *ord_at(a, C.tw, C.theta_level, x0el);
  if (!is_zero(b)) vb = 2 * *ord_at(b, C.tw, C.theta_level, x0el) + 1;
  if (!va) return *vb;
  if (!vb) return *va;
  return std::min(*va, *vb);
}

// valuation at a point with y != 0: theta - x0 is the uniformizer and the
// y-coordinate is a local unit, so cancellation between the two parts is
// possible and a truncated local expansion decides the order.  The norm
// (a + b theta')(a - b theta') bounds how deep the cancellation can reach.
inline int val_generic(const WeierstrassCurve& C, const TowerElem& a, const TowerElem& b,
                       const AlgNum& x0, const AlgNum& y0) {
  TowerElem x0el{x0};
  std::optional<int> oa, ob;
  if (!is_zero(a)) oa = ord_at(a, C.tw, C.theta_level, x0el);
  if (!is_zero(b)) ob = ord_at(b, C.tw, C.theta_level, x0el);
  if (!oa) return *ob;
  if (!ob) return *oa;
  if (*oa != *ob) return std::min(*oa, *ob);
  int m = *oa;

  Poly<AlgNum> P = C.rhs_poly();
  TowerElem theta = C.theta();
  TowerElem Pel = TowerElem(P[3]) * theta * theta * theta + TowerElem(P[1]) * theta +
                  TowerElem(P[0]);
  TowerElem N = a * a - b * b * C.alpha * C.alpha * Pel;
  int B = *ord_at(N, C.tw, C.theta_level, x0el) - m;  // val <= B
  int K = B - m;                                      // terms beyond the leading one

  LaurentSeries sa = expand(a, C.tw, C.theta_level, x0el, K);
  LaurentSeries sb = expand(b, C.tw, C.theta_level, x0el, K);
  // series of y(t) with y^2 = P(x0 + t), y(0) = y0
  std::vector<AlgNum> c((std::size_t)K + 1);
  Poly<AlgNum> Ps = P.shifted(x0);
  for (int j = 0; j <= K && j <= Ps.degree(); ++j) c[(std::size_t)j] = Ps[j];
  std::vector<AlgNum> ys((std::size_t)K + 1);
  ys[0] = y0;
  AlgNum two_y0 = AlgNum(Rat(2)) * y0;
  for (int j = 1; j <= K; ++j) {
    AlgNum acc = c[(std::size_t)j];
    for (int i = 1; i < j; ++i) acc = acc - ys[(std::size_t)i] * ys[(std::size_t)(j - i)];
    ys[(std::size_t)j] = acc / two_y0;
  }
  for (int j = m; j <= B; ++j) {
    TowerElem cj = sa.coeff(j);
    for (int i = 0; i <= j - m; ++i)
      cj = cj + sb.coeff(j - i) * C.alpha * TowerElem(ys[(std::size_t)i]);
    if (!is_zero(cj)) return j;
  }
  throw std::logic_error("valuation: local expansion exhausted its bound");
}

}  // namespace weier_detail

// translation by a constant-coordinate point, via the chord law applied to
// the generic point (theta, theta'/alpha); a differential automorphism of
// the curve layer over its base
inline TowerElem translate(const WeierstrassCurve& C, const TowerElem& u,
                           const EllipticPoint& p) {
  if (!on_curve(C, p)) throw std::domain_error("translate: point off curve");
  if (p.infinity) return u;
  TowerElem theta = C.theta();
  TowerElem Y = C.w() / C.alpha;
  TowerElem xp{p.x}, yp{p.y};
  TowerElem lam = (Y - yp) / (theta - xp);
  TowerElem X3 = TowerElem(AlgNum(Rat(1, 4))) * lam * lam - theta - xp;
  TowerElem Y3 = lam * (theta - X3) - Y;
  return weier_detail::subst_theta(C, u, X3, C.alpha * Y3);
}

// order of u at a constant-coordinate point or at infinity
inline int valuation_at(const WeierstrassCurve& C, const TowerElem& u, const EllipticPoint& p) {
  if (is_zero(u)) throw std::domain_error("valuation of zero");
  auto [a, b] = weier_detail::w_split(C, u);
  if (p.infinity) return weier_detail::val_infinity(C, a, b);
  if (!on_curve(C, p)) throw std::domain_error("valuation: point off curve");
  if (is_zero(p.y)) return weier_detail::val_two_torsion(C, a, b, p.x);
  return weier_detail::val_generic(C, a, b, p.x, p.y);
}

// Divisor supported on constant-coordinate points and infinity.  A point
// adjoined as the root of an irreducible factor of degree d stands for its d
// conjugates, which share the same valuation; `conjugates` records that
// weight so degrees stay honest without splitting fields completely.
struct DivisorEntry {
  EllipticPoint point;
  int value = 0;
  int conjugates = 1;
};

struct Divisor {
  std::vector<DivisorEntry> entries;
  int degree() const {
    int d = 0;
    for (auto& e : entries) d += e.value * e.conjugates;
    return d;
  }
};

struct DivisorResult {
  Divisor divisor;
  bool residual = false;  // places outside the constant-point scope remain
};

namespace weier_detail {

// monic polynomial over the constants whose roots are exactly the constant
// roots of Q, a theta-polynomial with coefficients at or below the base level
inline Poly<AlgNum> constant_root_part(const Poly<TowerElem>& Q) {
  // clear base-variable denominators
  Poly<TowerElem> one_p(TowerElem(AlgNum(Rat(1))));
  Poly<TowerElem> D = one_p;
  for (int i = 0; i <= Q.degree(); ++i)
    if (Q[i].level() == 0) {
      const Poly<TowerElem>& d = Q[i].parts().den();
      if (d.degree() > 0) D = D * divrem(d, poly_gcd(D, d)).first;
    }
  // coefficients as base-variable polynomials
  std::vector<Poly<TowerElem>> num((std::size_t)Q.degree() + 1);
  int xdeg = 0;
  for (int i = 0; i <= Q.degree(); ++i) {
    if (is_zero(Q[i])) continue;
    if (Q[i].level() == 0)
      num[(std::size_t)i] = Q[i].parts().num() * divrem(D, Q[i].parts().den()).first;
    else
      num[(std::size_t)i] = Poly<TowerElem>(Q[i]) * D;
    xdeg = std::max(xdeg, num[(std::size_t)i].degree());
  }
  // a constant root must kill every base-variable coefficient slice
  Poly<AlgNum> G;
  for (int j = 0; j <= xdeg; ++j) {
    Poly<AlgNum> Gj;
    for (int i = 0; i <= Q.degree(); ++i)
      if (j <= num[(std::size_t)i].degree()) Gj.set_coeff(i, num[(std::size_t)i][j].constant());
    if (Gj.is_zero_poly()) continue;
    G = G.is_zero_poly() ? Gj : poly_gcd(G, Gj);
    if (G.degree() == 0) break;
  }
  return G.is_zero_poly() ? G : G.monic();
}

}  // namespace weier_detail

// Valuations of u at every point with constant coordinates reachable by
// root adjunction from the numerator/denominator data, plus infinity.  The
// residual flag is set when the resulting degree does not close to zero,
// i.e. places outside the constant-point scope carry part of the divisor.
inline DivisorResult constant_point_divisor(const WeierstrassCurve& C, const TowerElem& u) {
  if (is_zero(u)) throw std::domain_error("divisor of zero");
  auto [a, b] = weier_detail::w_split(C, u);
  TowerElem theta = C.theta();
  Poly<AlgNum> P = C.rhs_poly();
  TowerElem Pel = TowerElem(P[3]) * theta * theta * theta + TowerElem(P[1]) * theta +
                  TowerElem(P[0]);
  TowerElem N = a * a - b * b * C.alpha * C.alpha * Pel;

  // candidate x-coordinates: constant roots of the norm numerator (zeros)
  // and of the part denominators (poles)
  std::vector<Poly<TowerElem>> sources;
  if (N.level() == C.theta_level) sources.push_back(N.parts().num());
  if (a.level() == C.theta_level) sources.push_back(a.parts().den());
  if (b.level() == C.theta_level) sources.push_back(b.parts().den());

  FieldPtr F;
  std::vector<Poly<AlgNum>> factors;
  for (auto& Q : sources) {
    Poly<AlgNum> G = weier_detail::constant_root_part(Q);
    if (G.degree() < 1) continue;
    for (int i = 0; i <= G.degree() && !F; ++i) F = G[i].field();
    for (auto& [sf, mult] : squarefree_decomposition(G)) {
      (void)mult;
      for (auto& ff : factor_squarefree_over_field(F, sf)) {
        bool seen = false;
        for (auto& f0 : factors) seen = seen || f0 == ff.factor;
        if (!seen) factors.push_back(ff.factor);
      }
    }
  }

  DivisorResult out;
  for (auto& fct : factors) {
    AlgNum x0;
    FieldPtr Fx = F;
    int conj = fct.degree();
    if (conj == 1) {
      x0 = -fct[0];
    } else {
      AdjoinResult ar = adjoin_root(F, fct);
      x0 = ar.root;
      Fx = ar.field;
    }
    AlgNum Pv = P.eval(x0);
    if (is_zero(Pv)) {
      EllipticPoint pt = EllipticPoint::affine(x0, zero_like(x0));
      int v = valuation_at(C, u, pt);
      if (v != 0) out.divisor.entries.push_back({pt, v, conj});
    } else {
      Poly<AlgNum> sq(std::vector<AlgNum>{-Pv, zero_like(Pv), one_like(Pv)});
      AdjoinResult ar = adjoin_root(Fx, sq);
      for (int s = 0; s < 2; ++s) {
        EllipticPoint pt = EllipticPoint::affine(x0, s == 0 ? ar.root : -ar.root);
        int v = valuation_at(C, u, pt);
        if (v != 0) out.divisor.entries.push_back({pt, v, conj});
      }
    }
  }
  int vinf = weier_detail::val_infinity(C, a, b);
  if (vinf != 0) out.divisor.entries.push_back({EllipticPoint::at_infinity(), vinf, 1});
  out.residual = out.divisor.degree() != 0;
  return out;
}

}  // namespace finterm
