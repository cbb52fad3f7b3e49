#pragma once

// Rational-solution search for the Riccati equation u' + u^2 = r u + s
// over C(x), C the current (dynamically extended) number field.
//
// The substitution u = t + r/2 turns the equation into t' + t^2 = R with
// R = r^2/4 - r'/2 + s, the form attached to w'' = R w via t = w'/w. A
// rational solution exists iff the classical "case 1" local analysis
// succeeds: candidate exponents at every pole of R and at infinity, a
// non-negative integer degree d, and a polynomial P of degree d with
// P'' + 2 t P' + (t' + t^2 - R) P = 0. The search adjoins algebraic
// constants (pole locations, indicial square roots) on demand.

#include <optional>
#include <string>
#include <vector>

#include "finterm/linalg.hpp"
#include "finterm/numfield.hpp"
#include "finterm/poly.hpp"
#include "finterm/ratfunc.hpp"

namespace finterm {

struct RiccatiSolutions {
  std::vector<RatFunc<AlgNum>> solutions;  // each verified exactly
  bool family = false;  // a one-parameter family exists; solutions holds representatives
  std::string family_note;
  FieldPtr field;  // constants field after adjunctions
  bool complete = true;  // false only if the splitting-degree cap was hit
};

namespace riccati_detail {

using finterm::nullspace;

// Taylor coefficients t^0..t^N of N(x0 + t)/D(x0 + t); requires D(x0) != 0.
inline std::vector<AlgNum> taylor_at(const Poly<AlgNum>& N, const Poly<AlgNum>& D,
                                     const AlgNum& x0, int count) {
  Poly<AlgNum> n = N.shifted(x0), d = D.shifted(x0);
  if (is_zero(d[0])) throw std::domain_error("taylor_at: pole at expansion point");
  std::vector<AlgNum> out((std::size_t)count);
  AlgNum inv = AlgNum(Rat(1)) / d[0];
  for (int k = 0; k < count; ++k) {
    AlgNum acc = n[k];
    for (int j = 1; j <= k; ++j) acc = acc - d[j] * out[(std::size_t)(k - j)];
    out[(std::size_t)k] = acc * inv;
  }
  return out;
}

struct PoleData {
  AlgNum c;
  int order;
  std::vector<AlgNum> sqrt_part;  // a_2..a_nu of [sqrt(R)]_c (empty unless order >= 4)
  AlgNum alpha_plus, alpha_minus;
};

struct InfData {
  bool ok = false;  // case-1 conditions hold at infinity
  int mu = 0;       // degree of [sqrt(R)]_inf
  std::vector<AlgNum> sqrt_poly;  // coefficients 0..mu
  AlgNum alpha_plus, alpha_minus;
};

}  // namespace riccati_detail

// sqrt of a constant, adjoining a root of z^2 - v when needed
inline std::pair<AlgNum, FieldPtr> algnum_sqrt(const AlgNum& v, const FieldPtr& F) {
  Poly<AlgNum> p(std::vector<AlgNum>{-v, AlgNum(Rat(0)), AlgNum(Rat(1))});
  if (is_zero(v)) return {AlgNum(Rat(0)), F};
  auto adj = adjoin_root(F, p);
  return {adj.root, adj.field ? adj.field : F};
}

inline RiccatiSolutions rational_solutions(const RatFunc<AlgNum>& r,
                                           const RatFunc<AlgNum>& s,
                                           FieldPtr F = nullptr,
                                           int split_degree_cap = 16) {
  using namespace riccati_detail;
  using RF = RatFunc<AlgNum>;
  RiccatiSolutions out;
  out.field = F;

  auto verify = [&](const RF& u) {
    return u.derivative() + u * u - r * u - s == RF();
  };
  auto push_unique = [&](const RF& u) {
    for (auto& v : out.solutions)
      if (v == u) return;
    out.solutions.push_back(u);
  };

  RF half_r = RF(Poly<AlgNum>(AlgNum(Rat(1, 2)))) * r;
  RF R = half_r * half_r - half_r.derivative() + s;

  if (R.is_zero_fn()) {
    // t' + t^2 = 0: t = 0 or t = 1/(x - c), a one-parameter family
    out.family = true;
    out.family_note = "t' + t^2 = 0 has the family t = 1/(x - c); representatives shown";
    push_unique(half_r);  // t = 0
    Poly<AlgNum> one_p(AlgNum(Rat(1)));
    Poly<AlgNum> x_p(std::vector<AlgNum>{AlgNum(Rat(0)), AlgNum(Rat(1))});
    push_unique(RF(one_p, x_p) + half_r);  // t = 1/x as family representative
    return out;
  }

  // split the denominator of R completely, adjoining roots as needed
  std::vector<std::pair<AlgNum, int>> poles;  // (location, order)
  {
    auto sq = squarefree_decomposition(R.den());
    int adjoined = 1;
    for (auto& [p, m] : sq) {
      Poly<AlgNum> rest = p;
      while (rest.degree() > 0) {
        if (rest.degree() > 1) {
          adjoined *= rest.degree();
          if (adjoined > split_degree_cap) {
            out.complete = false;
            out.family_note = "pole-splitting degree cap exceeded; search inconclusive";
            return out;
          }
        }
        auto adj = adjoin_root(out.field, rest);
        if (adj.field) out.field = adj.field;
        poles.emplace_back(adj.root, m);
        // peel the found root (and keep factoring what remains)
        Poly<AlgNum> lin(std::vector<AlgNum>{-adj.root, AlgNum(Rat(1))});
        rest = rest / lin;
      }
    }
  }

  // local data at each pole
  std::vector<PoleData> pd;
  for (auto& [c, nu] : poles) {
    PoleData d;
    d.c = c;
    d.order = nu;
    if (nu == 1) {
      d.alpha_plus = AlgNum(Rat(1));
      d.alpha_minus = AlgNum(Rat(1));
    } else if (nu % 2 != 0) {
      return out;  // odd order >= 3: no rational solution
    } else {
      // principal part coefficients: R = sum_{i<=nu} b_i/(x-c)^i + O(1)
      // b_i = taylor coefficient of (x-c)^{nu - i} of R*(x-c)^nu at c
      Poly<AlgNum> lin(std::vector<AlgNum>{-c, AlgNum(Rat(1))});
      Poly<AlgNum> dred = R.den();
      for (int i = 0; i < nu; ++i) dred = dred / lin;
      auto tc = taylor_at(R.num(), dred, c, nu);
      auto b = [&](int i) { return tc[(std::size_t)(nu - i)]; };
      if (nu == 2) {
        auto [sq, F2] = algnum_sqrt(AlgNum(Rat(1)) + AlgNum(Rat(4)) * b(2), out.field);
        out.field = F2;
        d.alpha_plus = (AlgNum(Rat(1)) + sq) * AlgNum(Rat(1, 2));
        d.alpha_minus = (AlgNum(Rat(1)) - sq) * AlgNum(Rat(1, 2));
      } else {
        int half = nu / 2;
        // [sqrt R]_c = sum_{i=half..?} a_i/(x-c)^i, i from half down to 2:
        // match (sum a_i/(x-c)^i)^2 with b_j for j = 2*half .. half+1
        std::vector<AlgNum> a((std::size_t)half + 1);  // a[i], i = 2..half
        auto [sq, F2] = algnum_sqrt(b(2 * half), out.field);
        out.field = F2;
        if (is_zero(sq)) return out;  // leading coefficient must be nonzero
        a[(std::size_t)half] = sq;
        for (int i = half - 1; i >= 2; --i) {
          // match coefficient of 1/(x-c)^{half+i}: the only term with a_i is
          // 2 a_half a_i; all other index pairs (j,k), j+k = half+i, are known
          AlgNum conv;
          for (int j = i + 1; j <= half; ++j) {
            int k = half + i - j;
            if (k < 2 || k > half || k < j) continue;
            if (k == j)
              conv = conv + a[(std::size_t)j] * a[(std::size_t)j];
            else
              conv = conv + AlgNum(Rat(2)) * a[(std::size_t)j] * a[(std::size_t)k];
          }
          a[(std::size_t)i] = (b(half + i) - conv) / (AlgNum(Rat(2)) * a[(std::size_t)half]);
        }
        // beta = coefficient of 1/(x-c)^{half+1} in R - ([sqrt R]_c)^2
        AlgNum beta = b(half + 1);
        {
          AlgNum conv;
          for (int j = 2; j <= half; ++j) {
            int k = half + 1 - j;
            if (k < 2 || k > half) continue;
            conv = conv + a[(std::size_t)j] * a[(std::size_t)k];
          }
          beta = beta - conv;
        }
        AlgNum ratio = beta / a[(std::size_t)half];
        d.alpha_plus = AlgNum(Rat(1, 2)) * (ratio + AlgNum(Rat(half)));
        d.alpha_minus = AlgNum(Rat(1, 2)) * (-ratio + AlgNum(Rat(half)));
        d.sqrt_part.assign(a.begin(), a.end());
      }
    }
    pd.push_back(std::move(d));
  }

  // behaviour at infinity: o = deg den - deg num
  InfData inf;
  int o = R.den().degree() - R.num().degree();
  if (o > 2) {
    inf.ok = true;
    inf.mu = 0;
    inf.alpha_plus = AlgNum(Rat(0));
    inf.alpha_minus = AlgNum(Rat(1));
  } else if (o == 2) {
    AlgNum b = R.num().leading() / R.den().leading();
    auto [sq, F2] = algnum_sqrt(AlgNum(Rat(1)) + AlgNum(Rat(4)) * b, out.field);
    out.field = F2;
    inf.ok = true;
    inf.mu = 0;
    inf.alpha_plus = (AlgNum(Rat(1)) + sq) * AlgNum(Rat(1, 2));
    inf.alpha_minus = (AlgNum(Rat(1)) - sq) * AlgNum(Rat(1, 2));
  } else if (o <= 0 && (o % 2) == 0) {
    int mu = -o / 2;
    // series of R in descending powers: R = sum_{k>=0} c_k x^{2mu - k}
    // obtained from the reversed numerator/denominator
    auto rev = [](const Poly<AlgNum>& p) {
      Poly<AlgNum> q;
      for (int i = 0; i <= p.degree(); ++i) q.set_coeff(p.degree() - i, p[i]);
      return q;
    };
    auto tc = taylor_at(rev(R.num()), rev(R.den()), AlgNum(Rat(0)), 2 * mu + 2);
    auto cc = [&](int k) { return tc[(std::size_t)k]; };  // coeff of x^{2mu-k}
    std::vector<AlgNum> a((std::size_t)mu + 1);  // [sqrt R]_inf = sum a_i x^i
    auto [sq, F2] = algnum_sqrt(cc(0), out.field);
    out.field = F2;
    if (is_zero(sq)) {
      inf.ok = false;
    } else {
      a[(std::size_t)mu] = sq;
      for (int i = mu - 1; i >= 0; --i) {
        // coeff of x^{mu+i} in ([sqrt R])^2 must match cc(mu - i)
        AlgNum conv;
        for (int j = i + 1; j <= mu; ++j) {
          int k = mu + i - j;
          if (k < 0 || k > mu || k < j) continue;
          if (k == j)
            conv = conv + a[(std::size_t)j] * a[(std::size_t)j];
          else if (k > j)
            conv = conv + AlgNum(Rat(2)) * a[(std::size_t)j] * a[(std::size_t)k];
        }
        a[(std::size_t)i] = (cc(mu - i) - conv) / (AlgNum(Rat(2)) * a[(std::size_t)mu]);
      }
      // beta = coeff of x^{mu-1} in R - ([sqrt R]_inf)^2
      AlgNum beta = cc(mu + 1);
      {
        AlgNum conv;
        for (int j = 0; j <= mu; ++j) {
          int k = mu - 1 - j;
          if (k < 0 || k > mu) continue;
          conv = conv + a[(std::size_t)j] * a[(std::size_t)k];
        }
        beta = beta - conv;
      }
      AlgNum ratio = beta / a[(std::size_t)mu];
      inf.ok = true;
      inf.mu = mu;
      inf.sqrt_poly = a;
      inf.alpha_plus = AlgNum(Rat(1, 2)) * (ratio - AlgNum(Rat(mu)));
      inf.alpha_minus = AlgNum(Rat(1, 2)) * (-ratio - AlgNum(Rat(mu)));
    }
  } else {
    inf.ok = false;  // odd order at infinity <= 2: case 1 impossible
  }
  if (!inf.ok) return out;

  // enumerate sign choices
  std::size_t np = pd.size();
  if (np > 12) {
    out.complete = false;
    out.family_note = "too many poles for exhaustive sign enumeration";
    return out;
  }
  int family_dim_seen = 0;
  for (std::size_t mask = 0; mask < (std::size_t(1) << (np + 1)); ++mask) {
    bool inf_plus = (mask >> np) & 1;
    AlgNum dval = inf_plus ? inf.alpha_plus : inf.alpha_minus;
    for (std::size_t i = 0; i < np; ++i)
      dval = dval - (((mask >> i) & 1) ? pd[i].alpha_plus : pd[i].alpha_minus);
    if (!dval.is_rational()) continue;
    Rat dr = dval.rational_value();
    Int dn;
    if (!rat_is_int(dr, dn) || sgn(dr) < 0) continue;
    if (dn > 30) continue;  // degrees beyond any planted problem; guards runtime
    int d = (int)dn.get_si();

    // theta = sum over poles of [s_c sqrt-part + alpha_c/(x-c)] + s_inf [sqrt R]_inf
    RF theta;
    for (std::size_t i = 0; i < np; ++i) {
      bool plus = (mask >> i) & 1;
      Poly<AlgNum> lin(std::vector<AlgNum>{-pd[i].c, AlgNum(Rat(1))});
      AlgNum alpha = plus ? pd[i].alpha_plus : pd[i].alpha_minus;
      theta = theta + RF(Poly<AlgNum>(alpha), lin);
      if (!pd[i].sqrt_part.empty()) {
        for (int k = 2; k < (int)pd[i].sqrt_part.size(); ++k) {
          AlgNum ak = pd[i].sqrt_part[(std::size_t)k];
          if (is_zero(ak)) continue;
          AlgNum signed_ak = plus ? ak : -ak;
          theta = theta + RF(Poly<AlgNum>(signed_ak), poly_pow(lin, k));
        }
      }
    }
    if (inf.mu > 0 || !inf.sqrt_poly.empty()) {
      Poly<AlgNum> sp;
      for (std::size_t k = 0; k < inf.sqrt_poly.size(); ++k)
        sp.set_coeff((int)k, inf_plus ? inf.sqrt_poly[k] : -inf.sqrt_poly[k]);
      theta = theta + RF(sp);
    }

    // solve P'' + 2 theta P' + (theta' + theta^2 - R) P = 0, deg P <= d
    RF w = theta.derivative() + theta * theta - R;
    // clear denominators: common denominator Q of theta and w
    Poly<AlgNum> Q = theta.den() * w.den();
    Poly<AlgNum> A2 = Q;                                     // times P''
    Poly<AlgNum> A1 = theta.num() * w.den();                 // times 2 P'
    Poly<AlgNum> A0 = w.num() * theta.den();                 // times P
    int maxdeg = std::max({A2.degree() + std::max(d - 2, 0), A1.degree() + std::max(d - 1, 0),
                           A0.degree() + d}) + 1;
    std::vector<std::vector<AlgNum>> m((std::size_t)maxdeg + 1,
                                       std::vector<AlgNum>((std::size_t)d + 1));
    for (int j = 0; j <= d; ++j) {
      // column j: coefficient functions of P = x^j
      Poly<AlgNum> xj = Poly<AlgNum>::monomial(AlgNum(Rat(1)), j);
      Poly<AlgNum> xj1 = xj.derivative();
      Poly<AlgNum> xj2 = xj1.derivative();
      Poly<AlgNum> col = A2 * xj2 + AlgNum(Rat(2)) * (A1 * xj1) + A0 * xj;
      for (int row = 0; row <= col.degree(); ++row) m[(std::size_t)row][(std::size_t)j] = col[row];
    }
    auto basis = nullspace(m, (std::size_t)d + 1);
    if ((int)basis.size() > family_dim_seen) family_dim_seen = (int)basis.size();    for (auto& vec : basis) {
      Poly<AlgNum> P;
      for (int j = 0; j <= d; ++j) P.set_coeff(j, vec[(std::size_t)j]);
      if (P.is_zero_poly()) continue;
      RF u = RF(P.derivative(), Poly<AlgNum>(AlgNum(Rat(1)))) / RF(P) + theta + half_r;
      if (verify(u)) push_unique(u);
    }
  }
  if (family_dim_seen >= 2 || out.solutions.size() >= 3) {
    out.family = true;
    if (out.family_note.empty())
      out.family_note = "solution space has a free parameter; representatives shown";
  }
  return out;
}

struct Sl2Admissible {
  bool admissible = false;
  std::optional<RatFunc<AlgNum>> witness;
  bool complete = true;
};

inline Sl2Admissible is_sl2_admissible(const RatFunc<AlgNum>& r, const RatFunc<AlgNum>& s,
                                       FieldPtr F = nullptr) {
  auto sols = rational_solutions(r, s, std::move(F));
  Sl2Admissible out;
  out.complete = sols.complete;
  if (!sols.solutions.empty()) {
    out.admissible = false;
    out.witness = sols.solutions.front();
  } else {
    out.admissible = sols.complete;
  }
  return out;
}

}  // namespace finterm
