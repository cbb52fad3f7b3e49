#pragma once

// Truncated Laurent expansion of rational functions in a tower generator
// about points of explicitly constructed extensions, with exact order
// (valuation) arithmetic.  Derivative series are computed termwise from the
// substitution rule for the shifted generator, so order laws of derivatives
// can be checked without leaving the series domain.

#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <vector>

#include "finterm/tower.hpp"

namespace finterm {

struct LaurentSeries {
  TowerElem point;                // expansion point a
  int order = 0;                  // valuation of the function at a
  std::vector<TowerElem> coeffs;  // r_order .. r_{order+truncation}
  int truncation = 0;
  bool identically_zero = false;  // zero within the computed window

  // coefficient of (g - a)^j
  TowerElem coeff(int j) const {
    if (identically_zero || j < order || j > order + truncation) return TowerElem();
    return coeffs[(std::size_t)(j - order)];
  }
};

// thrown when a truncated computation cannot certify the order of its result
struct TruncationInsufficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline int default_truncation() {
  if (const char* e = std::getenv("FINTERM_MAX_TRUNCATION")) {
    int n = std::atoi(e);
    if (n > 0) return n;
  }
  return 8;
}

namespace laurent_detail {

inline void check_point(const TowerPtr& tw, int level, const TowerElem& a) {
  if (level < 0 || level >= tw->size()) throw std::domain_error("laurent: bad level");
  LevelKind k = tw->levels[(std::size_t)level].kind;
  if (tower_detail::is_algebraic_kind(k))
    throw std::domain_error("laurent: generator is algebraic, not transcendental");
  if (a.level() > 0)
    throw std::domain_error("laurent: expansion point must lie in the base level");
  if (a.level() >= level)
    throw std::domain_error("laurent: expansion point must lie below the generator");
}

// valuation of a polynomial in the generator at g = a (index of the lowest
// nonzero coefficient after the Taylor shift), together with the shifted
// coefficients
inline std::pair<int, Poly<TowerElem>> shift_and_order(const Poly<TowerElem>& p,
                                                       const TowerElem& a) {
  Poly<TowerElem> s = p.shifted(a);
  int v = 0;
  while (v <= s.degree() && is_zero(s[v])) ++v;
  return {v, std::move(s)};
}

}  // namespace laurent_detail

// Expansion of x (living at or below `level`) in powers of g - a, where g is
// the generator of `level`.  The order is exact; coefficients are carried to
// N terms past the leading one.
inline LaurentSeries expand(const TowerElem& x, const TowerPtr& tw, int level,
                            const TowerElem& a, int N = -1) {
  if (N < 0) N = default_truncation();
  laurent_detail::check_point(tw, level, a);
  if (is_zero(x)) throw std::domain_error("laurent: cannot expand the zero function");
  if (x.level() > level) throw std::domain_error("laurent: input lives above the generator");

  LaurentSeries out;
  out.point = a;
  out.truncation = N;
  if (x.level() < level) {  // constant with respect to the generator
    out.order = 0;
    out.coeffs.assign((std::size_t)N + 1, TowerElem());
    out.coeffs[0] = x;
    return out;
  }

  auto [vn, sn] = laurent_detail::shift_and_order(x.parts().num(), a);
  auto [vd, sd] = laurent_detail::shift_and_order(x.parts().den(), a);
  out.order = vn - vd;

  // series coefficients of num and den past their valuations
  auto window = [&](const Poly<TowerElem>& s, int v) {
    std::vector<TowerElem> w((std::size_t)N + 1);
    for (int j = 0; j <= N; ++j)
      if (v + j <= s.degree()) w[(std::size_t)j] = s[v + j];
    return w;
  };
  std::vector<TowerElem> num = window(sn, vn);
  std::vector<TowerElem> den = window(sd, vd);

  // divide the two power series: out[m] = (num[m] - sum_{j>=1} den[j]*out[m-j]) / den[0]
  out.coeffs.assign((std::size_t)N + 1, TowerElem());
  for (int m = 0; m <= N; ++m) {
    TowerElem acc = num[(std::size_t)m];
    for (int j = 1; j <= m; ++j)
      acc = acc - den[(std::size_t)j] * out.coeffs[(std::size_t)(m - j)];
    out.coeffs[(std::size_t)m] = acc / den[0];
  }
  return out;
}

// Valuation of x at g = a; +infinity (empty optional) for x = 0.
inline std::optional<int> ord_at(const TowerElem& x, const TowerPtr& tw, int level,
                                 const TowerElem& a) {
  laurent_detail::check_point(tw, level, a);
  if (is_zero(x)) return std::nullopt;
  if (x.level() > level) throw std::domain_error("laurent: input lives above the generator");
  if (x.level() < level) return 0;
  auto [vn, sn] = laurent_detail::shift_and_order(x.parts().num(), a);
  auto [vd, sd] = laurent_detail::shift_and_order(x.parts().den(), a);
  (void)sn;
  (void)sd;
  return vn - vd;
}

// Series of derive(x) about a, computed termwise: with u = g - a the shifted
// generator satisfies u' = q0 + q1 u + q2 u^2 where q = tp(u + a) - a' and
// tp is the generator-derivative polynomial, so
//   coeff_m(x') = r_m' + (m+1) q0 r_{m+1} + m q1 r_m + (m-1) q2 r_{m-1}.
// For a Riccati layer this is the rule (g-a)' = -R(a) - (2a-r)(g-a) - (g-a)^2.
inline LaurentSeries derivative_series(const TowerElem& x, const TowerPtr& tw, int level,
                                       const TowerElem& a, int N = -1) {
  if (N < 0) N = default_truncation();
  LaurentSeries s = expand(x, tw, level, a, N);

  Poly<TowerElem> q = gen_derivative_poly(tw, level).shifted(a);
  TowerElem q0 = (q.degree() >= 0 ? q[0] : TowerElem()) - a.derivative();
  TowerElem q1 = q.degree() >= 1 ? q[1] : TowerElem();
  TowerElem q2 = q.degree() >= 2 ? q[2] : TowerElem();
  TowerElem one = one_like(tw->x());

  // computable window: m = order-1 .. order+N-1 (r_{m+1} must be known)
  int lo = s.order - 1, hi = s.order + N - 1;
  std::vector<TowerElem> c((std::size_t)(hi - lo + 1));
  for (int m = lo; m <= hi; ++m) {
    TowerElem v = s.coeff(m).derivative();
    v = v + k_int(m + 1, one) * q0 * s.coeff(m + 1);
    v = v + k_int(m, one) * q1 * s.coeff(m);
    v = v + k_int(m - 1, one) * q2 * s.coeff(m - 1);
    c[(std::size_t)(m - lo)] = v;
  }

  int first = 0;
  while (first < (int)c.size() && is_zero(c[(std::size_t)first])) ++first;
  LaurentSeries out;
  out.point = a;
  if (first == (int)c.size()) {
    if (!is_zero(derive(x)))
      throw TruncationInsufficient(
          "derivative series vanishes to the computed truncation; raise N");
    out.identically_zero = true;
    out.truncation = N;
    out.coeffs.assign((std::size_t)N + 1, TowerElem());
    return out;
  }
  out.order = lo + first;
  out.coeffs.assign(c.begin() + first, c.end());
  out.truncation = (int)out.coeffs.size() - 1;
  return out;
}

// Sum of the retained terms as an exact element: sum_j r_j (g - a)^j.
inline TowerElem recombine(const LaurentSeries& s, const TowerPtr& tw, int level) {
  if (s.identically_zero) return TowerElem();
  TowerElem u = tw->gen(level) - s.point;
  TowerElem acc;
  // evaluate sum r_{order+i} u^i by Horner, then scale by u^order
  for (int i = (int)s.coeffs.size() - 1; i >= 0; --i) acc = acc * u + s.coeffs[(std::size_t)i];
  int m = s.order;
  TowerElem one = one_like(u);
  TowerElem pw = one;
  for (int i = 0; i < (m < 0 ? -m : m); ++i) pw = pw * u;
  return m >= 0 ? acc * pw : acc / pw;
}

}  // namespace finterm
