#pragma once

// Certificates of elementary integrability: f = sum_i c_i u_i'/u_i + v' with
// constants c_i, arguments u_i and remainder v living at a declared tower
// level.  Verification is an exact symbolic identity check; normalization
// rewrites the constants into a Q-linearly independent set by merging
// arguments along integer relations.

#include <stdexcept>
#include <vector>

#include "finterm/linalg.hpp"
#include "finterm/numfield.hpp"
#include "finterm/tower.hpp"

namespace finterm {

struct CertTerm {
  AlgNum c;
  TowerElem u;
};

struct Certificate {
  int level = 0;
  std::vector<CertTerm> terms;
  TowerElem v;
  TowerElem f;
};

namespace cert_detail {

inline void check_shape(const Certificate& c, const TowerPtr& tw) {
  if (c.level < 0 || c.level >= tw->size())
    throw std::domain_error("certificate: level outside the tower");
  if (c.v.level() > c.level || c.f.level() > c.level)
    throw std::domain_error("certificate: element lives above the declared level");
  for (auto& t : c.terms) {
    if (is_zero(t.u)) throw std::domain_error("certificate: zero logarithm argument");
    if (t.u.level() > c.level)
      throw std::domain_error("certificate: element lives above the declared level");
  }
}

// recursive leading constant of the num/den representation; dividing by it
// scales the element to a canonical unit multiple without changing logderiv
inline AlgNum leading_constant(const TowerElem& u) {
  if (u.level() < 0) return u.constant();
  const auto& pr = u.parts();
  const Poly<TowerElem>& n = pr.num();
  const Poly<TowerElem>& d = pr.den();
  return leading_constant(n[n.degree()]) / leading_constant(d[d.degree()]);
}

inline TowerElem unit_normalized(const TowerElem& u) {
  if (is_zero(u) || u.is_constant()) return u;
  AlgNum lc = leading_constant(u);
  if (is_zero(lc)) return u;
  return u / TowerElem(lc);
}

inline TowerElem int_pow(const TowerElem& u, long m) {
  TowerElem acc = one_like(u);
  long n = m < 0 ? -m : m;
  TowerElem base = u;
  while (n > 0) {
    if (n & 1) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return m < 0 ? one_like(u) / acc : acc;
}

}  // namespace cert_detail

inline bool verify(const Certificate& c, const TowerPtr& tw) {
  cert_detail::check_shape(c, tw);
  TowerElem acc = derive(c.v);
  for (auto& t : c.terms) acc = acc + TowerElem(t.c) * logderiv(t.u);
  return acc == c.f;
}

// View the same data at a higher level of the tower.
inline Certificate lift(const Certificate& c, int to_level) {
  if (to_level < c.level) throw std::domain_error("lift: target level below certificate");
  Certificate out = c;
  out.level = to_level;
  return out;
}

// Rewrite the certificate so that its constants are Q-linearly independent.
// Each integer relation sum_i m_i c_i = 0 eliminates the term j (chosen with
// m_j > 0) by folding it into the others:
//   sum_i c_i u_i'/u_i = sum_{i != j} (c_i / m_j) (u_i^{m_j} u_j^{-m_i})' / ...
// The number of terms never increases, and verification is preserved.
inline Certificate normalize_constants(const Certificate& c) {
  Certificate out = c;
  // drop terms that contribute nothing: zero constants or constant arguments
  for (std::size_t i = out.terms.size(); i-- > 0;)
    if (is_zero(out.terms[i].c) || out.terms[i].u.is_constant())
      out.terms.erase(out.terms.begin() + (long)i);

  // constants must share one number field so coordinates mean the same basis
  FieldPtr F;
  for (auto& t : out.terms)
    if (t.c.field()) {
      if (F && !same_field(F, t.c.field()))
        throw std::domain_error("normalize_constants: constants in unrelated fields");
      F = t.c.field();
    }

  for (;;) {
    std::size_t n = out.terms.size();
    // coordinate matrix over Q: one row per basis coordinate of the shared field
    std::size_t dim = 1;
    for (auto& t : out.terms) dim = std::max(dim, t.c.coords().size());
    std::vector<std::vector<Rat>> m(dim, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) {
      const auto& co = out.terms[i].c.coords();
      for (std::size_t r = 0; r < co.size(); ++r) m[r][i] = co[r];
    }
    auto basis = nullspace(std::move(m), n);
    if (basis.empty()) break;

    // clear the relation to coprime integers
    std::vector<Rat>& rel = basis.front();
    Int lcm = 1;
    for (auto& r : rel) {
      Int den = r.get_den(), g;
      mpz_gcd(g.get_mpz_t(), lcm.get_mpz_t(), den.get_mpz_t());
      lcm = lcm / g * den;
    }
    std::vector<Int> mi(n);
    for (std::size_t i = 0; i < n; ++i) {
      Rat cleared = rel[i] * Rat(lcm);
      mi[i] = cleared.get_num();
    }
    // eliminate a term with positive coefficient (negate if needed)
    std::size_t j = n;
    for (std::size_t i = 0; i < n; ++i)
      if (sgn(Rat(mi[i])) != 0) j = i;
    if (sgn(Rat(mi[j])) < 0)
      for (auto& v : mi) v = -v;

    Certificate next;
    next.level = out.level;
    next.v = out.v;
    next.f = out.f;
    long mj = mi[j].get_si();
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      CertTerm t;
      t.c = out.terms[i].c / AlgNum(Rat(mj));
      long mii = mi[i].get_si();
      t.u = cert_detail::int_pow(out.terms[i].u, mj) *
            cert_detail::int_pow(out.terms[j].u, -mii);
      // constants have zero logarithmic derivative: merged args that collapse
      // to a constant contribute nothing
      if (!is_zero(t.c) && !t.u.is_constant()) next.terms.push_back(std::move(t));
    }
    out = std::move(next);
  }
  // canonicalize the arguments up to constant multiples (logderiv-invariant)
  for (auto& t : out.terms) t.u = cert_detail::unit_normalized(t.u);
  return out;
}

// certifies Q-linear independence of the constants (empty kernel)
inline bool constants_independent(const Certificate& c) {
  std::size_t n = c.terms.size();
  if (n == 0) return true;
  std::size_t dim = 1;
  for (auto& t : c.terms) dim = std::max(dim, t.c.coords().size());
  std::vector<std::vector<Rat>> m(dim, std::vector<Rat>(n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& co = c.terms[i].c.coords();
    for (std::size_t r = 0; r < co.size(); ++r) m[r][i] = co[r];
  }
  return nullspace(std::move(m), n).empty();
}

}  // namespace finterm
