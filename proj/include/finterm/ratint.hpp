#pragma once

// Rational-function integration over C(x): Hermite reduction, the
// resultant-based logarithmic part, and certificate assembly/checking.
//
// Log arguments coming from resultant factors of degree <= 2 are split
// into explicit (constant, polynomial) terms, adjoining constants as
// needed. Higher-degree irreducible factors are kept whole as
// "root sum" terms: one term {q(z), c(z), u(x,z)} stands for the sum of
// c(a) * u(x,a)'/u(x,a) over the roots a of q. Checking such a term
// needs no splitting field: the sum is a trace, computed from the power
// sums of q.

#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "finterm/numfield.hpp"
#include "finterm/poly.hpp"
#include "finterm/ratfunc.hpp"

namespace finterm {

// ---- residue ring K[z]/(q) as a coefficient field ----
//
// Used with q irreducible over the constants, so every nonzero element
// is invertible. A default-constructed element is a context-free zero
// that lifts into any modulus on combination, mirroring AlgNum.

template <class K>
class ModElem {
 public:
  using ModPtr = std::shared_ptr<const Poly<K>>;

  ModElem() = default;
  explicit ModElem(K c) : rep_(Poly<K>(std::move(c))) {}
  ModElem(ModPtr mod, Poly<K> rep) : mod_(std::move(mod)), rep_(std::move(rep)) {
    if (mod_) rep_ = rep_ % *mod_;
  }
  static ModElem generator(ModPtr mod) {
    Poly<K> z = Poly<K>::monomial(one_like(mod->leading()), 1);
    return ModElem(std::move(mod), std::move(z));
  }

  const ModPtr& modulus() const { return mod_; }
  const Poly<K>& rep() const { return rep_; }

  friend bool is_zero(const ModElem& a) { return a.rep_.is_zero_poly(); }
  friend bool is_one(const ModElem& a) {
    return a.rep_.degree() == 0 && is_one(a.rep_.leading());
  }
  friend ModElem one_like(const ModElem& a) { return ModElem(a.mod_, Poly<K>(one_like(K{}))); }
  friend ModElem zero_like(const ModElem& a) { return ModElem(a.mod_, Poly<K>()); }

  friend ModElem operator+(const ModElem& x, const ModElem& y) {
    auto [a, b] = align(x, y);
    return ModElem(a.mod_, a.rep_ + b.rep_);
  }
  friend ModElem operator-(const ModElem& x, const ModElem& y) {
    auto [a, b] = align(x, y);
    return ModElem(a.mod_, a.rep_ - b.rep_);
  }
  ModElem operator-() const { return ModElem(mod_, -rep_); }
  friend ModElem operator*(const ModElem& x, const ModElem& y) {
    auto [a, b] = align(x, y);
    return ModElem(a.mod_, a.rep_ * b.rep_);
  }
  friend ModElem operator/(const ModElem& x, const ModElem& y) {
    if (is_zero(y)) throw std::domain_error("division by zero residue");
    auto [a, b] = align(x, y);
    if (!a.mod_) return ModElem(a.rep_.leading() / b.rep_.leading());
    auto xg = poly_xgcd(b.rep_, *a.mod_);
    if (xg.g.degree() != 0)
      throw std::domain_error("residue not invertible: modulus not irreducible");
    return ModElem(a.mod_, a.rep_ * xg.s);
  }
  friend bool operator==(const ModElem& x, const ModElem& y) {
    auto [a, b] = align(x, y);
    return a.rep_ == b.rep_;
  }
  friend bool operator!=(const ModElem& x, const ModElem& y) { return !(x == y); }

 private:
  static std::pair<ModElem, ModElem> align(const ModElem& x, const ModElem& y) {
    if (x.mod_ && y.mod_) {
      if (!(*x.mod_ == *y.mod_)) throw std::domain_error("mismatched residue moduli");
      return {x, y};
    }
    if (x.mod_) return {x, ModElem(x.mod_, y.rep_)};
    if (y.mod_) return {ModElem(y.mod_, x.rep_), y};
    return {x, y};
  }

  ModPtr mod_;     // null = plain constant
  Poly<K> rep_;    // degree < deg(mod) when mod_ set
};

// ---- Hermite reduction ----

// f = g' + h with den(h) squarefree (the polynomial part of f stays in h).
template <class K>
std::pair<RatFunc<K>, RatFunc<K>> hermite_reduce(const RatFunc<K>& f) {
  RatFunc<K> g;
  if (f.is_zero_fn()) return {g, f};
  auto [P, N0] = divrem(f.num(), f.den());
  RatFunc<K> h{P};
  if (N0.is_zero_poly()) return {g, h};
  auto sq = squarefree_decomposition(f.den());
  std::vector<std::pair<Poly<K>, int>> factors(sq.begin(), sq.end());
  auto pf = partial_fractions(RatFunc<K>(N0, f.den()), factors);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const Poly<K>& p = factors[i].first;
    int m = factors[i].second;
    auto xg = poly_xgcd(p.derivative(), p);  // s*p' + t*p = 1
    Poly<K> carry;
    for (int j = m; j >= 2; --j) {
      Poly<K> a = pf.parts[i][(std::size_t)j - 1] + carry;
      if (a.is_zero_poly()) {
        carry = Poly<K>();
        continue;
      }
      // a = b*p + c*p'; then a/p^j = d/dx(-c/((j-1) p^{j-1}))
      //                            + (b + c'/(j-1))/p^{j-1}
      Poly<K> c = (a * xg.s) % p;
      Poly<K> b = (a - c * p.derivative()) / p;
      K jm1 = k_int(j - 1, p.leading());
      g = g + RatFunc<K>(-(c / jm1), poly_pow(p, j - 1));
      carry = b + c.derivative() / jm1;
    }
    Poly<K> a1 = pf.parts[i][0] + carry;
    if (!a1.is_zero_poly()) h = h + RatFunc<K>(a1, p);
  }
  return {g, h};
}

// ---- logarithmic part ----

struct LogTerm {
  AlgNum c;
  Poly<AlgNum> u;  // monic, nonconstant, in x
};

// Sum over the roots a of q of c(a) * u(x,a)'/u(x,a). u is stored by
// x-degree: u_x[i] is the coefficient of x^i as a polynomial in z.
struct RootSumTerm {
  Poly<AlgNum> q;                  // squarefree, irreducible over the constants
  Poly<AlgNum> c;                  // c(z)
  std::vector<Poly<AlgNum>> u_x;
};

struct LogPart {
  std::vector<LogTerm> terms;
  std::vector<RootSumTerm> rootsums;
  FieldPtr field;  // constants field after any adjunctions
};

namespace detail {

inline Poly<AlgNum> lift_rat_poly(const Poly<Rat>& p) {
  std::vector<AlgNum> v((std::size_t)p.degree() + 1);
  for (int i = 0; i <= p.degree(); ++i) v[(std::size_t)i] = AlgNum(p[i]);
  return Poly<AlgNum>(std::move(v));
}

// Rothstein resultant R(z) = res_x(D, N - z D') by evaluation at integer
// z values and interpolation.
inline Poly<AlgNum> rothstein_resultant(const Poly<AlgNum>& N, const Poly<AlgNum>& D) {
  int npts = D.degree() + 1;
  std::vector<AlgNum> xs, ys;
  Poly<AlgNum> Dp = D.derivative();
  long z0 = 0;
  while ((int)xs.size() < npts) {
    AlgNum z{Rat(z0)};
    Poly<AlgNum> g = N - z * Dp;
    xs.push_back(z);
    if (g.is_zero_poly()) {
      // res(D, 0) with deg D >= 1 is 0
      ys.push_back(AlgNum(Rat(0)));
    } else {
      ys.push_back(resultant(D, g));
    }
    ++z0;
  }
  return poly_interpolate(xs, ys);
}

}  // namespace detail

// h proper with squarefree monic denominator; F is the ambient constants
// field (null = Q). Produces terms with sum of logderivs equal to h.
inline LogPart log_part(const RatFunc<AlgNum>& h, FieldPtr F) {
  LogPart out;
  out.field = std::move(F);
  if (h.is_zero_fn()) return out;
  const Poly<AlgNum>& D = h.den();
  const Poly<AlgNum>& N = h.num();
  if (N.degree() >= D.degree())
    throw std::domain_error("log_part: input not proper");
  if (poly_gcd(D, D.derivative()).degree() != 0)
    throw std::domain_error("log_part: denominator not squarefree");

  Poly<AlgNum> R = detail::rothstein_resultant(N, D).monic();
  // distinct roots only
  Poly<AlgNum> Rsf = R / poly_gcd(R, R.derivative());

  auto refactor = [&](const Poly<AlgNum>& p) {
    return factor_squarefree_over_field(out.field, p);
  };
  std::vector<Poly<AlgNum>> pending;
  for (auto& ff : refactor(Rsf)) pending.push_back(ff.factor);

  Poly<AlgNum> Dprime = D.derivative();
  auto emit_root = [&](const AlgNum& c) {
    Poly<AlgNum> u = poly_gcd(D, N - c * Dprime);
    if (u.degree() > 0 && !is_zero(c)) out.terms.push_back({c, u.monic()});
  };

  for (;;) {
    std::vector<Poly<AlgNum>> rest;
    const Poly<AlgNum>* quad = nullptr;
    for (auto& q : pending) {
      if (q.degree() == 1) {
        emit_root(-q[0] / q[1]);
      } else if (q.degree() == 2 && !quad) {
        quad = &q;
      } else {
        rest.push_back(q);
      }
    }
    if (quad) {
      auto adj = adjoin_root(out.field, *quad);
      out.field = adj.field;
      AlgNum c1 = adj.root;
      AlgNum c2 = -(*quad)[1] / (*quad)[2] - c1;  // root sum of the quadratic
      emit_root(c1);
      emit_root(c2);
      // the larger constants field may split what remains
      std::vector<Poly<AlgNum>> next;
      for (auto& q : rest)
        for (auto& ff : refactor(q)) next.push_back(ff.factor);
      pending = std::move(next);
      continue;
    }
    pending = std::move(rest);
    break;
  }

  // remaining factors have degree >= 3: keep whole as root sums
  for (auto& q : pending) {
    auto mod = std::make_shared<const Poly<AlgNum>>(q.monic());
    ModElem<AlgNum> z = ModElem<AlgNum>::generator(mod);
    auto lift = [&](const Poly<AlgNum>& p) {
      std::vector<ModElem<AlgNum>> v((std::size_t)p.degree() + 1);
      for (int i = 0; i <= p.degree(); ++i) v[(std::size_t)i] = ModElem<AlgNum>(p[i]);
      return Poly<ModElem<AlgNum>>(std::move(v));
    };
    Poly<ModElem<AlgNum>> u =
        poly_gcd(lift(D), lift(N) - Poly<ModElem<AlgNum>>(z) * lift(Dprime));
    RootSumTerm t;
    t.q = mod->monic();
    t.c = Poly<AlgNum>::monomial(AlgNum(Rat(1)), 1);  // c(z) = z
    t.u_x.resize((std::size_t)u.degree() + 1);
    for (int i = 0; i <= u.degree(); ++i) t.u_x[(std::size_t)i] = u[i].rep();
    out.rootsums.push_back(std::move(t));
  }
  return out;
}

// ---- full integration and checking ----

struct RatIntResult {
  RatFunc<AlgNum> v;  // f = v' + sum of log-derivative terms
  std::vector<LogTerm> terms;
  std::vector<RootSumTerm> rootsums;
  FieldPtr field;
};

inline RatIntResult integrate_rational(const RatFunc<AlgNum>& f, FieldPtr F = nullptr) {
  auto [g, h] = hermite_reduce(f);
  auto [P, N] = divrem(h.num(), h.den());
  RatIntResult out;
  out.v = g;
  // antiderivative of the polynomial part
  if (!P.is_zero_poly()) {
    Poly<AlgNum> ip;
    for (int i = 0; i <= P.degree(); ++i)
      ip.set_coeff(i + 1, P[i] / k_int(i + 1, P[i]));
    out.v = out.v + RatFunc<AlgNum>(ip);
  }
  LogPart lp = N.is_zero_poly() ? LogPart{{}, {}, F}
                                : log_part(RatFunc<AlgNum>(N, h.den()), F);
  out.terms = std::move(lp.terms);
  out.rootsums = std::move(lp.rootsums);
  out.field = lp.field;
  return out;
}

namespace detail {

using XP = Poly<AlgNum>;  // polynomial in x
using ZX = Poly<XP>;      // polynomial in z with XP coefficients

// Reduce A modulo a monic (in z) modulus with constant coefficients.
inline ZX zx_mod_monic(ZX A, const ZX& q) {
  while (!A.is_zero_poly() && A.degree() >= q.degree()) {
    const XP& lead = A[A.degree()];
    int sh = A.degree() - q.degree();
    ZX sub;
    for (int i = 0; i <= q.degree(); ++i)
      sub.set_coeff(i + sh, lead * q[i]);
    A = A - sub;
  }
  return A;
}

}  // namespace detail

// Value of one root-sum term as a rational function: the trace over z of
// c(z) u_x'(x,z)/u(x,z) modulo q(z), via the power sums of q. The modular
// inverse of u is obtained fraction-free by a pseudo-remainder extended
// Euclid over C[x][z], giving s*u = g (mod q) with g free of z.
inline RatFunc<AlgNum> rootsum_value(const RootSumTerm& t) {
  using detail::XP;
  using detail::ZX;
  auto lift_z = [](const Poly<AlgNum>& p) {
    ZX out;
    for (int i = 0; i <= p.degree(); ++i) out.set_coeff(i, XP(p[i]));
    return out;
  };
  ZX qz = lift_z(t.q.monic());
  // u and du/dx as polynomials in z with x-polynomial coefficients
  int zdeg = 0;
  for (auto& p : t.u_x) zdeg = std::max(zdeg, p.degree());
  ZX U, Ux;
  for (int k = 0; k <= zdeg; ++k) {
    XP uk, duk;
    for (std::size_t i = 0; i < t.u_x.size(); ++i) {
      uk.set_coeff((int)i, t.u_x[i][k]);
      if (i >= 1) duk.set_coeff((int)i - 1, k_int((long)i, t.u_x[i][k]) * t.u_x[i][k]);
    }
    U.set_coeff(k, uk);
    Ux.set_coeff(k, duk);
  }
  if (U.is_zero_poly()) throw std::domain_error("rootsum_value: zero argument");

  // invariant: s_i * U = r_i (mod q); pseudo-divisions keep everything in C[x]
  ZX r0 = qz, r1 = U;
  ZX s0, s1(XP(AlgNum(Rat(1))));
  while (r1.degree() > 0) {
    const XP& lc = r1[r1.degree()];
    int d = r0.degree() - r1.degree() + 1;
    ZX Q, R = r0;
    int e = d;
    while (!R.is_zero_poly() && R.degree() >= r1.degree()) {
      ZX tm = ZX::monomial(R[R.degree()], R.degree() - r1.degree());
      Q = lc * Q + tm;
      R = lc * R - tm * r1;
      --e;
    }
    XP mult(AlgNum(Rat(1)));
    for (int i = 0; i < e; ++i) mult = mult * lc;
    Q = mult * Q;
    R = mult * R;
    XP lcd(AlgNum(Rat(1)));
    for (int i = 0; i < d; ++i) lcd = lcd * lc;
    ZX s2 = lcd * s0 - Q * s1;
    r0 = r1;
    r1 = R;
    s0 = s1;
    s1 = s2;
    if (r1.is_zero_poly())
      throw std::domain_error("rootsum_value: argument shares a factor with q");
    // tame coefficient growth: strip the common x-polynomial content
    XP cont;
    for (int i = 0; i <= r1.degree(); ++i) cont = poly_gcd(cont, r1[i]);
    for (int i = 0; i <= s1.degree(); ++i) cont = poly_gcd(cont, s1[i]);
    if (cont.degree() > 0) {
      ZX nr, ns;
      for (int i = 0; i <= r1.degree(); ++i) nr.set_coeff(i, r1[i] / cont);
      for (int i = 0; i <= s1.degree(); ++i) ns.set_coeff(i, s1[i] / cont);
      r1 = nr;
      s1 = ns;
    }
  }
  XP g = r1[0];  // s1 * U = g (mod q), g in C[x]
  ZX A = detail::zx_mod_monic(lift_z(t.c) * Ux * s1, qz);
  auto ps = poly_power_sums(t.q.monic(), t.q.degree());
  XP num;
  for (int k = 0; k <= A.degree(); ++k) num = num + ps[(std::size_t)k] * A[k];
  return RatFunc<AlgNum>(num, g);
}

// Sum of all log-derivative terms of a result.
inline RatFunc<AlgNum> logderiv_value(const RatIntResult& r) {
  RatFunc<AlgNum> acc;
  for (auto& t : r.terms) {
    RatFunc<AlgNum> u{t.u};
    acc = acc + RatFunc<AlgNum>(Poly<AlgNum>(t.c)) * u.derivative() / u;
  }
  for (auto& t : r.rootsums) acc = acc + rootsum_value(t);
  return acc;
}

inline bool ratint_verify(const RatFunc<AlgNum>& f, const RatIntResult& r) {
  return r.v.derivative() + logderiv_value(r) == f;
}

}  // namespace finterm
