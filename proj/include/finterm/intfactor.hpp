#pragma once

// Factorization of univariate polynomials over Q into irreducibles:
// squarefree split (Yun), then Berlekamp-Zassenhaus on each squarefree
// part (factor mod p, Hensel lift, subset recombination).

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "finterm/poly.hpp"
#include "finterm/rational.hpp"

namespace finterm {
namespace detail {

// ---- arithmetic in GF(p)[x], p a word-sized odd prime ----

using ZpPoly = std::vector<std::int64_t>;  // little-endian, trimmed

inline void zp_trim(ZpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}
inline int zp_deg(const ZpPoly& a) { return (int)a.size() - 1; }

inline std::int64_t zp_pow(std::int64_t b, std::int64_t e, std::int64_t p) {
  std::int64_t r = 1 % p;
  b %= p;
  while (e > 0) {
    if (e & 1) r = (std::int64_t)((__int128)r * b % p);
    b = (std::int64_t)((__int128)b * b % p);
    e >>= 1;
  }
  return r;
}
inline std::int64_t zp_inv(std::int64_t a, std::int64_t p) {
  return zp_pow((a % p + p) % p, p - 2, p);
}

inline ZpPoly zp_mul(const ZpPoly& a, const ZpPoly& b, std::int64_t p) {
  if (a.empty() || b.empty()) return {};
  ZpPoly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      c[i + j] = (std::int64_t)((c[i + j] + (__int128)a[i] * b[j]) % p);
  zp_trim(c);
  return c;
}

inline void zp_divrem(const ZpPoly& a0, const ZpPoly& b, std::int64_t p, ZpPoly& q,
                      ZpPoly& r) {
  ZpPoly a = a0;
  q.assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
  std::int64_t inv = zp_inv(b.back(), p);
  while (zp_deg(a) >= zp_deg(b) && !a.empty()) {
    std::int64_t c = (std::int64_t)((__int128)a.back() * inv % p);
    int shift = zp_deg(a) - zp_deg(b);
    q[(size_t)shift] = c;
    for (size_t i = 0; i < b.size(); ++i) {
      auto& t = a[i + (size_t)shift];
      t = (std::int64_t)((t - (__int128)c * b[i]) % p);
      if (t < 0) t += p;
    }
    zp_trim(a);
  }
  zp_trim(q);
  r = std::move(a);
}

inline ZpPoly zp_mod(const ZpPoly& a, const ZpPoly& m, std::int64_t p) {
  ZpPoly q, r;
  zp_divrem(a, m, p, q, r);
  return r;
}
inline ZpPoly zp_div(const ZpPoly& a, const ZpPoly& m, std::int64_t p) {
  ZpPoly q, r;
  zp_divrem(a, m, p, q, r);
  return q;
}

inline ZpPoly zp_sub(ZpPoly a, const ZpPoly& b, std::int64_t p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (size_t i = 0; i < b.size(); ++i) a[i] = ((a[i] - b[i]) % p + p) % p;
  zp_trim(a);
  return a;
}

inline ZpPoly zp_gcd(ZpPoly a, ZpPoly b, std::int64_t p) {
  while (!b.empty()) {
    ZpPoly r = zp_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    std::int64_t inv = zp_inv(a.back(), p);
    for (auto& c : a) c = (std::int64_t)((__int128)c * inv % p);
  }
  return a;
}

inline ZpPoly zp_powmod(ZpPoly b, Int e, const ZpPoly& m, std::int64_t p) {
  ZpPoly r = {1};
  b = zp_mod(b, m, p);
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = zp_mod(zp_mul(r, b, p), m, p);
    b = zp_mod(zp_mul(b, b, p), m, p);
    e >>= 1;
  }
  return r;
}

inline ZpPoly zp_deriv(const ZpPoly& a, std::int64_t p) {
  if (a.size() <= 1) return {};
  ZpPoly d(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i)
    d[i - 1] = (std::int64_t)((__int128)a[i] * (std::int64_t)i % p);
  zp_trim(d);
  return d;
}

// Equal-degree splitting (Cantor-Zassenhaus); f squarefree monic with all
// irreducible factors of degree d.
inline void zp_equal_degree(const ZpPoly& f, int d, std::int64_t p,
                            std::mt19937_64& rng, std::vector<ZpPoly>& out) {
  if (zp_deg(f) == d) {
    out.push_back(f);
    return;
  }
  Int pd = 1;
  for (int i = 0; i < d; ++i) pd *= p;
  Int e = (pd - 1) / 2;
  while (true) {
    ZpPoly a((size_t)zp_deg(f), 0);
    for (auto& c : a) c = (std::int64_t)(rng() % (std::uint64_t)p);
    zp_trim(a);
    if (zp_deg(a) < 1) continue;
    ZpPoly g = zp_gcd(f, a, p);
    if (zp_deg(g) <= 0 || zp_deg(g) >= zp_deg(f)) {
      ZpPoly b = zp_powmod(a, e, f, p);
      if (b.empty()) b = {0};
      b[0] = (b[0] + p - 1) % p;
      zp_trim(b);
      g = zp_gcd(f, b, p);
    }
    if (zp_deg(g) > 0 && zp_deg(g) < zp_deg(f)) {
      zp_equal_degree(g, d, p, rng, out);
      zp_equal_degree(zp_div(f, g, p), d, p, rng, out);
      return;
    }
  }
}

// Full factorization of a squarefree monic f over GF(p), via
// distinct-degree then equal-degree splitting.
inline std::vector<ZpPoly> zp_factor_squarefree(const ZpPoly& f, std::int64_t p) {
  std::vector<ZpPoly> out;
  std::mt19937_64 rng(0xf1e2d3c4b5a69788ULL);
  ZpPoly rem = f;
  ZpPoly h = {0, 1};  // x^(p^d) mod rem, running
  int d = 0;
  while (zp_deg(rem) > 0) {
    ++d;
    if (2 * d > zp_deg(rem)) {
      out.push_back(rem);
      break;
    }
    h = zp_powmod(h, Int(p), rem, p);
    ZpPoly hx = h;
    if (hx.size() < 2) hx.resize(2, 0);
    hx[1] = (hx[1] + p - 1) % p;
    zp_trim(hx);
    ZpPoly g = zp_gcd(rem, hx, p);
    if (zp_deg(g) > 0) {
      zp_equal_degree(g, d, p, rng, out);
      rem = zp_div(rem, g, p);
      h = zp_mod(h, rem, p);
    }
  }
  return out;
}

// ---- integer polynomial arithmetic mod m ----

using ZVec = std::vector<Int>;  // little-endian, trimmed, coeffs in [0, m)

inline void z_trim(ZVec& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}
inline ZVec z_reduce(ZVec a, const Int& m) {
  for (auto& c : a) c = ((c % m) + m) % m;
  z_trim(a);
  return a;
}
inline ZVec z_mul(const ZVec& a, const ZVec& b, const Int& m) {
  if (a.empty() || b.empty()) return {};
  ZVec c(a.size() + b.size() - 1, Int(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % m;
  z_trim(c);
  return c;
}
inline ZVec z_add(ZVec a, const ZVec& b, const Int& m) {
  if (a.size() < b.size()) a.resize(b.size(), Int(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + b[i]) % m;
  z_trim(a);
  return a;
}
inline ZVec z_sub(ZVec a, const ZVec& b, const Int& m) {
  if (a.size() < b.size()) a.resize(b.size(), Int(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] = ((a[i] - b[i]) % m + m) % m;
  z_trim(a);
  return a;
}
inline void z_divrem(const ZVec& a0, const ZVec& b, const Int& m, ZVec& q, ZVec& r) {
  ZVec a = a0;
  Int lcinv;
  if (mpz_invert(lcinv.get_mpz_t(), b.back().get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::runtime_error("non-invertible leading coefficient in Hensel division");
  q.assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Int(0));
  while (a.size() >= b.size() && !a.empty()) {
    Int c = a.back() * lcinv % m;
    size_t shift = a.size() - b.size();
    q[shift] = c;
    for (size_t i = 0; i < b.size(); ++i)
      a[i + shift] = ((a[i + shift] - c * b[i]) % m + m) % m;
    z_trim(a);
  }
  z_trim(q);
  r = std::move(a);
}

// One quadratic Hensel step: from f == g*h, s*g + t*h == 1 (mod m) to the
// same congruences mod m2, with g monic (g stays monic).
inline void hensel_step(const ZVec& f, ZVec& g, ZVec& h, ZVec& s, ZVec& t,
                        const Int& m2) {
  ZVec e = z_sub(z_reduce(f, m2), z_mul(g, h, m2), m2);
  ZVec te = z_mul(t, e, m2);
  ZVec q, r;
  z_divrem(te, g, m2, q, r);
  ZVec g1 = z_add(g, r, m2);
  ZVec h1 = z_add(h, z_add(z_mul(s, e, m2), z_mul(q, h, m2), m2), m2);
  ZVec b = z_sub(z_add(z_mul(s, g1, m2), z_mul(t, h1, m2), m2), ZVec{Int(1)}, m2);
  ZVec tb = z_mul(t, b, m2);
  ZVec c, d;
  z_divrem(tb, g1, m2, c, d);
  ZVec t1 = z_sub(t, d, m2);
  ZVec s1 = z_sub(s, z_add(z_mul(s, b, m2), z_mul(c, h1, m2), m2), m2);
  g = std::move(g1);
  h = std::move(h1);
  s = std::move(s1);
  t = std::move(t1);
}

inline ZVec zp_to_z(const ZpPoly& a) {
  ZVec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[i] = a[i];
  return v;
}

// Lift the modular factors of target (== lc(target) * prod mods mod p) to
// monic factors mod pk, appending them to out. Binary factor tree.
inline void hensel_tree(const ZVec& target, std::vector<ZpPoly> mods, std::int64_t p,
                        const Int& pk, std::vector<ZVec>& out) {
  if (mods.size() == 1) {
    ZVec f = z_reduce(target, pk);
    Int lcinv;
    mpz_invert(lcinv.get_mpz_t(), f.back().get_mpz_t(), pk.get_mpz_t());
    for (auto& c : f) c = c * lcinv % pk;
    z_trim(f);
    out.push_back(std::move(f));
    return;
  }
  size_t half = mods.size() / 2;
  std::vector<ZpPoly> ma(mods.begin(), mods.begin() + (long)half);
  std::vector<ZpPoly> mb(mods.begin() + (long)half, mods.end());
  ZpPoly A = {1}, B = {1};
  for (auto& f : ma) A = zp_mul(A, f, p);
  for (auto& f : mb) B = zp_mul(B, f, p);
  // target == A * (lc*B) mod p, A monic
  std::int64_t lc = [&] {
    Int r = target.back() % p;
    if (r < 0) r += p;
    return r.get_si();
  }();
  ZpPoly Blc = B;
  for (auto& c : Blc) c = (std::int64_t)((__int128)c * lc % p);
  // Bezout s*A + t*(lc*B) = 1 over GF(p)
  ZpPoly r0 = A, r1 = Blc, s0 = {1}, s1 = {}, t0 = {}, t1 = {1};
  while (!r1.empty()) {
    ZpPoly q, rr;
    zp_divrem(r0, r1, p, q, rr);
    r0 = std::move(r1);
    r1 = std::move(rr);
    ZpPoly s2 = zp_sub(s0, zp_mul(q, s1, p), p);
    s0 = std::move(s1);
    s1 = std::move(s2);
    ZpPoly t2 = zp_sub(t0, zp_mul(q, t1, p), p);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  std::int64_t inv = zp_inv(r0.back(), p);
  for (auto& c : s0) c = (std::int64_t)((__int128)c * inv % p);
  for (auto& c : t0) c = (std::int64_t)((__int128)c * inv % p);

  ZVec f = z_reduce(target, pk);
  ZVec g = zp_to_z(A), h = zp_to_z(Blc), s = zp_to_z(s0), t = zp_to_z(t0);
  Int m = p;
  while (m < pk) {
    Int m2 = m * m;
    if (m2 > pk) m2 = pk;
    hensel_step(f, g, h, s, t, m2);
    m = m2;
  }
  hensel_tree(g, std::move(ma), p, pk, out);
  hensel_tree(h, std::move(mb), p, pk, out);
}

// primitive integer coefficients of a rational poly (positive lc)
inline ZVec to_primitive_int(const Poly<Rat>& p) {
  Int lcm = 1;
  for (int i = 0; i <= p.degree(); ++i) {
    Int den = p[i].get_den();
    Int g;
    mpz_gcd(g.get_mpz_t(), lcm.get_mpz_t(), den.get_mpz_t());
    lcm = lcm / g * den;
  }
  ZVec v((size_t)p.degree() + 1);
  for (int i = 0; i <= p.degree(); ++i) {
    Rat c = p[i] * Rat(lcm);
    v[(size_t)i] = c.get_num();
  }
  Int content = 0;
  for (auto& c : v) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.get_mpz_t());
  if (content > 1)
    for (auto& c : v) c /= content;
  if (v.back() < 0)
    for (auto& c : v) c = -c;
  return v;
}

}  // namespace detail

// Gcd over Q[x] via a primitive pseudo-remainder sequence over Z.  Plain
// fraction Euclid suffers severe coefficient blowup on inputs of moderate
// degree; clearing denominators and stripping integer content after every
// pseudo-division keeps coefficient sizes near-linear in the input size.
// Lives outside `detail` so it overloads the generic fraction-field gcd.
inline Poly<Rat> poly_gcd(const Poly<Rat>& a0, const Poly<Rat>& b0) {
  using detail::ZVec;
  using detail::to_primitive_int;
  using detail::z_trim;
  if (a0.is_zero_poly()) return b0.is_zero_poly() ? b0 : b0.monic();
  if (b0.is_zero_poly()) return a0.monic();
  ZVec A = to_primitive_int(a0);
  ZVec B = to_primitive_int(b0);
  if (A.size() < B.size()) std::swap(A, B);
  auto primitive = [](ZVec& v) {
    Int g = 0;
    for (auto& c : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g > 1)
      for (auto& c : v) c /= g;
  };
  // pseudo-remainder: A scaled by powers of lc(B) so the division stays in Z
  auto prem = [](ZVec A, const ZVec& B) {
    int db = (int)B.size() - 1;
    const Int& lb = B.back();
    while ((int)A.size() - 1 >= db) {
      Int lr = A.back();
      A.pop_back();
      for (auto& c : A) c *= lb;
      int off = (int)A.size() - db;
      for (int i = 0; i < db; ++i) A[(size_t)(off + i)] -= lr * B[(size_t)i];
      z_trim(A);
      if (A.empty()) break;
    }
    return A;
  };
  while (B.size() > 1) {
    ZVec R = prem(A, B);
    primitive(R);
    A = std::move(B);
    B = std::move(R);
  }
  if (!B.empty()) return Poly<Rat>(Rat(1));  // constant remainder: coprime
  Poly<Rat> g;
  for (size_t i = 0; i < A.size(); ++i) g.set_coeff((int)i, Rat(A[i]));
  return g.monic();
}

namespace detail {

// Zassenhaus: factor a squarefree primitive integer polynomial into
// primitive irreducible integer polynomials.
inline std::vector<ZVec> factor_squarefree_int(const ZVec& P) {
  int n = (int)P.size() - 1;
  if (n <= 1) return {P};
  static const std::int64_t primes[] = {
      101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
      179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257,
      263, 269, 271, 277, 281, 283, 293, 307, 311, 313, 317, 331, 337, 347, 349,
      353, 359, 367, 373, 379, 383, 389, 397, 401, 409, 419, 421, 431, 433, 439};
  std::int64_t p = 0;
  ZpPoly fp;
  std::vector<ZpPoly> modular;
  size_t best = SIZE_MAX;
  // try a few usable primes, keep the one with fewest modular factors
  int tried = 0;
  for (std::int64_t cand : primes) {
    if (mpz_divisible_ui_p(P.back().get_mpz_t(), (unsigned long)cand)) continue;
    ZpPoly f(P.size());
    for (size_t i = 0; i < P.size(); ++i) {
      Int r = P[i] % cand;
      if (r < 0) r += cand;
      f[i] = r.get_si();
    }
    zp_trim(f);
    if (zp_deg(zp_gcd(f, zp_deriv(f, cand), cand)) != 0) continue;
    std::int64_t lcinv = zp_inv(f.back(), cand);
    for (auto& c : f) c = (std::int64_t)((__int128)c * lcinv % cand);
    auto factors = zp_factor_squarefree(f, cand);
    if (factors.size() < best) {
      best = factors.size();
      p = cand;
      fp = f;
      modular = std::move(factors);
    }
    if (++tried >= 3 || best == 1) break;
  }
  if (p == 0) throw std::runtime_error("no suitable prime for factorization");
  if (modular.size() == 1) return {P};

  // Landau-Mignotte style bound: |coef of factor| <= 2^n * ||P||_2 * |lc|
  Int norm2 = 0;
  for (auto& c : P) norm2 += c * c;
  Int bound = sqrt(norm2) + 1;
  bound <<= (unsigned)n;
  bound *= abs(P.back());
  Int pk = p;
  while (pk <= 2 * bound) pk *= p;

  std::vector<ZVec> lifted;
  hensel_tree(z_reduce(P, pk), modular, p, pk, lifted);

  // subset recombination with trial division over Z
  std::vector<ZVec> result;
  ZVec rem = P;
  std::vector<int> alive(lifted.size(), 1);
  int r = (int)lifted.size();
  auto symrep = [&](Int c) {
    c = ((c % pk) + pk) % pk;
    if (2 * c > pk) c -= pk;
    return c;
  };
  auto try_divide = [&](const ZVec& cand, ZVec& quot) {
    if (cand.empty() || cand.size() > rem.size()) return false;
    ZVec a = rem;
    quot.assign(a.size() - cand.size() + 1, Int(0));
    while (a.size() >= cand.size() && !a.empty()) {
      Int q0, rr;
      mpz_tdiv_qr(q0.get_mpz_t(), rr.get_mpz_t(), a.back().get_mpz_t(),
                  cand.back().get_mpz_t());
      if (rr != 0) return false;
      size_t shift = a.size() - cand.size();
      quot[shift] = q0;
      for (size_t i = 0; i < cand.size(); ++i) a[i + shift] -= q0 * cand[i];
      z_trim(a);
      if (!a.empty() && a.size() < cand.size()) return false;
    }
    return a.empty();
  };
  for (int sz = 1; 2 * sz <= r; ++sz) {
    bool restart = true;
    while (restart) {
      restart = false;
      std::vector<int> idx;
      for (size_t i = 0; i < lifted.size(); ++i)
        if (alive[i]) idx.push_back((int)i);
      if ((int)idx.size() < sz) break;
      std::vector<int> comb((size_t)sz);
      for (int i = 0; i < sz; ++i) comb[(size_t)i] = i;
      while (true) {
        ZVec cand = {rem.back() % pk};
        for (int i = 0; i < sz; ++i)
          cand = z_mul(cand, lifted[(size_t)idx[(size_t)comb[(size_t)i]]], pk);
        for (auto& c : cand) c = symrep(c);
        z_trim(cand);
        Int content = 0;
        for (auto& c : cand)
          mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.get_mpz_t());
        if (content > 1)
          for (auto& c : cand) c /= content;
        if (!cand.empty() && cand.back() < 0)
          for (auto& c : cand) c = -c;
        ZVec quot;
        if (try_divide(cand, quot)) {
          result.push_back(cand);
          rem = quot;
          z_trim(rem);
          for (int i = 0; i < sz; ++i) alive[(size_t)idx[(size_t)comb[(size_t)i]]] = 0;
          r -= sz;
          restart = true;
          break;
        }
        int i = sz - 1;
        while (i >= 0 && comb[(size_t)i] == (int)idx.size() - sz + i) --i;
        if (i < 0) break;
        ++comb[(size_t)i];
        for (int j = i + 1; j < sz; ++j) comb[(size_t)j] = comb[(size_t)j - 1] + 1;
      }
    }
    if (2 * sz > r) break;
  }
  if ((int)rem.size() - 1 > 0) result.push_back(rem);
  return result;
}

}  // namespace detail

// Factorization over Q: a = lc * prod f_i^{m_i}, f_i monic irreducible.
struct QFactorization {
  Rat lc;
  std::vector<std::pair<Poly<Rat>, int>> factors;
};

inline QFactorization factor_over_q(const Poly<Rat>& a) {
  if (a.is_zero_poly()) throw std::domain_error("factor of zero polynomial");
  QFactorization out;
  out.lc = a.leading();
  auto sqf = squarefree_decomposition(a);
  for (auto& [part, mult] : sqf) {
    detail::ZVec P = detail::to_primitive_int(part);
    for (auto& f : detail::factor_squarefree_int(P)) {
      std::vector<Rat> c(f.size());
      for (size_t i = 0; i < f.size(); ++i) c[i] = Rat(f[i]);
      out.factors.emplace_back(Poly<Rat>{std::move(c)}.monic(), mult);
    }
  }
  std::sort(out.factors.begin(), out.factors.end(), [](const auto& x, const auto& y) {
    if (x.first.degree() != y.first.degree())
      return x.first.degree() < y.first.degree();
    for (int i = x.first.degree(); i >= 0; --i)
      if (x.first[i] != y.first[i]) return x.first[i] < y.first[i];
    return x.second < y.second;
  });
  return out;
}

}  // namespace finterm
