#pragma once

// Rational functions num/den over an abstract coefficient field, kept in
// canonical form: den monic, gcd(num, den) = 1.

#include <stdexcept>
#include <utility>
#include <vector>

#include "finterm/poly.hpp"

namespace finterm {

template <class K>
class RatFunc {
 public:
  RatFunc() : num_(), den_(Poly<K>(one_like(K{}))) {}
  /*implicit*/ RatFunc(Poly<K> num) : num_(std::move(num)), den_(unit_den(num_)) {}
  RatFunc(Poly<K> num, Poly<K> den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero_poly()) throw std::domain_error("zero denominator");
    reduce();
  }

  const Poly<K>& num() const { return num_; }
  const Poly<K>& den() const { return den_; }
  bool is_zero_fn() const { return num_.is_zero_poly(); }
  bool is_poly() const { return den_.degree() == 0; }

  friend bool is_zero(const RatFunc& f) { return f.is_zero_fn(); }
  friend bool is_one(const RatFunc& f) {
    return f.num_.degree() == 0 && f.den_.degree() == 0 && !f.num_.is_zero_poly() &&
           is_one(f.num_.leading());
  }
  friend RatFunc one_like(const RatFunc& f) {
    return RatFunc(Poly<K>(one_like(f.den_.leading())));
  }
  friend RatFunc zero_like(const RatFunc& f) {
    (void)f;
    return RatFunc();
  }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  RatFunc operator-() const {
    RatFunc r = *this;
    r.num_ = -r.num_;
    return r;
  }
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero_fn()) throw std::domain_error("division by zero rational function");
    return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

  // formal derivative in the main variable (coefficients constant)
  RatFunc derivative() const {
    return RatFunc(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
  }

 private:
  static Poly<K> unit_den(const Poly<K>& n) {
    return Poly<K>(one_like(n.is_zero_poly() ? K{} : n.leading()));
  }
  void reduce() {
    if (num_.is_zero_poly()) {
      den_ = Poly<K>(one_like(den_.leading()));
      return;
    }
    if (num_.degree() > 0 && den_.degree() > 0) {
      Poly<K> g = poly_gcd(num_, den_);
      if (g.degree() > 0) {
        num_ = num_ / g;
        den_ = den_ / g;
      }
    }
    K lc = den_.leading();
    if (!is_one(lc)) {
      num_ = num_ / lc;
      den_ = den_ / lc;
    }
  }

  Poly<K> num_;
  Poly<K> den_;
};

// Partial fraction decomposition of f against pairwise coprime factors of
// its denominator: f = poly + sum_{i,j} a_ij / factor_i^j with
// deg(a_ij) < deg(factor_i).
template <class K>
struct PartialFractions {
  Poly<K> poly_part;
  // one entry per factor: list over j = 1..mult of numerators a_ij
  std::vector<std::vector<Poly<K>>> parts;
};

template <class K>
PartialFractions<K> partial_fractions(const RatFunc<K>& f,
                                      const std::vector<std::pair<Poly<K>, int>>& factors) {
  // validate the factorization of the denominator
  Poly<K> prod;
  if (!f.den().is_zero_poly()) prod = Poly<K>(one_like(f.den().leading()));
  for (auto& [p, m] : factors)
    for (int j = 0; j < m; ++j) prod = prod * p;
  if (prod.monic() != f.den().monic())
    throw std::domain_error("partial_fractions: factors do not multiply to denominator");
  for (size_t i = 0; i < factors.size(); ++i)
    for (size_t j = i + 1; j < factors.size(); ++j)
      if (poly_gcd(factors[i].first, factors[j].first).degree() > 0)
        throw std::domain_error("partial_fractions: factors not coprime");

  PartialFractions<K> out;
  auto [q, r] = divrem(f.num(), f.den());
  out.poly_part = q;
  Poly<K> rem = r;
  Poly<K> den = f.den();
  // peel one factor power at a time using Bezout
  for (auto& [p, m] : factors) {
    Poly<K> pm = poly_pow(p, m);
    Poly<K> rest = den / pm;
    // rem/den = a/pm + b/rest with a = rem * (rest^{-1} mod pm) mod pm
    Poly<K> a, b;
    if (rest.degree() == 0) {
      a = rem / rest.leading();
      b = Poly<K>();
    } else {
      auto x = poly_xgcd(rest, pm);  // s*rest + t*pm = 1
      a = (rem * x.s) % pm;
      b = (rem - a * rest) / pm;
    }
    // expand a / p^m into sum a_j / p^j, deg a_j < deg p
    std::vector<Poly<K>> numers((size_t)m);
    Poly<K> cur = a;
    for (int j = m; j >= 1; --j) {
      auto [qq, rr] = divrem(cur, p);
      numers[(size_t)j - 1] = rr;
      cur = qq;
    }
    // cur must be zero since deg a < deg p^m
    out.parts.push_back(std::move(numers));
    rem = b;
    den = rest;
  }
  return out;
}

// recombine (used by tests and callers needing exactness checks)
template <class K>
RatFunc<K> recombine(const PartialFractions<K>& pf,
                     const std::vector<std::pair<Poly<K>, int>>& factors) {
  RatFunc<K> acc(pf.poly_part);
  for (size_t i = 0; i < factors.size(); ++i) {
    Poly<K> acc_pow(one_like(factors[i].first.leading()));
    for (size_t j = 0; j < pf.parts[i].size(); ++j) {
      acc_pow = acc_pow * factors[i].first;
      if (!pf.parts[i][j].is_zero_poly())
        acc = acc + RatFunc<K>(pf.parts[i][j], acc_pow);
    }
  }
  return acc;
}

}  // namespace finterm
