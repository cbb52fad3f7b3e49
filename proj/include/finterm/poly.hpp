#pragma once

// Dense univariate polynomials over an abstract coefficient field.
//
// The coefficient type K must provide +, -, *, /, ==, unary -, a
// default constructor giving zero, and the free functions is_zero,
// is_one, one_like, zero_like (found by unqualified lookup from this
// namespace). All fields here have characteristic zero.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "finterm/rational.hpp"

namespace finterm {

template <class K>
class Poly {
 public:
  Poly() = default;
  explicit Poly(K c) {
    if (!is_zero(c)) coeffs_.push_back(std::move(c));
  }
  explicit Poly(std::vector<K> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  static Poly zero() { return Poly(); }
  // Monomial c * X^n.
  static Poly monomial(K c, int n) {
    if (is_zero(c)) return Poly();
    std::vector<K> v(static_cast<std::size_t>(n) + 1);
    v.back() = std::move(c);
    return Poly(std::move(v));
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero_poly() const { return coeffs_.empty(); }
  bool is_constant() const { return coeffs_.size() <= 1; }

  const K& operator[](int i) const {
    static const K kzero{};
    if (i < 0 || i > degree()) return kzero;
    return coeffs_[static_cast<std::size_t>(i)];
  }
  const K& leading() const {
    if (coeffs_.empty()) throw std::logic_error("leading of zero polynomial");
    return coeffs_.back();
  }
  const std::vector<K>& coeffs() const { return coeffs_; }

  void set_coeff(int i, K c) {
    if (i >= static_cast<int>(coeffs_.size())) coeffs_.resize(i + 1);
    coeffs_[static_cast<std::size_t>(i)] = std::move(c);
    trim();
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<K> v(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[(int)i] + b[(int)i];
    return Poly(std::move(v));
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    std::vector<K> v(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[(int)i] - b[(int)i];
    return Poly(std::move(v));
  }
  Poly operator-() const {
    std::vector<K> v(coeffs_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = -coeffs_[i];
    return Poly(std::move(v));
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero_poly() || b.is_zero_poly()) return Poly();
    std::vector<K> v(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
        v[i + j] = v[i + j] + a.coeffs_[i] * b.coeffs_[j];
    return Poly(std::move(v));
  }
  friend Poly operator*(const K& c, const Poly& a) {
    if (is_zero(c)) return Poly();
    std::vector<K> v(a.coeffs_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * a.coeffs_[i];
    return Poly(std::move(v));
  }
  friend Poly operator/(const Poly& a, const K& c) {
    std::vector<K> v(a.coeffs_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.coeffs_[i] / c;
    return Poly(std::move(v));
  }
  friend bool operator==(const Poly& a, const Poly& b) {
    if (a.coeffs_.size() != b.coeffs_.size()) return false;
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      if (!(a.coeffs_[i] == b.coeffs_[i])) return false;
    return true;
  }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  K eval(const K& x) const {
    if (coeffs_.empty()) return K{};
    K acc = coeffs_.back();
    for (int i = degree() - 1; i >= 0; --i) acc = acc * x + coeffs_[(std::size_t)i];
    return acc;
  }

  // Evaluation in any ring R accepting R * R, R + (coefficients mapped via f).
  template <class R, class F>
  R eval_mapped(const R& x, F&& f) const {
    R acc = f(K{});
    for (int i = degree(); i >= 0; --i) acc = acc * x + f((*this)[i]);
    return acc;
  }

  // Formal derivative (coefficients treated as constants).
  Poly derivative() const {
    if (coeffs_.size() <= 1) return Poly();
    std::vector<K> v(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) {
      K n = one_like(coeffs_[i]);
      K m = n;  // m = i as a field element
      for (std::size_t j = 1; j < i; ++j) m = m + n;
      v[i - 1] = m * coeffs_[i];
    }
    return Poly(std::move(v));
  }

  Poly monic() const {
    if (is_zero_poly()) return *this;
    return *this / leading();
  }

  // p(X + a), exact Taylor shift via Horner.
  Poly shifted(const K& a) const {
    Poly res;
    Poly lin(std::vector<K>{a, one_like(a)});
    for (int i = degree(); i >= 0; --i) res = res * lin + Poly((*this)[i]);
    return res;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && is_zero(coeffs_.back())) coeffs_.pop_back();
  }
  std::vector<K> coeffs_;
};

template <class K>
bool is_zero(const Poly<K>& p) { return p.is_zero_poly(); }

template <class K>
std::pair<Poly<K>, Poly<K>> divrem(const Poly<K>& a, const Poly<K>& b) {
  if (b.is_zero_poly()) throw std::domain_error("polynomial division by zero");
  Poly<K> q, r = a;
  const K& lc = b.leading();
  while (!r.is_zero_poly() && r.degree() >= b.degree()) {
    K c = r.leading() / lc;
    int d = r.degree() - b.degree();
    Poly<K> t = Poly<K>::monomial(c, d);
    q = q + t;
    r = r - t * b;
  }
  return {q, r};
}

template <class K>
Poly<K> operator/(const Poly<K>& a, const Poly<K>& b) { return divrem(a, b).first; }
template <class K>
Poly<K> operator%(const Poly<K>& a, const Poly<K>& b) { return divrem(a, b).second; }

// Monic gcd; gcd(a, 0) = monic(a).
template <class K>
Poly<K> poly_gcd(Poly<K> a, Poly<K> b) {
  while (!b.is_zero_poly()) {
    Poly<K> r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

// g = gcd(a,b) monic, with s*a + t*b = g.
template <class K>
struct XgcdResult {
  Poly<K> g, s, t;
};

template <class K>
XgcdResult<K> poly_xgcd(const Poly<K>& a, const Poly<K>& b) {
  Poly<K> r0 = a, r1 = b;
  Poly<K> s0(K{}), s1(K{}), t0(K{}), t1(K{});
  if (!a.is_zero_poly()) s0 = Poly<K>(one_like(a.leading()));
  else if (!b.is_zero_poly()) s0 = Poly<K>(one_like(b.leading()));
  if (!b.is_zero_poly()) t1 = Poly<K>(one_like(b.leading()));
  else if (!a.is_zero_poly()) t1 = Poly<K>(one_like(a.leading()));
  while (!r1.is_zero_poly()) {
    auto [q, r] = divrem(r0, r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    Poly<K> s2 = s0 - q * s1;
    s0 = std::move(s1);
    s1 = std::move(s2);
    Poly<K> t2 = t0 - q * t1;
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.is_zero_poly()) return {r0, s0, t0};
  K lc = r0.leading();
  return {r0 / lc, s0 / lc, t0 / lc};
}

// Resultant via the Euclidean remainder sequence.
template <class K>
K resultant(Poly<K> a, Poly<K> b) {
  if (a.is_zero_poly() || b.is_zero_poly())
    throw std::domain_error("resultant of zero polynomial");
  K one = one_like(a.leading());
  K res = one;
  while (true) {
    if (b.degree() == 0) {
      // res(a, c) = c^deg(a)
      K c = b.leading(), acc = one;
      for (int i = 0; i < a.degree(); ++i) acc = acc * c;
      return res * acc;
    }
    Poly<K> r = a % b;
    if (r.is_zero_poly()) {
      if (b.degree() > 0) return K{};  // common factor
      return res;
    }
    // res(a,b) = (-1)^(deg a * deg b) * lc(b)^(deg a - deg r) * res(b, r)
    K lcpow = one;
    for (int i = 0; i < a.degree() - r.degree(); ++i) lcpow = lcpow * b.leading();
    if ((a.degree() & 1) && (b.degree() & 1)) lcpow = -lcpow;
    res = res * lcpow;
    a = std::move(b);
    b = std::move(r);
  }
}

// Yun's squarefree decomposition: a = lc * prod f_i^{m_i}, factors monic,
// squarefree, pairwise coprime, multiplicities strictly increasing.
template <class K>
std::vector<std::pair<Poly<K>, int>> squarefree_decomposition(const Poly<K>& a) {
  if (a.is_zero_poly()) throw std::domain_error("squarefree decomposition of zero");
  std::vector<std::pair<Poly<K>, int>> out;
  Poly<K> p = a.monic();
  if (p.degree() == 0) return out;
  Poly<K> dp = p.derivative();
  Poly<K> g = poly_gcd(p, dp);
  Poly<K> w = p / g;
  Poly<K> y = dp / g;
  Poly<K> z = y - w.derivative();
  int m = 1;
  while (!z.is_zero_poly()) {
    Poly<K> f = poly_gcd(w, z);
    if (f.degree() > 0) out.emplace_back(f, m);
    w = w / f;
    y = z / f;
    z = y - w.derivative();
    ++m;
  }
  if (w.degree() > 0) out.emplace_back(w, m);
  return out;
}

template <class K>
Poly<K> poly_pow(const Poly<K>& a, int n) {
  Poly<K> res(one_like(a.is_zero_poly() ? K{} : a.leading()));
  for (int i = 0; i < n; ++i) res = res * a;
  return res;
}

// n as an element of the coefficient field (characteristic zero).
template <class K>
K k_int(long n, const K& like) {
  K one = one_like(like);
  K acc{};
  long m = n < 0 ? -n : n;
  for (long i = 0; i < m; ++i) acc = acc + one;
  return n < 0 ? -acc : acc;
}

// Unique polynomial of degree < n through n points with distinct abscissae.
template <class K>
Poly<K> poly_interpolate(const std::vector<K>& xs, const std::vector<K>& ys) {
  Poly<K> acc;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Poly<K> num(one_like(xs[i]));
    K den = one_like(xs[i]);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (i == j) continue;
      num = num * Poly<K>(std::vector<K>{-xs[j], one_like(xs[j])});
      den = den * (xs[i] - xs[j]);
    }
    acc = acc + (ys[i] / den) * num;
  }
  return acc;
}

// Newton power sums p_0..p_{count-1} of the roots of a monic polynomial.
template <class K>
std::vector<K> poly_power_sums(const Poly<K>& q, int count) {
  int d = q.degree();
  if (d < 1) throw std::domain_error("power sums of a constant polynomial");
  K one = one_like(q.leading());
  std::vector<K> ps((std::size_t)count);
  if (count > 0) ps[0] = k_int(d, one);
  for (int k = 1; k < count; ++k) {
    K s{};
    if (k <= d) s = s - k_int(k, one) * q[d - k];
    for (int i = 1; i < k && i <= d; ++i) s = s - q[d - i] * ps[(std::size_t)(k - i)];
    ps[(std::size_t)k] = s;
  }
  return ps;
}

}  // namespace finterm
