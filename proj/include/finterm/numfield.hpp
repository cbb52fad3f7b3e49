#pragma once

// Algebraic number fields Q(gamma) in absolute representation: a monic
// irreducible minimal polynomial over Q and coordinate vectors in the
// power basis. The constants field grows dynamically: adjoin_root builds
// a child field with the parent generator embedded, so elements of
// ancestor fields lift transparently.

#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "finterm/intfactor.hpp"
#include "finterm/poly.hpp"
#include "finterm/rational.hpp"

namespace finterm {

struct NumberField {
  Poly<Rat> minpoly;  // monic irreducible over Q, degree >= 2
  std::shared_ptr<const NumberField> parent;  // null = Q
  std::vector<Rat> parent_gen;  // coords of parent generator here (empty if parent null)
  int depth = 0;

  int degree() const { return minpoly.degree(); }
  std::string id() const {
    std::ostringstream os;
    for (int i = minpoly.degree(); i >= 0; --i) os << minpoly[i].get_str() << (i ? "," : "");
    return os.str();
  }
};

using FieldPtr = std::shared_ptr<const NumberField>;

inline bool same_field(const FieldPtr& a, const FieldPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->minpoly == b->minpoly;
}

// True if anc appears in f's parent chain (or equals f, or is Q).
inline bool is_ancestor(const FieldPtr& anc, const FieldPtr& f) {
  if (!anc) return true;
  for (FieldPtr cur = f; cur; cur = cur->parent)
    if (same_field(anc, cur)) return true;
  return false;
}

class AlgNum {
 public:
  AlgNum() : co_{Rat(0)} {}
  /*implicit*/ AlgNum(Rat r) : co_{std::move(r)} {}
  AlgNum(FieldPtr f, std::vector<Rat> co) : field_(std::move(f)), co_(std::move(co)) {
    if (field_) {
      if ((int)co_.size() > field_->degree())
        throw std::invalid_argument("coordinate vector longer than field degree");
      co_.resize((size_t)field_->degree(), Rat(0));
    } else if (co_.size() != 1) {
      throw std::invalid_argument("rational element needs one coordinate");
    }
  }
  static AlgNum generator(const FieldPtr& f) {
    if (!f) throw std::invalid_argument("Q has no generator");
    std::vector<Rat> co((size_t)f->degree(), Rat(0));
    co[1] = 1;
    return AlgNum(f, std::move(co));
  }

  const FieldPtr& field() const { return field_; }
  const std::vector<Rat>& coords() const { return co_; }

  bool is_rational() const {
    for (size_t i = 1; i < co_.size(); ++i)
      if (sgn(co_[i]) != 0) return false;
    return true;
  }
  Rat rational_value() const {
    if (!is_rational()) throw std::domain_error("not a rational number");
    return co_[0];
  }

  // coordinates as a polynomial in the generator
  Poly<Rat> as_poly() const { return Poly<Rat>(co_); }

  friend bool is_zero(const AlgNum& a) {
    for (auto& c : a.co_)
      if (sgn(c) != 0) return false;
    return true;
  }
  friend bool is_one(const AlgNum& a) {
    if (!is_one(a.co_[0])) return false;
    for (size_t i = 1; i < a.co_.size(); ++i)
      if (sgn(a.co_[i]) != 0) return false;
    return true;
  }
  friend AlgNum one_like(const AlgNum& a) {
    AlgNum r;
    r.field_ = a.field_;
    r.co_.assign(a.co_.size(), Rat(0));
    r.co_[0] = 1;
    return r;
  }
  friend AlgNum zero_like(const AlgNum& a) {
    AlgNum r;
    r.field_ = a.field_;
    r.co_.assign(a.co_.size(), Rat(0));
    return r;
  }

  friend AlgNum operator+(const AlgNum& x, const AlgNum& y) {
    auto [a, b] = align(x, y);
    for (size_t i = 0; i < a.co_.size(); ++i) a.co_[i] += b.co_[i];
    return a;
  }
  friend AlgNum operator-(const AlgNum& x, const AlgNum& y) {
    auto [a, b] = align(x, y);
    for (size_t i = 0; i < a.co_.size(); ++i) a.co_[i] -= b.co_[i];
    return a;
  }
  AlgNum operator-() const {
    AlgNum r = *this;
    for (auto& c : r.co_) c = -c;
    return r;
  }
  friend AlgNum operator*(const AlgNum& x, const AlgNum& y) {
    auto [a, b] = align(x, y);
    if (!a.field_) return AlgNum(a.co_[0] * b.co_[0]);
    Poly<Rat> p = a.as_poly() * b.as_poly();
    p = p % a.field_->minpoly;
    std::vector<Rat> co((size_t)a.field_->degree(), Rat(0));
    for (int i = 0; i <= p.degree(); ++i) co[(size_t)i] = p[i];
    return AlgNum(a.field_, std::move(co));
  }
  friend AlgNum operator/(const AlgNum& x, const AlgNum& y) {
    if (is_zero(y)) throw std::domain_error("division by zero algebraic number");
    auto [a, b] = align(x, y);
    if (!a.field_) return AlgNum(a.co_[0] / b.co_[0]);
    // inverse of b modulo the minimal polynomial
    auto x_ = poly_xgcd(b.as_poly(), a.field_->minpoly);
    if (x_.g.degree() != 0)
      throw std::domain_error("zero divisor: minimal polynomial not irreducible");
    Poly<Rat> inv = x_.s;  // s*b = g = 1 (monic deg 0) mod minpoly
    Poly<Rat> p = (a.as_poly() * inv) % a.field_->minpoly;
    std::vector<Rat> co((size_t)a.field_->degree(), Rat(0));
    for (int i = 0; i <= p.degree(); ++i) co[(size_t)i] = p[i];
    return AlgNum(a.field_, std::move(co));
  }
  friend bool operator==(const AlgNum& x, const AlgNum& y) {
    auto [a, b] = align(x, y);
    return a.co_ == b.co_;
  }
  friend bool operator!=(const AlgNum& x, const AlgNum& y) { return !(x == y); }

  // deterministic total order (degree of field, then coords lexicographic)
  friend bool lex_less(const AlgNum& x, const AlgNum& y) {
    auto [a, b] = align(x, y);
    for (size_t i = a.co_.size(); i-- > 0;) {
      if (a.co_[i] != b.co_[i]) return a.co_[i] < b.co_[i];
    }
    return false;
  }

  // Express this element in the (descendant) field f.
  AlgNum lifted_to(const FieldPtr& f) const {
    if (same_field(field_, f)) return field_ ? AlgNum(f, co_) : *this;
    if (!field_) return widen(f);
    if (!is_ancestor(field_, f))
      throw std::domain_error("mismatched ambient number fields");
    return eval_in(f);
  }

 private:
  AlgNum eval_in(const FieldPtr& f) const {
    // embedded generator of field_ inside f, by composing parent_gen maps
    // from field_ up to f
    std::vector<FieldPtr> chain;  // f = chain[0], ..., chain[last] child of field_
    for (FieldPtr cur = f; cur && !same_field(cur, field_); cur = cur->parent)
      chain.push_back(cur);
    AlgNum g = AlgNum(chain.back(), chain.back()->parent_gen);  // gen of field_ in child
    for (size_t i = chain.size() - 1; i-- > 0;) {
      // re-express g (element of chain[i+1]) inside chain[i]
      AlgNum pg(chain[i], chain[i]->parent_gen);
      g = AlgNum::horner(g.as_poly(), pg, chain[i]);
    }
    return AlgNum::horner(as_poly(), g, f);
  }

  static AlgNum horner(const Poly<Rat>& p, const AlgNum& x, const FieldPtr& f) {
    AlgNum acc = zero_like(x);
    for (int i = p.degree(); i >= 0; --i) acc = acc * x + AlgNum(p[i]).widen(f);
    return acc;
  }
  AlgNum widen(const FieldPtr& f) const {
    if (field_) return *this;
    std::vector<Rat> co((size_t)f->degree(), Rat(0));
    co[0] = co_[0];
    return AlgNum(f, std::move(co));
  }

  static std::pair<AlgNum, AlgNum> align(const AlgNum& x, const AlgNum& y) {
    if (same_field(x.field_, y.field_)) return {x, y};
    if (!x.field_) return {x.widen(y.field_), y};
    if (!y.field_) return {x, y.widen(x.field_)};
    if (is_ancestor(x.field_, y.field_)) return {x.eval_in(y.field_), y};
    if (is_ancestor(y.field_, x.field_)) return {x, y.eval_in(x.field_)};
    throw std::domain_error("mismatched ambient number fields");
  }

  FieldPtr field_;        // null = Q
  std::vector<Rat> co_;   // length = field degree (or 1 for Q)
};

// When every coefficient is rational, route the gcd through the integer
// primitive-remainder-sequence path instead of fraction Euclid.
inline Poly<AlgNum> poly_gcd(const Poly<AlgNum>& a, const Poly<AlgNum>& b) {
  bool all_rat = true;
  for (int i = 0; i <= a.degree() && all_rat; ++i) all_rat = a[i].is_rational();
  for (int i = 0; i <= b.degree() && all_rat; ++i) all_rat = b[i].is_rational();
  if (all_rat) {
    Poly<Rat> ra, rb;
    for (int i = 0; i <= a.degree(); ++i) ra.set_coeff(i, a[i].rational_value());
    for (int i = 0; i <= b.degree(); ++i) rb.set_coeff(i, b[i].rational_value());
    Poly<Rat> g = poly_gcd(ra, rb);
    Poly<AlgNum> out;
    for (int i = 0; i <= g.degree(); ++i) out.set_coeff(i, AlgNum(g[i]));
    return out;
  }
  return poly_gcd<AlgNum>(a, b);
}

// trace of a over Q (sum of conjugates), via Newton power sums
inline Rat field_trace(const AlgNum& a) {
  if (!a.field()) return a.coords()[0];
  const Poly<Rat>& m = a.field()->minpoly;
  int d = m.degree();
  std::vector<Rat> ps((size_t)d);  // power sums p_0..p_{d-1}
  ps[0] = d;
  for (int k = 1; k < d; ++k) {
    // p_k = -k*m_{d-k} - sum_{i=1}^{k-1} m_{d-i} p_{k-i}   (m monic)
    Rat s = Rat(-k) * m[d - k];
    for (int i = 1; i < k; ++i) s -= m[d - i] * ps[(size_t)(k - i)];
    ps[(size_t)k] = s;
  }
  Rat t = 0;
  for (int i = 0; i < d; ++i) t += a.coords()[(size_t)i] * ps[(size_t)i];
  return t;
}

// ---- factorization over a number field (Trager) ----

struct FieldFactor {
  Poly<AlgNum> factor;   // monic irreducible over F
  Poly<Rat> norm_irred;  // irreducible over Q; minpoly of (root - shift*gamma)
  long shift = 0;
};

namespace detail {

inline Poly<Rat> lagrange_interpolate(const std::vector<Rat>& xs,
                                      const std::vector<Rat>& ys) {
  Poly<Rat> acc;
  for (size_t i = 0; i < xs.size(); ++i) {
    Poly<Rat> num(Rat(1));
    Rat den = 1;
    for (size_t j = 0; j < xs.size(); ++j) {
      if (i == j) continue;
      num = num * Poly<Rat>(std::vector<Rat>{-xs[j], Rat(1)});
      den *= xs[i] - xs[j];
    }
    acc = acc + (ys[i] / den) * num;
  }
  return acc;
}

// Norm of p(X - s*gamma) from F[X] to Q[X], by evaluation/interpolation of
// Res_Y(m(Y), p(x0 - s*Y)) at integer points x0.
inline Poly<Rat> norm_shifted(const FieldPtr& F, const Poly<AlgNum>& p, long s) {
  const Poly<Rat>& m = F->minpoly;
  int d = m.degree(), n = p.degree();
  int npts = d * n + 1;
  std::vector<Rat> xs, ys;
  xs.reserve((size_t)npts);
  ys.reserve((size_t)npts);
  long x0 = 0;
  while ((int)xs.size() < npts) {
    // q(Y) = p(x0 - s*Y) with gamma -> Y : coefficients rational polys in Y
    Poly<Rat> q;
    Poly<Rat> lin(std::vector<Rat>{Rat(x0), Rat(-s)});  // x0 - s*Y
    for (int i = n; i >= 0; --i) {
      Poly<Rat> ci = p[i].field() ? p[i].as_poly() : Poly<Rat>(p[i].coords()[0]);
      q = q * lin + ci;
    }
    if (!q.is_zero_poly()) {
      xs.push_back(Rat(x0));
      ys.push_back(q.degree() == 0 ? [&] {
        Rat c = q[0], acc = 1;
        for (int i = 0; i < m.degree(); ++i) acc *= c;
        return acc;
      }()
                                   : resultant(m, q));
    } else {
      xs.push_back(Rat(x0));
      ys.push_back(Rat(0));
    }
    ++x0;
  }
  return lagrange_interpolate(xs, ys);
}

}  // namespace detail

// Factor a squarefree monic polynomial over the number field F (null = Q)
// into monic irreducible factors.
inline std::vector<FieldFactor> factor_squarefree_over_field(const FieldPtr& F,
                                                             const Poly<AlgNum>& p0) {
  Poly<AlgNum> p = p0.monic();
  std::vector<FieldFactor> out;
  if (!F) {
    std::vector<Rat> rc((size_t)p.degree() + 1);
    for (int i = 0; i <= p.degree(); ++i) rc[(size_t)i] = p[i].rational_value();
    auto fq = factor_over_q(Poly<Rat>(rc));
    for (auto& [f, mult] : fq.factors) {
      (void)mult;  // squarefree input
      std::vector<AlgNum> ac((size_t)f.degree() + 1);
      for (int i = 0; i <= f.degree(); ++i) ac[(size_t)i] = AlgNum(f[i]);
      out.push_back({Poly<AlgNum>(std::move(ac)), f, 0});
    }
    return out;
  }
  for (long s = 0;; ++s) {
    Poly<Rat> N = detail::norm_shifted(F, p, s);
    if (N.degree() != F->degree() * p.degree()) continue;
    N = N.monic();
    if (poly_gcd(N, N.derivative()).degree() != 0) continue;  // not squarefree
    auto fq = factor_over_q(N);
    AlgNum gamma = AlgNum::generator(F);
    for (auto& [Ni, mult] : fq.factors) {
      (void)mult;
      // factor of p over F: gcd(p, Ni(X + s*gamma))
      Poly<AlgNum> comp;
      Poly<AlgNum> lin(std::vector<AlgNum>{AlgNum(Rat(s)) * gamma, one_like(gamma)});
      for (int i = Ni.degree(); i >= 0; --i)
        comp = comp * lin + Poly<AlgNum>(AlgNum(Ni[i]) + zero_like(gamma));
      Poly<AlgNum> g = poly_gcd(p, comp);
      if (g.degree() > 0) out.push_back({g, Ni, s});
    }
    // sanity: degrees must add up
    int total = 0;
    for (auto& f : out) total += f.factor.degree();
    if (total == p.degree()) return out;
    out.clear();  // bad shift (repeated norm roots across factors); retry
  }
}

struct AdjoinResult {
  FieldPtr field;   // possibly the input field
  AlgNum root;      // designated root of the chosen irreducible factor
  Poly<AlgNum> chosen;  // the factor, over the input field
};

// Adjoin a root of minpoly (over constants field F) to F. The minpoly must
// be squarefree and non-constant; the irreducible factor is chosen
// deterministically (lowest degree, then lexicographic on coefficients).
inline AdjoinResult adjoin_root(const FieldPtr& F, const Poly<AlgNum>& minpoly) {
  if (minpoly.degree() < 1)
    throw std::domain_error("adjoin_root: constant or zero polynomial");
  Poly<AlgNum> p = minpoly.monic();
  {
    Poly<AlgNum> d = p.derivative();
    if (poly_gcd(p, d).degree() != 0)
      throw std::domain_error("adjoin_root: polynomial not squarefree");
  }
  auto factors = factor_squarefree_over_field(F, p);
  // deterministic choice
  const FieldFactor* best = &factors[0];
  for (auto& f : factors) {
    if (f.factor.degree() < best->factor.degree()) best = &f;
    else if (f.factor.degree() == best->factor.degree()) {
      for (int i = f.factor.degree(); i >= 0; --i) {
        if (f.factor[i] != best->factor[i]) {
          if (lex_less(f.factor[i], best->factor[i])) best = &f;
          break;
        }
      }
    }
  }
  if (best->factor.degree() == 1) {
    AlgNum root = -best->factor[0];
    return {F, root, best->factor};
  }
  if (!F) {
    auto nf = std::make_shared<NumberField>();
    nf->minpoly = best->norm_irred.monic();
    nf->parent = nullptr;
    nf->depth = 1;
    FieldPtr fp = nf;
    return {fp, AlgNum::generator(fp), best->factor};
  }
  // new absolute field: minpoly of delta = root - s*gamma is norm_irred
  auto nf = std::make_shared<NumberField>();
  nf->minpoly = best->norm_irred.monic();
  nf->parent = F;
  nf->depth = F->depth + 1;
  // embed gamma: gamma is the unique common root in F' of m(X) and
  // q*(X) := q written with gamma -> X and argument delta + s*X
  FieldPtr fp = nf;
  AlgNum delta = AlgNum::generator(fp);
  long s = best->shift;
  Poly<AlgNum> qstar;
  {
    // q = sum_j q_j gamma-poly; build sum_j q_j(X) * (delta + s X)^j
    Poly<AlgNum> X = Poly<AlgNum>(std::vector<AlgNum>{zero_like(delta), one_like(delta)});
    Poly<AlgNum> arg(std::vector<AlgNum>{delta, AlgNum(Rat(s)) + zero_like(delta)});
    Poly<AlgNum> argpow(one_like(delta));
    for (int j = 0; j <= best->factor.degree(); ++j) {
      Poly<Rat> cj = best->factor[j].field() ? best->factor[j].as_poly()
                                             : Poly<Rat>(best->factor[j].coords()[0]);
      Poly<AlgNum> cjx;
      for (int i = cj.degree(); i >= 0; --i)
        cjx = cjx * X + Poly<AlgNum>(AlgNum(cj[i]) + zero_like(delta));
      qstar = qstar + cjx * argpow;
      argpow = argpow * arg;
    }
  }
  Poly<AlgNum> mlift;
  for (int i = F->minpoly.degree(); i >= 0; --i)
    mlift = mlift * Poly<AlgNum>(std::vector<AlgNum>{zero_like(delta), one_like(delta)}) +
            Poly<AlgNum>(AlgNum(F->minpoly[i]) + zero_like(delta));
  Poly<AlgNum> G = poly_gcd(mlift, qstar);
  if (G.degree() != 1)
    throw std::runtime_error("adjoin_root: generator embedding not unique");
  AlgNum gamma_new = -G[0] / G[1];
  nf->parent_gen = gamma_new.coords();
  AlgNum root = delta + AlgNum(Rat(s)) * gamma_new;
  return {fp, root, best->factor};
}

// serialization of an algebraic number: "p/q" for rationals, otherwise
// {"field": minpoly string, "coords": [...]} handled in io.hpp
inline std::string minpoly_key(const FieldPtr& f) { return f ? f->id() : "x"; }

}  // namespace finterm
