#pragma once

// Differential field towers over Q-bar(x): a stack of simple extensions
// (logarithm, exponential, primitive, hyperexponential, algebraic, and the
// internal kinds used by the composite layers), with exact field arithmetic
// on tower elements and derivation induced level by level.
//
// Elements are recursive: a constant (algebraic number), or a rational
// function in the generator of some level whose coefficients live strictly
// below. Arithmetic collapses eagerly, so an element's level is the minimal
// level containing it; at algebraic levels elements are kept reduced modulo
// the minimal polynomial with denominator 1.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "finterm/numfield.hpp"
#include "finterm/poly.hpp"
#include "finterm/ratfunc.hpp"
#include "finterm/ratint.hpp"
#include "finterm/riccati.hpp"

namespace finterm {

class Tower;
using TowerPtr = std::shared_ptr<Tower>;

enum class LevelKind {
  Base,       // x' = 1
  Log,        // t' = a'/a
  Exp,        // t' = a' t
  Primitive,  // t' = a
  Hyperexp,   // t' = a t
  Algebraic,  // m(t) = 0, t' = -(sum m_i' t^i) / m'(t)
  Riccati,    // a' = -a^2 + r a + s, transcendental
  WeierTheta, // t' = generator of the next level
  WeierDeriv  // w^2 = alpha^2 (4 th^3 - g1 th - g0), w' = (a'/a) w + a^2(12 th^2 - g1)/2
};

class TowerElem {
 public:
  TowerElem() = default;  // the constant 0
  /*implicit*/ TowerElem(AlgNum c) : c_(std::move(c)) {}
  /*implicit*/ TowerElem(Rat r) : c_(AlgNum(std::move(r))) {}

  static TowerElem generator(TowerPtr tw, int level);
  // canonicalizing constructor from a representation at the given level
  static TowerElem make(const TowerPtr& tw, int level, RatFunc<TowerElem> rf);

  int level() const { return level_; }
  const TowerPtr& tower() const { return tw_; }
  bool is_constant() const { return level_ < 0; }
  const AlgNum& constant() const {
    if (level_ >= 0) throw std::domain_error("tower element is not a constant");
    return c_;
  }
  // representation num/den in the generator of level(); throws on constants
  const RatFunc<TowerElem>& parts() const {
    if (level_ < 0) throw std::domain_error("constant has no level representation");
    return *rf_;
  }

  TowerElem derivative() const;

  friend bool is_zero(const TowerElem& e) { return e.level_ < 0 && is_zero(e.c_); }
  friend bool is_one(const TowerElem& e) { return e.level_ < 0 && is_one(e.c_); }
  friend TowerElem one_like(const TowerElem&) { return TowerElem(AlgNum(Rat(1))); }
  friend TowerElem zero_like(const TowerElem&) { return TowerElem(); }

  friend TowerElem operator+(const TowerElem& a, const TowerElem& b) {
    return binary(a, b, [](const auto& x, const auto& y) { return x + y; });
  }
  friend TowerElem operator-(const TowerElem& a, const TowerElem& b) {
    return binary(a, b, [](const auto& x, const auto& y) { return x - y; });
  }
  friend TowerElem operator*(const TowerElem& a, const TowerElem& b) {
    return binary(a, b, [](const auto& x, const auto& y) { return x * y; });
  }
  friend TowerElem operator/(const TowerElem& a, const TowerElem& b) {
    if (is_zero(b)) throw std::domain_error("tower element division by zero");
    return binary(a, b, [](const auto& x, const auto& y) { return x / y; });
  }
  TowerElem operator-() const {
    if (level_ < 0) return TowerElem(-c_);
    TowerElem r = *this;
    r.rf_ = std::make_shared<const RatFunc<TowerElem>>(-*rf_);
    return r;
  }
  friend bool operator==(const TowerElem& a, const TowerElem& b) {
    if (a.level_ != b.level_) return false;
    if (a.level_ < 0) return a.c_ == b.c_;
    if (a.tw_ != b.tw_) throw std::domain_error("comparing elements of different towers");
    return *a.rf_ == *b.rf_;
  }
  friend bool operator!=(const TowerElem& a, const TowerElem& b) { return !(a == b); }

 private:
  RatFunc<TowerElem> lifted_to(int lv) const {
    if (level_ == lv) return *rf_;
    return RatFunc<TowerElem>(Poly<TowerElem>(*this));
  }
  template <class Op>
  static TowerElem binary(const TowerElem& a, const TowerElem& b, Op&& op) {
    if (a.level_ < 0 && b.level_ < 0) return TowerElem(op(a.c_, b.c_));
    if (a.level_ >= 0 && b.level_ >= 0 && a.tw_ != b.tw_)
      throw std::domain_error("mixing elements of different towers");
    int lv = std::max(a.level_, b.level_);
    const TowerPtr& tw = a.level_ >= b.level_ ? a.tw_ : b.tw_;
    return make(tw, lv, op(a.lifted_to(lv), b.lifted_to(lv)));
  }

  TowerPtr tw_;
  int level_ = -1;
  AlgNum c_;  // payload when level_ < 0
  std::shared_ptr<const RatFunc<TowerElem>> rf_;  // payload when level_ >= 0
};

struct SimpleLevel {
  LevelKind kind = LevelKind::Base;
  std::string name;       // generator name
  TowerElem arg;          // Log/Exp/Primitive/Hyperexp argument; Riccati r
  TowerElem arg2;         // Riccati s
  Poly<TowerElem> minpoly;  // Algebraic / WeierDeriv, monic
  AlgNum g0, g1;          // WeierTheta curve constants
  TowerElem alpha;        // WeierTheta scale
  std::string note;       // "screened" or "trusted" hypothesis status
};

// a user-visible layer and the internal levels it expands to
struct TowerLayer {
  std::string kind;  // base, log, exp, primitive, hyperexp, algebraic,
                     // dihedral, sl2, weierstrass
  int first_level = 0;
  int level_count = 1;
};

namespace tower_detail {
inline bool is_algebraic_kind(LevelKind k) {
  return k == LevelKind::Algebraic || k == LevelKind::WeierDeriv;
}
// signals an unusable random evaluation point (zero denominator, repeated
// root); the caller perturbs the point or falls back to exact arithmetic
struct EvalFail {};
}  // namespace tower_detail

class Tower : public std::enable_shared_from_this<Tower> {
 public:
  std::vector<SimpleLevel> levels;
  std::vector<TowerLayer> layers;

  static TowerPtr create() {
    TowerPtr tw(new Tower());
    SimpleLevel base;
    base.kind = LevelKind::Base;
    base.name = "x";
    base.note = "screened";
    tw->levels.push_back(std::move(base));
    tw->layers.push_back({"base", 0, 1});
    tw->dcache_.resize(1);
    return tw;
  }

  int size() const { return (int)levels.size(); }

  TowerElem gen(int level) { return TowerElem::generator(shared_from_this(), level); }
  TowerElem x() { return gen(0); }

  const TowerElem& gen_derivative(int level);

  int add_log(const TowerElem& a, std::string name);
  int add_exp(const TowerElem& a, std::string name);
  int add_primitive(const TowerElem& a, std::string name);
  int add_hyperexp(const TowerElem& a, std::string name);
  int add_algebraic(Poly<TowerElem> minpoly, std::string name);
  int add_dihedral(Poly<TowerElem> alpha_minpoly, const TowerElem& gamma,
                   std::string alpha_name, std::string eta_name);
  int add_sl2(const TowerElem& r, const TowerElem& s, const TowerElem& omega,
              std::string alpha_name, std::string y_name, std::string eta_name,
              std::string xi_name);
  int add_weierstrass(const AlgNum& g0, const AlgNum& g1, const TowerElem& alpha,
                      std::string theta_name, std::string thetap_name);

  // random evaluation point used for probabilistic coprimality tests:
  // transcendental generators get random rationals, algebraic generators a
  // root of the evaluated minimal polynomial
  const AlgNum& eval_value(int level);
  AlgNum eval_elem(const TowerElem& e);  // throws tower_detail::EvalFail
  void perturb_eval_point() {
    eval_values_.clear();
    eval_field_ = nullptr;
    eval_salt_ += 7;
  }

 private:
  Tower() = default;
  int push_level(SimpleLevel lv) {
    levels.push_back(std::move(lv));
    dcache_.emplace_back();
    return (int)levels.size() - 1;
  }
  void check_member(const TowerElem& e, const char* what) const {
    if (e.level() < 0) return;
    if (e.tower().get() != this) throw std::domain_error(std::string(what) + ": element belongs to a different tower");
  }
  std::vector<std::optional<TowerElem>> dcache_;
  std::vector<AlgNum> eval_values_;
  FieldPtr eval_field_;
  long eval_salt_ = 0;
};

// Probabilistic-fast gcd for polynomials over tower elements: if the images
// of both polynomials at the tower's random evaluation point are coprime, the
// true monic gcd is 1 (its image always keeps full degree). Otherwise fall
// back to the exact Euclidean gcd.
Poly<TowerElem> poly_gcd(const Poly<TowerElem>& a, const Poly<TowerElem>& b);

// ---- TowerElem methods needing a complete Tower ----

inline TowerElem TowerElem::generator(TowerPtr tw, int level) {
  if (!tw || level < 0 || level >= (int)tw->levels.size())
    throw std::domain_error("tower generator: level out of range");
  TowerElem e;
  e.tw_ = std::move(tw);
  e.level_ = level;
  e.rf_ = std::make_shared<const RatFunc<TowerElem>>(
      Poly<TowerElem>::monomial(TowerElem(AlgNum(Rat(1))), 1));
  return e;
}

inline TowerElem TowerElem::make(const TowerPtr& tw, int level, RatFunc<TowerElem> rf) {
  if (level < 0) throw std::domain_error("make: negative level");
  const SimpleLevel& lv = tw->levels[(std::size_t)level];
  if (tower_detail::is_algebraic_kind(lv.kind)) {
    const Poly<TowerElem>& m = lv.minpoly;
    Poly<TowerElem> n = rf.num() % m;
    Poly<TowerElem> d = rf.den() % m;
    if (d.is_zero_poly())
      throw std::domain_error("division by zero modulo the minimal polynomial");
    if (d.degree() > 0 || !is_one(d.leading())) {
      auto xg = poly_xgcd(d, m);
      if (xg.g.degree() > 0)
        throw std::domain_error("denominator shares a factor with the minimal polynomial");
      n = (n * xg.s) % m;
    }
    rf = RatFunc<TowerElem>(std::move(n));
  }
  if (rf.num().degree() <= 0 && rf.den().degree() == 0) {
    // constant in this generator: collapse to the coefficient below
    if (rf.is_zero_fn()) return TowerElem();
    return rf.num()[0];  // den is monic degree 0, hence 1
  }
  TowerElem e;
  e.tw_ = tw;
  e.level_ = level;
  e.rf_ = std::make_shared<const RatFunc<TowerElem>>(std::move(rf));
  return e;
}

// Derivative of a transcendental generator t expressed as a polynomial of
// degree <= 2 in t with lower-level coefficients.  Algebraic generators and
// the curve coordinate (whose derivative lives one level up) have no such
// form and are rejected.
inline Poly<TowerElem> gen_derivative_poly(const TowerPtr& tw, int level) {
  const SimpleLevel& lv = tw->levels.at((std::size_t)level);
  switch (lv.kind) {
    case LevelKind::Base:
      return Poly<TowerElem>(TowerElem(AlgNum(Rat(1))));
    case LevelKind::Log:
      return Poly<TowerElem>(lv.arg.derivative() / lv.arg);
    case LevelKind::Primitive:
      return Poly<TowerElem>(lv.arg);
    case LevelKind::Exp:
      return Poly<TowerElem>(std::vector<TowerElem>{TowerElem(), lv.arg.derivative()});
    case LevelKind::Hyperexp:
      return Poly<TowerElem>(std::vector<TowerElem>{TowerElem(), lv.arg});
    case LevelKind::Riccati:
      return Poly<TowerElem>(
          std::vector<TowerElem>{lv.arg2, lv.arg, TowerElem(AlgNum(Rat(-1)))});
    default:
      throw std::domain_error(
          "generator derivative is not polynomial in the generator at this level");
  }
}

inline TowerElem TowerElem::derivative() const {
  if (level_ < 0) return TowerElem();  // constants are algebraic numbers
  const RatFunc<TowerElem>& f = *rf_;
  const SimpleLevel& lv = tw_->levels[(std::size_t)level_];

  // At algebraic levels (and WeierTheta, whose generator derivative lives one
  // level up) differentiate through element arithmetic; denominators are
  // trivial there or the elements stay small.
  if (tower_detail::is_algebraic_kind(lv.kind) || lv.kind == LevelKind::WeierTheta) {
    TowerElem t = generator(tw_, level_);
    TowerElem tp = tw_->gen_derivative(level_);
    TowerElem one = one_like(t);
    auto dpoly = [&](const Poly<TowerElem>& P) {
      TowerElem acc;
      TowerElem pw = one;               // t^i
      TowerElem pw_prev = TowerElem();  // t^{i-1}
      for (int i = 0; i <= P.degree(); ++i) {
        acc = acc + P[i].derivative() * pw;
        if (i >= 1) acc = acc + k_int(i, one) * P[i] * pw_prev * tp;
        pw_prev = pw;
        pw = pw * t;
      }
      return acc;
    };
    TowerElem N = make(tw_, level_, RatFunc<TowerElem>(f.num()));
    TowerElem dN = dpoly(f.num());
    if (f.den().degree() == 0) return dN;  // den is 1
    TowerElem D = make(tw_, level_, RatFunc<TowerElem>(f.den()));
    TowerElem dD = dpoly(f.den());
    return (dN * D - N * dD) / (D * D);
  }

  // Transcendental generator: t' is a polynomial in t of degree <= 2, so the
  // derivative of a polynomial stays polynomial and the quotient-rule
  // numerator can be divided exactly by the known repeated part of the
  // denominator before any gcd-based reduction.
  Poly<TowerElem> tp_poly = gen_derivative_poly(tw_, level_);
  auto dfull = [&](const Poly<TowerElem>& P) {
    Poly<TowerElem> A;
    for (int i = 0; i <= P.degree(); ++i) A.set_coeff(i, P[i].derivative());
    return A + P.derivative() * tp_poly;
  };
  const Poly<TowerElem>& N = f.num();
  const Poly<TowerElem>& D = f.den();
  Poly<TowerElem> dN = dfull(N);
  if (D.degree() == 0) return make(tw_, level_, RatFunc<TowerElem>(dN));
  Poly<TowerElem> dD = dfull(D);
  // repeated part g of D divides the numerator exactly: pole orders grow by
  // at most one under derivation
  Poly<TowerElem> g = poly_gcd(D, D.derivative());
  Poly<TowerElem> U = dN * D - N * dD;
  Poly<TowerElem> hD = (D / g) * D;
  if (g.degree() > 0) {
    auto [q, r] = divrem(U, g);
    if (!r.is_zero_poly()) throw std::logic_error("derivative: inexact repeated-part division");
    U = std::move(q);
  }
  return make(tw_, level_, RatFunc<TowerElem>(std::move(U), std::move(hD)));
}

inline TowerElem derive(const TowerElem& e) { return e.derivative(); }

inline TowerElem logderiv(const TowerElem& e) {
  if (is_zero(e)) throw std::domain_error("logarithmic derivative of zero");
  return e.derivative() / e;
}

// ---- generator derivatives ----

inline const TowerElem& Tower::gen_derivative(int level) {
  if (level < 0 || level >= size()) throw std::domain_error("gen_derivative: bad level");
  auto& slot = dcache_[(std::size_t)level];
  if (slot) return *slot;
  const SimpleLevel& lv = levels[(std::size_t)level];
  TowerElem t = gen(level);
  TowerElem d;
  switch (lv.kind) {
    case LevelKind::Base:
      d = TowerElem(AlgNum(Rat(1)));
      break;
    case LevelKind::Log:
      d = lv.arg.derivative() / lv.arg;
      break;
    case LevelKind::Exp:
      d = lv.arg.derivative() * t;
      break;
    case LevelKind::Primitive:
      d = lv.arg;
      break;
    case LevelKind::Hyperexp:
      d = lv.arg * t;
      break;
    case LevelKind::Algebraic:
    case LevelKind::WeierDeriv: {
      if (lv.kind == LevelKind::WeierDeriv) {
        const SimpleLevel& th_lv = levels[(std::size_t)level - 1];
        TowerElem th = gen(level - 1);
        TowerElem a = th_lv.alpha;
        TowerElem g1(th_lv.g1);
        TowerElem twelve(AlgNum(Rat(12)));
        TowerElem half(AlgNum(Rat(1, 2)));
        d = (a.derivative() / a) * t + half * a * a * (twelve * th * th - g1);
        break;
      }
      // implicit differentiation of m(t) = 0
      TowerElem num, den;
      TowerElem pw = TowerElem(AlgNum(Rat(1)));
      TowerElem pw_prev;
      for (int i = 0; i <= lv.minpoly.degree(); ++i) {
        num = num + lv.minpoly[i].derivative() * pw;
        if (i >= 1) den = den + k_int(i, TowerElem(AlgNum(Rat(1)))) * lv.minpoly[i] * pw_prev;
        pw_prev = pw;
        pw = pw * t;
      }
      d = -num / den;
      break;
    }
    case LevelKind::Riccati:
      d = -t * t + lv.arg * t + lv.arg2;
      break;
    case LevelKind::WeierTheta:
      d = gen(level + 1);
      break;
  }
  slot = std::move(d);
  return *slot;
}

// ---- coercion ----

struct CoerceResult {
  bool ok = false;
  TowerElem value;          // valid when ok
  std::string obstruction;  // name of the first obstructing generator otherwise
};

inline CoerceResult coerce_down(const TowerElem& e, int target_level) {
  CoerceResult r;
  if (e.level() <= target_level) {
    r.ok = true;
    r.value = e;
    return r;
  }
  r.ok = false;
  r.obstruction = e.tower()->levels[(std::size_t)e.level()].name;
  return r;
}

// ---- trace and norm at an algebraic level ----

struct TraceNorm {
  TowerElem tr, nr;
};

inline TraceNorm trace_norm(const TowerElem& e, int level) {
  if (e.level() > level)
    throw std::domain_error("trace_norm: element lives above the requested level");
  TowerPtr tw = e.tower();
  if (!tw && e.level() >= 0) throw std::domain_error("trace_norm: element has no tower");
  if (e.level() < level) {
    // need the tower to look up the level; constants below an algebraic level
    // still require the caller to pass an element of the tower to locate it
    throw std::domain_error("trace_norm: element must be expressed at the algebraic level");
  }
  const SimpleLevel& lv = tw->levels[(std::size_t)level];
  if (!tower_detail::is_algebraic_kind(lv.kind))
    throw std::domain_error("trace_norm: level is not algebraic");
  const Poly<TowerElem>& m = lv.minpoly;
  int d = m.degree();
  const Poly<TowerElem>& P = e.parts().num();  // den is 1 at algebraic levels
  TraceNorm out;
  out.nr = resultant(m, P);
  auto ps = poly_power_sums(m, d);
  TowerElem tr;
  for (int i = 0; i <= P.degree(); ++i) tr = tr + P[i] * ps[(std::size_t)i];
  out.tr = tr;
  return out;
}

// trace/norm of an element sitting below the algebraic level: tr = d*e, nr = e^d
inline TraceNorm trace_norm_below(const TowerElem& e, const TowerPtr& tw, int level) {
  const SimpleLevel& lv = tw->levels[(std::size_t)level];
  if (!tower_detail::is_algebraic_kind(lv.kind))
    throw std::domain_error("trace_norm: level is not algebraic");
  if (e.level() >= level) {
    if (e.level() > level) throw std::domain_error("trace_norm: element lives above the level");
    return trace_norm(e, level);
  }
  int d = lv.minpoly.degree();
  TraceNorm out;
  out.tr = k_int(d, TowerElem(AlgNum(Rat(1)))) * e;
  TowerElem nr = TowerElem(AlgNum(Rat(1)));
  for (int i = 0; i < d; ++i) nr = nr * e;
  out.nr = nr;
  return out;
}

// ---- conversions between level <= 0 elements and base rational functions ----

inline RatFunc<AlgNum> to_base_ratfunc(const TowerElem& e) {
  if (e.level() < 0) return RatFunc<AlgNum>(Poly<AlgNum>(e.constant()));
  if (e.level() > 0)
    throw std::domain_error("element does not lie in the base rational function field");
  auto conv = [](const Poly<TowerElem>& p) {
    Poly<AlgNum> q;
    for (int i = 0; i <= p.degree(); ++i) q.set_coeff(i, p[i].constant());
    return q;
  };
  return RatFunc<AlgNum>(conv(e.parts().num()), conv(e.parts().den()));
}

inline TowerElem from_base_ratfunc(const TowerPtr& tw, const RatFunc<AlgNum>& f) {
  auto conv = [](const Poly<AlgNum>& p) {
    Poly<TowerElem> q;
    for (int i = 0; i <= p.degree(); ++i) q.set_coeff(i, TowerElem(p[i]));
    return q;
  };
  return TowerElem::make(tw, 0, RatFunc<TowerElem>(conv(f.num()), conv(f.den())));
}

// ---- layer builders ----

namespace tower_detail {

// deepest constant field appearing in a base rational function
inline FieldPtr coeff_field(const RatFunc<AlgNum>& f) {
  FieldPtr best;
  auto scan = [&](const Poly<AlgNum>& p) {
    for (int i = 0; i <= p.degree(); ++i) {
      const FieldPtr& F = p[i].field();
      if (F && (!best || F->depth > best->depth)) best = F;
    }
  };
  scan(f.num());
  scan(f.den());
  return best;
}

// proper part (after removing the polynomial quotient) of a base function
inline RatFunc<AlgNum> proper_part(const RatFunc<AlgNum>& f) {
  auto [q, r] = divrem(f.num(), f.den());
  (void)q;
  return RatFunc<AlgNum>(r, f.den());
}

// does f = u'/u hold for some u in the base field, up to a rational multiple?
// true exactly when f is proper with squarefree denominator and all residues
// are rational; then a power of the would-be new generator is already present.
inline bool is_rational_logderiv_combination(const RatFunc<AlgNum>& f) {
  if (f.is_zero_fn()) return true;
  auto [g, h] = hermite_reduce(f);
  if (!g.is_zero_fn()) return false;  // higher-order poles survive
  auto [q, r] = divrem(h.num(), h.den());
  if (!q.is_zero_poly()) return false;  // polynomial part survives
  if (r.is_zero_poly()) return false;
  auto lp = log_part(RatFunc<AlgNum>(r, h.den()), coeff_field(f));
  if (!lp.rootsums.empty()) return false;  // irrational residues
  for (auto& t : lp.terms)
    if (!t.c.is_rational()) return false;
  return true;
}

// has f an antiderivative already inside the base field?
inline bool has_base_antiderivative(const RatFunc<AlgNum>& f) {
  auto [g, h] = hermite_reduce(f);
  (void)g;
  // h = polynomial part + proper part with squarefree denominator; the
  // polynomial part always integrates, the proper part never does
  return proper_part(h).is_zero_fn();
}

}  // namespace tower_detail

inline int Tower::add_log(const TowerElem& a, std::string name) {
  check_member(a, "add_log");
  if (is_zero(a)) throw std::domain_error("add_log: zero argument");
  if (a.is_constant()) throw std::domain_error("add_log: constant argument adds a new constant");
  SimpleLevel lv;
  lv.kind = LevelKind::Log;
  lv.name = std::move(name);
  lv.arg = a;
  if (a.level() <= 0) {
    // a'/a has only simple poles with nonzero residues once a is nonconstant
    lv.note = "screened";
  } else {
    lv.note = "trusted";
  }
  int first = push_level(std::move(lv));
  layers.push_back({"log", first, 1});
  return first;
}

inline int Tower::add_exp(const TowerElem& a, std::string name) {
  check_member(a, "add_exp");
  if (a.is_constant()) throw std::domain_error("add_exp: constant argument adds a new constant");
  SimpleLevel lv;
  lv.kind = LevelKind::Exp;
  lv.name = std::move(name);
  lv.arg = a;
  lv.note = a.level() <= 0 ? "screened" : "trusted";
  int first = push_level(std::move(lv));
  layers.push_back({"exp", first, 1});
  return first;
}

inline int Tower::add_primitive(const TowerElem& a, std::string name) {
  check_member(a, "add_primitive");
  SimpleLevel lv;
  lv.kind = LevelKind::Primitive;
  lv.name = std::move(name);
  lv.arg = a;
  if (a.level() <= 0) {
    if (tower_detail::has_base_antiderivative(to_base_ratfunc(a)))
      throw std::domain_error(
          "add_primitive: argument already has an antiderivative in the base field");
    lv.note = "screened";
  } else {
    lv.note = "trusted";
  }
  int first = push_level(std::move(lv));
  layers.push_back({"primitive", first, 1});
  return first;
}

inline int Tower::add_hyperexp(const TowerElem& a, std::string name) {
  check_member(a, "add_hyperexp");
  SimpleLevel lv;
  lv.kind = LevelKind::Hyperexp;
  lv.name = std::move(name);
  lv.arg = a;
  if (a.level() <= 0) {
    if (tower_detail::is_rational_logderiv_combination(to_base_ratfunc(a)))
      throw std::domain_error(
          "add_hyperexp: argument is a rational combination of logarithmic derivatives");
    lv.note = "screened";
  } else {
    lv.note = "trusted";
  }
  int first = push_level(std::move(lv));
  layers.push_back({"hyperexp", first, 1});
  return first;
}

inline int Tower::add_algebraic(Poly<TowerElem> minpoly, std::string name) {
  if (minpoly.degree() < 2) throw std::domain_error("add_algebraic: degree must be >= 2");
  for (int i = 0; i <= minpoly.degree(); ++i) check_member(minpoly[i], "add_algebraic");
  minpoly = minpoly.monic();
  if (poly_gcd(minpoly, minpoly.derivative()).degree() > 0)
    throw std::domain_error("add_algebraic: minimal polynomial is not squarefree");
  SimpleLevel lv;
  lv.kind = LevelKind::Algebraic;
  lv.name = std::move(name);
  lv.minpoly = std::move(minpoly);
  lv.note = "trusted";  // irreducibility over the tower is assumed, not proved
  int first = push_level(std::move(lv));
  layers.push_back({"algebraic", first, 1});
  return first;
}

inline int Tower::add_dihedral(Poly<TowerElem> alpha_minpoly, const TowerElem& gamma,
                               std::string alpha_name, std::string eta_name) {
  if (alpha_minpoly.degree() != 2)
    throw std::domain_error("add_dihedral: quadratic minimal polynomial required");
  for (int i = 0; i <= 2; ++i) check_member(alpha_minpoly[i], "add_dihedral");
  check_member(gamma, "add_dihedral");
  if (is_zero(gamma)) throw std::domain_error("add_dihedral: gamma must be nonzero");
  alpha_minpoly = alpha_minpoly.monic();
  // the trace of alpha must equal gamma'/(2 gamma)
  TowerElem tr_alpha = -alpha_minpoly[1];
  TowerElem half(AlgNum(Rat(1, 2)));
  if (tr_alpha != half * gamma.derivative() / gamma)
    throw std::domain_error("add_dihedral: tr(alpha) != gamma'/(2 gamma)");
  SimpleLevel la;
  la.kind = LevelKind::Algebraic;
  la.name = std::move(alpha_name);
  la.minpoly = std::move(alpha_minpoly);
  la.arg = gamma;  // tr(alpha) = gamma'/(2 gamma), needed by the trace descent
  la.note = "screened";
  int first = push_level(std::move(la));
  TowerElem alpha = gen(first);
  SimpleLevel le;
  le.kind = LevelKind::Hyperexp;  // eta'/eta = alpha
  le.name = std::move(eta_name);
  le.arg = alpha;
  le.note = "trusted";
  push_level(std::move(le));
  layers.push_back({"dihedral", first, 2});
  return first;
}

inline int Tower::add_sl2(const TowerElem& r, const TowerElem& s, const TowerElem& omega,
                          std::string alpha_name, std::string y_name, std::string eta_name,
                          std::string xi_name) {
  check_member(r, "add_sl2");
  check_member(s, "add_sl2");
  check_member(omega, "add_sl2");
  if (is_zero(omega)) throw std::domain_error("add_sl2: omega must be nonzero");
  std::string note = "trusted";
  if (r.level() <= 0 && s.level() <= 0) {
    auto adm = is_sl2_admissible(to_base_ratfunc(r), to_base_ratfunc(s),
                                 tower_detail::coeff_field(to_base_ratfunc(r) + to_base_ratfunc(s)));
    if (!adm.admissible) {
      if (adm.witness)
        throw std::domain_error("add_sl2: the associated Riccati equation has a rational solution");
      note = "trusted";  // search was inconclusive
    } else {
      note = "screened";
    }
  }
  SimpleLevel la;
  la.kind = LevelKind::Riccati;
  la.name = std::move(alpha_name);
  la.arg = r;
  la.arg2 = s;
  la.note = note;
  int first = push_level(std::move(la));
  TowerElem alpha = gen(first);
  TowerElem two(AlgNum(Rat(2)));
  SimpleLevel ly;
  ly.kind = LevelKind::Hyperexp;  // y'/y = omega'/omega - 2 alpha
  ly.name = std::move(y_name);
  ly.arg = omega.derivative() / omega - two * alpha;
  ly.note = "trusted";
  int y_level = push_level(std::move(ly));
  TowerElem y = gen(y_level);
  SimpleLevel le;
  le.kind = LevelKind::Primitive;  // eta' = y
  le.name = std::move(eta_name);
  le.arg = y;
  le.note = "trusted";
  push_level(std::move(le));
  SimpleLevel lx;
  lx.kind = LevelKind::Algebraic;  // xi^2 = omega / y
  lx.name = std::move(xi_name);
  lx.minpoly = Poly<TowerElem>(std::vector<TowerElem>{-(omega / y), TowerElem(), TowerElem(AlgNum(Rat(1)))});
  lx.note = "trusted";
  push_level(std::move(lx));
  layers.push_back({"sl2", first, 4});
  return first;
}

inline int Tower::add_weierstrass(const AlgNum& g0, const AlgNum& g1, const TowerElem& alpha,
                                  std::string theta_name, std::string thetap_name) {
  check_member(alpha, "add_weierstrass");
  if (is_zero(alpha)) throw std::domain_error("add_weierstrass: alpha must be nonzero");
  AlgNum disc = AlgNum(Rat(27)) * g0 * g0 - g1 * g1 * g1;
  if (is_zero(disc))
    throw std::domain_error("add_weierstrass: 27 g0^2 - g1^3 must be nonzero");
  SimpleLevel lt;
  lt.kind = LevelKind::WeierTheta;
  lt.name = std::move(theta_name);
  lt.g0 = g0;
  lt.g1 = g1;
  lt.alpha = alpha;
  lt.note = "screened";
  int first = push_level(std::move(lt));
  TowerElem th = gen(first);
  TowerElem a2 = alpha * alpha;
  TowerElem four(AlgNum(Rat(4)));
  TowerElem p = four * th * th * th - TowerElem(g1) * th - TowerElem(g0);
  SimpleLevel lw;
  lw.kind = LevelKind::WeierDeriv;  // w^2 = alpha^2 (4 th^3 - g1 th - g0)
  lw.name = std::move(thetap_name);
  lw.minpoly = Poly<TowerElem>(std::vector<TowerElem>{-(a2 * p), TowerElem(), TowerElem(AlgNum(Rat(1)))});
  lw.note = "screened";
  push_level(std::move(lw));
  layers.push_back({"weierstrass", first, 2});
  return first;
}

// ---- random evaluation point and fast coprimality ----

inline const AlgNum& Tower::eval_value(int level) {
  while ((int)eval_values_.size() <= level) {
    int L = (int)eval_values_.size();
    const SimpleLevel& lv = levels[(std::size_t)L];
    if (tower_detail::is_algebraic_kind(lv.kind)) {
      Poly<AlgNum> m;
      for (int i = 0; i <= lv.minpoly.degree(); ++i) m.set_coeff(i, eval_elem(lv.minpoly[i]));
      if (m.degree() < 2 || poly_gcd(m, m.derivative()).degree() > 0)
        throw tower_detail::EvalFail{};
      auto adj = adjoin_root(eval_field_, m);
      if (adj.field) eval_field_ = adj.field;
      eval_values_.push_back(adj.root);
    } else {
      eval_values_.push_back(AlgNum(rat(2 * L + 3 + eval_salt_, 1 + (L + eval_salt_) % 5)));
    }
  }
  return eval_values_[(std::size_t)level];
}

inline AlgNum Tower::eval_elem(const TowerElem& e) {
  if (e.is_constant()) return e.constant();
  const AlgNum v = eval_value(e.level());
  auto evalp = [&](const Poly<TowerElem>& p) {
    AlgNum acc;
    for (int i = p.degree(); i >= 0; --i) acc = acc * v + eval_elem(p[i]);
    return acc;
  };
  AlgNum n = evalp(e.parts().num());
  AlgNum d = evalp(e.parts().den());
  if (is_zero(d)) throw tower_detail::EvalFail{};
  return n / d;
}

// Gcd of polynomials whose coefficients live in a tower fraction field
// k(..., t_L), computed as a primitive pseudo-remainder sequence over the
// polynomial ring k(...)[t_L]: clear t_L denominators, pseudo-divide, and
// strip the t_L content after each step.  Content gcds recurse one level
// down and bottom out at the integer-based rational gcd.
inline Poly<TowerElem> tower_gcd_prs(const Poly<TowerElem>& a, const Poly<TowerElem>& b,
                                     int L) {
  TowerPtr twp;
  auto grab = [&](const Poly<TowerElem>& p) {
    for (int i = 0; i <= p.degree() && !twp; ++i)
      if (p[i].level() >= 0) twp = p[i].tower();
  };
  grab(a);
  grab(b);
  const Poly<TowerElem> one_p(TowerElem(AlgNum(Rat(1))));
  // coefficients as polynomials in t_L over the lower field
  using PP = std::vector<Poly<TowerElem>>;
  auto to_pp = [&](const Poly<TowerElem>& p) {
    Poly<TowerElem> m = one_p;  // lcm of level-L denominators
    for (int i = 0; i <= p.degree(); ++i)
      if (p[i].level() == L) {
        const Poly<TowerElem>& d = p[i].parts().den();
        if (d.degree() > 0) m = m * divrem(d, poly_gcd(m, d)).first;
      }
    PP v((size_t)p.degree() + 1);
    for (int i = 0; i <= p.degree(); ++i) {
      if (is_zero(p[i])) continue;
      if (p[i].level() == L) {
        Poly<TowerElem> scale = divrem(m, p[i].parts().den()).first;
        v[(size_t)i] = p[i].parts().num() * scale;
      } else {
        v[(size_t)i] = Poly<TowerElem>(p[i]) * m;
      }
    }
    return v;
  };
  auto trim = [](PP& v) {
    while (!v.empty() && v.back().is_zero_poly()) v.pop_back();
  };
  auto strip_content = [&](PP& v) {
    Poly<TowerElem> g;
    for (auto& c : v)
      if (!c.is_zero_poly()) {
        g = g.is_zero_poly() ? c : poly_gcd(g, c);
        if (g.degree() == 0) return;
      }
    if (g.degree() > 0)
      for (auto& c : v)
        if (!c.is_zero_poly()) c = divrem(c, g).first;
  };
  auto prem = [&](PP A, const PP& B) {
    int db = (int)B.size() - 1;
    const Poly<TowerElem>& lb = B.back();
    while ((int)A.size() - 1 >= db) {
      Poly<TowerElem> lr = A.back();
      A.pop_back();
      for (auto& c : A) c = c * lb;
      int off = (int)A.size() - db;
      for (int i = 0; i < db; ++i) A[(size_t)(off + i)] = A[(size_t)(off + i)] - lr * B[(size_t)i];
      trim(A);
      if (A.empty()) break;
    }
    return A;
  };
  PP A = to_pp(a), B = to_pp(b);
  trim(A);
  trim(B);
  strip_content(A);
  strip_content(B);
  if (A.size() < B.size()) std::swap(A, B);
  while (B.size() > 1) {
    PP R = prem(A, B);
    strip_content(R);
    A = std::move(B);
    B = std::move(R);
  }
  if (!B.empty()) return one_p;  // degree-0 remainder: coprime over the field
  Poly<TowerElem> g;
  for (size_t i = 0; i < A.size(); ++i)
    g.set_coeff((int)i, TowerElem::make(twp, L, RatFunc<TowerElem>(A[i])));
  return g.monic();
}

inline Poly<TowerElem> poly_gcd(const Poly<TowerElem>& a, const Poly<TowerElem>& b) {
  auto exact = [&](const Poly<TowerElem>& x, const Poly<TowerElem>& y) {
#ifdef FINTERM_GCD_DEBUG
    int cl = -1;
    for (int i = 0; i <= x.degree(); ++i) cl = std::max(cl, x[i].level());
    for (int i = 0; i <= y.degree(); ++i) cl = std::max(cl, y[i].level());
    std::fprintf(stderr, "exact gcd deg %d,%d clvl %d\n", x.degree(), y.degree(), cl);
#endif
    return poly_gcd<TowerElem>(x, y);
  };
  if (a.is_zero_poly() || b.is_zero_poly() || a.degree() == 0 || b.degree() == 0)
    return exact(a, b);
  Tower* tw = nullptr;
  int lmax = -1;
  auto scan = [&](const Poly<TowerElem>& p) {
    for (int i = 0; i <= p.degree(); ++i) {
      lmax = std::max(lmax, p[i].level());
      if (p[i].level() >= 0 && !tw) tw = p[i].tower().get();
    }
  };
  scan(a);
  scan(b);
  if (!tw) {
    // every coefficient is a constant: drop the tower wrapper and use the
    // number-field gcd, which routes rational inputs through integer
    // primitive remainder sequences
    Poly<AlgNum> ca, cb;
    for (int i = 0; i <= a.degree(); ++i) ca.set_coeff(i, a[i].constant());
    for (int i = 0; i <= b.degree(); ++i) cb.set_coeff(i, b[i].constant());
    Poly<AlgNum> g = poly_gcd(ca, cb);
    Poly<TowerElem> out;
    for (int i = 0; i <= g.degree(); ++i) out.set_coeff(i, TowerElem(g[i]));
    return out;
  }
  // split off the common power of the generator first (derivatives at
  // exponential-like levels share exactly such a power with denominators)
  auto low_order = [](const Poly<TowerElem>& p) {
    int v = 0;
    while (v < p.degree() && is_zero(p[v])) ++v;
    return v;
  };
  int va = low_order(a), vb = low_order(b);
  int v = std::min(va, vb);
  if (v > 0) {
    auto shift_down = [](const Poly<TowerElem>& p, int k) {
      Poly<TowerElem> q;
      for (int i = k; i <= p.degree(); ++i) q.set_coeff(i - k, p[i]);
      return q;
    };
    Poly<TowerElem> g = poly_gcd(shift_down(a, v), shift_down(b, v));
    Poly<TowerElem> tv = Poly<TowerElem>::monomial(TowerElem(AlgNum(Rat(1))), v);
    return tv * g;
  }
  if (va > 0 || vb > 0) {
    // one side is divisible by the generator, the other is not: the
    // generator cannot divide the gcd, so strip it from that side
    if (va > 0) {
      Poly<TowerElem> q;
      for (int i = va; i <= a.degree(); ++i) q.set_coeff(i - va, a[i]);
      return poly_gcd(q, b);
    }
    Poly<TowerElem> q;
    for (int i = vb; i <= b.degree(); ++i) q.set_coeff(i - vb, b[i]);
    return poly_gcd(a, q);
  }
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      Poly<AlgNum> ea, eb;
      for (int i = 0; i <= a.degree(); ++i) ea.set_coeff(i, tw->eval_elem(a[i]));
      for (int i = 0; i <= b.degree(); ++i) eb.set_coeff(i, tw->eval_elem(b[i]));
      if (!ea.is_zero_poly() && !eb.is_zero_poly() && poly_gcd(ea, eb).degree() == 0)
        return Poly<TowerElem>(TowerElem(AlgNum(Rat(1))));
      break;  // images share a factor (or vanish): compute exactly
    } catch (const tower_detail::EvalFail&) {
      tw->perturb_eval_point();
    }
  }
  return tower_gcd_prs(a, b, lmax);
}

}  // namespace finterm
