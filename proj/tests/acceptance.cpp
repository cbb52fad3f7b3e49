#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Acceptance gate: one criterion per test case, one printed pass/fail line
// per criterion, with the elapsed time checked against each budget.

#include <chrono>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "finterm/descent.hpp"
#include "finterm/laurent.hpp"
#include "finterm/ratint.hpp"
#include "finterm/riccati.hpp"
#include "finterm/weierstrass.hpp"
#include "test_helpers.hpp"

using namespace finterm;

namespace {

TowerElem ratel(long p, long q = 1) { return TowerElem(AlgNum(rat(p, q))); }

Certificate make_cert(int level, std::vector<CertTerm> terms, TowerElem v, TowerElem f) {
  Certificate c;
  c.level = level;
  c.terms = std::move(terms);
  c.v = std::move(v);
  c.f = std::move(f);
  return c;
}

TowerElem recompute_f(const Certificate& c) {
  TowerElem acc = derive(c.v);
  for (auto& t : c.terms) acc = acc + TowerElem(t.c) * logderiv(t.u);
  return acc;
}

bool cert_equal(const Certificate& a, const Certificate& b) {
  if (a.level != b.level || !(a.f == b.f) || !(a.v == b.v)) return false;
  if (a.terms.size() != b.terms.size()) return false;
  std::vector<bool> used(b.terms.size(), false);
  for (auto& ta : a.terms) {
    bool found = false;
    for (std::size_t j = 0; j < b.terms.size(); ++j) {
      if (used[j]) continue;
      if (ta.c == b.terms[j].c && ta.u == b.terms[j].u) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

Certificate random_base_cert(std::mt19937_64& rng, const TowerPtr& tw) {
  TowerElem x = tw->gen(0);
  std::vector<TowerElem> pool = {x, x + ratel(1), x - ratel(2), x * x + ratel(1),
                                 x * x + x + ratel(3)};
  std::uniform_int_distribution<int> nterms(0, 3), cnum(-5, 5), cden(1, 3), pick_v(0, 3);
  Certificate c;
  c.level = 0;
  int n = nterms(rng);
  for (int i = 0; i < n; ++i) {
    long p = cnum(rng);
    if (p == 0) p = 7;
    c.terms.push_back({AlgNum(rat(p, cden(rng))), pool[rng() % pool.size()]});
  }
  switch (pick_v(rng)) {
    case 0: c.v = TowerElem(); break;
    case 1: c.v = x * x - ratel(3) * x; break;
    case 2: c.v = ratel(1) / (x + ratel(1)); break;
    default: c.v = x / (x * x + ratel(1)); break;
  }
  c.f = recompute_f(c);
  return c;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int n, const char* what, bool ok, double secs, double budget) {
  std::printf("[%s] criterion %d: %s (%.1fs, budget %.0fs)\n", ok ? "PASS" : "FAIL", n, what,
              secs, budget);
  std::fflush(stdout);
  CHECK(ok);
  CHECK(secs < budget);
}

}  // namespace

TEST_CASE("criterion 1: rational integration soundness") {
  Timer tm;
  std::mt19937_64 rng(101);
  bool ok = true;
  for (int rep = 0; rep < 200 && ok; ++rep) {
    Poly<Rat> num = ft_test::random_qpoly(rng, 6);
    Poly<Rat> den = ft_test::random_qpoly(rng, 6, /*nonzero=*/true);
    Poly<AlgNum> an, ad;
    for (int i = 0; i <= num.degree(); ++i) an.set_coeff(i, AlgNum(num[i]));
    for (int i = 0; i <= den.degree(); ++i) ad.set_coeff(i, AlgNum(den[i]));
    RatFunc<AlgNum> f(an, ad);
    RatIntResult r = integrate_rational(f);
    ok = ok && ratint_verify(f, r);
  }
  report(1, "200 random rational integrands integrate and re-verify exactly", ok, tm.seconds(),
         60.0);
}

TEST_CASE("criterion 2: monomial descent through log and exp layers") {
  Timer tm;
  std::mt19937_64 rng(202);
  bool ok = true;
  for (int rep = 0; rep < 50 && ok; ++rep) {
    auto tw = Tower::create();
    TowerElem x = tw->x();
    tw->add_log(x + ratel(1 + rep % 3), "t1");
    tw->add_exp(x, "t2");
    Certificate base = random_base_cert(rng, tw);
    DescentReport out = descend_all(lift(base, tw->size() - 1), tw);
    ok = ok && out.ok && verify(out.output, tw) &&
         cert_equal(out.output, normalize_constants(base));
  }
  report(2, "50 base certificates lift through log+exp and descend to the normalized original",
         ok, tm.seconds(), 30.0);
}

TEST_CASE("criterion 3: dihedral descent") {
  Timer tm;
  bool ok = true;
  {
    // alpha^2 = x, gamma = 1, eta'/eta = alpha: (1, alpha, 1/(2x)) -> (1/2, x)
    auto tw = Tower::create();
    TowerElem x = tw->x();
    int la = tw->add_dihedral(
        Poly<TowerElem>(std::vector<TowerElem>{-x, TowerElem(), ratel(1)}), ratel(1), "alpha",
        "eta");
    Certificate c =
        make_cert(la, {{AlgNum(Rat(1)), tw->gen(la)}}, TowerElem(), ratel(1, 2) / x);
    ok = ok && verify(c, tw);
    Certificate out = descend_dihedral(c, tw);
    ok = ok && out.level == 0 && out.terms.size() == 1 &&
         out.terms[0].c == AlgNum(Rat(1, 2)) && out.terms[0].u == x && is_zero(out.v) &&
         verify(out, tw);
  }
  std::mt19937_64 rng(303);
  for (int rep = 0; rep < 20 && ok; ++rep) {
    auto tw = Tower::create();
    TowerElem x = tw->x();
    int la = tw->add_dihedral(
        Poly<TowerElem>(std::vector<TowerElem>{-(x + ratel(rep % 3)), TowerElem(), ratel(1)}),
        ratel(1), "alpha", "eta");
    Certificate base = random_base_cert(rng, tw);
    Certificate out = descend_dihedral(lift(base, la + 1), tw);
    ok = ok && verify(out, tw) && cert_equal(out, normalize_constants(base));
  }
  report(3, "worked dihedral example plus 20 randomized dihedral certificates", ok, tm.seconds(),
         30.0);
}

TEST_CASE("criterion 4: sl2 descent on the Airy tower and the Riccati gate") {
  Timer tm;
  bool ok = true;
  {
    auto tw = Tower::create();
    TowerElem x = tw->x();
    int la = tw->add_sl2(TowerElem(), x, ratel(1), "alpha", "y", "eta", "xi");
    TowerElem y = tw->gen(la + 1);
    Certificate c = make_cert(
        la + 3, {{AlgNum(Rat(1)), ratel(1) / y}, {AlgNum(Rat(1)), x * x * x * y}},
        TowerElem(), ratel(3) / x);
    ok = ok && verify(c, tw);
    std::string note;
    Certificate out = descend_sl2(c, tw, &note);
    ok = ok && note == "e = [0]";  // the exponent sum vanished, as predicted
    ok = ok && out.level == 0 && out.terms.size() == 1 &&
         out.terms[0].c == AlgNum(Rat(1)) && out.terms[0].u == x * x * x && verify(out, tw);
  }
  {
    RiccatiSolutions s =
        rational_solutions(RatFunc<AlgNum>(), RatFunc<AlgNum>(Poly<AlgNum>::monomial(
                                                  AlgNum(Rat(1)), 1)),
                           nullptr);
    ok = ok && s.solutions.empty() && s.complete;
  }
  report(4, "Airy certificate descends with e = 0; Riccati gate is empty for (0, x)", ok,
         tm.seconds(), 30.0);
}

TEST_CASE("criterion 5: weierstrass layer consistency") {
  Timer tm;
  bool ok = true;
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int lt = tw->add_weierstrass(AlgNum(Rat(0)), AlgNum(Rat(4)), ratel(1), "theta", "thetap");
  WeierstrassCurve C = curve_at(tw, lt);
  TowerElem th = C.theta(), w = C.w();
  // (a) the defining relation is differentially consistent
  ok = ok && is_zero(derive(w * w - ratel(4) * th * th * th + ratel(4) * th));
  // (b) translation by the 2-torsion point (1, 0)
  EllipticPoint p10 = EllipticPoint::affine(AlgNum(Rat(1)), AlgNum(Rat(0)));
  ok = ok && translate(C, th, p10) == (th + ratel(1)) / (th - ratel(1));
  // (c) translation commutes with the derivation on 50 random elements
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> cc(-3, 3), pick(0, 2);
  std::vector<EllipticPoint> tors = {EllipticPoint::at_infinity(), p10,
                                     EllipticPoint::affine(AlgNum(Rat(0)), AlgNum(Rat(0))),
                                     EllipticPoint::affine(AlgNum(Rat(-1)), AlgNum(Rat(0)))};
  for (int rep = 0; rep < 50 && ok; ++rep) {
    TowerElem u = ratel(cc(rng)) + ratel(cc(rng)) * th + ratel(cc(rng)) * w;
    if (pick(rng) == 0) u = u + ratel(cc(rng)) * th * th;
    int d = pick(rng);
    u = u / (d == 0 ? ratel(1) : (d == 1 ? th : th - ratel(2)));
    if (is_zero(u)) u = th;
    const EllipticPoint& p = tors[rep % tors.size()];
    ok = ok && translate(C, derive(u), p) == derive(translate(C, u, p));
  }
  // (d) the 2-torsion points close as the Klein four-group
  for (std::size_t i = 0; i < tors.size() && ok; ++i)
    for (std::size_t j = 0; j < tors.size() && ok; ++j) {
      EllipticPoint s = ec_add(C, tors[i], tors[j]);
      bool in_table = false;
      for (auto& t : tors) in_table = in_table || s == t;
      ok = ok && in_table;
      ok = ok && ec_add(C, tors[i], tors[i]) == EllipticPoint::at_infinity();
    }
  report(5, "curve relation, (1,0)-translation, derive/translate commuting, Klein four-group",
         ok, tm.seconds(), 30.0);
}

TEST_CASE("criterion 6: Laurent order laws on the Airy alpha layer") {
  Timer tm;
  bool ok = true;
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int la = tw->add_sl2(TowerElem(), x, ratel(1), "alpha", "y", "eta", "xi");
  TowerElem alpha = tw->gen(la);
  std::mt19937_64 rng(606);
  std::vector<TowerElem> points = {ratel(0), ratel(1), ratel(-1), ratel(2)};
  std::uniform_int_distribution<int> expo(-3, 2), pickc(-3, 3);
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    TowerElem u = ratel(1);
    for (auto& a : points) {
      int e = expo(rng);
      TowerElem g = alpha - a;
      for (int j = 0; j < (e < 0 ? -e : e); ++j) u = e < 0 ? u / g : u * g;
    }
    TowerElem p = ratel(pickc(rng)) + (ratel(pickc(rng)) + ratel(pickc(rng)) * x) * alpha;
    if (is_zero(p)) p = ratel(1);
    u = u * p;
    if (is_zero(derive(u))) continue;
    for (auto& a : points) {
      // R(a) = a^2 - x is a nonzero function at every constant point
      if (is_zero(derive(a) + a * a - x)) ok = false;
      auto ou = ord_at(u, tw, la, a);
      if (!ou) continue;
      auto od = ord_at(derive(u), tw, la, a);
      if (od && !(*od >= *ou - 1)) ok = false;
      if (*ou < 0 && (!od || *od != *ou - 1)) ok = false;
      if (*ou != 0) {
        auto ol = ord_at(logderiv(u), tw, la, a);
        if (!ol || *ol != -1) ok = false;
      }
      ++checked;
    }
    if (!ok) break;
  }
  ok = ok && checked >= 100;
  report(6, "100 random elements obey the pole/zero order laws at constant points", ok,
         tm.seconds(), 30.0);
}

TEST_CASE("criterion 7: end-to-end descent over mixed towers of depth 3") {
  Timer tm;
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<int> kind_d(0, 5);
  bool ok = true;
  for (int rep = 0; rep < 100 && ok; ++rep) {
    auto tw = Tower::create();
    TowerElem x = tw->x();
    for (int d = 0; d < 3; ++d) {
      std::string n = "g" + std::to_string(d);
      switch (kind_d(rng)) {
        case 0: tw->add_log(x + ratel(d), n); break;
        case 1: tw->add_exp(x, n); break;
        case 2:
          tw->add_algebraic(Poly<TowerElem>(std::vector<TowerElem>{-(x + ratel(d + 1)),
                                                                   TowerElem(), ratel(1)}),
                            n);
          break;
        case 3:
          tw->add_dihedral(Poly<TowerElem>(std::vector<TowerElem>{-x, TowerElem(), ratel(1)}),
                           ratel(1), n + "a", n + "e");
          break;
        case 4:
          tw->add_sl2(TowerElem(), x, ratel(1), n + "a", n + "y", n + "e", n + "x");
          break;
        default:
          tw->add_weierstrass(AlgNum(Rat(0)), AlgNum(Rat(4)), ratel(1), n + "t", n + "w");
          break;
      }
    }
    Certificate base = random_base_cert(rng, tw);
    DescentReport out = descend_all(lift(base, tw->size() - 1), tw);
    ok = ok && out.ok && verify(out.output, tw) && out.output.f == base.f &&
         cert_equal(out.output, normalize_constants(base));
  }
  report(7, "100 random certificates lifted over depth-3 mixed towers descend to the base", ok,
         tm.seconds(), 300.0);
}

TEST_CASE("criterion 8: fabricated bad certificates are rejected with diagnostic codes") {
  Timer tm;
  const std::set<std::string> documented = {
      "UNVERIFIED",          "F_NOT_IN_BASE",
      "BAD_LAYER",           "MONOMIAL_ARG_STRUCTURE",
      "MONOMIAL_REMAINDER_STRUCTURE", "NEW_CONSTANT",
      "RESIDUAL_GENERATOR_TERM",      "ALGEBRAIC_STRUCTURE",
      "SL2_RESIDUE",         "SL2_EXPONENT",
      "WEIER_MEMBER"};
  std::mt19937_64 rng(808);
  bool ok = true;
  int rejected = 0;
  auto expect_reject = [&](const Certificate& c, const TowerPtr& tw) {
    DescentReport rep = descend_all(c, tw);
    if (rep.ok || documented.count(rep.code) == 0 || rep.message.empty()) {
      ok = false;
      std::printf("  unexpected: ok=%d code='%s'\n", (int)rep.ok, rep.code.c_str());
    } else {
      ++rejected;
    }
  };

  for (int i = 0; i < 8; ++i) {
    // verification failures: tampered integrand or constant
    auto tw = Tower::create();
    TowerElem x = tw->x();
    tw->add_log(x + ratel(1), "t1");
    Certificate c = lift(random_base_cert(rng, tw), 1);
    if (i % 2)
      c.f = c.f + ratel(1) / (x + ratel(3 + i));
    else
      c.v = c.v + tw->gen(1) * x;  // desynchronizes v from f
    expect_reject(c, tw);
  }
  for (int i = 0; i < 8; ++i) {
    // integrands that never reach the base field
    auto tw = Tower::create();
    TowerElem x = tw->x();
    Certificate c;
    switch (i % 4) {
      case 0: {
        int lt = tw->add_log(x, "t1");
        TowerElem t = tw->gen(lt);
        c = make_cert(lt, {{AlgNum(Rat(1)), t}}, TowerElem(), logderiv(t));
        break;
      }
      case 1: {
        int lt = tw->add_exp(x, "t1");
        TowerElem t = tw->gen(lt);
        c = make_cert(lt, {}, ratel(1) / t, derive(ratel(1) / t));
        break;
      }
      case 2: {
        int la = tw->add_dihedral(
            Poly<TowerElem>(std::vector<TowerElem>{-x, TowerElem(), ratel(1)}), ratel(1),
            "alpha", "eta");
        TowerElem eta = tw->gen(la + 1);
        c = make_cert(la + 1, {{AlgNum(Rat(1)), eta}}, TowerElem(), tw->gen(la));
        break;
      }
      default: {
        int lt = tw->add_weierstrass(AlgNum(Rat(0)), AlgNum(Rat(4)), ratel(1), "th", "thp");
        TowerElem th = tw->gen(lt);
        c = make_cert(lt + 1, {{AlgNum(Rat(1)), th}}, TowerElem(), logderiv(th));
        break;
      }
    }
    if (!verify(c, tw)) ok = false;  // these are honest identities, just not base-bound
    expect_reject(c, tw);
  }
  for (int i = 0; i < 4; ++i) {
    // verified identities whose generator contribution cannot be eliminated
    auto tw = Tower::create();
    TowerElem x = tw->x();
    TowerElem arg = ratel(1) / (x * x + ratel(1 + i));
    Certificate c;
    if (i % 2) {
      int lt = tw->add_primitive(arg, "t1");
      c = make_cert(lt, {}, tw->gen(lt), arg);
    } else {
      int lt = tw->add_hyperexp(arg, "t1");
      c = make_cert(lt, {{AlgNum(Rat(1)), tw->gen(lt)}}, TowerElem(), arg);
    }
    if (!verify(c, tw)) ok = false;
    expect_reject(c, tw);
  }
  ok = ok && rejected == 20;
  report(8, "20 bad certificates rejected, each with a documented diagnostic code", ok,
         tm.seconds(), 60.0);
}
