#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "finterm/descent.hpp"
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

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const DescentError& e) {
    return e.code;
  }
  return "";
}

// random certificate with base-field data only
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

}  // namespace

TEST_CASE("log layer: linear remainder folds into a logarithm term") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int lt = tw->add_log(x, "t");
  TowerElem t = tw->gen(lt);
  // f = 1/x certified by v = log x alone
  Certificate c = make_cert(lt, {}, t, ratel(1) / x);
  REQUIRE(verify(c, tw));
  Certificate out = descend_monomial(c, tw);
  CHECK(out.level == 0);
  REQUIRE(out.terms.size() == 1);
  CHECK(out.terms[0].c == AlgNum(Rat(1)));
  CHECK(out.terms[0].u == x);
  CHECK(is_zero(out.v));
  CHECK(verify(out, tw));
  CHECK(out.f == c.f);
}

TEST_CASE("exp layer: generator exponents fold into the remainder") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int lt = tw->add_exp(x, "t");
  TowerElem t = tw->gen(lt);
  // f = 1 certified by u = exp(x)
  Certificate c = make_cert(lt, {{AlgNum(Rat(1)), t}}, TowerElem(), ratel(1));
  REQUIRE(verify(c, tw));
  Certificate out = descend_monomial(c, tw);
  CHECK(out.level == 0);
  CHECK(out.terms.empty());
  CHECK(out.v == x);
  CHECK(verify(out, tw));

  // mixed argument x^3 * exp(2x)
  Certificate c2 = make_cert(lt, {{AlgNum(Rat(1, 2)), x * x * x * t * t}},
                             x * x, TowerElem());
  c2.f = recompute_f(c2);
  REQUIRE(c2.f.level() <= 0);
  Certificate out2 = descend_monomial(c2, tw);
  CHECK(verify(out2, tw));
  CHECK(out2.f == c2.f);
  REQUIRE(out2.terms.size() == 1);
  CHECK(out2.terms[0].u == x * x * x);
}

TEST_CASE("certificate already below the layer passes through unchanged") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int lt = tw->add_log(x, "t");
  Certificate c = make_cert(0, {{AlgNum(Rat(1)), x}}, x * x, TowerElem());
  c.f = recompute_f(c);
  Certificate out = descend_monomial(lift(c, lt), tw);
  CHECK(cert_equal(out, normalize_constants(c)));
}

TEST_CASE("algebraic layer: norms replace arguments, constants scale by 1/deg") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int la = tw->add_algebraic(Poly<TowerElem>(std::vector<TowerElem>{-x, TowerElem(), ratel(1)}),
                             "r");
  TowerElem r = tw->gen(la);  // r^2 = x
  Certificate c = make_cert(la, {{AlgNum(Rat(2)), r}}, TowerElem(), ratel(1) / x);
  REQUIRE(verify(c, tw));
  Certificate out = descend_algebraic(c, tw);
  CHECK(out.level == 0);
  REQUIRE(out.terms.size() == 1);
  CHECK(out.terms[0].c == AlgNum(Rat(1)));
  CHECK(out.terms[0].u == x);
  CHECK(is_zero(out.v));
  CHECK(verify(out, tw));

  // remainder at the level traces: v = r^2 - x is 0 in canonical form
  Certificate c2 = make_cert(la, {}, r * r - x, TowerElem());
  CHECK(is_zero(c2.v));
  Certificate out2 = descend_algebraic(c2, tw);
  CHECK(is_zero(out2.v));
  CHECK(verify(out2, tw));

  // data below the level pass through exactly
  Certificate c3 = make_cert(0, {{AlgNum(Rat(3)), x + ratel(1)}}, x, TowerElem());
  c3.f = recompute_f(c3);
  Certificate out3 = descend_algebraic(lift(c3, la), tw);
  CHECK(cert_equal(out3, normalize_constants(c3)));
}

TEST_CASE("dihedral layer: quadratic trace reaches the base") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int la = tw->add_dihedral(Poly<TowerElem>(std::vector<TowerElem>{-x, TowerElem(), ratel(1)}),
                            ratel(1), "alpha", "eta");
  TowerElem alpha = tw->gen(la);
  Certificate c = make_cert(la, {{AlgNum(Rat(1)), alpha}}, TowerElem(), ratel(1, 2) / x);
  REQUIRE(verify(c, tw));
  Certificate out = descend_dihedral(c, tw);
  CHECK(out.level == 0);
  REQUIRE(out.terms.size() == 1);
  CHECK(out.terms[0].c == AlgNum(Rat(1, 2)));
  CHECK(out.terms[0].u == x);
  CHECK(is_zero(out.v));
  CHECK(verify(out, tw));
}

TEST_CASE("dihedral layer: hyperexponential argument with cancelling remainder") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int la = tw->add_dihedral(Poly<TowerElem>(std::vector<TowerElem>{-x, TowerElem(), ratel(1)}),
                            ratel(1), "alpha", "eta");
  TowerElem alpha = tw->gen(la), eta = tw->gen(la + 1);
  // v = -(2x/3) alpha satisfies v' = -alpha, so f = eta'/eta + v' = 0
  TowerElem v = ratel(-2, 3) * x * alpha;
  REQUIRE(derive(v) == -alpha);
  Certificate c = make_cert(la + 1, {{AlgNum(Rat(1)), eta}}, v, TowerElem());
  REQUIRE(verify(c, tw));
  Certificate out = descend_dihedral(c, tw);
  CHECK(out.level == 0);
  CHECK(out.terms.empty());  // gamma = 1, so the collected e-term is trivial
  CHECK(is_zero(out.v));
  CHECK(verify(out, tw));
}

TEST_CASE("dihedral layer: integrand above the base is rejected") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int la = tw->add_dihedral(Poly<TowerElem>(std::vector<TowerElem>{-x, TowerElem(), ratel(1)}),
                            ratel(1), "alpha", "eta");
  TowerElem eta = tw->gen(la + 1);
  Certificate c = make_cert(la + 1, {{AlgNum(Rat(1)), eta}}, TowerElem(), TowerElem());
  c.f = recompute_f(c);  // = alpha, not in the base
  REQUIRE(verify(c, tw));
  CHECK(code_of([&] { descend_dihedral(c, tw); }) == "F_NOT_IN_BASE");
}

TEST_CASE("randomized dihedral round trips") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    auto tw = Tower::create();
    TowerElem x = tw->x();
    int la = tw->add_dihedral(
        Poly<TowerElem>(std::vector<TowerElem>{-(x + ratel(rep % 3)), TowerElem(), ratel(1)}),
        ratel(1), "alpha", "eta");
    Certificate base = random_base_cert(rng, tw);
    Certificate out = descend_dihedral(lift(base, la + 1), tw);
    CHECK(verify(out, tw));
    CHECK(cert_equal(out, normalize_constants(base)));
  }
}

TEST_CASE("sl2 layer: the Airy certificate descends with zero exponent sum") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int la = tw->add_sl2(TowerElem(), x, ratel(1), "alpha", "y", "eta", "xi");
  TowerElem y = tw->gen(la + 1);
  Certificate c = make_cert(la + 3,
                            {{AlgNum(Rat(1)), ratel(1) / y}, {AlgNum(Rat(1)), x * x * x * y}},
                            TowerElem(), ratel(3) / x);
  REQUIRE(verify(c, tw));
  std::string note;
  Certificate out = descend_sl2(c, tw, &note);
  CHECK(out.level == la - 1);
  REQUIRE(out.terms.size() == 1);
  CHECK(out.terms[0].c == AlgNum(Rat(1)));
  CHECK(out.terms[0].u == x * x * x);
  CHECK(is_zero(out.v));
  CHECK(verify(out, tw));
  CHECK(note == "e = [0]");
}

TEST_CASE("sl2 layer: certificates lifted from the base pass through") {
  std::mt19937_64 rng(23);
  auto tw = Tower::create();
  int la = tw->add_sl2(TowerElem(), tw->x(), ratel(1), "alpha", "y", "eta", "xi");
  for (int rep = 0; rep < 5; ++rep) {
    Certificate base = random_base_cert(rng, tw);
    Certificate out = descend_sl2(lift(base, la + 3), tw);
    CHECK(verify(out, tw));
    CHECK(cert_equal(out, normalize_constants(base)));
  }
}

TEST_CASE("sl2 layer: quadratic-generator integrand is rejected at the precondition") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int la = tw->add_sl2(TowerElem(), x, ratel(1), "alpha", "y", "eta", "xi");
  TowerElem xi = tw->gen(la + 3);
  Certificate c = make_cert(la + 3, {{AlgNum(Rat(1)), xi}}, TowerElem(), TowerElem());
  c.f = recompute_f(c);  // = alpha
  REQUIRE(verify(c, tw));
  CHECK(code_of([&] { descend_sl2(c, tw); }) == "F_NOT_IN_BASE");
}

TEST_CASE("sl2 assertions: residues and nonzero exponent sums carry diagnostics") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int la = tw->add_sl2(TowerElem(), x, ratel(1), "alpha", "y", "eta", "xi");
  TowerElem alpha = tw->gen(la);
  // an argument stuck at the Riccati level: series orders at its constant
  // poles are attached to the diagnostic
  try {
    descent_detail::sl2_finish({{AlgNum(Rat(1)), ratel(1) / (alpha - ratel(1))}}, TowerElem(),
                               AlgNum(Rat(0)), tw, la, ratel(1) / x);
    FAIL("expected SL2_RESIDUE");
  } catch (const DescentError& e) {
    CHECK(e.code == "SL2_RESIDUE");
    CHECK(e.diagnostics.find("ord at [1] = -1") != std::string::npos);
  }
  // a nonzero collected exponent sum is its own diagnostic code
  try {
    descent_detail::sl2_finish({}, TowerElem(), AlgNum(Rat(1)), tw, la, ratel(1) / x);
    FAIL("expected SL2_EXPONENT");
  } catch (const DescentError& e) {
    CHECK(e.code == "SL2_EXPONENT");
    CHECK(e.diagnostics == "e = [1]");
  }
}

TEST_CASE("weierstrass layer: projection, cancellation, and rejection") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int lt = tw->add_weierstrass(AlgNum(Rat(0)), AlgNum(Rat(4)), ratel(1), "theta", "thetap");
  TowerElem theta = tw->gen(lt), w = tw->gen(lt + 1);

  // data below the layer project down unchanged
  Certificate c = make_cert(lt + 1, {{AlgNum(Rat(1)), x * x + ratel(1)}}, theta - theta,
                            ratel(2) * x / (x * x + ratel(1)));
  REQUIRE(verify(c, tw));
  Certificate out = descend_weierstrass(c, tw);
  CHECK(out.level == lt - 1);
  CHECK(verify(out, tw));
  CHECK(cert_equal(out, normalize_constants(make_cert(lt - 1, c.terms, c.v, c.f))));

  // the pair (1,-1) on (theta x, theta) merges to the base argument x
  Certificate c2 = make_cert(lt + 1, {{AlgNum(Rat(1)), theta * x}, {AlgNum(Rat(-1)), theta}},
                             TowerElem(), ratel(1) / x);
  REQUIRE(verify(c2, tw));
  Certificate out2 = descend_weierstrass(c2, tw);
  REQUIRE(out2.terms.size() == 1);
  CHECK(out2.terms[0].c == AlgNum(Rat(1)));
  CHECK(out2.terms[0].u == x);
  CHECK(verify(out2, tw));

  // integrand involving the generators is rejected at the precondition
  Certificate c3 = make_cert(lt + 1, {{AlgNum(Rat(1)), theta}}, TowerElem(), TowerElem());
  c3.f = recompute_f(c3);  // = thetap/theta
  REQUIRE(verify(c3, tw));
  CHECK(code_of([&] { descend_weierstrass(c3, tw); }) == "F_NOT_IN_BASE");

  // the membership diagnostic names the constant-point divisor
  std::string d = descent_detail::divisor_diagnostic(tw, lt, theta, "argument");
  CHECK(d.find("constant-point divisor") != std::string::npos);
  CHECK(d.find("oo") != std::string::npos);
}

TEST_CASE("residual generator terms cannot fold below honest primitive layers") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  TowerElem a = ratel(1) / (x * x + ratel(1));
  int lt = tw->add_primitive(a, "t");  // t' = 1/(x^2+1), no base antiderivative
  TowerElem t = tw->gen(lt);
  Certificate c = make_cert(lt, {}, t, a);
  REQUIRE(verify(c, tw));
  CHECK(code_of([&] { descend_monomial(c, tw); }) == "RESIDUAL_GENERATOR_TERM");

  auto tw2 = Tower::create();
  TowerElem x2 = tw2->x();
  TowerElem b = ratel(1) / (x2 * x2 + ratel(1));
  int lh = tw2->add_hyperexp(b, "h");  // h'/h = 1/(x^2+1)
  TowerElem h = tw2->gen(lh);
  Certificate c2 = make_cert(lh, {{AlgNum(Rat(1)), h}}, TowerElem(), b);
  REQUIRE(verify(c2, tw2));
  CHECK(code_of([&] { descend_monomial(c2, tw2); }) == "RESIDUAL_GENERATOR_TERM");
}

TEST_CASE("monomial structure assertions reject malformed data") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int lt = tw->add_log(x, "t");
  TowerElem t = tw->gen(lt);
  auto step_codes = [&](std::vector<CertTerm> terms, TowerElem v) {
    Certificate c = make_cert(lt, std::move(terms), std::move(v), TowerElem());
    return code_of([&] { descent_detail::monomial_step(c, tw, lt); });
  };
  CHECK(step_codes({{AlgNum(Rat(1)), t}}, TowerElem()) == "MONOMIAL_ARG_STRUCTURE");
  CHECK(step_codes({}, ratel(1) / t) == "MONOMIAL_REMAINDER_STRUCTURE");
  CHECK(step_codes({}, t * t) == "MONOMIAL_REMAINDER_STRUCTURE");
  CHECK(step_codes({}, x * t) == "MONOMIAL_REMAINDER_STRUCTURE");

  int le = tw->add_exp(x, "s");
  TowerElem s = tw->gen(le);
  Certificate ch = make_cert(le, {{AlgNum(Rat(1)), s + x}}, TowerElem(), TowerElem());
  CHECK(code_of([&] { descent_detail::monomial_step(ch, tw, le); }) ==
        "MONOMIAL_ARG_STRUCTURE");
  Certificate cv = make_cert(le, {}, x * s * s, TowerElem());
  CHECK(code_of([&] { descent_detail::monomial_step(cv, tw, le); }) ==
        "MONOMIAL_REMAINDER_STRUCTURE");
}

TEST_CASE("unverified and out-of-base inputs are always rejected, never descended") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int lt = tw->add_log(x, "t");
  TowerElem t = tw->gen(lt);
  // wrong f
  Certificate bad = make_cert(lt, {{AlgNum(Rat(1)), x}}, TowerElem(), ratel(2) / x);
  CHECK(code_of([&] { descend_monomial(bad, tw); }) == "UNVERIFIED");
  DescentReport rep = descend_all(bad, tw);
  CHECK_FALSE(rep.ok);
  CHECK(rep.code == "UNVERIFIED");
  // f above the base
  Certificate up = make_cert(lt, {{AlgNum(Rat(1)), t}}, TowerElem(), TowerElem());
  up.f = recompute_f(up);
  REQUIRE(verify(up, tw));
  DescentReport rep2 = descend_all(up, tw);
  CHECK_FALSE(rep2.ok);
  CHECK(rep2.code == "F_NOT_IN_BASE");
}

TEST_CASE("driver composes rules across stacked layers") {
  // base certificate under [log, weierstrass]
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int lt = tw->add_log(x, "t");
  tw->add_weierstrass(AlgNum(Rat(0)), AlgNum(Rat(4)), ratel(1), "theta", "thetap");
  Certificate base = make_cert(0, {{AlgNum(Rat(2)), x + ratel(1)}}, x, TowerElem());
  base.f = recompute_f(base);
  DescentReport rep = descend_all(lift(base, tw->size() - 1), tw);
  REQUIRE(rep.ok);
  CHECK(rep.trace.size() == 2);
  CHECK(rep.trace[0].rule == "weierstrass");
  CHECK(rep.trace[1].rule == "monomial");
  CHECK(cert_equal(rep.output, normalize_constants(base)));
  (void)lt;

  // the dihedral worked example embedded under an extra log layer
  auto tw2 = Tower::create();
  TowerElem x2 = tw2->x();
  int la = tw2->add_dihedral(
      Poly<TowerElem>(std::vector<TowerElem>{-x2, TowerElem(), ratel(1)}), ratel(1), "alpha",
      "eta");
  tw2->add_log(x2, "t");
  TowerElem alpha = tw2->gen(la);
  Certificate c = make_cert(tw2->size() - 1, {{AlgNum(Rat(1)), alpha}}, TowerElem(),
                            ratel(1, 2) / x2);
  DescentReport rep2 = descend_all(c, tw2);
  REQUIRE(rep2.ok);
  REQUIRE(rep2.output.terms.size() == 1);
  CHECK(rep2.output.terms[0].c == AlgNum(Rat(1, 2)));
  CHECK(rep2.output.terms[0].u == x2);
  CHECK(verify(rep2.output, tw2));

  // a tower with only the base layer descends by the identity
  auto tw3 = Tower::create();
  Certificate id = make_cert(0, {{AlgNum(Rat(1)), tw3->x()}}, TowerElem(),
                             ratel(1) / tw3->x());
  DescentReport rep3 = descend_all(id, tw3);
  REQUIRE(rep3.ok);
  CHECK(rep3.trace.empty());
  CHECK(cert_equal(rep3.output, id));
}

TEST_CASE("sl2 trace reports the observed exponent sum") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int la = tw->add_sl2(TowerElem(), x, ratel(1), "alpha", "y", "eta", "xi");
  TowerElem y = tw->gen(la + 1);
  Certificate c = make_cert(la + 3,
                            {{AlgNum(Rat(1)), ratel(1) / y}, {AlgNum(Rat(1)), x * x * x * y}},
                            TowerElem(), ratel(3) / x);
  DescentReport rep = descend_all(c, tw);
  REQUIRE(rep.ok);
  REQUIRE(rep.trace.size() == 1);
  CHECK(rep.trace[0].rule == "sl2");
  CHECK(rep.trace[0].note == "e = [0]");
}

TEST_CASE("round trips over random towers of depth <= 3 mixing all layer kinds") {
  std::mt19937_64 rng(1009);
  std::uniform_int_distribution<int> depth_d(1, 3), kind_d(0, 5);
  int done = 0;
  for (int rep = 0; rep < 100; ++rep) {
    auto tw = Tower::create();
    TowerElem x = tw->x();
    int depth = depth_d(rng);
    for (int d = 0; d < depth; ++d) {
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
    DescentReport rep_out = descend_all(lift(base, tw->size() - 1), tw);
    REQUIRE(rep_out.ok);
    CHECK(verify(rep_out.output, tw));
    CHECK(rep_out.output.f == base.f);
    CHECK(cert_equal(rep_out.output, normalize_constants(base)));
    ++done;
  }
  CHECK(done == 100);
}

TEST_CASE("descent keeps the constants inside the rational span of the inputs") {
  auto tw = Tower::create();
  TowerElem x = tw->x();
  int la = tw->add_algebraic(Poly<TowerElem>(std::vector<TowerElem>{-(x + ratel(1)),
                                                                    TowerElem(), ratel(1)}),
                             "r");
  TowerElem r = tw->gen(la);
  auto ar = adjoin_root(nullptr, Poly<AlgNum>(std::vector<AlgNum>{AlgNum(Rat(-2)),
                                                                 AlgNum(Rat(0)),
                                                                 AlgNum(Rat(1))}));
  AlgNum sqrt2 = ar.root;
  Certificate c = make_cert(la, {{sqrt2, r}, {AlgNum(Rat(1)), x}}, TowerElem(), TowerElem());
  c.f = recompute_f(c);
  REQUIRE(c.f.level() <= 0);
  REQUIRE(verify(c, tw));
  Certificate out = descend_algebraic(c, tw);
  REQUIRE(verify(out, tw));

  // coordinate matrix check: every output constant lies in the Q-span of the
  // input constants (trace moves only rescale by rationals)
  std::size_t dim = 2;
  auto coords_row = [&](const AlgNum& a) {
    std::vector<Rat> row(dim, Rat(0));
    const auto& co = a.coords();
    for (std::size_t i = 0; i < co.size() && i < dim; ++i) row[i] = co[i];
    return row;
  };
  std::vector<std::vector<Rat>> rows;
  for (auto& t : c.terms) rows.push_back(coords_row(t.c));
  auto rank_of = [&](std::vector<std::vector<Rat>> m) {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < dim && rank < m.size(); ++col) {
      std::size_t p = rank;
      while (p < m.size() && is_zero(m[p][col])) ++p;
      if (p == m.size()) continue;
      std::swap(m[p], m[rank]);
      for (std::size_t q = 0; q < m.size(); ++q) {
        if (q == rank || is_zero(m[q][col])) continue;
        Rat f = m[q][col] / m[rank][col];
        for (std::size_t j = 0; j < dim; ++j) m[q][j] = m[q][j] - f * m[rank][j];
      }
      ++rank;
    }
    return rank;
  };
  std::size_t base_rank = rank_of(rows);
  for (auto& t : out.terms) {
    auto aug = rows;
    aug.push_back(coords_row(t.c));
    CHECK(rank_of(aug) == base_rank);
  }
}
