// Command-line front end: expression parsing, tower/certificate file IO and
// the engine's operations behind subcommands.  Exit codes: 0 success, 1
// domain error (with a machine-readable {"error": ...} object under --json),
// 2 usage error.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "finterm/io.hpp"
#include "finterm/laurent.hpp"

using finterm::json;

namespace {

finterm::TowerPtr load_tower(const std::string& path) {
  if (path.empty()) return finterm::Tower::create();
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open file: " + path);
  json j = json::parse(in);
  return finterm::tower_from_json(j);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open file: " + path);
  return json::parse(in);
}

std::string cert_pretty(const finterm::Certificate& c) {
  std::string out = "level " + std::to_string(c.level) + "\n";
  for (auto& t : c.terms)
    out += "  + " + finterm::algnum_to_json(t.c).dump() + " * log(" +
           finterm::elem_to_json(t.u).dump() + ")\n";
  out += "  + d/dx " + finterm::elem_to_json(c.v).dump() + "\n";
  out += "  = " + finterm::elem_to_json(c.f).dump() + "\n";
  return out;
}

struct App {
  CLI::App app{"symbolic certificates of elementary integrability over differential towers",
               "finterm"};
  bool as_json = false;
  int exit_code = 0;

  void emit(const json& j, const std::string& pretty) {
    if (as_json)
      std::cout << j.dump() << "\n";
    else
      std::cout << pretty;
  }

  void fail(const std::string& msg) {
    if (as_json)
      std::cout << json{{"error", msg}}.dump() << "\n";
    else
      std::cerr << "error: " << msg << "\n";
    exit_code = 1;
  }

  int run(int argc, char** argv);
};

int App::run(int argc, char** argv) {
  app.require_subcommand(1);
  app.add_flag("--json", as_json, "emit machine-readable JSON instead of text");

  // ---- derive ----
  auto* c_derive = app.add_subcommand("derive", "differentiate an expression");
  static std::string d_tower, d_expr;
  c_derive->add_option("--tower", d_tower, "tower JSON file (default: rational base only)");
  c_derive->add_option("expr", d_expr, "expression to differentiate")->required();
  c_derive->callback([&] {
    auto tw = load_tower(d_tower);
    finterm::TowerElem r = derive(finterm::parse_expr(d_expr, tw));
    json e = finterm::elem_to_json(r);
    emit(json{{"result", e}}, e.dump() + "\n");
  });

  // ---- integrate-rational ----
  auto* c_int = app.add_subcommand("integrate-rational",
                                   "integrate a rational function of x");
  static std::string i_expr;
  c_int->add_option("expr", i_expr, "rational integrand in x")->required();
  c_int->callback([&] {
    auto tw = finterm::Tower::create();
    finterm::TowerElem f = finterm::parse_expr(i_expr, tw);
    if (f.level() > 0)
      throw std::domain_error("integrate-rational: the integrand must be rational in x");
    finterm::RatFunc<finterm::AlgNum> rf = finterm::to_base_ratfunc(f);
    finterm::RatIntResult r = finterm::integrate_rational(rf);
    if (!finterm::ratint_verify(rf, r))
      throw std::domain_error("integration result failed its own verification");
    finterm::Certificate c = finterm::ratint_to_cert(r, rf, tw);
    json out = finterm::cert_to_json(c, r.rootsums);
    std::string pretty = cert_pretty(c);
    if (!r.rootsums.empty())
      pretty += "  (+ " + std::to_string(r.rootsums.size()) + " root-sum term(s))\n";
    emit(out, pretty);
  });

  // ---- verify-cert ----
  auto* c_ver = app.add_subcommand("verify-cert", "check a certificate identity exactly");
  static std::string v_tower, v_cert;
  c_ver->add_option("--tower", v_tower, "tower JSON file");
  c_ver->add_option("--cert", v_cert, "certificate JSON file")->required();
  c_ver->callback([&] {
    auto tw = load_tower(v_tower);
    std::vector<finterm::RootSumTerm> rootsums;
    finterm::Certificate c = finterm::cert_from_json(load_json(v_cert), tw, &rootsums);
    if (!finterm::verify_with_rootsums(c, tw, rootsums)) throw std::domain_error("identity fails");
    emit(json{{"ok", true}}, "ok\n");
  });

  // ---- descend ----
  auto* c_des = app.add_subcommand("descend",
                                   "rewrite a certificate over the base of its tower");
  static std::string s_tower, s_cert;
  static bool s_trace = false;
  c_des->add_option("--tower", s_tower, "tower JSON file")->required();
  c_des->add_option("--cert", s_cert, "certificate JSON file")->required();
  c_des->add_flag("--trace", s_trace, "include the per-layer rule trace");
  c_des->callback([&] {
    auto tw = load_tower(s_tower);
    finterm::Certificate c = finterm::cert_from_json(load_json(s_cert), tw);
    finterm::DescentReport rep = finterm::descend_all(c, tw);
    if (!rep.ok) {
      std::string msg = rep.code + ": " + rep.message;
      if (!rep.diagnostics.empty()) msg += " [" + rep.diagnostics + "]";
      if (as_json) {
        std::cout << finterm::report_to_json(rep).dump() << "\n";
        exit_code = 1;
        return;
      }
      throw std::domain_error(msg);
    }
    json out = finterm::cert_to_json(rep.output);
    std::string pretty = cert_pretty(rep.output);
    if (s_trace) {
      json tr = json::array();
      for (auto& st : rep.trace) {
        json e{{"layer", st.layer_index}, {"kind", st.kind}, {"rule", st.rule}};
        if (!st.note.empty()) e["note"] = st.note;
        tr.push_back(std::move(e));
        pretty += "layer " + std::to_string(st.layer_index) + " (" + st.kind +
                  "): " + st.rule + (st.note.empty() ? "" : " — " + st.note) + "\n";
      }
      out["trace"] = tr;
    }
    emit(out, pretty);
  });

  // ---- laurent ----
  auto* c_lau = app.add_subcommand(
      "laurent", "expand an element in powers of (generator - point)");
  static std::string l_tower, l_expr, l_point;
  static int l_level = -1, l_trunc = -1;
  c_lau->add_option("--tower", l_tower, "tower JSON file");
  c_lau->add_option("--point", l_point, "expansion point (constant at the chosen level)")
      ->required();
  c_lau->add_option("--level", l_level, "generator level to expand in (default: the element's)");
  c_lau->add_option("--truncation", l_trunc,
                    "number of coefficients past the leading one (default 8, or "
                    "FINTERM_MAX_TRUNCATION)");
  c_lau->add_option("expr", l_expr, "element to expand")->required();
  c_lau->callback([&] {
    auto tw = load_tower(l_tower);
    finterm::TowerElem x = finterm::parse_expr(l_expr, tw);
    finterm::TowerElem a = finterm::parse_expr(l_point, tw);
    int level = l_level >= 0 ? l_level : x.level();
    if (level < 0) throw std::domain_error("laurent: pass --level to expand a constant");
    finterm::LaurentSeries s = finterm::expand(x, tw, level, a, l_trunc);
    json coeffs = json::array();
    std::string pretty;
    if (s.identically_zero) {
      pretty = "zero within the computed window\n";
    } else {
      pretty = "order " + std::to_string(s.order) + "\n";
      for (int j = s.order; j <= s.order + s.truncation; ++j) {
        json cj = finterm::elem_to_json(s.coeff(j));
        coeffs.push_back(cj);
        pretty += "  [" + std::to_string(j) + "] " + cj.dump() + "\n";
      }
    }
    emit(json{{"order", s.order},
              {"coeffs", coeffs},
              {"truncation", s.truncation},
              {"identically_zero", s.identically_zero}},
         pretty);
  });

  // ---- riccati ----
  auto* c_ric = app.add_subcommand(
      "riccati", "rational solutions of X' + X^2 - r X - s = 0 over the base");
  static std::string r_r, r_s;
  c_ric->add_option("--r", r_r, "coefficient r as a rational expression in x")->required();
  c_ric->add_option("--s", r_s, "coefficient s as a rational expression in x")->required();
  c_ric->callback([&] {
    auto tw = finterm::Tower::create();
    finterm::TowerElem r = finterm::parse_expr(r_r, tw);
    finterm::TowerElem s = finterm::parse_expr(r_s, tw);
    if (r.level() > 0 || s.level() > 0)
      throw std::domain_error("riccati: r and s must be rational in x");
    finterm::RiccatiSolutions sols = finterm::rational_solutions(
        finterm::to_base_ratfunc(r), finterm::to_base_ratfunc(s), nullptr);
    json out = finterm::riccati_to_json(sols, tw);
    std::string pretty;
    if (sols.solutions.empty()) pretty = "no rational solutions\n";
    for (auto& u : sols.solutions)
      pretty += finterm::elem_to_json(finterm::from_base_ratfunc(u, tw)).dump() + "\n";
    if (sols.family) pretty += "one-parameter family: " + sols.family_note + "\n";
    emit(out, pretty);
  });

  // ---- build-tower ----
  auto* c_bld = app.add_subcommand("build-tower",
                                   "validate a tower file and echo its canonical form");
  static std::string b_tower;
  c_bld->add_option("file", b_tower, "tower JSON file")->required();
  c_bld->callback([&] {
    auto tw = load_tower(b_tower);
    json out = finterm::tower_to_json(tw);
    emit(out, out.dump(2) + "\n");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  } catch (const std::exception& e) {
    fail(e.what());
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  App a;
  return a.run(argc, argv);
}
