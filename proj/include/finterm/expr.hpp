#pragma once

// Canonical text grammar for tower elements and its inverse printer.
//
//   expr   := ['-'] term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := base ('^' ['-'] integer)?
//   base   := integer | ident | '(' expr ')'
//
// There is no implicit multiplication and no prime/apostrophe token:
// derivative generators carry plain names ("thetap", not "theta'").
// Identifiers resolve against the generator names of a tower; integers are
// arbitrary-precision, and fractions arise through '/'.  parse(print(e)) == e
// for every element the printer accepts (printing requires all constants in
// the element to be rational).

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

#include "finterm/certificate.hpp"
#include "finterm/tower.hpp"

namespace finterm {

struct ParseError : std::runtime_error {
  std::size_t pos;  // 0-based offset into the source text
  ParseError(const std::string& msg, std::size_t p)
      : std::runtime_error(msg + " at position " + std::to_string(p)), pos(p) {}
};

namespace expr_detail {

struct Token {
  enum Kind { Number, Ident, Op, End } kind = End;
  std::string text;
  std::size_t pos = 0;
};

inline std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0, n = src.size();
  while (i < n) {
    char c = src[i];
    if (std::isspace((unsigned char)c)) {
      ++i;
      continue;
    }
    if (std::isdigit((unsigned char)c)) {
      std::size_t j = i;
      while (j < n && std::isdigit((unsigned char)src[j])) ++j;
      out.push_back({Token::Number, src.substr(i, j - i), i});
      i = j;
      continue;
    }
    if (std::isalpha((unsigned char)c) || c == '_') {
      std::size_t j = i;
      while (j < n && (std::isalnum((unsigned char)src[j]) || src[j] == '_')) ++j;
      out.push_back({Token::Ident, src.substr(i, j - i), i});
      i = j;
      continue;
    }
    if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^' || c == '(' || c == ')') {
      out.push_back({Token::Op, std::string(1, c), i});
      ++i;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", i);
  }
  out.push_back({Token::End, "", n});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, TowerPtr tw) : toks_(std::move(toks)), tw_(std::move(tw)) {}

  TowerElem run() {
    TowerElem e = expr();
    if (cur().kind != Token::End) throw ParseError("unexpected trailing input", cur().pos);
    return e;
  }

 private:
  const Token& cur() const { return toks_[i_]; }
  bool eat_op(const char* s) {
    if (cur().kind == Token::Op && cur().text == s) {
      ++i_;
      return true;
    }
    return false;
  }

  TowerElem expr() {
    bool neg = eat_op("-");
    TowerElem acc = term();
    if (neg) acc = -acc;
    for (;;) {
      if (eat_op("+"))
        acc = acc + term();
      else if (eat_op("-"))
        acc = acc - term();
      else
        return acc;
    }
  }

  TowerElem term() {
    TowerElem acc = factor();
    for (;;) {
      if (eat_op("*")) {
        acc = acc * factor();
      } else if (eat_op("/")) {
        std::size_t p = cur().pos;
        TowerElem d = factor();
        if (is_zero(d)) throw ParseError("division by zero", p);
        acc = acc / d;
      } else {
        return acc;
      }
    }
  }

  TowerElem factor() {
    TowerElem b = base();
    if (!eat_op("^")) return b;
    bool neg = eat_op("-");
    if (cur().kind != Token::Number) throw ParseError("integer exponent expected", cur().pos);
    std::size_t p = cur().pos;
    long e;
    try {
      e = std::stol(cur().text);
    } catch (const std::exception&) {
      throw ParseError("exponent out of range", p);
    }
    ++i_;
    if (neg) e = -e;
    if (e < 0 && is_zero(b)) throw ParseError("zero raised to a negative power", p);
    return cert_detail::int_pow(b, e);
  }

  TowerElem base() {
    const Token& t = cur();
    if (t.kind == Token::Number) {
      ++i_;
      return TowerElem(Rat(t.text, 10));
    }
    if (t.kind == Token::Ident) {
      for (int lv = 0; lv < tw_->size(); ++lv)
        if (tw_->levels[(std::size_t)lv].name == t.text) {
          ++i_;
          return tw_->gen(lv);
        }
      throw ParseError("unknown generator '" + t.text + "'", t.pos);
    }
    if (t.kind == Token::Op && t.text == "(") {
      ++i_;
      TowerElem e = expr();
      if (!eat_op(")")) throw ParseError("')' expected", cur().pos);
      return e;
    }
    throw ParseError("expression expected", t.pos);
  }

  std::vector<Token> toks_;
  TowerPtr tw_;
  std::size_t i_ = 0;
};

// Precedence levels used when deciding where the printer needs parentheses.
enum Prec { PREC_ADD = 0, PREC_MUL = 1, PREC_POW = 2, PREC_ATOM = 3 };

struct Piece {
  std::string s;
  int prec = PREC_ATOM;
  bool neg = false;  // s begins with a unary '-' that binds at additive level
};

inline std::string wrapped(const Piece& p, int min_prec) {
  if (p.prec < min_prec || (p.neg && min_prec > PREC_ADD)) return "(" + p.s + ")";
  return p.s;
}

inline Piece print_rat(const Rat& r) {
  Piece out;
  Rat a = r;
  a.canonicalize();
  out.neg = sgn(a) < 0;
  Rat mag = out.neg ? Rat(-a) : a;
  out.s = (out.neg ? "-" : "") + mag.get_str();
  out.prec = mag.get_den() == 1 ? PREC_ATOM : PREC_MUL;
  if (out.neg) out.prec = PREC_ADD;
  return out;
}

Piece print_elem(const TowerElem& e);

inline Piece print_poly(const Poly<TowerElem>& p, const std::string& name) {
  std::vector<Piece> terms;
  for (int i = p.degree(); i >= 0; --i) {
    if (is_zero(p[i])) continue;
    Piece c = print_elem(p[i]);
    Piece t;
    if (i == 0) {
      t = c;
    } else {
      std::string pw = i == 1 ? name : name + "^" + std::to_string(i);
      bool is_one = p[i].is_constant() && p[i].constant().is_rational() &&
                    p[i].constant().rational_value() == 1;
      bool is_neg_one = p[i].is_constant() && p[i].constant().is_rational() &&
                        p[i].constant().rational_value() == -1;
      if (is_one) {
        t = {pw, i == 1 ? PREC_ATOM : PREC_POW, false};
      } else if (is_neg_one) {
        t = {"-" + pw, PREC_ADD, true};
      } else {
        // strip a leading unary minus into the additive join
        std::string body = c.neg ? c.s.substr(1) : c.s;
        int body_prec = c.neg && c.prec == PREC_ADD ? PREC_MUL : c.prec;
        Piece cb{body, body_prec, false};
        t.s = (c.neg ? "-" : "") + wrapped(cb, PREC_MUL) + "*" + pw;
        t.prec = c.neg ? PREC_ADD : PREC_MUL;
        t.neg = c.neg;
      }
    }
    terms.push_back(std::move(t));
  }
  if (terms.empty()) return {"0", PREC_ATOM, false};
  Piece out;
  out.s = terms[0].s;
  // a piece beginning with '-' joins as subtraction of its first summand,
  // which re-parses to the same value by associativity
  for (std::size_t k = 1; k < terms.size(); ++k)
    out.s += terms[k].s[0] == '-' ? terms[k].s : "+" + terms[k].s;
  out.prec = terms.size() == 1 ? terms[0].prec : PREC_ADD;
  // the strip-the-minus rewrite in the caller is only sound for single terms
  out.neg = terms.size() == 1 && terms[0].neg;
  return out;
}

inline Piece print_elem(const TowerElem& e) {
  if (e.is_constant()) {
    const AlgNum& c = e.constant();
    if (!c.is_rational())
      throw std::domain_error("expression printer: non-rational constant has no text form");
    return print_rat(c.rational_value());
  }
  const std::string& name = e.tower()->levels[(std::size_t)e.level()].name;
  const auto& pr = e.parts();
  Piece num = print_poly(pr.num(), name);
  if (pr.den().degree() == 0 && pr.den()[0].is_constant() &&
      pr.den()[0].constant().is_rational() && pr.den()[0].constant().rational_value() == 1)
    return num;
  Piece den = print_poly(pr.den(), name);
  Piece out;
  out.s = wrapped(num, PREC_MUL) + "/" + wrapped(den, PREC_POW);
  out.prec = PREC_MUL;
  out.neg = num.neg && num.prec >= PREC_MUL;
  return out;
}

}  // namespace expr_detail

// Parse a text expression into a canonical element of the given tower.
inline TowerElem parse_expr(const std::string& src, const TowerPtr& tw) {
  return expr_detail::Parser(expr_detail::tokenize(src), tw).run();
}

// Print a canonical element back into the grammar.  Requires every constant
// occurring in the element to be rational; parse_expr(to_expr_string(e)) == e.
inline std::string to_expr_string(const TowerElem& e) {
  if (is_zero(e)) return "0";
  return expr_detail::print_elem(e).s;
}

}  // namespace finterm
