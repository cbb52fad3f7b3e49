#pragma once

// Exact rational arithmetic, backed by GMP.

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace finterm {

using Int = mpz_class;
using Rat = mpq_class;

inline bool is_zero(const Rat& a) { return sgn(a) == 0; }
inline bool is_one(const Rat& a) { return a == 1; }
inline Rat one_like(const Rat&) { return Rat(1); }
inline Rat zero_like(const Rat&) { return Rat(0); }

// Serialized form is "p" or "p/q" with q > 0 and gcd(p, q) = 1.
inline std::string to_string(const Rat& a) { return a.get_str(); }

inline Rat rat_from_string(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  if (sgn(r.get_den()) == 0) throw std::invalid_argument("zero denominator: " + s);
  r.canonicalize();
  return r;
}

// mpq_class(p, q) does not reduce; canonical form is required for ==
inline Rat rat(long p, long q = 1) {
  Rat r(p, q);
  r.canonicalize();
  return r;
}

// True iff a is an integer; value returned through n.
inline bool rat_is_int(const Rat& a, Int& n) {
  if (a.get_den() != 1) return false;
  n = a.get_num();
  return true;
}

}  // namespace finterm
