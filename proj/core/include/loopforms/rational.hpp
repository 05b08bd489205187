#pragma once

#include <gmpxx.h>

#include <string>

namespace loopforms {

// Exact arbitrary-precision rational. Everything in this library is exact;
// there is no floating point anywhere.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

inline Rat rat_from_string(const std::string& s) {
  Rat q(s);
  q.canonicalize();
  return q;
}

inline std::string rat_to_string(const Rat& q) { return q.get_str(); }

inline Rat rat_pow(const Rat& base, unsigned e) {
  Rat r = 1;
  Rat b = base;
  while (e) {
    if (e & 1u) r *= b;
    b *= b;
    e >>= 1u;
  }
  return r;
}

}  // namespace loopforms
