#pragma once

#include <gmpxx.h>

#include <string>

namespace conslaw {

/// Exact rational scalar. All coefficient arithmetic in the library is exact;
/// nothing is ever rounded.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational rat(long n) { return Rational(n); }

inline Rational rat(long n, long d) {
    Rational q(n, d);
    q.canonicalize();
    return q;
}

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

/// "p" for integers, "p/q" otherwise.
inline std::string rat_str(const Rational& q) { return q.get_str(); }

/// Size measure used for pivot selection: max(|numerator|, denominator).
inline Integer rat_height(const Rational& q) {
    Integer n = abs(q.get_num());
    const Integer& d = q.get_den();
    return n > d ? n : Integer(d);
}

/// Floor division of integers, rounding toward minus infinity.
inline long floordiv(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace conslaw
