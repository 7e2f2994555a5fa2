#pragma once

// Wigner 3-j and 6-j symbols, evaluated from the Racah sum formulas in exact
// rational arithmetic and rounded to double once at the end. Arguments are
// half-integers passed as doubles; internally everything is carried as
// doubled (2j) integers so all factorial arguments are exact.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace diamondcomb {

namespace detail {

using bigint = boost::multiprecision::cpp_int;
using bigfloat = boost::multiprecision::cpp_bin_float_50;

inline bigint factorial_big(long n) {
  if (n < 0) throw std::logic_error("factorial of negative argument");
  bigint f = 1;
  for (long i = 2; i <= n; ++i) f *= i;
  return f;
}

// Doubled angular momentum from a double, rejecting non-half-integer input.
inline long to_twice(double j, const char* what) {
  double t = 2.0 * j;
  long r = std::lround(t);
  if (!std::isfinite(t) || std::fabs(t - static_cast<double>(r)) > 1e-9)
    throw std::invalid_argument(std::string(what) +
                                " must be integer or half-integer");
  return r;
}

// Triangle rule on doubled values, including the integer-sum requirement.
inline bool triad_ok(long ta, long tb, long tc) {
  if ((ta + tb + tc) % 2 != 0) return false;
  return tc >= std::labs(ta - tb) && tc <= ta + tb;
}

// Delta(abc) = (a+b-c)! (a-b+c)! (-a+b+c)! / (a+b+c+1)!  with doubled inputs.
inline void triangle_coefficient(long ta, long tb, long tc, bigint& num,
                                 bigint& den) {
  num = factorial_big((ta + tb - tc) / 2) * factorial_big((ta - tb + tc) / 2) *
        factorial_big((-ta + tb + tc) / 2);
  den = factorial_big((ta + tb + tc) / 2 + 1);
}

inline double rational_sqrt_times(const bigint& sq_num, const bigint& sq_den,
                                  const bigint& s_num, const bigint& s_den) {
  // value = sqrt(sq_num/sq_den) * (s_num/s_den)
  bigfloat v = sqrt(bigfloat(sq_num) / bigfloat(sq_den));
  v *= bigfloat(s_num) / bigfloat(s_den);
  return static_cast<double>(v);
}

}  // namespace detail

inline double wigner_3j(double j1, double j2, double j3, double m1, double m2,
                        double m3) {
  using namespace detail;
  const long tj1 = to_twice(j1, "j1"), tj2 = to_twice(j2, "j2"),
             tj3 = to_twice(j3, "j3");
  const long tm1 = to_twice(m1, "m1"), tm2 = to_twice(m2, "m2"),
             tm3 = to_twice(m3, "m3");
  if (tj1 < 0 || tj2 < 0 || tj3 < 0)
    throw std::invalid_argument("negative angular momentum");
  if (std::labs(tm1) > tj1 || std::labs(tm2) > tj2 || std::labs(tm3) > tj3)
    throw std::invalid_argument("|m| exceeds j");
  if ((tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj3 + tm3) % 2 != 0)
    throw std::invalid_argument("m not aligned with j (parity mismatch)");

  if (tm1 + tm2 + tm3 != 0) return 0.0;
  if (!triad_ok(tj1, tj2, tj3)) return 0.0;

  // Racah sum over t; all arguments below are plain integers.
  const long p1 = (tj3 - tj2 + tm1) / 2;  // t + p1 >= 0
  const long p2 = (tj3 - tj1 - tm2) / 2;  // t + p2 >= 0
  const long q1 = (tj1 + tj2 - tj3) / 2;  // q1 - t >= 0
  const long q2 = (tj1 - tm1) / 2;        // q2 - t >= 0
  const long q3 = (tj2 + tm2) / 2;        // q3 - t >= 0
  const long tmin = std::max({0L, -p1, -p2});
  const long tmax = std::min({q1, q2, q3});
  if (tmin > tmax) return 0.0;

  bigint s_num = 0, s_den = 1;
  for (long t = tmin; t <= tmax; ++t) {
    bigint d = factorial_big(t) * factorial_big(t + p1) * factorial_big(t + p2) *
               factorial_big(q1 - t) * factorial_big(q2 - t) *
               factorial_big(q3 - t);
    // s += (-1)^t / d  as an exact fraction
    bigint term_num = (t % 2 == 0) ? bigint(1) : bigint(-1);
    s_num = s_num * d + term_num * s_den;
    s_den *= d;
  }
  if (s_num == 0) return 0.0;

  bigint tri_num, tri_den;
  triangle_coefficient(tj1, tj2, tj3, tri_num, tri_den);
  bigint sq_num = tri_num;
  bigint sq_den = tri_den;
  sq_num *= factorial_big((tj1 + tm1) / 2) * factorial_big((tj1 - tm1) / 2) *
            factorial_big((tj2 + tm2) / 2) * factorial_big((tj2 - tm2) / 2) *
            factorial_big((tj3 + tm3) / 2) * factorial_big((tj3 - tm3) / 2);

  const long phase_exp = (tj1 - tj2 - tm3) / 2;
  double sign = (phase_exp % 2 == 0) ? 1.0 : -1.0;
  return sign * rational_sqrt_times(sq_num, sq_den, s_num, s_den);
}

inline double wigner_6j(double j1, double j2, double j3, double j4, double j5,
                        double j6) {
  using namespace detail;
  const long t1 = to_twice(j1, "j1"), t2 = to_twice(j2, "j2"),
             t3 = to_twice(j3, "j3"), t4 = to_twice(j4, "j4"),
             t5 = to_twice(j5, "j5"), t6 = to_twice(j6, "j6");
  if (t1 < 0 || t2 < 0 || t3 < 0 || t4 < 0 || t5 < 0 || t6 < 0)
    throw std::invalid_argument("negative angular momentum");

  if (!triad_ok(t1, t2, t3) || !triad_ok(t1, t5, t6) || !triad_ok(t4, t2, t6) ||
      !triad_ok(t4, t5, t3))
    return 0.0;

  const long a1 = (t1 + t2 + t3) / 2, a2 = (t1 + t5 + t6) / 2,
             a3 = (t4 + t2 + t6) / 2, a4 = (t4 + t5 + t3) / 2;
  const long b1 = (t1 + t2 + t4 + t5) / 2, b2 = (t2 + t3 + t5 + t6) / 2,
             b3 = (t3 + t1 + t6 + t4) / 2;
  const long tmin = std::max({a1, a2, a3, a4});
  const long tmax = std::min({b1, b2, b3});
  if (tmin > tmax) return 0.0;

  bigint s_num = 0, s_den = 1;
  for (long t = tmin; t <= tmax; ++t) {
    bigint d = factorial_big(t - a1) * factorial_big(t - a2) *
               factorial_big(t - a3) * factorial_big(t - a4) *
               factorial_big(b1 - t) * factorial_big(b2 - t) *
               factorial_big(b3 - t);
    bigint n = factorial_big(t + 1);
    if (t % 2 != 0) n = -n;
    // s += n / d
    s_num = s_num * d + n * s_den;
    s_den *= d;
  }
  if (s_num == 0) return 0.0;

  bigint sq_num = 1, sq_den = 1, tn, td;
  triangle_coefficient(t1, t2, t3, tn, td);
  sq_num *= tn; sq_den *= td;
  triangle_coefficient(t1, t5, t6, tn, td);
  sq_num *= tn; sq_den *= td;
  triangle_coefficient(t4, t2, t6, tn, td);
  sq_num *= tn; sq_den *= td;
  triangle_coefficient(t4, t5, t3, tn, td);
  sq_num *= tn; sq_den *= td;

  return rational_sqrt_times(sq_num, sq_den, s_num, s_den);
}

}  // namespace diamondcomb
