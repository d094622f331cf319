// scalar.hpp -- scalar fields for the engine.
//
// Two scalar types drive every templated module in this library:
//
//   * RationalComplex : exact complex numbers with rational real/imaginary
//     parts (GMP-backed).  Arithmetic is closed, equality is decidable, and
//     residuals of identities come out as literal zeros.
//   * std::complex<double> : float mode, used when an instance file carries
//     an explicit tolerance.
//
// scalar_ops<S> is the single trait consulted by the rest of the code.

#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace qlie {

using Rational = mpq_class;

/// Exact element of Q(i).  Division is field division (denominators stay
/// rational since |b|^2 is rational).
struct RationalComplex {
  Rational re, im;

  RationalComplex() : re(0), im(0) {}
  RationalComplex(int v) : re(v), im(0) {}  // NOLINT: implicit on purpose
  RationalComplex(long v) : re(v), im(0) {}
  RationalComplex(Rational r) : re(std::move(r)), im(0) {}
  RationalComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  friend RationalComplex operator+(const RationalComplex& a, const RationalComplex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend RationalComplex operator-(const RationalComplex& a, const RationalComplex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend RationalComplex operator-(const RationalComplex& a) { return {-a.re, -a.im}; }
  friend RationalComplex operator*(const RationalComplex& a, const RationalComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend RationalComplex operator/(const RationalComplex& a, const RationalComplex& b) {
    Rational d = b.re * b.re + b.im * b.im;
    if (d == 0) throw std::domain_error("RationalComplex: division by zero");
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  RationalComplex& operator+=(const RationalComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  RationalComplex& operator-=(const RationalComplex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  RationalComplex& operator*=(const RationalComplex& o) { return *this = *this * o; }
  RationalComplex& operator/=(const RationalComplex& o) { return *this = *this / o; }

  friend bool operator==(const RationalComplex& a, const RationalComplex& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const RationalComplex& a, const RationalComplex& b) { return !(a == b); }
};

inline Rational abs2(const RationalComplex& z) { return z.re * z.re + z.im * z.im; }
// Pivot surrogate for LU: |z|^2 is exact and shares the argmax with |z|.
inline Rational abs(const RationalComplex& z) { return abs2(z); }
inline RationalComplex conj(const RationalComplex& z) { return {z.re, -z.im}; }
inline Rational real(const RationalComplex& z) { return z.re; }
inline Rational imag(const RationalComplex& z) { return z.im; }

/// "p/q" or "p"; throws on garbage.
inline Rational parse_rational(const std::string& text) {
  Rational q;
  if (q.set_str(text, 10) != 0)
    throw std::invalid_argument("not a rational: '" + text + "'");
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline std::string to_string(const RationalComplex& z) {
  if (z.im == 0) return z.re.get_str();
  if (z.re == 0) return z.im.get_str() + "i";
  std::string s = z.re.get_str();
  if (z.im > 0) s += "+";
  return "(" + s + z.im.get_str() + "i)";
}

template <typename S>
struct scalar_ops;

template <>
struct scalar_ops<RationalComplex> {
  static constexpr bool exact = true;
  static RationalComplex zero() { return {}; }
  static RationalComplex one() { return {1}; }
  static RationalComplex from_rationals(const Rational& re, const Rational& im) {
    return {re, im};
  }
  static bool is_zero(const RationalComplex& v, double /*tol*/ = 0.0) {
    return v.re == 0 && v.im == 0;
  }
  /// For report printing only; pass/fail never goes through doubles.
  static double norm(const RationalComplex& v) {
    return std::sqrt(abs2(v).get_d());
  }
  static std::string str(const RationalComplex& v) { return to_string(v); }
};

template <>
struct scalar_ops<std::complex<double>> {
  static constexpr bool exact = false;
  static std::complex<double> zero() { return {0.0, 0.0}; }
  static std::complex<double> one() { return {1.0, 0.0}; }
  static std::complex<double> from_rationals(const Rational& re, const Rational& im) {
    return {re.get_d(), im.get_d()};
  }
  static bool is_zero(const std::complex<double>& v, double tol) { return std::abs(v) <= tol; }
  static double norm(const std::complex<double>& v) { return std::abs(v); }
  static std::string str(const std::complex<double>& v) {
    std::ostringstream os;
    if (v.imag() == 0.0)
      os << v.real();
    else
      os << "(" << v.real() << (v.imag() >= 0 ? "+" : "") << v.imag() << "i)";
    return os.str();
  }
};

using ExactScalar = RationalComplex;
using FloatScalar = std::complex<double>;

}  // namespace qlie

#include <Eigen/Core>

namespace Eigen {

template <>
struct NumTraits<qlie::Rational> {
  typedef qlie::Rational Real;
  typedef qlie::Rational NonInteger;
  typedef qlie::Rational Nested;
  typedef qlie::Rational Literal;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 3,
    AddCost = 30,
    MulCost = 60
  };
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
};

template <>
struct NumTraits<qlie::RationalComplex> {
  typedef qlie::Rational Real;
  typedef qlie::RationalComplex NonInteger;
  typedef qlie::RationalComplex Nested;
  typedef qlie::RationalComplex Literal;
  enum {
    IsComplex = 1,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 60,
    MulCost = 120
  };
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
