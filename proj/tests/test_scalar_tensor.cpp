#include <doctest.h>

#include <random>

#include "qlie/scalar.hpp"
#include "qlie/tensor.hpp"

using namespace qlie;
using S = ExactScalar;

namespace {

S rat(long num, long den = 1) { return S(Rational(num, den)); }

DenseTensor<S> flip_op(int n) {
  DenseTensor<S> t(std::vector<int>{n, n, n, n});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t(a, b, b, a) = rat(1);
  return t;
}

DenseTensor<S> graded_flip(int n, const std::vector<int>& s) {
  DenseTensor<S> t(std::vector<int>{n, n, n, n});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t(a, b, b, a) = rat(s[a] * s[b]);
  return t;
}

S random_rational(std::mt19937& rng) {
  std::uniform_int_distribution<long> num(-20, 20);
  std::uniform_int_distribution<long> den(1, 12);
  Rational re(num(rng), den(rng)), im(num(rng), den(rng));
  re.canonicalize();
  im.canonicalize();
  return S(re, im);
}

}  // namespace

TEST_CASE("exact scalar field arithmetic") {
  S a(Rational(1, 3), Rational(2, 5));
  S b(Rational(-7, 2), Rational(1, 4));
  CHECK(a + b - b == a);
  CHECK((a * b) / b == a);
  S i(Rational(0), Rational(1));
  CHECK(i * i == rat(-1));
  CHECK(scalar_ops<S>::is_zero(a - a));
  CHECK(parse_rational("-3/6") == Rational(-1, 2));
  CHECK_THROWS(parse_rational("zebra"));
  CHECK(to_string(S(Rational(2, 3))) == "2/3");
}

TEST_CASE("exact arithmetic is associative and distributive (random rationals)") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    S a = random_rational(rng), b = random_rational(rng), c = random_rational(rng);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a * b) * c == a * (b * c));
  }
}

TEST_CASE("contraction of flip with flip gives the identity") {
  for (int n = 1; n <= 3; ++n) {
    DenseTensor<S> f = flip_op(n);
    // both right (input) indices against the other flip's left (output) indices
    DenseTensor<S> r = contract(f, f, {{2, 0}, {3, 1}});
    CHECK(r == identity_op<S>(n, 2));
  }
}

TEST_CASE("contracting with the identity is the identity map") {
  for (int n = 1; n <= 3; ++n) {
    DenseTensor<S> id = identity_op<S>(n, 1);
    DenseTensor<S> v(std::vector<int>{n});
    for (int i = 0; i < n; ++i) v(i) = rat(i + 1, 2);
    CHECK(contract(id, v, {{1, 0}}) == v);

    DenseTensor<S> m(std::vector<int>{n, n});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = rat(3 * i - j, 1 + i + j);
    CHECK(contract(id, m, {{1, 0}}) == m);
    CHECK(contract(m, id, {{1, 0}}) == m);
  }
}

TEST_CASE("graded flip squares to the identity (brute-force oracle)") {
  const int n = 2;
  std::vector<int> signs{1, -1};
  DenseTensor<S> g = graded_flip(n, signs);
  // independent brute-force loop over all entries
  DenseTensor<S> expect(std::vector<int>{n, n, n, n});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          S acc = rat(0);
          for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) acc += g(a, b, u, v) * g(u, v, c, d);
          expect(a, b, c, d) = acc;
        }
  CHECK(expect == identity_op<S>(n, 2));
  CHECK(contract(g, g, {{2, 0}, {3, 1}}) == expect);
  CHECK(operator_compose(g, g) == expect);
}

TEST_CASE("operator composition basics") {
  const int n = 2;
  DenseTensor<S> f = flip_op(n);
  DenseTensor<S> id = identity_op<S>(n, 2);
  CHECK(operator_compose(f, f) == id);
  DenseTensor<S> m(std::vector<int>{n, n, n, n});
  m(0, 1, 1, 0) = rat(5, 3);
  m(1, 1, 0, 0) = rat(-2);
  CHECK(operator_compose(id, m) == m);
  CHECK(operator_compose(m, id) == m);
}

TEST_CASE("contraction is bilinear") {
  const int n = 2;
  std::mt19937 rng(7);
  DenseTensor<S> a(std::vector<int>{n, n}), b(std::vector<int>{n, n}), c(std::vector<int>{n, n});
  for (auto* t : {&a, &b, &c})
    for (auto& v : t->data()) v = random_rational(rng);
  S k = rat(3, 7);
  auto lhs = contract(a + k * b, c, {{1, 0}});
  auto rhs = contract(a, c, {{1, 0}}) + k * contract(b, c, {{1, 0}});
  CHECK(lhs == rhs);
}

TEST_CASE("shape errors are rejected") {
  DenseTensor<S> a(std::vector<int>{2, 2});
  DenseTensor<S> b(std::vector<int>{3, 3});
  CHECK_THROWS(contract(a, b, {{1, 0}}));
  DenseTensor<S> c(std::vector<int>{2, 2, 2});
  CHECK_THROWS(operator_compose(a, c));
}

TEST_CASE("exact LU inversion and singularity detection") {
  DenseTensor<S> f = flip_op(2);
  CHECK(is_invertible_op(f));
  CHECK(operator_inverse(f) == f);
  DenseTensor<S> sing(std::vector<int>{2, 2});
  sing(0, 0) = rat(1);
  sing(0, 1) = rat(2);
  sing(1, 0) = rat(2);
  sing(1, 1) = rat(4);
  CHECK(!is_invertible_op(sing));
  CHECK_THROWS(operator_inverse(sing));
}

TEST_CASE("float mode scalar ops") {
  using F = FloatScalar;
  F a(0.5, -0.25);
  CHECK(scalar_ops<F>::is_zero(a - a, 1e-12));
  CHECK(!scalar_ops<F>::is_zero(a, 1e-12));
  CHECK(scalar_ops<F>::norm(F(3.0, 4.0)) == doctest::Approx(5.0));
}
