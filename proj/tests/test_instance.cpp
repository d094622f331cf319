#include <doctest.h>

#include <json.hpp>
#include <random>

#include "qlie/instance.hpp"

using namespace qlie;
using S = ExactScalar;
using json = nlohmann::json;

namespace {

S rat(long num, long den = 1) { return S(Rational(num, den)); }

json classical2_json() {
  json j;
  j["name"] = "classical2-file";
  j["n"] = 2;
  j["lambda"] = {0, 1, 0, 1};
  std::vector<int> r(16, 0);
  // flip: <n l | R | k m> = d^n_m d^l_k
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) r[((a * 2 + b) * 2 + b) * 2 + a] = 1;
  j["r"] = r;
  j["z"] = std::vector<int>(8, 0);
  j["t"] = std::vector<int>(4, 0);
  return j;
}

}  // namespace

TEST_CASE("load classical(2) from file, z_tilde derived to zero") {
  QGroupInstance<S> q = instance_from_json<S>(classical2_json());
  CHECK(q.n == 2);
  CHECK(q.lambda == rat(0));
  CHECK(!q.z_tilde_supplied);
  CHECK(all_zero(q.z_tilde));
  CHECK(q.is_classical_point());
  QGroupInstance<S> builtin = make_classical<S>(2);
  CHECK(q.r == builtin.r);
}

TEST_CASE("missing or malformed fields are load errors") {
  json j = classical2_json();
  j.erase("r");
  CHECK_THROWS_AS(instance_from_json<S>(j), InstanceError);
  json j2 = classical2_json();
  j2["z"] = std::vector<int>(7, 0);  // wrong length
  CHECK_THROWS_AS(instance_from_json<S>(j2), InstanceError);
  json j3 = classical2_json();
  j3["lambda"] = {-1, 1, 0, 1};
  CHECK_THROWS_AS(instance_from_json<S>(j3), InstanceError);
  json j4 = classical2_json();
  j4["r"] = std::vector<int>(16, 0);  // singular R
  CHECK_THROWS_AS(instance_from_json<S>(j4), InstanceError);
}

TEST_CASE("a full q matrix must equal lambda * identity") {
  json j = classical2_json();
  j["q"] = std::vector<int>{0, 0, 0, 0};
  CHECK_NOTHROW(instance_from_json<S>(j));
  j["q"] = std::vector<int>{1, 0, 0, 1};
  CHECK_THROWS_AS(instance_from_json<S>(j), InstanceError);
}

TEST_CASE("graded builtin matches the documented entries; braid checked brute force") {
  QGroupInstance<S> g = make_builtin<S>("graded:2:+-").value();
  std::vector<int> signs{1, -1};
  for (int a = 0; a < 2; ++a)
    for (int l = 0; l < 2; ++l)
      for (int k = 0; k < 2; ++k)
        for (int m = 0; m < 2; ++m) {
          S expect = (a == m && l == k) ? rat(signs[a] * signs[l]) : rat(0);
          CHECK(g.r.at({a, l, k, m}) == expect);
        }
  // involutivity, brute force
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          S acc = rat(0);
          for (int u = 0; u < 2; ++u)
            for (int v = 0; v < 2; ++v) acc += g.r.at({a, b, u, v}) * g.r.at({u, v, c, d});
          CHECK(acc == ((a == c && b == d) ? rat(1) : rat(0)));
        }
  // braid relation, brute force on V^3
  auto op12 = [&](int o1, int o2, int o3, int i1, int i2, int i3) {
    return o3 == i3 ? g.r.at({o1, o2, i1, i2}) : rat(0);
  };
  auto op23 = [&](int o1, int o2, int o3, int i1, int i2, int i3) {
    return o1 == i1 ? g.r.at({o2, o3, i2, i3}) : rat(0);
  };
  auto compose3 = [&](auto f1, auto f2) {
    return [&, f1, f2](int o1, int o2, int o3, int i1, int i2, int i3) {
      S acc = rat(0);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c) acc += f1(o1, o2, o3, a, b, c) * f2(a, b, c, i1, i2, i3);
      return acc;
    };
  };
  auto lhs = compose3(compose3(op12, op23), op12);
  auto rhs = compose3(compose3(op23, op12), op23);
  for (int o1 = 0; o1 < 2; ++o1)
    for (int o2 = 0; o2 < 2; ++o2)
      for (int o3 = 0; o3 < 2; ++o3)
        for (int i1 = 0; i1 < 2; ++i1)
          for (int i2 = 0; i2 < 2; ++i2)
            for (int i3 = 0; i3 < 2; ++i3)
              CHECK(lhs(o1, o2, o3, i1, i2, i3) == rhs(o1, o2, o3, i1, i2, i3));
  CHECK(check_yang_baxter(g.r) == 0.0);
}

TEST_CASE("derive_ztilde") {
  // Z = 0 -> Z~ = 0
  QGroupInstance<S> c = make_classical<S>(2);
  CHECK(all_zero(derive_ztilde(c.r, c.z)));

  // R = flip: Z~[n][k][q] = -Z[k][n][q], against a brute-force contraction
  const int n = 2;
  DenseTensor<S> z(std::vector<int>{n, n, n});
  int counter = 1;
  for (auto& v : z.data()) v = rat(counter++, 3);
  DenseTensor<S> zt = derive_ztilde(c.r, z);
  for (int a = 0; a < n; ++a)
    for (int k = 0; k < n; ++k)
      for (int q = 0; q < n; ++q) {
        S brute = rat(0);
        for (int u = 0; u < n; ++u)
          for (int v = 0; v < n; ++v) brute += c.r.at({a, k, u, v}) * z.at({u, v, q});
        CHECK(zt.at({a, k, q}) == -brute);
        CHECK(zt.at({a, k, q}) == -z.at({k, a, q}));
      }

  // N = 1 scalars: r = -2, Z = z gives Z~ = 2z
  QGroupInstance<S> s1 = make_scalar1<S>(rat(1), rat(-2), rat(5, 7), rat(1));
  CHECK(derive_ztilde(s1.r, s1.z).data()[0] == rat(10, 7));

  // linearity in Z
  DenseTensor<S> z2(std::vector<int>{n, n, n});
  for (auto& v : z2.data()) v = rat(counter++, 5);
  S k = rat(-3, 2);
  CHECK(derive_ztilde(c.r, z + k * z2) ==
        derive_ztilde(c.r, z) + k * derive_ztilde(c.r, z2));
}

TEST_CASE("yang-baxter residuals") {
  QGroupInstance<S> c = make_classical<S>(2);
  CHECK(check_yang_baxter(c.r) == 0.0);
  CHECK(check_yang_baxter(identity_op<S>(2, 2)) == 0.0);
  // perturbing the <0,0|R|0,1> entry breaks the braid relation (perturbing a
  // flip-diagonal entry would not: that stays a diagonal twist of the flip)
  DenseTensor<S> bad = c.r;
  bad.at({0, 0, 0, 1}) += rat(1);
  CHECK(check_yang_baxter(bad) > 0.0);
}

TEST_CASE("rtilde consistency") {
  QGroupInstance<S> c = make_classical<S>(2);
  auto [r1, r2] = check_rtilde(c);
  CHECK(r1 == 0.0);
  CHECK(r2 == 0.0);

  // N = 1: lambda = 1, r = -2 is a root of (r-1)(r+1+lambda); r = 3 is not
  QGroupInstance<S> good = make_scalar1<S>(rat(1), rat(-2), rat(0), rat(0));
  CHECK(check_rtilde(good).second == 0.0);
  QGroupInstance<S> bad = make_scalar1<S>(rat(1), rat(3), rat(0), rat(0));
  CHECK(check_rtilde(bad).second > 0.0);

  // for any valid instance R~ - R = lambda * id entrywise
  DenseTensor<S> diff = rtilde_tensor(good) - good.r;
  CHECK(diff == good.lambda * identity_op<S>(1, 2));
}

TEST_CASE("translation conditions") {
  QGroupInstance<S> c = make_classical<S>(2);
  for (const auto& e : check_translation_conditions(c)) {
    CHECK((e.pass || e.skipped));
    if (!e.skipped) CHECK(e.residual == 0.0);
  }
  // scalar instance with lambda = 1, r = -2, T = 1, Z = z
  QGroupInstance<S> s1 = make_scalar1<S>(rat(1), rat(-2), rat(2, 3), rat(1));
  for (const auto& e : check_translation_conditions(s1)) {
    INFO(e.id);
    CHECK(e.pass);
    CHECK(e.residual == 0.0);
  }
  QGroupInstance<S> g = make_builtin<S>("graded:2:+-").value();
  for (const auto& e : check_translation_conditions(g)) CHECK((e.pass || e.skipped));
}

TEST_CASE("validate builtins to exact zeros") {
  for (int n = 1; n <= 3; ++n) {
    ValidationReport rep = validate(make_classical<S>(n));
    CHECK(rep.all_pass());
    for (const auto& e : rep.entries)
      if (!e.skipped) CHECK(e.residual == 0.0);
  }
  CHECK(validate(make_builtin<S>("graded:2:+-").value()).all_pass());
  CHECK(validate(make_builtin<S>("scalar1:1:-2:1:1").value()).all_pass());
  CHECK(validate(make_builtin<S>("scalar1:0:1:3/2:0").value()).all_pass());
}

TEST_CASE("lambda = -1 is a hard error") {
  CHECK_THROWS_AS(make_builtin<S>("scalar1:-1:2:0:0"), InstanceError);
  json j = classical2_json();
  j["lambda"] = {-2, 2, 0, 1};
  CHECK_THROWS_AS(instance_from_json<S>(j), InstanceError);
}

TEST_CASE("instance json round-trip") {
  QGroupInstance<S> s1 = make_scalar1<S>(rat(1), rat(-2), rat(5, 7), rat(1));
  s1.z_tilde = derive_ztilde(s1.r, s1.z);
  json j = instance_to_json(s1);
  QGroupInstance<S> back = instance_from_json<S>(j);
  CHECK(back.n == s1.n);
  CHECK(back.lambda == s1.lambda);
  CHECK(back.r == s1.r);
  CHECK(back.z == s1.z);
  CHECK(back.t == s1.t);
  CHECK(back.z_tilde == s1.z_tilde);
}

TEST_CASE("float mode instances") {
  json j = classical2_json();
  j["tolerance"] = 1e-9;
  QGroupInstance<FloatScalar> q = instance_from_json<FloatScalar>(j);
  CHECK(q.tolerance == 1e-9);
  CHECK(validate(q).all_pass());
}

TEST_CASE("builtin name parsing") {
  CHECK(make_builtin<S>("classical:3").has_value());
  CHECK(make_builtin<S>("graded:2").has_value());
  CHECK(!make_builtin<S>("unknown:1").has_value());
  CHECK_THROWS(make_builtin<S>("graded:2:++-"));
  QGroupInstance<S> s = make_builtin<S>("scalar1:1:-2:1/2").value();
  CHECK(s.z.data()[0] == rat(1, 2));
  CHECK(s.t.data()[0] == rat(0));
}
