#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gljac/gf.hpp"

using namespace gljac;

namespace {

bool close(Complex a, Complex b, double tol = kTolerance) { return std::abs(a - b) <= tol; }

std::int64_t order_by_powering(const Tower& t, FieldElem x) {
  FieldElem y = x;
  std::int64_t k = 1;
  while (!(y == t.one(x.level))) {
    y = t.mul(y, x);
    ++k;
  }
  return k;
}

// --- independent Conway search over F_p[x] (little-endian int vectors) ---

using P = std::vector<int>;

P mulmod(const P& a, const P& b, const P& f, int p) {
  const std::size_t d = f.size() - 1;
  std::vector<long> prod(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] = (prod[i + j] + static_cast<long>(a[i]) * b[j]) % p;
  for (std::size_t k = prod.size(); k-- > d;) {
    const long c = prod[k];
    if (c == 0) continue;
    for (std::size_t i = 0; i <= d; ++i) prod[k - d + i] = ((prod[k - d + i] - c * f[i]) % p + p) % p;
  }
  P out(d, 0);
  for (std::size_t i = 0; i < d && i < prod.size(); ++i) out[i] = static_cast<int>(prod[i]);
  return out;
}

P pow_x(std::int64_t e, const P& f, int p) {
  const std::size_t d = f.size() - 1;
  P r(d, 0), b(d, 0);
  r[0] = 1;
  if (d == 1) b[0] = (p - f[0]) % p;
  else b[1] = 1;
  while (e > 0) {
    if (e & 1) r = mulmod(r, b, f, p);
    b = mulmod(b, b, f, p);
    e >>= 1;
  }
  return r;
}

bool primitive(const P& f, int p) {
  const std::size_t d = f.size() - 1;
  const std::int64_t big = ipow(p, static_cast<int>(d)) - 1;
  P one(d, 0);
  one[0] = 1;
  if (pow_x(big, f, p) != one) return false;
  std::int64_t m = big;
  for (std::int64_t r = 2; r * r <= m; ++r) {
    if (m % r != 0) continue;
    if (pow_x(big / r, f, p) == one) return false;
    while (m % r == 0) m /= r;
  }
  return m == 1 || pow_x(big / m, f, p) != one;
}

bool vanishes_at_power(const P& g, std::int64_t e, const P& f, int p) {
  const std::size_t d = f.size() - 1;
  const P xe = pow_x(e, f, p);
  P acc(d, 0), pw(d, 0);
  pw[0] = 1;
  for (int c : g) {
    for (std::size_t i = 0; i < d; ++i) acc[i] = (acc[i] + c * pw[i]) % p;
    pw = mulmod(pw, xe, f, p);
  }
  return std::all_of(acc.begin(), acc.end(), [](int c) { return c == 0; });
}

P conway_search(int p, int n) {
  static std::map<std::pair<int, int>, P> memo;
  if (auto it = memo.find({p, n}); it != memo.end()) return it->second;
  const std::int64_t words = ipow(p, n);
  for (std::int64_t w = 0; w < words; ++w) {
    // w spells (a_{n-1}, ..., a_0), most significant first; coefficient of x^k is (-1)^{n-k} a_k
    P c(n + 1, 0);
    c[n] = 1;
    std::int64_t rest = w;
    for (int k = 0; k < n; ++k) {
      const int a = static_cast<int>(rest % p);
      rest /= p;
      c[k] = ((n - k) % 2 == 0) ? a : (p - a) % p;
    }
    if (!primitive(c, p)) continue;
    bool ok = true;
    for (int m = 1; m < n && ok; ++m)
      if (n % m == 0) ok = vanishes_at_power(conway_search(p, m), (ipow(p, n) - 1) / (ipow(p, m) - 1), c, p);
    if (ok) return memo[{p, n}] = c;
  }
  return {};
}

}  // namespace

TEST_SUITE("gf") {
  TEST_CASE("build_tower examples") {
    const Tower a = Tower::build(2, 1, {2});
    CHECK(a.num_levels() == 2);
    CHECK(a.order(0) == 2);
    CHECK(a.order(1) == 4);

    const Tower b = Tower::build(3, 1, {1, 2});
    CHECK(b.order(0) == 3);
    CHECK(b.order(1) == 3);
    CHECK(b.order(2) == 9);

    const Tower c = Tower::build(2, 1, {2, 2});
    CHECK(c.order(2) == 16);
    CHECK(order_by_powering(c, c.generator(2)) == 15);
  }

  TEST_CASE("build_tower errors") {
    CHECK_THROWS_AS(Tower::build(4, 1, {2}), std::invalid_argument);
    CHECK_THROWS_AS(Tower::build(2, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS(Tower::build(2, 1, {13}), std::invalid_argument);
    CHECK_THROWS_AS(Tower::build(2, 3, {2, 3}), std::invalid_argument);
  }

  TEST_CASE("generators have exact order at every level") {
    for (auto [p, e, m1, m2] : std::vector<std::array<int, 4>>{{2, 1, 2, 2}, {3, 1, 2, 2}, {2, 2, 2, 2}, {5, 1, 2, 2}, {7, 1, 1, 2}, {3, 2, 1, 2}}) {
      const Tower t = Tower::build(p, e, {m1, m2});
      for (int l = 0; l < t.num_levels(); ++l)
        CHECK(order_by_powering(t, t.generator(l)) == static_cast<std::int64_t>(t.order(l)) - 1);
    }
  }

  TEST_CASE("trace examples") {
    const Tower t = Tower::build(2, 1, {2});
    CHECK(t.trace(t.one(1), 0) == t.zero(0));
    CHECK(t.trace(t.zero(1), 0) == t.zero(0));
    // every x in F_4 \ F_2 is a root of X^2+X+1
    for (const FieldElem x : t.elements(1))
      if (!t.lies_in(x, 0)) CHECK(t.trace(x, 0) == t.one(0));
  }

  TEST_CASE("additive character examples") {
    const Tower f3 = Tower::build(3, 1, {1});
    CHECK(close(f3.additive_character(f3.zero(0)), 1.0));
    CHECK(close(f3.additive_character(f3.one(0)), std::polar(1.0, 2 * std::numbers::pi / 3)));
    const Tower f4 = Tower::build(2, 2, {1});
    CHECK(close(f4.additive_character(f4.one(0)), 1.0));
  }

  TEST_CASE("phi is additive and nontrivial") {
    for (auto [p, e] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}}) {
      const Tower t = Tower::build(p, e, {1});
      Complex sum = 0.0;
      for (const FieldElem a : t.elements(0)) {
        sum += t.additive_character(a);
        for (const FieldElem b : t.elements(0))
          CHECK(close(t.additive_character(t.add(a, b)), t.additive_character(a) * t.additive_character(b)));
      }
      CHECK(std::abs(sum) < kTolerance);
    }
  }

  TEST_CASE("norm examples") {
    const Tower t = Tower::build(3, 1, {1, 2});
    CHECK(t.norm(t.one(2), 1) == t.one(1));
    const FieldElem g = t.generator(2);
    const FieldElem n = t.norm(g, 0);
    CHECK(t.embed(n, 2) == t.pow(g, 4));
    CHECK(order_by_powering(t, n) == 2);

    const Tower s = Tower::build(2, 1, {2, 2});
    for (const FieldElem x : s.elements(1)) CHECK(s.norm(s.embed(x, 2), 1) == s.mul(x, x));
  }

  TEST_CASE("trace and norm are transitive on F_16") {
    const Tower t = Tower::build(2, 1, {2, 2});
    for (const FieldElem x : t.elements(2)) {
      CHECK(t.trace(x, 0) == t.trace(t.trace(x, 1), 0));
      CHECK(t.norm(x, 0) == t.norm(t.norm(x, 1), 0));
    }
  }

  TEST_CASE("norm of a generator generates") {
    const Tower t = Tower::build(3, 1, {2, 2});
    CHECK(order_by_powering(t, t.norm(t.generator(2), 1)) == 8);
    CHECK(order_by_powering(t, t.norm(t.generator(2), 0)) == 2);
  }

  TEST_CASE("embed and descend are inverse") {
    const Tower t = Tower::build(2, 1, {2, 3});
    for (const FieldElem x : t.elements(1)) {
      const FieldElem y = t.embed(x, 2);
      CHECK(t.lies_in(y, 1));
      CHECK(t.descend(y, 1) == x);
    }
    CHECK_THROWS(t.descend(t.generator(2), 1));
  }

  TEST_CASE("torus characters are multiplicative") {
    for (auto [p, e, m] : std::vector<std::array<int, 3>>{{3, 1, 4}, {2, 1, 4}, {3, 1, 2}, {2, 2, 2}, {5, 1, 2}}) {
      const Tower t = Tower::build(p, e, {m});
      const auto elems = t.elements(1);
      for (std::int64_t j : {1, 2, 5}) {
        const TorusCharacter theta = TorusCharacter::make(t, 1, j);
        for (const FieldElem x : elems) {
          if (x.code == 0) continue;
          for (const FieldElem y : elems) {
            if (y.code == 0) continue;
            CHECK(close(theta(t, t.mul(x, y)), theta(t, x) * theta(t, y)));
          }
        }
      }
    }
  }

  TEST_CASE("regularity and orbit representatives") {
    const Tower t = Tower::build(3, 1, {2});
    // theta is regular iff j(q-1) != 0 mod q^2-1, i.e. j not divisible by 4
    for (std::int64_t j = 0; j < 8; ++j) CHECK(TorusCharacter::make(t, 1, j).is_regular(t) == (j % 4 != 0));
    CHECK(regular_exponents(t, 1) == std::vector<std::int64_t>{1, 2, 5});
    const Tower u = Tower::build(2, 1, {4});
    CHECK(regular_exponents(u, 1).size() == 3);  // (16 - 4)/4
  }

  TEST_CASE("compose_norm and restrict_to") {
    const Tower t = Tower::build(3, 1, {2, 2});
    const TorusCharacter theta0 = TorusCharacter::make(t, 1, 1);
    const TorusCharacter theta = theta0.compose_norm(t, 2);
    CHECK(theta.exponent == 10);
    CHECK(theta.restrict_to(t, 1) == theta0.power(2));
    for (const FieldElem x : t.elements(1))
      if (x.code != 0) CHECK(close(theta(t, t.embed(x, 2)), theta0(t, x) * theta0(t, x)));
  }

  TEST_CASE("tower JSON round trip") {
    const Tower t = Tower::build(5, 1, {2, 2});
    const Tower u = Tower::from_json(t.to_json());
    CHECK(u.to_json() == t.to_json());
    nlohmann::json bad = t.to_json();
    bad["polynomials"][1] = {1, 0, 1};  // x^2 + 1 is reducible over F_5
    CHECK_THROWS_AS(Tower::from_json(bad), std::invalid_argument);
  }

  TEST_CASE("built-in Conway polynomials agree with a direct search") {
    int checked = 0;
    for (int p : {2, 3, 5, 7})
      for (int d = 1; d <= 12; ++d) {
        const auto table = conway_polynomial(p, d);
        if (table.empty()) continue;
        CHECK_MESSAGE(table == conway_search(p, d), "p=" << p << " d=" << d);
        ++checked;
      }
    CHECK(checked == 31);
  }
}
