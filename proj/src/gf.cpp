#include "gljac/gf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

namespace gljac {

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::int64_t ipow(std::int64_t base, int exponent) {
  std::int64_t r = 1;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

Complex root_of_unity(std::int64_t num, std::int64_t den) {
  std::int64_t r = num % den;
  if (r < 0) r += den;
  if (r == 0) return {1.0, 0.0};
  if (2 * r == den) return {-1.0, 0.0};
  if (4 * r == den) return {0.0, 1.0};
  if (4 * r == 3 * den) return {0.0, -1.0};
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(den);
  return std::polar(1.0, angle);
}

namespace {

// Little-endian coefficient lists over F_p, monic, from Lübeck's tables.
const std::map<std::pair<int, int>, std::vector<int>>& conway_table() {
  static const std::map<std::pair<int, int>, std::vector<int>> table = {
      {{2, 1}, {1, 1}},
      {{2, 2}, {1, 1, 1}},
      {{2, 3}, {1, 1, 0, 1}},
      {{2, 4}, {1, 1, 0, 0, 1}},
      {{2, 5}, {1, 0, 1, 0, 0, 1}},
      {{2, 6}, {1, 1, 0, 1, 1, 0, 1}},
      {{2, 7}, {1, 1, 0, 0, 0, 0, 0, 1}},
      {{2, 8}, {1, 0, 1, 1, 1, 0, 0, 0, 1}},
      {{2, 9}, {1, 0, 0, 0, 1, 0, 0, 0, 0, 1}},
      {{2, 10}, {1, 1, 1, 1, 0, 1, 1, 0, 0, 0, 1}},
      {{2, 11}, {1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
      {{2, 12}, {1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 1}},
      {{3, 1}, {1, 1}},
      {{3, 2}, {2, 2, 1}},
      {{3, 3}, {1, 2, 0, 1}},
      {{3, 4}, {2, 0, 0, 2, 1}},
      {{3, 5}, {1, 2, 0, 0, 0, 1}},
      {{3, 6}, {2, 2, 1, 0, 2, 0, 1}},
      {{3, 7}, {1, 0, 2, 0, 0, 0, 0, 1}},
      {{3, 8}, {2, 2, 2, 0, 1, 2, 0, 0, 1}},
      {{5, 1}, {3, 1}},
      {{5, 2}, {2, 4, 1}},
      {{5, 3}, {3, 3, 0, 1}},
      {{5, 4}, {2, 4, 4, 0, 1}},
      {{5, 5}, {3, 4, 0, 0, 0, 1}},
      {{5, 6}, {2, 0, 1, 4, 1, 0, 1}},
      {{7, 1}, {4, 1}},
      {{7, 2}, {3, 6, 1}},
      {{7, 3}, {4, 0, 6, 1}},
      {{7, 4}, {3, 4, 5, 0, 1}},
      {{7, 5}, {4, 1, 0, 0, 0, 1}},
  };
  return table;
}

using PrimePoly = std::vector<int>;

PrimePoly mulmod(const PrimePoly& a, const PrimePoly& b, const PrimePoly& f, int p) {
  const int d = static_cast<int>(f.size()) - 1;
  std::vector<std::int64_t> prod(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] += static_cast<std::int64_t>(a[i]) * b[j];
  for (auto& c : prod) c %= p;
  for (int k = static_cast<int>(prod.size()) - 1; k >= d; --k) {
    const std::int64_t c = prod[k];
    if (c == 0) continue;
    for (int i = 0; i <= d; ++i) prod[k - d + i] = ((prod[k - d + i] - c * f[i]) % p + p) % p;
  }
  PrimePoly r(d, 0);
  for (int i = 0; i < d && i < static_cast<int>(prod.size()); ++i) r[i] = static_cast<int>(prod[i]);
  return r;
}

PrimePoly powmod_x(std::int64_t e, const PrimePoly& f, int p) {
  const int d = static_cast<int>(f.size()) - 1;
  PrimePoly result(d, 0);
  result[0] = 1;
  PrimePoly base(d, 0);
  if (d == 1) {
    base[0] = ((-f[0]) % p + p) % p;
  } else {
    base[1] = 1;
  }
  while (e > 0) {
    if (e & 1) result = mulmod(result, base, f, p);
    base = mulmod(base, base, f, p);
    e >>= 1;
  }
  return result;
}

std::vector<std::int64_t> prime_factors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

bool is_primitive_polynomial(int p, const PrimePoly& f) {
  const int d = static_cast<int>(f.size()) - 1;
  if (d < 1 || f.back() != 1 || f[0] == 0) return false;
  const std::int64_t order = ipow(p, d) - 1;
  auto is_one = [](const PrimePoly& r) {
    if (r[0] != 1) return false;
    return std::all_of(r.begin() + 1, r.end(), [](int c) { return c == 0; });
  };
  if (!is_one(powmod_x(order, f, p))) return false;
  for (std::int64_t r : prime_factors(order))
    if (is_one(powmod_x(order / r, f, p))) return false;
  return true;
}

PrimePoly least_primitive_polynomial(int p, int d) {
  const std::int64_t count = ipow(p, d);
  for (std::int64_t idx = 0; idx < count; ++idx) {
    PrimePoly f(d + 1, 0);
    f[d] = 1;
    std::int64_t t = idx;
    for (int i = d - 1; i >= 0; --i) {
      f[i] = static_cast<int>(t % p);
      t /= p;
    }
    if (is_primitive_polynomial(p, f)) return f;
  }
  throw std::logic_error("no primitive polynomial found");
}

}  // namespace

std::vector<int> conway_polynomial(int p, int degree) {
  const auto& table = conway_table();
  auto it = table.find({p, degree});
  return it == table.end() ? std::vector<int>{} : it->second;
}

Tower::Level Tower::make_level(int p, std::vector<int> polynomial) {
  Level level;
  level.degree = static_cast<int>(polynomial.size()) - 1;
  if (level.degree < 1 || polynomial.back() != 1)
    throw std::invalid_argument("defining polynomial must be monic of positive degree");
  const std::int64_t order = ipow(p, level.degree);
  if (order > kMaxFieldOrder) throw BudgetExceeded("field order exceeds desk-scale cap");
  level.order = static_cast<std::uint32_t>(order);
  level.polynomial = std::move(polynomial);
  level.exp.assign(order - 1, 0);
  level.log.assign(order, -1);

  const int d = level.degree;
  std::vector<int> cur(d, 0);
  cur[0] = 1;
  auto encode = [&](const std::vector<int>& c) {
    std::uint32_t code = 0;
    for (int i = d - 1; i >= 0; --i) code = code * p + static_cast<std::uint32_t>(c[i]);
    return code;
  };
  for (std::int64_t k = 0; k < order - 1; ++k) {
    const std::uint32_t code = encode(cur);
    if (level.log[code] != -1)
      throw std::invalid_argument("defining polynomial is not primitive");
    level.exp[k] = code;
    level.log[code] = k;
    // cur <- cur * X mod polynomial
    const int top = cur[d - 1];
    for (int i = d - 1; i > 0; --i) cur[i] = cur[i - 1];
    cur[0] = 0;
    for (int i = 0; i < d; ++i)
      cur[i] = ((cur[i] - top * level.polynomial[i]) % p + p) % p;
  }
  if (encode(cur) != 1) throw std::invalid_argument("defining polynomial is not primitive");
  return level;
}

Tower Tower::build(int p, int base_degree, std::span<const int> multipliers) {
  if (!is_prime(p)) throw std::invalid_argument("characteristic must be prime");
  if (base_degree < 1) throw std::invalid_argument("base degree must be positive");
  if (multipliers.empty()) throw std::invalid_argument("tower needs at least one multiplier");
  std::vector<int> degrees{base_degree};
  for (int m : multipliers) {
    if (m < 1) throw std::invalid_argument("multipliers must be positive");
    degrees.push_back(degrees.back() * m);
    if (degrees.back() > kMaxTotalDegree) throw std::invalid_argument("tower degree cap exceeded");
  }
  const int top = degrees.back();
  if (ipow(p, top) > kMaxFieldOrder) throw BudgetExceeded("field order exceeds desk-scale cap");

  std::vector<int> top_poly = conway_polynomial(p, top);
  if (top_poly.empty() || !is_primitive_polynomial(p, top_poly))
    top_poly = least_primitive_polynomial(p, top);

  Tower tower;
  tower.p_ = p;
  const Level top_level = make_level(p, top_poly);
  for (int d : degrees) {
    if (d == top) {
      tower.levels_.push_back(top_level);
      continue;
    }
    // Minimal polynomial over F_p of g^e, where e = (p^top - 1)/(p^d - 1).
    const std::int64_t qtop = top_level.order;
    const std::int64_t e = (qtop - 1) / (ipow(p, d) - 1);
    std::vector<std::uint32_t> poly{1};  // codes in the top level, little-endian
    Tower scratch;
    scratch.p_ = p;
    scratch.levels_.push_back(top_level);
    for (int j = 0; j < d; ++j) {
      const std::int64_t lg = (e * ipow(p, j)) % (qtop - 1);
      const FieldElem root{0, top_level.exp[lg]};
      std::vector<std::uint32_t> next(poly.size() + 1, 0);
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const FieldElem c{0, poly[i]};
        next[i + 1] = scratch.add({0, next[i + 1]}, c).code;
        next[i] = scratch.sub({0, next[i]}, scratch.mul(c, root)).code;
      }
      poly = std::move(next);
    }
    std::vector<int> coeffs;
    for (std::uint32_t c : poly) {
      if (c >= static_cast<std::uint32_t>(p)) throw std::logic_error("minimal polynomial left F_p");
      coeffs.push_back(static_cast<int>(c));
    }
    tower.levels_.push_back(make_level(p, coeffs));
  }
  tower.check_compatibility();
  return tower;
}

void Tower::check_compatibility() const {
  for (std::size_t i = 0; i + 1 < levels_.size(); ++i) {
    const Level& lo = levels_[i];
    const Level& hi = levels_[i + 1];
    if (hi.degree % lo.degree != 0) throw std::invalid_argument("tower levels are not nested");
    const std::int64_t e = (static_cast<std::int64_t>(hi.order) - 1) / (lo.order - 1);
    const int hl = static_cast<int>(i + 1);
    const FieldElem root = power_of_generator(hl, e);
    FieldElem acc = zero(hl);
    for (int k = lo.degree; k >= 0; --k) {
      acc = mul(acc, root);
      acc = add(acc, {hl, static_cast<std::uint32_t>(lo.polynomial[k])});
    }
    if (acc.code != 0)
      throw std::invalid_argument("tower levels are not norm-compatible");
  }
}

nlohmann::json Tower::to_json() const {
  nlohmann::json j;
  j["p"] = p_;
  j["degrees"] = nlohmann::json::array();
  j["polynomials"] = nlohmann::json::array();
  for (const auto& l : levels_) {
    j["degrees"].push_back(l.degree);
    j["polynomials"].push_back(l.polynomial);
  }
  return j;
}

Tower Tower::from_json(const nlohmann::json& j) {
  const int p = j.at("p").get<int>();
  if (!is_prime(p)) throw std::invalid_argument("characteristic must be prime");
  const auto degrees = j.at("degrees").get<std::vector<int>>();
  const auto polys = j.at("polynomials").get<std::vector<std::vector<int>>>();
  if (degrees.empty() || degrees.size() != polys.size())
    throw std::invalid_argument("tower config: degrees and polynomials disagree");
  if (degrees.back() > kMaxTotalDegree) throw std::invalid_argument("tower degree cap exceeded");
  Tower tower;
  tower.p_ = p;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (static_cast<int>(polys[i].size()) != degrees[i] + 1)
      throw std::invalid_argument("tower config: polynomial degree mismatch");
    for (int c : polys[i])
      if (c < 0 || c >= p) throw std::invalid_argument("tower config: coefficient out of range");
    tower.levels_.push_back(make_level(p, polys[i]));
  }
  tower.check_compatibility();
  return tower;
}

const Tower::Level& Tower::at(int level) const {
  if (level < 0 || level >= num_levels()) throw std::out_of_range("tower level out of range");
  return levels_[level];
}

void Tower::check_nested(int from, int to) const {
  at(from);
  at(to);
  if (to > from) throw std::invalid_argument("levels not nested");
}

int Tower::level_of_relative_degree(int m) const {
  for (int i = 0; i < num_levels(); ++i)
    if (relative_degree(i) == m) return i;
  return -1;
}

FieldElem Tower::generator(int level) const { return {level, at(level).exp.size() > 1 ? at(level).exp[1] : at(level).exp[0]}; }

FieldElem Tower::power_of_generator(int level, std::int64_t k) const {
  const Level& l = at(level);
  const std::int64_t m = static_cast<std::int64_t>(l.order) - 1;
  std::int64_t r = k % m;
  if (r < 0) r += m;
  return {level, l.exp[r]};
}

FieldElem Tower::from_coeffs(int level, std::span<const int> coeffs) const {
  const Level& l = at(level);
  if (static_cast<int>(coeffs.size()) != l.degree)
    throw std::invalid_argument("coefficient vector length must equal the level degree");
  std::uint32_t code = 0;
  for (int i = l.degree - 1; i >= 0; --i) {
    const int c = ((coeffs[i] % p_) + p_) % p_;
    code = code * p_ + static_cast<std::uint32_t>(c);
  }
  return {level, code};
}

std::vector<int> Tower::coeffs(FieldElem x) const {
  const Level& l = at(x.level);
  std::vector<int> out(l.degree);
  std::uint32_t c = x.code;
  for (int i = 0; i < l.degree; ++i) {
    out[i] = static_cast<int>(c % p_);
    c /= p_;
  }
  return out;
}

std::vector<FieldElem> Tower::elements(int level) const {
  std::vector<FieldElem> out;
  out.reserve(order(level));
  for (std::uint32_t c = 0; c < order(level); ++c) out.push_back({level, c});
  return out;
}

FieldElem Tower::add(FieldElem a, FieldElem b) const {
  if (p_ == 2) return {a.level, a.code ^ b.code};
  std::uint32_t x = a.code, y = b.code, out = 0, weight = 1;
  const std::uint32_t p = static_cast<std::uint32_t>(p_);
  while (x != 0 || y != 0) {
    out += ((x % p + y % p) % p) * weight;
    x /= p;
    y /= p;
    weight *= p;
  }
  return {a.level, out};
}

FieldElem Tower::neg(FieldElem a) const {
  if (p_ == 2) return a;
  std::uint32_t x = a.code, out = 0, weight = 1;
  const std::uint32_t p = static_cast<std::uint32_t>(p_);
  while (x != 0) {
    out += ((p - x % p) % p) * weight;
    x /= p;
    weight *= p;
  }
  return {a.level, out};
}

FieldElem Tower::sub(FieldElem a, FieldElem b) const { return add(a, neg(b)); }

FieldElem Tower::mul(FieldElem a, FieldElem b) const {
  if (a.code == 0 || b.code == 0) return {a.level, 0};
  const Level& l = at(a.level);
  const std::int64_t m = static_cast<std::int64_t>(l.order) - 1;
  return {a.level, l.exp[(l.log[a.code] + l.log[b.code]) % m]};
}

FieldElem Tower::inv(FieldElem a) const {
  if (a.code == 0) throw std::domain_error("inverse of zero");
  const Level& l = at(a.level);
  const std::int64_t m = static_cast<std::int64_t>(l.order) - 1;
  return {a.level, l.exp[(m - l.log[a.code]) % m]};
}

FieldElem Tower::pow(FieldElem a, std::int64_t e) const {
  if (a.code == 0) {
    if (e == 0) return one(a.level);
    if (e < 0) throw std::domain_error("negative power of zero");
    return a;
  }
  return power_of_generator(a.level, log(a) * (e % (static_cast<std::int64_t>(order(a.level)) - 1)));
}

std::int64_t Tower::log(FieldElem x) const {
  if (x.code == 0) throw std::domain_error("log of zero");
  return at(x.level).log[x.code];
}

FieldElem Tower::embed(FieldElem x, int to_level) const {
  check_nested(to_level, x.level);
  if (x.code == 0) return zero(to_level);
  const std::int64_t e = (static_cast<std::int64_t>(order(to_level)) - 1) / (order(x.level) - 1);
  return power_of_generator(to_level, log(x) * e);
}

bool Tower::lies_in(FieldElem x, int level) const {
  check_nested(x.level, level);
  if (x.code == 0) return true;
  const std::int64_t e = (static_cast<std::int64_t>(order(x.level)) - 1) / (order(level) - 1);
  return log(x) % e == 0;
}

FieldElem Tower::descend(FieldElem x, int to_level) const {
  check_nested(x.level, to_level);
  if (x.code == 0) return zero(to_level);
  const std::int64_t e = (static_cast<std::int64_t>(order(x.level)) - 1) / (order(to_level) - 1);
  const std::int64_t lg = log(x);
  if (lg % e != 0) throw std::domain_error("element does not lie in the requested subfield");
  return power_of_generator(to_level, lg / e);
}

FieldElem Tower::trace(FieldElem x, int to_level) const {
  check_nested(x.level, to_level);
  const int steps = degree(x.level) / degree(to_level);
  const std::int64_t m = static_cast<std::int64_t>(order(x.level)) - 1;
  FieldElem sum = zero(x.level);
  if (x.code != 0) {
    std::int64_t lg = log(x);
    for (int i = 0; i < steps; ++i) {
      sum = add(sum, power_of_generator(x.level, lg));
      lg = (lg * static_cast<std::int64_t>(order(to_level))) % m;
    }
  }
  return descend(sum, to_level);
}

FieldElem Tower::norm(FieldElem x, int to_level) const {
  check_nested(x.level, to_level);
  if (x.code == 0) return zero(to_level);
  return power_of_generator(to_level, log(x));
}

int Tower::trace_to_prime(FieldElem x) const {
  if (x.code == 0) return 0;
  const std::int64_t m = static_cast<std::int64_t>(order(x.level)) - 1;
  std::int64_t lg = log(x);
  FieldElem sum = zero(x.level);
  for (int i = 0; i < degree(x.level); ++i) {
    sum = add(sum, power_of_generator(x.level, lg));
    lg = (lg * p_) % m;
  }
  if (sum.code >= static_cast<std::uint32_t>(p_)) throw std::logic_error("trace left the prime field");
  return static_cast<int>(sum.code);
}

Complex Tower::additive_character(FieldElem x) const {
  return root_of_unity(trace_to_prime(x), p_);
}

TorusCharacter TorusCharacter::make(const Tower& tower, int level, std::int64_t exponent) {
  const std::int64_t m = static_cast<std::int64_t>(tower.order(level)) - 1;
  std::int64_t j = exponent % m;
  if (j < 0) j += m;
  return {level, j, m};
}

Complex TorusCharacter::operator()(const Tower& tower, FieldElem x) const {
  if (x.level != level) throw std::invalid_argument("torus character evaluated off its level");
  return at_log(tower.log(x));
}

bool TorusCharacter::is_regular(const Tower& tower) const {
  const int m = tower.relative_degree(level);
  const std::int64_t q = tower.base_order();
  std::int64_t j = exponent;
  for (int i = 1; i < m; ++i) {
    j = (j * q) % modulus;
    if (j == exponent) return false;
  }
  return true;
}

TorusCharacter TorusCharacter::compose_norm(const Tower& tower, int from_level) const {
  if (from_level < level) throw std::invalid_argument("levels not nested");
  const std::int64_t big = static_cast<std::int64_t>(tower.order(from_level)) - 1;
  return make(tower, from_level, exponent * (big / modulus));
}

TorusCharacter TorusCharacter::restrict_to(const Tower& tower, int to_level) const {
  if (to_level > level) throw std::invalid_argument("levels not nested");
  // g_small = g^{(big-1)/(small-1)}, so theta(g_small^k) = exp(2 pi i j k/(small-1))
  return make(tower, to_level, exponent);
}

TorusCharacter TorusCharacter::power(std::int64_t k) const {
  std::int64_t j = (exponent * (k % modulus)) % modulus;
  if (j < 0) j += modulus;
  return {level, j, modulus};
}

TorusCharacter TorusCharacter::frobenius(const Tower& tower) const {
  return power(static_cast<std::int64_t>(tower.base_order()));
}

std::vector<std::int64_t> regular_exponents(const Tower& tower, int level) {
  const std::int64_t m = static_cast<std::int64_t>(tower.order(level)) - 1;
  const std::int64_t q = tower.base_order();
  const int deg = tower.relative_degree(level);
  std::vector<std::int64_t> out;
  for (std::int64_t j = 0; j < m; ++j) {
    const TorusCharacter theta{level, j, m};
    if (!theta.is_regular(tower)) continue;
    bool minimal = true;
    std::int64_t k = j;
    for (int i = 1; i < deg; ++i) {
      k = (k * q) % m;
      if (k < j) minimal = false;
    }
    if (minimal) out.push_back(j);
  }
  return out;
}

}  // namespace gljac
