// Finite field towers F_q ⊂ F_{q^a} ⊂ F_{q^ab} ⊂ ... with log tables,
// norm/trace maps and the additive and multiplicative characters built on them.
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace gljac {

using Complex = std::complex<double>;

/// Equality tolerance for complex values built from roots of unity.
inline constexpr double kTolerance = 1e-8;
/// Distance to the nearest integer accepted when rounding multiplicities.
inline constexpr double kIntegralityTolerance = 1e-6;

/// Raised when a request exceeds a desk-scale enumeration budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_prime(std::int64_t n);
std::int64_t ipow(std::int64_t base, int exponent);
/// exp(2*pi*i*num/den), with num reduced modulo den before conversion.
Complex root_of_unity(std::int64_t num, std::int64_t den);

/// An element of one level of a Tower. `code` packs the coefficients over
/// F_p (base-p digits, constant term least significant) with respect to the
/// level's defining polynomial.
struct FieldElem {
  int level = 0;
  std::uint32_t code = 0;

  friend bool operator==(const FieldElem&, const FieldElem&) = default;
};

/// Conway polynomial from the built-in table (little-endian, monic), or an
/// empty vector when (p, degree) is not tabulated.
std::vector<int> conway_polynomial(int p, int degree);

class Tower {
 public:
  static constexpr int kMaxTotalDegree = 12;
  static constexpr std::uint32_t kMaxFieldOrder = 1u << 16;

  /// Levels have degrees base, base*m1, base*m1*m2, ... over F_p.
  /// Level 0 is F_q with q = p^base.
  static Tower build(int p, int base_degree, std::span<const int> multipliers);
  static Tower build(int p, int base_degree, std::initializer_list<int> multipliers) {
    return build(p, base_degree, std::span<const int>(multipliers.begin(), multipliers.size()));
  }
  /// Rebuilds a tower from its serialized form, re-checking every invariant.
  static Tower from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  int characteristic() const { return p_; }
  int num_levels() const { return static_cast<int>(levels_.size()); }
  int degree(int level) const { return at(level).degree; }
  /// Degree over level 0 (F_q).
  int relative_degree(int level) const { return at(level).degree / levels_.front().degree; }
  std::uint32_t order(int level) const { return at(level).order; }
  std::uint32_t base_order() const { return levels_.front().order; }
  std::span<const int> polynomial(int level) const { return at(level).polynomial; }
  /// Index of the first level of the given degree over F_q, or -1.
  int level_of_relative_degree(int m) const;

  FieldElem zero(int level) const { return {level, 0}; }
  FieldElem one(int level) const { return {level, 1}; }
  FieldElem generator(int level) const;
  FieldElem power_of_generator(int level, std::int64_t k) const;
  FieldElem from_coeffs(int level, std::span<const int> coeffs) const;
  std::vector<int> coeffs(FieldElem x) const;
  std::vector<FieldElem> elements(int level) const;

  FieldElem add(FieldElem a, FieldElem b) const;
  FieldElem sub(FieldElem a, FieldElem b) const;
  FieldElem neg(FieldElem a) const;
  FieldElem mul(FieldElem a, FieldElem b) const;
  FieldElem inv(FieldElem a) const;
  FieldElem pow(FieldElem a, std::int64_t e) const;
  /// Discrete log w.r.t. the level's generator; throws for zero.
  std::int64_t log(FieldElem x) const;

  /// Image of x in a higher level.
  FieldElem embed(FieldElem x, int to_level) const;
  /// Inverse of embed; throws if x does not lie in the subfield.
  FieldElem descend(FieldElem x, int to_level) const;
  bool lies_in(FieldElem x, int level) const;
  FieldElem trace(FieldElem x, int to_level) const;
  FieldElem norm(FieldElem x, int to_level) const;
  /// Tr_{level/F_p}(x) as an integer in [0, p).
  int trace_to_prime(FieldElem x) const;
  /// phi(x) = exp(2 pi i Tr_{F_q/F_p}(x) / p) for x in level 0.
  Complex additive_character(FieldElem x) const;

 private:
  struct Level {
    int degree = 0;
    std::uint32_t order = 0;
    std::vector<int> polynomial;
    std::vector<std::uint32_t> exp;
    std::vector<std::int64_t> log;
  };

  const Level& at(int level) const;
  void check_nested(int from, int to) const;
  static Level make_level(int p, std::vector<int> polynomial);
  void check_compatibility() const;

  int p_ = 0;
  std::vector<Level> levels_;
};

/// A character of F_{q^m}^x: generator g maps to exp(2 pi i j/(q^m - 1)).
struct TorusCharacter {
  int level = 0;
  std::int64_t exponent = 0;
  std::int64_t modulus = 1;

  static TorusCharacter make(const Tower& tower, int level, std::int64_t exponent);

  Complex at_log(std::int64_t k) const { return root_of_unity(exponent * k, modulus); }
  Complex operator()(const Tower& tower, FieldElem x) const;
  /// theta, theta^q, ..., theta^{q^{m-1}} pairwise distinct (q = base field).
  bool is_regular(const Tower& tower) const;
  bool is_trivial() const { return exponent % modulus == 0; }
  /// theta o Norm from a higher level down to this character's level.
  TorusCharacter compose_norm(const Tower& tower, int from_level) const;
  /// Restriction to the multiplicative group of a lower level.
  TorusCharacter restrict_to(const Tower& tower, int to_level) const;
  TorusCharacter power(std::int64_t k) const;
  /// theta^q (the Galois twist over F_q).
  TorusCharacter frobenius(const Tower& tower) const;

  friend bool operator==(const TorusCharacter&, const TorusCharacter&) = default;
};

/// Smallest exponents of regular characters of F_{q^m}^x, one per Frobenius orbit.
std::vector<std::int64_t> regular_exponents(const Tower& tower, int level);

}  // namespace gljac
