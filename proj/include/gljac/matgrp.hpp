// Matrices over F_q, conjugacy classes of GL_n(F_q) and conjugation orbits
// of M_n(F_q), the (n,n)-parabolic of GL_2n, and the elliptic torus F_{q^n}^x.
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gljac/gf.hpp"

namespace gljac {

inline constexpr int kMaxDim = 4;

/// Polynomial over F_q as little-endian field codes.
using Poly = std::vector<std::uint8_t>;

/// Table-driven arithmetic for the base level F_q of a tower.
class Fq {
 public:
  explicit Fq(const Tower& tower);

  int q() const { return q_; }
  int p() const { return p_; }
  std::span<const int> polynomial() const { return polynomial_; }

  std::uint8_t add(std::uint8_t a, std::uint8_t b) const { return add_[a * q_ + b]; }
  std::uint8_t sub(std::uint8_t a, std::uint8_t b) const { return add_[a * q_ + neg_[b]]; }
  std::uint8_t neg(std::uint8_t a) const { return neg_[a]; }
  std::uint8_t mul(std::uint8_t a, std::uint8_t b) const { return mul_[a * q_ + b]; }
  std::uint8_t inv(std::uint8_t a) const;
  std::uint8_t generator() const { return exp_[q_ > 2 ? 1 : 0]; }
  std::int64_t log(std::uint8_t a) const;
  std::uint8_t exp(std::int64_t k) const;
  int trace_to_prime(std::uint8_t a) const { return trace_[a]; }
  /// The fixed non-trivial additive character phi.
  Complex phi(std::uint8_t a) const { return phi_[a]; }

  /// Monic irreducible polynomials of degree <= max_irreducible_degree(), in
  /// canonical order (degree, then coefficients from the top down).
  const std::vector<Poly>& irreducibles() const { return irreducibles_; }
  int max_irreducible_degree() const { return max_irreducible_degree_; }
  bool same_field(const Fq& other) const {
    return p_ == other.p_ && q_ == other.q_ && polynomial_ == other.polynomial_;
  }

 private:
  int p_ = 0;
  int q_ = 0;
  std::vector<int> polynomial_;
  std::vector<std::uint8_t> add_, mul_, neg_, exp_;
  std::vector<std::int64_t> log_;
  std::vector<int> trace_;
  std::vector<Complex> phi_;
  std::vector<Poly> irreducibles_;
  int max_irreducible_degree_ = 0;
};

// ---------------------------------------------------------------------------
// Polynomials over F_q

Poly poly_trim(Poly a);
int poly_degree(const Poly& a);
Poly poly_mul(const Fq& f, const Poly& a, const Poly& b);
Poly poly_pow(const Fq& f, const Poly& a, int e);
/// Quotient and remainder by a monic divisor.
std::pair<Poly, Poly> poly_divmod(const Fq& f, const Poly& a, const Poly& b);
/// Canonical order: degree first, then coefficients from x^{d-1} downward.
std::strong_ordering poly_compare(const Poly& a, const Poly& b);
std::string poly_to_string(const Poly& a);
Poly poly_from_string(const std::string& s, int q);
bool is_x(const Poly& a);

// ---------------------------------------------------------------------------
// Matrices

/// Square matrix over F_q with n <= kMaxDim. Entries outside n x n stay zero.
struct Matrix {
  int n = 0;
  std::array<std::uint8_t, kMaxDim * kMaxDim> e{};

  std::uint8_t operator()(int i, int j) const { return e[i * kMaxDim + j]; }
  std::uint8_t& operator()(int i, int j) { return e[i * kMaxDim + j]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

Matrix identity_matrix(int n);
Matrix zero_matrix(int n);
Matrix scalar_matrix(int n, std::uint8_t c);
Matrix multiply(const Fq& f, const Matrix& a, const Matrix& b);
Matrix add(const Fq& f, const Matrix& a, const Matrix& b);
Matrix subtract(const Fq& f, const Matrix& a, const Matrix& b);
Matrix scale(const Fq& f, std::uint8_t c, const Matrix& a);
Matrix negate(const Fq& f, const Matrix& a);
Matrix power(const Fq& f, const Matrix& a, std::int64_t k);
Matrix transpose(const Matrix& a);
std::optional<Matrix> inverse(const Fq& f, const Matrix& a);
std::uint8_t determinant(const Fq& f, const Matrix& a);
std::uint8_t trace(const Fq& f, const Matrix& a);
int rank(const Fq& f, const Matrix& a);
/// g a g^{-1}
Matrix conjugate(const Fq& f, const Matrix& g, const Matrix& a);
Matrix block_diagonal(std::span<const Matrix> blocks);
Matrix companion(const Fq& f, const Poly& poly);
Matrix evaluate(const Fq& f, const Poly& poly, const Matrix& a);
Poly characteristic_polynomial(const Fq& f, const Matrix& a);
/// Row-major base-q integer code of the entries.
std::uint64_t encode(const Fq& f, const Matrix& a);
Matrix decode(const Fq& f, int n, std::uint64_t code);
std::string matrix_to_string(const Matrix& a);

// ---------------------------------------------------------------------------
// Class labels

enum class LabelKind { GlClass, MsdOrbit };

/// One elementary-divisor block: an irreducible polynomial with the partition
/// of its Jordan sizes (descending).
struct DivisorBlock {
  Poly poly;
  std::vector<int> partition;

  friend bool operator==(const DivisorBlock&, const DivisorBlock&) = default;
};
std::strong_ordering operator<=>(const DivisorBlock& a, const DivisorBlock& b);

struct ClassLabel {
  LabelKind kind = LabelKind::GlClass;
  std::vector<DivisorBlock> blocks;

  int dimension() const;
  bool is_nilpotent() const;
  bool is_semisimple() const;
  std::string str() const;
  static ClassLabel parse(const std::string& text, LabelKind kind, int q);

  friend bool operator==(const ClassLabel& a, const ClassLabel& b) { return a.blocks == b.blocks; }
  friend bool operator<(const ClassLabel& a, const ClassLabel& b) { return a.blocks < b.blocks; }
};

struct ClassRecord {
  ClassLabel label;
  std::int64_t size = 0;
  std::int64_t centralizer = 0;
  Matrix representative;
};

std::int64_t gl_order(int n, std::int64_t q);
std::int64_t gaussian_binomial(int n, int k, std::int64_t q);
std::vector<std::vector<int>> partitions(int n);
/// |centralizer| of a unipotent of Jordan type lambda in GL_|lambda|(F_Q).
std::int64_t unipotent_centralizer_order(const std::vector<int>& lambda, std::int64_t Q);

/// Conjugacy-class invariant of a matrix (elementary divisors from kernel
/// filtrations). For kind GlClass the matrix must be invertible.
ClassLabel classify(const Fq& f, const Matrix& m, LabelKind kind = LabelKind::MsdOrbit);

/// Classes (GL_n) or conjugation orbits (M_n) from label arithmetic, in canonical order.
std::vector<ClassRecord> enumerate_classes(const Fq& f, int n, LabelKind kind);
/// Exhaustive variant: enumerates every matrix and counts orbit sizes. Test oracle.
std::vector<ClassRecord> enumerate_classes_exhaustive(const Fq& f, int n, LabelKind kind,
                                                      std::int64_t budget = 30'000'000);

/// Every element of GL_n(F_q), in increasing code order.
std::vector<Matrix> enumerate_gl(const Fq& f, int n, std::int64_t budget = 1'000'000);

// ---------------------------------------------------------------------------
// The (n,n)-parabolic P = M N of GL_2n

struct ParabolicData {
  int n = 0;
  std::vector<Matrix> coset_reps;

  bool contains(const Matrix& g) const;
  std::pair<Matrix, Matrix> levi(const Matrix& g) const;
  Matrix unipotent(const Matrix& x) const;
  Matrix levi_element(const Matrix& a, const Matrix& d) const;
  /// Index of the stored representative r with r^{-1} x in P.
  std::size_t coset_index(const Fq& f, const Matrix& x) const;

  std::map<std::uint64_t, std::size_t> subspace_index;
};

ParabolicData parabolic_data(const Fq& f, int n);

/// Transversal of G/U for U the upper unitriangular subgroup of GL_m.
std::vector<Matrix> unitriangular_transversal(const Fq& f, int m);
bool is_upper_unitriangular(const Matrix& g);

// ---------------------------------------------------------------------------
// F_{q^n}^x inside GL_n(F_q)

class TorusEmbedding {
 public:
  TorusEmbedding(const Tower& tower, int level, const Fq& f);

  int n() const { return n_; }
  int level() const { return level_; }
  std::int64_t order() const { return static_cast<std::int64_t>(powers_.size()); }
  /// Minimal polynomial over F_q of the level's generator.
  const Poly& generator_polynomial() const { return minpoly_; }
  Matrix operator()(const Tower& tower, FieldElem x) const;
  Matrix at_log(std::int64_t k) const;
  /// Discrete log of g when g lies in the image.
  std::optional<std::int64_t> log_of(const Fq& f, const Matrix& g) const;

 private:
  int n_ = 0;
  int level_ = 0;
  Poly minpoly_;
  std::vector<Matrix> powers_;
  std::unordered_map<std::uint64_t, std::int64_t> index_;
};

/// Minimal polynomial over F_q (level 0) of an element of a tower level.
Poly minimal_polynomial(const Tower& tower, FieldElem x);

}  // namespace gljac
