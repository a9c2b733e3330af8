// Class functions on GL_n(F_q), on tori F_{q^m}^x and on products GL_a x GL_b:
// inner products, induction, the twisted and untwisted Jacquet operators and
// decomposition against an irreducible table.
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gljac/gf.hpp"
#include "gljac/matgrp.hpp"

namespace gljac {

/// Raised when a numerical result fails an integrality or orthogonality check.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GroupKind { GL, Torus, Product };

class GroupDescriptor {
 public:
  using Ptr = std::shared_ptr<const GroupDescriptor>;

  /// GL_n over the given field; descriptors are shared per (field, n).
  static Ptr gl(std::shared_ptr<const Fq> field, int n);
  /// The cyclic group F_{q^m}^x of a tower level, one class per element.
  static Ptr torus(std::shared_ptr<const Tower> tower, int level);
  static Ptr product(Ptr a, Ptr b);
  static Ptr from_json(const nlohmann::json& j);

  GroupKind kind() const { return kind_; }
  int n() const { return n_; }
  int q() const { return q_; }
  std::string name() const;
  std::size_t num_classes() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  std::int64_t class_size(std::size_t i) const { return sizes_[i]; }
  std::int64_t order() const { return order_; }
  std::size_t identity_index() const { return identity_; }
  std::optional<std::size_t> find(const std::string& label) const;
  bool same_as(const GroupDescriptor& other) const;
  nlohmann::json to_json() const;

  // GL_n
  const Fq& field() const { return *field_; }
  const std::shared_ptr<const Fq>& field_ptr() const { return field_; }
  const std::vector<ClassRecord>& classes() const { return classes_; }
  std::size_t class_of(const Matrix& g) const;

  // Torus
  const Tower& tower() const { return *tower_; }
  int level() const { return level_; }

  // Product
  const GroupDescriptor& factor(int i) const { return *factors_[i]; }
  const Ptr& factor_ptr(int i) const { return factors_[i]; }
  std::size_t pair_index(std::size_t i, std::size_t j) const { return i * factors_[1]->num_classes() + j; }

 private:
  GroupKind kind_ = GroupKind::GL;
  int n_ = 0;
  int q_ = 0;
  std::int64_t order_ = 0;
  std::size_t identity_ = 0;
  std::vector<std::string> labels_;
  std::vector<std::int64_t> sizes_;
  std::shared_ptr<const Fq> field_;
  std::vector<ClassRecord> classes_;
  std::map<ClassLabel, std::size_t> index_;
  std::shared_ptr<const Tower> tower_;
  int level_ = 0;
  std::array<Ptr, 2> factors_;
};

class ClassFunction {
 public:
  using Group = GroupDescriptor::Ptr;

  ClassFunction() = default;
  ClassFunction(Group group, Eigen::VectorXcd values, bool character = false);

  static ClassFunction zero(Group group);
  static ClassFunction trivial(Group group);
  static ClassFunction regular(Group group);

  const GroupDescriptor& group() const { return *group_; }
  const Group& group_ptr() const { return group_; }
  const Eigen::VectorXcd& values() const { return values_; }
  Eigen::VectorXcd& values() { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  Complex operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  Complex degree() const { return (*this)[group_->identity_index()]; }
  /// Value at an arbitrary element of GL_n.
  Complex at(const Matrix& g) const { return (*this)[group_->class_of(g)]; }

  bool is_character() const { return character_; }
  ClassFunction& mark_character(bool flag = true) {
    character_ = flag;
    return *this;
  }

  ClassFunction conjugate() const;

  friend ClassFunction operator+(const ClassFunction& a, const ClassFunction& b);
  friend ClassFunction operator-(const ClassFunction& a, const ClassFunction& b);
  friend ClassFunction operator*(Complex s, const ClassFunction& a);
  friend ClassFunction operator*(const ClassFunction& a, const ClassFunction& b);

 private:
  Group group_;
  Eigen::VectorXcd values_;
  bool character_ = false;
};

/// (1/|G|) sum_C |C| f(C) conj(g(C))
Complex inner_product(const ClassFunction& f, const ClassFunction& g);
double max_abs_deviation(const ClassFunction& f, const ClassFunction& g);

/// Value of a class function of a subgroup H at an element, or nullopt when
/// the element lies outside H.
using SubgroupFunction = std::function<std::optional<Complex>(const Matrix&)>;

/// Frobenius formula over a transversal of G/H:
/// (Ind f)(g) = sum_{x in G/H, x^-1 g x in H} f(x^-1 g x).
ClassFunction induce(const ClassFunction::Group& target, std::span<const Matrix> transversal,
                     std::int64_t subgroup_order, const SubgroupFunction& f);

/// Restriction of a GL_n class function to the embedded torus F_{q^n}^x.
ClassFunction restrict_to_torus(const ClassFunction& chi, const TorusEmbedding& embedding,
                                const ClassFunction::Group& torus);

/// Character of the psi-twisted Jacquet module along N = M_n, psi(u(X)) = phi(tr X),
/// as a class function of the diagonal GL_n.
ClassFunction twisted_jacquet(const ClassFunction& chi, const ParabolicData& pd,
                              const ClassFunction::Group& gl_n);
Complex twisted_jacquet_at(const ClassFunction& chi, const ParabolicData& pd, const Matrix& g);
/// The same average with trivial psi, on the Levi GL_n x GL_n.
ClassFunction untwisted_jacquet(const ClassFunction& chi, const ParabolicData& pd,
                                const ClassFunction::Group& levi);

struct NamedCharacter {
  std::string name;
  std::string family;
  ClassFunction chi;
};

struct Decomposition {
  std::vector<std::string> basis;
  std::vector<std::int64_t> multiplicities;
  double residual = 0.0;
};

/// Multiplicities <f, chi_i>, rounded. Throws NumericalError when the table is
/// not orthonormal, when a multiplicity is not integral, when a character has
/// a negative multiplicity, or when the reconstruction misses f.
Decomposition decompose(const ClassFunction& f, std::span<const NamedCharacter> table);
/// Largest deviation from orthonormality (first relation) of a table.
double orthonormality_defect(std::span<const NamedCharacter> table);
/// Largest deviation of sum_chi |chi(C)|^2 from |G|/|C| (second relation).
double column_orthogonality_defect(std::span<const NamedCharacter> table);

nlohmann::json to_json(const ClassFunction& f);
ClassFunction class_function_from_json(const nlohmann::json& j);
nlohmann::json table_to_json(std::span<const NamedCharacter> table, const std::string& tag);
std::vector<NamedCharacter> table_from_json(const nlohmann::json& j);
std::string decomposition_to_csv(const Decomposition& d);

}  // namespace gljac
