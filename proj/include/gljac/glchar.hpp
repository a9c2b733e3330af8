// Characters of GL_n(F_q): the GL_2 table, Deligne-Lusztig characters of the
// anisotropic torus, the principal series pi x pi of GL_2n and its two
// constituents St_2(pi), Sp_2(pi), and the identities relating their
// twisted Jacquet modules.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gljac/classfun.hpp"

namespace gljac {

/// Shared data for a fixed (n, q): the tower F_q, F_{q^n}, F_{q^2n}, the groups
/// GL_n and GL_2n, the (n,n)-parabolic and F_{q^n}^x inside GL_n.
struct Lab {
  int n = 0;
  int q = 0;
  std::shared_ptr<const Tower> tower;
  std::shared_ptr<const Fq> field;
  ClassFunction::Group gl_n;
  ClassFunction::Group gl_2n;
  ClassFunction::Group torus_n;
  ParabolicData parabolic;
  std::shared_ptr<const TorusEmbedding> embedding;

  static constexpr int kSmall = 1;  // tower level of F_{q^n}
  static constexpr int kLarge = 2;  // tower level of F_{q^2n}

  /// Throws std::invalid_argument unless q is a prime power, n is 1 or 2 and
  /// the tower fits the degree caps.
  static std::shared_ptr<const Lab> make(int n, int q);
};

/// p and e with q = p^e, or nullopt when q is not a prime power.
std::optional<std::pair<int, int>> prime_power(int q);
/// GL_n over F_q with the standard (Conway) base field.
ClassFunction::Group standard_gl(int n, int q);

// ---------------------------------------------------------------------------
// Tables

/// The four families of GL_2(F_q): U[a] = a o det, V[a] = twisted Steinberg,
/// W[a,b] = principal series, X[j] = cuspidal attached to nu = j on F_{q^2}^x.
/// The tower must contain a level of relative degree 2.
std::vector<NamedCharacter> gl2_table(std::shared_ptr<const Tower> tower);
std::vector<NamedCharacter> gl2_table(int q);

/// The characters of GL_1 = F_q^x.
std::vector<NamedCharacter> gl1_table(const ClassFunction::Group& gl1);

/// The irreducible table of the lab's GL_n (n = 1 or 2).
std::vector<NamedCharacter> irreducible_table(const Lab& lab);

// ---------------------------------------------------------------------------
// Deligne-Lusztig characters

/// Sign convention for R(T,theta) on GL_m, anisotropic T: R is (-1)^{m-1}
/// times the Deligne-Lusztig virtual character, so R(1) > 0 and R is an
/// irreducible character for regular theta.
inline constexpr const char* kDeligneLusztigSign = "R(T,theta) = (-1)^(m-1) R_DL(T,theta), R(1) > 0";

/// R(T, theta) on GL_m over the tower's base field, T = the level of theta.
ClassFunction dl_character(const Tower& tower, const ClassFunction::Group& gl_m, const TorusCharacter& theta);
/// Convenience: builds the tower F_q, F_{q^m} and theta = exponent.
ClassFunction dl_character(int m, int q, std::int64_t exponent);

// ---------------------------------------------------------------------------
// The St_2 / Sp_2 pipeline

/// theta_0 must be a regular, non-trivial character of F_{q^n}^x.
bool is_admissible(const Lab& lab, std::int64_t theta0);
std::vector<std::int64_t> admissible_exponents(const Lab& lab);

TorusCharacter theta0_character(const Lab& lab, std::int64_t theta0);
/// theta = theta_0 o Norm on F_{q^2n}^x.
TorusCharacter theta_character(const Lab& lab, std::int64_t theta0);

/// pi = R(F_{q^n}^x, theta_0) on GL_n.
ClassFunction cuspidal(const Lab& lab, std::int64_t theta0);
/// Ind_P^G (pi x pi) on GL_2n.
ClassFunction principal_series_pi_pi(const Lab& lab, std::int64_t theta0);

struct St2Sp2 {
  ClassFunction st2;
  ClassFunction sp2;
};
/// St_2 = (pi x pi + R)/2, Sp_2 = (pi x pi - R)/2 with R = R(F_{q^2n}^x, theta_0 o Norm).
/// Throws NumericalError when either half is not an irreducible character.
St2Sp2 st2_sp2(const Lab& lab, std::int64_t theta0);

/// Ind from F_{q^n}^x to GL_n of a function on the torus (class-sum form).
ClassFunction induce_from_torus(const Lab& lab, const ClassFunction& f);
/// Ind from F_{q^n}^x to GL_n of a torus character of level 1.
ClassFunction induce_from_torus(const Lab& lab, const TorusCharacter& chi);

/// 1/2 ((pi x pi)_{N,psi} - Ind theta_0^2). Throws NumericalError when the
/// result is not a character of GL_n.
ClassFunction sp2_jacquet_formula(const Lab& lab, std::int64_t theta0);

/// Gelfand-Graev character of GL_m: induced from psi_U(u) = phi(sum u_{i,i+1}).
ClassFunction gelfand_graev(const ClassFunction::Group& gl_m);

struct GenericSplit {
  std::string st2_name;
  std::string sp2_name;
  ClassFunction st2;
  ClassFunction sp2;
};
/// Finds the two constituents of a multiplicity-free character with two
/// constituents and tells them apart by their multiplicity in gamma.
GenericSplit split_by_genericity(const ClassFunction& pi_pi, std::span<const NamedCharacter> table,
                                 const ClassFunction& gamma);

struct IdentityCheck {
  std::string name;
  bool pass = false;
  double max_abs_deviation = 0.0;
  double elapsed_ms = 0.0;
};

struct VerifyReport {
  int n = 0;
  int q = 0;
  std::int64_t theta0 = 0;
  std::int64_t theta_regular = 0;
  std::vector<IdentityCheck> identities;
  bool all_pass() const;
};

/// Checks sum, difference, dimension and cuspidal_jacquet identities. Throws
/// std::invalid_argument for an inadmissible theta_0.
VerifyReport verify_identities(const Lab& lab, std::int64_t theta0);

}  // namespace gljac
