// Fourier analysis on M_n(F_q) with the trace pairing
//   f^(Y) = sum_X f(X) phi(tr(XY)),
// for dense, sparse and conjugation-invariant functions.
#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "gljac/classfun.hpp"

namespace gljac {

/// Conjugation orbits of M_n(F_q), with a lazily built code -> orbit map.
class OrbitSpace {
 public:
  static constexpr std::int64_t kMaxDense = std::int64_t{1} << 26;

  static std::shared_ptr<const OrbitSpace> make(std::shared_ptr<const Fq> field, int n);
  /// M_n over the standard F_q.
  static std::shared_ptr<const OrbitSpace> make(int n, int q);

  const Fq& field() const { return *field_; }
  const std::shared_ptr<const Fq>& field_ptr() const { return field_; }
  int n() const { return n_; }
  int q() const { return field_->q(); }
  /// q^{n^2}
  std::int64_t size() const { return size_; }
  const std::vector<ClassRecord>& orbits() const { return orbits_; }
  std::size_t num_orbits() const { return orbits_.size(); }
  std::optional<std::size_t> find(const ClassLabel& label) const;
  /// Accepts "nilpotent:[2,1]", "zero", or a label such as "(x)^[1] (x+1)^[1]".
  std::size_t parse(const std::string& text) const;
  /// Orbit index of every matrix code. Throws BudgetExceeded above `budget`.
  const std::vector<std::uint32_t>& orbit_map(std::int64_t budget = std::int64_t{1} << 22) const;

 private:
  friend Eigen::MatrixXcd orbit_kernel(const OrbitSpace& space);

  std::shared_ptr<const Fq> field_;
  int n_ = 0;
  std::int64_t size_ = 0;
  std::vector<ClassRecord> orbits_;
  mutable std::once_flag map_once_;
  mutable std::vector<std::uint32_t> map_;
  mutable std::once_flag kernel_once_;
  mutable Eigen::MatrixXcd kernel_;
};

enum class Form { Dense, Sparse, Invariant };

struct MatFunction {
  std::shared_ptr<const OrbitSpace> space;
  Form form = Form::Dense;
  /// Dense: one value per matrix code. Invariant: one value per orbit.
  Eigen::VectorXcd values;
  /// Sparse: (code, value) with increasing codes.
  std::vector<std::pair<std::uint64_t, Complex>> support;

  static MatFunction dense(std::shared_ptr<const OrbitSpace> space, Eigen::VectorXcd values);
  static MatFunction sparse(std::shared_ptr<const OrbitSpace> space, std::vector<std::pair<std::uint64_t, Complex>> support);
  static MatFunction invariant(std::shared_ptr<const OrbitSpace> space, Eigen::VectorXcd orbit_values);

  MatFunction to_dense() const;
  MatFunction to_sparse() const;
  /// Throws std::invalid_argument when the values differ on a conjugate pair.
  MatFunction to_invariant() const;

  Complex at(std::uint64_t code) const;
  /// sum_X f(X)
  Complex mass() const;
  /// sum_X |f(X)|^2
  double norm_squared() const;
};

/// Butterfly transform, one q-point stage per matrix entry.
MatFunction fourier_dense(const MatFunction& f);
/// Double sum over (X, Y). Test oracle, q^{n^2} <= 6561.
MatFunction fourier_naive(const MatFunction& f);
/// Orbit-kernel transform of an invariant function; result is invariant.
MatFunction fourier_invariant(const MatFunction& f);
/// Invariant input goes through the kernel, anything else through the butterfly.
MatFunction fourier(const MatFunction& f);

/// K(O, O') = sum_{X in O} phi(tr(X Y_O')), row-major r x r. Read from and
/// written to $GLJAC_KERNEL_CACHE when that variable is set; kept on the
/// space after the first call.
Eigen::MatrixXcd orbit_kernel(const OrbitSpace& space);
Eigen::MatrixXcd compute_orbit_kernel(const OrbitSpace& space);
std::string kernel_cache_name(const OrbitSpace& space);
void write_kernel(const std::string& path, const OrbitSpace& space, const Eigen::MatrixXcd& k);
std::optional<Eigen::MatrixXcd> read_kernel(const std::string& path, const OrbitSpace& space);

MatFunction orbit_indicator(std::shared_ptr<const OrbitSpace> space, std::size_t orbit);
MatFunction cone_indicator(std::shared_ptr<const OrbitSpace> space);
/// Number of X with X^n = 0, by enumeration.
std::int64_t count_nilpotent(const OrbitSpace& space);

struct Spectrum {
  std::string name;
  std::vector<std::string> labels;
  std::vector<std::int64_t> sizes;
  std::vector<Complex> coefficients;
  double parseval_lhs = 0.0;  // sum_O |c_O|^2 |O|
  double parseval_rhs = 0.0;  // q^{n^2} sum_X |f(X)|^2
  bool parseval_pass = false;
};

/// Coefficients of f^ in the orbit-indicator basis.
Spectrum invariant_spectrum(const MatFunction& f, const std::string& name);
std::string spectrum_to_csv(const Spectrum& s);
nlohmann::json spectrum_to_json(const Spectrum& s);

}  // namespace gljac
