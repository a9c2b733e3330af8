#include "gljac/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "gljac/parallel.hpp"

namespace gljac {

std::size_t SmallGroup::find(const Matrix& g) const {
  return index.at(encode(descriptor->field(), g));
}

std::size_t SmallGroup::product(std::size_t a, std::size_t b) const {
  return find(multiply(descriptor->field(), elements[a], elements[b]));
}

SmallGroup enumerate_group(const ClassFunction::Group& gl, std::int64_t budget) {
  if (gl->kind() != GroupKind::GL) throw std::invalid_argument("oracle groups are GL_n");
  const Fq& f = gl->field();
  const int n = gl->n();
  SmallGroup g;
  g.descriptor = gl;
  g.elements = enumerate_gl(f, n, budget);
  for (std::size_t i = 0; i < g.elements.size(); ++i) g.index.emplace(encode(f, g.elements[i]), i);
  g.inverse.resize(g.elements.size());
  for (std::size_t i = 0; i < g.elements.size(); ++i) g.inverse[i] = g.find(*inverse(f, g.elements[i]));

  // generators: diag(g0,1,...,1) and the transvections I + E_ij
  std::vector<Matrix> gens;
  Matrix d = identity_matrix(n);
  d(0, 0) = f.generator();
  gens.push_back(d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) {
        Matrix t = identity_matrix(n);
        t(i, j) = 1;
        gens.push_back(t);
      }
  std::vector<Matrix> gens_inv;
  for (const auto& s : gens) gens_inv.push_back(*inverse(f, s));

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  g.class_of.assign(g.elements.size(), kNone);
  for (std::size_t start = 0; start < g.elements.size(); ++start) {
    if (g.class_of[start] != kNone) continue;
    const std::size_t c = g.classes.size();
    std::vector<std::size_t> orbit{start};
    g.class_of[start] = c;
    for (std::size_t head = 0; head < orbit.size(); ++head) {
      for (std::size_t s = 0; s < gens.size(); ++s) {
        const std::size_t y = g.find(multiply(f, multiply(f, gens[s], g.elements[orbit[head]]), gens_inv[s]));
        if (g.class_of[y] == kNone) {
          g.class_of[y] = c;
          orbit.push_back(y);
        }
      }
    }
    std::sort(orbit.begin(), orbit.end());
    g.classes.push_back(std::move(orbit));
  }
  return g;
}

namespace {

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<NamedCharacter> character_table(const SmallGroup& g, std::size_t max_classes) {
  const std::size_t r = g.classes.size();
  if (r > max_classes) throw BudgetExceeded("too many classes for the oracle");
  const GroupDescriptor& G = *g.descriptor;
  if (r != G.num_classes()) throw std::logic_error("oracle class count differs from the label count");

  // oracle class -> descriptor class, checked against class sizes
  std::vector<std::size_t> to_label(r);
  for (std::size_t c = 0; c < r; ++c) {
    to_label[c] = G.class_of(g.elements[g.classes[c].front()]);
    if (static_cast<std::int64_t>(g.classes[c].size()) != G.class_size(to_label[c]))
      throw std::logic_error("oracle class size differs from the label arithmetic");
  }
  const std::size_t identity = g.class_of[g.find(identity_matrix(G.n()))];

  // coeff[j](k, l) = #{x in C_j : x^-1 z_l in C_k}
  std::vector<Eigen::MatrixXd> coeff(r, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)));
  std::vector<std::vector<std::int64_t>> counts(r, std::vector<std::int64_t>(r * r, 0));
  parallel_for(r, [&](std::size_t l) {
    const std::size_t z = g.classes[l].front();
    auto& slot = counts[l];
    for (std::size_t x = 0; x < g.elements.size(); ++x) {
      const std::size_t k = g.class_of[g.product(g.inverse[x], z)];
      ++slot[g.class_of[x] * r + k];
    }
  });
  for (std::size_t l = 0; l < r; ++l)
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t k = 0; k < r; ++k)
        coeff[j](static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = static_cast<double>(counts[l][j * r + k]);

  const double order = static_cast<double>(g.elements.size());
  std::mt19937_64 rng(0x5eedULL);
  for (int attempt = 0; attempt < 32; ++attempt) {
    Eigen::MatrixXd combo = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
    for (std::size_t j = 0; j < r; ++j) combo += (uniform(rng) - 0.5) * coeff[j];
    // central characters omega_k = |C_k| chi(z_k) / chi(1) are right eigenvectors of every coeff[j]
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(combo.cast<Complex>());
    if (solver.info() != Eigen::Success) continue;
    const Eigen::VectorXcd lambda = solver.eigenvalues();
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < lambda.size(); ++a)
      for (Eigen::Index b = a + 1; b < lambda.size(); ++b) gap = std::min(gap, std::abs(lambda[a] - lambda[b]));
    if (gap < 1e-6 * std::max(1.0, lambda.cwiseAbs().maxCoeff())) continue;

    std::vector<NamedCharacter> table;
    bool ok = true;
    for (Eigen::Index e = 0; e < lambda.size() && ok; ++e) {
      Eigen::VectorXcd omega = solver.eigenvectors().col(e);
      const Complex pivot = omega[static_cast<Eigen::Index>(identity)];
      if (std::abs(pivot) < 1e-12) {
        ok = false;
        break;
      }
      omega /= pivot;
      double s = 0.0;
      for (std::size_t l = 0; l < r; ++l)
        s += std::norm(omega[static_cast<Eigen::Index>(l)]) / static_cast<double>(g.classes[l].size());
      const double degree = std::round(std::sqrt(order / s));
      Eigen::VectorXcd values(static_cast<Eigen::Index>(r));
      for (std::size_t l = 0; l < r; ++l)
        values[static_cast<Eigen::Index>(to_label[l])] =
            omega[static_cast<Eigen::Index>(l)] * degree / static_cast<double>(g.classes[l].size());
      table.push_back({"", "oracle", ClassFunction(g.descriptor, std::move(values), true)});
    }
    if (!ok || orthonormality_defect(table) > kTolerance) continue;
    canonical_sort(table);
    for (std::size_t i = 0; i < table.size(); ++i) table[i].name = "chi" + std::to_string(i + 1);
    return table;
  }
  throw NumericalError("eigenvector splitting did not separate the characters");
}

namespace {

std::vector<std::int64_t> fingerprint(const NamedCharacter& row) {
  std::vector<std::int64_t> key{std::llround(row.chi.degree().real())};
  for (std::size_t c = 0; c < row.chi.size(); ++c) {
    key.push_back(std::llround(row.chi[c].real() * 1e6));
    key.push_back(std::llround(row.chi[c].imag() * 1e6));
  }
  return key;
}

}  // namespace

void canonical_sort(std::vector<NamedCharacter>& table) {
  std::vector<std::pair<std::vector<std::int64_t>, std::size_t>> keys;
  for (std::size_t i = 0; i < table.size(); ++i) keys.emplace_back(fingerprint(table[i]), i);
  std::sort(keys.begin(), keys.end());
  std::vector<NamedCharacter> sorted;
  sorted.reserve(table.size());
  for (const auto& [key, i] : keys) sorted.push_back(std::move(table[i]));
  table = std::move(sorted);
}

double table_match_deviation(std::span<const NamedCharacter> a, std::span<const NamedCharacter> b, double tol) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (a.size() != b.size()) return kInf;
  if (a.empty()) return 0.0;
  if (!a.front().chi.group().same_as(b.front().chi.group())) return kInf;
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const auto& row : a) {
    std::size_t best = b.size();
    double best_dev = kInf;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double dev = max_abs_deviation(row.chi, b[j].chi);
      if (dev < best_dev) {
        best_dev = dev;
        best = j;
      }
    }
    if (best == b.size() || best_dev > tol) return kInf;
    used[best] = true;
    worst = std::max(worst, best_dev);
  }
  return worst;
}

}  // namespace gljac
