#include "gljac/matgrp.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gljac {

// ---------------------------------------------------------------------------
// Fq

Fq::Fq(const Tower& tower) {
  p_ = tower.characteristic();
  if (tower.base_order() > 256) throw std::invalid_argument("F_q too large for matrix arithmetic");
  q_ = static_cast<int>(tower.base_order());
  polynomial_.assign(tower.polynomial(0).begin(), tower.polynomial(0).end());
  add_.resize(q_ * q_);
  mul_.resize(q_ * q_);
  neg_.resize(q_);
  trace_.resize(q_);
  phi_.resize(q_);
  log_.assign(q_, -1);
  exp_.resize(q_ - 1);
  for (int a = 0; a < q_; ++a) {
    const FieldElem x{0, static_cast<std::uint32_t>(a)};
    neg_[a] = static_cast<std::uint8_t>(tower.neg(x).code);
    trace_[a] = tower.trace_to_prime(x);
    phi_[a] = tower.additive_character(x);
    if (a != 0) log_[a] = tower.log(x);
    for (int b = 0; b < q_; ++b) {
      const FieldElem y{0, static_cast<std::uint32_t>(b)};
      add_[a * q_ + b] = static_cast<std::uint8_t>(tower.add(x, y).code);
      mul_[a * q_ + b] = static_cast<std::uint8_t>(tower.mul(x, y).code);
    }
  }
  for (int k = 0; k < q_ - 1; ++k) exp_[k] = static_cast<std::uint8_t>(tower.power_of_generator(0, k).code);

  // Monic irreducibles by trial division, as far as enumeration stays cheap.
  for (int d = 1; d <= kMaxDim; ++d) {
    if (ipow(q_, d) > 200'000) break;
    max_irreducible_degree_ = d;
    const std::int64_t count = ipow(q_, d);
    std::vector<Poly> found;
    for (std::int64_t idx = 0; idx < count; ++idx) {
      Poly f(d + 1, 0);
      f[d] = 1;
      std::int64_t t = idx;
      for (int i = d - 1; i >= 0; --i) {
        f[i] = static_cast<std::uint8_t>(t % q_);
        t /= q_;
      }
      bool irreducible = true;
      for (const Poly& g : irreducibles_) {
        if (2 * poly_degree(g) > d) break;
        if (poly_divmod(*this, f, g).second.empty()) {
          irreducible = false;
          break;
        }
      }
      if (irreducible) found.push_back(std::move(f));
    }
    std::sort(found.begin(), found.end(), [](const Poly& a, const Poly& b) { return poly_compare(a, b) < 0; });
    irreducibles_.insert(irreducibles_.end(), found.begin(), found.end());
  }
}

std::uint8_t Fq::inv(std::uint8_t a) const {
  if (a == 0) throw std::domain_error("inverse of zero");
  return exp((q_ - 1 - log_[a]) % (q_ - 1));
}

std::int64_t Fq::log(std::uint8_t a) const {
  if (a == 0) throw std::domain_error("log of zero");
  return log_[a];
}

std::uint8_t Fq::exp(std::int64_t k) const {
  const std::int64_t m = q_ - 1;
  std::int64_t r = k % m;
  if (r < 0) r += m;
  return exp_[r];
}

// ---------------------------------------------------------------------------
// Polynomials

Poly poly_trim(Poly a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

int poly_degree(const Poly& a) {
  for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i)
    if (a[i] != 0) return i;
  return -1;
}

Poly poly_mul(const Fq& f, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
  return poly_trim(std::move(out));
}

Poly poly_pow(const Fq& f, const Poly& a, int e) {
  Poly out{1};
  for (int i = 0; i < e; ++i) out = poly_mul(f, out, a);
  return out;
}

std::pair<Poly, Poly> poly_divmod(const Fq& f, const Poly& a, const Poly& b) {
  const int db = poly_degree(b);
  if (db < 0 || b[db] != 1) throw std::invalid_argument("divisor must be monic");
  Poly rem = poly_trim(a);
  const int da = poly_degree(rem);
  if (da < db) return {{}, rem};
  Poly quot(da - db + 1, 0);
  for (int k = da; k >= db; --k) {
    const std::uint8_t c = rem[k];
    if (c == 0) continue;
    quot[k - db] = c;
    for (int i = 0; i <= db; ++i) rem[k - db + i] = f.sub(rem[k - db + i], f.mul(c, b[i]));
  }
  return {poly_trim(std::move(quot)), poly_trim(std::move(rem))};
}

std::strong_ordering poly_compare(const Poly& a, const Poly& b) {
  const int da = poly_degree(a), db = poly_degree(b);
  if (da != db) return da <=> db;
  for (int i = da - 1; i >= 0; --i)
    if (a[i] != b[i]) return a[i] <=> b[i];
  if (da >= 0 && a[da] != b[da]) return a[da] <=> b[da];
  return std::strong_ordering::equal;
}

bool is_x(const Poly& a) { return poly_degree(a) == 1 && a[0] == 0 && a[1] == 1; }

std::string poly_to_string(const Poly& a) {
  const int d = poly_degree(a);
  if (d < 0) return "0";
  std::string out;
  for (int k = d; k >= 0; --k) {
    const int c = a[k];
    if (c == 0) continue;
    if (!out.empty()) out += "+";
    if (k == 0) {
      out += std::to_string(c);
    } else {
      if (c != 1) out += std::to_string(c);
      out += "x";
      if (k > 1) out += "^" + std::to_string(k);
    }
  }
  return out;
}

Poly poly_from_string(const std::string& s, int q) {
  std::vector<std::pair<int, int>> terms;
  std::stringstream ss(s);
  std::string term;
  int max_deg = 0;
  while (std::getline(ss, term, '+')) {
    term.erase(std::remove_if(term.begin(), term.end(), ::isspace), term.end());
    if (term.empty()) throw std::invalid_argument("malformed polynomial: " + s);
    const auto xpos = term.find('x');
    int coeff = 1, deg = 0;
    if (xpos == std::string::npos) {
      coeff = std::stoi(term);
    } else {
      if (xpos > 0) coeff = std::stoi(term.substr(0, xpos));
      deg = 1;
      if (xpos + 1 < term.size()) {
        if (term[xpos + 1] != '^') throw std::invalid_argument("malformed polynomial: " + s);
        deg = std::stoi(term.substr(xpos + 2));
      }
    }
    if (coeff < 0 || coeff >= q || deg < 0) throw std::invalid_argument("malformed polynomial: " + s);
    terms.emplace_back(deg, coeff);
    max_deg = std::max(max_deg, deg);
  }
  Poly out(max_deg + 1, 0);
  for (auto [d, c] : terms) out[d] = static_cast<std::uint8_t>(c);
  return poly_trim(std::move(out));
}

// ---------------------------------------------------------------------------
// Matrices

Matrix identity_matrix(int n) { return scalar_matrix(n, 1); }

Matrix zero_matrix(int n) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("matrix size out of range");
  Matrix m;
  m.n = n;
  return m;
}

Matrix scalar_matrix(int n, std::uint8_t c) {
  Matrix m = zero_matrix(n);
  for (int i = 0; i < n; ++i) m(i, i) = c;
  return m;
}

Matrix multiply(const Fq& f, const Matrix& a, const Matrix& b) {
  Matrix c = zero_matrix(a.n);
  for (int i = 0; i < a.n; ++i)
    for (int k = 0; k < a.n; ++k) {
      const std::uint8_t x = a(i, k);
      if (x == 0) continue;
      for (int j = 0; j < a.n; ++j) c(i, j) = f.add(c(i, j), f.mul(x, b(k, j)));
    }
  return c;
}

Matrix add(const Fq& f, const Matrix& a, const Matrix& b) {
  Matrix c = zero_matrix(a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) c(i, j) = f.add(a(i, j), b(i, j));
  return c;
}

Matrix subtract(const Fq& f, const Matrix& a, const Matrix& b) {
  Matrix c = zero_matrix(a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) c(i, j) = f.sub(a(i, j), b(i, j));
  return c;
}

Matrix scale(const Fq& f, std::uint8_t s, const Matrix& a) {
  Matrix c = zero_matrix(a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) c(i, j) = f.mul(s, a(i, j));
  return c;
}

Matrix negate(const Fq& f, const Matrix& a) { return scale(f, f.neg(1), a); }

Matrix power(const Fq& f, const Matrix& a, std::int64_t k) {
  if (k < 0) {
    auto inv = inverse(f, a);
    if (!inv) throw std::domain_error("negative power of a singular matrix");
    return power(f, *inv, -k);
  }
  Matrix result = identity_matrix(a.n), base = a;
  while (k > 0) {
    if (k & 1) result = multiply(f, result, base);
    base = multiply(f, base, base);
    k >>= 1;
  }
  return result;
}

Matrix transpose(const Matrix& a) {
  Matrix t = zero_matrix(a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) t(i, j) = a(j, i);
  return t;
}

namespace {

using Rows = std::vector<std::vector<std::uint8_t>>;

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(const Fq& f, Rows& rows, int cols) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < cols && r < static_cast<int>(rows.size()); ++c) {
    int piv = -1;
    for (int i = r; i < static_cast<int>(rows.size()); ++i)
      if (rows[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[r], rows[piv]);
    const std::uint8_t s = f.inv(rows[r][c]);
    for (int j = 0; j < cols; ++j) rows[r][j] = f.mul(s, rows[r][j]);
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      const std::uint8_t t = rows[i][c];
      for (int j = 0; j < cols; ++j) rows[i][j] = f.sub(rows[i][j], f.mul(t, rows[r][j]));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

Rows to_rows(const Matrix& a) {
  Rows rows(a.n, std::vector<std::uint8_t>(a.n));
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) rows[i][j] = a(i, j);
  return rows;
}

}  // namespace

std::optional<Matrix> inverse(const Fq& f, const Matrix& a) {
  const int n = a.n;
  Rows rows(n, std::vector<std::uint8_t>(2 * n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) rows[i][j] = a(i, j);
    rows[i][n + i] = 1;
  }
  const auto pivots = rref(f, rows, 2 * n);
  if (static_cast<int>(pivots.size()) < n || pivots[n - 1] != n - 1) return std::nullopt;
  Matrix inv = zero_matrix(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = rows[i][n + j];
  return inv;
}

std::uint8_t determinant(const Fq& f, const Matrix& a) {
  Rows rows = to_rows(a);
  const int n = a.n;
  std::uint8_t det = 1;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int i = c; i < n; ++i)
      if (rows[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return 0;
    if (piv != c) {
      std::swap(rows[piv], rows[c]);
      det = f.neg(det);
    }
    det = f.mul(det, rows[c][c]);
    const std::uint8_t s = f.inv(rows[c][c]);
    for (int i = c + 1; i < n; ++i) {
      if (rows[i][c] == 0) continue;
      const std::uint8_t t = f.mul(rows[i][c], s);
      for (int j = c; j < n; ++j) rows[i][j] = f.sub(rows[i][j], f.mul(t, rows[c][j]));
    }
  }
  return det;
}

std::uint8_t trace(const Fq& f, const Matrix& a) {
  std::uint8_t t = 0;
  for (int i = 0; i < a.n; ++i) t = f.add(t, a(i, i));
  return t;
}

int rank(const Fq& f, const Matrix& a) {
  Rows rows = to_rows(a);
  return static_cast<int>(rref(f, rows, a.n).size());
}

Matrix conjugate(const Fq& f, const Matrix& g, const Matrix& a) {
  auto gi = inverse(f, g);
  if (!gi) throw std::domain_error("conjugating by a singular matrix");
  return multiply(f, multiply(f, g, a), *gi);
}

Matrix block_diagonal(std::span<const Matrix> blocks) {
  int n = 0;
  for (const auto& b : blocks) n += b.n;
  Matrix m = zero_matrix(n);
  int off = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.n; ++i)
      for (int j = 0; j < b.n; ++j) m(off + i, off + j) = b(i, j);
    off += b.n;
  }
  return m;
}

Matrix companion(const Fq& f, const Poly& poly) {
  const int d = poly_degree(poly);
  if (d < 1 || poly[d] != 1) throw std::invalid_argument("companion matrix needs a monic polynomial");
  Matrix c = zero_matrix(d);
  for (int i = 1; i < d; ++i) c(i, i - 1) = 1;
  for (int i = 0; i < d; ++i) c(i, d - 1) = f.neg(poly[i]);
  return c;
}

Matrix evaluate(const Fq& f, const Poly& poly, const Matrix& a) {
  Matrix acc = zero_matrix(a.n);
  for (int k = poly_degree(poly); k >= 0; --k) {
    acc = multiply(f, acc, a);
    for (int i = 0; i < a.n; ++i) acc(i, i) = f.add(acc(i, i), poly[k]);
  }
  return acc;
}

Poly characteristic_polynomial(const Fq& f, const Matrix& a) {
  const int n = a.n;
  Rows h = to_rows(a);
  // Similarity reduction to upper Hessenberg form.
  for (int j = 0; j + 2 < n; ++j) {
    int piv = -1;
    for (int i = j + 1; i < n; ++i)
      if (h[i][j] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != j + 1) {
      std::swap(h[piv], h[j + 1]);
      for (int r = 0; r < n; ++r) std::swap(h[r][piv], h[r][j + 1]);
    }
    const std::uint8_t s = f.inv(h[j + 1][j]);
    for (int k = j + 2; k < n; ++k) {
      if (h[k][j] == 0) continue;
      const std::uint8_t t = f.mul(h[k][j], s);
      for (int c = 0; c < n; ++c) h[k][c] = f.sub(h[k][c], f.mul(t, h[j + 1][c]));
      for (int r = 0; r < n; ++r) h[r][j + 1] = f.add(h[r][j + 1], f.mul(t, h[r][k]));
    }
  }
  // p_k = (x - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{j=i+1..k} h_{j,j-1}) p_{i-1}
  std::vector<Poly> p(n + 1);
  p[0] = Poly{1};
  for (int k = 1; k <= n; ++k) {
    Poly cur = poly_mul(f, Poly{f.neg(h[k - 1][k - 1]), 1}, p[k - 1]);
    std::uint8_t prod = 1;
    for (int i = k - 1; i >= 1; --i) {
      prod = f.mul(prod, h[i][i - 1]);
      const std::uint8_t coef = f.mul(h[i - 1][k - 1], prod);
      if (coef == 0) continue;
      Poly term = p[i - 1];
      term.resize(std::max(term.size(), cur.size()), 0);
      cur.resize(term.size(), 0);
      for (std::size_t t = 0; t < term.size(); ++t) cur[t] = f.sub(cur[t], f.mul(coef, term[t]));
      cur = poly_trim(std::move(cur));
    }
    p[k] = std::move(cur);
  }
  return p[n];
}

std::uint64_t encode(const Fq& f, const Matrix& a) {
  std::uint64_t code = 0;
  for (int i = a.n - 1; i >= 0; --i)
    for (int j = a.n - 1; j >= 0; --j) code = code * f.q() + a(i, j);
  return code;
}

Matrix decode(const Fq& f, int n, std::uint64_t code) {
  Matrix m = zero_matrix(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      m(i, j) = static_cast<std::uint8_t>(code % f.q());
      code /= f.q();
    }
  return m;
}

std::string matrix_to_string(const Matrix& a) {
  std::string out = "[";
  for (int i = 0; i < a.n; ++i) {
    if (i) out += ";";
    for (int j = 0; j < a.n; ++j) {
      if (j) out += " ";
      out += std::to_string(a(i, j));
    }
  }
  return out + "]";
}

// ---------------------------------------------------------------------------
// Labels

std::strong_ordering operator<=>(const DivisorBlock& a, const DivisorBlock& b) {
  if (auto c = poly_compare(a.poly, b.poly); c != 0) return c;
  // Reverse lexicographic on partitions: [2] before [1,1].
  if (a.partition != b.partition) return a.partition > b.partition ? std::strong_ordering::less : std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

int ClassLabel::dimension() const {
  int d = 0;
  for (const auto& b : blocks) d += poly_degree(b.poly) * std::accumulate(b.partition.begin(), b.partition.end(), 0);
  return d;
}

bool ClassLabel::is_nilpotent() const { return blocks.size() == 1 && is_x(blocks[0].poly); }

bool ClassLabel::is_semisimple() const {
  return std::all_of(blocks.begin(), blocks.end(), [](const DivisorBlock& b) {
    return std::all_of(b.partition.begin(), b.partition.end(), [](int k) { return k == 1; });
  });
}

std::string ClassLabel::str() const {
  std::string out;
  for (const auto& b : blocks) {
    if (!out.empty()) out += " ";
    out += "(" + poly_to_string(b.poly) + ")^[";
    for (std::size_t i = 0; i < b.partition.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(b.partition[i]);
    }
    out += "]";
  }
  return out;
}

ClassLabel ClassLabel::parse(const std::string& text, LabelKind kind, int q) {
  ClassLabel label;
  label.kind = kind;
  std::size_t pos = 0;
  while (true) {
    pos = text.find('(', pos);
    if (pos == std::string::npos) break;
    const auto close = text.find(")^[", pos);
    const auto end = close == std::string::npos ? close : text.find(']', close);
    if (close == std::string::npos || end == std::string::npos)
      throw std::invalid_argument("malformed class label: " + text);
    DivisorBlock block;
    block.poly = poly_from_string(text.substr(pos + 1, close - pos - 1), q);
    std::stringstream parts(text.substr(close + 3, end - close - 3));
    std::string part;
    while (std::getline(parts, part, ',')) block.partition.push_back(std::stoi(part));
    if (block.partition.empty() || poly_degree(block.poly) < 1 || block.poly[poly_degree(block.poly)] != 1)
      throw std::invalid_argument("malformed class label: " + text);
    std::sort(block.partition.rbegin(), block.partition.rend());
    label.blocks.push_back(std::move(block));
    pos = end;
  }
  if (label.blocks.empty()) throw std::invalid_argument("malformed class label: " + text);
  std::sort(label.blocks.begin(), label.blocks.end());
  return label;
}

std::int64_t gl_order(int n, std::int64_t q) {
  std::int64_t order = 1;
  const std::int64_t qn = ipow(q, n);
  for (int i = 0; i < n; ++i) order *= qn - ipow(q, i);
  return order;
}

std::int64_t gaussian_binomial(int n, int k, std::int64_t q) {
  std::int64_t num = 1, den = 1;
  for (int i = 0; i < k; ++i) {
    num *= ipow(q, n - i) - 1;
    den *= ipow(q, i + 1) - 1;
  }
  return num / den;
}

std::vector<std::vector<int>> partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int k = std::min(remaining, max_part); k >= 1; --k) {
      cur.push_back(k);
      self(self, remaining - k, k);
      cur.pop_back();
    }
  };
  rec(rec, n, n);
  return out;
}

std::int64_t unipotent_centralizer_order(const std::vector<int>& lambda, std::int64_t Q) {
  const int largest = lambda.empty() ? 0 : lambda.front();
  std::int64_t exponent = 0;
  for (int j = 1; j <= largest; ++j) {
    const std::int64_t conj = std::count_if(lambda.begin(), lambda.end(), [j](int p) { return p >= j; });
    exponent += conj * conj;
  }
  std::int64_t product = 1;
  for (int part = 1; part <= largest; ++part) {
    const int mult = static_cast<int>(std::count(lambda.begin(), lambda.end(), part));
    exponent -= static_cast<std::int64_t>(mult) * (mult + 1) / 2;
    for (int k = 1; k <= mult; ++k) product *= ipow(Q, k) - 1;
  }
  return ipow(Q, static_cast<int>(exponent)) * product;
}

ClassLabel classify(const Fq& f, const Matrix& m, LabelKind kind) {
  const int n = m.n;
  Poly chi = characteristic_polynomial(f, m);
  ClassLabel label;
  label.kind = kind;
  for (const Poly& g : f.irreducibles()) {
    const int dg = poly_degree(g);
    if (poly_degree(chi) < dg) break;
    int mult = 0;
    while (true) {
      auto [quot, rem] = poly_divmod(f, chi, g);
      if (!rem.empty()) break;
      chi = std::move(quot);
      ++mult;
    }
    if (mult == 0) continue;
    if (kind == LabelKind::GlClass && is_x(g)) throw std::invalid_argument("matrix is not invertible");
    const Matrix gm = evaluate(f, g, m);
    Matrix acc = identity_matrix(n);
    std::vector<int> counts;
    int prev_kernel = 0;
    for (int j = 1; j <= mult; ++j) {
      acc = multiply(f, acc, gm);
      const int kernel = n - rank(f, acc);
      counts.push_back((kernel - prev_kernel) / dg);
      prev_kernel = kernel;
    }
    DivisorBlock block{g, {}};
    for (int i = 1; i <= (counts.empty() ? 0 : counts.front()); ++i)
      block.partition.push_back(static_cast<int>(std::count_if(counts.begin(), counts.end(), [i](int c) { return c >= i; })));
    label.blocks.push_back(std::move(block));
  }
  if (poly_degree(chi) != 0) throw std::invalid_argument("characteristic polynomial did not factor within the irreducible table");
  std::sort(label.blocks.begin(), label.blocks.end());
  return label;
}

namespace {

Matrix label_representative(const Fq& f, const ClassLabel& label) {
  std::vector<Matrix> blocks;
  for (const auto& b : label.blocks)
    for (int part : b.partition) blocks.push_back(companion(f, poly_pow(f, b.poly, part)));
  return block_diagonal(blocks);
}

}  // namespace

std::vector<ClassRecord> enumerate_classes(const Fq& f, int n, LabelKind kind) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("matrix size out of range");
  if (n > f.max_irreducible_degree()) throw BudgetExceeded("irreducible table too small for this n and q");
  std::vector<const Poly*> polys;
  for (const Poly& g : f.irreducibles())
    if (poly_degree(g) <= n && !(kind == LabelKind::GlClass && is_x(g))) polys.push_back(&g);

  const std::int64_t order = gl_order(n, f.q());
  std::vector<ClassRecord> out;
  std::vector<DivisorBlock> cur;
  auto rec = [&](auto&& self, std::size_t idx, int remaining) -> void {
    if (remaining == 0) {
      ClassRecord rec;
      rec.label.kind = kind;
      rec.label.blocks = cur;
      std::sort(rec.label.blocks.begin(), rec.label.blocks.end());
      std::int64_t cent = 1;
      for (const auto& b : rec.label.blocks) cent *= unipotent_centralizer_order(b.partition, ipow(f.q(), poly_degree(b.poly)));
      rec.centralizer = cent;
      rec.size = order / cent;
      rec.representative = label_representative(f, rec.label);
      out.push_back(std::move(rec));
      return;
    }
    if (idx == polys.size()) return;
    self(self, idx + 1, remaining);
    const int d = poly_degree(*polys[idx]);
    for (int s = 1; s * d <= remaining; ++s)
      for (auto& lambda : partitions(s)) {
        cur.push_back({*polys[idx], lambda});
        self(self, idx + 1, remaining - s * d);
        cur.pop_back();
      }
  };
  rec(rec, 0, n);
  std::sort(out.begin(), out.end(), [](const ClassRecord& a, const ClassRecord& b) { return a.label < b.label; });
  return out;
}

std::vector<ClassRecord> enumerate_classes_exhaustive(const Fq& f, int n, LabelKind kind, std::int64_t budget) {
  const std::int64_t space = ipow(f.q(), n * n);
  const std::int64_t target = kind == LabelKind::GlClass ? gl_order(n, f.q()) : space;
  if (target > budget || space > budget) throw BudgetExceeded("exhaustive class enumeration over budget");

  // Generators of GL_n(F_q): all elementary transvections and one diagonal.
  std::vector<std::pair<Matrix, Matrix>> gens;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int a = 1; a < f.q(); ++a) {
        Matrix t = identity_matrix(n);
        t(i, j) = static_cast<std::uint8_t>(a);
        gens.emplace_back(t, *inverse(f, t));
      }
    }
  if (f.q() > 2) {
    Matrix d = identity_matrix(n);
    d(0, 0) = f.generator();
    gens.emplace_back(d, *inverse(f, d));
  }

  std::vector<char> seen(space, 0);
  std::vector<ClassRecord> out;
  for (std::int64_t code = 0; code < space; ++code) {
    if (seen[code]) continue;
    const Matrix start = decode(f, n, code);
    if (kind == LabelKind::GlClass && determinant(f, start) == 0) {
      seen[code] = 1;
      continue;
    }
    std::deque<Matrix> queue{start};
    seen[code] = 1;
    std::int64_t size = 0;
    const ClassLabel label = classify(f, start, kind);
    while (!queue.empty()) {
      const Matrix x = queue.front();
      queue.pop_front();
      ++size;
      if (!(classify(f, x, kind) == label)) throw std::logic_error("classify is not conjugation invariant");
      for (const auto& [g, gi] : gens) {
        const Matrix y = multiply(f, multiply(f, g, x), gi);
        const std::uint64_t c = encode(f, y);
        if (!seen[c]) {
          seen[c] = 1;
          queue.push_back(y);
        }
      }
    }
    ClassRecord rec;
    rec.label = label;
    rec.size = size;
    rec.centralizer = gl_order(n, f.q()) / size;
    rec.representative = start;
    out.push_back(std::move(rec));
  }
  std::sort(out.begin(), out.end(), [](const ClassRecord& a, const ClassRecord& b) { return a.label < b.label; });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].label == out[i - 1].label) throw std::logic_error("two orbits share a label");
  return out;
}

std::vector<Matrix> enumerate_gl(const Fq& f, int n, std::int64_t budget) {
  if (gl_order(n, f.q()) > budget) throw BudgetExceeded("group enumeration over budget");
  const std::int64_t space = ipow(f.q(), n * n);
  std::vector<Matrix> out;
  out.reserve(gl_order(n, f.q()));
  for (std::int64_t code = 0; code < space; ++code) {
    const Matrix m = decode(f, n, code);
    if (determinant(f, m) != 0) out.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parabolic

bool ParabolicData::contains(const Matrix& g) const {
  for (int i = n; i < 2 * n; ++i)
    for (int j = 0; j < n; ++j)
      if (g(i, j) != 0) return false;
  return true;
}

std::pair<Matrix, Matrix> ParabolicData::levi(const Matrix& g) const {
  Matrix a = zero_matrix(n), d = zero_matrix(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) = g(i, j);
      d(i, j) = g(n + i, n + j);
    }
  return {a, d};
}

Matrix ParabolicData::unipotent(const Matrix& x) const {
  Matrix u = identity_matrix(2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) u(i, n + j) = x(i, j);
  return u;
}

Matrix ParabolicData::levi_element(const Matrix& a, const Matrix& d) const {
  const Matrix blocks[2] = {a, d};
  return block_diagonal(blocks);
}

namespace {

std::uint64_t subspace_key(const Fq& f, const Rows& rows) {
  std::uint64_t key = 0;
  for (const auto& r : rows)
    for (std::uint8_t c : r) key = key * f.q() + c;
  return key;
}

}  // namespace

std::size_t ParabolicData::coset_index(const Fq& f, const Matrix& x) const {
  Rows rows(n, std::vector<std::uint8_t>(2 * n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < 2 * n; ++i) rows[j][i] = x(i, j);
  rref(f, rows, 2 * n);
  auto it = subspace_index.find(subspace_key(f, rows));
  if (it == subspace_index.end()) throw std::logic_error("coset representative not found");
  return it->second;
}

ParabolicData parabolic_data(const Fq& f, int n) {
  if (n < 1 || 2 * n > kMaxDim) throw std::invalid_argument("parabolic block size out of range");
  const int dim = 2 * n;
  ParabolicData pd;
  pd.n = n;
  for (unsigned mask = 0; mask < (1u << dim); ++mask) {
    if (std::popcount(mask) != n) continue;
    std::vector<int> piv;
    for (int c = 0; c < dim; ++c)
      if (mask & (1u << c)) piv.push_back(c);
    std::vector<std::pair<int, int>> free;
    for (int r = 0; r < n; ++r)
      for (int c = piv[r] + 1; c < dim; ++c)
        if (!(mask & (1u << c))) free.emplace_back(r, c);
    const std::int64_t count = ipow(f.q(), static_cast<int>(free.size()));
    for (std::int64_t idx = 0; idx < count; ++idx) {
      Rows rows(n, std::vector<std::uint8_t>(dim, 0));
      for (int r = 0; r < n; ++r) rows[r][piv[r]] = 1;
      std::int64_t t = idx;
      for (auto [r, c] : free) {
        rows[r][c] = static_cast<std::uint8_t>(t % f.q());
        t /= f.q();
      }
      Matrix x = zero_matrix(dim);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < dim; ++i) x(i, j) = rows[j][i];
      int col = n;
      for (int c = 0; c < dim; ++c)
        if (!(mask & (1u << c))) x(c, col++) = 1;
      pd.subspace_index.emplace(subspace_key(f, rows), pd.coset_reps.size());
      pd.coset_reps.push_back(x);
    }
  }
  return pd;
}

bool is_upper_unitriangular(const Matrix& g) {
  for (int i = 0; i < g.n; ++i) {
    if (g(i, i) != 1) return false;
    for (int j = 0; j < i; ++j)
      if (g(i, j) != 0) return false;
  }
  return true;
}

std::vector<Matrix> unitriangular_transversal(const Fq& f, int m) {
  std::vector<int> w(m);
  std::iota(w.begin(), w.end(), 0);
  std::vector<Matrix> torus;
  const std::int64_t tcount = ipow(f.q() - 1, m);
  for (std::int64_t idx = 0; idx < tcount; ++idx) {
    Matrix t = zero_matrix(m);
    std::int64_t r = idx;
    for (int i = 0; i < m; ++i) {
      t(i, i) = f.exp(r % (f.q() - 1));
      r /= f.q() - 1;
    }
    torus.push_back(t);
  }
  std::vector<Matrix> out;
  do {
    std::vector<int> winv(m);
    Matrix wm = zero_matrix(m);
    for (int k = 0; k < m; ++k) {
      wm(w[k], k) = 1;
      winv[w[k]] = k;
    }
    std::vector<std::pair<int, int>> free;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (winv[i] > winv[j]) free.emplace_back(i, j);
    const std::int64_t count = ipow(f.q(), static_cast<int>(free.size()));
    for (std::int64_t idx = 0; idx < count; ++idx) {
      Matrix u = identity_matrix(m);
      std::int64_t r = idx;
      for (auto [i, j] : free) {
        u(i, j) = static_cast<std::uint8_t>(r % f.q());
        r /= f.q();
      }
      const Matrix uw = multiply(f, u, wm);
      for (const Matrix& t : torus) out.push_back(multiply(f, uw, t));
    }
  } while (std::next_permutation(w.begin(), w.end()));
  return out;
}

// ---------------------------------------------------------------------------
// Elliptic torus

Poly minimal_polynomial(const Tower& tower, FieldElem x) {
  const int lvl = x.level;
  std::vector<FieldElem> conj{x};
  while (true) {
    const FieldElem next = tower.pow(conj.back(), tower.base_order());
    if (next == conj.front()) break;
    conj.push_back(next);
  }
  std::vector<FieldElem> poly{tower.one(lvl)};
  for (const FieldElem& r : conj) {
    std::vector<FieldElem> next(poly.size() + 1, tower.zero(lvl));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] = tower.add(next[i + 1], poly[i]);
      next[i] = tower.sub(next[i], tower.mul(poly[i], r));
    }
    poly = std::move(next);
  }
  Poly out;
  for (const FieldElem& c : poly) out.push_back(static_cast<std::uint8_t>(tower.descend(c, 0).code));
  return out;
}

TorusEmbedding::TorusEmbedding(const Tower& tower, int level, const Fq& f) : level_(level) {
  n_ = tower.relative_degree(level);
  if (n_ > kMaxDim) throw std::invalid_argument("torus too large for matrix embedding");
  minpoly_ = minimal_polynomial(tower, tower.generator(level));
  if (poly_degree(minpoly_) != n_) throw std::logic_error("generator does not generate the level over F_q");
  const Matrix c = companion(f, minpoly_);
  const std::int64_t order = static_cast<std::int64_t>(tower.order(level)) - 1;
  Matrix cur = identity_matrix(n_);
  for (std::int64_t k = 0; k < order; ++k) {
    index_.emplace(encode(f, cur), k);
    powers_.push_back(cur);
    cur = multiply(f, cur, c);
  }
  if (!(cur == identity_matrix(n_))) throw std::logic_error("companion matrix has the wrong order");
}

Matrix TorusEmbedding::operator()(const Tower& tower, FieldElem x) const {
  if (x.level != level_) throw std::invalid_argument("element is not on the torus level");
  if (x.code == 0) return zero_matrix(n_);
  return powers_[tower.log(x)];
}

Matrix TorusEmbedding::at_log(std::int64_t k) const {
  const std::int64_t m = order();
  return powers_[((k % m) + m) % m];
}

std::optional<std::int64_t> TorusEmbedding::log_of(const Fq& f, const Matrix& g) const {
  auto it = index_.find(encode(f, g));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace gljac
