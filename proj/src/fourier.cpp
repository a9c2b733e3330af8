#include "gljac/fourier.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gljac/glchar.hpp"
#include "gljac/parallel.hpp"

namespace gljac {

namespace {

constexpr char kKernelMagic[8] = {'G', 'L', 'J', 'K', 'R', 'N', '0', '1'};

std::int64_t space_size(int q, int n) {
  const double s = std::pow(static_cast<double>(q), n * n);
  if (s > static_cast<double>(OrbitSpace::kMaxDense)) throw BudgetExceeded("q^(n^2) exceeds the dense budget");
  return ipow(q, n * n);
}

}  // namespace

std::shared_ptr<const OrbitSpace> OrbitSpace::make(std::shared_ptr<const Fq> field, int n) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("matrix size out of range");
  auto s = std::make_shared<OrbitSpace>();
  s->size_ = space_size(field->q(), n);
  s->n_ = n;
  s->orbits_ = enumerate_classes(*field, n, LabelKind::MsdOrbit);
  s->field_ = std::move(field);
  return s;
}

std::shared_ptr<const OrbitSpace> OrbitSpace::make(int n, int q) {
  auto pe = prime_power(q);
  if (!pe) throw std::invalid_argument("q = " + std::to_string(q) + " is not a prime power");
  return make(std::make_shared<const Fq>(Tower::build(pe->first, pe->second, {1})), n);
}

std::optional<std::size_t> OrbitSpace::find(const ClassLabel& label) const {
  for (std::size_t i = 0; i < orbits_.size(); ++i)
    if (orbits_[i].label == label) return i;
  return std::nullopt;
}

std::size_t OrbitSpace::parse(const std::string& text) const {
  ClassLabel label;
  label.kind = LabelKind::MsdOrbit;
  if (text == "zero") {
    label.blocks.push_back({Poly{0, 1}, std::vector<int>(n_, 1)});
  } else if (text.rfind("nilpotent:", 0) == 0) {
    std::string part = text.substr(10);
    if (part.size() < 2 || part.front() != '[' || part.back() != ']') throw std::invalid_argument("bad partition: " + part);
    std::vector<int> lambda;
    std::stringstream in(part.substr(1, part.size() - 2));
    for (std::string tok; std::getline(in, tok, ',');) lambda.push_back(std::stoi(tok));
    std::sort(lambda.rbegin(), lambda.rend());
    label.blocks.push_back({Poly{0, 1}, lambda});
  } else {
    label = ClassLabel::parse(text, LabelKind::MsdOrbit, q());
  }
  if (auto i = find(label)) return *i;
  throw std::invalid_argument("no such orbit in M_" + std::to_string(n_) + ": " + text);
}

const std::vector<std::uint32_t>& OrbitSpace::orbit_map(std::int64_t budget) const {
  if (size_ > budget) throw BudgetExceeded("orbit map over budget");
  std::call_once(map_once_, [&] {
    std::map<ClassLabel, std::uint32_t> index;
    for (std::size_t i = 0; i < orbits_.size(); ++i) index.emplace(orbits_[i].label, static_cast<std::uint32_t>(i));
    std::vector<std::uint32_t> out(static_cast<std::size_t>(size_));
    parallel_for(out.size(), [&](std::size_t code) {
      out[code] = index.at(classify(*field_, decode(*field_, n_, code), LabelKind::MsdOrbit));
    });
    map_ = std::move(out);
  });
  return map_;
}

// ---------------------------------------------------------------------------
// MatFunction

MatFunction MatFunction::dense(std::shared_ptr<const OrbitSpace> space, Eigen::VectorXcd values) {
  if (values.size() != space->size()) throw std::invalid_argument("dense function needs q^(n^2) values");
  return {std::move(space), Form::Dense, std::move(values), {}};
}

MatFunction MatFunction::sparse(std::shared_ptr<const OrbitSpace> space,
                                std::vector<std::pair<std::uint64_t, Complex>> support) {
  std::sort(support.begin(), support.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i].first >= static_cast<std::uint64_t>(space->size())) throw std::invalid_argument("code out of range");
    if (i > 0 && support[i].first == support[i - 1].first) throw std::invalid_argument("repeated code in sparse function");
  }
  return {std::move(space), Form::Sparse, {}, std::move(support)};
}

MatFunction MatFunction::invariant(std::shared_ptr<const OrbitSpace> space, Eigen::VectorXcd orbit_values) {
  if (static_cast<std::size_t>(orbit_values.size()) != space->num_orbits())
    throw std::invalid_argument("invariant function needs one value per orbit");
  return {std::move(space), Form::Invariant, std::move(orbit_values), {}};
}

MatFunction MatFunction::to_dense() const {
  switch (form) {
    case Form::Dense:
      return *this;
    case Form::Sparse: {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(space->size());
      for (const auto& [code, value] : support) v[static_cast<Eigen::Index>(code)] = value;
      return dense(space, std::move(v));
    }
    case Form::Invariant: {
      const auto& map = space->orbit_map();
      Eigen::VectorXcd v(space->size());
      for (std::int64_t code = 0; code < space->size(); ++code) v[code] = values[map[static_cast<std::size_t>(code)]];
      return dense(space, std::move(v));
    }
  }
  return *this;
}

MatFunction MatFunction::to_sparse() const {
  if (form == Form::Sparse) return *this;
  const MatFunction d = to_dense();
  std::vector<std::pair<std::uint64_t, Complex>> s;
  for (Eigen::Index code = 0; code < d.values.size(); ++code)
    if (d.values[code] != Complex(0.0, 0.0)) s.emplace_back(static_cast<std::uint64_t>(code), d.values[code]);
  return sparse(space, std::move(s));
}

MatFunction MatFunction::to_invariant() const {
  if (form == Form::Invariant) return *this;
  const MatFunction d = to_dense();
  const auto& map = space->orbit_map();
  Eigen::VectorXcd v(static_cast<Eigen::Index>(space->num_orbits()));
  std::vector<bool> seen(space->num_orbits(), false);
  for (std::int64_t code = 0; code < space->size(); ++code) {
    const std::uint32_t o = map[static_cast<std::size_t>(code)];
    if (!seen[o]) {
      v[o] = d.values[code];
      seen[o] = true;
    } else if (std::abs(v[o] - d.values[code]) > kTolerance) {
      throw std::invalid_argument("function is not conjugation invariant (orbit " + space->orbits()[o].label.str() + ")");
    }
  }
  return invariant(space, std::move(v));
}

Complex MatFunction::at(std::uint64_t code) const {
  switch (form) {
    case Form::Dense:
      return values[static_cast<Eigen::Index>(code)];
    case Form::Sparse: {
      auto it = std::lower_bound(support.begin(), support.end(), code,
                                 [](const auto& e, std::uint64_t c) { return e.first < c; });
      return it != support.end() && it->first == code ? it->second : Complex(0.0, 0.0);
    }
    case Form::Invariant:
      return values[space->orbit_map()[code]];
  }
  return 0.0;
}

Complex MatFunction::mass() const {
  Complex s = 0.0;
  switch (form) {
    case Form::Dense:
      for (Eigen::Index i = 0; i < values.size(); ++i) s += values[i];
      break;
    case Form::Sparse:
      for (const auto& e : support) s += e.second;
      break;
    case Form::Invariant:
      for (std::size_t o = 0; o < space->num_orbits(); ++o)
        s += static_cast<double>(space->orbits()[o].size) * values[static_cast<Eigen::Index>(o)];
      break;
  }
  return s;
}

double MatFunction::norm_squared() const {
  double s = 0.0;
  switch (form) {
    case Form::Dense:
      for (Eigen::Index i = 0; i < values.size(); ++i) s += std::norm(values[i]);
      break;
    case Form::Sparse:
      for (const auto& e : support) s += std::norm(e.second);
      break;
    case Form::Invariant:
      for (std::size_t o = 0; o < space->num_orbits(); ++o)
        s += static_cast<double>(space->orbits()[o].size) * std::norm(values[static_cast<Eigen::Index>(o)]);
      break;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Transforms

namespace {

/// Code of the transpose of the matrix with the given row-major base-q code.
std::uint64_t transpose_code(std::uint64_t code, int n, int q) {
  std::uint64_t out = 0;
  std::vector<int> digits(static_cast<std::size_t>(n * n));
  for (int i = n * n - 1; i >= 0; --i) {
    digits[static_cast<std::size_t>(i)] = static_cast<int>(code % static_cast<std::uint64_t>(q));
    code /= static_cast<std::uint64_t>(q);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out = out * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(digits[static_cast<std::size_t>(j * n + i)]);
  return out;
}

}  // namespace

MatFunction fourier_dense(const MatFunction& f) {
  const MatFunction d = f.to_dense();
  const OrbitSpace& s = *f.space;
  const Fq& field = s.field();
  const int q = s.q(), n = s.n();
  const std::size_t size = static_cast<std::size_t>(s.size());

  std::vector<Complex> table(static_cast<std::size_t>(q * q));
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      table[static_cast<std::size_t>(a * q + b)] = field.phi(field.mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)));

  std::vector<Complex> cur(d.values.data(), d.values.data() + d.values.size());
  std::vector<Complex> next(size);
  // F(Z) = sum_X f(X) phi(sum_ij X_ij Z_ij), one coordinate at a time
  std::size_t stride = 1;
  for (int axis = 0; axis < n * n; ++axis) {
    const std::size_t block = stride * static_cast<std::size_t>(q);
    const std::size_t slices = size / static_cast<std::size_t>(q);
    parallel_for(slices, [&](std::size_t slice) {
      const std::size_t lo = slice % stride, hi = slice / stride;
      const std::size_t base = hi * block + lo;
      for (int z = 0; z < q; ++z) {
        Complex acc = 0.0;
        for (int x = 0; x < q; ++x) acc += cur[base + static_cast<std::size_t>(x) * stride] * table[static_cast<std::size_t>(x * q + z)];
        next[base + static_cast<std::size_t>(z) * stride] = acc;
      }
    });
    std::swap(cur, next);
    stride = block;
  }
  // tr(XY) pairs X with Y^T
  Eigen::VectorXcd out(static_cast<Eigen::Index>(size));
  for (std::size_t code = 0; code < size; ++code) out[static_cast<Eigen::Index>(code)] = cur[transpose_code(code, n, q)];
  return MatFunction::dense(f.space, std::move(out));
}

MatFunction fourier_naive(const MatFunction& f) {
  const OrbitSpace& s = *f.space;
  if (s.size() > 6561) throw BudgetExceeded("naive transform limited to q^(n^2) <= 6561");
  const MatFunction d = f.to_dense();
  const Fq& field = s.field();
  std::vector<Matrix> mats;
  for (std::int64_t code = 0; code < s.size(); ++code) mats.push_back(decode(field, s.n(), static_cast<std::uint64_t>(code)));
  Eigen::VectorXcd out(s.size());
  std::vector<Complex> values(static_cast<std::size_t>(s.size()));
  parallel_for(values.size(), [&](std::size_t y) {
    Complex acc = 0.0;
    for (std::size_t x = 0; x < mats.size(); ++x)
      acc += d.values[static_cast<Eigen::Index>(x)] * field.phi(trace(field, multiply(field, mats[x], mats[y])));
    values[y] = acc;
  });
  for (std::size_t y = 0; y < values.size(); ++y) out[static_cast<Eigen::Index>(y)] = values[y];
  return MatFunction::dense(f.space, std::move(out));
}

Eigen::MatrixXcd compute_orbit_kernel(const OrbitSpace& space) {
  const auto& map = space.orbit_map();
  const Fq& field = space.field();
  const std::size_t r = space.num_orbits();
  std::vector<Matrix> mats;
  mats.reserve(static_cast<std::size_t>(space.size()));
  for (std::int64_t code = 0; code < space.size(); ++code) mats.push_back(decode(field, space.n(), static_cast<std::uint64_t>(code)));
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
  std::vector<std::vector<Complex>> columns(r);
  parallel_for(r, [&](std::size_t col) {
    std::vector<Complex> acc(r, 0.0);
    const Matrix& y = space.orbits()[col].representative;
    for (std::size_t x = 0; x < mats.size(); ++x) acc[map[x]] += field.phi(trace(field, multiply(field, mats[x], y)));
    columns[col] = std::move(acc);
  });
  for (std::size_t c = 0; c < r; ++c)
    for (std::size_t o = 0; o < r; ++o) k(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(c)) = columns[c][o];
  return k;
}

std::string kernel_cache_name(const OrbitSpace& space) {
  std::string name = "kernel_n" + std::to_string(space.n()) + "_q" + std::to_string(space.q()) + "_f";
  for (int c : space.field().polynomial()) name += std::to_string(c) + ".";
  name.back() = '_';
  return name + "v1.bin";
}

namespace {

std::vector<std::int32_t> kernel_header(const OrbitSpace& space) {
  std::vector<std::int32_t> h{space.n(), space.q(), space.field().p(), static_cast<std::int32_t>(space.field().polynomial().size())};
  for (int c : space.field().polynomial()) h.push_back(c);
  h.push_back(static_cast<std::int32_t>(space.num_orbits()));
  return h;
}

}  // namespace

void write_kernel(const std::string& path, const OrbitSpace& space, const Eigen::MatrixXcd& k) {
  const std::string tmp = path + ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write kernel cache " + tmp);
    out.write(kKernelMagic, sizeof kKernelMagic);
    const auto header = kernel_header(space);
    out.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size() * sizeof(std::int32_t)));
    for (Eigen::Index i = 0; i < k.rows(); ++i)
      for (Eigen::Index j = 0; j < k.cols(); ++j) {
        const double pair[2] = {k(i, j).real(), k(i, j).imag()};
        out.write(reinterpret_cast<const char*>(pair), sizeof pair);
      }
    if (!out) throw std::runtime_error("short write on kernel cache " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<Eigen::MatrixXcd> read_kernel(const std::string& path, const OrbitSpace& space) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[sizeof kKernelMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kKernelMagic, sizeof magic) != 0) return std::nullopt;
  const auto expected = kernel_header(space);
  std::vector<std::int32_t> header(expected.size());
  if (!in.read(reinterpret_cast<char*>(header.data()), static_cast<std::streamsize>(header.size() * sizeof(std::int32_t))) ||
      header != expected)
    return std::nullopt;
  const auto r = static_cast<Eigen::Index>(space.num_orbits());
  Eigen::MatrixXcd k(r, r);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j) {
      double pair[2];
      if (!in.read(reinterpret_cast<char*>(pair), sizeof pair)) return std::nullopt;
      k(i, j) = Complex(pair[0], pair[1]);
    }
  if (in.peek() != std::char_traits<char>::eof()) return std::nullopt;
  return k;
}

namespace {

Eigen::MatrixXcd load_or_compute_kernel(const OrbitSpace& space) {
  const char* dir = std::getenv("GLJAC_KERNEL_CACHE");
  if (dir == nullptr || *dir == '\0') return compute_orbit_kernel(space);
  const std::string path = (std::filesystem::path(dir) / kernel_cache_name(space)).string();
  if (auto cached = read_kernel(path, space)) return *cached;
  Eigen::MatrixXcd k = compute_orbit_kernel(space);
  std::filesystem::create_directories(dir);
  write_kernel(path, space, k);
  return k;
}

}  // namespace

Eigen::MatrixXcd orbit_kernel(const OrbitSpace& space) {
  std::call_once(space.kernel_once_, [&] { space.kernel_ = load_or_compute_kernel(space); });
  return space.kernel_;
}

MatFunction fourier_invariant(const MatFunction& f) {
  const MatFunction inv = f.to_invariant();
  const Eigen::MatrixXcd k = orbit_kernel(*f.space);
  Eigen::VectorXcd out(k.cols());
  for (Eigen::Index c = 0; c < k.cols(); ++c) {
    Complex acc = 0.0;
    for (Eigen::Index o = 0; o < k.rows(); ++o) acc += inv.values[o] * k(o, c);
    out[c] = acc;
  }
  return MatFunction::invariant(f.space, std::move(out));
}

MatFunction fourier(const MatFunction& f) {
  return f.form == Form::Invariant ? fourier_invariant(f) : fourier_dense(f);
}

MatFunction orbit_indicator(std::shared_ptr<const OrbitSpace> space, std::size_t orbit) {
  if (orbit >= space->num_orbits()) throw std::invalid_argument("orbit index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space->num_orbits()));
  v[static_cast<Eigen::Index>(orbit)] = 1.0;
  return MatFunction::invariant(std::move(space), std::move(v));
}

MatFunction cone_indicator(std::shared_ptr<const OrbitSpace> space) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space->num_orbits()));
  for (std::size_t o = 0; o < space->num_orbits(); ++o)
    if (space->orbits()[o].label.is_nilpotent()) v[static_cast<Eigen::Index>(o)] = 1.0;
  return MatFunction::invariant(std::move(space), std::move(v));
}

std::int64_t count_nilpotent(const OrbitSpace& space) {
  const Fq& f = space.field();
  std::int64_t count = 0;
  for (std::int64_t code = 0; code < space.size(); ++code) {
    const Matrix x = decode(f, space.n(), static_cast<std::uint64_t>(code));
    if (power(f, x, space.n()) == zero_matrix(space.n())) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Spectra

Spectrum invariant_spectrum(const MatFunction& f, const std::string& name) {
  const MatFunction inv = f.to_invariant();
  const MatFunction hat = fourier_invariant(inv);
  const OrbitSpace& s = *f.space;
  Spectrum out;
  out.name = name;
  for (std::size_t o = 0; o < s.num_orbits(); ++o) {
    out.labels.push_back(s.orbits()[o].label.str());
    out.sizes.push_back(s.orbits()[o].size);
    out.coefficients.push_back(hat.values[static_cast<Eigen::Index>(o)]);
  }
  out.parseval_lhs = hat.norm_squared();
  out.parseval_rhs = static_cast<double>(s.size()) * inv.norm_squared();
  out.parseval_pass = std::abs(out.parseval_lhs - out.parseval_rhs) <= kTolerance * std::max(1.0, out.parseval_rhs);
  return out;
}

namespace {

std::string fmt(double x) {
  if (std::abs(x) < 5e-13) x = 0.0;  // keep -0 and rounding dust out of the files
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::string spectrum_to_csv(const Spectrum& s) {
  std::ostringstream out;
  out << "orbit,re,im,size\n";
  for (std::size_t i = 0; i < s.labels.size(); ++i)
    out << '"' << s.labels[i] << "\"," << fmt(s.coefficients[i].real()) << ',' << fmt(s.coefficients[i].imag()) << ','
        << s.sizes[i] << '\n';
  return out.str();
}

nlohmann::json spectrum_to_json(const Spectrum& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["rows"] = nlohmann::json::array();
  for (std::size_t i = 0; i < s.labels.size(); ++i)
    j["rows"].push_back({{"orbit", s.labels[i]},
                         {"re", std::stod(fmt(s.coefficients[i].real()))},
                         {"im", std::stod(fmt(s.coefficients[i].imag()))},
                         {"size", s.sizes[i]}});
  j["parseval"] = {{"lhs", s.parseval_lhs}, {"rhs", s.parseval_rhs}, {"pass", s.parseval_pass}};
  return j;
}

}  // namespace gljac
