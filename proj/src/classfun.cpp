#include "gljac/classfun.hpp"

#include <cmath>
#include <mutex>
#include <sstream>
#include <tuple>

#include "gljac/parallel.hpp"

namespace gljac {

// ---------------------------------------------------------------------------
// GroupDescriptor

GroupDescriptor::Ptr GroupDescriptor::gl(std::shared_ptr<const Fq> field, int n) {
  using Key = std::tuple<int, std::vector<int>, int>;
  static std::mutex mutex;
  static std::map<Key, Ptr> cache;
  const Key key{field->q(), std::vector<int>(field->polynomial().begin(), field->polynomial().end()), n};
  std::lock_guard lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto g = std::make_shared<GroupDescriptor>();
  g->kind_ = GroupKind::GL;
  g->n_ = n;
  g->q_ = field->q();
  g->field_ = field;
  g->order_ = gl_order(n, field->q());
  g->classes_ = enumerate_classes(*field, n, LabelKind::GlClass);
  for (std::size_t i = 0; i < g->classes_.size(); ++i) {
    g->labels_.push_back(g->classes_[i].label.str());
    g->sizes_.push_back(g->classes_[i].size);
    g->index_.emplace(g->classes_[i].label, i);
  }
  g->identity_ = g->class_of(identity_matrix(n));
  cache.emplace(key, g);
  return g;
}

GroupDescriptor::Ptr GroupDescriptor::torus(std::shared_ptr<const Tower> tower, int level) {
  auto g = std::make_shared<GroupDescriptor>();
  g->kind_ = GroupKind::Torus;
  g->n_ = tower->relative_degree(level);
  g->q_ = static_cast<int>(tower->base_order());
  g->level_ = level;
  g->order_ = static_cast<std::int64_t>(tower->order(level)) - 1;
  for (std::int64_t k = 0; k < g->order_; ++k) {
    g->labels_.push_back("g^" + std::to_string(k));
    g->sizes_.push_back(1);
  }
  g->identity_ = 0;
  g->tower_ = std::move(tower);
  return g;
}

GroupDescriptor::Ptr GroupDescriptor::product(Ptr a, Ptr b) {
  auto g = std::make_shared<GroupDescriptor>();
  g->kind_ = GroupKind::Product;
  g->n_ = a->n() + b->n();
  g->q_ = a->q();
  g->order_ = a->order() * b->order();
  for (std::size_t i = 0; i < a->num_classes(); ++i)
    for (std::size_t j = 0; j < b->num_classes(); ++j) {
      g->labels_.push_back(a->label(i) + " | " + b->label(j));
      g->sizes_.push_back(a->class_size(i) * b->class_size(j));
    }
  g->identity_ = a->identity_index() * b->num_classes() + b->identity_index();
  g->factors_ = {std::move(a), std::move(b)};
  return g;
}

std::string GroupDescriptor::name() const {
  switch (kind_) {
    case GroupKind::GL:
      return "GL(" + std::to_string(n_) + "," + std::to_string(q_) + ")";
    case GroupKind::Torus:
      return "F_" + std::to_string(q_) + "^" + std::to_string(n_) + "^x";
    case GroupKind::Product:
      return factors_[0]->name() + " x " + factors_[1]->name();
  }
  return {};
}

std::optional<std::size_t> GroupDescriptor::find(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  return std::nullopt;
}

bool GroupDescriptor::same_as(const GroupDescriptor& other) const {
  if (this == &other) return true;
  if (kind_ != other.kind_ || n_ != other.n_ || q_ != other.q_) return false;
  switch (kind_) {
    case GroupKind::GL:
      return field_->same_field(*other.field_);
    case GroupKind::Torus:
      return tower_->to_json() == other.tower_->to_json() && level_ == other.level_;
    case GroupKind::Product:
      return factors_[0]->same_as(*other.factors_[0]) && factors_[1]->same_as(*other.factors_[1]);
  }
  return false;
}

std::size_t GroupDescriptor::class_of(const Matrix& g) const {
  if (kind_ != GroupKind::GL) throw std::logic_error("class_of needs a GL descriptor");
  if (g.n != n_) throw std::invalid_argument("matrix size does not match the group");
  auto it = index_.find(classify(*field_, g, LabelKind::GlClass));
  if (it == index_.end()) throw std::logic_error("class label missing from descriptor");
  return it->second;
}

nlohmann::json GroupDescriptor::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case GroupKind::GL:
      j["kind"] = "gl";
      j["n"] = n_;
      j["q"] = q_;
      j["p"] = field_->p();
      j["polynomial"] = std::vector<int>(field_->polynomial().begin(), field_->polynomial().end());
      break;
    case GroupKind::Torus:
      j["kind"] = "torus";
      j["m"] = n_;
      j["q"] = q_;
      j["level"] = level_;
      j["tower"] = tower_->to_json();
      break;
    case GroupKind::Product:
      j["kind"] = "product";
      j["factors"] = {factors_[0]->to_json(), factors_[1]->to_json()};
      break;
  }
  return j;
}

GroupDescriptor::Ptr GroupDescriptor::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gl") {
    const auto poly = j.at("polynomial").get<std::vector<int>>();
    nlohmann::json tj;
    tj["p"] = j.at("p");
    tj["degrees"] = {static_cast<int>(poly.size()) - 1};
    tj["polynomials"] = {poly};
    auto field = std::make_shared<const Fq>(Tower::from_json(tj));
    return gl(field, j.at("n").get<int>());
  }
  if (kind == "torus") {
    auto tower = std::make_shared<const Tower>(Tower::from_json(j.at("tower")));
    return torus(tower, j.at("level").get<int>());
  }
  if (kind == "product") {
    return product(from_json(j.at("factors").at(0)), from_json(j.at("factors").at(1)));
  }
  throw std::invalid_argument("unknown group kind: " + kind);
}

// ---------------------------------------------------------------------------
// ClassFunction

ClassFunction::ClassFunction(Group group, Eigen::VectorXcd values, bool character)
    : group_(std::move(group)), values_(std::move(values)), character_(character) {
  if (!group_) throw std::invalid_argument("class function without a group");
  if (static_cast<std::size_t>(values_.size()) != group_->num_classes())
    throw std::invalid_argument("class function must have one value per class");
}

ClassFunction ClassFunction::zero(Group group) {
  const auto r = static_cast<Eigen::Index>(group->num_classes());
  return ClassFunction(std::move(group), Eigen::VectorXcd::Zero(r));
}

ClassFunction ClassFunction::trivial(Group group) {
  const auto r = static_cast<Eigen::Index>(group->num_classes());
  return ClassFunction(std::move(group), Eigen::VectorXcd::Ones(r), true);
}

ClassFunction ClassFunction::regular(Group group) {
  ClassFunction f = zero(group);
  f.values_[static_cast<Eigen::Index>(group->identity_index())] = static_cast<double>(group->order());
  f.character_ = true;
  return f;
}

ClassFunction ClassFunction::conjugate() const {
  return ClassFunction(group_, values_.conjugate(), character_);
}

namespace {

void require_same_group(const ClassFunction& a, const ClassFunction& b) {
  if (!a.group().same_as(b.group())) throw std::invalid_argument("class functions live on different groups");
}

}  // namespace

ClassFunction operator+(const ClassFunction& a, const ClassFunction& b) {
  require_same_group(a, b);
  return ClassFunction(a.group_, a.values_ + b.values_, a.character_ && b.character_);
}

ClassFunction operator-(const ClassFunction& a, const ClassFunction& b) {
  require_same_group(a, b);
  return ClassFunction(a.group_, a.values_ - b.values_);
}

ClassFunction operator*(Complex s, const ClassFunction& a) { return ClassFunction(a.group_, s * a.values_); }

ClassFunction operator*(const ClassFunction& a, const ClassFunction& b) {
  require_same_group(a, b);
  return ClassFunction(a.group_, a.values_.cwiseProduct(b.values_), a.character_ && b.character_);
}

Complex inner_product(const ClassFunction& f, const ClassFunction& g) {
  require_same_group(f, g);
  const GroupDescriptor& G = f.group();
  Complex sum = 0.0;
  for (std::size_t i = 0; i < G.num_classes(); ++i)
    sum += static_cast<double>(G.class_size(i)) * f[i] * std::conj(g[i]);
  return sum / static_cast<double>(G.order());
}

double max_abs_deviation(const ClassFunction& f, const ClassFunction& g) {
  require_same_group(f, g);
  return (f.values() - g.values()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Induction, restriction, Jacquet operators

ClassFunction induce(const ClassFunction::Group& target, std::span<const Matrix> transversal,
                     std::int64_t subgroup_order, const SubgroupFunction& f) {
  if (target->kind() != GroupKind::GL) throw std::invalid_argument("induction target must be GL_n");
  if (static_cast<std::int64_t>(transversal.size()) * subgroup_order != target->order())
    throw std::invalid_argument("transversal incomplete: [G:H] * |H| != |G|");
  const Fq& field = target->field();
  std::vector<Matrix> inverses;
  inverses.reserve(transversal.size());
  for (const Matrix& x : transversal) inverses.push_back(*inverse(field, x));

  ClassFunction out = ClassFunction::zero(target);
  std::vector<Complex> values(target->num_classes());
  parallel_for(target->num_classes(), [&](std::size_t c) {
    const Matrix& g = target->classes()[c].representative;
    Complex sum = 0.0;
    for (std::size_t t = 0; t < transversal.size(); ++t) {
      const Matrix y = multiply(field, multiply(field, inverses[t], g), transversal[t]);
      if (auto v = f(y)) sum += *v;
    }
    values[c] = sum;
  });
  for (std::size_t c = 0; c < values.size(); ++c) out.values()[static_cast<Eigen::Index>(c)] = values[c];
  return out;
}

ClassFunction restrict_to_torus(const ClassFunction& chi, const TorusEmbedding& embedding,
                                const ClassFunction::Group& torus) {
  if (torus->kind() != GroupKind::Torus || torus->order() != embedding.order())
    throw std::invalid_argument("torus descriptor does not match the embedding");
  ClassFunction out = ClassFunction::zero(torus);
  for (std::int64_t k = 0; k < embedding.order(); ++k) out.values()[k] = chi.at(embedding.at_log(k));
  out.mark_character(chi.is_character());
  return out;
}

namespace {

void check_jacquet_input(const ClassFunction& chi, const ParabolicData& pd) {
  const GroupDescriptor& G = chi.group();
  if (G.kind() != GroupKind::GL || G.n() != 2 * pd.n)
    throw std::invalid_argument("Jacquet operator expects a class function on GL_2n");
}

Complex jacquet_sum(const ClassFunction& chi, const ParabolicData& pd, const Matrix& levi, bool twisted) {
  const Fq& f = chi.group().field();
  const int n = pd.n;
  const std::int64_t count = ipow(f.q(), n * n);
  Complex sum = 0.0;
  for (std::int64_t code = 0; code < count; ++code) {
    const Matrix x = decode(f, n, static_cast<std::uint64_t>(code));
    const Complex v = chi.at(multiply(f, levi, pd.unipotent(x)));
    sum += twisted ? std::conj(f.phi(trace(f, x))) * v : v;
  }
  return sum / static_cast<double>(count);
}

}  // namespace

Complex twisted_jacquet_at(const ClassFunction& chi, const ParabolicData& pd, const Matrix& g) {
  check_jacquet_input(chi, pd);
  return jacquet_sum(chi, pd, pd.levi_element(g, g), true);
}

ClassFunction twisted_jacquet(const ClassFunction& chi, const ParabolicData& pd,
                              const ClassFunction::Group& gl_n) {
  check_jacquet_input(chi, pd);
  if (gl_n->kind() != GroupKind::GL || gl_n->n() != pd.n || !gl_n->field().same_field(chi.group().field()))
    throw std::invalid_argument("twisted Jacquet target must be GL_n over the same field");
  std::vector<Complex> values(gl_n->num_classes());
  parallel_for(values.size(), [&](std::size_t c) {
    const Matrix& g = gl_n->classes()[c].representative;
    values[c] = jacquet_sum(chi, pd, pd.levi_element(g, g), true);
  });
  ClassFunction out = ClassFunction::zero(gl_n);
  for (std::size_t c = 0; c < values.size(); ++c) out.values()[static_cast<Eigen::Index>(c)] = values[c];
  out.mark_character(chi.is_character());
  return out;
}

ClassFunction untwisted_jacquet(const ClassFunction& chi, const ParabolicData& pd,
                                const ClassFunction::Group& levi) {
  check_jacquet_input(chi, pd);
  if (levi->kind() != GroupKind::Product || levi->factor(0).n() != pd.n || levi->factor(1).n() != pd.n)
    throw std::invalid_argument("untwisted Jacquet target must be GL_n x GL_n");
  const GroupDescriptor& a = levi->factor(0);
  const GroupDescriptor& b = levi->factor(1);
  std::vector<Complex> values(levi->num_classes());
  parallel_for(values.size(), [&](std::size_t idx) {
    const std::size_t i = idx / b.num_classes(), j = idx % b.num_classes();
    values[idx] = jacquet_sum(chi, pd, pd.levi_element(a.classes()[i].representative, b.classes()[j].representative), false);
  });
  ClassFunction out = ClassFunction::zero(levi);
  for (std::size_t c = 0; c < values.size(); ++c) out.values()[static_cast<Eigen::Index>(c)] = values[c];
  out.mark_character(chi.is_character());
  return out;
}

// ---------------------------------------------------------------------------
// Decomposition

double orthonormality_defect(std::span<const NamedCharacter> table) {
  double worst = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = 0; j < table.size(); ++j) {
      const Complex ip = inner_product(table[i].chi, table[j].chi);
      worst = std::max(worst, std::abs(ip - Complex(i == j ? 1.0 : 0.0, 0.0)));
    }
  return worst;
}

double column_orthogonality_defect(std::span<const NamedCharacter> table) {
  if (table.empty()) return 0.0;
  const GroupDescriptor& G = table.front().chi.group();
  double worst = 0.0;
  for (std::size_t c = 0; c < G.num_classes(); ++c)
    for (std::size_t d = 0; d < G.num_classes(); ++d) {
      Complex sum = 0.0;
      for (const auto& row : table) sum += row.chi[c] * std::conj(row.chi[d]);
      const double expected = c == d ? static_cast<double>(G.order()) / static_cast<double>(G.class_size(c)) : 0.0;
      worst = std::max(worst, std::abs(sum - expected) / std::max(1.0, expected));
    }
  return worst;
}

Decomposition decompose(const ClassFunction& f, std::span<const NamedCharacter> table) {
  if (const double defect = orthonormality_defect(table); defect > kTolerance)
    throw NumericalError("irreducible table is not orthonormal (defect " + std::to_string(defect) + ")");
  Decomposition d;
  Eigen::VectorXcd rebuilt = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(f.size()));
  for (const auto& row : table) {
    const Complex m = inner_product(f, row.chi);
    const double rounded = std::round(m.real());
    if (std::abs(m.imag()) > kIntegralityTolerance || std::abs(m.real() - rounded) > kIntegralityTolerance)
      throw NumericalError("non-integral multiplicity for " + row.name);
    if (f.is_character() && rounded < 0)
      throw NumericalError("negative multiplicity for " + row.name + " in a character");
    d.basis.push_back(row.name);
    d.multiplicities.push_back(static_cast<std::int64_t>(rounded));
    rebuilt += rounded * row.chi.values();
  }
  d.residual = f.size() == 0 ? 0.0 : (f.values() - rebuilt).cwiseAbs().maxCoeff();
  if (d.residual > kTolerance)
    throw NumericalError("decomposition residual " + std::to_string(d.residual) + " exceeds tolerance");
  return d;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json values_json(const Eigen::VectorXcd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v[i].real(), v[i].imag()});
  return arr;
}

Eigen::VectorXcd values_from_json(const nlohmann::json& arr, const GroupDescriptor& G,
                                  const std::vector<std::string>& labels) {
  if (labels.size() != G.num_classes() || arr.size() != labels.size())
    throw std::invalid_argument("class function JSON does not cover every class");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(G.num_classes()));
  std::vector<bool> seen(G.num_classes(), false);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto idx = G.find(labels[i]);
    if (!idx || seen[*idx]) throw std::invalid_argument("unknown or repeated class label: " + labels[i]);
    seen[*idx] = true;
    v[static_cast<Eigen::Index>(*idx)] = Complex(arr[i].at(0).get<double>(), arr[i].at(1).get<double>());
  }
  return v;
}

nlohmann::json labels_json(const GroupDescriptor& G) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < G.num_classes(); ++i) arr.push_back(G.label(i));
  return arr;
}

}  // namespace

nlohmann::json to_json(const ClassFunction& f) {
  nlohmann::json j;
  j["group"] = f.group().to_json();
  j["labels"] = labels_json(f.group());
  j["values"] = values_json(f.values());
  j["character"] = f.is_character();
  return j;
}

ClassFunction class_function_from_json(const nlohmann::json& j) {
  auto G = GroupDescriptor::from_json(j.at("group"));
  const auto labels = j.at("labels").get<std::vector<std::string>>();
  Eigen::VectorXcd v = values_from_json(j.at("values"), *G, labels);
  return ClassFunction(G, std::move(v), j.value("character", false));
}

nlohmann::json table_to_json(std::span<const NamedCharacter> table, const std::string& tag) {
  nlohmann::json j;
  j["tag"] = tag;
  if (table.empty()) return j;
  const GroupDescriptor& G = table.front().chi.group();
  j["group"] = G.to_json();
  j["labels"] = labels_json(G);
  j["class_sizes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < G.num_classes(); ++i) j["class_sizes"].push_back(G.class_size(i));
  j["rows"] = nlohmann::json::array();
  for (const auto& row : table)
    j["rows"].push_back({{"name", row.name}, {"family", row.family}, {"values", values_json(row.chi.values())}});
  return j;
}

std::vector<NamedCharacter> table_from_json(const nlohmann::json& j) {
  auto G = GroupDescriptor::from_json(j.at("group"));
  const auto labels = j.at("labels").get<std::vector<std::string>>();
  std::vector<NamedCharacter> out;
  for (const auto& row : j.at("rows")) {
    ClassFunction chi(G, values_from_json(row.at("values"), *G, labels), true);
    out.push_back({row.at("name").get<std::string>(), row.value("family", std::string{}), std::move(chi)});
  }
  return out;
}

std::string decomposition_to_csv(const Decomposition& d) {
  std::ostringstream out;
  out << "irreducible,multiplicity\n";
  for (std::size_t i = 0; i < d.basis.size(); ++i) out << d.basis[i] << "," << d.multiplicities[i] << "\n";
  return out.str();
}

}  // namespace gljac
