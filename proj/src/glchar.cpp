#include "gljac/glchar.hpp"

#include <chrono>
#include <cmath>
#include <map>

#include "gljac/parallel.hpp"

namespace gljac {

std::optional<std::pair<int, int>> prime_power(int q) {
  if (q < 2) return std::nullopt;
  for (int p = 2; p <= q; ++p) {
    if (q % p != 0) continue;
    int e = 0, r = q;
    while (r % p == 0) {
      r /= p;
      ++e;
    }
    if (r != 1) return std::nullopt;
    return std::pair{p, e};
  }
  return std::nullopt;
}

namespace {

std::shared_ptr<const Tower> make_tower(int q, std::initializer_list<int> multipliers) {
  auto pe = prime_power(q);
  if (!pe) throw std::invalid_argument("q = " + std::to_string(q) + " is not a prime power");
  return std::make_shared<const Tower>(Tower::build(pe->first, pe->second, multipliers));
}

}  // namespace

ClassFunction::Group standard_gl(int n, int q) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("matrix size out of range");
  return GroupDescriptor::gl(std::make_shared<const Fq>(*make_tower(q, {1})), n);
}

std::shared_ptr<const Lab> Lab::make(int n, int q) {
  if (n != 1 && n != 2) throw std::invalid_argument("n must be 1 or 2");
  auto lab = std::make_shared<Lab>();
  lab->n = n;
  lab->q = q;
  lab->tower = make_tower(q, {n, 2});
  lab->field = std::make_shared<const Fq>(*lab->tower);
  lab->gl_n = GroupDescriptor::gl(lab->field, n);
  lab->gl_2n = GroupDescriptor::gl(lab->field, 2 * n);
  lab->torus_n = GroupDescriptor::torus(lab->tower, kSmall);
  lab->parabolic = parabolic_data(*lab->field, n);
  lab->embedding = std::make_shared<const TorusEmbedding>(*lab->tower, kSmall, *lab->field);
  return lab;
}

// ---------------------------------------------------------------------------
// Tables

namespace {

std::uint8_t root_of_linear(const Fq& f, const Poly& p) { return f.neg(p[0]); }

void require_field(const GroupDescriptor& g, const Tower& tower) {
  const auto poly = tower.polynomial(0);
  if (g.q() != static_cast<int>(tower.base_order()) ||
      !std::equal(poly.begin(), poly.end(), g.field().polynomial().begin(), g.field().polynomial().end()))
    throw std::invalid_argument("group and tower have different base fields");
}

/// For every element of a level: minimal polynomial over F_q -> logs of its roots.
std::map<Poly, std::vector<std::int64_t>> roots_by_minpoly(const Tower& tower, int level) {
  std::map<Poly, std::vector<std::int64_t>> out;
  const std::int64_t m = static_cast<std::int64_t>(tower.order(level)) - 1;
  for (std::int64_t k = 0; k < m; ++k) out[minimal_polynomial(tower, tower.power_of_generator(level, k))].push_back(k);
  return out;
}

}  // namespace

std::vector<NamedCharacter> gl2_table(std::shared_ptr<const Tower> tower) {
  const int level = tower->level_of_relative_degree(2);
  if (level < 0) throw std::invalid_argument("tower has no quadratic level");
  auto G = GroupDescriptor::gl(std::make_shared<const Fq>(*tower), 2);
  require_field(*G, *tower);
  const Fq& f = G->field();
  const std::int64_t q = f.q();
  const std::int64_t m1 = q - 1, m2 = q * q - 1;
  const auto roots = roots_by_minpoly(*tower, level);

  enum class Type { Central, Nonsemisimple, Split, Elliptic };
  struct Info {
    Type type;
    std::int64_t a = 0, b = 0;  // logs in F_q^x, or a = log of z in F_{q^2}^x
  };
  std::vector<Info> info;
  for (const auto& c : G->classes()) {
    const auto& blocks = c.label.blocks;
    if (blocks.size() == 2) {
      info.push_back({Type::Split, f.log(root_of_linear(f, blocks[0].poly)), f.log(root_of_linear(f, blocks[1].poly))});
    } else if (poly_degree(blocks[0].poly) == 2) {
      info.push_back({Type::Elliptic, roots.at(blocks[0].poly).front(), 0});
    } else {
      const std::int64_t a = f.log(root_of_linear(f, blocks[0].poly));
      info.push_back({blocks[0].partition.size() == 2 ? Type::Central : Type::Nonsemisimple, a, a});
    }
  }

  auto alpha = [&](std::int64_t i, std::int64_t k) { return root_of_unity(i * k, m1); };
  auto nu = [&](std::int64_t j, std::int64_t k) { return root_of_unity(j * k, m2); };
  const double qd = static_cast<double>(q);

  std::vector<NamedCharacter> rows;
  auto add_row = [&](std::string name, std::string family, auto&& value) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(info.size()));
    for (std::size_t c = 0; c < info.size(); ++c) v[static_cast<Eigen::Index>(c)] = value(info[c]);
    rows.push_back({std::move(name), std::move(family), ClassFunction(G, std::move(v), true)});
  };

  for (std::int64_t i = 0; i < m1; ++i)
    add_row("U[" + std::to_string(i) + "]", "one-dimensional", [&](const Info& c) -> Complex {
      if (c.type == Type::Elliptic) return alpha(i, c.a);
      return alpha(i, c.a + c.b);
    });
  for (std::int64_t i = 0; i < m1; ++i)
    add_row("V[" + std::to_string(i) + "]", "steinberg", [&](const Info& c) -> Complex {
      switch (c.type) {
        case Type::Central: return qd * alpha(i, 2 * c.a);
        case Type::Nonsemisimple: return 0.0;
        case Type::Split: return alpha(i, c.a + c.b);
        case Type::Elliptic: return -alpha(i, c.a);
      }
      return 0.0;
    });
  for (std::int64_t i = 0; i < m1; ++i)
    for (std::int64_t j = i + 1; j < m1; ++j)
      add_row("W[" + std::to_string(i) + "," + std::to_string(j) + "]", "principal", [&](const Info& c) -> Complex {
        switch (c.type) {
          case Type::Central: return (qd + 1) * alpha(i + j, c.a);
          case Type::Nonsemisimple: return alpha(i + j, c.a);
          case Type::Split: return alpha(i, c.a) * alpha(j, c.b) + alpha(i, c.b) * alpha(j, c.a);
          case Type::Elliptic: return 0.0;
        }
        return 0.0;
      });
  for (std::int64_t j : regular_exponents(*tower, level))
    add_row("X[" + std::to_string(j) + "]", "cuspidal", [&](const Info& c) -> Complex {
      switch (c.type) {
        case Type::Central: return (qd - 1) * nu(j, (q + 1) * c.a);
        case Type::Nonsemisimple: return -nu(j, (q + 1) * c.a);
        case Type::Split: return 0.0;
        case Type::Elliptic: return -(nu(j, c.a) + nu(j, q * c.a));
      }
      return 0.0;
    });
  return rows;
}

std::vector<NamedCharacter> gl2_table(int q) { return gl2_table(make_tower(q, {2})); }

std::vector<NamedCharacter> gl1_table(const ClassFunction::Group& gl1) {
  if (gl1->kind() != GroupKind::GL || gl1->n() != 1) throw std::invalid_argument("expected GL_1");
  const Fq& f = gl1->field();
  std::vector<NamedCharacter> rows;
  for (int i = 0; i < f.q() - 1; ++i) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(gl1->num_classes()));
    for (std::size_t c = 0; c < gl1->num_classes(); ++c)
      v[static_cast<Eigen::Index>(c)] =
          root_of_unity(i * f.log(root_of_linear(f, gl1->classes()[c].label.blocks[0].poly)), f.q() - 1);
    rows.push_back({"U[" + std::to_string(i) + "]", "one-dimensional", ClassFunction(gl1, std::move(v), true)});
  }
  return rows;
}

std::vector<NamedCharacter> irreducible_table(const Lab& lab) {
  if (lab.n == 1) return gl1_table(lab.gl_n);
  return gl2_table(lab.tower);
}

// ---------------------------------------------------------------------------
// Deligne-Lusztig characters

ClassFunction dl_character(const Tower& tower, const ClassFunction::Group& gl_m, const TorusCharacter& theta) {
  const int m = tower.relative_degree(theta.level);
  if (gl_m->kind() != GroupKind::GL || gl_m->n() != m)
    throw std::invalid_argument("R(T,theta) needs GL_m with m the degree of the torus");
  if (m < 1 || m > kMaxDim) throw std::invalid_argument("unsupported m for R(T,theta)");
  require_field(*gl_m, tower);
  const auto roots = roots_by_minpoly(tower, theta.level);
  const double sign = (m % 2 == 1) ? 1.0 : -1.0;
  const std::int64_t q = tower.base_order();

  ClassFunction out = ClassFunction::zero(gl_m);
  for (std::size_t c = 0; c < gl_m->num_classes(); ++c) {
    const auto& blocks = gl_m->classes()[c].label.blocks;
    if (blocks.size() != 1) continue;
    const auto it = roots.find(blocks[0].poly);
    if (it == roots.end()) continue;
    Complex sum = 0.0;
    for (std::int64_t k : it->second) sum += theta.at_log(k);
    // Green function of the Coxeter torus of GL_k(F_Q) at a unipotent of type mu
    const std::int64_t Q = ipow(q, poly_degree(blocks[0].poly));
    double green = 1.0;
    for (std::size_t i = 1; i < blocks[0].partition.size(); ++i) green *= 1.0 - static_cast<double>(ipow(Q, static_cast<int>(i)));
    out.values()[static_cast<Eigen::Index>(c)] = sign * green * sum;
  }
  return out;
}

ClassFunction dl_character(int m, int q, std::int64_t exponent) {
  if (m < 1 || m > kMaxDim) throw std::invalid_argument("unsupported m for R(T,theta)");
  auto tower = make_tower(q, {m});
  auto G = GroupDescriptor::gl(std::make_shared<const Fq>(*tower), m);
  return dl_character(*tower, G, TorusCharacter::make(*tower, 1, exponent));
}

// ---------------------------------------------------------------------------
// Pipeline

TorusCharacter theta0_character(const Lab& lab, std::int64_t theta0) {
  return TorusCharacter::make(*lab.tower, Lab::kSmall, theta0);
}

TorusCharacter theta_character(const Lab& lab, std::int64_t theta0) {
  return theta0_character(lab, theta0).compose_norm(*lab.tower, Lab::kLarge);
}

bool is_admissible(const Lab& lab, std::int64_t theta0) {
  const auto t = theta0_character(lab, theta0);
  return t.is_regular(*lab.tower) && !t.is_trivial();
}

std::vector<std::int64_t> admissible_exponents(const Lab& lab) {
  std::vector<std::int64_t> out;
  const std::int64_t m = static_cast<std::int64_t>(lab.tower->order(Lab::kSmall)) - 1;
  for (std::int64_t j = 0; j < m; ++j)
    if (is_admissible(lab, j)) out.push_back(j);
  return out;
}

namespace {

void require_admissible(const Lab& lab, std::int64_t theta0) {
  if (admissible_exponents(lab).empty()) throw std::invalid_argument("no admissible theta0");
  if (!is_admissible(lab, theta0))
    throw std::invalid_argument("theta0 = " + std::to_string(theta0) + " is not a regular non-trivial character");
}

ClassFunction halve(const ClassFunction& a, const ClassFunction& b, double sign) {
  return 0.5 * (sign > 0 ? a + b : a - b);
}

}  // namespace

ClassFunction cuspidal(const Lab& lab, std::int64_t theta0) {
  if (!theta0_character(lab, theta0).is_regular(*lab.tower))
    throw std::invalid_argument("theta0 is not regular; pi would not be cuspidal");
  return dl_character(*lab.tower, lab.gl_n, theta0_character(lab, theta0)).mark_character();
}

ClassFunction principal_series_pi_pi(const Lab& lab, std::int64_t theta0) {
  const ClassFunction pi = cuspidal(lab, theta0);
  const ParabolicData& pd = lab.parabolic;
  const std::int64_t order_p = lab.gl_n->order() * lab.gl_n->order() * ipow(lab.q, lab.n * lab.n);
  auto inducing = [&](const Matrix& y) -> std::optional<Complex> {
    if (!pd.contains(y)) return std::nullopt;
    const auto [a, d] = pd.levi(y);
    return pi.at(a) * pi.at(d);
  };
  return induce(lab.gl_2n, pd.coset_reps, order_p, inducing).mark_character();
}

namespace {

St2Sp2 st2_sp2_unchecked(const Lab& lab, std::int64_t theta0) {
  const ClassFunction pp = principal_series_pi_pi(lab, theta0);
  const ClassFunction r = dl_character(*lab.tower, lab.gl_2n, theta_character(lab, theta0));
  return {halve(pp, r, 1), halve(pp, r, -1)};
}

}  // namespace

St2Sp2 st2_sp2(const Lab& lab, std::int64_t theta0) {
  require_admissible(lab, theta0);
  St2Sp2 out = st2_sp2_unchecked(lab, theta0);
  auto check = [](const ClassFunction& f, const char* name) {
    const Complex norm = inner_product(f, f);
    const Complex deg = f.degree();
    if (std::abs(norm - 1.0) > kIntegralityTolerance || deg.real() < 0.5 ||
        std::abs(deg - std::round(deg.real())) > kIntegralityTolerance)
      throw NumericalError(std::string(name) + " is not an irreducible character");
  };
  check(out.st2, "St_2");
  check(out.sp2, "Sp_2");
  if (std::abs(inner_product(out.st2, out.sp2)) > kIntegralityTolerance)
    throw NumericalError("St_2 and Sp_2 are not orthogonal");
  out.st2.mark_character();
  out.sp2.mark_character();
  return out;
}

ClassFunction induce_from_torus(const Lab& lab, const ClassFunction& f) {
  if (!f.group().same_as(*lab.torus_n)) throw std::invalid_argument("function does not live on F_{q^n}^x");
  const TorusEmbedding& emb = *lab.embedding;
  std::vector<Complex> acc(lab.gl_n->num_classes(), 0.0);
  for (std::int64_t k = 0; k < emb.order(); ++k) acc[lab.gl_n->class_of(emb.at_log(k))] += f[static_cast<std::size_t>(k)];
  ClassFunction out = ClassFunction::zero(lab.gl_n);
  for (std::size_t c = 0; c < acc.size(); ++c)
    out.values()[static_cast<Eigen::Index>(c)] =
        acc[c] * static_cast<double>(lab.gl_n->classes()[c].centralizer) / static_cast<double>(emb.order());
  return out.mark_character(f.is_character());
}

ClassFunction induce_from_torus(const Lab& lab, const TorusCharacter& chi) {
  if (chi.level != Lab::kSmall) throw std::invalid_argument("character is not on F_{q^n}^x");
  ClassFunction f = ClassFunction::zero(lab.torus_n);
  for (std::int64_t k = 0; k < chi.modulus; ++k) f.values()[k] = chi.at_log(k);
  return induce_from_torus(lab, f.mark_character());
}

ClassFunction sp2_jacquet_formula(const Lab& lab, std::int64_t theta0) {
  require_admissible(lab, theta0);
  const ClassFunction jpp = twisted_jacquet(principal_series_pi_pi(lab, theta0), lab.parabolic, lab.gl_n);
  const ClassFunction ind = induce_from_torus(lab, theta0_character(lab, theta0).power(2));
  ClassFunction out = halve(jpp, ind, -1).mark_character();
  const auto table = irreducible_table(lab);
  decompose(out, table);  // throws when not a genuine character
  return out;
}

ClassFunction gelfand_graev(const ClassFunction::Group& gl_m) {
  if (gl_m->kind() != GroupKind::GL) throw std::invalid_argument("expected GL_m");
  const Fq& f = gl_m->field();
  const int m = gl_m->n();
  const auto transversal = unitriangular_transversal(f, m);
  auto psi = [&](const Matrix& y) -> std::optional<Complex> {
    if (!is_upper_unitriangular(y)) return std::nullopt;
    std::uint8_t s = 0;
    for (int i = 0; i + 1 < m; ++i) s = f.add(s, y(i, i + 1));
    return f.phi(s);
  };
  return induce(gl_m, transversal, ipow(f.q(), m * (m - 1) / 2), psi).mark_character();
}

GenericSplit split_by_genericity(const ClassFunction& pi_pi, std::span<const NamedCharacter> table,
                                 const ClassFunction& gamma) {
  const Decomposition d = decompose(pi_pi, table);
  std::vector<std::size_t> parts;
  for (std::size_t i = 0; i < d.multiplicities.size(); ++i) {
    if (d.multiplicities[i] > 1) throw NumericalError("pi x pi is not multiplicity free");
    if (d.multiplicities[i] == 1) parts.push_back(i);
  }
  if (parts.size() != 2) throw NumericalError("pi x pi does not have exactly two constituents");
  auto generic = [&](std::size_t i) { return std::lround(inner_product(gamma, table[i].chi).real()); };
  const long g0 = generic(parts[0]), g1 = generic(parts[1]);
  if (g0 + g1 != 1 || std::min(g0, g1) != 0) throw NumericalError("genericity does not single out one constituent");
  const std::size_t st = g0 == 1 ? parts[0] : parts[1];
  const std::size_t sp = g0 == 1 ? parts[1] : parts[0];
  return {table[st].name, table[sp].name, table[st].chi, table[sp].chi};
}

bool VerifyReport::all_pass() const {
  return std::all_of(identities.begin(), identities.end(), [](const IdentityCheck& c) { return c.pass; });
}

VerifyReport verify_identities(const Lab& lab, std::int64_t theta0) {
  require_admissible(lab, theta0);
  VerifyReport report;
  report.n = lab.n;
  report.q = lab.q;
  report.theta0 = theta0;
  report.theta_regular = regular_exponents(*lab.tower, Lab::kLarge).front();

  using Clock = std::chrono::steady_clock;
  auto run = [&](const std::string& name, auto&& body) {
    const auto start = Clock::now();
    const double dev = body();
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    report.identities.push_back({name, dev <= kTolerance, dev, ms});
  };

  std::optional<ClassFunction> jst, jsp;
  St2Sp2 halves;
  run("sum", [&] {
    const ClassFunction pp = principal_series_pi_pi(lab, theta0);
    const ClassFunction r = dl_character(*lab.tower, lab.gl_2n, theta_character(lab, theta0));
    halves = {halve(pp, r, 1), halve(pp, r, -1)};
    jst = twisted_jacquet(halves.st2, lab.parabolic, lab.gl_n);
    jsp = twisted_jacquet(halves.sp2, lab.parabolic, lab.gl_n);
    return max_abs_deviation(twisted_jacquet(pp, lab.parabolic, lab.gl_n), *jst + *jsp);
  });
  run("difference", [&] {
    const ClassFunction ind = induce_from_torus(lab, theta0_character(lab, theta0).power(2));
    return max_abs_deviation(ind, *jst - *jsp);
  });
  run("dimension", [&] {
    const Complex st = halves.st2.degree(), sp = halves.sp2.degree();
    const double integral = std::max(std::abs(st - std::round(st.real())), std::abs(sp - std::round(sp.real())));
    const double dev = std::abs(st - static_cast<double>(ipow(lab.q, lab.n)) * sp);
    return integral > kIntegralityTolerance || sp.real() < 0.5 ? std::max(1.0, dev) : dev;
  });
  run("cuspidal_jacquet", [&] {
    const TorusCharacter reg = TorusCharacter::make(*lab.tower, Lab::kLarge, report.theta_regular);
    const ClassFunction r = dl_character(*lab.tower, lab.gl_2n, reg);
    const ClassFunction lhs = twisted_jacquet(r, lab.parabolic, lab.gl_n);
    const ClassFunction rhs = induce_from_torus(lab, reg.restrict_to(*lab.tower, Lab::kSmall));
    return max_abs_deviation(lhs, rhs);
  });
  return report;
}

}  // namespace gljac
