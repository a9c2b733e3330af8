#include <doctest.h>

#include <numeric>
#include <set>

#include "gljac/matgrp.hpp"

using namespace gljac;

namespace {

Fq field(int p, int e = 1) { return Fq(Tower::build(p, e, {1})); }

Matrix mat(int n, std::initializer_list<int> entries) {
  Matrix m = zero_matrix(n);
  int k = 0;
  for (int v : entries) {
    m(k / n, k % n) = static_cast<std::uint8_t>(v);
    ++k;
  }
  return m;
}

std::int64_t total_size(const std::vector<ClassRecord>& cs) {
  std::int64_t s = 0;
  for (const auto& c : cs) s += c.size;
  return s;
}

}  // namespace

TEST_SUITE("matgrp") {
  TEST_CASE("field tables") {
    const Fq f = field(3);
    CHECK(f.q() == 3);
    CHECK(f.add(2, 2) == 1);
    CHECK(f.mul(2, 2) == 1);
    CHECK(f.inv(2) == 2);
    const Fq g = field(2, 2);
    for (int a = 1; a < 4; ++a) CHECK(g.mul(static_cast<std::uint8_t>(a), g.inv(static_cast<std::uint8_t>(a))) == 1);
    // irreducibles of degree 1 and 2 over F_2: x, x+1, x^2+x+1
    const Fq f2 = field(2);
    int deg2 = 0;
    for (const Poly& p : f2.irreducibles()) deg2 += poly_degree(p) == 2;
    CHECK(deg2 == 1);
  }

  TEST_CASE("classify examples") {
    const Fq f = field(3);
    CHECK(classify(f, identity_matrix(2)).str() == classify(f, identity_matrix(2), LabelKind::GlClass).str());
    const ClassLabel id = classify(f, identity_matrix(2));
    REQUIRE(id.blocks.size() == 1);
    CHECK(id.blocks[0].partition == std::vector<int>{1, 1});
    CHECK(id.is_semisimple());

    const ClassLabel jordan = classify(f, mat(2, {1, 1, 0, 1}));
    REQUIRE(jordan.blocks.size() == 1);
    CHECK(jordan.blocks[0].partition == std::vector<int>{2});
    CHECK(!jordan.is_semisimple());

    const ClassLabel nil = classify(f, mat(2, {0, 1, 0, 0}));
    CHECK(nil.is_nilpotent());
    CHECK(classify(f, zero_matrix(2)).is_nilpotent());

    // x^2+1 is irreducible over F_3
    const ClassLabel ell = classify(f, mat(2, {0, 2, 1, 0}));
    REQUIRE(ell.blocks.size() == 1);
    CHECK(poly_degree(ell.blocks[0].poly) == 2);
  }

  TEST_CASE("classify is conjugation invariant") {
    const Fq f = field(3);
    const auto gl = enumerate_gl(f, 2);
    for (std::uint64_t code = 0; code < 81; code += 7) {
      const Matrix a = decode(f, 2, code);
      const ClassLabel l = classify(f, a);
      for (std::size_t i = 0; i < gl.size(); i += 5) CHECK(classify(f, conjugate(f, gl[i], a)) == l);
    }
  }

  TEST_CASE("class counts and sizes") {
    const std::vector<std::pair<int, std::vector<std::size_t>>> expected = {{2, {1, 3, 6, 14}}, {3, {2, 8, 24, 78}}};
    for (const auto& [p, counts] : expected) {
      const Fq f = field(p);
      for (int n = 1; n <= 4; ++n) {
        const auto cs = enumerate_classes(f, n, LabelKind::GlClass);
        CHECK(cs.size() == counts[n - 1]);
        CHECK(total_size(cs) == gl_order(n, p));
        for (const auto& c : cs) {
          CHECK(c.size * c.centralizer == gl_order(n, p));
          CHECK(classify(f, c.representative, LabelKind::GlClass) == c.label);
        }
      }
    }
  }

  TEST_CASE("label enumeration agrees with exhaustive enumeration") {
    for (auto [p, e, n, kind] : std::vector<std::tuple<int, int, int, LabelKind>>{
             {2, 1, 3, LabelKind::GlClass}, {3, 1, 2, LabelKind::GlClass}, {2, 2, 2, LabelKind::GlClass},
             {2, 1, 3, LabelKind::MsdOrbit}, {3, 1, 2, LabelKind::MsdOrbit}, {5, 1, 2, LabelKind::MsdOrbit},
             {2, 1, 4, LabelKind::GlClass}}) {
      const Fq f = field(p, e);
      const auto a = enumerate_classes(f, n, kind);
      const auto b = enumerate_classes_exhaustive(f, n, kind);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].label == b[i].label);
        CHECK(a[i].size == b[i].size);
      }
    }
  }

  TEST_CASE("orbits of M_n") {
    const Fq f3 = field(3);
    CHECK(enumerate_classes(f3, 1, LabelKind::MsdOrbit).size() == 3);
    const auto m2 = enumerate_classes(f3, 2, LabelKind::MsdOrbit);
    CHECK(m2.size() == 12);
    CHECK(total_size(m2) == 81);
    std::multiset<std::int64_t> nilpotent;
    for (const auto& c : m2)
      if (c.label.is_nilpotent()) nilpotent.insert(c.size);
    CHECK(nilpotent == std::multiset<std::int64_t>{1, 8});
    // nilpotent count q^{n^2-n}
    const Fq f2 = field(2);
    std::int64_t nil3 = 0;
    for (const auto& c : enumerate_classes(f2, 3, LabelKind::MsdOrbit))
      if (c.label.is_nilpotent()) nil3 += c.size;
    CHECK(nil3 == 64);
  }

  TEST_CASE("label strings round trip") {
    const Fq f = field(3);
    for (const auto& c : enumerate_classes(f, 3, LabelKind::MsdOrbit))
      CHECK(ClassLabel::parse(c.label.str(), LabelKind::MsdOrbit, 3) == c.label);
  }

  TEST_CASE("gaussian binomials and parabolic") {
    CHECK(gaussian_binomial(4, 2, 2) == 35);
    CHECK(gaussian_binomial(4, 2, 3) == 130);
    CHECK(gaussian_binomial(2, 1, 3) == 4);
    CHECK(gaussian_binomial(4, 2, 4) == 357);
    for (auto [p, n, idx] : std::vector<std::array<int, 3>>{{3, 1, 4}, {2, 2, 35}, {3, 2, 130}}) {
      const Fq f = field(p);
      const ParabolicData pd = parabolic_data(f, n);
      CHECK(static_cast<int>(pd.coset_reps.size()) == idx);
      for (const Matrix& r : pd.coset_reps) {
        CHECK(inverse(f, r).has_value());
        CHECK(pd.coset_index(f, r) == static_cast<std::size_t>(&r - pd.coset_reps.data()));
      }
    }
  }

  TEST_CASE("parabolic membership and Levi decomposition") {
    const Fq f = field(3);
    const ParabolicData pd = parabolic_data(f, 2);
    const Matrix a = mat(2, {1, 2, 0, 1});
    const Matrix d = mat(2, {0, 1, 1, 0});
    const Matrix x = mat(2, {1, 0, 2, 1});
    const Matrix g = multiply(f, pd.levi_element(a, d), pd.unipotent(x));
    CHECK(pd.contains(g));
    CHECK(pd.levi(g) == std::make_pair(a, d));
    Matrix h = identity_matrix(4);
    h(2, 0) = 1;
    CHECK(!pd.contains(h));
  }

  TEST_CASE("psi is stabilized by the diagonal GL_n") {
    // tr(g X g^-1) = tr X, so the diagonal copy fixes psi(u(X)) = phi(tr X)
    const Fq f = field(3);
    const ParabolicData pd = parabolic_data(f, 2);
    const auto gl = enumerate_gl(f, 2);
    for (std::size_t i = 0; i < gl.size(); i += 3)
      for (std::uint64_t c = 0; c < 81; c += 5) {
        const Matrix x = decode(f, 2, c);
        const Matrix g = pd.levi_element(gl[i], gl[i]);
        const Matrix y = conjugate(f, g, pd.unipotent(x));
        REQUIRE(pd.contains(y));
        Matrix block = zero_matrix(2);
        for (int r = 0; r < 2; ++r)
          for (int s = 0; s < 2; ++s) block(r, s) = y(r, s + 2);
        CHECK(trace(f, block) == trace(f, x));
      }
  }

  TEST_CASE("unitriangular transversal") {
    const Fq f = field(2);
    const auto t = unitriangular_transversal(f, 3);
    CHECK(static_cast<std::int64_t>(t.size()) * 8 == gl_order(3, 2));
    // distinct cosets: r_i^{-1} r_j is never unitriangular for i != j
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = i + 1; j < t.size(); ++j)
        CHECK(!is_upper_unitriangular(multiply(f, *inverse(f, t[i]), t[j])));
  }

  TEST_CASE("torus embedding") {
    const Tower tower = Tower::build(3, 1, {2});
    const Fq f(tower);
    const TorusEmbedding emb(tower, 1, f);
    CHECK(emb.order() == 8);
    CHECK(emb.n() == 2);
    for (const FieldElem x : tower.elements(1)) {
      if (x.code == 0) continue;
      for (const FieldElem y : tower.elements(1)) {
        if (y.code == 0) continue;
        CHECK(emb(tower, tower.mul(x, y)) == multiply(f, emb(tower, x), emb(tower, y)));
      }
      const auto k = emb.log_of(f, emb(tower, x));
      REQUIRE(k.has_value());
      CHECK(*k == tower.log(x));
      CHECK(characteristic_polynomial(f, emb(tower, x)) == poly_pow(f, minimal_polynomial(tower, x), 2 / poly_degree(minimal_polynomial(tower, x))));
    }
    CHECK(!emb.log_of(f, mat(2, {1, 1, 0, 1})).has_value());
  }

  TEST_CASE("matrix codec") {
    const Fq f = field(5);
    for (std::uint64_t c = 0; c < 625; c += 13) CHECK(encode(f, decode(f, 2, c)) == c);
  }

  TEST_CASE("unipotent centralizers") {
    // GL_2(F_q): Jordan block [2] has centralizer q(q-1)
    CHECK(unipotent_centralizer_order({2}, 3) == 6);
    CHECK(unipotent_centralizer_order({1, 1}, 3) == gl_order(2, 3));
    std::int64_t sum = 0;
    for (const auto& l : partitions(4)) sum += gl_order(4, 2) / unipotent_centralizer_order(l, 2);
    CHECK(sum == ipow(2, 12));  // Steinberg: q^{n(n-1)} unipotents
  }
}
