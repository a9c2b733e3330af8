#include <doctest.h>

#include <algorithm>

#include "gljac/glchar.hpp"
#include "gljac/oracle.hpp"

using namespace gljac;

namespace {

std::vector<long> degrees(const std::vector<NamedCharacter>& t) {
  std::vector<long> d;
  for (const auto& row : t) d.push_back(std::lround(row.chi.degree().real()));
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("enumeration of small groups") {
    const auto g = enumerate_group(standard_gl(2, 2));
    CHECK(g.elements.size() == 6);
    CHECK(g.classes.size() == 3);
    for (std::size_t a = 0; a < g.elements.size(); ++a) CHECK(g.product(a, g.inverse[a]) == g.find(identity_matrix(2)));
  }

  TEST_CASE("GL_4(F_2) classes are closed under conjugation") {
    const auto G = standard_gl(4, 2);
    const auto g = enumerate_group(G);
    CHECK(g.elements.size() == 20160);
    CHECK(g.classes.size() == 14);
    const Fq& f = G->field();
    for (std::size_t x = 0; x < g.elements.size(); x += 997)
      for (std::size_t y = 0; y < g.elements.size(); y += 1231) {
        const std::size_t c = g.find(conjugate(f, g.elements[y], g.elements[x]));
        CHECK(g.class_of[c] == g.class_of[x]);
      }
    // orbit search and label arithmetic agree on class sizes
    std::vector<std::int64_t> a, b;
    for (const auto& cls : g.classes) a.push_back(static_cast<std::int64_t>(cls.size()));
    for (std::size_t i = 0; i < G->num_classes(); ++i) b.push_back(G->class_size(i));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }

  TEST_CASE("GL_4(F_2) character table") {
    const auto G = standard_gl(4, 2);
    const auto t = character_table(enumerate_group(G));
    CHECK(degrees(t) == std::vector<long>{1, 7, 14, 20, 21, 21, 21, 28, 35, 45, 45, 56, 64, 70});
    std::int64_t sum = 0;
    for (long d : degrees(t)) {
      CHECK(G->order() % d == 0);
      sum += d * d;
    }
    CHECK(sum == G->order());
    CHECK(orthonormality_defect(t) < kTolerance);
    CHECK(column_orthogonality_defect(t) < kTolerance);
  }

  TEST_CASE("oracle tables agree with the GL_2 formulas") {
    for (int q : {2, 3, 4, 5}) {
      const auto a = gl2_table(q);
      const auto b = character_table(enumerate_group(a.front().chi.group_ptr()));
      CHECK_MESSAGE(table_match_deviation(a, b) < 1e-6, "q=" << q);
    }
  }

  TEST_CASE("GL_3(F_2) degrees") {
    const auto t = character_table(enumerate_group(standard_gl(3, 2)));
    CHECK(degrees(t) == std::vector<long>{1, 3, 3, 6, 7, 8});
  }

  TEST_CASE("DL character of GL_4(F_2) is an oracle row") {
    const auto G = standard_gl(4, 2);
    const auto t = character_table(enumerate_group(G));
    const auto R = dl_character(4, 2, 1);
    REQUIRE(R.group().same_as(*G));
    double best = 1e9;
    for (const auto& row : t) best = std::min(best, max_abs_deviation(row.chi, R));
    CHECK(best < 1e-6);
  }

  TEST_CASE("table matching rejects mismatches") {
    const auto a = gl2_table(3);
    auto b = a;
    b.pop_back();
    CHECK(std::isinf(table_match_deviation(a, b)));
    b = a;
    b[0].chi = 2.0 * b[0].chi;
    CHECK(std::isinf(table_match_deviation(a, b)));
    CHECK(std::isinf(table_match_deviation(a, gl2_table(2))));
  }

  TEST_CASE("budgets") {
    CHECK_THROWS_AS(enumerate_group(standard_gl(4, 3), 100000), BudgetExceeded);
    CHECK_THROWS_AS(character_table(enumerate_group(standard_gl(4, 2)), 10), BudgetExceeded);
  }
}
