// Brute-force ground truth: full enumeration of small GL_n(F_q) and its
// character table by the Dixon-Schneider eigenvector method over C.
#pragma once

#include <unordered_map>
#include <vector>

#include "gljac/classfun.hpp"

namespace gljac {

struct SmallGroup {
  ClassFunction::Group descriptor;
  std::vector<Matrix> elements;
  std::unordered_map<std::uint64_t, std::size_t> index;
  std::vector<std::size_t> inverse;
  /// Conjugacy class of each element, numbered in order of first appearance.
  std::vector<std::size_t> class_of;
  std::vector<std::vector<std::size_t>> classes;

  std::size_t find(const Matrix& g) const;
  std::size_t product(std::size_t a, std::size_t b) const;
};

/// Every element of GL_n(F_q), with conjugacy classes found by orbit search
/// (independent of the label arithmetic in matgrp).
SmallGroup enumerate_group(const ClassFunction::Group& gl, std::int64_t budget = 1'000'000);

/// Irreducible characters as class functions on the group's descriptor,
/// in canonical order (degree, then rounded values).
std::vector<NamedCharacter> character_table(const SmallGroup& g, std::size_t max_classes = 64);

/// Rows sorted by (degree, rounded value vector).
void canonical_sort(std::vector<NamedCharacter>& table);

/// Largest entrywise deviation between two tables after matching rows one to
/// one, or +inf when the row counts or groups differ or a row has no partner
/// within tol.
double table_match_deviation(std::span<const NamedCharacter> a, std::span<const NamedCharacter> b,
                             double tol = kIntegralityTolerance);

}  // namespace gljac
