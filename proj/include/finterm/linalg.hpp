#pragma once

// Small exact linear algebra over an abstract coefficient field.

#include <cstddef>
#include <utility>
#include <vector>

// rational helpers must be visible at the template's definition context,
// since GMP types live outside this namespace and ADL cannot find them
#include "finterm/rational.hpp"

namespace finterm {

// Basis of the nullspace of an n_eq x n_var matrix over the field K.
template <class K>
std::vector<std::vector<K>> nullspace(std::vector<std::vector<K>> m, std::size_t nvar) {
  std::vector<int> pivot_of_col(nvar, -1);
  std::size_t rank = 0;
  for (std::size_t c = 0; c < nvar && rank < m.size(); ++c) {
    std::size_t p = rank;
    while (p < m.size() && is_zero(m[p][c])) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[rank]);
    K inv = one_like(m[rank][c]) / m[rank][c];
    for (std::size_t j = 0; j < nvar; ++j) m[rank][j] = m[rank][j] * inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == rank || is_zero(m[r][c])) continue;
      K f = m[r][c];
      for (std::size_t j = 0; j < nvar; ++j) m[r][j] = m[r][j] - f * m[rank][j];
    }
    pivot_of_col[c] = (int)rank;
    ++rank;
  }
  std::vector<std::vector<K>> basis;
  for (std::size_t c = 0; c < nvar; ++c) {
    if (pivot_of_col[c] >= 0) continue;
    std::vector<K> v(nvar);
    v[c] = one_like(K{});
    for (std::size_t cc = 0; cc < nvar; ++cc)
      if (pivot_of_col[cc] >= 0) v[cc] = -m[(std::size_t)pivot_of_col[cc]][c];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace finterm
