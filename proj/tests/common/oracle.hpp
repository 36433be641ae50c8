// Small independent reference implementations used by the unit tests.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using Matrix = std::vector<std::vector<C>>;

// Dense 2^n x 2^n unitary of a gate, built column by column from a basis map.
inline Matrix permutation_gate(int n, const std::function<std::size_t(std::size_t)> &image) {
  const std::size_t dim = std::size_t{1} << n;
  Matrix m(dim, std::vector<C>(dim, 0.0));
  for (std::size_t col = 0; col < dim; ++col) m[image(col)][col] = 1.0;
  return m;
}

inline Matrix single_qubit(int n, int q, C u00, C u01, C u10, C u11) {
  const std::size_t dim = std::size_t{1} << n;
  Matrix m(dim, std::vector<C>(dim, 0.0));
  for (std::size_t col = 0; col < dim; ++col) {
    const std::size_t bit = (col >> q) & 1u;
    const std::size_t base = col & ~(std::size_t{1} << q);
    m[base][col] += bit ? u01 : u00;
    m[base | (std::size_t{1} << q)][col] += bit ? u11 : u10;
  }
  return m;
}

inline std::vector<C> apply(const Matrix &m, const std::vector<C> &v) {
  std::vector<C> out(v.size(), 0.0);
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) out[r] += m[r][c] * v[c];
  return out;
}

inline bool bit(std::size_t i, int q) { return (i >> q) & 1u; }

}  // namespace oracle
