#pragma once

// Independent reference computations for the unit tests. Nothing in here
// calls the library routine it is used to check.

#include <algorithm>
#include <cmath>
#include <vector>

#include "qmi/qmi.hpp"

namespace qmi::testing {

inline Matrix random_hermitian(Index d, Engine& rng) {
  const Matrix g = ginibre(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

inline std::vector<Index> digits_of(Index index, const Dims& dims) {
  std::vector<Index> digits(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    digits[k] = index % dims[k];
    index /= dims[k];
  }
  return digits;
}

inline Index index_of(const std::vector<Index>& digits, const Dims& dims) {
  Index idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + digits[k];
  return idx;
}

/// a acting on the factors listed in `on` (sorted), identity elsewhere.
/// Built entrywise from the digit expansion of the composite basis.
inline Matrix embed(const Matrix& a, const Dims& dims, const std::vector<Index>& on) {
  const Index n = dims_product(dims);
  Dims sub;
  for (Index k : on) sub.push_back(dims[static_cast<std::size_t>(k)]);
  Matrix out = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const auto di = digits_of(i, dims);
      const auto dj = digits_of(j, dims);
      bool identity_part = true;
      std::vector<Index> si, sj;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        const bool kept = std::find(on.begin(), on.end(), static_cast<Index>(k)) != on.end();
        if (kept) {
          si.push_back(di[k]);
          sj.push_back(dj[k]);
        } else if (di[k] != dj[k]) {
          identity_part = false;
        }
      }
      if (identity_part) out(i, j) = a(index_of(si, sub), index_of(sj, sub));
    }
  }
  return out;
}

inline double shannon(const std::vector<double>& p, LogBase base = LogBase::bits) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * (base == LogBase::bits ? std::log2(x) : std::log(x));
  }
  return h;
}

inline double binary_entropy(double t) { return shannon({t, 1.0 - t}); }

inline DensityMatrix diag_state(std::vector<double> p, Dims dims) {
  RealVector v = Eigen::Map<RealVector>(p.data(), static_cast<Index>(p.size()));
  return diagonal_state(v, std::move(dims));
}

}  // namespace qmi::testing
