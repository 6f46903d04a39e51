#pragma once

#include "rkcca/kernel.hpp"
#include "rkcca/linalg.hpp"
#include "rkcca/rng.hpp"

#include <cstdint>

namespace rkcca::testing {

/// n x d matrix of standard normals from a counter stream.
inline Matrix normals(Index n, Index d, std::uint64_t seed) {
  const CounterRng rng(seed, 0x7e57);
  Matrix M(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) M(i, j) = rng.normal(static_cast<std::uint64_t>(i), 1, static_cast<std::uint64_t>(j));
  }
  return M;
}

/// Random simplex vector with strictly positive entries.
inline Vector simplex(Index n, std::uint64_t seed) {
  const CounterRng rng(seed, 0x5e7);
  Vector w(n);
  for (Index i = 0; i < n; ++i) w(i) = 0.1 + rng.uniform(static_cast<std::uint64_t>(i), 2);
  return w / w.sum();
}

/// Explicit centering (I - 1 w^T) K (I - 1 w^T)^T.
inline Matrix center_explicit(const Matrix& K, const Vector& w) {
  const Index n = K.rows();
  const Matrix C = Matrix::Identity(n, n) - Vector::Ones(n) * w.transpose();
  return C * K * C.transpose();
}

/// Explicit feature map of a Gram matrix: rows are coordinates (K = F F^T).
inline Matrix features(const Matrix& K) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(K);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace rkcca::testing
