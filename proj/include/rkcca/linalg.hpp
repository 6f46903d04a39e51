#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace rkcca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Copies a span into an Eigen vector.
inline Vector to_vector(std::span<const double> values) {
  Vector v(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Index>(i)) = values[i];
  return v;
}

inline std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

/// Uniform simplex vector of length n.
inline Vector uniform_weights(Index n) {
  return Vector::Constant(n, 1.0 / static_cast<double>(n));
}

/// Lower median (ties broken towards the smaller middle element).
double lower_median(std::vector<double> values);

/// Median of an even/odd sample, averaging the two middle values when even.
double median(std::vector<double> values);

/// Median absolute deviation about the median (unscaled).
double mad(const std::vector<double>& values);

}  // namespace rkcca
