#pragma once

#include "rkcca/linalg.hpp"

#include <string>

namespace rkcca {

enum class KernelFamily { Linear, Polynomial, Gaussian, Laplacian };
enum class Metric { L1, L2 };

/// Kernel family plus hyperparameters.
///
/// Gaussian: exp(-|x - x'|^2 / (2 sigma^2)); Laplacian: exp(-d(x, x') / sigma)
/// with d the L1 distance unless `metric` is L2; Polynomial:
/// (<x, x'> + offset)^degree.
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  int degree = 1;
  double bandwidth = 1.0;
  double offset = 1.0;
  Metric metric = Metric::L1;
  /// Gaussian only: replace `bandwidth` by the median pairwise distance of
  /// the training inputs when the kernel is resolved.
  bool median_bandwidth = false;

  static KernelSpec linear();
  static KernelSpec polynomial(int degree, double offset = 1.0);
  static KernelSpec gaussian(double bandwidth);
  static KernelSpec gaussian_median();
  static KernelSpec laplacian(double bandwidth = 1.0, Metric metric = Metric::L1);

  /// Throws InputError when the hyperparameters are invalid.
  void validate() const;
  /// Bounded kernels: Gaussian and Laplacian.
  bool bounded() const noexcept;
  /// Round-trippable textual form, e.g. "gaussian:0.5", "poly:3", "laplacian:1:l2".
  std::string to_string() const;
  static KernelSpec parse(const std::string& text);
};

/// Fixes data-dependent hyperparameters (median bandwidth) from X.
KernelSpec resolve(const KernelSpec& spec, const Matrix& X);

double kernel_value(const KernelSpec& spec, const Eigen::Ref<const Vector>& a,
                    const Eigen::Ref<const Vector>& b);

/// n x n Gram matrix of the rows of X. Exactly symmetric.
Matrix gram(const KernelSpec& spec, const Matrix& X);

/// rows(A) x rows(B) matrix of k(a_i, b_j).
Matrix cross_gram(const KernelSpec& spec, const Matrix& A, const Matrix& B);

/// Median of the pairwise Euclidean distances among rows of X, excluding
/// zero distances produced by exact duplicates (lower median on ties).
double median_bandwidth(const Matrix& X);

/// Gram matrix together with the simplex weights that define its centering.
struct WeightedCenteredGram {
  Matrix raw;
  Vector weights;
  /// (I - 1 w^T) K (I - 1 w^T)^T
  Matrix centered;
};

/// Throws ContractError unless w is a simplex vector (tolerance 1e-9).
void check_simplex(const Vector& w, double tol = 1e-9);

WeightedCenteredGram center(const Matrix& K, const Vector& w);

/// Centered Gram rows for T test points:
/// K_test - 1 w^T K - K_test w 1^T + (w^T K w) 1 1^T.
Matrix center_test(const Matrix& K_test, const Matrix& K, const Vector& w);

/// Centered self-similarities k~(x, x) of test points, given their raw
/// self values, raw test rows and training Gram.
Vector center_test_diagonal(const Vector& self, const Matrix& K_test, const Matrix& K,
                            const Vector& w);

}  // namespace rkcca
