#pragma once

#include "rkcca/linalg.hpp"
#include "rkcca/loss.hpp"

#include <vector>

namespace rkcca {

/// Stopping rule shared by every KIRWLS fit.
struct KirwlsOptions {
  /// Relative objective change |J(h+1) - J(h)| / J(h) below which the loop stops.
  double tol = 1e-8;
  /// Additionally required sup-norm change of successive weight vectors.
  double weight_tol = 1e-6;
  int max_iter = 200;
  /// Optional base measure pi on the sample (simplex). Empty means the
  /// empirical distribution; otherwise the fit minimises sum_i pi_i zeta(e_i)
  /// and starts from w = pi. Used for contamination-path refits.
  Vector base;
};

/// Outcome of kernelized iteratively re-weighted least squares over a set of
/// feature vectors whose inner products are given by a PSD matrix M.
struct KirwlsResult {
  Vector weights;
  Vector residuals;
  std::vector<double> objective_trace;
  /// ||w(h) - w(h-1)||_inf after each update.
  std::vector<double> weight_changes;
  int iterations = 0;
  bool converged = false;
  RobustLoss loss = RobustLoss::quadratic();
};

/// Distances e_i = ||u_i - sum_j w_j u_j|| computed from M_ij = <u_i, u_j>:
/// e_i^2 = M_ii - 2 (M w)_i + w^T M w. Round-off negatives above
/// -1e-8 * max|M_ii| are clamped to 0; larger negatives throw NumericError.
Vector weighted_residuals(const Matrix& M, const Vector& w);

/// Minimises sum_i zeta(||u_i - f||) over f in the span of the u_i.
/// Starts from uniform weights; the loss configuration is calibrated once on
/// the uniform-weight residuals and frozen.
KirwlsResult kirwls(const Matrix& M, const LossConfig& loss, const KirwlsOptions& options);

}  // namespace rkcca
