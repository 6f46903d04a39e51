#pragma once

#include "rkcca/kernel.hpp"
#include "rkcca/kirwls.hpp"
#include "rkcca/linalg.hpp"
#include "rkcca/loss.hpp"

#include <vector>

namespace rkcca {

enum class OperatorKind { CO, CCO };

/// Weighted (cross-)covariance operator
///   Sigma = sum_i w_i Phi~(X_i) (x) Phi~(Y_i)
/// in sample-dual form. Every quantity reduces to n x n Hadamard algebra on
/// the centered Gram matrices; the n^2 x n tensor matrix is never formed.
struct CovOperatorFit {
  Vector weights;
  Vector residuals;
  std::vector<double> objective_trace;
  std::vector<double> weight_changes;
  int iterations = 0;
  bool converged = false;
  OperatorKind kind = OperatorKind::CCO;
  /// Simplex weights used to center each block; empty when the caller
  /// passed pre-centered matrices without that information.
  Vector centering_weights_x;
  Vector centering_weights_y;
  RobustLoss loss = RobustLoss::quadratic();
};

/// Uniform 1/n weights: the empirical kernel CCO.
Vector standard_cco_weights(Index n);

/// e_i = ||Phi~(X_i) (x) Phi~(Y_i) - Sigma_w||_HS with M = K~_X o K~_Y:
/// e_i^2 = M_ii - 2 (M w)_i + w^T M w.
Vector residual_vector(const Matrix& Kx_centered, const Matrix& Ky_centered, const Vector& w);

/// KIRWLS estimate of the robust kernel CCO (CO when both blocks are equal).
CovOperatorFit fit_robust_cov(const Matrix& Kx_centered, const Matrix& Ky_centered,
                              const LossConfig& loss, const KirwlsOptions& options = {});
CovOperatorFit fit_robust_cov(const WeightedCenteredGram& x, const WeightedCenteredGram& y,
                              const LossConfig& loss, const KirwlsOptions& options = {});
/// Robust kernel CO of a single view.
CovOperatorFit fit_robust_co(const WeightedCenteredGram& x, const LossConfig& loss,
                             const KirwlsOptions& options = {});

/// ||Sigma_w||_HS^2 = w^T (K~_X o K~_Y) w.
double hs_norm_sq(const Matrix& Kx, const Matrix& Ky, const Vector& w);

/// Kernel blocks between a sample a and a sample b for one view.
struct CrossGramBlocks {
  Matrix aa;  ///< n_a x n_a
  Matrix ab;  ///< n_a x n_b
  Matrix bb;  ///< n_b x n_b
};

/// ||Sigma_a - Sigma_b||_HS^2 for Sigma_s = sum_i w_s,i k_X(., X_i) (x) k_Y(., Y_i):
///   w_a^T (X_aa o Y_aa) w_a - 2 w_a^T (X_ab o Y_ab) w_b + w_b^T (X_bb o Y_bb) w_b,
/// clamped at zero against round-off.
double hs_distance_sq(const Vector& w_a, const CrossGramBlocks& x, const CrossGramBlocks& y,
                      const Vector& w_b);

/// n x n realisation V = K~_X diag(w) K~_Y^T of the operator.
Matrix operator_matrix(const Matrix& Kx_centered, const Matrix& Ky_centered, const Vector& w);

}  // namespace rkcca
