#pragma once

#include "rkcca/kirwls.hpp"
#include "rkcca/linalg.hpp"
#include "rkcca/loss.hpp"

#include <vector>

namespace rkcca {

/// Robust kernel mean element  M_R = sum_i w_i k(., X_i).
struct RobustMeanFit {
  Vector weights;
  /// e_i = ||Phi(X_i) - M_R|| at the final weights.
  Vector residuals;
  std::vector<double> objective_trace;
  std::vector<double> weight_changes;
  int iterations = 0;
  bool converged = false;
  RobustLoss loss = RobustLoss::quadratic();
};

/// Minimises sum_i zeta(||Phi(X_i) - f||) by KIRWLS starting from uniform
/// weights. Residuals come from K alone: e_i^2 = K_ii - 2 (K w)_i + w^T K w.
RobustMeanFit fit_robust_mean(const Matrix& K, const LossConfig& loss,
                              const KirwlsOptions& options = {});
RobustMeanFit fit_robust_mean(const Matrix& K, const RobustLoss& loss,
                              const KirwlsOptions& options = {});

}  // namespace rkcca
