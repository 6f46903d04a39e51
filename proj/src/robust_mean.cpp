#include "rkcca/robust_mean.hpp"

#include "rkcca/error.hpp"

namespace rkcca {

RobustMeanFit fit_robust_mean(const Matrix& K, const LossConfig& loss, const KirwlsOptions& options) {
  if (K.rows() != K.cols()) throw ContractError("fit_robust_mean: Gram matrix must be square");
  KirwlsResult r = kirwls(K, loss, options);
  RobustMeanFit fit;
  fit.weights = std::move(r.weights);
  fit.residuals = std::move(r.residuals);
  fit.objective_trace = std::move(r.objective_trace);
  fit.weight_changes = std::move(r.weight_changes);
  fit.iterations = r.iterations;
  fit.converged = r.converged;
  fit.loss = r.loss;
  return fit;
}

RobustMeanFit fit_robust_mean(const Matrix& K, const RobustLoss& loss, const KirwlsOptions& options) {
  return fit_robust_mean(K, LossConfig::fixed(loss), options);
}

}  // namespace rkcca
