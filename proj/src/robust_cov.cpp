#include "rkcca/robust_cov.hpp"

#include "rkcca/error.hpp"

#include <algorithm>

namespace rkcca {

namespace {

void check_pair(const Matrix& Kx, const Matrix& Ky) {
  if (Kx.rows() != Kx.cols() || Ky.rows() != Ky.cols() || Kx.rows() != Ky.rows()) {
    throw ContractError("covariance operator: Gram blocks must be square and of equal size");
  }
}

}  // namespace

Vector standard_cco_weights(Index n) {
  if (n < 1) throw ContractError("standard_cco_weights: n must be >= 1");
  return uniform_weights(n);
}

Vector residual_vector(const Matrix& Kx, const Matrix& Ky, const Vector& w) {
  check_pair(Kx, Ky);
  if (w.size() != Kx.rows()) throw ContractError("residual_vector: weight length mismatch");
  check_simplex(w);
  const Matrix M = Kx.cwiseProduct(Ky);
  return weighted_residuals(M, w);
}

CovOperatorFit fit_robust_cov(const Matrix& Kx, const Matrix& Ky, const LossConfig& loss,
                              const KirwlsOptions& options) {
  check_pair(Kx, Ky);
  const Matrix M = Kx.cwiseProduct(Ky);
  KirwlsResult r = kirwls(M, loss, options);
  CovOperatorFit fit;
  fit.weights = std::move(r.weights);
  fit.residuals = std::move(r.residuals);
  fit.objective_trace = std::move(r.objective_trace);
  fit.weight_changes = std::move(r.weight_changes);
  fit.iterations = r.iterations;
  fit.converged = r.converged;
  fit.loss = r.loss;
  fit.kind = (&Kx == &Ky || Kx == Ky) ? OperatorKind::CO : OperatorKind::CCO;
  return fit;
}

CovOperatorFit fit_robust_cov(const WeightedCenteredGram& x, const WeightedCenteredGram& y,
                              const LossConfig& loss, const KirwlsOptions& options) {
  CovOperatorFit fit = fit_robust_cov(x.centered, y.centered, loss, options);
  fit.centering_weights_x = x.weights;
  fit.centering_weights_y = y.weights;
  return fit;
}

CovOperatorFit fit_robust_co(const WeightedCenteredGram& x, const LossConfig& loss,
                             const KirwlsOptions& options) {
  return fit_robust_cov(x, x, loss, options);
}

double hs_norm_sq(const Matrix& Kx, const Matrix& Ky, const Vector& w) {
  check_pair(Kx, Ky);
  if (w.size() != Kx.rows()) throw ContractError("hs_norm_sq: weight length mismatch");
  return w.dot(Kx.cwiseProduct(Ky) * w);
}

double hs_distance_sq(const Vector& w_a, const CrossGramBlocks& x, const CrossGramBlocks& y,
                      const Vector& w_b) {
  const Index na = w_a.size();
  const Index nb = w_b.size();
  auto conforms = [&](const CrossGramBlocks& g) {
    return g.aa.rows() == na && g.aa.cols() == na && g.ab.rows() == na && g.ab.cols() == nb &&
           g.bb.rows() == nb && g.bb.cols() == nb;
  };
  if (!conforms(x) || !conforms(y)) throw ContractError("hs_distance_sq: cross-Gram blocks do not conform");
  const double aa = w_a.dot(x.aa.cwiseProduct(y.aa) * w_a);
  const double ab = w_a.dot(x.ab.cwiseProduct(y.ab) * w_b);
  const double bb = w_b.dot(x.bb.cwiseProduct(y.bb) * w_b);
  return std::max(0.0, aa - 2.0 * ab + bb);
}

Matrix operator_matrix(const Matrix& Kx, const Matrix& Ky, const Vector& w) {
  check_pair(Kx, Ky);
  if (w.size() != Kx.rows()) throw ContractError("operator_matrix: weight length mismatch");
  return Kx * w.asDiagonal() * Ky.transpose();
}

}  // namespace rkcca
