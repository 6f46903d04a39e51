#include "rkcca/kirwls.hpp"

#include "rkcca/error.hpp"
#include "rkcca/kernel.hpp"

#include <cmath>

namespace rkcca {

Vector weighted_residuals(const Matrix& M, const Vector& w) {
  if (M.rows() != M.cols() || w.size() != M.rows()) {
    throw ContractError("residuals: shape mismatch");
  }
  const Vector Mw = M * w;
  const double wMw = w.dot(Mw);
  const double scale = std::max(M.diagonal().cwiseAbs().maxCoeff(), std::abs(wMw));
  Vector e(M.rows());
  for (Index i = 0; i < M.rows(); ++i) {
    const double sq = M(i, i) - 2.0 * Mw(i) + wMw;
    if (sq < 0.0) {
      if (sq < -1e-8 * scale) {
        throw NumericError("negative squared residual " + std::to_string(sq) +
                           ": feature Gram matrix is not positive semidefinite");
      }
      e(i) = 0.0;
    } else {
      e(i) = std::sqrt(sq);
    }
  }
  return e;
}

namespace {

double objective(const RobustLoss& loss, const Vector& e, const Vector& base) {
  double total = 0.0;
  if (base.size() == 0) {
    for (Index i = 0; i < e.size(); ++i) total += loss.zeta(e(i));
  } else {
    for (Index i = 0; i < e.size(); ++i) total += base(i) * loss.zeta(e(i));
  }
  return total;
}

Vector reweight(const RobustLoss& loss, const Vector& e, const Vector& base) {
  Vector w(e.size());
  for (Index i = 0; i < e.size(); ++i) w(i) = loss.phi(e(i));
  if (base.size() != 0) w = w.cwiseProduct(base);
  const double total = w.sum();
  if (!(total > 0.0)) {
    throw NumericError("all KIRWLS weights vanished; loss constants are too small for the residuals");
  }
  return w / total;
}

}  // namespace

KirwlsResult kirwls(const Matrix& M, const LossConfig& config, const KirwlsOptions& options) {
  if (M.rows() != M.cols() || M.rows() < 1) throw ContractError("kirwls: M must be square and non-empty");
  if (!(options.tol > 0.0)) throw ContractError("kirwls: tol must be positive");
  if (options.max_iter < 1) throw ContractError("kirwls: max_iter must be >= 1");

  const Index n = M.rows();
  KirwlsResult out;
  const Vector& base = options.base;
  if (base.size() != 0) {
    if (base.size() != n) throw ContractError("kirwls: base measure length mismatch");
    check_simplex(base);
  }
  out.weights = base.size() == 0 ? uniform_weights(n) : base;
  out.residuals = weighted_residuals(M, out.weights);
  out.loss = calibrate(config, std::span<const double>(out.residuals.data(), static_cast<std::size_t>(n)));

  double J = objective(out.loss, out.residuals, base);
  out.objective_trace.push_back(J);

  for (int h = 1; h <= options.max_iter; ++h) {
    const Vector w = reweight(out.loss, out.residuals, base);
    const double change = (w - out.weights).cwiseAbs().maxCoeff();
    out.residuals = weighted_residuals(M, w);
    out.weights = w;
    const double J_next = objective(out.loss, out.residuals, base);
    out.objective_trace.push_back(J_next);
    out.weight_changes.push_back(change);
    out.iterations = h;
    const double rel = J > 0.0 ? std::abs(J_next - J) / J : 0.0;
    J = J_next;
    if (rel < options.tol && change < options.weight_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace rkcca
