#pragma once

#include "rkcca/kcca.hpp"
#include "rkcca/linalg.hpp"
#include "rkcca/loss.hpp"
#include "rkcca/robust_cov.hpp"

#include <limits>
#include <string>
#include <vector>

namespace rkcca {

/// EIF of the kernel mean at X' evaluated at every sample point:
/// k(X_j, X') - (1/n) sum_i k(X_j, X_i).
Vector eif_kernel_mean(const Matrix& K, const Vector& x_prime_row);

/// EIF of the kernel CCO at (X', Y') evaluated at every sample pair:
/// [k_X(X_j,X') - m_j][k_Y(Y_j,Y') - l_j] - (1/n) sum_d [K_X,jd - m_j][K_Y,jd - l_j]
/// with m, l the row means.
Vector eif_kernel_cco(const Matrix& Kx, const Matrix& Ky, const Vector& x_prime_row,
                      const Vector& y_prime_row);

/// A contamination point given through raw kernel evaluations.
struct ContaminationPoint {
  Vector x_row;  ///< k_X(X_i, X'), length n
  Vector y_row;  ///< k_Y(Y_i, Y'), length n
  double x_self = 0.0;  ///< k_X(X', X')
  double y_self = 0.0;  ///< k_Y(Y', Y')

  /// Sample point i re-used as contamination point.
  static ContaminationPoint sample(const Matrix& Kx, const Matrix& Ky, Index i);
};

/// IF of the robust kernel CCO,
///   sum_i alpha_i k~_X(., X_i) k~_Y(., Y_i) + alpha' k~_X(., X') k~_Y(., Y').
struct RobustCcoInfluence {
  Vector alpha;
  double alpha_prime = 0.0;
  double gamma = 0.0;
  /// Residual of the contamination point, ||Phi~(X') (x) Phi~(Y') - Sigma_R||.
  double e_prime = 0.0;
  /// Relative residual of the linear solve.
  double solve_residual = 0.0;
};

/// Solves
///   {gamma I + C^T Q C (K~_X o K~_Y)} alpha = -n phi(e') w - alpha' C^T Q C m'
/// with C = I - 1 w^T, Q_ii = q(e_i) / e_i^3, gamma = sum_i phi(e_i),
/// alpha' = n phi(e') / gamma and m'_i = k~_X(X_i, X') k~_Y(Y_i, Y').
/// Kx, Ky are raw Grams; centering uses the fit's centering weights
/// (uniform when absent).
RobustCcoInfluence if_robust_cco(const CovOperatorFit& fit, const Matrix& Kx, const Matrix& Ky,
                                 const ContaminationPoint& z);

/// The robust CCO influence evaluated at every sample pair, with the
/// evaluation argument centered by the fit's centering weights. For the
/// quadratic loss this coincides with eif_kernel_cco.
Vector evaluate_robust_cco_if(const RobustCcoInfluence& influence, const CovOperatorFit& fit,
                              const Matrix& Kx, const Matrix& Ky, const ContaminationPoint& z);

/// Scalar IF of rho_j^2. Regularized: the exact derivative of the
/// kappa-regularized problem, which adds -rho^2 kappa (||f_X||^2 + ||f_Y||^2)
/// to the unregularized expression. Asymptotic: the kappa -> 0 expression only.
enum class IfRhoForm { Regularized, Asymptotic };

struct KccaInfluenceOptions {
  IfRhoForm form = IfRhoForm::Regularized;
  /// Also evaluate the canonical-variate IFs.
  bool functions = true;
};

struct KccaInfluence {
  double if_rho = 0.0;
  Vector if_fx;
  Vector if_fy;
  double fx_prime = 0.0;
  double fy_prime = 0.0;
};

/// Closed-form IF of the j-th (0-based) canonical correlation and variates
/// at a sample index.
KccaInfluence eif_kcca(const CcaModel& model, Index j, Index sample_index,
                       const KccaInfluenceOptions& options = {});
/// Same, at an arbitrary contamination point given by raw kernel rows.
KccaInfluence eif_kcca(const CcaModel& model, const Matrix& Kx, const Matrix& Ky, Index j,
                       const ContaminationPoint& z, const KccaInfluenceOptions& options = {});

/// Closed-form IF of rho^2 from the centered variate values at Z'.
double if_rho_formula(double rho, double fx, double fy);

struct ThresholdRule {
  double center = 0.0;
  double scale = 0.0;
  double multiplier = 3.0;
  /// "mad", "mean-abs" (MAD was zero) or "none" (no spread at all).
  std::string basis = "mad";

  bool flags(double value) const;
};

/// |v - median| > multiplier * 1.4826 * MAD. A zero MAD falls back to
/// 1.2533 * mean absolute deviation from the median; when that is zero too
/// nothing is flagged.
ThresholdRule mad_rule(const Vector& values, double multiplier = 3.0);
std::vector<bool> outlier_flags(const Vector& values, const ThresholdRule& rule);

struct InfluenceReport {
  Index component = 0;
  Vector eif_rho;
  /// Column i holds IF(., Z_i, f_jX) at every sample point (empty when the
  /// variate IFs were not requested).
  Matrix eif_fx;
  Matrix eif_fy;
  std::vector<bool> outlier_flags;
  ThresholdRule threshold_rule;
};

/// Evaluates eif_kcca at each sample pair and flags outliers.
InfluenceReport influence_report(const CcaModel& model, Index j,
                                 const KccaInfluenceOptions& options = {},
                                 double multiplier = 3.0);

struct RobustnessSummaries {
  double gamma_star = 0.0;
  double lambda_star = 0.0;
  /// Radius beyond which every |EIF| < tol; +infinity when the outermost
  /// grid point is still influential.
  double rho_star = std::numeric_limits<double>::infinity();
};

/// Gross-error sensitivity, local-shift sensitivity (over all grid pairs)
/// and rejection point of EIF values on a grid of contamination points
/// (one per row of `grid`), radii measured from `origin` (default 0).
RobustnessSummaries robustness_summaries(const Matrix& grid, const Vector& values, double tol = 1e-3,
                                         const Vector& origin = Vector());

/// Contamination-path slope (rho_j^2(eps) - rho_j^2(0)) / eps where the
/// sample measure becomes (1 - eps) F_n + eps delta_{Z_i}. With a loss the
/// whole robust pipeline is refitted under the perturbed measure.
double contamination_slope(const Matrix& Kx, const Matrix& Ky, const KccaOptions& options, Index j,
                           Index sample_index, double eps);
double contamination_slope(const Matrix& Kx, const Matrix& Ky, const LossConfig& loss,
                           const RobustKccaOptions& options, Index j, Index sample_index, double eps);

}  // namespace rkcca
