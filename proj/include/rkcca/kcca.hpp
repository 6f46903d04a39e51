#pragma once

#include "rkcca/kirwls.hpp"
#include "rkcca/linalg.hpp"
#include "rkcca/loss.hpp"

#include <string>
#include <vector>

namespace rkcca {

/// Which matrix sits between the two cross blocks of the eigenproblem.
/// Operator: the full regularized inverse (whitened SVD). Printed: its
/// inverse square root, kept for comparison runs only.
enum class InnerExponent { Operator, Printed };

/// How the robust pipeline centers the Gram matrices.
enum class CenteringMode { RobustMean, Uniform };

/// Diagonal weights defining one kernel CCA problem.
struct CcaWeights {
  Vector center_x;
  Vector center_y;
  Vector w_xx;
  Vector w_yy;
  Vector w_xy;

  static CcaWeights uniform(Index n);
};

struct KccaOptions {
  double kappa = 1e-5;
  int m = 1;
  InnerExponent inner = InnerExponent::Operator;
  /// Eigenvalues of the centered Gram below rank_tol * max are discarded.
  double rank_tol = 1e-12;
};

/// Finite-dimensional realisation of a fit: feature coordinates Phi = U
/// Lambda^{1/2} of the centered Gram G = U Lambda U^T, the regularized
/// covariance blocks S and the whitened cross block R. Kept for influence
/// computations; not serialized.
struct CcaSpectral {
  Matrix Ux, Uy;
  Vector lambda_x, lambda_y;
  Matrix phi_x, phi_y;
  Matrix Sxx, Syy, Sxy;
  Matrix Sxx_isqrt, Syy_isqrt;
  Matrix R;
  /// All singular values of R, descending.
  Vector singular_values;
  /// Canonical function coordinates (rank x m).
  Matrix cx, cy;
};

struct CcaModel {
  Vector rho;
  Matrix alpha_x;
  Matrix alpha_y;
  double kappa = 1e-5;
  InnerExponent inner = InnerExponent::Operator;
  CcaWeights weights;
  bool robust = false;
  /// Largest correlation before clipping to [0, 1].
  double max_raw_rho = 0.0;
  /// KIRWLS iteration counts (ME x, ME y, CCO[, CO x, CO y]); empty for standard fits.
  std::vector<int> iterations;
  bool converged = true;
  std::vector<std::string> warnings;
  CcaSpectral spectral;
};

/// Generic kernel CCA for arbitrary diagonal weights on raw Grams.
///
/// Pre-clip correlations above 1 + 1e-6 throw NumericError when the three
/// weight vectors coincide (a Cauchy-Schwarz violation); otherwise they only
/// add a warning.
CcaModel fit_weighted(const Matrix& Kx, const Matrix& Ky, const CcaWeights& weights,
                      const KccaOptions& options);

CcaModel fit_standard_kcca(const Matrix& Kx, const Matrix& Ky, double kappa = 1e-5, int m = 1);

/// Weights of the three covariance blocks in robust kernel CCA.
/// Shared: the robust CCO weights serve W_XX, W_YY and W_XY, which keeps the
/// weighted Cauchy-Schwarz bound and hence rho <= 1. Separate: robust CO
/// weights for the variance blocks and CCO weights for the cross block; the
/// correlation can then exceed 1 and is clipped with a warning.
enum class RobustWeighting { Shared, Separate };

struct RobustKccaOptions {
  KccaOptions kcca;
  KirwlsOptions kirwls;
  CenteringMode centering = CenteringMode::RobustMean;
  RobustWeighting weighting = RobustWeighting::Shared;
};

/// Robust ME weights per view (centering), robust CCO (and, for Separate
/// weighting, robust CO of each view), then the weighted eigenproblem.
CcaModel fit_robust_kcca(const Matrix& Kx, const Matrix& Ky, const LossConfig& loss,
                         const RobustKccaOptions& options);
CcaModel fit_robust_kcca(const Matrix& Kx, const Matrix& Ky, const LossConfig& loss,
                         double kappa = 1e-5, int m = 1);

struct Projection {
  Matrix scores_x;
  Matrix scores_y;
  /// Pearson correlation of each pair of score columns (NaN when undefined).
  Vector correlations;
  bool correlation_defined = false;
};

/// Scores of centered test rows (T x n) under the model's coefficients.
Projection project(const CcaModel& model, const Matrix& Kx_test_centered,
                   const Matrix& Ky_test_centered);

/// Centers raw test rows with the model's centering weights and projects.
Projection project_raw(const CcaModel& model, const Matrix& Kx_test, const Matrix& Kx,
                       const Matrix& Ky_test, const Matrix& Ky);

/// Pearson correlation; NaN when fewer than two points or zero variance.
double pearson(const Vector& a, const Vector& b);

}  // namespace rkcca
