#include "rkcca/kcca.hpp"

#include "rkcca/error.hpp"
#include "rkcca/kernel.hpp"
#include "rkcca/robust_cov.hpp"
#include "rkcca/robust_mean.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace rkcca {

CcaWeights CcaWeights::uniform(Index n) {
  const Vector u = uniform_weights(n);
  return {u, u, u, u, u};
}

namespace {

struct FeatureBasis {
  Matrix U;
  Vector lambda;
  Matrix phi;
};

FeatureBasis feature_basis(const Matrix& G, double rank_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  if (es.info() != Eigen::Success) throw NumericError("kcca: eigendecomposition of the centered Gram failed");
  const Vector& ev = es.eigenvalues();
  const double top = ev.size() > 0 ? ev(ev.size() - 1) : 0.0;
  if (!(top > 0.0)) throw DegenerateDataError("kcca: centered Gram matrix is zero (no variation in a view)");
  std::vector<Index> keep;
  for (Index k = ev.size() - 1; k >= 0; --k) {
    if (ev(k) > rank_tol * top) keep.push_back(k);
  }
  FeatureBasis b;
  b.U.resize(G.rows(), static_cast<Index>(keep.size()));
  b.lambda.resize(static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    b.U.col(static_cast<Index>(c)) = es.eigenvectors().col(keep[c]);
    b.lambda(static_cast<Index>(c)) = ev(keep[c]);
  }
  b.phi = b.U * b.lambda.cwiseSqrt().asDiagonal();
  return b;
}

Matrix inverse_sqrt(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  if (es.info() != Eigen::Success) throw NumericError("kcca: eigendecomposition of a covariance block failed");
  const Vector& ev = es.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) throw NumericError("kcca: regularized covariance block is not positive definite");
  return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

void check_weights(const CcaWeights& w, Index n) {
  for (const Vector* v : {&w.center_x, &w.center_y, &w.w_xx, &w.w_yy, &w.w_xy}) {
    if (v->size() != n) throw ContractError("kcca: weight vector length differs from n");
    check_simplex(*v);
  }
}

bool same_weights(const CcaWeights& w) { return w.w_xx == w.w_yy && w.w_xx == w.w_xy; }

Vector to_alpha(const FeatureBasis& b, const Vector& c) {
  return b.U * (b.lambda.cwiseSqrt().cwiseInverse().cwiseProduct(c));
}

}  // namespace

CcaModel fit_weighted(const Matrix& Kx, const Matrix& Ky, const CcaWeights& weights,
                      const KccaOptions& options) {
  const Index n = Kx.rows();
  if (Kx.cols() != n || Ky.rows() != n || Ky.cols() != n) {
    throw ContractError("kcca: Gram matrices must be square with equal size");
  }
  if (n < 2) throw ContractError("kcca: need at least 2 samples");
  if (!(options.kappa > 0.0)) throw ContractError("kcca: kappa must be positive");
  if (options.m < 1 || options.m > n) throw ContractError("kcca: m must lie in [1, n]");
  check_weights(weights, n);

  const FeatureBasis bx = feature_basis(center(Kx, weights.center_x).centered, options.rank_tol);
  const FeatureBasis by = feature_basis(center(Ky, weights.center_y).centered, options.rank_tol);
  const Index m = options.m;
  if (m > std::min(bx.phi.cols(), by.phi.cols())) {
    throw ContractError("kcca: m exceeds the rank of a centered Gram matrix");
  }

  CcaModel model;
  model.kappa = options.kappa;
  model.inner = options.inner;
  model.weights = weights;
  CcaSpectral& s = model.spectral;
  s.Ux = bx.U;
  s.Uy = by.U;
  s.lambda_x = bx.lambda;
  s.lambda_y = by.lambda;
  s.phi_x = bx.phi;
  s.phi_y = by.phi;
  const Index rx = bx.phi.cols();
  const Index ry = by.phi.cols();
  s.Sxx = bx.phi.transpose() * weights.w_xx.asDiagonal() * bx.phi;
  s.Sxx.diagonal().array() += options.kappa;
  s.Syy = by.phi.transpose() * weights.w_yy.asDiagonal() * by.phi;
  s.Syy.diagonal().array() += options.kappa;
  s.Sxy = bx.phi.transpose() * weights.w_xy.asDiagonal() * by.phi;
  s.Sxx_isqrt = inverse_sqrt(s.Sxx);
  s.Syy_isqrt = inverse_sqrt(s.Syy);
  s.R = s.Sxx_isqrt * s.Sxy * s.Syy_isqrt;

  Vector raw(m);
  s.cx.resize(rx, m);
  s.cy.resize(ry, m);
  if (options.inner == InnerExponent::Operator) {
    Eigen::BDCSVD<Matrix> svd(s.R, Eigen::ComputeThinU | Eigen::ComputeThinV);
    s.singular_values = svd.singularValues();
    for (Index j = 0; j < m; ++j) {
      raw(j) = svd.singularValues()(j);
      s.cx.col(j) = s.Sxx_isqrt * svd.matrixU().col(j);
      s.cy.col(j) = s.Syy_isqrt * svd.matrixV().col(j);
    }
  } else {
    const Matrix P = s.Sxx_isqrt * s.Sxy * s.Syy_isqrt * s.Sxy.transpose() * s.Sxx_isqrt;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (P + P.transpose()));
    if (es.info() != Eigen::Success) throw NumericError("kcca: eigendecomposition failed");
    const Index r = es.eigenvalues().size();
    s.singular_values.resize(r);
    for (Index k = 0; k < r; ++k) s.singular_values(k) = std::sqrt(std::max(0.0, es.eigenvalues()(r - 1 - k)));
    const Matrix Syy_inv = s.Syy.inverse();
    for (Index j = 0; j < m; ++j) {
      raw(j) = s.singular_values(j);
      s.cx.col(j) = s.Sxx_isqrt * es.eigenvectors().col(r - 1 - j);
      Vector g = Syy_inv * s.Sxy.transpose() * s.cx.col(j);
      const double norm = std::sqrt(g.dot(s.Syy * g));
      s.cy.col(j) = norm > 0.0 ? Vector(g / norm) : Vector::Zero(ry);
    }
  }

  model.max_raw_rho = raw.maxCoeff();
  if (model.max_raw_rho > 1.0 + 1e-6) {
    if (same_weights(weights) && options.inner == InnerExponent::Operator) {
      throw NumericError("kcca: canonical correlation " + std::to_string(model.max_raw_rho) + " exceeds 1");
    }
    model.warnings.push_back("canonical correlation above 1 before clipping: " +
                             std::to_string(model.max_raw_rho));
  }
  model.rho = raw.cwiseMax(0.0).cwiseMin(1.0);

  model.alpha_x.resize(n, m);
  model.alpha_y.resize(n, m);
  for (Index j = 0; j < m; ++j) {
    Vector ax = to_alpha(bx, s.cx.col(j));
    Vector ay = to_alpha(by, s.cy.col(j));
    const double top = ax.cwiseAbs().maxCoeff();
    for (Index i = 0; i < n; ++i) {
      if (std::abs(ax(i)) > 1e-12 * top) {
        if (ax(i) < 0.0) {
          ax = -ax;
          ay = -ay;
          s.cx.col(j) *= -1.0;
          s.cy.col(j) *= -1.0;
        }
        break;
      }
    }
    model.alpha_x.col(j) = ax;
    model.alpha_y.col(j) = ay;
  }
  return model;
}

CcaModel fit_standard_kcca(const Matrix& Kx, const Matrix& Ky, double kappa, int m) {
  KccaOptions options;
  options.kappa = kappa;
  options.m = m;
  return fit_weighted(Kx, Ky, CcaWeights::uniform(Kx.rows()), options);
}

CcaModel fit_robust_kcca(const Matrix& Kx, const Matrix& Ky, const LossConfig& loss,
                         const RobustKccaOptions& options) {
  const Index n = Kx.rows();
  if (Kx.cols() != n || Ky.rows() != n || Ky.cols() != n) {
    throw ContractError("kcca: Gram matrices must be square with equal size");
  }
  std::vector<int> iterations;
  bool converged = true;
  CcaWeights w;
  if (options.centering == CenteringMode::RobustMean) {
    const RobustMeanFit mx = fit_robust_mean(Kx, loss, options.kirwls);
    const RobustMeanFit my = fit_robust_mean(Ky, loss, options.kirwls);
    w.center_x = mx.weights;
    w.center_y = my.weights;
    iterations.push_back(mx.iterations);
    iterations.push_back(my.iterations);
    converged = converged && mx.converged && my.converged;
  } else {
    const Vector& base = options.kirwls.base;
    w.center_x = base.size() == 0 ? uniform_weights(n) : base;
    w.center_y = w.center_x;
    iterations.push_back(0);
    iterations.push_back(0);
  }
  const WeightedCenteredGram gx = center(Kx, w.center_x);
  const WeightedCenteredGram gy = center(Ky, w.center_y);
  const CovOperatorFit cco = fit_robust_cov(gx, gy, loss, options.kirwls);
  w.w_xy = cco.weights;
  iterations.push_back(cco.iterations);
  converged = converged && cco.converged;
  if (options.weighting == RobustWeighting::Separate) {
    const CovOperatorFit cox = fit_robust_co(gx, loss, options.kirwls);
    const CovOperatorFit coy = fit_robust_co(gy, loss, options.kirwls);
    w.w_xx = cox.weights;
    w.w_yy = coy.weights;
    iterations.push_back(cox.iterations);
    iterations.push_back(coy.iterations);
    converged = converged && cox.converged && coy.converged;
  } else {
    w.w_xx = cco.weights;
    w.w_yy = cco.weights;
  }

  CcaModel model = fit_weighted(Kx, Ky, w, options.kcca);
  model.robust = true;
  model.iterations = std::move(iterations);
  model.converged = converged;
  if (!converged) model.warnings.push_back("KIRWLS did not converge within max_iter");
  return model;
}

CcaModel fit_robust_kcca(const Matrix& Kx, const Matrix& Ky, const LossConfig& loss, double kappa,
                         int m) {
  RobustKccaOptions options;
  options.kcca.kappa = kappa;
  options.kcca.m = m;
  return fit_robust_kcca(Kx, Ky, loss, options);
}

double pearson(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ContractError("pearson: length mismatch");
  const Index T = a.size();
  if (T < 2) return std::numeric_limits<double>::quiet_NaN();
  const Vector da = a.array() - a.mean();
  const Vector db = b.array() - b.mean();
  const double va = da.squaredNorm();
  const double vb = db.squaredNorm();
  if (!(va > 0.0) || !(vb > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return da.dot(db) / std::sqrt(va * vb);
}

Projection project(const CcaModel& model, const Matrix& Kx_test, const Matrix& Ky_test) {
  const Index n = model.alpha_x.rows();
  if (Kx_test.cols() != n || Ky_test.cols() != n || Kx_test.rows() != Ky_test.rows()) {
    throw ContractError("project: test rows must be T x n for both views");
  }
  Projection p;
  p.scores_x = Kx_test * model.alpha_x;
  p.scores_y = Ky_test * model.alpha_y;
  const Index m = model.alpha_x.cols();
  p.correlations.resize(m);
  p.correlation_defined = true;
  for (Index j = 0; j < m; ++j) {
    p.correlations(j) = pearson(p.scores_x.col(j), p.scores_y.col(j));
    if (std::isnan(p.correlations(j))) p.correlation_defined = false;
  }
  return p;
}

Projection project_raw(const CcaModel& model, const Matrix& Kx_test, const Matrix& Kx,
                       const Matrix& Ky_test, const Matrix& Ky) {
  return project(model, center_test(Kx_test, Kx, model.weights.center_x),
                 center_test(Ky_test, Ky, model.weights.center_y));
}

}  // namespace rkcca
