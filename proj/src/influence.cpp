#include "rkcca/influence.hpp"

#include "rkcca/error.hpp"
#include "rkcca/kernel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace rkcca {

Vector eif_kernel_mean(const Matrix& K, const Vector& x_prime_row) {
  if (K.rows() != K.cols() || x_prime_row.size() != K.rows()) {
    throw ContractError("eif_kernel_mean: kernel row does not conform to the Gram matrix");
  }
  return x_prime_row - K.rowwise().mean();
}

Vector eif_kernel_cco(const Matrix& Kx, const Matrix& Ky, const Vector& x_prime_row,
                      const Vector& y_prime_row) {
  const Index n = Kx.rows();
  if (Kx.cols() != n || Ky.rows() != n || Ky.cols() != n || x_prime_row.size() != n ||
      y_prime_row.size() != n) {
    throw ContractError("eif_kernel_cco: shapes do not conform");
  }
  const Vector mx = Kx.rowwise().mean();
  const Vector my = Ky.rowwise().mean();
  const Matrix Hx = Kx.colwise() - mx;
  const Matrix Hy = Ky.colwise() - my;
  const Vector current = Hx.cwiseProduct(Hy).rowwise().mean();
  return (x_prime_row - mx).cwiseProduct(y_prime_row - my) - current;
}

ContaminationPoint ContaminationPoint::sample(const Matrix& Kx, const Matrix& Ky, Index i) {
  if (i < 0 || i >= Kx.rows() || Ky.rows() != Kx.rows()) {
    throw ContractError("contamination point: sample index out of range");
  }
  ContaminationPoint z;
  z.x_row = Kx.col(i);
  z.y_row = Ky.col(i);
  z.x_self = Kx(i, i);
  z.y_self = Ky(i, i);
  return z;
}

namespace {

struct CenteredCcoInputs {
  Vector vx, vy;
  Matrix M;
  Vector m_prime;
  double self_prime = 0.0;
};

CenteredCcoInputs centered_inputs(const CovOperatorFit& fit, const Matrix& Kx, const Matrix& Ky,
                                  const ContaminationPoint& z) {
  const Index n = Kx.rows();
  if (Kx.cols() != n || Ky.rows() != n || Ky.cols() != n || fit.weights.size() != n ||
      z.x_row.size() != n || z.y_row.size() != n) {
    throw ContractError("robust CCO influence: shapes do not conform");
  }
  CenteredCcoInputs c;
  c.vx = fit.centering_weights_x.size() == n ? fit.centering_weights_x : uniform_weights(n);
  c.vy = fit.centering_weights_y.size() == n ? fit.centering_weights_y : uniform_weights(n);
  c.M = center(Kx, c.vx).centered.cwiseProduct(center(Ky, c.vy).centered);
  const Vector kx = center_test(z.x_row.transpose(), Kx, c.vx).row(0).transpose();
  const Vector ky = center_test(z.y_row.transpose(), Ky, c.vy).row(0).transpose();
  c.m_prime = kx.cwiseProduct(ky);
  const double sx = center_test_diagonal(Vector::Constant(1, z.x_self), z.x_row.transpose(), Kx, c.vx)(0);
  const double sy = center_test_diagonal(Vector::Constant(1, z.y_self), z.y_row.transpose(), Ky, c.vy)(0);
  c.self_prime = sx * sy;
  return c;
}

}  // namespace

RobustCcoInfluence if_robust_cco(const CovOperatorFit& fit, const Matrix& Kx, const Matrix& Ky,
                                 const ContaminationPoint& z) {
  const Index n = Kx.rows();
  const CenteredCcoInputs c = centered_inputs(fit, Kx, Ky, z);
  const Vector& w = fit.weights;
  const RobustLoss& loss = fit.loss;

  const double e2 = c.self_prime - 2.0 * w.dot(c.m_prime) + w.dot(c.M * w);
  RobustCcoInfluence out;
  out.e_prime = std::sqrt(std::max(0.0, e2));

  Vector q(n);
  out.gamma = 0.0;
  for (Index i = 0; i < n; ++i) {
    out.gamma += loss.phi(fit.residuals(i));
    q(i) = loss.q_over_cube(fit.residuals(i));
  }
  if (!(out.gamma > 0.0)) throw NumericError("if_robust_cco: all weights vanish");
  const double nd = static_cast<double>(n);
  const double phi_prime = loss.phi(out.e_prime);
  out.alpha_prime = nd * phi_prime / out.gamma;

  // C^T Q C with C = I - 1 w^T.
  const Matrix C = Matrix::Identity(n, n) - Vector::Ones(n) * w.transpose();
  const Matrix CQC = C.transpose() * q.asDiagonal() * C;
  Matrix A = CQC * c.M;
  A.diagonal().array() += out.gamma;
  const Vector rhs = -nd * phi_prime * w - out.alpha_prime * (CQC * c.m_prime);

  Eigen::PartialPivLU<Matrix> lu(A);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    throw NumericError("if_robust_cco: linear system is singular (reciprocal condition " +
                       std::to_string(rcond) + ")");
  }
  out.alpha = lu.solve(rhs);
  const double scale = std::max(rhs.norm(), 1e-300);
  out.solve_residual = (A * out.alpha - rhs).norm() / scale;
  return out;
}

Vector evaluate_robust_cco_if(const RobustCcoInfluence& influence, const CovOperatorFit& fit,
                              const Matrix& Kx, const Matrix& Ky, const ContaminationPoint& z) {
  const Index n = Kx.rows();
  if (influence.alpha.size() != n) throw ContractError("evaluate_robust_cco_if: alpha length mismatch");
  const Vector vx = fit.centering_weights_x.size() == n ? fit.centering_weights_x : uniform_weights(n);
  const Vector vy = fit.centering_weights_y.size() == n ? fit.centering_weights_y : uniform_weights(n);
  const Vector mx = Kx * vx;
  const Vector my = Ky * vy;
  const Matrix Hx = Kx.colwise() - mx;
  const Matrix Hy = Ky.colwise() - my;
  return Hx.cwiseProduct(Hy) * influence.alpha +
         influence.alpha_prime * (z.x_row - mx).cwiseProduct(z.y_row - my);
}

double if_rho_formula(double rho, double fx, double fy) {
  const double r2 = rho * rho;
  return -r2 * fx * fx + 2.0 * rho * fx * fy - r2 * fy * fy;
}

namespace {

struct VariateOperators {
  Matrix LX, TX, LY, TY;
  bool near_unit = false;
};

Matrix pseudo_inverse_shifted(const Matrix& B, double target, const Vector& direction) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (B + B.transpose()));
  if (es.info() != Eigen::Success) throw NumericError("eif_kcca: eigendecomposition failed");
  const Vector& ev = es.eigenvalues();
  const Matrix& V = es.eigenvectors();
  Index excluded = 0;
  double best = -1.0;
  for (Index k = 0; k < ev.size(); ++k) {
    const double overlap = std::abs(V.col(k).dot(direction));
    if (overlap > best) {
      best = overlap;
      excluded = k;
    }
  }
  Matrix P = Matrix::Zero(B.rows(), B.cols());
  for (Index k = 0; k < ev.size(); ++k) {
    if (k == excluded) continue;
    const double gap = ev(k) - target;
    if (std::abs(gap) < 1e-8) {
      throw DegenerateDataError("eif_kcca: repeated canonical correlation (eigenvalue gap " +
                                std::to_string(std::abs(gap)) + ")");
    }
    P.noalias() += V.col(k) * V.col(k).transpose() / gap;
  }
  return P;
}

VariateOperators variate_operators(const CcaModel& model, Index j) {
  const CcaSpectral& s = model.spectral;
  if (model.inner != InnerExponent::Operator) {
    throw ContractError("eif_kcca: canonical-variate influence requires the operator-form fit");
  }
  const double rho = s.singular_values(j);
  const double target = rho * rho;
  VariateOperators ops;
  ops.near_unit = rho >= 1.0 - 1e-8;
  const Vector ux = (s.Sxx * s.Sxx_isqrt * s.cx.col(j)).normalized();
  const Vector uy = (s.Syy * s.Syy_isqrt * s.cy.col(j)).normalized();
  const Matrix PX = pseudo_inverse_shifted(s.R * s.R.transpose(), target, ux);
  const Matrix PY = pseudo_inverse_shifted(s.R.transpose() * s.R, target, uy);
  ops.LX = s.Sxx_isqrt * PX * s.Sxx_isqrt;
  ops.LY = s.Syy_isqrt * PY * s.Syy_isqrt;
  ops.TX = ops.LX * s.Sxy * s.Syy.ldlt().solve(Matrix::Identity(s.Syy.rows(), s.Syy.cols()));
  ops.TY = ops.LY * s.Sxy.transpose() * s.Sxx.ldlt().solve(Matrix::Identity(s.Sxx.rows(), s.Sxx.cols()));
  return ops;
}

void check_component(const CcaModel& model, Index j) {
  if (j < 0 || j >= model.rho.size()) throw ContractError("eif_kcca: component index out of range");
}

double rho_influence(const CcaModel& model, Index j, double fx, double fy, IfRhoForm form) {
  const double rho = model.rho(j);
  double value = if_rho_formula(rho, fx, fy);
  if (form == IfRhoForm::Regularized) {
    const CcaSpectral& s = model.spectral;
    value -= rho * rho * model.kappa * (s.cx.col(j).squaredNorm() + s.cy.col(j).squaredNorm());
  }
  return value;
}

KccaInfluence eif_from_features(const CcaModel& model, Index j, const Vector& phx, const Vector& phy,
                                const KccaInfluenceOptions& options) {
  const CcaSpectral& s = model.spectral;
  KccaInfluence out;
  out.fx_prime = s.cx.col(j).dot(phx);
  out.fy_prime = s.cy.col(j).dot(phy);
  out.if_rho = rho_influence(model, j, out.fx_prime, out.fy_prime, options.form);
  if (!options.functions) return out;
  const VariateOperators ops = variate_operators(model, j);
  const double rho = model.rho(j);
  const double fx = out.fx_prime;
  const double fy = out.fy_prime;
  const Vector dx = -rho * (fy - rho * fx) * (ops.LX * phx) - (fx - rho * fy) * (ops.TX * phy) +
                    0.5 * (1.0 - fx * fx) * s.cx.col(j);
  const Vector dy = -rho * (fx - rho * fy) * (ops.LY * phy) - (fy - rho * fx) * (ops.TY * phx) +
                    0.5 * (1.0 - fy * fy) * s.cy.col(j);
  out.if_fx = s.phi_x * dx;
  out.if_fy = s.phi_y * dy;
  return out;
}

Vector feature_of(const Matrix& U, const Vector& lambda, const Matrix& K, const Vector& center_w,
                  const Vector& row) {
  const Vector kc = center_test(row.transpose(), K, center_w).row(0).transpose();
  return lambda.cwiseSqrt().cwiseInverse().cwiseProduct(U.transpose() * kc);
}

}  // namespace

KccaInfluence eif_kcca(const CcaModel& model, Index j, Index sample_index,
                       const KccaInfluenceOptions& options) {
  check_component(model, j);
  const CcaSpectral& s = model.spectral;
  if (sample_index < 0 || sample_index >= s.phi_x.rows()) {
    throw ContractError("eif_kcca: sample index out of range");
  }
  return eif_from_features(model, j, s.phi_x.row(sample_index).transpose(),
                           s.phi_y.row(sample_index).transpose(), options);
}

KccaInfluence eif_kcca(const CcaModel& model, const Matrix& Kx, const Matrix& Ky, Index j,
                       const ContaminationPoint& z, const KccaInfluenceOptions& options) {
  check_component(model, j);
  const CcaSpectral& s = model.spectral;
  const Index n = s.phi_x.rows();
  if (Kx.rows() != n || Ky.rows() != n || z.x_row.size() != n || z.y_row.size() != n) {
    throw ContractError("eif_kcca: kernel rows do not conform to the model");
  }
  const Vector phx = feature_of(s.Ux, s.lambda_x, Kx, model.weights.center_x, z.x_row);
  const Vector phy = feature_of(s.Uy, s.lambda_y, Ky, model.weights.center_y, z.y_row);
  return eif_from_features(model, j, phx, phy, options);
}

bool ThresholdRule::flags(double value) const {
  if (basis == "none") return false;
  return std::abs(value - center) > multiplier * scale;
}

ThresholdRule mad_rule(const Vector& values, double multiplier) {
  if (values.size() == 0) throw ContractError("mad_rule: empty input");
  ThresholdRule rule;
  rule.multiplier = multiplier;
  const std::vector<double> v = to_std(values);
  rule.center = median(v);
  const double m = mad(v);
  if (m > 0.0) {
    rule.scale = 1.4826 * m;
    rule.basis = "mad";
    return rule;
  }
  double mean_abs = 0.0;
  for (double x : v) mean_abs += std::abs(x - rule.center);
  mean_abs /= static_cast<double>(v.size());
  if (mean_abs > 0.0) {
    rule.scale = 1.2533 * mean_abs;
    rule.basis = "mean-abs";
  } else {
    rule.scale = 0.0;
    rule.basis = "none";
  }
  return rule;
}

std::vector<bool> outlier_flags(const Vector& values, const ThresholdRule& rule) {
  std::vector<bool> flags(static_cast<std::size_t>(values.size()));
  for (Index i = 0; i < values.size(); ++i) flags[static_cast<std::size_t>(i)] = rule.flags(values(i));
  return flags;
}

InfluenceReport influence_report(const CcaModel& model, Index j, const KccaInfluenceOptions& options,
                                 double multiplier) {
  check_component(model, j);
  const CcaSpectral& s = model.spectral;
  const Index n = s.phi_x.rows();
  InfluenceReport report;
  report.component = j;
  const Vector fx = s.phi_x * s.cx.col(j);
  const Vector fy = s.phi_y * s.cy.col(j);
  report.eif_rho.resize(n);
  for (Index i = 0; i < n; ++i) report.eif_rho(i) = rho_influence(model, j, fx(i), fy(i), options.form);

  if (options.functions) {
    const VariateOperators ops = variate_operators(model, j);
    const double rho = model.rho(j);
    const Matrix AX = s.phi_x * ops.LX * s.phi_x.transpose();
    const Matrix BX = s.phi_x * ops.TX * s.phi_y.transpose();
    const Matrix AY = s.phi_y * ops.LY * s.phi_y.transpose();
    const Matrix BY = s.phi_y * ops.TY * s.phi_x.transpose();
    report.eif_fx.resize(n, n);
    report.eif_fy.resize(n, n);
    for (Index i = 0; i < n; ++i) {
      const double a = fx(i), b = fy(i);
      report.eif_fx.col(i) = -rho * (b - rho * a) * AX.col(i) - (a - rho * b) * BX.col(i) +
                             0.5 * (1.0 - a * a) * fx;
      report.eif_fy.col(i) = -rho * (a - rho * b) * AY.col(i) - (b - rho * a) * BY.col(i) +
                             0.5 * (1.0 - b * b) * fy;
    }
  }
  report.threshold_rule = mad_rule(report.eif_rho, multiplier);
  report.outlier_flags = outlier_flags(report.eif_rho, report.threshold_rule);
  return report;
}

RobustnessSummaries robustness_summaries(const Matrix& grid, const Vector& values, double tol,
                                         const Vector& origin) {
  const Index G = grid.rows();
  if (G == 0 || values.size() != G) throw ContractError("robustness_summaries: empty or mismatched grid");
  if (origin.size() != 0 && origin.size() != grid.cols()) {
    throw ContractError("robustness_summaries: origin dimension mismatch");
  }
  RobustnessSummaries out;
  out.gamma_star = values.cwiseAbs().maxCoeff();
  for (Index a = 0; a < G; ++a) {
    for (Index b = a + 1; b < G; ++b) {
      const double d = (grid.row(a) - grid.row(b)).norm();
      if (d > 0.0) out.lambda_star = std::max(out.lambda_star, std::abs(values(a) - values(b)) / d);
    }
  }
  Vector radius(G);
  for (Index a = 0; a < G; ++a) {
    radius(a) = origin.size() == 0 ? grid.row(a).norm() : (grid.row(a) - origin.transpose()).norm();
  }
  const double outer = radius.maxCoeff();
  double reject = 0.0;
  bool outermost_influential = false;
  for (Index a = 0; a < G; ++a) {
    if (std::abs(values(a)) >= tol) {
      reject = std::max(reject, radius(a));
      if (radius(a) == outer) outermost_influential = true;
    }
  }
  out.rho_star = outermost_influential ? std::numeric_limits<double>::infinity() : reject;
  return out;
}

namespace {

Vector mixture(Index n, Index i, double eps) {
  if (i < 0 || i >= n) throw ContractError("contamination_slope: sample index out of range");
  if (!(eps > 0.0) || eps >= 1.0) throw ContractError("contamination_slope: eps must lie in (0, 1)");
  Vector v = Vector::Constant(n, (1.0 - eps) / static_cast<double>(n));
  v(i) += eps;
  return v;
}

}  // namespace

double contamination_slope(const Matrix& Kx, const Matrix& Ky, const KccaOptions& options, Index j,
                           Index sample_index, double eps) {
  const Index n = Kx.rows();
  const Vector v = mixture(n, sample_index, eps);
  const CcaModel base = fit_weighted(Kx, Ky, CcaWeights::uniform(n), options);
  const CcaModel moved = fit_weighted(Kx, Ky, {v, v, v, v, v}, options);
  check_component(base, j);
  return (moved.rho(j) * moved.rho(j) - base.rho(j) * base.rho(j)) / eps;
}

double contamination_slope(const Matrix& Kx, const Matrix& Ky, const LossConfig& loss,
                           const RobustKccaOptions& options, Index j, Index sample_index, double eps) {
  const Index n = Kx.rows();
  RobustKccaOptions perturbed = options;
  perturbed.kirwls.base = mixture(n, sample_index, eps);
  RobustKccaOptions plain = options;
  plain.kirwls.base = Vector();
  const CcaModel base = fit_robust_kcca(Kx, Ky, loss, plain);
  const CcaModel moved = fit_robust_kcca(Kx, Ky, loss, perturbed);
  check_component(base, j);
  return (moved.rho(j) * moved.rho(j) - base.rho(j) * base.rho(j)) / eps;
}

}  // namespace rkcca
