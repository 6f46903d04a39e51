#include "rkcca/error.hpp"
#include "rkcca/kcca.hpp"
#include "rkcca/kernel.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace rkcca;
using namespace rkcca::testing;

namespace {

Matrix isqrt(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

// Classical CCA via whitened SVD of sample covariances.
double classical_rho(const Matrix& X, const Matrix& Y) {
  const Matrix Xc = X.rowwise() - X.colwise().mean();
  const Matrix Yc = Y.rowwise() - Y.colwise().mean();
  const double n = static_cast<double>(X.rows());
  const Matrix Cxx = Xc.transpose() * Xc / n, Cyy = Yc.transpose() * Yc / n, Cxy = Xc.transpose() * Yc / n;
  Eigen::JacobiSVD<Matrix> svd(isqrt(Cxx) * Cxy * isqrt(Cyy));
  return svd.singularValues()(0);
}

struct Pair {
  Matrix X, Y;
};

Pair correlated(Index n, double r, std::uint64_t seed) {
  const Matrix Z = normals(n, 4, seed);
  Pair p{Matrix(n, 2), Matrix(n, 2)};
  p.X.col(0) = Z.col(0);
  p.X.col(1) = Z.col(1);
  p.Y.col(0) = r * Z.col(0) + std::sqrt(1 - r * r) * Z.col(2);
  p.Y.col(1) = Z.col(3);
  return p;
}

}  // namespace

TEST_SUITE("kcca") {
  TEST_CASE("linear kernel recovers classical CCA") {
    const Pair p = correlated(400, 0.8, 11);
    const Matrix Kx = gram(KernelSpec::linear(), p.X), Ky = gram(KernelSpec::linear(), p.Y);
    const CcaModel m = fit_standard_kcca(Kx, Ky, 1e-8, 1);
    CHECK(m.rho(0) == doctest::Approx(classical_rho(p.X, p.Y)).epsilon(1e-5));
  }

  TEST_CASE("identical views give rho near 1") {
    const Matrix X = normals(60, 2, 3);
    const Matrix K = gram(KernelSpec::gaussian(1.0), X);
    const CcaModel m = fit_standard_kcca(K, K, 1e-6, 2);
    CHECK(m.rho(0) > 0.99);
    CHECK(m.rho(0) <= 1.0);
    CHECK(m.rho(1) <= m.rho(0));
  }

  TEST_CASE("canonical functions are normalised and signed") {
    const Pair p = correlated(50, 0.6, 5);
    const Matrix Kx = gram(KernelSpec::gaussian(1.0), p.X), Ky = gram(KernelSpec::gaussian(1.0), p.Y);
    const CcaModel m = fit_standard_kcca(Kx, Ky, 1e-3, 3);
    const CcaSpectral& s = m.spectral;
    for (Index j = 0; j < 3; ++j) {
      CHECK(s.cx.col(j).dot(s.Sxx * s.cx.col(j)) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(s.cy.col(j).dot(s.Syy * s.cy.col(j)) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(s.cx.col(j).dot(s.Sxy * s.cy.col(j)) == doctest::Approx(m.rho(j)).epsilon(1e-9));
      Index first = 0;
      while (std::abs(m.alpha_x(first, j)) < 1e-12 * m.alpha_x.col(j).cwiseAbs().maxCoeff()) ++first;
      CHECK(m.alpha_x(first, j) > 0.0);
    }
  }

  TEST_CASE("training projection correlates at least rho") {
    const Pair p = correlated(80, 0.7, 6);
    const Matrix Kx = gram(KernelSpec::gaussian(1.0), p.X), Ky = gram(KernelSpec::gaussian(1.0), p.Y);
    const CcaModel m = fit_standard_kcca(Kx, Ky, 1e-2, 1);
    const Projection pr = project_raw(m, Kx, Kx, Ky, Ky);
    CHECK(pr.correlation_defined);
    CHECK(pr.correlations(0) >= m.rho(0) - 1e-12);
  }

  TEST_CASE("permuting subjects leaves rho unchanged") {
    const Pair p = correlated(30, 0.5, 7);
    Eigen::PermutationMatrix<Eigen::Dynamic> P(30);
    P.setIdentity();
    for (Index i = 0; i < 30; i += 3) std::swap(P.indices()(i), P.indices()(29 - i));
    const KernelSpec k = KernelSpec::gaussian(1.1);
    const CcaModel a = fit_standard_kcca(gram(k, p.X), gram(k, p.Y), 1e-4, 2);
    const CcaModel b = fit_standard_kcca(gram(k, P * p.X), gram(k, P * p.Y), 1e-4, 2);
    CHECK((a.rho - b.rho).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("quadratic robust pipeline equals standard") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Pair p = correlated(40 + static_cast<Index>(s) * 10, 0.6, s);
      const Matrix Kx = gram(KernelSpec::gaussian(1.0), p.X), Ky = gram(KernelSpec::gaussian(1.0), p.Y);
      const CcaModel a = fit_standard_kcca(Kx, Ky, 1e-5, 2);
      const CcaModel b = fit_robust_kcca(Kx, Ky, LossConfig::quadratic(), 1e-5, 2);
      CHECK((a.rho - b.rho).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((b.weights.w_xy - uniform_weights(Kx.rows())).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("robust fit with shared weights stays within [0, 1]") {
    Pair p = correlated(60, 0.8, 8);
    p.X.row(0) << 15, 15;
    p.Y.row(0) << -15, 10;
    const Matrix Kx = gram(KernelSpec::gaussian(1.0), p.X), Ky = gram(KernelSpec::gaussian(1.0), p.Y);
    const CcaModel m = fit_robust_kcca(Kx, Ky, LossConfig::huber_median());
    CHECK(m.robust);
    CHECK(m.max_raw_rho <= 1.0 + 1e-8);
    CHECK(m.iterations.size() == 3);
    RobustKccaOptions sep;
    sep.weighting = RobustWeighting::Separate;
    const CcaModel s = fit_robust_kcca(Kx, Ky, LossConfig::huber_median(), sep);
    CHECK(s.iterations.size() == 5);
    CHECK(s.rho(0) <= 1.0);
  }

  TEST_CASE("printed inner exponent is a separate mode") {
    const Pair p = correlated(40, 0.6, 9);
    const Matrix Kx = gram(KernelSpec::gaussian(1.0), p.X), Ky = gram(KernelSpec::gaussian(1.0), p.Y);
    KccaOptions o;
    o.inner = InnerExponent::Printed;
    o.kappa = 1e-2;
    const CcaModel m = fit_weighted(Kx, Ky, CcaWeights::uniform(40), o);
    CHECK(m.inner == InnerExponent::Printed);
    CHECK(std::isfinite(m.rho(0)));
  }

  TEST_CASE("contract violations") {
    const Matrix K = gram(KernelSpec::linear(), normals(10, 1, 1));
    CHECK_THROWS_AS(fit_standard_kcca(K, K, 1e-5, 2), ContractError);  // centered rank 1
    CHECK_THROWS_AS(fit_standard_kcca(K, K, 0.0, 1), ContractError);
    CHECK_THROWS_AS(fit_standard_kcca(K, Matrix::Identity(9, 9), 1e-5, 1), ContractError);
  }

  TEST_CASE("pearson edge cases") {
    Vector a(3), b(3);
    a << 1, 2, 3;
    b << 2, 4, 6.5;
    CHECK(pearson(a, b) > 0.99);
    CHECK(std::isnan(pearson(a, Vector::Constant(3, 1.0))));
    CHECK(std::isnan(pearson(a.head(1), b.head(1))));
  }
}
