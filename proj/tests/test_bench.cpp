#include "rkcca/bench.hpp"
#include "rkcca/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace rkcca;
using namespace rkcca::testing;

TEST_SUITE("bench") {
  TEST_CASE("aggregate is recomputable and order independent") {
    std::vector<double> v{0.3, 1e-9, 2.5, 0.7, 0.7, 11.0};
    const MetricRun a = make_run(MetricKind::EtaRho, "x", v);
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / 6.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    CHECK(std::abs(a.mean - mean) <= 1e-12);
    CHECK(std::abs(a.sd - std::sqrt(ss / 5.0)) <= 1e-12);
    std::reverse(v.begin(), v.end());
    const MetricRun b = make_run(MetricKind::EtaRho, "x", v);
    CHECK(a.mean == b.mean);
    CHECK(a.sd == b.sd);
    CHECK(make_run(MetricKind::CvGap, "one", {2.0}).sd == 0.0);
  }

  TEST_CASE("population distance is zero when the sample is the population") {
    const Matrix P = normals(12, 2, 1);
    const KernelSpec k = KernelSpec::gaussian(1.0);
    CHECK(eta_population_distance(k, P, uniform_weights(12), P) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(eta_population_distance(k, P, uniform_weights(12), P.topRows(5)), ContractError);
    CHECK_THROWS_AS(eta_population_distance(KernelSpec::gaussian_median(), P, uniform_weights(12), P, gram(k, P)),
                    ContractError);
  }

  TEST_CASE("population distance matches a brute-force tensor expansion (n=3, N=5)") {
    const Matrix S = normals(3, 2, 2), P = normals(5, 2, 3);
    const KernelSpec k = KernelSpec::gaussian(0.8);
    Matrix all(8, 2);
    all << S, P;
    const Matrix F = features(gram(k, all));
    const Vector w = simplex(3, 4);
    Matrix A = Matrix::Zero(F.cols(), F.cols()), B = A;
    for (Index i = 0; i < 3; ++i) A += w(i) * F.row(i).transpose() * F.row(i);
    for (Index i = 0; i < 5; ++i) B += 0.2 * F.row(3 + i).transpose() * F.row(3 + i);
    CHECK(eta_population_distance(k, S, w, P) == doctest::Approx((A - B).squaredNorm()).epsilon(1e-10));
  }

  TEST_CASE("contamination ratio") {
    const Matrix V = normals(4, 4, 5);
    CHECK(eta_contamination_ratio(V, V, NormKind::Frobenius) == 0.0);
    CHECK(eta_contamination_ratio(V, 2.0 * V, NormKind::MaxModulus) == doctest::Approx(0.5));
    CHECK_THROWS_AS(eta_contamination_ratio(V, Matrix::Zero(4, 4), NormKind::Frobenius), DegenerateDataError);
  }

  TEST_CASE("eta_rho and eta_f on hand-built two-subject reports") {
    InfluenceReport a, b;
    a.eif_rho = Vector(2);
    a.eif_rho << 3.0, 4.0;  // norm 5
    b.eif_rho = Vector(2);
    b.eif_rho << 6.0, 8.0;  // norm 10
    a.eif_fx = Matrix::Identity(2, 2);
    a.eif_fy = Matrix::Zero(2, 2);  // ||fx - fy|| = sqrt(2)
    b.eif_fx = 2.0 * Matrix::Identity(2, 2);
    b.eif_fy = -2.0 * Matrix::Identity(2, 2);  // sqrt(32)
    const EtaPair e = eta_rho_and_f(a, b);
    CHECK(e.eta_rho == doctest::Approx(0.5));
    CHECK(e.eta_f == doctest::Approx(1.0 - std::sqrt(2.0) / std::sqrt(32.0)));
    const EtaPair same = eta_rho_and_f(a, a);
    CHECK(same.eta_rho == 0.0);
    CHECK(same.eta_f == 0.0);
  }

  TEST_CASE("parallel_for results do not depend on the thread count") {
    std::vector<double> one(50), many(50);
    auto job = [](std::vector<double>& out) {
      return [&out](int i) { out[static_cast<std::size_t>(i)] = std::sin(i * 0.37) * i; };
    };
    parallel_for(50, 1, job(one));
    parallel_for(50, 4, job(many));
    CHECK(one == many);
    CHECK_THROWS(parallel_for(3, 2, [](int i) {
      if (i == 1) throw InputError("boom");
    }));
  }

  TEST_CASE("cv gap vanishes for identical views") {
    Dataset d;
    d.name = "self";
    d.x = normals(120, 2, 6);
    d.y = d.x;
    CcaSetup s;
    const MetricRun r = cv_correlation_gap(d, Method::Standard, s, 10, 1);
    CHECK(r.replicates() == 10);
    CHECK(r.mean <= 0.05);
    CHECK_THROWS_AS(cv_correlation_gap(d, Method::Standard, s, 100, 1), InputError);
  }

  TEST_CASE("fig4 table is long format") {
    Fig4Config c;
    c.sizes = {15, 30};
    c.replicates = 2;
    const Table t = run_fig4(c);
    CHECK(t.columns == std::vector<std::string>{"N", "n", "estimator", "mean", "sd", "replicates"});
    CHECK(t.rows.size() == 4);
    CHECK(t.rows[0][0] == "1500");
    CHECK(t.rows[1][2] == "rkco");
  }

  TEST_CASE("robust CO estimate with quadratic loss is the standard one") {
    const Matrix K = gram(KernelSpec::gaussian(1.0), normals(20, 2, 7));
    const CoEstimate a = estimate_co(K, false), b = estimate_co(K, true, LossConfig::quadratic());
    CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.centered - b.centered).cwiseAbs().maxCoeff() < 1e-14);
  }
}
