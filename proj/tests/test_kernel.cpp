#include "rkcca/error.hpp"
#include "rkcca/kernel.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace rkcca;
using namespace rkcca::testing;

TEST_SUITE("kernel") {
  TEST_CASE("kernel values by hand") {
    Vector a(2), b(2);
    a << 1.0, 2.0;
    b << -1.0, 0.5;
    CHECK(kernel_value(KernelSpec::linear(), a, b) == doctest::Approx(0.0));
    CHECK(kernel_value(KernelSpec::polynomial(2), a, b) == doctest::Approx(1.0));
    CHECK(kernel_value(KernelSpec::polynomial(3, 2.0), a, b) == doctest::Approx(8.0));
    CHECK(kernel_value(KernelSpec::gaussian(1.5), a, b) == doctest::Approx(std::exp(-6.25 / 4.5)));
    CHECK(kernel_value(KernelSpec::laplacian(2.0), a, b) == doctest::Approx(std::exp(-3.5 / 2.0)));
    CHECK(kernel_value(KernelSpec::laplacian(2.0, Metric::L2), a, b) == doctest::Approx(std::exp(-2.5 / 2.0)));
  }

  TEST_CASE("median bandwidth enumerates all pairs") {
    Matrix X(3, 1);
    X << 0.0, 1.0, 3.0;
    CHECK(median_bandwidth(X) == doctest::Approx(2.0));
    Matrix Y(4, 1);
    Y << 0.0, 0.0, 1.0, 5.0;  // distances {1,1,4,5,5} after dropping the duplicate pair
    CHECK(median_bandwidth(Y) == doctest::Approx(4.0));
    Matrix Z(4, 1);
    Z << 0.0, 1.0, 2.0, 4.0;  // {1,1,2,2,3,4}: lower median
    CHECK(median_bandwidth(Z) == doctest::Approx(2.0));
    CHECK_THROWS_AS(median_bandwidth(Matrix::Zero(3, 2)), DegenerateDataError);
  }

  TEST_CASE("resolve replaces the median bandwidth") {
    const Matrix X = normals(20, 3, 1);
    const KernelSpec k = resolve(KernelSpec::gaussian_median(), X);
    CHECK_FALSE(k.median_bandwidth);
    CHECK(k.bandwidth == doctest::Approx(median_bandwidth(X)));
    CHECK(resolve(KernelSpec::laplacian(1.0), X).bandwidth == 1.0);
  }

  TEST_CASE("gram is symmetric and matches cross_gram") {
    const Matrix X = normals(15, 4, 2);
    for (const char* s : {"linear", "poly:3", "gaussian:0.8", "laplacian:1"}) {
      const KernelSpec k = KernelSpec::parse(s);
      const Matrix K = gram(k, X);
      CHECK((K - K.transpose()).norm() == 0.0);
      CHECK((K - cross_gram(k, X, X)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("spec strings round-trip") {
    for (const char* s : {"linear", "poly:2", "poly:3:0.5", "gaussian:median", "gaussian:0.25", "laplacian:1",
                          "laplacian:2.5:l2"}) {
      CHECK(KernelSpec::parse(s).to_string() == s);
    }
    const KernelSpec odd = KernelSpec::gaussian(0.1 + 0.2);
    CHECK(KernelSpec::parse(odd.to_string()).bandwidth == odd.bandwidth);
    CHECK_THROWS_AS(KernelSpec::parse("poly:2.5"), InputError);
    CHECK_THROWS_AS(KernelSpec::parse("gaussian:-1"), InputError);
    CHECK_THROWS_AS(KernelSpec::parse("sigmoid"), InputError);
  }

  TEST_CASE("weighted centering matches the explicit projector") {
    const Matrix X = normals(12, 2, 3);
    const Matrix K = gram(KernelSpec::gaussian(1.0), X);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Vector w = simplex(12, s);
      const WeightedCenteredGram c = center(K, w);
      CHECK((c.centered - center_explicit(K, w)).cwiseAbs().maxCoeff() < 1e-12);
      // the weighted mean of the centered features is zero
      CHECK((c.centered * w).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("test centering reproduces training rows") {
    const Matrix X = normals(10, 3, 4);
    const KernelSpec k = KernelSpec::gaussian(1.2);
    const Matrix K = gram(k, X);
    const Vector w = simplex(10, 9);
    const Matrix Kc = center(K, w).centered;
    CHECK((center_test(K, K, w) - Kc).cwiseAbs().maxCoeff() < 1e-12);
    const Vector self = K.diagonal();
    CHECK((center_test_diagonal(self, K, K, w) - Kc.diagonal()).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("input checks") {
    CHECK_THROWS_AS(check_simplex(Vector::Constant(3, 0.5)), ContractError);
    Vector neg(2);
    neg << 1.5, -0.5;
    CHECK_THROWS_AS(check_simplex(neg), ContractError);
    Matrix bad = normals(4, 2, 1);
    bad(1, 1) = std::nan("");
    CHECK_THROWS_AS(gram(KernelSpec::linear(), bad), InputError);
  }
}
