#include "rkcca/error.hpp"
#include "rkcca/loss.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace rkcca;

namespace {

// Textbook definitions, written independently of the library.
double huber_ref(double t, double c) { return t <= c ? 0.5 * t * t : c * t - 0.5 * c * c; }

double hampel_ref(double t, double a, double b, double r) {
  if (t <= a) return 0.5 * t * t;
  if (t <= b) return a * t - 0.5 * a * a;
  const double top = 0.5 * a * (b + r - a);
  if (t <= r) return top - 0.5 * a * (r - t) * (r - t) / (r - b);
  return top;
}

// Biweight in its dimensionless form, saturating at 1.
double tukey_ref(double t, double c) {
  if (t >= c) return 1.0;
  const double u = 1.0 - (t / c) * (t / c);
  return 1.0 - u * u * u;
}

std::vector<RobustLoss> all_losses() {
  return {RobustLoss::quadratic(), RobustLoss::huber(1.3), RobustLoss::hampel(0.7, 1.5, 3.2),
          RobustLoss::tukey(2.1)};
}

}  // namespace

TEST_SUITE("loss") {
  TEST_CASE("values match textbook formulas") {
    const RobustLoss h = RobustLoss::huber(1.3), hp = RobustLoss::hampel(0.7, 1.5, 3.2), tk = RobustLoss::tukey(2.1);
    for (double t = 0.0; t <= 6.0; t += 0.05) {
      CHECK(h.zeta(t) == doctest::Approx(huber_ref(t, 1.3)).epsilon(1e-13));
      CHECK(hp.zeta(t) == doctest::Approx(hampel_ref(t, 0.7, 1.5, 3.2)).epsilon(1e-13));
      CHECK(tk.zeta(t) == doctest::Approx(tukey_ref(t, 2.1)).epsilon(1e-13));
      CHECK(RobustLoss::quadratic().zeta(t) == doctest::Approx(0.5 * t * t));
    }
  }

  TEST_CASE("derivatives agree with central differences") {
    for (const auto& loss : all_losses()) {
      for (double t = 0.11; t < 5.0; t += 0.173) {
        const double h = 1e-6;
        const double d1 = (loss.zeta(t + h) - loss.zeta(t - h)) / (2 * h);
        CHECK(loss.zeta_prime(t) == doctest::Approx(d1).epsilon(1e-6));
        CHECK(loss.phi(t) == doctest::Approx(loss.zeta_prime(t) / t).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("phi at zero is the right limit") {
    CHECK(RobustLoss::quadratic().phi(0.0) == 1.0);
    CHECK(RobustLoss::huber(0.5).phi(0.0) == 1.0);
    CHECK(RobustLoss::hampel(1, 2, 3).phi(0.0) == 1.0);
    CHECK(RobustLoss::tukey(2.0).phi(0.0) == doctest::Approx(6.0 / 4.0));
    CHECK(RobustLoss::tukey(2.0).phi(1e-9) == doctest::Approx(RobustLoss::tukey(2.0).phi(0.0)));
  }

  TEST_CASE("phi is non-increasing") {
    for (const auto& loss : all_losses()) {
      double prev = loss.phi(0.0);
      for (double t = 0.01; t < 8.0; t += 0.01) {
        const double p = loss.phi(t);
        CHECK(p <= prev + 1e-15);
        CHECK(p >= 0.0);
        prev = p;
      }
    }
  }

  TEST_CASE("q(t) = t zeta'' - zeta' and its cubic scaling") {
    const RobustLoss h = RobustLoss::huber(1.0);
    CHECK(h.q(0.5) == doctest::Approx(0.0));
    CHECK(h.q(2.0) == doctest::Approx(-1.0));
    CHECK(h.q_over_cube(2.0) == doctest::Approx(-1.0 / 8.0));
    const RobustLoss tk = RobustLoss::tukey(2.0);
    for (double t = 0.2; t < 3.0; t += 0.3) CHECK(tk.q_over_cube(t) * t * t * t == doctest::Approx(tk.q(t)).epsilon(1e-12));
  }

  TEST_CASE("surrogate touches at the anchor and majorizes") {
    for (const auto& loss : all_losses()) {
      for (double c = 0.05; c < 5.0; c += 0.37) {
        CHECK(std::abs(loss.surrogate(c, c) - loss.zeta(c)) <= 1e-12);
        for (double t = 0.0; t < 8.0; t += 0.13) CHECK(loss.surrogate(t, c) >= loss.zeta(t) - 1e-12);
      }
    }
  }

  TEST_CASE("domain and constant validation") {
    CHECK_THROWS_AS(RobustLoss::huber(1.0).zeta(-0.1), DomainError);
    CHECK_THROWS_AS(RobustLoss::huber(1.0).zeta(std::nan("")), DomainError);
    CHECK_THROWS_AS(RobustLoss::huber(0.0), InputError);
    CHECK_THROWS_AS(RobustLoss::hampel(2, 1, 3), InputError);
    CHECK_THROWS_AS(RobustLoss::tukey(-1.0), InputError);
    CHECK_THROWS_AS(parse_loss_family("cauchy"), InputError);
    CHECK(parse_loss_family("hampel") == LossFamily::Hampel);
  }

  TEST_CASE("median rule scales the multipliers") {
    const std::vector<double> r{0.5, 1.0, 2.0, 4.0, 9.0};
    const RobustLoss l = calibrate(LossConfig::huber_median(), r);
    CHECK(l.constants()[0] == doctest::Approx(2.0));
    LossConfig hp{LossFamily::Hampel, {1.0, 2.0, 3.0}, true};
    const RobustLoss lh = calibrate(hp, r);
    CHECK(lh.constants()[2] == doctest::Approx(6.0));
    const RobustLoss fixed = calibrate(LossConfig::fixed(RobustLoss::huber(0.7)), r);
    CHECK(fixed.constants()[0] == 0.7);
  }

  TEST_CASE("median rule falls back when residuals vanish") {
    const std::vector<double> zeros(4, 0.0);
    CHECK(calibrate(LossConfig::huber_median(), zeros).constants()[0] == 1.0);
    const std::vector<double> mostly{0.0, 0.0, 0.0, 4.0};
    CHECK(calibrate(LossConfig::huber_median(), mostly).constants()[0] == doctest::Approx(1.0));
  }
}
