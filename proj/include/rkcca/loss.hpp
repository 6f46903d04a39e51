#pragma once

#include <span>
#include <string>
#include <vector>

namespace rkcca {

enum class LossFamily { Quadratic, Huber, Hampel, Tukey };

std::string to_string(LossFamily family);
LossFamily parse_loss_family(const std::string& name);

/// A robust loss zeta(t) on t >= 0 together with its derivative, the IRLS
/// weight phi(t) = zeta'(t) / t and the majorizing quadratic surrogate.
///
/// Constants: Huber {c}, Hampel {c1 < c2 < c3}, Tukey {c}, Quadratic {}.
/// phi(0) is the right limit of zeta'(t) / t: 1 for Quadratic, Huber and
/// Hampel, 6 / c^2 for Tukey.
class RobustLoss {
 public:
  static RobustLoss quadratic();
  static RobustLoss huber(double c);
  static RobustLoss hampel(double c1, double c2, double c3);
  static RobustLoss tukey(double c);
  /// Validating constructor used by the config/CLI layer.
  static RobustLoss make(LossFamily family, std::span<const double> constants);

  LossFamily family() const noexcept { return family_; }
  const std::vector<double>& constants() const noexcept { return constants_; }

  double zeta(double t) const;
  double zeta_prime(double t) const;
  double phi(double t) const;
  /// Derivative of zeta'(t).
  double zeta_second(double t) const;
  /// q(t) = t psi'(t) - psi(t) with psi = zeta'.
  double q(double t) const;
  /// q(t) / t^3, with its finite right limit at 0.
  double q_over_cube(double t) const;

  /// p(t; c) = zeta(c) - c zeta'(c) / 2 + phi(c) t^2 / 2.
  ///
  /// Majorizes zeta whenever phi is non-increasing and touches it at t = c.
  double surrogate(double t, double anchor) const;

  /// Supremum of zeta' over t >= 0 (infinity for Quadratic).
  double zeta_prime_bound() const;

  std::string describe() const;

 private:
  RobustLoss(LossFamily family, std::vector<double> constants);

  LossFamily family_;
  std::vector<double> constants_;
};

/// Loss configuration with an optional median rule: when `median_scaled`
/// is set, `constants` are multipliers applied to the median of the
/// initial residuals (Huber default: c = 1 x median).
struct LossConfig {
  LossFamily family = LossFamily::Huber;
  std::vector<double> constants{1.0};
  bool median_scaled = true;

  static LossConfig quadratic() { return {LossFamily::Quadratic, {}, false}; }
  static LossConfig huber_median() { return {LossFamily::Huber, {1.0}, true}; }
  static LossConfig fixed(const RobustLoss& loss) {
    return {loss.family(), loss.constants(), false};
  }
};

/// Resolves a configuration against the residuals of the initial
/// (uniform-weight) estimate. The resulting loss is frozen for the run.
RobustLoss calibrate(const LossConfig& config, std::span<const double> initial_residuals);

}  // namespace rkcca
