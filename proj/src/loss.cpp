#include "rkcca/loss.hpp"

#include "rkcca/csv.hpp"
#include "rkcca/error.hpp"
#include "rkcca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rkcca {

namespace {

void check_domain(double t) {
  if (!(t >= 0.0)) {
    throw DomainError("robust loss evaluated at negative or NaN argument");
  }
}

}  // namespace

std::string to_string(LossFamily family) {
  switch (family) {
    case LossFamily::Quadratic: return "quadratic";
    case LossFamily::Huber: return "huber";
    case LossFamily::Hampel: return "hampel";
    case LossFamily::Tukey: return "tukey";
  }
  return "unknown";
}

LossFamily parse_loss_family(const std::string& name) {
  if (name == "quadratic") return LossFamily::Quadratic;
  if (name == "huber") return LossFamily::Huber;
  if (name == "hampel") return LossFamily::Hampel;
  if (name == "tukey") return LossFamily::Tukey;
  throw InputError("unknown loss family '" + name + "'");
}

RobustLoss::RobustLoss(LossFamily family, std::vector<double> constants)
    : family_(family), constants_(std::move(constants)) {}

RobustLoss RobustLoss::quadratic() { return RobustLoss(LossFamily::Quadratic, {}); }

RobustLoss RobustLoss::huber(double c) {
  const double cs[] = {c};
  return make(LossFamily::Huber, cs);
}

RobustLoss RobustLoss::hampel(double c1, double c2, double c3) {
  const double cs[] = {c1, c2, c3};
  return make(LossFamily::Hampel, cs);
}

RobustLoss RobustLoss::tukey(double c) {
  const double cs[] = {c};
  return make(LossFamily::Tukey, cs);
}

RobustLoss RobustLoss::make(LossFamily family, std::span<const double> constants) {
  std::size_t expected = 0;
  switch (family) {
    case LossFamily::Quadratic: expected = 0; break;
    case LossFamily::Huber:
    case LossFamily::Tukey: expected = 1; break;
    case LossFamily::Hampel: expected = 3; break;
  }
  if (constants.size() != expected) {
    throw InputError(to_string(family) + " loss expects " + std::to_string(expected) +
                     " constant(s), got " + std::to_string(constants.size()));
  }
  for (double c : constants) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw InputError(to_string(family) + " loss constants must be finite and positive");
    }
  }
  if (family == LossFamily::Hampel && !(constants[0] < constants[1] && constants[1] < constants[2])) {
    throw InputError("hampel loss requires c1 < c2 < c3");
  }
  return RobustLoss(family, std::vector<double>(constants.begin(), constants.end()));
}

double RobustLoss::zeta(double t) const {
  check_domain(t);
  switch (family_) {
    case LossFamily::Quadratic: return 0.5 * t * t;
    case LossFamily::Huber: {
      const double c = constants_[0];
      return t <= c ? 0.5 * t * t : c * t - 0.5 * c * c;
    }
    case LossFamily::Hampel: {
      const double c1 = constants_[0], c2 = constants_[1], c3 = constants_[2];
      const double plateau = 0.5 * c1 * (c2 + c3 - c1);
      if (t <= c1) return 0.5 * t * t;
      if (t < c2) return c1 * t - 0.5 * c1 * c1;
      if (t < c3) {
        const double d = t - c3;
        return -c1 / (2.0 * (c3 - c2)) * d * d + plateau;
      }
      return plateau;
    }
    case LossFamily::Tukey: {
      const double c = constants_[0];
      if (t >= c) return 1.0;
      const double u = t / c;
      const double v = 1.0 - u * u;
      return 1.0 - v * v * v;
    }
  }
  return 0.0;
}

double RobustLoss::zeta_prime(double t) const {
  check_domain(t);
  switch (family_) {
    case LossFamily::Quadratic: return t;
    case LossFamily::Huber: {
      const double c = constants_[0];
      return t <= c ? t : c;
    }
    case LossFamily::Hampel: {
      const double c1 = constants_[0], c2 = constants_[1], c3 = constants_[2];
      if (t <= c1) return t;
      if (t < c2) return c1;
      if (t < c3) return c1 * (c3 - t) / (c3 - c2);
      return 0.0;
    }
    case LossFamily::Tukey: {
      const double c = constants_[0];
      if (t >= c) return 0.0;
      const double u = t / c;
      const double v = 1.0 - u * u;
      return 6.0 * t / (c * c) * v * v;
    }
  }
  return 0.0;
}

double RobustLoss::phi(double t) const {
  check_domain(t);
  switch (family_) {
    case LossFamily::Quadratic: return 1.0;
    case LossFamily::Huber: {
      const double c = constants_[0];
      return t <= c ? 1.0 : c / t;
    }
    case LossFamily::Hampel: {
      const double c1 = constants_[0], c2 = constants_[1], c3 = constants_[2];
      if (t <= c1) return 1.0;
      if (t < c2) return c1 / t;
      if (t < c3) return c1 * (c3 - t) / ((c3 - c2) * t);
      return 0.0;
    }
    case LossFamily::Tukey: {
      const double c = constants_[0];
      if (t >= c) return 0.0;
      const double u = t / c;
      const double v = 1.0 - u * u;
      return 6.0 / (c * c) * v * v;
    }
  }
  return 0.0;
}

double RobustLoss::zeta_second(double t) const {
  check_domain(t);
  switch (family_) {
    case LossFamily::Quadratic: return 1.0;
    case LossFamily::Huber: return t <= constants_[0] ? 1.0 : 0.0;
    case LossFamily::Hampel: {
      const double c1 = constants_[0], c2 = constants_[1], c3 = constants_[2];
      if (t <= c1) return 1.0;
      if (t < c2) return 0.0;
      if (t < c3) return -c1 / (c3 - c2);
      return 0.0;
    }
    case LossFamily::Tukey: {
      const double c = constants_[0];
      if (t >= c) return 0.0;
      const double u = t / c;
      const double v = 1.0 - u * u;
      return 6.0 / (c * c) * v * v - 24.0 * t * t / (c * c * c * c) * v;
    }
  }
  return 0.0;
}

double RobustLoss::q(double t) const {
  check_domain(t);
  return t * zeta_second(t) - zeta_prime(t);
}

double RobustLoss::q_over_cube(double t) const {
  check_domain(t);
  switch (family_) {
    case LossFamily::Quadratic: return 0.0;
    case LossFamily::Huber: {
      const double c = constants_[0];
      return t <= c ? 0.0 : -c / (t * t * t);
    }
    case LossFamily::Hampel: {
      const double c1 = constants_[0], c2 = constants_[1], c3 = constants_[2];
      if (t <= c1 || t >= c3) return 0.0;
      if (t < c2) return -c1 / (t * t * t);
      return -c1 * c3 / ((c3 - c2) * t * t * t);
    }
    case LossFamily::Tukey: {
      const double c = constants_[0];
      if (t >= c) return 0.0;
      const double u = t / c;
      return -24.0 / (c * c * c * c) * (1.0 - u * u);
    }
  }
  return 0.0;
}

double RobustLoss::surrogate(double t, double anchor) const {
  check_domain(t);
  check_domain(anchor);
  return zeta(anchor) - 0.5 * anchor * zeta_prime(anchor) + 0.5 * phi(anchor) * t * t;
}

double RobustLoss::zeta_prime_bound() const {
  switch (family_) {
    case LossFamily::Quadratic: return std::numeric_limits<double>::infinity();
    case LossFamily::Huber: return constants_[0];
    case LossFamily::Hampel: return constants_[0];
    case LossFamily::Tukey: {
      // maximised at t = c / sqrt(5)
      const double c = constants_[0];
      return zeta_prime(c / std::sqrt(5.0));
    }
  }
  return 0.0;
}

std::string RobustLoss::describe() const {
  std::ostringstream os;
  os << to_string(family_);
  for (double c : constants_) os << ':' << format_double(c);
  return os.str();
}

RobustLoss calibrate(const LossConfig& config, std::span<const double> initial_residuals) {
  if (!config.median_scaled || config.family == LossFamily::Quadratic) {
    return RobustLoss::make(config.family, config.constants);
  }
  std::vector<double> r(initial_residuals.begin(), initial_residuals.end());
  double scale = r.empty() ? 0.0 : median(r);
  if (!(scale > 0.0)) {
    // fall back to the mean residual, then to unit scale (all residuals zero)
    const double total = std::accumulate(r.begin(), r.end(), 0.0);
    scale = r.empty() ? 0.0 : total / static_cast<double>(r.size());
    if (!(scale > 0.0)) scale = 1.0;
  }
  std::vector<double> scaled;
  scaled.reserve(config.constants.size());
  for (double m : config.constants) scaled.push_back(m * scale);
  return RobustLoss::make(config.family, scaled);
}

}  // namespace rkcca
