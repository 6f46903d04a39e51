#include "rkcca/linalg.hpp"

#include "rkcca/error.hpp"

#include <algorithm>
#include <cmath>

namespace rkcca {

double lower_median(std::vector<double> values) {
  if (values.empty()) throw ContractError("median of an empty sample");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ContractError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double mad(const std::vector<double>& values) {
  const double m = median(values);
  std::vector<double> dev;
  dev.reserve(values.size());
  for (double v : values) dev.push_back(std::abs(v - m));
  return median(std::move(dev));
}

}  // namespace rkcca
