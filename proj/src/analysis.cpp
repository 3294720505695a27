/*
 * Copyright 2026 The sparsefed Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "sparsefed/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparsefed {

PowerLawFit fit_power_law(std::span<const double> degrees, double x_min) {
  if (x_min <= 0.0) throw std::invalid_argument("x_min must be > 0");
  std::size_t n = 0;
  double log_sum = 0.0;
  double lo = 0.0, hi = 0.0;
  for (double x : degrees) {
    if (x < x_min) continue;
    if (n == 0) lo = hi = x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    ++n;
    log_sum += std::log(x / x_min);
  }
  if (n < 10)
    throw std::runtime_error("power-law fit needs at least 10 samples >= x_min");
  if (lo == hi || log_sum <= 0.0)
    throw std::runtime_error("degenerate degrees: exponent undefined");
  PowerLawFit fit;
  fit.x_min = x_min;
  fit.exponent = 1.0 + static_cast<double>(n) / log_sum;
  fit.normalization = (fit.exponent - 1.0) * std::pow(x_min, fit.exponent - 1.0);
  return fit;
}

PowerLawFit fit_power_law(std::span<const std::uint32_t> degrees, double x_min) {
  std::vector<double> as_double(degrees.begin(), degrees.end());
  return fit_power_law(std::span<const double>(as_double), x_min);
}

double predicted_breakdown_fraction(const PowerLawFit& fit,
                                    const BreakdownQuery& query) {
  if (query.breakdown_point <= 0.0 || query.breakdown_point > 0.5)
    throw std::invalid_argument("breakdown point must be in (0, 0.5]");
  if (query.malicious_count == 0) return 0.0;
  double threshold = (1.0 - query.breakdown_point) / query.breakdown_point *
                     static_cast<double>(query.malicious_count);
  double tail = fit.normalization / (fit.exponent - 1.0) *
                std::pow(threshold, 1.0 - fit.exponent);
  return std::clamp(1.0 - tail, 0.0, 1.0);
}

double empirical_breakdown_fraction(std::span<const double> degrees,
                                    const BreakdownQuery& query) {
  if (degrees.empty()) throw std::invalid_argument("degrees must be nonempty");
  double threshold = (1.0 - query.breakdown_point) / query.breakdown_point *
                     static_cast<double>(query.malicious_count);
  std::size_t below = 0;
  for (double d : degrees)
    if (d < threshold) ++below;
  return static_cast<double>(below) / static_cast<double>(degrees.size());
}

double empirical_breakdown_fraction(std::span<const std::uint32_t> degrees,
                                    const BreakdownQuery& query) {
  std::vector<double> as_double(degrees.begin(), degrees.end());
  return empirical_breakdown_fraction(std::span<const double>(as_double), query);
}

}  // namespace sparsefed
