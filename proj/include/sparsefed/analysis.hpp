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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sparsefed {

/// Continuous power-law density C * x^(-beta) on [x_min, inf).
struct PowerLawFit {
  double exponent = 0.0;       // beta > 1
  double normalization = 0.0;  // C = (beta - 1) * x_min^(beta - 1)
  double x_min = 1.0;
};

struct BreakdownQuery {
  double breakdown_point = 0.5;     // alpha of the aggregator
  std::size_t malicious_count = 0;  // colluding clients per item
};

/// Continuous maximum-likelihood fit beta = 1 + N / sum ln(x_i / x_min) over
/// samples >= x_min. Needs >= 10 positive samples and at least one strictly
/// above x_min.
PowerLawFit fit_power_law(std::span<const double> degrees, double x_min = 1.0);
PowerLawFit fit_power_law(std::span<const std::uint32_t> degrees,
                          double x_min = 1.0);

/// Fraction of items whose per-item aggregation the attacker dominates:
/// clamp(1 - C/(beta-1) * (((1-alpha)/alpha) * count)^(1-beta), 0, 1).
/// Zero malicious clients break nothing, bypassing the singular formula.
double predicted_breakdown_fraction(const PowerLawFit& fit,
                                    const BreakdownQuery& query);

/// Fraction of observed degrees strictly below ((1-alpha)/alpha) * count.
double empirical_breakdown_fraction(std::span<const double> degrees,
                                    const BreakdownQuery& query);
double empirical_breakdown_fraction(std::span<const std::uint32_t> degrees,
                                    const BreakdownQuery& query);

}  // namespace sparsefed
