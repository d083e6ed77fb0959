#pragma once

#include <vector>

namespace hysim {

/// Weighted least-squares monotone fit by pool-adjacent-violators.
/// Weights must be positive; an empty weight vector means unit weights.
std::vector<double> isotonic_fit(const std::vector<double>& values,
                                 const std::vector<double>& weights, bool increasing = true);

}  // namespace hysim
