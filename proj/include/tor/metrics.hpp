#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace tor {

// Fraction of predictions differing from the truth.
inline double mean_zero_one(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw std::invalid_argument("mean_zero_one: need equal nonempty label lists");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] != truth[i]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(pred.size());
}

// Mean |pred - truth| over the rank scale.
inline double mean_absolute(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw std::invalid_argument("mean_absolute: need equal nonempty label lists");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    sum += std::abs(pred[i] - truth[i]);
  return sum / static_cast<double>(pred.size());
}

}  // namespace tor
