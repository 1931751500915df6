#pragma once

#include <span>
#include <vector>

namespace compprobe {

// 1-based ranks; tied values share the mean of the ranks they occupy.
std::vector<double> average_ranks(std::span<const double> values);

double pearson(std::span<const double> x, std::span<const double> y);

// Pearson correlation of average ranks. Needs equal lengths >= 3; a constant
// input throws UndefinedStatisticError.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace compprobe
