#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace intimacy {

// Pearson's r, the shared-task metric. Throws ValidationError on length
// mismatch or n < 2 and UndefinedStatError when either vector has zero
// variance (degenerate runs stay visible instead of scoring 0).
double pearson_r(std::span<const double> x, std::span<const double> y);

// nullopt when the group statistic is undefined (n < 2 or zero variance).
std::optional<double> pearson_r_or_undefined(std::span<const double> x,
                                             std::span<const double> y);

struct KdeGrid {
  double lo;
  double hi;
  std::size_t points;
};

// Gaussian kernel density estimate sampled on a uniform grid. bandwidth
// nullopt selects Scott's rule, n^(-1/5) * stddev.
std::vector<std::pair<double, double>> kde_curve(
    std::span<const double> scores, std::optional<double> bandwidth,
    const KdeGrid& grid);

double scott_bandwidth(std::span<const double> scores);

}  // namespace intimacy
