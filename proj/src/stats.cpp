#include "intimacy/stats.hpp"

#include <cmath>
#include <numbers>

#include "intimacy/util.hpp"

namespace intimacy {

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError("pearson_r: length mismatch (" +
                          std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
  }
  const std::size_t n = x.size();
  if (n < 2) throw ValidationError("pearson_r: need at least 2 points");

  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedStatError("pearson_r: zero variance in " +
                             std::string(sxx == 0.0 ? "x" : "y"));
  }
  return sxy / std::sqrt(sxx * syy);
}

std::optional<double> pearson_r_or_undefined(std::span<const double> x,
                                             std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  try {
    return pearson_r(x, y);
  } catch (const UndefinedStatError&) {
    return std::nullopt;
  }
}

double scott_bandwidth(std::span<const double> scores) {
  const std::size_t n = scores.size();
  if (n < 2) throw ValidationError("scott_bandwidth: need at least 2 scores");
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  const double stddev = std::sqrt(ss / static_cast<double>(n - 1));
  if (stddev == 0.0) {
    throw UndefinedStatError(
        "scott_bandwidth: zero variance, pass an explicit bandwidth");
  }
  return std::pow(static_cast<double>(n), -0.2) * stddev;
}

std::vector<std::pair<double, double>> kde_curve(
    std::span<const double> scores, std::optional<double> bandwidth,
    const KdeGrid& grid) {
  if (scores.empty()) throw ValidationError("kde_curve: empty scores");
  const double h = bandwidth ? *bandwidth : scott_bandwidth(scores);
  if (h <= 0.0) throw ValidationError("kde_curve: bandwidth must be positive");
  if (!(grid.lo < grid.hi) || grid.points < 2) {
    throw ValidationError("kde_curve: invalid grid");
  }

  const double norm =
      1.0 / (static_cast<double>(scores.size()) * h *
             std::sqrt(2.0 * std::numbers::pi));
  const double step = (grid.hi - grid.lo) / static_cast<double>(grid.points - 1);

  std::vector<std::pair<double, double>> curve;
  curve.reserve(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double x = grid.lo + step * static_cast<double>(i);
    double density = 0.0;
    for (double s : scores) {
      const double z = (x - s) / h;
      density += std::exp(-0.5 * z * z);
    }
    curve.emplace_back(x, density * norm);
  }
  return curve;
}

}  // namespace intimacy
