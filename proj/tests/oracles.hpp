#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the estimator or simulator implementations.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace pathgauge::testutil {

// Published SD tables (Mbps) over the n grid 5,10,20,...,100,200.
inline const std::vector<int> kSdGrid = {5, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 200};
inline const std::vector<double> kTable1Sd = {49.3, 34.7, 24.3, 19.8, 18.3, 16.0,
                                              14.4, 13.1, 12.1, 11.2, 10.5, 7.2};
inline const std::vector<double> kTable2Sd = {7.5, 5.3, 3.7, 3.1, 2.7, 2.5,
                                              2.4, 2.2, 2.1, 2.0, 1.9, 1.3};
inline constexpr double kTable1MeanMbps = 27.4;
inline constexpr double kTable2MeanMbps = 27.8;

// Published relative error tables (%) over 5,10,20,30,50,100,200.
inline const std::vector<int> kEtaGrid = {5, 10, 20, 30, 50, 100, 200};
inline const std::vector<double> kTable3Eta = {82.6, 61.1, 44.2, 35.5, 24.4, 13.9, 9.4};
inline const std::vector<double> kTable4Eta = {54.0, 40.0, 28.9, 23.2, 16.0, 9.1, 6.1};

// Naive windowed estimate: delta_w / mean(window) for every window start.
// Non-positive means yield nullopt.
inline std::vector<std::optional<double>> naive_window_estimates(
    const std::vector<double>& delta_d, double delta_w, std::size_t n, std::size_t stride) {
  std::vector<std::optional<double>> out;
  for (std::size_t start = 0; start + n <= delta_d.size(); start += stride) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += delta_d[start + i];
    const double mean = s / static_cast<double>(n);
    out.push_back(mean > 0.0 ? std::optional(delta_w / mean) : std::nullopt);
  }
  return out;
}

inline double population_sd(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

// Brute-force 2-sigma rule: scan all rows, keep the smallest qualifying n.
inline std::optional<int> brute_force_2sigma(const std::vector<int>& grid,
                                             const std::vector<double>& sd,
                                             double mean_mbps) {
  std::optional<int> best;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (mean_mbps >= 2.0 * sd[i] && (!best || grid[i] < *best)) best = grid[i];
  return best;
}

// Ordinary least-squares slope of y on x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

inline double log_log_slope(const std::vector<int>& n, const std::vector<double>& v) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < n.size(); ++i) {
    x.push_back(std::log(static_cast<double>(n[i])));
    y.push_back(std::log(v[i]));
  }
  return ols_slope(x, y);
}

// First-order propagation: var(mean_large - mean_small) = 2 / (n lambda^2).
inline double delta_method_eta_percent(int n, double lambda, double delta_d) {
  return 100.0 * std::sqrt(2.0 / n) / lambda / delta_d;
}

// Exponential moments via std::mt19937_64 + std::exponential_distribution,
// a generator unrelated to the one under test.
inline std::pair<double, double> std_exponential_moments(double rate, std::size_t draws,
                                                         std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> dist(rate);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double x = dist(gen);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / static_cast<double>(draws);
  return {mean, sumsq / static_cast<double>(draws) - mean * mean};
}

}  // namespace pathgauge::testutil
