#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pathgauge/model.hpp"

namespace pathgauge::estimator {

// Same n grid as the published SD tables.
inline const std::vector<int> kDefaultNGrid = {5,  10, 20, 30, 40,  50,
                                               60, 70, 80, 90, 100, 200};

struct PairingPolicy {
  enum class Mode { kAdjacentSequence, kNearestSendTime };

  Mode mode = Mode::kAdjacentSequence;
  double max_gap = 0.0;  // seconds; only for kNearestSendTime

  static PairingPolicy adjacent() { return {}; }
  static PairingPolicy nearest_send_time(double max_gap) {
    return {Mode::kNearestSendTime, max_gap};
  }
};

struct PairingResult {
  std::vector<PacketPairSample> pairs;
  std::size_t unpaired_small = 0;
  std::size_t unpaired_large = 0;
};

// Matches small-packet records with large-packet records of the same path.
// Both inputs are expected sorted by send_time. Each record is used at most
// once. Throws Error(kDirectionMismatch) if the streams mix paths.
PairingResult pair_samples(std::span<const DelayRecord> small_stream,
                           std::span<const DelayRecord> large_stream,
                           const PairingPolicy& policy = PairingPolicy::adjacent());

struct WindowSpec {
  std::size_t n = 1;
  std::size_t stride = 1;

  static WindowSpec disjoint(std::size_t n) { return {n, n}; }
};

struct WindowedEstimates {
  std::vector<BandwidthEstimate> estimates;
  // Start offsets of windows whose mean delay difference was not positive.
  std::vector<std::size_t> skipped_windows;
};

// Averages delta_d over each window of n consecutive pairs and applies
// B = delta_w / mean(delta_d). Only full windows are produced.
WindowedEstimates estimate_bandwidth(std::span<const PacketPairSample> pairs,
                                     const WindowSpec& window);

// Population SD (Mbps) of disjoint-window estimates for each n.
// mean_bandwidth is the mean estimate at the largest n.
ErrorTable sd_vs_n(std::span<const PacketPairSample> pairs,
                   std::span<const int> n_values);

// Smallest tabulated n with mean_bandwidth >= 2 sigma_n(B).
std::optional<int> required_n_2sigma(const ErrorTable& table,
                                     double mean_bandwidth_bps);

struct AsymmetryReport {
  struct Ratio {
    int n;
    double ratio;  // sigma_a / sigma_b
  };
  std::vector<Ratio> ratio_per_n;
  double geometric_mean = 1.0;
  double threshold = 1.5;
  bool asymmetric = false;
  std::string summary;
};

inline constexpr double kDefaultAsymmetryThreshold = 1.5;

AsymmetryReport compare_directions(
    const ErrorTable& a, const ErrorTable& b,
    double threshold = kDefaultAsymmetryThreshold);

// Largest bandwidth (bit/s) at which a timestamp quantum of clock_precision
// seconds keeps the relative error of the delay difference within
// target_relative_error: eta * delta_w / clock_precision.
double max_measurable_bandwidth(double clock_precision,
                                double target_relative_error,
                                double delta_w_bits);

}  // namespace pathgauge::estimator
