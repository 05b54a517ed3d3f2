#include "pathgauge/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "pathgauge/error.hpp"

namespace pathgauge::estimator {

namespace {

void check_direction(std::span<const DelayRecord> records, const Direction& d) {
  for (const auto& r : records)
    if (r.direction != d)
      throw Error(ErrorCode::kDirectionMismatch,
                  "stream mixes paths " + d.label() + " and " + r.direction.label());
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

}  // namespace

PairingResult pair_samples(std::span<const DelayRecord> small_stream,
                           std::span<const DelayRecord> large_stream,
                           const PairingPolicy& policy) {
  PairingResult out;
  if (!small_stream.empty() && !large_stream.empty()) {
    const Direction& dir = small_stream.front().direction;
    check_direction(small_stream, dir);
    check_direction(large_stream, dir);
  }

  if (policy.mode == PairingPolicy::Mode::kAdjacentSequence) {
    const std::size_t k = std::min(small_stream.size(), large_stream.size());
    out.pairs.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
      out.pairs.emplace_back(small_stream[i], large_stream[i]);
    out.unpaired_small = small_stream.size() - k;
    out.unpaired_large = large_stream.size() - k;
    return out;
  }

  if (!(policy.max_gap > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "pairing max_gap must be positive");

  // Greedy: each small record, in send order, takes the nearest unused large
  // record within max_gap. Ties go to the earlier large record.
  std::multimap<double, std::size_t> unused;
  for (std::size_t i = 0; i < large_stream.size(); ++i)
    unused.emplace(large_stream[i].send_time, i);

  for (const auto& s : small_stream) {
    auto best = unused.end();
    double best_gap = std::numeric_limits<double>::infinity();
    auto hi = unused.lower_bound(s.send_time);
    if (hi != unused.begin()) {
      auto lo = std::prev(hi);
      // Earliest entry sharing lo's key.
      lo = unused.lower_bound(lo->first);
      best = lo;
      best_gap = s.send_time - lo->first;
    }
    if (hi != unused.end() && hi->first - s.send_time < best_gap) {
      best = hi;
      best_gap = hi->first - s.send_time;
    }
    if (best == unused.end() || best_gap > policy.max_gap) {
      ++out.unpaired_small;
      continue;
    }
    out.pairs.emplace_back(s, large_stream[best->second]);
    unused.erase(best);
  }
  out.unpaired_large = unused.size();
  return out;
}

WindowedEstimates estimate_bandwidth(std::span<const PacketPairSample> pairs,
                                     const WindowSpec& window) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyInput, "no packet pairs to estimate from");
  if (window.n < 1 || window.stride < 1)
    throw Error(ErrorCode::kInvalidArgument, "window n and stride must be >= 1");
  const std::uint64_t delta_w = pairs.front().delta_w();
  for (const auto& p : pairs)
    if (p.delta_w() != delta_w)
      throw Error(ErrorCode::kInconsistentDeltaW,
                  "pairs mix packet size differences; estimate each size pair separately");

  WindowedEstimates out;
  if (pairs.size() < window.n) return out;
  const std::size_t count = (pairs.size() - window.n) / window.stride + 1;
  std::vector<double> means(count);

  const auto total = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t w = 0; w < total; ++w) {
    const std::size_t start = static_cast<std::size_t>(w) * window.stride;
    double sum = 0.0;
    for (std::size_t i = start; i < start + window.n; ++i) sum += pairs[i].delta_d();
    means[static_cast<std::size_t>(w)] = sum / static_cast<double>(window.n);
  }

  const Direction& dir = pairs.front().small().direction;
  out.estimates.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t start = w * window.stride;
    if (!(means[w] > 0.0)) {
      out.skipped_windows.push_back(start);
      continue;
    }
    out.estimates.push_back(BandwidthEstimate{
        static_cast<double>(delta_w) / means[w], start, window.n, means[w], dir});
  }
  return out;
}

ErrorTable sd_vs_n(std::span<const PacketPairSample> pairs,
                   std::span<const int> n_values) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyInput, "no packet pairs");
  if (n_values.empty()) throw Error(ErrorCode::kInvalidArgument, "empty n grid");
  std::vector<int> grid(n_values.begin(), n_values.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.front() < 1) throw Error(ErrorCode::kInvalidArgument, "n values must be >= 1");
  if (static_cast<std::size_t>(grid.back()) > pairs.size())
    throw Error(ErrorCode::kInsufficientData,
                "n=" + std::to_string(grid.back()) + " needs that many pairs, only " +
                    std::to_string(pairs.size()) + " available");

  std::vector<ErrorRow> rows;
  double mean_at_largest = 0.0;
  for (int n : grid) {
    auto windowed = estimate_bandwidth(pairs, WindowSpec::disjoint(static_cast<std::size_t>(n)));
    const auto& est = windowed.estimates;
    if (est.empty())
      throw Error(ErrorCode::kInsufficientData,
                  "no window with a positive mean delay difference at n=" + std::to_string(n));
    double mean = 0.0;
    for (const auto& e : est) mean += e.value;
    mean /= static_cast<double>(est.size());
    double ss = 0.0;
    for (const auto& e : est) ss += (e.value - mean) * (e.value - mean);
    rows.push_back({n, std::sqrt(ss / static_cast<double>(est.size())) / 1e6});
    mean_at_largest = mean;
  }
  return ErrorTable(TableKind::kSdMbps, std::move(rows), mean_at_largest);
}

std::optional<int> required_n_2sigma(const ErrorTable& table, double mean_bandwidth_bps) {
  if (table.kind() != TableKind::kSdMbps)
    throw Error(ErrorCode::kWrongTableKind, "2-sigma rule needs an sd_mbps table");
  if (table.rows().empty()) throw Error(ErrorCode::kEmptyInput, "empty SD table");
  const double mean_mbps = mean_bandwidth_bps / 1e6;
  for (const auto& row : table.rows())
    if (mean_mbps >= 2.0 * row.value) return row.n;
  return std::nullopt;
}

AsymmetryReport compare_directions(const ErrorTable& a, const ErrorTable& b,
                                   double threshold) {
  if (a.kind() != b.kind())
    throw Error(ErrorCode::kWrongTableKind, "cannot compare tables of different kinds");
  if (a.n_grid() != b.n_grid())
    throw Error(ErrorCode::kGridMismatch, "tables have different n grids");
  if (a.rows().empty()) throw Error(ErrorCode::kEmptyInput, "empty tables");
  if (!(threshold >= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "asymmetry threshold must be >= 1");

  AsymmetryReport out;
  out.threshold = threshold;
  double log_sum = 0.0;
  for (std::size_t i = 0; i < a.rows().size(); ++i) {
    const double x = a.rows()[i].value;
    const double y = b.rows()[i].value;
    double ratio = 1.0;
    if (y > 0.0) ratio = x / y;
    else if (x > 0.0) ratio = std::numeric_limits<double>::infinity();
    out.ratio_per_n.push_back({a.rows()[i].n, ratio});
    log_sum += std::log(ratio);
  }
  out.geometric_mean = std::exp(log_sum / static_cast<double>(out.ratio_per_n.size()));
  out.asymmetric = out.geometric_mean > threshold || out.geometric_mean < 1.0 / threshold;
  if (!out.asymmetric)
    out.summary = fmt("symmetric: geometric-mean SD ratio %.3g within %.3gx", out.geometric_mean, threshold);
  else if (out.geometric_mean > 1.0)
    out.summary = fmt("asymmetric: first direction varies %.3gx more (threshold %.3gx)", out.geometric_mean, threshold);
  else
    out.summary = fmt("asymmetric: second direction varies %.3gx more (threshold %.3gx)", 1.0 / out.geometric_mean, threshold);
  return out;
}

double max_measurable_bandwidth(double clock_precision, double target_relative_error,
                                double delta_w_bits) {
  if (!(clock_precision > 0.0) || !(target_relative_error > 0.0) || !(delta_w_bits > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "resolution bound inputs must be positive");
  return target_relative_error * delta_w_bits / clock_precision;
}

}  // namespace pathgauge::estimator
