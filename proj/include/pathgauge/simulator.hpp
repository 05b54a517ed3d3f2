#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pathgauge/model.hpp"
#include "pathgauge/rng.hpp"

namespace pathgauge::simulator {

// Delay model: D = d_min + offset(size) + X, X ~ Exponential(lambda).
// The large class is offset by true_delta_d, so
// E[D_large - D_small] = true_delta_d.
enum class SizeClass { kSmall, kLarge };

double gen_delay(Xoshiro256& rng, const SimConfig& cfg, SizeClass size_class);

// How a trial's estimate B is scored against the true bandwidth B*.
enum class ErrorMetric {
  // 100 * RMS(B*/B - 1): relative error on the delay-per-bit scale. Agrees
  // with kRmsDirect to first order and has finite moments.
  kRmsReciprocal,
  // 100 * RMS(B/B* - 1). B has no finite variance under exponential noise,
  // so this does not converge as trials grow.
  kRmsDirect,
  // 100 * mean(|B/B* - 1|).
  kMeanAbsDirect,
};

std::string_view to_string(ErrorMetric metric);
std::optional<ErrorMetric> parse_metric(std::string_view name);

struct SimResult {
  ErrorTable eta_table;
  SimConfig config;
  ErrorMetric metric = ErrorMetric::kRmsReciprocal;
  std::uint64_t trials_used = 0;      // over all n
  std::uint64_t skipped_windows = 0;  // non-positive denominators, over all n
  std::vector<std::uint64_t> skipped_per_n;
};

// Monte Carlo error table. Trial t at window size n draws from the stream
// derive_seed(cfg.rng_seed, n, t), so results are independent of thread
// count and of which other n values are in the grid.
// Throws Error(kAllTrialsSkipped) if every trial at some n is discarded.
SimResult simulate_eta_table(const SimConfig& cfg,
                             ErrorMetric metric = ErrorMetric::kRmsReciprocal);

// Single-threaded reference of simulate_eta_table. Bit-identical output.
SimResult simulate_eta_table_serial(const SimConfig& cfg,
                                    ErrorMetric metric = ErrorMetric::kRmsReciprocal);

struct CorrectionFactors {
  double k_lambda = 1.0;   // lambda_exp / lambda_T
  double k_delta_d = 1.0;  // (D2 - D1)_exp / (D2 - D1)_T

  static CorrectionFactors from_measurements(double lambda_exp, double lambda_t,
                                             double delta_d_exp, double delta_d_t);
  double combined() const { return k_lambda * k_delta_d; }
  void validate() const;
};

// eta_exp(n) = eta_T(n) / (k_delta_d * k_lambda).
ErrorTable apply_correction(const ErrorTable& eta_t, const CorrectionFactors& k);

struct RequiredN {
  int n = 0;  // smallest tabulated n meeting the target
  // When interpolating, the log n / log eta crossing between the two
  // bracketing rows, rounded up.
  std::optional<int> interpolated_n;
};

std::optional<RequiredN> required_n_for_error(const ErrorTable& eta_t,
                                              const CorrectionFactors& k,
                                              double target_eta_percent,
                                              bool interpolate = false);

struct SweepGrid {
  std::vector<double> lambdas;
  std::vector<double> delta_ds;
};

struct SweepPoint {
  SimConfig config;  // with the derived seed
  std::size_t index = 0;
  std::optional<SimResult> result;
  std::string error;  // set when result is empty
};

// Row-major over (lambda, delta_d). Point i runs with seed
// derive_seed(base.rng_seed, kSweepStream, i). A failing point is reported
// and does not stop the sweep.
inline constexpr std::uint64_t kSweepStream = 0x5357'4545'5000ULL;
std::vector<SweepPoint> sweep(const SimConfig& base, const SweepGrid& grid,
                              ErrorMetric metric = ErrorMetric::kRmsReciprocal);

// Synthetic record streams built from the same delay model, for end-to-end
// checks of the estimator. The pair k consists of a small probe at
// start_time + 2k*interval and a large probe one interval later.
struct DatasetSpec {
  SimConfig model;  // lambda, d_min, true_delta_d, clock_quantum, rng_seed
  std::size_t pairs = 2000;
  std::uint32_t small_size = 100;  // bytes; large = small + delta_w/8
  double start_time = 1302000000.0;
  double interval = 30.0;
  Direction direction{"tt01", "tt146", Orientation::kForward};
};

std::vector<DelayRecord> generate_records(const DatasetSpec& spec);

// Named configurations matching the published error tables.
struct Preset {
  SimConfig config;
  CorrectionFactors correction;
};
std::optional<Preset> find_preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace pathgauge::simulator
