// Straight-line reference for simulate_eta_table, kept for equivalence tests
// and the kernel benchmark. Draws go through the public gen_delay.

#include <cmath>

#include "pathgauge/error.hpp"
#include "pathgauge/simulator.hpp"

namespace pathgauge::simulator {

SimResult simulate_eta_table_serial(const SimConfig& cfg, ErrorMetric metric) {
  cfg.validate();
  std::vector<ErrorRow> rows;
  SimResult out{ErrorTable(TableKind::kRelativeErrorPercent, {}), cfg, metric, 0, 0, {}};

  for (int n : cfg.n_values) {
    double score_sum = 0.0;
    std::uint64_t used = 0;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      Xoshiro256 rng(derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(n), t));
      double sum_small = 0.0;
      for (int i = 0; i < n; ++i) sum_small += gen_delay(rng, cfg, SizeClass::kSmall);
      double sum_large = 0.0;
      for (int i = 0; i < n; ++i) sum_large += gen_delay(rng, cfg, SizeClass::kLarge);
      const double denom = sum_large / n - sum_small / n;
      if (!(denom > 0.0)) continue;

      switch (metric) {
        case ErrorMetric::kRmsReciprocal: {
          const double e = denom / cfg.true_delta_d - 1.0;
          score_sum += e * e;
          break;
        }
        case ErrorMetric::kRmsDirect: {
          const double e = cfg.true_delta_d / denom - 1.0;
          score_sum += e * e;
          break;
        }
        case ErrorMetric::kMeanAbsDirect:
          score_sum += std::abs(cfg.true_delta_d / denom - 1.0);
          break;
      }
      ++used;
    }
    if (used == 0)
      throw Error(ErrorCode::kAllTrialsSkipped,
                  "every trial at n=" + std::to_string(n) +
                      " had a non-positive delay difference");
    const double mean = score_sum / static_cast<double>(used);
    const double eta = 100.0 * (metric == ErrorMetric::kMeanAbsDirect ? mean : std::sqrt(mean));
    rows.push_back({n, eta});
    out.trials_used += used;
    out.skipped_windows += cfg.trials - used;
    out.skipped_per_n.push_back(cfg.trials - used);
  }
  out.eta_table = ErrorTable(TableKind::kRelativeErrorPercent, std::move(rows));
  return out;
}

}  // namespace pathgauge::simulator
