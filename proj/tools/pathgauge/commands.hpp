#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pathgauge::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNotReached = 3,
};

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr const char* kSeedEnv = "PATHGAUGE_SEED";

struct FetchOptions {
  std::vector<std::string> sources;  // LABEL=URI
  std::string out_dir;
  std::optional<int> port;
  std::optional<std::string> request;
  double idle_timeout = 30.0;
  std::optional<double> total_timeout;
  std::optional<std::uint64_t> max_lines;
};

struct EstimateOptions {
  std::vector<std::string> records;  // [LABEL=]PATH
  std::vector<int> windows = {20, 50, 100};
  std::optional<int> stride;
  std::vector<int> n_grid;
  std::string pairing = "adjacent";
  double max_gap = 60.0;
  std::optional<std::uint32_t> small_size;
  std::optional<std::uint32_t> large_size;
  double threshold = 1.5;
  std::optional<double> clock_precision;
  double target_eta = 0.10;
  std::optional<std::string> out_dir;
};

struct SimulateOptions {
  std::optional<std::string> preset;
  std::optional<std::string> config_file;
  std::vector<double> lambdas;
  std::vector<double> delta_ds;
  std::optional<double> d_min;
  std::optional<std::uint64_t> delta_w;
  std::optional<long long> trials;
  std::vector<int> n_values;
  std::optional<std::uint64_t> seed;
  std::optional<double> clock_quantum;
  std::string metric = "rms_reciprocal";
  std::optional<double> k_lambda;
  std::optional<double> k_delta_d;
  std::optional<double> correction;
  std::optional<std::string> out_dir;
  std::optional<std::string> records_out;
  std::size_t pairs = 2000;
  std::string label = "tt01->tt146";
};

struct CalibrateOptions {
  std::string table;
  std::optional<double> k_lambda;
  std::optional<double> k_delta_d;
  std::optional<double> correction;
  std::optional<double> lambda_exp, lambda_t, delta_d_exp, delta_d_t;
  double target = 0.0;
  bool interpolate = false;
};

struct ReportOptions {
  std::string path;  // run directory or JSON report
  bool check = false;
};

int cmd_fetch(const FetchOptions& opt);
int cmd_estimate(const EstimateOptions& opt);
int cmd_simulate(const SimulateOptions& opt);
int cmd_calibrate(const CalibrateOptions& opt);
int cmd_report(const ReportOptions& opt);

}  // namespace pathgauge::cli
