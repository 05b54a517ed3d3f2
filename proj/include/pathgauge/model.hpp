#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pathgauge {

enum class Orientation { kForward, kReverse };

// A measured path, e.g. "tt01->tt146". Endpoints are free-form labels.
struct Direction {
  std::string from;
  std::string to;
  Orientation orientation = Orientation::kForward;

  // Accepts "a->b" or "a→b". Anything else yields an empty direction, which
  // validate_record rejects as malformed.
  static Direction parse(std::string_view label,
                         Orientation orientation = Orientation::kForward);

  std::string label() const;
  bool well_formed() const;

  friend bool operator==(const Direction&, const Direction&) = default;
};

// One probe packet's one-way delay observation. Delays and timestamps are in
// seconds.
struct DelayRecord {
  std::uint64_t seq_id = 0;
  Direction direction;
  std::uint32_t packet_size = 0;  // bytes
  double send_time = 0.0;
  double delay = 0.0;

  friend bool operator==(const DelayRecord&, const DelayRecord&) = default;
};

// Unvalidated record as it comes off the wire or out of a file.
struct RecordCandidate {
  std::uint64_t seq_id = 0;
  Direction direction;
  std::int64_t packet_size = 0;
  double send_time = 0.0;
  double delay = 0.0;
};

enum class RejectReason {
  kNonPositiveDelay,
  kZeroSize,
  kMalformedDirection,
  kInvalidSendTime,
  kDuplicateSeq,
};

std::string_view to_string(RejectReason reason);

struct Rejection {
  RejectReason reason;
};

std::variant<DelayRecord, Rejection> validate_record(const RecordCandidate& raw);

// A matched (small, large) record pair. delta_d may be non-positive; such
// pairs are filtered when estimating, not here.
class PacketPairSample {
 public:
  // Throws Error(kInvalidArgument) unless small is strictly smaller than
  // large, or Error(kDirectionMismatch) if the records' paths differ.
  PacketPairSample(DelayRecord small, DelayRecord large);

  const DelayRecord& small() const { return small_; }
  const DelayRecord& large() const { return large_; }
  std::uint64_t delta_w() const { return delta_w_; }  // bits
  double delta_d() const { return delta_d_; }         // seconds

 private:
  DelayRecord small_;
  DelayRecord large_;
  std::uint64_t delta_w_;
  double delta_d_;
};

struct BandwidthEstimate {
  double value = 0.0;  // bits per second
  std::size_t window_start = 0;
  std::size_t window_n = 0;
  double mean_delta_d = 0.0;
  Direction direction;

  double mbps() const { return value / 1e6; }
};

enum class TableKind { kSdMbps, kRelativeErrorPercent };

std::string_view to_string(TableKind kind);

struct ErrorRow {
  int n = 0;
  double value = 0.0;

  friend bool operator==(const ErrorRow&, const ErrorRow&) = default;
};

// sigma_n(B) or eta_n indexed by measurement count. Rows are kept strictly
// increasing in n; construction throws Error(kInvalidArgument) otherwise.
class ErrorTable {
 public:
  ErrorTable(TableKind kind, std::vector<ErrorRow> rows,
             std::optional<double> mean_bandwidth = std::nullopt);

  TableKind kind() const { return kind_; }
  const std::vector<ErrorRow>& rows() const { return rows_; }
  std::optional<double> mean_bandwidth() const { return mean_bandwidth_; }
  std::vector<int> n_grid() const;
  std::optional<double> value_at(int n) const;

 private:
  TableKind kind_;
  std::vector<ErrorRow> rows_;
  std::optional<double> mean_bandwidth_;
};

// Exponential delay-variation model parameters for the Monte Carlo engine.
struct SimConfig {
  double lambda_rate = 1000.0;   // 1/s
  double d_min = 0.0;            // s
  double true_delta_d = 8e-4;    // s
  std::uint64_t delta_w = 8000;  // bits
  std::uint64_t trials = 100000;
  std::vector<int> n_values = {5, 10, 20, 30, 50, 100, 200};
  std::uint64_t rng_seed = 42;
  double clock_quantum = 0.0;  // s, 0 = perfect clock

  // Every violated constraint, so callers can report them together.
  std::vector<std::string> validation_errors() const;
  void validate() const;

  double true_bandwidth() const {
    return static_cast<double>(delta_w) / true_delta_d;
  }

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

}  // namespace pathgauge
