#include "pathgauge/model.hpp"

#include <cmath>
#include <utility>

#include "pathgauge/error.hpp"

namespace pathgauge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDirectionMismatch: return "direction_mismatch";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kInconsistentDeltaW: return "inconsistent_delta_w";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kWrongTableKind: return "wrong_table_kind";
    case ErrorCode::kGridMismatch: return "grid_mismatch";
    case ErrorCode::kAllTrialsSkipped: return "all_trials_skipped";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kConfig: return "config_error";
  }
  return "unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Direction Direction::parse(std::string_view label, Orientation orientation) {
  static constexpr std::string_view kArrows[] = {"->", "\xE2\x86\x92"};
  for (auto arrow : kArrows) {
    auto pos = label.find(arrow);
    if (pos == std::string_view::npos) continue;
    return Direction{std::string(trim(label.substr(0, pos))),
                     std::string(trim(label.substr(pos + arrow.size()))),
                     orientation};
  }
  return Direction{{}, {}, orientation};
}

std::string Direction::label() const { return from + "->" + to; }

bool Direction::well_formed() const {
  auto clean = [](const std::string& s) {
    if (s.empty()) return false;
    for (unsigned char c : s)
      if (c < 0x20 || c == '>' || c == ' ') return false;
    return true;
  };
  return clean(from) && clean(to) && from != to;
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kNonPositiveDelay: return "non_positive_delay";
    case RejectReason::kZeroSize: return "zero_size";
    case RejectReason::kMalformedDirection: return "malformed_direction";
    case RejectReason::kInvalidSendTime: return "invalid_send_time";
    case RejectReason::kDuplicateSeq: return "duplicate_seq";
  }
  return "unknown";
}

std::variant<DelayRecord, Rejection> validate_record(const RecordCandidate& raw) {
  // NaN fails the comparison and lands here too.
  if (!(raw.delay > 0.0) || !std::isfinite(raw.delay))
    return Rejection{RejectReason::kNonPositiveDelay};
  if (raw.packet_size <= 0 || raw.packet_size > UINT32_MAX)
    return Rejection{RejectReason::kZeroSize};
  if (!raw.direction.well_formed())
    return Rejection{RejectReason::kMalformedDirection};
  if (!(raw.send_time >= 0.0) || !std::isfinite(raw.send_time))
    return Rejection{RejectReason::kInvalidSendTime};
  return DelayRecord{raw.seq_id, raw.direction,
                     static_cast<std::uint32_t>(raw.packet_size),
                     raw.send_time, raw.delay};
}

PacketPairSample::PacketPairSample(DelayRecord small, DelayRecord large)
    : small_(std::move(small)), large_(std::move(large)) {
  if (small_.packet_size >= large_.packet_size)
    throw Error(ErrorCode::kInvalidArgument,
                "packet pair requires small.packet_size < large.packet_size");
  if (small_.direction != large_.direction)
    throw Error(ErrorCode::kDirectionMismatch,
                "packet pair records belong to different directions");
  delta_w_ = 8ULL * (large_.packet_size - small_.packet_size);
  delta_d_ = large_.delay - small_.delay;
}

std::string_view to_string(TableKind kind) {
  return kind == TableKind::kSdMbps ? "sd_mbps" : "relative_error_percent";
}

ErrorTable::ErrorTable(TableKind kind, std::vector<ErrorRow> rows,
                       std::optional<double> mean_bandwidth)
    : kind_(kind), rows_(std::move(rows)), mean_bandwidth_(mean_bandwidth) {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].n < 1)
      throw Error(ErrorCode::kInvalidArgument, "table n values must be >= 1");
    if (!(rows_[i].value >= 0.0))
      throw Error(ErrorCode::kInvalidArgument,
                  "table values must be non-negative");
    if (i > 0 && rows_[i].n <= rows_[i - 1].n)
      throw Error(ErrorCode::kInvalidArgument,
                  "table n values must be strictly increasing");
  }
}

std::vector<int> ErrorTable::n_grid() const {
  std::vector<int> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.n);
  return out;
}

std::optional<double> ErrorTable::value_at(int n) const {
  for (const auto& r : rows_)
    if (r.n == n) return r.value;
  return std::nullopt;
}

std::vector<std::string> SimConfig::validation_errors() const {
  std::vector<std::string> out;
  if (!(lambda_rate > 0.0) || !std::isfinite(lambda_rate))
    out.emplace_back("lambda must be a positive finite rate");
  if (!(d_min >= 0.0) || !std::isfinite(d_min))
    out.emplace_back("d_min must be non-negative");
  if (!(true_delta_d > 0.0) || !std::isfinite(true_delta_d))
    out.emplace_back("true_delta_d must be positive");
  if (delta_w == 0) out.emplace_back("delta_w must be positive");
  if (trials < 1) out.emplace_back("trials must be >= 1");
  if (n_values.empty()) out.emplace_back("n_values must not be empty");
  for (int n : n_values) {
    if (n < 1) {
      out.emplace_back("all n_values must be >= 1");
      break;
    }
  }
  for (std::size_t i = 1; i < n_values.size(); ++i) {
    if (n_values[i] <= n_values[i - 1]) {
      out.emplace_back("n_values must be strictly increasing");
      break;
    }
  }
  if (!(clock_quantum >= 0.0) || !std::isfinite(clock_quantum))
    out.emplace_back("clock_quantum must be non-negative");
  return out;
}

void SimConfig::validate() const {
  auto errors = validation_errors();
  if (errors.empty()) return;
  std::string msg = "invalid simulation config:";
  for (const auto& e : errors) msg += "\n  - " + e;
  throw Error(ErrorCode::kConfig, msg);
}

}  // namespace pathgauge
