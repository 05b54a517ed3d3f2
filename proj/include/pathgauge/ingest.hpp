#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pathgauge/model.hpp"

namespace pathgauge::ingest {

inline constexpr std::uint16_t kDefaultPort = 9142;
// Matches the probe cadence of one packet every 30 s.
inline constexpr std::chrono::milliseconds kDefaultIdleTimeout{30000};

struct FileSource {
  std::string path;
};

struct TcpSource {
  std::string host;
  std::uint16_t port = kDefaultPort;
  std::optional<std::string> request_line;  // sent once after connecting
  std::chrono::milliseconds idle_timeout = kDefaultIdleTimeout;
  std::optional<std::chrono::milliseconds> total_timeout;
  std::optional<std::uint64_t> max_lines;
};

struct RecordSource {
  std::variant<FileSource, TcpSource> kind;
  std::string direction_label;
  Orientation orientation = Orientation::kForward;

  std::string describe() const;
};

// "tcp://host[:port]", "tcp:host[:port]", "file://path" or a bare file
// path. An omitted port means default_port.
RecordSource parse_source_uri(std::string_view uri, std::string direction_label,
                              Orientation orientation = Orientation::kForward,
                              std::uint16_t default_port = kDefaultPort);

struct Skip {};

struct ParseError {
  std::size_t line_no = 0;
  std::size_t column = 0;  // 1-based byte column of the offending field
  std::string message;
};

using LineOutcome = std::variant<RecordCandidate, Skip, ParseError>;

// Canonical grammar: `seq_id packet_size_bytes send_time_s delay_s`,
// whitespace separated. Blank lines and lines starting with '#' are skipped.
// Total over arbitrary bytes. The candidate's direction is left empty.
LineOutcome parse_record_line(std::string_view line, std::size_t line_no = 0);

// Inverse of parse_record_line, microsecond resolution for send_time.
std::string format_record_line(const DelayRecord& record);

// A `# direction: a->b` comment inside a record file names its path.
std::optional<std::string> direction_directive(std::string_view line);

struct IngestReport {
  std::uint64_t lines = 0;
  std::uint64_t accepted = 0;
  std::map<RejectReason, std::uint64_t> rejected;
  std::uint64_t skipped = 0;  // comments and blank lines
  std::uint64_t parse_errors = 0;
  std::uint64_t duplicate_seq = 0;
  std::uint64_t out_of_order = 0;
  std::vector<ParseError> first_parse_errors;  // capped sample

  std::uint64_t rejected_total() const;
  void merge(const IngestReport& other);
};

enum class IoErrorKind {
  kOpenFailed,
  kResolveFailed,
  kConnectionRefused,
  kConnectFailed,
  kReadFailed,
  kWriteFailed,
};

std::string_view to_string(IoErrorKind kind);

struct IoError {
  std::string source;
  IoErrorKind kind;
  std::string cause;
};

using RecordSink = std::function<void(const DelayRecord&)>;

struct SourceResult {
  IngestReport report;
  std::optional<IoError> error;
  Direction direction;
};

// Streams validated records to `sink` in arrival order. Records parsed
// before an I/O failure are delivered and counted; the failure is reported
// in the result, not thrown.
SourceResult read_source(const RecordSource& src, const RecordSink& sink);

// Same accounting over an in-memory line sequence.
SourceResult read_lines(std::string_view text, const Direction& direction,
                        const RecordSink& sink);

struct RecordStream {
  Direction direction;
  std::vector<DelayRecord> records;  // arrival order
  IngestReport report;
  std::optional<IoError> error;
};

RecordStream collect(const RecordSource& src);

struct BidirectionalResult {
  RecordStream a;
  RecordStream b;
  IngestReport combined;
};

// Reads both sources on separate threads. A failing source never aborts
// the other.
BidirectionalResult collect_bidirectional(const RecordSource& a,
                                          const RecordSource& b);

// Records grouped by packet size, each group stably sorted by send_time.
std::map<std::uint32_t, std::vector<DelayRecord>> split_by_size(
    const std::vector<DelayRecord>& records);

}  // namespace pathgauge::ingest
