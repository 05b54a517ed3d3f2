#include "pathgauge/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <set>
#include <utility>

#include "line_reader.hpp"
#include "pathgauge/error.hpp"

namespace pathgauge::ingest {

namespace {

constexpr std::size_t kMaxSampledParseErrors = 16;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;  // from_chars rejects '+'
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Per-source counters and duplicate/ordering bookkeeping.
class Accountant {
 public:
  Accountant(Direction direction, const RecordSink& sink)
      : direction_(std::move(direction)), sink_(sink) {}

  void feed(std::string_view line) {
    ++line_no_;
    ++report_.lines;
    auto outcome = parse_record_line(line, line_no_);
    if (std::holds_alternative<Skip>(outcome)) {
      ++report_.skipped;
      if (!direction_.well_formed()) {
        if (auto label = direction_directive(line))
          direction_ = Direction::parse(*label, direction_.orientation);
      }
      return;
    }
    if (auto* err = std::get_if<ParseError>(&outcome)) {
      ++report_.parse_errors;
      if (report_.first_parse_errors.size() < kMaxSampledParseErrors)
        report_.first_parse_errors.push_back(std::move(*err));
      return;
    }
    auto candidate = std::get<RecordCandidate>(std::move(outcome));
    candidate.direction = direction_;
    auto validated = validate_record(candidate);
    if (auto* rej = std::get_if<Rejection>(&validated)) {
      ++report_.rejected[rej->reason];
      return;
    }
    auto& record = std::get<DelayRecord>(validated);
    auto& stream = streams_[record.packet_size];
    if (!stream.seen.insert(record.seq_id).second) {
      ++report_.rejected[RejectReason::kDuplicateSeq];
      ++report_.duplicate_seq;
      return;
    }
    if (stream.any && record.send_time < stream.last_send_time)
      ++report_.out_of_order;
    stream.any = true;
    stream.last_send_time = std::max(stream.last_send_time, record.send_time);
    ++report_.accepted;
    sink_(record);
  }

  SourceResult finish(std::optional<IoError> error) {
    return SourceResult{std::move(report_), std::move(error), direction_};
  }

 private:
  struct StreamState {
    std::set<std::uint64_t> seen;
    double last_send_time = 0.0;
    bool any = false;
  };

  Direction direction_;
  const RecordSink& sink_;
  IngestReport report_;
  std::size_t line_no_ = 0;
  std::map<std::uint32_t, StreamState> streams_;
};

}  // namespace

std::string RecordSource::describe() const {
  if (auto* f = std::get_if<FileSource>(&kind)) return f->path;
  const auto& t = std::get<TcpSource>(kind);
  return "tcp://" + t.host + ":" + std::to_string(t.port);
}

RecordSource parse_source_uri(std::string_view uri, std::string direction_label,
                              Orientation orientation, std::uint16_t default_port) {
  std::string_view rest;
  if (uri.starts_with("tcp://")) {
    rest = uri.substr(6);
  } else if (uri.starts_with("tcp:")) {
    rest = uri.substr(4);
  } else {
    if (uri.starts_with("file://")) uri.remove_prefix(7);
    if (uri.empty()) throw Error(ErrorCode::kInvalidArgument, "empty source path");
    return RecordSource{FileSource{std::string(uri)}, std::move(direction_label),
                        orientation};
  }

  TcpSource tcp;
  tcp.port = default_port;
  std::string_view host = rest;
  std::string_view port;
  if (!rest.empty() && rest.front() == '[') {  // [v6addr]:port
    auto close = rest.find(']');
    if (close == std::string_view::npos)
      throw Error(ErrorCode::kInvalidArgument, "unterminated IPv6 literal in " + std::string(uri));
    host = rest.substr(1, close - 1);
    auto tail = rest.substr(close + 1);
    if (tail.starts_with(":")) port = tail.substr(1);
    else if (!tail.empty())
      throw Error(ErrorCode::kInvalidArgument, "junk after IPv6 literal in " + std::string(uri));
  } else if (auto colon = rest.rfind(':');
             colon != std::string_view::npos && rest.find(':') == colon) {
    host = rest.substr(0, colon);
    port = rest.substr(colon + 1);
  }
  if (host.empty())
    throw Error(ErrorCode::kInvalidArgument, "missing host in " + std::string(uri));
  if (!port.empty()) {
    unsigned value = 0;
    if (!parse_number(port, value) || value == 0 || value > 65535)
      throw Error(ErrorCode::kInvalidArgument, "bad port in " + std::string(uri));
    tcp.port = static_cast<std::uint16_t>(value);
  }
  tcp.host = std::string(host);
  return RecordSource{std::move(tcp), std::move(direction_label), orientation};
}

LineOutcome parse_record_line(std::string_view line, std::size_t line_no) {
  auto body = trim(line);
  if (body.empty() || body.front() == '#') return Skip{};

  auto tokens = tokenize(line);
  auto fail = [&](std::size_t column, std::string msg) -> LineOutcome {
    return ParseError{line_no, column, std::move(msg)};
  };
  static constexpr const char* kFieldNames[] = {"seq_id", "packet_size",
                                                "send_time", "delay"};
  if (tokens.size() < 4)
    return fail(line.size() + 1,
                std::string("missing field ") + kFieldNames[tokens.size()]);
  if (tokens.size() > 4) return fail(tokens[4].column, "unexpected trailing field");

  RecordCandidate c;
  if (!parse_number(tokens[0].text, c.seq_id))
    return fail(tokens[0].column, "malformed seq_id");
  if (!parse_number(tokens[1].text, c.packet_size))
    return fail(tokens[1].column, "malformed packet_size");
  if (!parse_number(tokens[2].text, c.send_time))
    return fail(tokens[2].column, "malformed send_time");
  if (!parse_number(tokens[3].text, c.delay))
    return fail(tokens[3].column, "malformed delay");
  return c;
}

std::string format_record_line(const DelayRecord& r) {
  // Wide enough for any double in fixed notation.
  char buf[400];
  auto append = [&](std::string& out, std::to_chars_result res) {
    out.append(buf, res.ptr);
  };
  std::string out;
  append(out, std::to_chars(buf, buf + sizeof buf, r.seq_id));
  out.push_back(' ');
  append(out, std::to_chars(buf, buf + sizeof buf, r.packet_size));
  out.push_back(' ');
  append(out, std::to_chars(buf, buf + sizeof buf, r.send_time, std::chars_format::fixed, 6));
  out.push_back(' ');
  append(out, std::to_chars(buf, buf + sizeof buf, r.delay));
  return out;
}

std::optional<std::string> direction_directive(std::string_view line) {
  auto body = trim(line);
  if (!body.starts_with("#")) return std::nullopt;
  body = trim(body.substr(1));
  constexpr std::string_view kKey = "direction:";
  if (!body.starts_with(kKey)) return std::nullopt;
  return std::string(trim(body.substr(kKey.size())));
}

std::uint64_t IngestReport::rejected_total() const {
  std::uint64_t total = 0;
  for (const auto& [_, n] : rejected) total += n;
  return total;
}

void IngestReport::merge(const IngestReport& other) {
  lines += other.lines;
  accepted += other.accepted;
  for (const auto& [reason, n] : other.rejected) rejected[reason] += n;
  skipped += other.skipped;
  parse_errors += other.parse_errors;
  duplicate_seq += other.duplicate_seq;
  out_of_order += other.out_of_order;
  for (const auto& e : other.first_parse_errors) {
    if (first_parse_errors.size() >= kMaxSampledParseErrors) break;
    first_parse_errors.push_back(e);
  }
}

std::string_view to_string(IoErrorKind kind) {
  switch (kind) {
    case IoErrorKind::kOpenFailed: return "open_failed";
    case IoErrorKind::kResolveFailed: return "resolve_failed";
    case IoErrorKind::kConnectionRefused: return "connection_refused";
    case IoErrorKind::kConnectFailed: return "connect_failed";
    case IoErrorKind::kReadFailed: return "read_failed";
    case IoErrorKind::kWriteFailed: return "write_failed";
  }
  return "unknown";
}

SourceResult read_source(const RecordSource& src, const RecordSink& sink) {
  Accountant acct(Direction::parse(src.direction_label, src.orientation), sink);
  auto on_line = [&](std::string_view line) {
    acct.feed(line);
    return true;
  };
  std::optional<IoError> error;
  if (auto* f = std::get_if<FileSource>(&src.kind))
    error = detail::read_file_lines(*f, on_line);
  else
    error = detail::read_tcp_lines(std::get<TcpSource>(src.kind), on_line);
  return acct.finish(std::move(error));
}

SourceResult read_lines(std::string_view text, const Direction& direction,
                        const RecordSink& sink) {
  Accountant acct(direction, sink);
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    acct.feed(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return acct.finish(std::nullopt);
}

RecordStream collect(const RecordSource& src) {
  RecordStream out;
  auto result = read_source(src, [&](const DelayRecord& r) { out.records.push_back(r); });
  out.direction = std::move(result.direction);
  out.report = std::move(result.report);
  out.error = std::move(result.error);
  return out;
}

BidirectionalResult collect_bidirectional(const RecordSource& a,
                                          const RecordSource& b) {
  auto fut_a = std::async(std::launch::async, [&a] { return collect(a); });
  auto fut_b = std::async(std::launch::async, [&b] { return collect(b); });
  BidirectionalResult out{fut_a.get(), fut_b.get(), {}};
  out.combined.merge(out.a.report);
  out.combined.merge(out.b.report);
  return out;
}

std::map<std::uint32_t, std::vector<DelayRecord>> split_by_size(
    const std::vector<DelayRecord>& records) {
  std::map<std::uint32_t, std::vector<DelayRecord>> out;
  for (const auto& r : records) out[r.packet_size].push_back(r);
  for (auto& [_, v] : out)
    std::stable_sort(v.begin(), v.end(), [](const auto& x, const auto& y) {
      return x.send_time < y.send_time;
    });
  return out;
}

}  // namespace pathgauge::ingest
