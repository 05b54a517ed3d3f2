#pragma once

// Internal transport helpers shared by the ingest sources.

#include <functional>
#include <optional>
#include <string_view>

#include "pathgauge/ingest.hpp"

namespace pathgauge::ingest::detail {

// Returns false to stop reading.
using LineCallback = std::function<bool(std::string_view)>;

std::optional<IoError> read_file_lines(const FileSource& src,
                                       const LineCallback& on_line);

std::optional<IoError> read_tcp_lines(const TcpSource& src,
                                      const LineCallback& on_line);

}  // namespace pathgauge::ingest::detail
