#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <string>

#include "line_reader.hpp"

namespace pathgauge::ingest::detail {

namespace {

class Socket {
 public:
  explicit Socket(int fd) : fd_(fd) {}
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() {
    if (fd_ >= 0) ::close(fd_);
  }
  int fd() const { return fd_; }

 private:
  int fd_;
};

std::string describe(const TcpSource& src) {
  return "tcp://" + src.host + ":" + std::to_string(src.port);
}

IoError make_error(const TcpSource& src, IoErrorKind kind, std::string cause) {
  return IoError{describe(src), kind, std::move(cause)};
}

// Feeds complete lines from `buf` to the callback; keeps the partial tail.
// Returns false once the callback asks to stop.
bool drain_lines(std::string& buf, const LineCallback& on_line) {
  std::size_t start = 0;
  for (;;) {
    auto nl = buf.find('\n', start);
    if (nl == std::string::npos) break;
    std::string_view line(buf.data() + start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    start = nl + 1;
    if (!on_line(line)) {
      buf.erase(0, start);
      return false;
    }
  }
  buf.erase(0, start);
  return true;
}

}  // namespace

std::optional<IoError> read_file_lines(const FileSource& src,
                                       const LineCallback& on_line) {
  std::ifstream in(src.path, std::ios::binary);
  if (!in)
    return IoError{src.path, IoErrorKind::kOpenFailed, std::strerror(errno)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!on_line(line)) return std::nullopt;
  }
  if (in.bad())
    return IoError{src.path, IoErrorKind::kReadFailed, "stream read failure"};
  return std::nullopt;
}

std::optional<IoError> read_tcp_lines(const TcpSource& src,
                                      const LineCallback& on_line) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(src.port);
  if (int rc = ::getaddrinfo(src.host.c_str(), port.c_str(), &hints, &res);
      rc != 0) {
    return make_error(src, IoErrorKind::kResolveFailed, ::gai_strerror(rc));
  }

  int fd = -1;
  int last_errno = 0;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) {
      last_errno = errno;
      continue;
    }
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    last_errno = errno;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) {
    auto kind = last_errno == ECONNREFUSED ? IoErrorKind::kConnectionRefused
                                           : IoErrorKind::kConnectFailed;
    return make_error(src, kind, std::strerror(last_errno));
  }
  Socket sock(fd);

  if (src.request_line) {
    std::string req = *src.request_line + "\r\n";
    std::size_t off = 0;
    while (off < req.size()) {
      ssize_t n = ::send(sock.fd(), req.data() + off, req.size() - off,
                         MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        return make_error(src, IoErrorKind::kWriteFailed, std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  using Clock = std::chrono::steady_clock;
  const auto deadline = src.total_timeout
                            ? std::optional(Clock::now() + *src.total_timeout)
                            : std::nullopt;
  std::uint64_t lines = 0;
  bool stop = false;
  auto counted = [&](std::string_view line) {
    if (!on_line(line)) return false;
    ++lines;
    return !(src.max_lines && lines >= *src.max_lines);
  };

  std::string buf;
  char chunk[4096];
  while (!stop) {
    auto wait = src.idle_timeout;
    if (deadline) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          *deadline - Clock::now());
      if (left.count() <= 0) break;
      wait = std::min(wait, left);
    }
    pollfd pfd{sock.fd(), POLLIN, 0};
    int pr = ::poll(&pfd, 1, static_cast<int>(wait.count()));
    if (pr < 0) {
      if (errno == EINTR) continue;
      return make_error(src, IoErrorKind::kReadFailed, std::strerror(errno));
    }
    if (pr == 0) break;  // idle or total budget exhausted

    ssize_t n = ::recv(sock.fd(), chunk, sizeof chunk, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      return make_error(src, IoErrorKind::kReadFailed, std::strerror(errno));
    }
    if (n == 0) break;  // peer closed
    buf.append(chunk, static_cast<std::size_t>(n));
    stop = !drain_lines(buf, counted);
  }
  if (!stop && !buf.empty()) {
    if (buf.back() == '\r') buf.pop_back();
    counted(buf);
  }
  return std::nullopt;
}

}  // namespace pathgauge::ingest::detail
