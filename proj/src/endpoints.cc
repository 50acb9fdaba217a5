// Copyright 2026 The StructFuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "structfuzz/endpoints.h"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/strip.h"
#include "structfuzz/stub_mutator.h"

namespace structfuzz {
namespace {

constexpr size_t kMaxLineBytes = 1 << 22;

}  // namespace

absl::StatusOr<EndpointAddress> ParseEndpointAddress(absl::string_view address) {
  EndpointAddress out;
  absl::string_view rest = address;
  if (absl::ConsumePrefix(&rest, "unix:")) {
    if (rest.empty() || rest.size() >= sizeof(sockaddr_un{}.sun_path)) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad unix socket path in '", address, "'"));
    }
    out.is_unix = true;
    out.path = std::string(rest);
    return out;
  }
  const size_t colon = rest.rfind(':');
  uint32_t port = 0;
  if (colon == absl::string_view::npos ||
      !absl::SimpleAtoi(rest.substr(colon + 1), &port) || port == 0 ||
      port > 65535) {
    return absl::InvalidArgumentError(
        absl::StrCat("endpoint '", address,
                     "' is neither unix:<path> nor <host>:<port>"));
  }
  out.host = std::string(rest.substr(0, colon));
  if (out.host == "localhost") out.host = "127.0.0.1";
  in_addr probe{};
  if (inet_pton(AF_INET, out.host.c_str(), &probe) != 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("endpoint host '", out.host, "' is not an IPv4 address"));
  }
  out.port = static_cast<uint16_t>(port);
  return out;
}

SocketEndpoint::SocketEndpoint(EndpointAddress address)
    : address_(std::move(address)) {}

SocketEndpoint::~SocketEndpoint() { Disconnect(); }

void SocketEndpoint::Disconnect() {
  if (fd_ >= 0) close(fd_);
  fd_ = -1;
  in_buf_.clear();
  out_buf_.clear();
  if (state_ != State::kIdle) {
    next_attempt_ = std::chrono::steady_clock::now() + backoff_;
    backoff_ = std::min(backoff_ * 2, kMaxBackoff);
  }
  state_ = State::kIdle;
}

void SocketEndpoint::StartConnect() {
  ++connect_attempts_;
  state_ = State::kConnecting;  // so that Disconnect() schedules a retry
  const int domain = address_.is_unix ? AF_UNIX : AF_INET;
  fd_ = socket(domain, SOCK_STREAM | SOCK_NONBLOCK | SOCK_CLOEXEC, 0);
  if (fd_ < 0) {
    Disconnect();
    return;
  }
  int rc;
  if (address_.is_unix) {
    sockaddr_un sa{};
    sa.sun_family = AF_UNIX;
    std::memcpy(sa.sun_path, address_.path.data(), address_.path.size());
    rc = connect(fd_, reinterpret_cast<const sockaddr*>(&sa), sizeof(sa));
  } else {
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(address_.port);
    inet_pton(AF_INET, address_.host.c_str(), &sa.sin_addr);
    rc = connect(fd_, reinterpret_cast<const sockaddr*>(&sa), sizeof(sa));
  }
  if (rc == 0) {
    state_ = State::kAwaitGreeting;
  } else if (errno == EINPROGRESS || errno == EAGAIN) {
    state_ = State::kConnecting;
  } else {
    Disconnect();
  }
}

void SocketEndpoint::Poll() {
  if (state_ == State::kIdle) {
    if (std::chrono::steady_clock::now() < next_attempt_) return;
    StartConnect();
    if (state_ == State::kIdle) return;
  }
  if (state_ == State::kConnecting) {
    pollfd pfd{fd_, POLLOUT, 0};
    if (poll(&pfd, 1, 0) <= 0) return;
    int err = 0;
    socklen_t len = sizeof(err);
    getsockopt(fd_, SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) {
      Disconnect();
      return;
    }
    state_ = State::kAwaitGreeting;
  }
  FlushOutput();
  ReadAvailable();
  if (state_ == State::kAwaitGreeting) {
    const size_t nl = in_buf_.find('\n');
    if (nl == std::string::npos) return;
    if (absl::string_view(in_buf_).substr(0, nl) != kGreeting) {
      Disconnect();
      return;
    }
    in_buf_.erase(0, nl + 1);
    state_ = State::kReady;
    backoff_ = kInitialBackoff;
  }
}

void SocketEndpoint::ReadAvailable() {
  if (fd_ < 0) return;
  char buf[8192];
  while (true) {
    const ssize_t n = recv(fd_, buf, sizeof(buf), MSG_DONTWAIT);
    if (n > 0) {
      in_buf_.append(buf, static_cast<size_t>(n));
      if (in_buf_.size() > kMaxLineBytes &&
          in_buf_.find('\n') == std::string::npos) {
        Disconnect();  // peer is not speaking the protocol
        return;
      }
      continue;
    }
    if (n == 0) {
      Disconnect();
      return;
    }
    if (errno == EINTR) continue;
    if (errno != EAGAIN && errno != EWOULDBLOCK) Disconnect();
    return;
  }
}

void SocketEndpoint::FlushOutput() {
  while (fd_ >= 0 && !out_buf_.empty()) {
    const ssize_t n =
        send(fd_, out_buf_.data(), out_buf_.size(), MSG_DONTWAIT | MSG_NOSIGNAL);
    if (n > 0) {
      out_buf_.erase(0, static_cast<size_t>(n));
      continue;
    }
    if (n < 0 && errno == EINTR) continue;
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) return;
    Disconnect();
    return;
  }
}

bool SocketEndpoint::TrySendLine(absl::string_view line) {
  if (state_ != State::kReady || !out_buf_.empty()) return false;
  out_buf_.assign(line.data(), line.size());
  out_buf_.push_back('\n');
  FlushOutput();
  return true;
}

std::optional<std::string> SocketEndpoint::TryRecvLine() {
  if (state_ != State::kReady) return std::nullopt;
  ReadAvailable();
  const size_t nl = in_buf_.find('\n');
  if (nl == std::string::npos) return std::nullopt;
  std::string line = in_buf_.substr(0, nl);
  in_buf_.erase(0, nl + 1);
  return line;
}

InProcessEndpoint::InProcessEndpoint(Handler handler,
                                     std::chrono::microseconds latency)
    : handler_(std::move(handler)), latency_(latency) {
  outbox_.emplace_back(kGreeting);
  worker_ = std::thread([this] { Serve(); });
}

InProcessEndpoint::~InProcessEndpoint() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  wake_.notify_all();
  worker_.join();
}

void InProcessEndpoint::Serve() {
  std::unique_lock<std::mutex> lock(mu_);
  while (true) {
    wake_.wait(lock, [this] { return stop_ || !inbox_.empty(); });
    if (stop_) return;
    std::string line = std::move(inbox_.front());
    inbox_.pop_front();
    lock.unlock();
    std::string reply = handler_(line);
    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
    lock.lock();
    if (!reply.empty()) outbox_.push_back(std::move(reply));
  }
}

void InProcessEndpoint::Poll() {
  if (greeted_) return;
  std::unique_lock<std::mutex> lock(mu_, std::try_to_lock);
  if (!lock.owns_lock() || outbox_.empty()) return;
  if (outbox_.front() == kGreeting) {
    outbox_.pop_front();
    greeted_ = true;
  }
}

bool InProcessEndpoint::TrySendLine(absl::string_view line) {
  if (!greeted_) return false;
  std::unique_lock<std::mutex> lock(mu_, std::try_to_lock);
  if (!lock.owns_lock()) return false;
  inbox_.emplace_back(line);
  lock.unlock();
  wake_.notify_one();
  return true;
}

std::optional<std::string> InProcessEndpoint::TryRecvLine() {
  if (!greeted_) return std::nullopt;
  std::unique_lock<std::mutex> lock(mu_, std::try_to_lock);
  if (!lock.owns_lock() || outbox_.empty()) return std::nullopt;
  std::string line = std::move(outbox_.front());
  outbox_.pop_front();
  return line;
}

absl::StatusOr<std::unique_ptr<MutatorEndpoint>> MakeEndpoint(
    absl::string_view address) {
  if (address == "inproc:stub") {
    return std::unique_ptr<MutatorEndpoint>(
        std::make_unique<InProcessEndpoint>(HandleRequestLine));
  }
  absl::StatusOr<EndpointAddress> parsed = ParseEndpointAddress(address);
  if (!parsed.ok()) return parsed.status();
  return std::unique_ptr<MutatorEndpoint>(
      std::make_unique<SocketEndpoint>(*std::move(parsed)));
}

}  // namespace structfuzz
