/*
 * Copyright 2026 The Povex Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "povex/predictor/external_model.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "povex/status.h"

extern char** environ;

namespace povex::predictor {

std::string FormatProtocolNumber(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ec == std::errc() ? ptr : buffer);
}

absl::StatusOr<std::unique_ptr<ExternalModel>> ExternalModel::Start(
    std::vector<std::string> argv) {
  if (argv.empty()) {
    return MakeError(ErrorKind::kInvalidArgument, "empty external command");
  }
  static std::once_flag ignore_sigpipe;
  std::call_once(ignore_sigpipe, [] { ::signal(SIGPIPE, SIG_IGN); });

  int in_pipe[2];   // parent -> child stdin
  int out_pipe[2];  // child stdout -> parent
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    return MakeError(ErrorKind::kIo, std::strerror(errno));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    return MakeError(ErrorKind::kIo, std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  std::vector<char*> args;
  for (auto& a : argv) args.push_back(a.data());
  args.push_back(nullptr);
  pid_t pid = 0;
  const int rc =
      ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    return MakeError(ErrorKind::kProcessExit,
                     absl::StrCat("cannot start `", argv[0], "`: ",
                                  std::strerror(rc)));
  }
  return std::unique_ptr<ExternalModel>(
      new ExternalModel(std::move(argv), pid, in_pipe[1], out_pipe[0]));
}

ExternalModel::~ExternalModel() { Shutdown(); }

void ExternalModel::Shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    if (::waitpid(pid_, &status, WNOHANG) == 0) {
      ::kill(pid_, SIGTERM);
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
}

std::string ExternalModel::model_id() const {
  return absl::StrCat("external:", absl::StrJoin(argv_, " "));
}

absl::Status ExternalModel::PredictBatch(std::span<const double> rows,
                                         size_t width,
                                         std::span<double> out) const {
  if (rows.size() != width * out.size()) {
    return MakeError(ErrorKind::kLengthMismatch, "batch shape mismatch");
  }
  if (out.empty()) return absl::OkStatus();
  std::string request = absl::StrCat("PREDICT ", out.size(), " ", width, "\n");
  request.reserve(request.size() + rows.size() * 12);
  for (size_t i = 0; i < out.size(); ++i) {
    for (size_t c = 0; c < width; ++c) {
      if (c > 0) request.push_back('\t');
      request += FormatProtocolNumber(rows[i * width + c]);
    }
    request.push_back('\n');
  }
  std::lock_guard<std::mutex> lock(mu_);
  if (broken_) {
    return MakeError(ErrorKind::kProcessExit,
                     "external model is unusable after an earlier failure");
  }
  absl::Status status = Exchange(request, out.size(), out);
  if (!status.ok()) broken_ = true;
  return status;
}

absl::Status ExternalModel::Exchange(const std::string& request, size_t count,
                                     std::span<double> out) const {
  size_t written = 0;
  size_t parsed = 0;
  bool got_ok = false;
  auto parse_lines = [&]() -> absl::Status {
    size_t newline;
    while (!got_ok && (newline = pending_.find('\n')) != std::string::npos) {
      std::string line = pending_.substr(0, newline);
      pending_.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (parsed == count) {
        if (line != "OK") {
          return MakeError(ErrorKind::kProtocolError,
                           absl::StrCat("expected `OK` after ", count,
                                        " predictions, got \"", line, "\""));
        }
        got_ok = true;
        break;
      }
      double value = 0;
      const auto [ptr, ec] =
          std::from_chars(line.data(), line.data() + line.size(), value);
      if (line.empty() || ec != std::errc() || ptr != line.data() + line.size() ||
          !std::isfinite(value)) {
        return MakeError(ErrorKind::kProtocolError,
                         absl::StrCat("malformed prediction line ", parsed + 1,
                                      " of ", count, ": \"", line, "\""));
      }
      out[parsed++] = value;
    }
    return absl::OkStatus();
  };

  char buffer[65536];
  while (!got_ok) {
    pollfd fds[2];
    nfds_t nfds = 0;
    fds[nfds++] = {from_child_, POLLIN, 0};
    if (written < request.size()) fds[nfds++] = {to_child_, POLLOUT, 0};
    if (::poll(fds, nfds, -1) < 0) {
      if (errno == EINTR) continue;
      return MakeError(ErrorKind::kIo, std::strerror(errno));
    }
    if (nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t n = ::write(to_child_, request.data() + written,
                                request.size() - written);
      if (n < 0 && errno != EINTR && errno != EAGAIN) {
        return MakeError(ErrorKind::kProcessExit,
                         absl::StrCat("external model closed its input: ",
                                      std::strerror(errno)));
      }
      if (n > 0) written += static_cast<size_t>(n);
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      const ssize_t n = ::read(from_child_, buffer, sizeof(buffer));
      if (n < 0) {
        if (errno == EINTR) continue;
        return MakeError(ErrorKind::kIo, std::strerror(errno));
      }
      if (n == 0) {
        return MakeError(ErrorKind::kProcessExit,
                         absl::StrCat("external model exited after ", parsed,
                                      " of ", count, " predictions"));
      }
      pending_.append(buffer, static_cast<size_t>(n));
      POVEX_RETURN_IF_ERROR(parse_lines());
    }
  }
  if (written < request.size()) {
    return MakeError(ErrorKind::kProtocolError,
                     "external model answered before reading the request");
  }
  if (!pending_.empty()) {
    return MakeError(ErrorKind::kProtocolError,
                     absl::StrCat("unexpected output after `OK`: \"", pending_,
                                  "\""));
  }
  return absl::OkStatus();
}

}  // namespace povex::predictor
