// Copyright 2026 The kgwalk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// External model adapter speaking the line protocol over a child
// process's standard streams (POSIX only).
//
//   harness -> child   {"id": ..., "task": ..., "input": ...}\n   per request
//                      \n                                        end of batch
//   child -> harness   {"id": ..., "output": ...}\n              per request
//
// The child must answer every id of a batch before the next batch is sent.
// One child serves all batches; finish() closes its input and checks the
// exit status.

#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgwalk/adapter_protocol.hpp"
#include "kgwalk/error.hpp"
#include "kgwalk/io.hpp"

extern char** environ;

namespace kgwalk {

class ProcessAdapter : public Adapter {
 public:
  explicit ProcessAdapter(std::string command,
                          std::chrono::milliseconds timeout = std::chrono::minutes(10))
      : command_(std::move(command)), timeout_(timeout) {
    ::signal(SIGPIPE, SIG_IGN);
  }

  ProcessAdapter(const ProcessAdapter&) = delete;
  ProcessAdapter& operator=(const ProcessAdapter&) = delete;

  ~ProcessAdapter() override {
    close_stdin();
    if (pid_ > 0) {
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
    close_fd(out_fd_);
  }

  std::string name() const override { return "process(" + command_ + ")"; }

  std::vector<AdapterResponse> serve(std::span<const AdapterRequest> batch) override {
    if (pid_ <= 0) start();
    if (in_fd_ < 0) throw AdapterError("adapter process input already closed", false, ids_of(batch));

    std::string payload;
    for (const auto& r : batch) payload += io::dump(to_json(r)) + '\n';
    payload += '\n';
    std::thread writer([this, payload = std::move(payload)] { write_all(payload); });

    std::unordered_map<std::string, AdapterResponse> received;
    std::unordered_map<std::string, std::size_t> wanted;
    for (std::size_t i = 0; i < batch.size(); ++i) wanted.emplace(batch[i].id, i);
    std::string failure;
    bool eof = false;
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    while (received.size() < batch.size() && failure.empty()) {
      auto line = next_line(deadline, eof);
      if (!line) {
        failure = eof ? "adapter process closed its output" : "adapter process timed out";
        break;
      }
      if (line->find_first_not_of(" \t\r") == std::string::npos) continue;
      auto j = nlohmann::json::parse(*line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j["id"].is_string() ||
          !j.contains("output") || !j["output"].is_string()) {
        failure = "adapter process sent a malformed response line: " + line->substr(0, 200);
        break;
      }
      AdapterResponse resp = response_from_json(j, 0);
      if (!wanted.count(resp.id)) {
        failure = "adapter process answered unknown id '" + resp.id + "'";
        break;
      }
      received.insert_or_assign(resp.id, std::move(resp));
    }
    if (!failure.empty()) ::kill(-pid_, SIGTERM);
    writer.join();
    if (!failure.empty()) close_stdin();

    if (!failure.empty()) {
      const int code = reap();
      if (code > 0) failure += " (exit status " + std::to_string(code) + ")";
      std::vector<std::string> missing;
      for (const auto& r : batch)
        if (!received.count(r.id)) missing.push_back(r.id);
      if (!missing.empty()) {
        failure += "; missing ids:";
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i) failure += " " + missing[i];
      }
      throw AdapterError(failure, !received.empty(), std::move(missing));
    }

    std::vector<AdapterResponse> out;
    out.reserve(batch.size());
    for (const auto& r : batch) out.push_back(std::move(received.at(r.id)));
    return out;
  }

  // Closes the child's input and waits for it. Throws AdapterError on a
  // non-zero exit status. Returns the exit status (0) otherwise.
  int finish() {
    if (pid_ <= 0) return exit_code_.value_or(0);
    close_stdin();
    const int code = reap();
    if (code != 0)
      throw AdapterError("adapter process exited with status " + std::to_string(code), false);
    return code;
  }

 private:
  static void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }

  static std::vector<std::string> ids_of(std::span<const AdapterRequest> batch) {
    std::vector<std::string> ids;
    for (const auto& r : batch) ids.push_back(r.id);
    return ids;
  }

  void close_stdin() { close_fd(in_fd_); }

  int reap() {
    if (pid_ > 0) {
      int status = 0;
      while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {}
      exit_code_ = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
      pid_ = -1;
      close_fd(out_fd_);
    }
    return exit_code_.value_or(0);
  }

  void start() {
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0 || ::pipe2(from_child, O_CLOEXEC) != 0)
      throw AdapterError(std::string("pipe: ") + std::strerror(errno), false);
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
    std::string sh = "/bin/sh";
    std::string dash_c = "-c";
    char* argv[] = {sh.data(), dash_c.data(), command_.data(), nullptr};
    // Own process group, so a kill reaches whatever the shell started.
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attr, 0);
    pid_t pid = -1;
    const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, &attr, argv, environ);
    posix_spawnattr_destroy(&attr);
    posix_spawn_file_actions_destroy(&actions);
    ::close(to_child[0]);
    ::close(from_child[1]);
    if (rc != 0) {
      ::close(to_child[1]);
      ::close(from_child[0]);
      throw AdapterError("cannot start adapter process: " + std::string(std::strerror(rc)), false);
    }
    pid_ = pid;
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
    buffer_.clear();
  }

  void write_all(const std::string& data) {
    std::size_t done = 0;
    while (done < data.size() && in_fd_ >= 0) {
      const ssize_t n = ::write(in_fd_, data.data() + done, data.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        return;  // EPIPE: the reader side reports the failure
      }
      done += static_cast<std::size_t>(n);
    }
  }

  std::optional<std::string> next_line(std::chrono::steady_clock::time_point deadline, bool& eof) {
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return std::nullopt;
      pollfd pfd{out_fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
      if (ready < 0) {
        if (errno == EINTR) continue;
        return std::nullopt;
      }
      if (ready == 0) return std::nullopt;
      char chunk[65536];
      const ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        eof = true;
        return std::nullopt;
      }
      if (n == 0) {
        eof = true;
        return std::nullopt;
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  std::string command_;
  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  std::string buffer_;
  std::optional<int> exit_code_;
};

}  // namespace kgwalk
