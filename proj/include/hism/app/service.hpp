#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>

#include "hism/app/config.hpp"

namespace hism::app {

struct ServiceResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Hosts live sessions: issues scripts and persists uploaded logs in the
/// standard session layout. Scripts awaiting upload live in <workdir>/pending.
class SessionService {
 public:
  explicit SessionService(RunConfig cfg);

  ServiceResponse new_session(std::optional<std::uint64_t> seed);
  /// Body: {"events_jsonl": "...", "gaze_csv": "..."}.
  ServiceResponse upload(const std::string& session_id, const std::string& body);
  ServiceResponse health() const;

 private:
  std::mutex& session_mutex(const std::string& id);

  RunConfig cfg_;
  std::mutex mutex_;
  int next_index_ = 0;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

/// HTTP front end: GET /healthz, GET /api/session/new?seed=S,
/// POST /api/log/{id}, static UI assets at /.
class HttpServer {
 public:
  explicit HttpServer(const RunConfig& cfg);
  ~HttpServer();

  /// Binds to 127.0.0.1 when loopback_only, else 0.0.0.0; port 0 picks a free port.
  int bind(int port, bool loopback_only = false);
  /// Serves until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

void cmd_serve(const RunConfig& cfg, std::ostream& log);

}  // namespace hism::app
