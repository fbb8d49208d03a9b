#pragma once

// JSON-over-HTTP front end of the session registry.

#include <memory>
#include <optional>
#include <string>

#include "taskcl/session.hpp"

namespace taskcl {

struct HttpReply {
  int status = 200;
  std::string body;  // JSON text, empty for 204
};

/// The wire form of a session state.
std::string state_json(const SessionState& s);

/// Routes one request:
///   POST /sessions, GET /sessions/{id}, POST /sessions/{id}/moves,
///   DELETE /sessions/{id}.
HttpReply handle_request(SessionManager& sessions, const std::string& method,
                         const std::string& path, const std::string& body);

class Server {
 public:
  explicit Server(SessionManager& sessions, std::optional<std::string> static_dir = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds the listening socket; port 0 picks a free one. Returns false if
  /// the address is unavailable.
  bool bind(const std::string& host, int port);
  int port() const { return port_; }
  /// Serves until stop() is called.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace taskcl
