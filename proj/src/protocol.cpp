#include "taskcl/protocol.hpp"

#include <algorithm>
#include <limits>
#include <regex>

#include "httplib.h"
#include "json.hpp"
#include "taskcl/errors.hpp"

namespace taskcl {

using nlohmann::json;

namespace {

json state_value(const SessionState& s) {
  json out;
  out["status"] = to_string(s.status);
  if (s.pending) {
    const EnvRequest& r = *s.pending;
    json p;
    p["site"] = r.site;
    if (r.kind == RequestKind::ChooseBranch) {
      p["kind"] = "choose_branch";
      p["arity"] = r.arity;
      p["options"] = r.options;
    } else {
      p["kind"] = "choose_term";
      p["binder"] = r.binder;
    }
    out["pending"] = std::move(p);
  }
  json moves = json::array();
  for (const Move& m : s.transcript.moves)
    moves.push_back({{"who", m.chooser == Chooser::Machine ? "machine" : "env"},
                     {"site", m.site},
                     {"move", describe(m)}});
  out["transcript"] = std::move(moves);
  if (s.status == SessionStatus::Succeeded) {
    json b = json::object();
    for (const auto& [name, value] : s.transcript.bindings) b[name] = pretty(value);
    out["bindings"] = std::move(b);
  }
  return out;
}

HttpReply reply(int status, const json& body) { return {status, body.dump()}; }

HttpReply error(int status, const std::string& kind, const std::string& message) {
  return reply(status, {{"error", kind}, {"message", message}});
}

HttpReply create(SessionManager& sessions, const std::string& body) {
  json req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object())
    return error(400, "BadRequest", "request body must be a JSON object");
  if (!req.contains("program") || !req["program"].is_string() || !req.contains("query") ||
      !req["query"].is_string())
    return error(400, "BadRequest", "\"program\" and \"query\" strings are required");
  Limits limits;
  if (req.contains("max_steps")) {
    if (!req["max_steps"].is_number_integer() || req["max_steps"].get<std::int64_t>() < 1)
      return error(400, "BadRequest", "\"max_steps\" must be a positive integer");
    limits.max_steps = req["max_steps"].get<std::uint64_t>();
  }
  try {
    auto [id, state] = sessions.create(req["program"].get<std::string>(),
                                       req["query"].get<std::string>(), limits);
    return reply(201, {{"id", id}, {"state", state_value(state)}});
  } catch (const ParseError& e) {
    return reply(400, {{"error", "ParseError"},
                       {"message", e.what()},
                       {"line", e.line()},
                       {"column", e.column()}});
  } catch (const PolarityError& e) {
    return error(400, "PolarityError", e.what());
  }
}

HttpReply submit(SessionManager& sessions, const std::string& id, const std::string& body) {
  json req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object())
    return error(400, "BadRequest", "request body must be a JSON object");
  SubmittedMove move;
  if (req.contains("pick") && req["pick"].is_number_integer() && !req.contains("term")) {
    const auto v = req["pick"].get<std::int64_t>();
    move.payload = MoveEntry::Pick{
        static_cast<int>(std::clamp<std::int64_t>(v, -1, std::numeric_limits<int>::max()))};
  } else if (req.contains("term") && req["term"].is_string() && !req.contains("pick")) {
    move.payload = MoveEntry::TermText{req["term"].get<std::string>()};
  } else {
    return error(400, "BadRequest", "body must be {\"pick\": int} or {\"term\": string}");
  }
  if (req.contains("expected_site")) {
    if (!req["expected_site"].is_string())
      return error(400, "BadRequest", "\"expected_site\" must be a string");
    move.expected_site = req["expected_site"].get<std::string>();
  }
  try {
    return reply(200, {{"state", state_value(sessions.submit(id, move))}});
  } catch (const UnknownSession& e) {
    return error(404, "UnknownSession", e.what());
  } catch (const IllegalState& e) {
    return error(409, "IllegalState", e.what());
  } catch (const OutOfRange& e) {
    return error(422, "OutOfRange", e.what());
  } catch (const BadTerm& e) {
    return error(422, "BadTerm", e.what());
  }
}

}  // namespace

std::string state_json(const SessionState& s) { return state_value(s).dump(); }

HttpReply handle_request(SessionManager& sessions, const std::string& method,
                         const std::string& path, const std::string& body) {
  static const std::regex one(R"(^/sessions/([0-9A-Za-z_-]+)$)");
  static const std::regex moves(R"(^/sessions/([0-9A-Za-z_-]+)/moves$)");
  std::smatch m;
  try {
    if (path == "/sessions") {
      if (method == "POST") return create(sessions, body);
      return error(405, "MethodNotAllowed", method + " " + path);
    }
    if (std::regex_match(path, m, moves)) {
      if (method == "POST") return submit(sessions, m[1], body);
      return error(405, "MethodNotAllowed", method + " " + path);
    }
    if (std::regex_match(path, m, one)) {
      if (method == "GET") return reply(200, {{"state", state_value(sessions.get(m[1]))}});
      if (method == "DELETE") {
        sessions.close(m[1]);
        return {204, ""};
      }
      return error(405, "MethodNotAllowed", method + " " + path);
    }
  } catch (const UnknownSession& e) {
    return error(404, "UnknownSession", e.what());
  } catch (const Error& e) {
    return error(500, "InternalError", e.what());
  }
  return error(404, "NotFound", path);
}

struct Server::Impl {
  SessionManager& sessions;
  httplib::Server http;
  explicit Impl(SessionManager& s) : sessions(s) {
    // No SO_REUSEPORT: a second server on a busy port must fail to bind.
    http.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
  }
};

Server::Server(SessionManager& sessions, std::optional<std::string> static_dir)
    : impl_(std::make_unique<Impl>(sessions)) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    HttpReply r = handle_request(impl_->sessions, req.method, req.path, req.body);
    res.status = r.status;
    if (!r.body.empty()) res.set_content(r.body, "application/json");
  };
  impl_->http.Post("/sessions", route);
  impl_->http.Get(R"(/sessions/[^/]+)", route);
  impl_->http.Delete(R"(/sessions/[^/]+)", route);
  impl_->http.Post(R"(/sessions/[^/]+/moves)", route);
  if (static_dir) impl_->http.set_mount_point("/", *static_dir);
}

Server::~Server() = default;

bool Server::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->http.bind_to_any_port(host);
    return port_ > 0;
  }
  if (!impl_->http.bind_to_port(host, port)) return false;
  port_ = port;
  return true;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

}  // namespace taskcl
