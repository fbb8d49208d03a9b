#pragma once

// Interactive plays driven one environment move at a time.
//
// A session keeps the environment's answers so far and re-executes the play
// from the start after each submitted move; plays are deterministic, so the
// result equals a batch run with the same answers.

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "taskcl/engine.hpp"

namespace taskcl {

enum class SessionStatus { AwaitingEnv, Succeeded, Failed, BudgetExhausted };

/// "awaiting_env", "succeeded", "failed" or "budget_exhausted".
const char* to_string(SessionStatus s);

struct SessionState {
  SessionStatus status = SessionStatus::Failed;
  std::optional<EnvRequest> pending;
  Transcript transcript;
};

/// What a human submits: a branch index or the text of a witness term.
struct SubmittedMove {
  std::variant<MoveEntry::Pick, MoveEntry::TermText> payload;
  /// When set, the move is refused with IllegalState unless it answers the
  /// request pending at this site.
  std::optional<std::string> expected_site;
};

class SessionManager {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionManager(std::chrono::seconds ttl = std::chrono::hours(1),
                          std::function<Clock::time_point()> now = Clock::now);

  /// Throws ParseError or PolarityError.
  std::pair<std::string, SessionState> create(const std::string& program_text,
                                              const std::string& query_text,
                                              const Limits& limits = {});
  /// Throws UnknownSession.
  SessionState get(const std::string& id);
  /// Throws UnknownSession, IllegalState, OutOfRange or BadTerm. A rejected
  /// move leaves the session unchanged.
  SessionState submit(const std::string& id, const SubmittedMove& move);
  /// Throws UnknownSession.
  void close(const std::string& id);

  /// Drops sessions idle for longer than the TTL; returns how many.
  std::size_t expire();
  std::size_t size();

 private:
  struct Session {
    std::mutex mutex;
    std::vector<AgentDecl> program;
    Formula query;
    Limits limits;
    std::vector<EnvResponse> answers;
    SessionState state;
    Clock::time_point last_used;
    bool closed = false;
  };

  std::shared_ptr<Session> find(const std::string& id);
  std::string fresh_id();

  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::chrono::seconds ttl_;
  std::function<Clock::time_point()> now_;
};

/// Runs one play against a fixed list of answers and reports where it stopped.
SessionState replay(const std::vector<AgentDecl>& program, const Formula& query,
                    const std::vector<EnvResponse>& answers, const Limits& limits = {});

}  // namespace taskcl
