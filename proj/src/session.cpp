#include "taskcl/session.hpp"

#include <random>

#include "taskcl/errors.hpp"

namespace taskcl {

const char* to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::AwaitingEnv:
      return "awaiting_env";
    case SessionStatus::Succeeded:
      return "succeeded";
    case SessionStatus::Failed:
      return "failed";
    case SessionStatus::BudgetExhausted:
      return "budget_exhausted";
  }
  return "?";
}

SessionState replay(const std::vector<AgentDecl>& program, const Formula& query,
                    const std::vector<EnvResponse>& answers, const Limits& limits) {
  ReplayEnv env(answers);
  PlayResult r = play(program, query, env, limits);
  SessionState s;
  s.transcript = std::move(r.transcript);
  s.pending = std::move(r.pending);
  if (s.pending)
    s.status = SessionStatus::AwaitingEnv;
  else if (s.transcript.outcome == Outcome::Success)
    s.status = SessionStatus::Succeeded;
  else if (s.transcript.outcome == Outcome::BudgetExhausted)
    s.status = SessionStatus::BudgetExhausted;
  else
    s.status = SessionStatus::Failed;
  return s;
}

SessionManager::SessionManager(std::chrono::seconds ttl, std::function<Clock::time_point()> now)
    : ttl_(ttl), now_(std::move(now)) {}

std::string SessionManager::fresh_id() {
  static thread_local std::random_device device;
  std::uniform_int_distribution<std::uint32_t> dist;
  static const char* hex = "0123456789abcdef";
  std::string id;
  for (int word = 0; word < 4; ++word) {
    std::uint32_t v = dist(device);
    for (int i = 0; i < 8; ++i, v >>= 4) id.push_back(hex[v & 15]);
  }
  return id;
}

std::pair<std::string, SessionState> SessionManager::create(const std::string& program_text,
                                                            const std::string& query_text,
                                                            const Limits& limits) {
  auto s = std::make_shared<Session>();
  s->program = parse_program(program_text);
  s->query = parse_query(query_text);
  s->limits = limits;
  s->state = replay(s->program, s->query, s->answers, limits);
  s->last_used = now_();
  SessionState view = s->state;

  expire();
  std::lock_guard lock(mutex_);
  std::string id;
  do id = fresh_id();
  while (sessions_.count(id));
  sessions_.emplace(id, std::move(s));
  return {id, std::move(view)};
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) {
  expire();
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw UnknownSession(id);
  return it->second;
}

SessionState SessionManager::get(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  if (s->closed) throw UnknownSession(id);
  s->last_used = now_();
  return s->state;
}

SessionState SessionManager::submit(const std::string& id, const SubmittedMove& move) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  if (s->closed) throw UnknownSession(id);
  s->last_used = now_();
  if (s->state.status != SessionStatus::AwaitingEnv)
    throw IllegalState(std::string("session is ") + to_string(s->state.status) +
                       ", not awaiting an environment move");
  const EnvRequest& req = *s->state.pending;
  if (move.expected_site && *move.expected_site != req.site)
    throw IllegalState("the pending request is at " + req.site + ", not " +
                       *move.expected_site);

  EnvResponse answer = EnvPick{0};
  if (auto p = std::get_if<MoveEntry::Pick>(&move.payload)) {
    if (req.kind != RequestKind::ChooseBranch)
      throw BadTerm("a witness term is required at " + req.site);
    if (p->index < 0 || p->index >= req.arity)
      throw OutOfRange("pick " + std::to_string(p->index) + " out of range for " +
                       std::to_string(req.arity) + " branches at " + req.site);
    answer = EnvPick{p->index};
  } else {
    if (req.kind != RequestKind::ChooseTerm)
      throw BadTerm("a branch pick is required at " + req.site);
    answer = EnvWitness{parse_closed_term(std::get<MoveEntry::TermText>(move.payload).text)};
  }

  std::vector<EnvResponse> answers = s->answers;
  answers.push_back(std::move(answer));
  SessionState next = replay(s->program, s->query, answers, s->limits);
  s->answers = std::move(answers);
  s->state = std::move(next);
  return s->state;
}

void SessionManager::close(const std::string& id) {
  std::shared_ptr<Session> s;
  {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw UnknownSession(id);
    s = std::move(it->second);
    sessions_.erase(it);
  }
  std::lock_guard lock(s->mutex);
  s->closed = true;
}

std::size_t SessionManager::expire() {
  const auto now = now_();
  std::vector<std::shared_ptr<Session>> dropped;
  {
    std::lock_guard lock(mutex_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      std::unique_lock session_lock(it->second->mutex, std::try_to_lock);
      if (session_lock && now - it->second->last_used > ttl_) {
        it->second->closed = true;
        session_lock.unlock();
        dropped.push_back(std::move(it->second));
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
  }
  return dropped.size();
}

std::size_t SessionManager::size() {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

}  // namespace taskcl
