#pragma once

// Game-semantic proof search.
//
// The machine plays the query against the agents' resources. It owns the
// choices of ⊔/⊔x in the goal and of ⊓/⊓x in resources, plus every clause
// selection and copy of a `!` resource; the environment owns the duals and
// is consulted through an EnvStrategy. Machine choices are explored
// depth-first with backtracking, but never across an environment move.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "taskcl/formula.hpp"
#include "taskcl/syntax.hpp"
#include "taskcl/term.hpp"

namespace taskcl {

enum class Chooser { Machine, Environment };

struct Move {
  struct Pick {
    int index;
  };
  struct Witness {
    Term term;
    std::string binder;
  };
  struct Copy {};

  Chooser chooser;
  std::string site;
  std::variant<Pick, Witness, Copy> payload;
};

/// "pick 1", "witness 5" or "copy".
std::string describe(const Move& m);
/// "<n>. <machine|env> @ <site>: <describe>"
std::string trace_line(std::size_t n, const Move& m);

struct Consumption {
  enum class Kind { Goal, Rewrite };
  std::uint64_t resource_id;
  std::string site;
  Term atom;
  Kind kind;
};

enum class Outcome { Success, Failure, BudgetExhausted };
const char* to_string(Outcome o);

struct Transcript {
  std::vector<Move> moves;
  std::vector<Consumption> consumed;
  Outcome outcome = Outcome::Failure;
  /// Answers for the query's existential variables, in binding order.
  std::vector<std::pair<std::string, Term>> bindings;
  std::vector<std::string> diagnostics;
  std::uint64_t steps = 0;
};

struct Limits {
  std::uint64_t max_steps = 100000;
  std::uint64_t term_fuel = kDefaultTermFuel;
};

enum class RequestKind { ChooseBranch, ChooseTerm };

struct EnvRequest {
  std::string site;
  RequestKind kind = RequestKind::ChooseBranch;
  int arity = 0;
  std::vector<std::string> options;  // pretty-printed branches
  std::string binder;                // ChooseTerm only
};

struct EnvPick {
  int index;
};
struct EnvWitness {
  Term term;
};
using EnvResponse = std::variant<EnvPick, EnvWitness>;

class EnvStrategy {
 public:
  virtual ~EnvStrategy() = default;
  /// Throws EnvExhausted when no answer is available.
  virtual EnvResponse respond(const EnvRequest& request) = 0;
};

/// Answers from a move script, strictly in order.
class ScriptedEnv : public EnvStrategy {
 public:
  explicit ScriptedEnv(MoveScript script) : script_(std::move(script)) {}
  EnvResponse respond(const EnvRequest& request) override;
  std::size_t used() const { return next_; }

 private:
  MoveScript script_;
  std::size_t next_ = 0;
};

/// Replays pre-built responses; used by the winnability enumeration.
class ReplayEnv : public EnvStrategy {
 public:
  explicit ReplayEnv(std::vector<EnvResponse> responses) : responses_(std::move(responses)) {}
  EnvResponse respond(const EnvRequest& request) override;

 private:
  std::vector<EnvResponse> responses_;
  std::size_t next_ = 0;
};

/// Never answers.
class NoEnv : public EnvStrategy {
 public:
  EnvResponse respond(const EnvRequest& request) override;
};

/// Rejects `!` in goal position, ∨ in resource position and atoms whose
/// head is not a constant.
void check_polarity(const std::vector<AgentDecl>& program, const Formula& query);

/// A play that stopped either at a terminal outcome or because the strategy
/// had no answer for `pending`.
struct PlayResult {
  Transcript transcript;
  std::optional<EnvRequest> pending;
};

PlayResult play(const std::vector<AgentDecl>& program, const Formula& query, EnvStrategy& env,
                const Limits& limits = {});

/// Runs one play to completion. Throws PolarityError, EnvExhausted,
/// OutOfRange, BadTerm or ScriptMismatch.
Transcript solve(const std::vector<AgentDecl>& program, const Formula& query, EnvStrategy& env,
                 const Limits& limits = {});

/// Witness candidates per environment ChooseTerm site. A key may also be a
/// binder name, used when no entry matches the site.
using EnvDomains = std::map<std::string, std::vector<Term>>;

struct WinReport {
  bool winnable = true;
  std::size_t plays = 0;
  std::optional<Transcript> losing_play;
};

WinReport verify_winnable(const std::vector<AgentDecl>& program, const Formula& query,
                          const EnvDomains& domains, const Limits& limits = {});

}  // namespace taskcl
