#include "taskcl/engine.hpp"

#include <algorithm>
#include <functional>

#include "stack.hpp"
#include "taskcl/builtins.hpp"
#include "taskcl/errors.hpp"
#include "taskcl/unify.hpp"

namespace taskcl {

std::string describe(const Move& m) {
  if (auto p = std::get_if<Move::Pick>(&m.payload)) return "pick " + std::to_string(p->index);
  if (auto w = std::get_if<Move::Witness>(&m.payload)) return "witness " + pretty(w->term);
  return "copy";
}

std::string trace_line(std::size_t n, const Move& m) {
  return std::to_string(n) + ". " + (m.chooser == Chooser::Machine ? "machine" : "env") + " @ " +
         m.site + ": " + describe(m);
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Success:
      return "success";
    case Outcome::Failure:
      return "failure";
    case Outcome::BudgetExhausted:
      return "budget exhausted";
  }
  return "?";
}

EnvResponse ScriptedEnv::respond(const EnvRequest& request) {
  if (next_ >= script_.entries.size()) throw EnvExhausted(request.site);
  const MoveEntry& e = script_.entries[next_];
  if (e.expected_site && *e.expected_site != request.site)
    throw ScriptMismatch("move " + std::to_string(next_ + 1) + " expects site " +
                         *e.expected_site + " but the pending request is at " + request.site);
  ++next_;
  if (auto p = std::get_if<MoveEntry::Pick>(&e.payload)) return EnvPick{p->index};
  return EnvWitness{parse_closed_term(std::get<MoveEntry::TermText>(e.payload).text)};
}

EnvResponse ReplayEnv::respond(const EnvRequest& request) {
  if (next_ >= responses_.size()) throw EnvExhausted(request.site);
  return responses_[next_++];
}

EnvResponse NoEnv::respond(const EnvRequest& request) { throw EnvExhausted(request.site); }

// ---------------------------------------------------------------------------
// Polarity

namespace {

void check_atom(const Term& t) {
  Term n = beta_normalize(t);
  Spine s = spine(n);
  if (!s.head.is(TermKind::Const) && !s.head.is(TermKind::Int))
    throw PolarityError("atom head must be a constant: " + pretty(n));
}

void check_resource(const Formula& f);

void check_goal(const Formula& f) {
  switch (f.op()) {
    case Op::Atom:
      check_atom(f.term());
      return;
    case Op::Bang:
      throw PolarityError("'!' is not allowed in goal position: " + pretty(f));
    case Op::Impl:
      check_resource(f.lhs());
      check_goal(f.rhs());
      return;
    case Op::CAll:
    case Op::CEx:
      check_goal(f.body());
      return;
    default:
      check_goal(f.lhs());
      check_goal(f.rhs());
  }
}

void check_resource(const Formula& f) {
  switch (f.op()) {
    case Op::Atom:
      check_atom(f.term());
      return;
    case Op::POr:
      throw PolarityError("'|' is not supported in resource position: " + pretty(f));
    case Op::Impl:
      check_goal(f.lhs());
      check_resource(f.rhs());
      return;
    case Op::CAll:
    case Op::CEx:
    case Op::Bang:
      check_resource(f.body());
      return;
    default:
      check_resource(f.lhs());
      check_resource(f.rhs());
  }
}

}  // namespace

void check_polarity(const std::vector<AgentDecl>& program, const Formula& query) {
  for (const auto& d : program) {
    try {
      check_resource(d.formula);
    } catch (const PolarityError& e) {
      throw PolarityError("agent " + d.name + ": " + e.what());
    }
  }
  check_goal(query);
}

// ---------------------------------------------------------------------------
// Search

namespace {

struct BudgetExceeded {};

using K = std::function<bool()>;
using Sited = std::pair<Formula, std::string>;

Formula strip_quantifiers(Formula f) {
  while (f.is(Op::CAll)) f = f.body();
  return f;
}

class Play {
 public:
  Play(const std::vector<AgentDecl>& program, const Formula& query, EnvStrategy& env,
       const Limits& limits)
      : program_(program), query_(query), env_(env), limits_(limits) {}

  PlayResult run() {
    PlayResult result;
    try {
      const bool ok = start(0);
      result.transcript = finish(ok ? Outcome::Success : Outcome::Failure);
    } catch (const BudgetExceeded&) {
      result.transcript = finish(Outcome::BudgetExhausted);
    } catch (const ArithError& e) {
      diagnostics_.push_back(e.what());
      result.transcript = finish(Outcome::Failure);
    } catch (const FuelExhausted& e) {
      diagnostics_.push_back(e.what());
      result.transcript = finish(Outcome::Failure);
    } catch (const EnvExhausted&) {
      if (!last_request_) throw;
      result.transcript = finish(Outcome::Failure);
      result.pending = *last_request_;
    }
    return result;
  }

 private:
  struct Resource {
    std::uint64_t id;
    std::string site;
    Formula f;
    bool consumed = false;
    bool active = true;
  };

  struct Banked {
    std::string site;
    Formula body;
  };

  struct FlagChange {
    std::size_t index;
    bool consumed_flag;
    bool old;
  };

  struct Snapshot {
    std::size_t linear, banked, moves, consumed, answers, flags, bindings;
  };

  Snapshot snap() const {
    return {linear_.size(), banked_.size(), moves_.size(), consumed_.size(),
            answers_.size(), flags_.size(), bindings_.mark()};
  }

  void restore(const Snapshot& s) {
    if (aborted_) return;
    while (flags_.size() > s.flags) {
      const FlagChange& c = flags_.back();
      (c.consumed_flag ? linear_[c.index].consumed : linear_[c.index].active) = c.old;
      flags_.pop_back();
    }
    linear_.resize(s.linear);
    banked_.resize(s.banked);
    moves_.resize(s.moves);
    consumed_.resize(s.consumed);
    answers_.resize(s.answers);
    bindings_.undo_to(s.bindings);
  }

  void step() {
    if (++steps_ > limits_.max_steps) throw BudgetExceeded{};
  }

  void diagnose(std::string msg) {
    if (diagnostics_.size() >= 32) return;
    if (std::find(diagnostics_.begin(), diagnostics_.end(), msg) == diagnostics_.end())
      diagnostics_.push_back(std::move(msg));
  }

  Term norm(const Term& t) const {
    return normalize_arith(beta_normalize(bindings_.resolve(t, limits_.term_fuel),
                                          limits_.term_fuel));
  }

  bool unify_atoms(const Term& a, const Term& b) {
    Term x = norm(a);
    Term y = norm(b);
    UnifyStatus s = unify_into(x, y, bindings_, limits_.term_fuel);
    if (s == UnifyStatus::NonPattern)
      diagnose("unification outside the pattern fragment: " + pretty(x) + " =?= " + pretty(y));
    return s == UnifyStatus::Ok;
  }

  bool usable(std::size_t i) const { return linear_[i].active && !linear_[i].consumed; }

  void consume(std::size_t i, Consumption::Kind kind) {
    flags_.push_back({i, true, linear_[i].consumed});
    linear_[i].consumed = true;
    consumed_.push_back({linear_[i].id, linear_[i].site,
                         linear_[i].f.is(Op::Atom) ? linear_[i].f.term() : Term(), kind});
  }

  void deactivate(std::size_t i) {
    flags_.push_back({i, false, linear_[i].active});
    linear_[i].active = false;
  }

  void record(Chooser who, std::string site, decltype(Move::payload) payload) {
    moves_.push_back(Move{who, std::move(site), std::move(payload)});
  }

  Term machine_witness(const std::string& binder, const std::string& site) {
    Term m = bindings_.fresh(binder);
    record(Chooser::Machine, site, Move::Witness{m, binder});
    return m;
  }

  bool after_env(bool ok) {
    if (!ok) aborted_ = true;
    return ok;
  }

  int env_pick(const std::string& site, const Formula& f) {
    EnvRequest req;
    req.site = site;
    req.kind = RequestKind::ChooseBranch;
    req.arity = 2;
    req.options = {pretty(resolved(f.lhs())), pretty(resolved(f.rhs()))};
    last_request_ = req;
    EnvResponse r = env_.respond(req);
    last_request_.reset();
    auto pick = std::get_if<EnvPick>(&r);
    if (!pick) throw BadTerm("expected a branch pick at " + site + ", got a term");
    if (pick->index < 0 || pick->index >= req.arity)
      throw OutOfRange("pick " + std::to_string(pick->index) + " out of range for " +
                       std::to_string(req.arity) + " branches at " + site);
    record(Chooser::Environment, site, Move::Pick{pick->index});
    return pick->index;
  }

  Term env_witness(const std::string& site, const std::string& binder) {
    EnvRequest req;
    req.site = site;
    req.kind = RequestKind::ChooseTerm;
    req.binder = binder;
    last_request_ = req;
    EnvResponse r = env_.respond(req);
    last_request_.reset();
    auto w = std::get_if<EnvWitness>(&r);
    if (!w) throw BadTerm("expected a witness term at " + site + ", got a pick");
    if (w->term.has_metas() || w->term.loose_bound() != 0)
      throw BadTerm("witness term is not closed at " + site);
    Term t = normalize_arith(beta_normalize(w->term, limits_.term_fuel));
    record(Chooser::Environment, site, Move::Witness{t, binder});
    return t;
  }

  Formula resolved(const Formula& f) const {
    if (bindings_.subst().empty()) return f;
    return map_atoms(f, [&](const Term& t, std::uint32_t) {
      return bindings_.resolve(t, limits_.term_fuel);
    });
  }

  // ---- driver --------------------------------------------------------------

  bool start(std::size_t i) {
    if (i < program_.size())
      return add_resource(program_[i].formula, "res[" + std::to_string(i) + "]",
                          [&] { return start(i + 1); });
    return prove(query_, "goal", true, [] { return true; });
  }

  // ---- left side: resources entering the context ---------------------------

  bool add_resource(const Formula& f, const std::string& site, const K& k) {
    step();
    switch (f.op()) {
      case Op::PAnd:
        return add_resource(f.lhs(), site + "/0",
                            [&] { return add_resource(f.rhs(), site + "/1", k); });
      case Op::Bang:
        banked_.push_back({site, f.body()});
        return k();
      case Op::COr: {
        const int i = env_pick(site + "/cor", f);
        return after_env(add_resource(f.child(i), site + "/" + std::to_string(i), k));
      }
      case Op::CEx: {
        Term t = env_witness(site + "/cex", f.binder());
        return after_env(add_resource(instantiate(f.body(), t), site + "/0", k));
      }
      default:
        linear_.push_back({next_id_++, site, f});
        return k();
    }
  }

  bool add_all(const std::vector<Sited>& rs, std::size_t i, const K& k) {
    if (i == rs.size()) return k();
    return add_resource(rs[i].first, rs[i].second, [&] { return add_all(rs, i + 1, k); });
  }

  // ---- right side: goals ---------------------------------------------------

  bool prove(const Formula& g, const std::string& site, bool top, const K& k) {
    step();
    switch (g.op()) {
      case Op::Atom:
        return prove_atom(g.term(), site, k);
      case Op::PAnd:
        return prove(g.lhs(), site + "/0", top,
                     [&] { return prove(g.rhs(), site + "/1", top, k); });
      case Op::POr: {
        const Snapshot s = snap();
        if (prove(g.lhs(), site + "/0", top, k)) return true;
        if (aborted_) return false;
        restore(s);
        return prove(g.rhs(), site + "/1", top, k);
      }
      case Op::CAnd: {
        const int i = env_pick(site + "/cand", g);
        return after_env(prove(g.child(i), site + "/" + std::to_string(i), top, k));
      }
      case Op::COr:
        for (int i = 0; i < 2; ++i) {
          const Snapshot s = snap();
          record(Chooser::Machine, site + "/cor", Move::Pick{i});
          if (prove(g.child(i), site + "/" + std::to_string(i), top, k)) return true;
          if (aborted_) return false;
          restore(s);
        }
        return false;
      case Op::CAll: {
        Term t = env_witness(site + "/call", g.binder());
        return after_env(prove(instantiate(g.body(), t), site + "/0", top, k));
      }
      case Op::CEx: {
        Term m = machine_witness(g.binder(), site + "/cex");
        if (top) answers_.emplace_back(g.binder(), m);
        return prove(instantiate(g.body(), m), site + "/0", top, k);
      }
      case Op::Impl: {
        const std::size_t first = linear_.size();
        return add_resource(g.lhs(), site + "/0", [&] {
          const std::size_t last = linear_.size();
          return prove(g.rhs(), site + "/1", top, [&] {
            // Hypotheses are scoped to the consequent; leftovers are dropped.
            for (std::size_t i = first; i < last; ++i)
              if (usable(i)) deactivate(i);
            return k();
          });
        });
      }
      case Op::Bang:
        throw PolarityError("'!' in goal position");
    }
    return false;
  }

  bool prove_all(const std::vector<Sited>& goals, std::size_t i, const K& k) {
    if (i == goals.size()) return k();
    return prove(goals[i].first, goals[i].second, false,
                 [&] { return prove_all(goals, i + 1, k); });
  }

  bool prove_atom(const Term& atom, const std::string& site, const K& k) {
    Term a = norm(atom);
    Spine s = spine(a);
    if (s.head.is(TermKind::Const) && is_builtin_pred(s.head.name())) {
      switch (eval_pred(s.head.name(), s.args)) {
        case Truth::True:
          return k();
        case Truth::False:
          return false;
        case Truth::NotGround:
          diagnose("builtin goal not ground: " + pretty(a));
          return false;
      }
    }
    return backchain(a, site, k);
  }

  // ---- backchaining --------------------------------------------------------

  bool backchain(const Term& a, const std::string& site, const K& k) {
    const std::size_t nlin = linear_.size();
    const std::size_t nbank = banked_.size();

    for (std::size_t i = 0; i < nlin; ++i) {
      if (!usable(i) || !linear_[i].f.is(Op::Atom)) continue;
      step();
      const Snapshot s = snap();
      consume(i, Consumption::Kind::Goal);
      if (unify_atoms(linear_[i].f.term(), a) && k()) return true;
      if (aborted_) return false;
      restore(s);
    }
    for (int pass = 0; pass < 2; ++pass) {
      const bool atoms = pass == 0;
      for (std::size_t j = 0; j < nbank; ++j) {
        if (strip_quantifiers(banked_[j].body).is(Op::Atom) != atoms) continue;
        if (use_banked(j, a, k)) return true;
        if (aborted_) return false;
      }
      if (!atoms) break;
      for (std::size_t i = 0; i < nlin; ++i) {
        if (!usable(i) || linear_[i].f.is(Op::Atom)) continue;
        step();
        const Snapshot s = snap();
        consume(i, Consumption::Kind::Goal);
        const Resource r = linear_[i];
        if (focus(r.f, r.site, a, {}, k)) return true;
        if (aborted_) return false;
        restore(s);
      }
    }
    return rewrite(a, site, k);
  }

  bool use_banked(std::size_t j, const Term& a, const K& k) {
    step();
    const Snapshot s = snap();
    const Banked b = banked_[j];
    record(Chooser::Machine, b.site, Move::Copy{});
    if (focus(b.body, b.site + "/0", a, {}, k)) return true;
    if (!aborted_) restore(s);
    return false;
  }

  struct Pending {
    std::vector<Sited> bodies;
    std::vector<Sited> residual;
  };

  // Uses resource `r` to produce atom `a`: machine choices inside `r` are
  // explored, implication bodies become subgoals and unused parallel
  // components stay behind as new resources.
  bool focus(const Formula& r, const std::string& site, const Term& a, Pending p, const K& k) {
    step();
    switch (r.op()) {
      case Op::Atom: {
        if (!unify_atoms(r.term(), a)) return false;
        return prove_all(p.bodies, 0, [&] { return add_all(p.residual, 0, k); });
      }
      case Op::Impl:
        p.bodies.insert(p.bodies.begin(), Sited{r.lhs(), site + "/0"});
        return focus(r.rhs(), site + "/1", a, std::move(p), k);
      case Op::PAnd:
        for (int i = 0; i < 2; ++i) {
          const Snapshot s = snap();
          Pending q = p;
          q.residual.push_back({r.child(1 - i), site + "/" + std::to_string(1 - i)});
          if (focus(r.child(i), site + "/" + std::to_string(i), a, std::move(q), k)) return true;
          if (aborted_) return false;
          restore(s);
        }
        return false;
      case Op::CAnd:
        for (int i = 0; i < 2; ++i) {
          const Snapshot s = snap();
          record(Chooser::Machine, site + "/cand", Move::Pick{i});
          if (focus(r.child(i), site + "/" + std::to_string(i), a, p, k)) return true;
          if (aborted_) return false;
          restore(s);
        }
        return false;
      case Op::CAll: {
        Term m = machine_witness(r.binder(), site + "/call");
        return focus(instantiate(r.body(), m), site + "/0", a, std::move(p), k);
      }
      case Op::Bang:
        return focus(r.body(), site + "/0", a, std::move(p), k);
      case Op::COr: {
        const int i = env_pick(site + "/cor", r);
        return after_env(focus(r.child(i), site + "/" + std::to_string(i), a, std::move(p), k));
      }
      case Op::CEx: {
        Term t = env_witness(site + "/cex", r.binder());
        return after_env(focus(instantiate(r.body(), t), site + "/0", a, std::move(p), k));
      }
      case Op::POr:
        throw PolarityError("'|' in resource position");
    }
    return false;
  }

  // ---- forward rewriting ---------------------------------------------------

  static bool rewrite_rule(const Formula& f) {
    Formula r = strip_quantifiers(f);
    return r.is(Op::Impl) && r.lhs().is(Op::Atom);
  }

  bool guard_holds(const Term& body) {
    Term n = norm(body);
    Spine s = spine(n);
    if (!s.head.is(TermKind::Const) || !is_builtin_pred(s.head.name())) return true;
    return eval_pred(s.head.name(), s.args) == Truth::True;
  }

  // Applies an implication resource forward to an unconsumed linear atom,
  // replacing the atom by the implication's head, then retries the goal.
  bool rewrite(const Term& a, const std::string& site, const K& k) {
    const std::size_t nlin = linear_.size();
    for (std::size_t i = 0; i < nlin; ++i) {
      if (!usable(i) || linear_[i].f.is(Op::Atom) || !rewrite_rule(linear_[i].f)) continue;
      const Resource r = linear_[i];
      if (rewrite_with(r.f, r.site, i, a, site, k)) return true;
      if (aborted_) return false;
    }
    const std::size_t nbank = banked_.size();
    for (std::size_t j = 0; j < nbank; ++j) {
      if (!rewrite_rule(banked_[j].body)) continue;
      const Banked b = banked_[j];
      if (rewrite_with(b.body, b.site, std::nullopt, a, site, k)) return true;
      if (aborted_) return false;
    }
    return false;
  }

  bool rewrite_with(const Formula& rule, const std::string& rule_site,
                    std::optional<std::size_t> linear_rule, const Term& a,
                    const std::string& site, const K& k) {
    const std::size_t nlin = linear_.size();
    for (std::size_t l = 0; l < nlin; ++l) {
      if (!usable(l) || !linear_[l].f.is(Op::Atom) || linear_rule == l) continue;
      step();
      const Snapshot s = snap();
      std::string rs = rule_site;
      if (linear_rule) {
        consume(*linear_rule, Consumption::Kind::Rewrite);
      } else {
        record(Chooser::Machine, rule_site, Move::Copy{});
        rs += "/0";
      }
      Formula r = rule;
      while (r.is(Op::CAll)) {
        Term m = machine_witness(r.binder(), rs + "/call");
        r = instantiate(r.body(), m);
        rs += "/0";
      }
      if (unify_atoms(r.lhs().term(), linear_[l].f.term()) && guard_holds(r.lhs().term())) {
        consume(l, Consumption::Kind::Rewrite);
        if (add_resource(r.rhs(), rs + "/1", [&] { return prove_atom(a, site, k); })) return true;
        if (aborted_) return false;
      }
      restore(s);
    }
    return false;
  }

  // ---- result --------------------------------------------------------------

  Term final_form(const Term& t) const {
    try {
      return norm(t);
    } catch (const Error&) {
      return t;
    }
  }

  Transcript finish(Outcome outcome) {
    Transcript t;
    t.outcome = outcome;
    t.steps = steps_;
    t.diagnostics = diagnostics_;
    for (Move m : moves_) {
      if (auto w = std::get_if<Move::Witness>(&m.payload)) w->term = final_form(w->term);
      t.moves.push_back(std::move(m));
    }
    for (Consumption c : consumed_) {
      if (!c.atom.is_null()) c.atom = final_form(c.atom);
      t.consumed.push_back(std::move(c));
    }
    if (outcome == Outcome::Success)
      for (const auto& [name, m] : answers_) t.bindings.emplace_back(name, final_form(m));
    return t;
  }

  const std::vector<AgentDecl>& program_;
  const Formula& query_;
  EnvStrategy& env_;
  const Limits& limits_;

  Bindings bindings_;
  std::vector<Resource> linear_;
  std::vector<Banked> banked_;
  std::vector<FlagChange> flags_;
  std::vector<Move> moves_;
  std::vector<Consumption> consumed_;
  std::vector<std::pair<std::string, Term>> answers_;
  std::vector<std::string> diagnostics_;
  std::optional<EnvRequest> last_request_;
  std::uint64_t next_id_ = 0;
  std::uint64_t steps_ = 0;
  bool aborted_ = false;
};

}  // namespace

PlayResult play(const std::vector<AgentDecl>& program, const Formula& query, EnvStrategy& env,
                const Limits& limits) {
  if (limits.max_steps < 1 || limits.term_fuel < 1)
    throw Error("limits must be at least 1");
  check_polarity(program, query);
  PlayResult result;
  detail::run_with_large_stack([&] { result = Play(program, query, env, limits).run(); });
  return result;
}

Transcript solve(const std::vector<AgentDecl>& program, const Formula& query, EnvStrategy& env,
                 const Limits& limits) {
  PlayResult r = play(program, query, env, limits);
  if (r.pending) throw EnvExhausted(r.pending->site);
  return std::move(r.transcript);
}

// ---------------------------------------------------------------------------
// Winnability

namespace {

void enumerate(const std::vector<AgentDecl>& program, const Formula& query,
               const EnvDomains& domains, const Limits& limits,
               std::vector<EnvResponse>& prefix, WinReport& report) {
  ReplayEnv env(prefix);
  PlayResult r = play(program, query, env, limits);
  if (!r.pending) {
    ++report.plays;
    if (r.transcript.outcome != Outcome::Success) {
      if (report.winnable) report.losing_play = std::move(r.transcript);
      report.winnable = false;
    }
    return;
  }
  const EnvRequest& req = *r.pending;
  if (req.kind == RequestKind::ChooseBranch) {
    for (int i = 0; i < req.arity; ++i) {
      prefix.push_back(EnvPick{i});
      enumerate(program, query, domains, limits, prefix, report);
      prefix.pop_back();
    }
    return;
  }
  auto it = domains.find(req.site);
  if (it == domains.end()) it = domains.find(req.binder);
  if (it == domains.end()) throw DomainMissing(req.site);
  const std::vector<Term> candidates = it->second;
  for (const Term& t : candidates) {
    prefix.push_back(EnvWitness{t});
    enumerate(program, query, domains, limits, prefix, report);
    prefix.pop_back();
  }
}

}  // namespace

WinReport verify_winnable(const std::vector<AgentDecl>& program, const Formula& query,
                          const EnvDomains& domains, const Limits& limits) {
  WinReport report;
  std::vector<EnvResponse> prefix;
  enumerate(program, query, domains, limits, prefix, report);
  return report;
}

}  // namespace taskcl
