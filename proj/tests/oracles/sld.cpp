#include "sld.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace oracle {

namespace {

using Subst = std::map<std::string, FTerm>;

FTerm walk(const FTerm& t, const Subst& s) {
  if (t.is_var()) {
    auto it = s.find(t.name);
    if (it != s.end()) return walk(it->second, s);
  }
  return t;
}

bool occurs(const std::string& v, const FTerm& t, const Subst& s) {
  FTerm w = walk(t, s);
  if (w.is_var()) return w.name == v;
  for (const auto& a : w.args)
    if (occurs(v, a, s)) return true;
  return false;
}

bool unify(const FTerm& a, const FTerm& b, Subst& s) {
  FTerm x = walk(a, s);
  FTerm y = walk(b, s);
  if (x.is_var() && y.is_var() && x.name == y.name) return true;
  if (x.is_var()) {
    if (occurs(x.name, y, s)) return false;
    s[x.name] = y;
    return true;
  }
  if (y.is_var()) return unify(y, x, s);
  if (x.name != y.name || x.args.size() != y.args.size()) return false;
  for (std::size_t i = 0; i < x.args.size(); ++i)
    if (!unify(x.args[i], y.args[i], s)) return false;
  return true;
}

FTerm rename(const FTerm& t, const std::string& suffix) {
  if (t.is_var()) return {t.name + suffix, {}};
  FTerm r{t.name, {}};
  for (const auto& a : t.args) r.args.push_back(rename(a, suffix));
  return r;
}

Goal rename(const Goal& g, const std::string& suffix) {
  Goal r = g;
  if (g.kind == Goal::Atom) r.atom = rename(g.atom, suffix);
  if (g.kind == Goal::Some) r.var = g.var + suffix;
  for (auto& s : r.sub) s = rename(s, suffix);
  return r;
}

class Solver {
 public:
  Solver(const Program& p, long max_steps) : program_(p), max_steps_(max_steps) {}

  bool solve(const std::vector<Goal>& goals, Subst& s) {
    if (goals.empty()) return true;
    if (++steps_ > max_steps_) return false;
    Goal g = goals.front();
    std::vector<Goal> rest(goals.begin() + 1, goals.end());
    switch (g.kind) {
      case Goal::And: {
        std::vector<Goal> next{g.sub[0], g.sub[1]};
        next.insert(next.end(), rest.begin(), rest.end());
        return solve(next, s);
      }
      case Goal::Some: {
        // A fresh name per opening keeps distinct openings apart.
        const std::string fresh = "S_" + std::to_string(counter_++);
        std::vector<Goal> next{substitute_var(g.sub[0], g.var, fresh)};
        next.insert(next.end(), rest.begin(), rest.end());
        return solve(next, s);
      }
      case Goal::Atom:
        for (const Clause& c : program_) {
          const std::string suffix = "_" + std::to_string(counter_++);
          Subst trial = s;
          if (!unify(rename(c.head, suffix), g.atom, trial)) continue;
          std::vector<Goal> next;
          if (!c.fact) next.push_back(rename(c.body, suffix));
          next.insert(next.end(), rest.begin(), rest.end());
          if (solve(next, trial)) {
            s = trial;
            return true;
          }
          if (steps_ > max_steps_) return false;
        }
        return false;
    }
    return false;
  }

  long steps() const { return steps_; }

 private:
  static FTerm substitute_var(const FTerm& t, const std::string& v, const std::string& by) {
    if (t.is_var()) return {t.name == v ? by : t.name, {}};
    FTerm r{t.name, {}};
    for (const auto& a : t.args) r.args.push_back(substitute_var(a, v, by));
    return r;
  }

  static Goal substitute_var(const Goal& g, const std::string& v, const std::string& by) {
    Goal r = g;
    if (g.kind == Goal::Atom) r.atom = substitute_var(g.atom, v, by);
    if (g.kind == Goal::Some && g.var == v) return r;
    for (auto& s : r.sub) s = substitute_var(s, v, by);
    return r;
  }

  const Program& program_;
  long max_steps_;
  long steps_ = 0;
  long counter_ = 0;
};

std::string term_text(const FTerm& t) {
  if (t.args.empty()) return t.name;
  std::string s = t.name + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) s += (i ? ", " : "") + term_text(t.args[i]);
  return s + ")";
}

std::string goal_text(const Goal& g) {
  switch (g.kind) {
    case Goal::Atom:
      return term_text(g.atom);
    case Goal::And:
      return "(" + goal_text(g.sub[0]) + " * " + goal_text(g.sub[1]) + ")";
    case Goal::Some:
      return "(exists " + g.var + ". " + goal_text(g.sub[0]) + ")";
  }
  return "";
}

void vars_of(const FTerm& t, std::vector<std::string>& out) {
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
    return;
  }
  for (const auto& a : t.args) vars_of(a, out);
}

void vars_of(const Goal& g, std::vector<std::string>& out, std::set<std::string> bound = {}) {
  if (g.kind == Goal::Atom) {
    std::vector<std::string> vs;
    vars_of(g.atom, vs);
    for (auto& v : vs)
      if (!bound.count(v) && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return;
  }
  if (g.kind == Goal::Some) bound.insert(g.var);
  for (const auto& s : g.sub) vars_of(s, out, bound);
}

// Object syntax: juxtaposition with variables as lambda-bound lowercase names.
std::string obj_term(const FTerm& t) {
  if (t.is_var()) {
    std::string v = t.name;
    v[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(v[0])));
    return "v_" + v;
  }
  if (t.args.empty()) return t.name;
  std::string s = "(" + t.name;
  for (const auto& a : t.args) s += " " + obj_term(a);
  return s + ")";
}

std::string obj_goal(const Goal& g) {
  switch (g.kind) {
    case Goal::Atom:
      return obj_term(g.atom);
    case Goal::And:
      return "(and " + obj_goal(g.sub[0]) + " " + obj_goal(g.sub[1]) + ")";
    case Goal::Some: {
      FTerm v{g.var, {}};
      return "(some (\\" + obj_term(v) + ". " + obj_goal(g.sub[0]) + "))";
    }
  }
  return "";
}

}  // namespace

bool sld_provable(const Program& program, const Goal& goal, long max_steps, long* steps) {
  Solver solver(program, max_steps);
  Subst s;
  const bool ok = solver.solve({goal}, s);
  if (steps) *steps = solver.steps();
  return ok;
}

Goal atom_goal(FTerm t) {
  Goal g;
  g.kind = Goal::Atom;
  g.atom = std::move(t);
  return g;
}

Goal and_goal(Goal a, Goal b) {
  Goal g;
  g.kind = Goal::And;
  g.sub = {std::move(a), std::move(b)};
  return g;
}

Goal some_goal(std::string var, Goal body) {
  Goal g;
  g.kind = Goal::Some;
  g.var = std::move(var);
  g.sub = {std::move(body)};
  return g;
}

std::string render_program(const Program& program) {
  std::string out;
  for (std::size_t i = 0; i < program.size(); ++i) {
    const Clause& c = program[i];
    out += "c" + std::to_string(i) + ": ";
    if (c.fact)
      out += "!" + std::string(c.head.args.empty() ? "" : "(") + term_text(c.head) +
             (c.head.args.empty() ? "" : ")");
    else
      out += "!(" + goal_text(c.body) + " -> " + term_text(c.head) + ")";
    out += ".\n";
  }
  return out;
}

std::string render_query(const Goal& goal) { return goal_text(goal); }

std::string render_object_program(const Program& program) {
  std::vector<std::string> clauses;
  for (const Clause& c : program) {
    std::string body = c.fact ? obj_term(c.head)
                              : "(imp " + obj_goal(c.body) + " " + obj_term(c.head) + ")";
    std::vector<std::string> vs;
    vars_of(c.head, vs);
    if (!c.fact) vars_of(c.body, vs);
    for (auto it = vs.rbegin(); it != vs.rend(); ++it)
      body = "(all (\\" + obj_term(FTerm{*it, {}}) + ". " + body + "))";
    clauses.push_back(body);
  }
  std::string out = clauses.back();
  for (std::size_t i = clauses.size() - 1; i-- > 0;) out = "(and " + clauses[i] + " " + out + ")";
  return out;
}

std::string render_object_goal(const Goal& goal) { return obj_goal(goal); }

}  // namespace oracle
