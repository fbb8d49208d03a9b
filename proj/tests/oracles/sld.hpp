#pragma once

// First-order SLD resolution (leftmost goal, clauses in order, occurs
// check), used as the reference for Horn programs.

#include <cctype>
#include <string>
#include <vector>

namespace oracle {

struct FTerm {
  std::string name;  // variable names start with an uppercase letter
  std::vector<FTerm> args;
  bool is_var() const { return !name.empty() && std::isupper(static_cast<unsigned char>(name[0])); }
};

struct Goal {
  enum Kind { Atom, And, Some } kind = Atom;
  FTerm atom;             // Atom
  std::vector<Goal> sub;  // And: two parts, Some: one body
  std::string var;        // Some: variable bound in the body
};

struct Clause {
  FTerm head;
  Goal body;  // And of nothing when `facts` is true
  bool fact = true;
};

using Program = std::vector<Clause>;

/// Resolves `goal` against `program`; gives up (returns false) after
/// `max_steps` resolution steps. `steps` reports the number used.
bool sld_provable(const Program& program, const Goal& goal, long max_steps = 1000000,
                  long* steps = nullptr);

Goal atom_goal(FTerm t);
Goal and_goal(Goal a, Goal b);
Goal some_goal(std::string var, Goal body);

/// Declarations `name: !(body -> head).` with implicitly closed variables.
std::string render_program(const Program& program);
/// Query text; free variables become answer variables.
std::string render_query(const Goal& goal);

/// Object-level encodings for the Horn interpreter: clauses as
/// `all (\x. imp G A)` joined by `and`, goals with `and`/`some`.
std::string render_object_program(const Program& program);
std::string render_object_goal(const Goal& goal);

}  // namespace oracle
