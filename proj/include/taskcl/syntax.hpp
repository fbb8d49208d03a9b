#pragma once

// Surface syntax for programs, queries, witness terms and move scripts.
//
//   formula  :=  choice ['->' formula]                  right-assoc, lowest
//   choice   :=  por {('+' | '&') por}                  one operator per chain
//   por      :=  pand {'|' pand}
//   pand     :=  unary {'*' unary}
//   unary    :=  '!' unary | ('forall'|'exists') ident+ '.' formula | primary
//   primary  :=  '(' formula ')' | app [cmp app]        cmp: >= > <= < = !=
//
// Terms use juxtaposition, `f(a, b)` call syntax, `\x. t` lambdas and the
// arithmetic operators + - * inside call arguments and parentheses.
// Uppercase-initial names that are not bound are variables: universally
// closed in declarations, existentially closed in queries.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "taskcl/formula.hpp"
#include "taskcl/term.hpp"

namespace taskcl {

struct AgentDecl {
  std::string name;
  Formula formula;
};

struct MoveEntry {
  struct Pick {
    int index;
  };
  struct TermText {
    std::string text;
  };
  std::optional<std::string> expected_site;
  std::variant<Pick, TermText> payload;
};

struct MoveScript {
  std::vector<MoveEntry> entries;
};

std::vector<AgentDecl> parse_program(std::string_view text);
Formula parse_query(std::string_view text);
/// Parses a term; free uppercase variables are returned in `free_vars` as
/// constants of the same name.
Term parse_term(std::string_view text, std::vector<std::string>* free_vars = nullptr);
/// Witness terms: must be closed. Throws BadTerm otherwise.
Term parse_closed_term(std::string_view text);
MoveScript parse_moves(std::string_view json_text);

std::string pretty(const Formula& f);
std::string pretty(const Term& t);
std::string pretty(const AgentDecl& d);

/// Arithmetic builtins are ordinary constants with these names.
bool is_arith_op(const std::string& name);

}  // namespace taskcl
