#pragma once

#include <span>
#include <string>
#include <variant>

#include "taskcl/term.hpp"

namespace taskcl {

struct NotGround {};

enum class Truth { True, False, NotGround };

/// Folds a term built from integers and + - * into a single Int.
/// Throws ArithError on overflow or on a non-arithmetic subterm.
std::variant<Term, NotGround> eval_arith(const Term& t);

/// Bottom-up folding of every ground arithmetic subterm; non-ground or
/// non-arithmetic parts are kept as they are.
Term normalize_arith(const Term& t);

bool is_builtin_pred(const std::string& name);

/// Decides geq/gt/leq/lt/eq/neq on ground arguments and the `atom` guard.
/// Throws UnknownBuiltin for any other name.
Truth eval_pred(const std::string& name, std::span<const Term> args);

/// Object-level connectives that `atom` rejects as heads.
bool is_object_connective(const std::string& name);

}  // namespace taskcl
