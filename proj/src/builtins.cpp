#include "taskcl/builtins.hpp"

#include <array>

#include "taskcl/errors.hpp"
#include "taskcl/syntax.hpp"

namespace taskcl {

namespace {

std::int64_t combine(const std::string& op, std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  bool overflow = false;
  if (op == "+")
    overflow = __builtin_add_overflow(a, b, &r);
  else if (op == "-")
    overflow = __builtin_sub_overflow(a, b, &r);
  else
    overflow = __builtin_mul_overflow(a, b, &r);
  if (overflow)
    throw ArithError("integer overflow in " + std::to_string(a) + " " + op + " " +
                     std::to_string(b));
  return r;
}

bool arith_node(const Spine& s) {
  return s.head.is(TermKind::Const) && is_arith_op(s.head.name()) && s.args.size() == 2;
}

}  // namespace

std::variant<Term, NotGround> eval_arith(const Term& t) {
  if (t.is(TermKind::Int)) return t;
  if (t.is(TermKind::Meta)) return NotGround{};
  Spine s = spine(t);
  if (!arith_node(s)) throw ArithError("not an arithmetic term: " + pretty(t));
  auto lhs = eval_arith(s.args[0]);
  auto rhs = eval_arith(s.args[1]);
  if (std::holds_alternative<NotGround>(lhs) || std::holds_alternative<NotGround>(rhs))
    return NotGround{};
  return Term::integer(combine(s.head.name(), std::get<Term>(lhs).value(),
                               std::get<Term>(rhs).value()));
}

Term normalize_arith(const Term& t) {
  switch (t.kind()) {
    case TermKind::App: {
      Spine s = spine(t);
      bool changed = false;
      for (auto& a : s.args) {
        Term n = normalize_arith(a);
        changed = changed || !n.same_node(a);
        a = std::move(n);
      }
      if (arith_node(s) && s.args[0].is(TermKind::Int) && s.args[1].is(TermKind::Int))
        return Term::integer(combine(s.head.name(), s.args[0].value(), s.args[1].value()));
      return changed ? Term::apply(s.head, s.args) : t;
    }
    case TermKind::Lam: {
      Term b = normalize_arith(t.body());
      return b.same_node(t.body()) ? t : Term::lam(t.name(), b);
    }
    default:
      return t;
  }
}

bool is_builtin_pred(const std::string& name) {
  static const std::array<const char*, 7> names{"geq", "gt", "leq", "lt", "eq", "neq", "atom"};
  for (const char* n : names)
    if (name == n) return true;
  return false;
}

bool is_object_connective(const std::string& name) {
  return name == "and" || name == "imp" || name == "all" || name == "some";
}

Truth eval_pred(const std::string& name, std::span<const Term> args) {
  if (!is_builtin_pred(name)) throw UnknownBuiltin(name);
  auto truth = [](bool b) { return b ? Truth::True : Truth::False; };

  if (name == "atom") {
    if (args.size() != 1) return Truth::False;
    Spine s = spine(args[0]);
    if (s.head.is(TermKind::Meta)) return Truth::NotGround;
    return truth(s.head.is(TermKind::Const) && !is_object_connective(s.head.name()) &&
                 !is_arith_op(s.head.name()));
  }

  if (args.size() != 2) return Truth::False;
  if (args[0].has_metas() || args[1].has_metas()) return Truth::NotGround;
  Term a = normalize_arith(args[0]);
  Term b = normalize_arith(args[1]);
  if (name == "eq") return truth(alpha_eq(a, b));
  if (name == "neq") return truth(!alpha_eq(a, b));
  if (!a.is(TermKind::Int) || !b.is(TermKind::Int)) return Truth::False;
  const auto x = a.value();
  const auto y = b.value();
  if (name == "geq") return truth(x >= y);
  if (name == "gt") return truth(x > y);
  if (name == "leq") return truth(x <= y);
  return truth(x < y);
}

}  // namespace taskcl
