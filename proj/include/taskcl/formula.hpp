#pragma once

// Task formulas. Quantifiers bind de Bruijn indices in the atoms below them,
// counted together with the lambdas inside those atoms.

#include <functional>
#include <memory>
#include <set>
#include <string>

#include "taskcl/term.hpp"

namespace taskcl {

enum class Op {
  Atom,
  Impl,  // A -> B, reduction
  PAnd,  // parallel conjunction
  POr,   // parallel disjunction
  CAnd,  // choice conjunction
  COr,   // choice disjunction
  CAll,  // choice universal
  CEx,   // choice existential
  Bang,  // replication
};

/// Short tag used in site paths ("cor", "call", ...).
const char* op_tag(Op op);

class Formula {
 public:
  struct Node;

  Formula() = default;

  static Formula atom(Term t);
  static Formula impl(Formula body, Formula head);
  static Formula pand(Formula a, Formula b);
  static Formula por(Formula a, Formula b);
  static Formula cand(Formula a, Formula b);
  static Formula cor(Formula a, Formula b);
  static Formula call(std::string binder, Formula body);
  static Formula cex(std::string binder, Formula body);
  static Formula bang(Formula body);
  static Formula binary(Op op, Formula a, Formula b);

  bool is_null() const { return node_ == nullptr; }
  Op op() const;
  bool is(Op o) const { return node_ && op() == o; }
  bool is_binary() const;
  bool is_quantifier() const { return is(Op::CAll) || is(Op::CEx); }

  const Term& term() const;
  const std::string& binder() const;
  /// First operand; the body of Impl, Bang and the quantifiers.
  const Formula& lhs() const;
  /// Second operand; the head of Impl.
  const Formula& rhs() const;
  const Formula& body() const { return lhs(); }
  const Formula& child(int i) const { return i == 0 ? lhs() : rhs(); }

  bool same_node(const Formula& other) const { return node_ == other.node_; }

 private:
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Formula::Node {
  Op op;
  Term atom;
  std::string binder;
  Formula a;
  Formula b;
};

using TermMap = std::function<Term(const Term&, std::uint32_t depth)>;

/// Rebuilds `f` with every atom term passed through `fn`, along with the
/// number of quantifiers enclosing that atom inside `f`.
Formula map_atoms(const Formula& f, const TermMap& fn, std::uint32_t depth = 0);

/// Opens a quantifier body with a concrete term.
Formula instantiate(const Formula& body, const Term& value);

bool alpha_eq(const Formula& a, const Formula& b);
std::set<MetaId> free_metas(const Formula& f);
bool contains_op(const Formula& f, Op op);
std::uint32_t loose_bound(const Formula& f);

}  // namespace taskcl
