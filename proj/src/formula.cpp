#include "taskcl/formula.hpp"

#include <algorithm>
#include <cassert>

namespace taskcl {

const char* op_tag(Op op) {
  switch (op) {
    case Op::Atom:
      return "atom";
    case Op::Impl:
      return "imp";
    case Op::PAnd:
      return "pand";
    case Op::POr:
      return "por";
    case Op::CAnd:
      return "cand";
    case Op::COr:
      return "cor";
    case Op::CAll:
      return "call";
    case Op::CEx:
      return "cex";
    case Op::Bang:
      return "bang";
  }
  return "?";
}

namespace {

Formula::Node* fresh(std::shared_ptr<Formula::Node>& holder, Op op) {
  holder = std::make_shared<Formula::Node>();
  holder->op = op;
  return holder.get();
}

}  // namespace

Formula Formula::atom(Term t) {
  std::shared_ptr<Node> n;
  fresh(n, Op::Atom)->atom = std::move(t);
  return Formula(std::move(n));
}

Formula Formula::binary(Op op, Formula a, Formula b) {
  std::shared_ptr<Node> n;
  Node* p = fresh(n, op);
  p->a = std::move(a);
  p->b = std::move(b);
  return Formula(std::move(n));
}

Formula Formula::impl(Formula body, Formula head) {
  return binary(Op::Impl, std::move(body), std::move(head));
}
Formula Formula::pand(Formula a, Formula b) { return binary(Op::PAnd, std::move(a), std::move(b)); }
Formula Formula::por(Formula a, Formula b) { return binary(Op::POr, std::move(a), std::move(b)); }
Formula Formula::cand(Formula a, Formula b) { return binary(Op::CAnd, std::move(a), std::move(b)); }
Formula Formula::cor(Formula a, Formula b) { return binary(Op::COr, std::move(a), std::move(b)); }

Formula Formula::call(std::string binder, Formula body) {
  std::shared_ptr<Node> n;
  Node* p = fresh(n, Op::CAll);
  p->binder = std::move(binder);
  p->a = std::move(body);
  return Formula(std::move(n));
}

Formula Formula::cex(std::string binder, Formula body) {
  std::shared_ptr<Node> n;
  Node* p = fresh(n, Op::CEx);
  p->binder = std::move(binder);
  p->a = std::move(body);
  return Formula(std::move(n));
}

Formula Formula::bang(Formula body) {
  std::shared_ptr<Node> n;
  fresh(n, Op::Bang)->a = std::move(body);
  return Formula(std::move(n));
}

Op Formula::op() const { return node_->op; }

bool Formula::is_binary() const {
  switch (op()) {
    case Op::Impl:
    case Op::PAnd:
    case Op::POr:
    case Op::CAnd:
    case Op::COr:
      return true;
    default:
      return false;
  }
}

const Term& Formula::term() const { return node_->atom; }
const std::string& Formula::binder() const { return node_->binder; }
const Formula& Formula::lhs() const { return node_->a; }
const Formula& Formula::rhs() const { return node_->b; }

Formula map_atoms(const Formula& f, const TermMap& fn, std::uint32_t depth) {
  switch (f.op()) {
    case Op::Atom: {
      Term t = fn(f.term(), depth);
      return t.same_node(f.term()) ? f : Formula::atom(std::move(t));
    }
    case Op::CAll:
    case Op::CEx: {
      Formula b = map_atoms(f.body(), fn, depth + 1);
      if (b.same_node(f.body())) return f;
      return f.is(Op::CAll) ? Formula::call(f.binder(), b) : Formula::cex(f.binder(), b);
    }
    case Op::Bang: {
      Formula b = map_atoms(f.body(), fn, depth);
      return b.same_node(f.body()) ? f : Formula::bang(b);
    }
    default: {
      Formula a = map_atoms(f.lhs(), fn, depth);
      Formula b = map_atoms(f.rhs(), fn, depth);
      if (a.same_node(f.lhs()) && b.same_node(f.rhs())) return f;
      return Formula::binary(f.op(), a, b);
    }
  }
}

Formula instantiate(const Formula& body, const Term& value) {
  return map_atoms(body, [&](const Term& t, std::uint32_t depth) {
    return subst_bound(t, depth, value);
  });
}

bool alpha_eq(const Formula& a, const Formula& b) {
  if (a.same_node(b)) return true;
  if (a.is_null() || b.is_null() || a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Atom:
      return alpha_eq(a.term(), b.term());
    case Op::CAll:
    case Op::CEx:
    case Op::Bang:
      return alpha_eq(a.body(), b.body());
    default:
      return alpha_eq(a.lhs(), b.lhs()) && alpha_eq(a.rhs(), b.rhs());
  }
}

namespace {

template <typename Fn>
void each_atom(const Formula& f, std::uint32_t depth, Fn&& fn) {
  switch (f.op()) {
    case Op::Atom:
      fn(f.term(), depth);
      break;
    case Op::CAll:
    case Op::CEx:
      each_atom(f.body(), depth + 1, fn);
      break;
    case Op::Bang:
      each_atom(f.body(), depth, fn);
      break;
    default:
      each_atom(f.lhs(), depth, fn);
      each_atom(f.rhs(), depth, fn);
  }
}

}  // namespace

std::set<MetaId> free_metas(const Formula& f) {
  std::set<MetaId> out;
  each_atom(f, 0, [&](const Term& t, std::uint32_t) {
    auto m = free_metas(t);
    out.insert(m.begin(), m.end());
  });
  return out;
}

bool contains_op(const Formula& f, Op op) {
  if (f.op() == op) return true;
  switch (f.op()) {
    case Op::Atom:
      return false;
    case Op::CAll:
    case Op::CEx:
    case Op::Bang:
      return contains_op(f.body(), op);
    default:
      return contains_op(f.lhs(), op) || contains_op(f.rhs(), op);
  }
}

std::uint32_t loose_bound(const Formula& f) {
  std::uint32_t out = 0;
  each_atom(f, 0, [&](const Term& t, std::uint32_t depth) {
    if (t.loose_bound() > depth) out = std::max(out, t.loose_bound() - depth);
  });
  return out;
}

}  // namespace taskcl
