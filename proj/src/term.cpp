#include "taskcl/term.hpp"

#include <algorithm>
#include <cassert>

#include "taskcl/errors.hpp"

namespace taskcl {

namespace {

std::shared_ptr<Term::Node> make_node(TermKind kind) {
  auto n = std::make_shared<Term::Node>();
  n->kind = kind;
  return n;
}

struct Fuel {
  std::uint64_t left;
  void burn() {
    if (left == 0) throw FuelExhausted();
    --left;
  }
};

}  // namespace

Term Term::constant(std::string name) {
  auto n = make_node(TermKind::Const);
  n->name = std::move(name);
  return Term(std::move(n));
}

Term Term::integer(std::int64_t value) {
  auto n = make_node(TermKind::Int);
  n->value = value;
  return Term(std::move(n));
}

Term Term::bound(std::uint32_t index, std::string hint) {
  auto n = make_node(TermKind::Bound);
  n->name = std::move(hint);
  n->value = index;
  n->loose = index + 1;
  return Term(std::move(n));
}

Term Term::meta(std::string name, MetaId id) {
  auto n = make_node(TermKind::Meta);
  n->name = std::move(name);
  n->value = static_cast<std::int64_t>(id);
  n->metas = true;
  return Term(std::move(n));
}

Term Term::app(Term fun, Term arg) {
  auto n = make_node(TermKind::App);
  n->metas = fun.has_metas() || arg.has_metas();
  n->loose = std::max(fun.loose_bound(), arg.loose_bound());
  n->a = std::move(fun);
  n->b = std::move(arg);
  return Term(std::move(n));
}

Term Term::lam(std::string hint, Term body) {
  auto n = make_node(TermKind::Lam);
  n->name = std::move(hint);
  n->metas = body.has_metas();
  n->loose = body.loose_bound() == 0 ? 0 : body.loose_bound() - 1;
  n->a = std::move(body);
  return Term(std::move(n));
}

Term Term::apply(Term head, std::span<const Term> args) {
  for (const auto& a : args) head = app(std::move(head), a);
  return head;
}

Term Term::apply(Term head, std::initializer_list<Term> args) {
  return apply(std::move(head), std::span<const Term>(args.begin(), args.size()));
}

TermKind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->name; }
std::int64_t Term::value() const { return node_->value; }
std::uint32_t Term::index() const { return static_cast<std::uint32_t>(node_->value); }
MetaId Term::meta_id() const { return static_cast<MetaId>(node_->value); }
const Term& Term::fun() const { return node_->a; }
const Term& Term::arg() const { return node_->b; }
const Term& Term::body() const { return node_->a; }
bool Term::has_metas() const { return node_ && node_->metas; }
std::uint32_t Term::loose_bound() const { return node_ ? node_->loose : 0; }

Spine spine(const Term& t) {
  Spine s;
  Term cur = t;
  while (cur.is(TermKind::App)) {
    s.args.push_back(cur.arg());
    cur = cur.fun();
  }
  std::reverse(s.args.begin(), s.args.end());
  s.head = cur;
  return s;
}

Term shift(const Term& t, std::int64_t delta, std::uint32_t cutoff) {
  if (delta == 0 || t.loose_bound() <= cutoff) return t;
  switch (t.kind()) {
    case TermKind::Bound:
      return Term::bound(static_cast<std::uint32_t>(t.index() + delta), t.name());
    case TermKind::App:
      return Term::app(shift(t.fun(), delta, cutoff), shift(t.arg(), delta, cutoff));
    case TermKind::Lam:
      return Term::lam(t.name(), shift(t.body(), delta, cutoff + 1));
    default:
      return t;
  }
}

namespace {

Term subst_at(const Term& t, std::uint32_t depth, const Term& value) {
  if (t.loose_bound() <= depth) return t;
  switch (t.kind()) {
    case TermKind::Bound:
      if (t.index() == depth) return shift(value, depth);
      return Term::bound(t.index() - 1, t.name());
    case TermKind::App:
      return Term::app(subst_at(t.fun(), depth, value), subst_at(t.arg(), depth, value));
    case TermKind::Lam:
      return Term::lam(t.name(), subst_at(t.body(), depth + 1, value));
    default:
      return t;
  }
}

// Contracts head redexes until the head is no longer an applied lambda.
Term whnf(Term t, Fuel& fuel) {
  for (;;) {
    if (!t.is(TermKind::App)) return t;
    Spine s = spine(t);
    if (!s.head.is(TermKind::Lam)) return t;
    fuel.burn();
    Term reduced = instantiate(s.head.body(), s.args.front());
    t = Term::apply(reduced, std::span<const Term>(s.args).subspan(1));
  }
}

Term normalize(const Term& t, Fuel& fuel) {
  switch (t.kind()) {
    case TermKind::Lam: {
      Term body = normalize(t.body(), fuel);
      return body.same_node(t.body()) ? t : Term::lam(t.name(), body);
    }
    case TermKind::App: {
      Term w = whnf(t, fuel);
      if (!w.is(TermKind::App)) return normalize(w, fuel);
      Spine s = spine(w);
      bool changed = !w.same_node(t);
      for (auto& a : s.args) {
        Term na = normalize(a, fuel);
        changed = changed || !na.same_node(a);
        a = std::move(na);
      }
      return changed ? Term::apply(s.head, s.args) : t;
    }
    default:
      return t;
  }
}

}  // namespace

Term instantiate(const Term& body, const Term& value) { return subst_at(body, 0, value); }

Term subst_bound(const Term& t, std::uint32_t depth, const Term& value) {
  return subst_at(t, depth, value);
}

Term beta_normalize(const Term& t, std::uint64_t fuel) {
  assert(fuel >= 1);
  Fuel f{fuel};
  return normalize(t, f);
}

bool is_beta_normal(const Term& t) {
  switch (t.kind()) {
    case TermKind::Lam:
      return is_beta_normal(t.body());
    case TermKind::App: {
      Spine s = spine(t);
      if (s.head.is(TermKind::Lam)) return false;
      return std::all_of(s.args.begin(), s.args.end(), is_beta_normal);
    }
    default:
      return true;
  }
}

bool alpha_eq(const Term& a, const Term& b) {
  if (a.same_node(b)) return true;
  if (a.is_null() || b.is_null() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Const:
      return a.name() == b.name();
    case TermKind::Int:
      return a.value() == b.value();
    case TermKind::Bound:
      return a.index() == b.index();
    case TermKind::Meta:
      return a.meta_id() == b.meta_id();
    case TermKind::App:
      return alpha_eq(a.fun(), b.fun()) && alpha_eq(a.arg(), b.arg());
    case TermKind::Lam:
      return alpha_eq(a.body(), b.body());
  }
  return false;
}

namespace {

void collect_metas(const Term& t, std::set<MetaId>& out) {
  if (!t.has_metas()) return;
  switch (t.kind()) {
    case TermKind::Meta:
      out.insert(t.meta_id());
      break;
    case TermKind::App:
      collect_metas(t.fun(), out);
      collect_metas(t.arg(), out);
      break;
    case TermKind::Lam:
      collect_metas(t.body(), out);
      break;
    default:
      break;
  }
}

}  // namespace

std::set<MetaId> free_metas(const Term& t) {
  std::set<MetaId> out;
  collect_metas(t, out);
  return out;
}

bool occurs(MetaId id, const Term& t) {
  if (!t.has_metas()) return false;
  switch (t.kind()) {
    case TermKind::Meta:
      return t.meta_id() == id;
    case TermKind::App:
      return occurs(id, t.fun()) || occurs(id, t.arg());
    case TermKind::Lam:
      return occurs(id, t.body());
    default:
      return false;
  }
}

MetaId max_meta_id(const Term& t) {
  MetaId m = 0;
  for (MetaId id : free_metas(t)) m = std::max(m, id);
  return m;
}

const Term* Substitution::find(MetaId id) const {
  auto it = map_.find(id);
  return it == map_.end() ? nullptr : &it->second;
}

MetaId Substitution::max_id() const {
  MetaId m = 0;
  for (const auto& [id, t] : map_) m = std::max({m, id, max_meta_id(t)});
  return m;
}

namespace {

Term replace_metas(const Substitution& sigma, const Term& t, bool& changed) {
  if (!t.has_metas()) return t;
  switch (t.kind()) {
    case TermKind::Meta: {
      const Term* img = sigma.find(t.meta_id());
      if (!img) return t;
      assert(img->loose_bound() == 0);
      changed = true;
      return replace_metas(sigma, *img, changed);
    }
    case TermKind::App: {
      Term f = replace_metas(sigma, t.fun(), changed);
      Term a = replace_metas(sigma, t.arg(), changed);
      return f.same_node(t.fun()) && a.same_node(t.arg()) ? t : Term::app(f, a);
    }
    case TermKind::Lam: {
      Term b = replace_metas(sigma, t.body(), changed);
      return b.same_node(t.body()) ? t : Term::lam(t.name(), b);
    }
    default:
      return t;
  }
}

}  // namespace

Term apply_subst(const Substitution& sigma, const Term& t, std::uint64_t fuel) {
  if (sigma.empty()) return t;
  bool changed = false;
  Term r = replace_metas(sigma, t, changed);
  return changed ? beta_normalize(r, fuel) : r;
}

Substitution resolve(const Substitution& sigma, std::uint64_t fuel) {
  Substitution out;
  for (const auto& [id, t] : sigma.entries()) out.bind(id, apply_subst(sigma, t, fuel));
  return out;
}

bool is_idempotent(const Substitution& sigma) {
  for (const auto& [id, t] : sigma.entries())
    for (MetaId m : free_metas(t))
      if (sigma.contains(m)) return false;
  return true;
}

}  // namespace taskcl
