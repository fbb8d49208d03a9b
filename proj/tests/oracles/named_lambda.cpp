#include "named_lambda.hpp"

#include <set>

namespace oracle {

namespace {

NPtr mk(NTerm n) { return std::make_shared<const NTerm>(std::move(n)); }

NPtr var(const std::string& x) { return mk({NTerm::Var, x, 0, nullptr, nullptr}); }
NPtr app(NPtr f, NPtr a) { return mk({NTerm::App, "", 0, std::move(f), std::move(a)}); }
NPtr lam(const std::string& x, NPtr b) { return mk({NTerm::Lam, x, 0, std::move(b), nullptr}); }

int counter = 0;

std::string fresh_name() { return "v" + std::to_string(counter++); }

NPtr convert(const taskcl::Term& t, std::vector<std::string>& scope) {
  using taskcl::TermKind;
  switch (t.kind()) {
    case TermKind::Const:
      return mk({NTerm::Const, t.name(), 0, nullptr, nullptr});
    case TermKind::Int:
      return mk({NTerm::Int, "", t.value(), nullptr, nullptr});
    case TermKind::Meta:
      return mk({NTerm::Meta, t.name(), static_cast<std::int64_t>(t.meta_id()), nullptr,
                 nullptr});
    case TermKind::Bound:
      if (t.index() < scope.size()) return var(scope[scope.size() - 1 - t.index()]);
      return var("free" + std::to_string(t.index() - scope.size()));
    case TermKind::App:
      return app(convert(t.fun(), scope), convert(t.arg(), scope));
    case TermKind::Lam: {
      scope.push_back(fresh_name());
      NPtr body = convert(t.body(), scope);
      std::string x = scope.back();
      scope.pop_back();
      return lam(x, body);
    }
  }
  return nullptr;
}

void free_vars(const NPtr& t, std::set<std::string>& out, std::set<std::string>& bound) {
  switch (t->kind) {
    case NTerm::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      return;
    case NTerm::App:
      free_vars(t->a, out, bound);
      free_vars(t->b, out, bound);
      return;
    case NTerm::Lam: {
      const bool had = bound.count(t->name);
      bound.insert(t->name);
      free_vars(t->a, out, bound);
      if (!had) bound.erase(t->name);
      return;
    }
    default:
      return;
  }
}

std::set<std::string> fv(const NPtr& t) {
  std::set<std::string> out, bound;
  free_vars(t, out, bound);
  return out;
}

// [s/x]t
NPtr subst(const NPtr& t, const std::string& x, const NPtr& s) {
  switch (t->kind) {
    case NTerm::Var:
      return t->name == x ? s : t;
    case NTerm::App:
      return app(subst(t->a, x, s), subst(t->b, x, s));
    case NTerm::Lam: {
      if (t->name == x) return t;
      const auto fs = fv(s);
      if (fs.count(t->name) && fv(t->a).count(x)) {
        std::string y = fresh_name();
        NPtr body = subst(t->a, t->name, var(y));
        return lam(y, subst(body, x, s));
      }
      return lam(t->name, subst(t->a, x, s));
    }
    default:
      return t;
  }
}

// One leftmost-outermost step; nullptr when in normal form.
NPtr step(const NPtr& t) {
  switch (t->kind) {
    case NTerm::App: {
      if (t->a->kind == NTerm::Lam) return subst(t->a->a, t->a->name, t->b);
      if (NPtr f = step(t->a)) return app(f, t->b);
      if (NPtr a = step(t->b)) return app(t->a, a);
      return nullptr;
    }
    case NTerm::Lam: {
      if (NPtr b = step(t->a)) return lam(t->name, b);
      return nullptr;
    }
    default:
      return nullptr;
  }
}

bool alpha(const NPtr& x, const NPtr& y, std::vector<std::pair<std::string, std::string>>& env) {
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case NTerm::Var:
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        if (it->first == x->name || it->second == y->name)
          return it->first == x->name && it->second == y->name;
      }
      return x->name == y->name;
    case NTerm::Const:
      return x->name == y->name;
    case NTerm::Int:
    case NTerm::Meta:
      return x->value == y->value;
    case NTerm::App:
      return alpha(x->a, y->a, env) && alpha(x->b, y->b, env);
    case NTerm::Lam: {
      env.emplace_back(x->name, y->name);
      const bool r = alpha(x->a, y->a, env);
      env.pop_back();
      return r;
    }
  }
  return false;
}

}  // namespace

NPtr from_term(const taskcl::Term& t) {
  std::vector<std::string> scope;
  return convert(t, scope);
}

std::optional<NPtr> normalize(const NPtr& t, std::uint64_t fuel) {
  NPtr cur = t;
  for (std::uint64_t i = 0; i <= fuel; ++i) {
    NPtr next = step(cur);
    if (!next) return cur;
    cur = next;
  }
  return std::nullopt;
}

bool alpha_equal(const NPtr& x, const NPtr& y) {
  std::vector<std::pair<std::string, std::string>> env;
  return alpha(x, y, env);
}

std::string show(const NPtr& t) {
  switch (t->kind) {
    case NTerm::Var:
    case NTerm::Const:
      return t->name;
    case NTerm::Int:
      return std::to_string(t->value);
    case NTerm::Meta:
      return "?" + t->name + std::to_string(t->value);
    case NTerm::App:
      return "(" + show(t->a) + " " + show(t->b) + ")";
    case NTerm::Lam:
      return "(\\" + t->name + ". " + show(t->a) + ")";
  }
  return "";
}

}  // namespace oracle
