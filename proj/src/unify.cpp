#include "taskcl/unify.hpp"

#include <algorithm>
#include <cassert>
#include <optional>

namespace taskcl {

Term Bindings::fresh(const std::string& hint) {
  MetaId id = next_++;
  return Term::meta(hint, id);
}

void Bindings::bind(MetaId id, Term t) {
  assert(!sigma_.contains(id));
  sigma_.bind(id, std::move(t));
  trail_.push_back(id);
}

void Bindings::undo_to(std::size_t mark) {
  while (trail_.size() > mark) {
    sigma_.erase(trail_.back());
    trail_.pop_back();
  }
}

const char* to_string(UnifyStatus s) {
  switch (s) {
    case UnifyStatus::Ok:
      return "ok";
    case UnifyStatus::Failure:
      return "failure";
    case UnifyStatus::NonPattern:
      return "non-pattern";
  }
  return "?";
}

namespace {

// Distinct bound-variable arguments, as indices relative to the site.
std::optional<std::vector<std::uint32_t>> pattern_args(const std::vector<Term>& args) {
  std::vector<std::uint32_t> out;
  for (const auto& a : args) {
    if (!a.is(TermKind::Bound)) return std::nullopt;
    if (std::find(out.begin(), out.end(), a.index()) != out.end()) return std::nullopt;
    out.push_back(a.index());
  }
  return out;
}

Term lambdas(std::size_t n, Term body) {
  for (std::size_t i = 0; i < n; ++i) body = Term::lam("z", std::move(body));
  return body;
}

class Unifier {
 public:
  Unifier(Bindings& b, std::uint64_t fuel) : b_(b), fuel_(fuel) {}

  UnifyStatus go(Term a, Term b) {
    a = resolve_head(a);
    b = resolve_head(b);
    if (a.is(TermKind::Lam) && b.is(TermKind::Lam)) return go(a.body(), b.body());

    Spine sa = spine(a);
    Spine sb = spine(b);
    const bool flex_a = sa.head.is(TermKind::Meta);
    const bool flex_b = sb.head.is(TermKind::Meta);

    if (flex_a && flex_b && sa.head.meta_id() == sb.head.meta_id()) return flex_same(sa, sb);
    if (flex_a && sa.args.empty()) return solve(sa, b);
    if (flex_b && sb.args.empty()) return solve(sb, a);
    if (flex_a && flex_b) return flex_flex(sa, sb);
    if (flex_a) return solve(sa, b);
    if (flex_b) return solve(sb, a);
    if (a.is(TermKind::Lam) || b.is(TermKind::Lam)) return UnifyStatus::Failure;

    if (!rigid_heads_equal(sa.head, sb.head) || sa.args.size() != sb.args.size())
      return UnifyStatus::Failure;
    for (std::size_t i = 0; i < sa.args.size(); ++i) {
      UnifyStatus s = go(sa.args[i], sb.args[i]);
      if (s != UnifyStatus::Ok) return s;
    }
    return UnifyStatus::Ok;
  }

 private:
  struct Escape {
    UnifyStatus status;
  };

  Term resolve_head(const Term& t) {
    Spine s = spine(t);
    if (s.head.is(TermKind::Meta) && b_.subst().contains(s.head.meta_id()))
      return b_.resolve(t, fuel_);
    return t;
  }

  static bool rigid_heads_equal(const Term& x, const Term& y) {
    if (x.kind() != y.kind()) return false;
    switch (x.kind()) {
      case TermKind::Const:
        return x.name() == y.name();
      case TermKind::Int:
        return x.value() == y.value();
      case TermKind::Bound:
        return x.index() == y.index();
      default:
        return false;
    }
  }

  // G xs = t  ~>  G := \xs. t'
  UnifyStatus solve(const Spine& flex, const Term& rhs) {
    auto xs = pattern_args(flex.args);
    if (!xs) return UnifyStatus::NonPattern;
    const MetaId g = flex.head.meta_id();
    Term t = b_.resolve(rhs, fuel_);
    try {
      Term body = abstract(t, *xs, g, 0);
      b_.bind(g, lambdas(xs->size(), body));
    } catch (const Escape& e) {
      return e.status;
    }
    return UnifyStatus::Ok;
  }

  // Rewrites `t` so that references to the pattern variables `xs` become
  // the binders of the solution, pruning other flexible subterms as needed.
  Term abstract(const Term& t, const std::vector<std::uint32_t>& xs, MetaId g,
                std::uint32_t depth) {
    switch (t.kind()) {
      case TermKind::Bound: {
        if (t.index() < depth) return t;
        auto pos = position(xs, t.index() - depth);
        if (!pos) throw Escape{UnifyStatus::Failure};
        return Term::bound(static_cast<std::uint32_t>(depth + xs.size() - 1 - *pos), t.name());
      }
      case TermKind::Meta:
        if (t.meta_id() == g) throw Escape{UnifyStatus::Failure};
        if (b_.subst().contains(t.meta_id())) return abstract(b_.resolve(t, fuel_), xs, g, depth);
        return t;
      case TermKind::Lam:
        return Term::lam(t.name(), abstract(t.body(), xs, g, depth + 1));
      case TermKind::App: {
        Spine s = spine(t);
        if (s.head.is(TermKind::Meta)) return abstract_flex(s, xs, g, depth);
        Term head = abstract(s.head, xs, g, depth);
        std::vector<Term> args;
        for (const auto& a : s.args) args.push_back(abstract(a, xs, g, depth));
        return Term::apply(head, args);
      }
      default:
        return t;
    }
  }

  Term abstract_flex(const Spine& s, const std::vector<std::uint32_t>& xs, MetaId g,
                     std::uint32_t depth) {
    if (s.head.meta_id() == g) throw Escape{UnifyStatus::Failure};
    // Pruned earlier in this same abstraction.
    if (b_.subst().contains(s.head.meta_id()))
      return abstract(b_.resolve(Term::apply(s.head, s.args), fuel_), xs, g, depth);
    auto ys = pattern_args(s.args);
    if (!ys) {
      std::vector<Term> args;
      try {
        for (const auto& a : s.args) args.push_back(abstract(a, xs, g, depth));
      } catch (const Escape& e) {
        throw Escape{e.status == UnifyStatus::Failure ? UnifyStatus::NonPattern : e.status};
      }
      return Term::apply(s.head, args);
    }
    auto visible = [&](std::uint32_t y) { return y < depth || position(xs, y - depth); };
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < ys->size(); ++i)
      if (visible((*ys)[i])) keep.push_back(i);

    Term head = s.head;
    std::vector<Term> args = s.args;
    if (keep.size() != ys->size()) {
      // H ys := \ys. H' (kept ys)
      Term pruned = b_.fresh(s.head.name());
      std::vector<Term> inner;
      const std::size_t m = ys->size();
      for (std::size_t i : keep) inner.push_back(Term::bound(static_cast<std::uint32_t>(m - 1 - i)));
      b_.bind(s.head.meta_id(), lambdas(m, Term::apply(pruned, inner)));
      head = pruned;
      args.clear();
      for (std::size_t i : keep) args.push_back(s.args[i]);
    }
    for (auto& a : args) a = abstract(a, xs, g, depth);
    return Term::apply(head, args);
  }

  static std::optional<std::size_t> position(const std::vector<std::uint32_t>& xs,
                                             std::uint32_t v) {
    auto it = std::find(xs.begin(), xs.end(), v);
    if (it == xs.end()) return std::nullopt;
    return static_cast<std::size_t>(it - xs.begin());
  }

  // G xs = G ys  ~>  G := \zs. H (z_i where x_i = y_i)
  UnifyStatus flex_same(const Spine& a, const Spine& b) {
    auto xs = pattern_args(a.args);
    auto ys = pattern_args(b.args);
    if (!xs || !ys) return UnifyStatus::NonPattern;
    if (xs->size() != ys->size()) return UnifyStatus::Failure;
    if (*xs == *ys) return UnifyStatus::Ok;
    const std::size_t n = xs->size();
    std::vector<Term> inner;
    for (std::size_t i = 0; i < n; ++i)
      if ((*xs)[i] == (*ys)[i]) inner.push_back(Term::bound(static_cast<std::uint32_t>(n - 1 - i)));
    Term h = b_.fresh(a.head.name());
    b_.bind(a.head.meta_id(), lambdas(n, Term::apply(h, inner)));
    return UnifyStatus::Ok;
  }

  // G xs = H ys  ~>  both become \.. K(common)
  UnifyStatus flex_flex(const Spine& a, const Spine& b) {
    auto xs = pattern_args(a.args);
    auto ys = pattern_args(b.args);
    if (!xs || !ys) return UnifyStatus::NonPattern;
    const std::size_t n = xs->size();
    const std::size_t m = ys->size();
    std::vector<Term> g_inner;
    std::vector<Term> h_inner;
    for (std::size_t i = 0; i < n; ++i) {
      auto j = position(*ys, (*xs)[i]);
      if (!j) continue;
      g_inner.push_back(Term::bound(static_cast<std::uint32_t>(n - 1 - i)));
      h_inner.push_back(Term::bound(static_cast<std::uint32_t>(m - 1 - *j)));
    }
    Term k = b_.fresh(a.head.name());
    b_.bind(a.head.meta_id(), lambdas(n, Term::apply(k, g_inner)));
    b_.bind(b.head.meta_id(), lambdas(m, Term::apply(k, h_inner)));
    return UnifyStatus::Ok;
  }

  Bindings& b_;
  std::uint64_t fuel_;
};

}  // namespace

UnifyStatus unify_into(const Term& a, const Term& b, Bindings& bindings, std::uint64_t fuel) {
  assert(is_beta_normal(a) && is_beta_normal(b));
  const std::size_t mark = bindings.mark();
  Unifier u(bindings, fuel);
  UnifyStatus s = u.go(a, b);
  if (s != UnifyStatus::Ok) bindings.undo_to(mark);
  return s;
}

UnifyResult unify(const Term& a, const Term& b, const Substitution& sigma, std::uint64_t fuel) {
  MetaId next = std::max({sigma.max_id(), max_meta_id(a), max_meta_id(b)}) + 1;
  Bindings bindings(next);
  for (const auto& [id, t] : sigma.entries()) bindings.bind(id, t);
  UnifyResult r;
  r.status = unify_into(apply_subst(sigma, a, fuel), apply_subst(sigma, b, fuel), bindings, fuel);
  r.sigma = r.status == UnifyStatus::Ok ? resolve(bindings.subst(), fuel) : sigma;
  return r;
}

}  // namespace taskcl
