#include <algorithm>
#include <set>

#include "taskcl/syntax.hpp"

namespace taskcl {

namespace {

// Term contexts, loosest first.
constexpr int kTop = 0;
constexpr int kSum = 1;
constexpr int kProduct = 2;
constexpr int kApp = 3;
constexpr int kArg = 4;

void collect_consts(const Term& t, std::set<std::string>& out) {
  switch (t.kind()) {
    case TermKind::Const:
      out.insert(t.name());
      break;
    case TermKind::App:
      collect_consts(t.fun(), out);
      collect_consts(t.arg(), out);
      break;
    case TermKind::Lam:
      collect_consts(t.body(), out);
      break;
    default:
      break;
  }
}

void collect_consts(const Formula& f, std::set<std::string>& out) {
  map_atoms(f, [&](const Term& t, std::uint32_t) {
    collect_consts(t, out);
    return t;
  });
}

bool valid_binder(const std::string& s) {
  if (s.empty() || s == "forall" || s == "exists") return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  });
}

class Printer {
 public:
  std::string term(const Term& t, int ctx) {
    switch (t.kind()) {
      case TermKind::Const:
        return t.name();
      case TermKind::Int: {
        std::string s = std::to_string(t.value());
        return t.value() < 0 && ctx >= kArg ? "(" + s + ")" : s;
      }
      case TermKind::Bound:
        if (t.index() < scope_.size()) return scope_[scope_.size() - 1 - t.index()];
        return "#" + std::to_string(t.index());
      case TermKind::Meta:
        return "_" + t.name() + std::to_string(t.meta_id());
      case TermKind::Lam: {
        std::set<std::string> consts;
        collect_consts(t.body(), consts);
        std::string name = binder_name(t.name(), consts);
        scope_.push_back(name);
        std::string s = "\\" + name + ". " + term(t.body(), kTop);
        scope_.pop_back();
        return ctx > kTop ? "(" + s + ")" : s;
      }
      case TermKind::App:
        return application(t, ctx);
    }
    return "?";
  }

  std::string formula(const Formula& f, int ctx) {
    switch (f.op()) {
      case Op::Atom:
        return term(f.term(), kApp);
      case Op::Impl:
        return wrap(formula(f.lhs(), 2) + " -> " + formula(f.rhs(), 1), ctx > 1);
      case Op::COr:
      case Op::CAnd: {
        const Op other = f.is(Op::COr) ? Op::CAnd : Op::COr;
        std::string l = f.lhs().is(other) ? "(" + formula(f.lhs(), 0) + ")" : formula(f.lhs(), 2);
        const char* sym = f.is(Op::COr) ? " + " : " & ";
        return wrap(l + sym + formula(f.rhs(), 3), ctx > 2);
      }
      case Op::POr:
        return wrap(formula(f.lhs(), 3) + " | " + formula(f.rhs(), 4), ctx > 3);
      case Op::PAnd:
        return wrap(formula(f.lhs(), 4) + " * " + formula(f.rhs(), 5), ctx > 4);
      case Op::Bang: {
        const Formula& b = f.body();
        if (b.is(Op::Atom) || b.is(Op::Bang)) return "!" + formula(b, 5);
        return "!(" + formula(b, 0) + ")";
      }
      case Op::CAll:
      case Op::CEx: {
        std::set<std::string> consts;
        collect_consts(f.body(), consts);
        std::string name = binder_name(f.binder(), consts);
        scope_.push_back(name);
        std::string s = std::string(f.is(Op::CAll) ? "forall " : "exists ") + name + ". " +
                        formula(f.body(), 0);
        scope_.pop_back();
        return wrap(s, ctx > 0);
      }
    }
    return "?";
  }

 private:
  static std::string wrap(std::string s, bool parens) { return parens ? "(" + s + ")" : s; }

  std::string application(const Term& t, int ctx) {
    Spine s = spine(t);
    if (s.head.is(TermKind::Const) && is_arith_op(s.head.name()) && s.args.size() == 2) {
      if (s.head.name() == "*")
        return wrap(term(s.args[0], kProduct) + " * " + term(s.args[1], kApp), ctx > kProduct);
      return wrap(term(s.args[0], kSum) + " " + s.head.name() + " " + term(s.args[1], kProduct),
                  ctx > kSum);
    }
    if (s.head.is(TermKind::Const) && !is_arith_op(s.head.name())) {
      std::string out = s.head.name() + "(";
      for (std::size_t i = 0; i < s.args.size(); ++i) {
        if (i) out += ", ";
        out += term(s.args[i], kTop);
      }
      return out + ")";
    }
    std::string out = term(s.head, kApp);
    for (const auto& a : s.args) out += " " + term(a, kArg);
    return wrap(out, ctx > kApp);
  }

  std::string binder_name(const std::string& hint, const std::set<std::string>& consts) const {
    std::string base = valid_binder(hint) ? hint : "x";
    auto taken = [&](const std::string& n) {
      return consts.count(n) || std::find(scope_.begin(), scope_.end(), n) != scope_.end();
    };
    if (!taken(base)) return base;
    for (int i = 1;; ++i) {
      std::string cand = base + std::to_string(i);
      if (!taken(cand)) return cand;
    }
  }

  std::vector<std::string> scope_;
};

}  // namespace

std::string pretty(const Term& t) { return Printer().term(t, kTop); }

std::string pretty(const Formula& f) { return Printer().formula(f, 0); }

std::string pretty(const AgentDecl& d) { return d.name + ": " + pretty(d.formula) + "."; }

}  // namespace taskcl
