#pragma once

// Untyped lambda terms used as arguments of atomic formulas.
//
// Bound variables are de Bruijn indices; the binder name kept on Lam and
// Bound nodes is only a printing hint and never affects equality. Meta
// variables are global unknowns identified by id, so a meta binding never
// mentions a loose bound variable and substitution under binders needs no
// shifting.

#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace taskcl {

using MetaId = std::uint64_t;

enum class TermKind { Const, Int, Bound, Meta, App, Lam };

inline constexpr std::uint64_t kDefaultTermFuel = 100000;

class Term {
 public:
  struct Node;

  /// Null handle; only useful as a placeholder before assignment.
  Term() = default;

  static Term constant(std::string name);
  static Term integer(std::int64_t value);
  static Term bound(std::uint32_t index, std::string hint = "x");
  static Term meta(std::string name, MetaId id);
  static Term app(Term fun, Term arg);
  static Term lam(std::string hint, Term body);
  /// Left-nested application `head a1 ... an`.
  static Term apply(Term head, std::span<const Term> args);
  static Term apply(Term head, std::initializer_list<Term> args);

  bool is_null() const { return node_ == nullptr; }
  TermKind kind() const;
  bool is(TermKind k) const { return node_ && kind() == k; }

  /// Constant or meta name, or the binder hint of Bound/Lam.
  const std::string& name() const;
  std::int64_t value() const;
  std::uint32_t index() const;
  MetaId meta_id() const;
  const Term& fun() const;
  const Term& arg() const;
  const Term& body() const;

  bool has_metas() const;
  /// One more than the largest loose de Bruijn index (0 when closed).
  std::uint32_t loose_bound() const;

  bool same_node(const Term& other) const { return node_ == other.node_; }

 private:
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Term::Node {
  TermKind kind;
  std::string name;
  std::int64_t value = 0;  // Int value, Bound index or Meta id
  Term a;                  // App fun / Lam body
  Term b;                  // App arg
  bool metas = false;
  std::uint32_t loose = 0;
};

/// Head and arguments of a left-nested application.
struct Spine {
  Term head;
  std::vector<Term> args;
};
Spine spine(const Term& t);

Term shift(const Term& t, std::int64_t delta, std::uint32_t cutoff = 0);
/// Replaces index 0 in `body` by `value` and lowers the other loose indices.
Term instantiate(const Term& body, const Term& value);
/// Same as instantiate, for the binder `depth` levels out.
Term subst_bound(const Term& t, std::uint32_t depth, const Term& value);

/// Normal-order beta normalization; every contraction costs one unit.
/// Throws FuelExhausted when `fuel` contractions did not reach normal form.
Term beta_normalize(const Term& t, std::uint64_t fuel = kDefaultTermFuel);
bool is_beta_normal(const Term& t);

/// Equality up to renaming of bound variables (beta only, no eta).
bool alpha_eq(const Term& a, const Term& b);

std::set<MetaId> free_metas(const Term& t);
bool occurs(MetaId id, const Term& t);
MetaId max_meta_id(const Term& t);

/// Finite map from meta ids to terms.
class Substitution {
 public:
  const Term* find(MetaId id) const;
  void bind(MetaId id, Term t) { map_[id] = std::move(t); }
  void erase(MetaId id) { map_.erase(id); }
  bool contains(MetaId id) const { return map_.count(id) != 0; }
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  const std::map<MetaId, Term>& entries() const { return map_; }
  MetaId max_id() const;

 private:
  std::map<MetaId, Term> map_;
};

/// Replaces every bound meta, following chains, and re-normalizes when a
/// replacement put a lambda in head position.
Term apply_subst(const Substitution& sigma, const Term& t,
                 std::uint64_t fuel = kDefaultTermFuel);

/// Rewrites a triangular substitution into idempotent form.
Substitution resolve(const Substitution& sigma, std::uint64_t fuel = kDefaultTermFuel);
bool is_idempotent(const Substitution& sigma);

}  // namespace taskcl
