#pragma once

// First-order unification extended to higher-order patterns: a meta applied
// to distinct bound variables. Anything outside that fragment is reported as
// NonPattern instead of guessed at.

#include <cstddef>
#include <string>
#include <vector>

#include "taskcl/term.hpp"

namespace taskcl {

enum class UnifyStatus { Ok, Failure, NonPattern };

struct UnifyResult {
  UnifyStatus status = UnifyStatus::Failure;
  Substitution sigma;  // idempotent; equal to the input on failure
};

/// Triangular substitution with an undo trail, used by backtracking search.
class Bindings {
 public:
  explicit Bindings(MetaId next_free = 1) : next_(next_free) {}

  const Substitution& subst() const { return sigma_; }
  Term fresh(const std::string& hint);
  void bind(MetaId id, Term t);

  std::size_t mark() const { return trail_.size(); }
  void undo_to(std::size_t mark);

  Term resolve(const Term& t, std::uint64_t fuel = kDefaultTermFuel) const {
    return apply_subst(sigma_, t, fuel);
  }

 private:
  Substitution sigma_;
  std::vector<MetaId> trail_;
  MetaId next_;
};

/// Unifies two beta-normal terms, extending `bindings` on success. On any
/// other status the bindings are rolled back to their state on entry.
UnifyStatus unify_into(const Term& a, const Term& b, Bindings& bindings,
                       std::uint64_t fuel = kDefaultTermFuel);

/// Pure form: the returned substitution extends `sigma` and is idempotent.
UnifyResult unify(const Term& a, const Term& b, const Substitution& sigma = {},
                  std::uint64_t fuel = kDefaultTermFuel);

const char* to_string(UnifyStatus s);

}  // namespace taskcl
