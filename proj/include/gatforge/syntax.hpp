#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace gatforge {

// Declarations are identified by their position in the signature.
using DeclId = std::uint32_t;

// Variables are de Bruijn levels: the position of the binder in the ambient
// context, counted from the outside. Printing assigns display names v0, v1,
// ... in binding order, so level k always prints as vk.
using VarIdx = std::uint32_t;

class Term;
using TermVec = std::vector<Term>;

// Normal-form term: a variable or a fully applied term-former. There are no
// equations in the theory, so terms are normal by construction and equality
// is structural.
class Term {
 public:
  Term() = default;

  static Term var(VarIdx v);
  static Term app(DeclId head, TermVec args);

  bool is_var() const { return app_ == nullptr; }
  bool is_app() const { return app_ != nullptr; }
  VarIdx var() const { return var_; }
  DeclId head() const { return app_->head; }
  const TermVec& args() const { return app_->args; }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct AppNode {
    DeclId head;
    TermVec args;
  };

  VarIdx var_ = 0;
  std::shared_ptr<const AppNode> app_;
};

// Normal-form type: a sort-former fully applied to arguments targeting its
// boundary telescope.
struct Type {
  DeclId head = 0;
  TermVec args;

  friend bool operator==(const Type& a, const Type& b) {
    return a.head == b.head && a.args == b.args;
  }
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }
};

// A dependency-ordered sequence of types. Entry i is well-formed over the
// entries before it; when the telescope sits on top of an ambient context of
// length n, entry i may use levels < n + i. A closed telescope (n = 0)
// doubles as a context.
struct Telescope {
  std::vector<Type> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  Telescope prefix(std::size_t n) const;
  Telescope suffix_from(std::size_t n) const;
  static Telescope concat(const Telescope& a, const Telescope& b);

  friend bool operator==(const Telescope& a, const Telescope& b) {
    return a.entries == b.entries;
  }
  friend bool operator!=(const Telescope& a, const Telescope& b) { return !(a == b); }
};

// A substitution sigma : Delta -> Gamma, stored as one term over Delta per
// variable of Gamma. src_size is |Delta|; it is needed to extend the
// substitution under binders.
struct Subst {
  std::size_t src_size = 0;
  TermVec terms;

  std::size_t target_size() const { return terms.size(); }

  static Subst identity(std::size_t n);
  bool is_identity() const;

  friend bool operator==(const Subst& a, const Subst& b) {
    return a.src_size == b.src_size && a.terms == b.terms;
  }
  friend bool operator!=(const Subst& a, const Subst& b) { return !(a == b); }
};

// Substitution action. Items must be well-formed over the substitution's
// target context; a free level with no image is an internal fault.
Term apply_subst(const Term& t, const Subst& s);
Type apply_subst(const Type& a, const Subst& s);
TermVec apply_subst(const TermVec& ts, const Subst& s);
Subst apply_subst(const Subst& g, const Subst& s);

// outer : Omega -> Gamma, inner : Theta -> Omega; result Theta -> Gamma.
Subst compose(const Subst& outer, const Subst& inner);

// s extended identically over k extra entries appended to both contexts:
// s+ : Delta.Xi[s] -> Gamma.Xi.
Subst extend(const Subst& s, std::size_t k);

// Transports a telescope along s. The telescope's entries sit on top of the
// target context of s; the result sits on top of the source context.
Telescope apply_subst_telescope(const Telescope& tele, const Subst& s);

// Restriction along the projection Gamma.Delta -> Gamma. Levels are stable
// under appending, so the representation does not change; the function
// exists to mark intent at call sites.
Term weaken(const Term& t, std::size_t by);
Type weaken(const Type& a, std::size_t by);

// First level in [begin, end) occurring in the item, scanning depth-first
// left-to-right; nullopt when the item does not touch that range.
std::optional<VarIdx> first_level_in_range(const Term& t, VarIdx begin, VarIdx end);
std::optional<VarIdx> first_level_in_range(const Type& a, VarIdx begin, VarIdx end);
std::optional<VarIdx> first_level_in_range(const TermVec& ts, VarIdx begin, VarIdx end);

// Strengthening: drop the last delta_len entries of the context. Succeeds iff
// no variable of that suffix occurs; on failure reports the first offending
// level. The surviving item is representation-identical.
struct StrengthenFailure {
  VarIdx offending;
};
std::optional<StrengthenFailure> strengthen_check(const Term& t, std::size_t gamma_len,
                                                  std::size_t delta_len);
std::optional<StrengthenFailure> strengthen_check(const Type& a, std::size_t gamma_len,
                                                  std::size_t delta_len);

// First head with id >= bound, depth-first left-to-right; used by the
// stratification check (declaration i may only mention declarations < i).
std::optional<DeclId> first_head_at_or_above(const Term& t, DeclId bound);
std::optional<DeclId> first_head_at_or_above(const Type& a, DeclId bound);
std::optional<DeclId> first_head_at_or_above(const Telescope& tele, DeclId bound);

// The least dependency-closed subset of ctx's positions containing every
// variable of t: occurrences, plus transitively the variables of the types of
// occurring variables. Ascending order, which is the stable original order.
std::vector<VarIdx> support(const Telescope& ctx, const Term& t);
std::vector<VarIdx> support(const Telescope& ctx, const Type& a);

// Stable partition of a closed context along a dependency-closed subset.
// reordered = Gamma0.Gamma1 where Gamma0 lists the subset in original order;
// renaming : Gamma0.Gamma1 -> Gamma and its inverse are variable bijections.
struct SupportSplit {
  Telescope reordered;
  std::size_t gamma0_len = 0;
  Subst renaming;
  Subst renaming_inv;
  std::vector<VarIdx> new_pos;  // old level -> new level
  std::vector<VarIdx> old_pos;  // new level -> old level
};
SupportSplit split_by_support(const Telescope& ctx, const std::vector<VarIdx>& subset);

}  // namespace gatforge
