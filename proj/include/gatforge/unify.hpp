#pragma once

#include <string>
#include <variant>

#include "gatforge/signature.hpp"
#include "gatforge/syntax.hpp"

namespace gatforge {

enum class NoUnifierReason { HeadClash, Occurs, RigidDependency, RigidMismatch };

std::string to_string(NoUnifierReason r);

// A parallel pair over a unification context Gamma.Delta. The first flex_len
// entries of ctx are flexible; the rest are rigid and must be preserved by
// every unifier.
struct UnifProblem {
  struct SubstPair {
    Telescope target;  // closed
    Subst lhs, rhs;    // Gamma.Delta -> target
  };
  struct TypePair {
    Type lhs, rhs;
  };
  struct TermPair {
    Type type;  // common type of both sides, over Gamma.Delta
    Term lhs, rhs;
  };

  Telescope ctx;  // Gamma.Delta, closed
  std::size_t flex_len = 0;
  std::variant<SubstPair, TypePair, TermPair> pair;

  Telescope flexible() const { return ctx.prefix(flex_len); }
  Telescope rigid() const { return ctx.suffix_from(flex_len); }
};

// A most general unifier rho : Omega -> Gamma. Every variable of Omega is the
// image of a unique surviving variable of Gamma; origin records it, which is
// what lets callers factor an arbitrary unifier through rho.
struct Mgu {
  Telescope omega;
  Subst rho;
  std::vector<VarIdx> origin;
};

struct MguResult {
  std::variant<Mgu, NoUnifierReason> v;

  bool ok() const { return std::holds_alternative<Mgu>(v); }
  const Mgu& mgu() const { return std::get<Mgu>(v); }
  NoUnifierReason reason() const { return std::get<NoUnifierReason>(v); }
};

// Most general unifier of a variable and a term of the same type over a
// closed context (no rigid part). Fails exactly on the occurs check; on
// success the context strictly shrinks.
struct Instantiation {
  Telescope ctx;  // Gamma[a := b]
  Subst rho;      // Gamma[a := b] -> Gamma
  std::vector<VarIdx> origin;
};
std::variant<Instantiation, NoUnifierReason> instantiate(const Telescope& ctx, VarIdx var,
                                                         const Term& term);

// Inputs must be well-typed with both sides of the pair sharing a classifier;
// that precondition is the caller's job (the CLI checks it). The result
// satisfies lhs[rho+] = rhs[rho+], and rho is the identity or strictly
// shrinks the flexible context.
MguResult mgu(const Signature& sig, const UnifProblem& p);

}  // namespace gatforge
