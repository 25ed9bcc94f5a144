#pragma once

#include <string>
#include <vector>

#include "gatforge/generalize.hpp"
#include "gatforge/signature.hpp"
#include "gatforge/syntax.hpp"
#include "gatforge/unify.hpp"

namespace gatforge {

// Terminality is a statement over an infinite category; every check here is
// relative to an explicit budget, echoed in the verdict. Depth of a variable
// is 0 and of an application 1 + the maximum argument depth; enumeration is
// exhaustive within the budget unless a result cap marks it truncated.
struct EnumBudget {
  int max_term_depth = 3;
  int max_context_len = 3;
  long max_results = 2000;
};

struct TermEnum {
  std::vector<Term> terms;
  bool truncated = false;
};
TermEnum enumerate_terms(const Signature& sig, const Telescope& ctx, const Type& type,
                         const EnumBudget& budget);

struct TypeEnum {
  std::vector<Type> types;
  bool truncated = false;
};
TypeEnum enumerate_types(const Signature& sig, const Telescope& ctx, const EnumBudget& budget);

// Context entry types are drawn one level shallower than the term budget,
// which keeps the context space tractable; certificates state the budget.
struct ContextEnum {
  std::vector<Telescope> contexts;
  bool truncated = false;
};
ContextEnum enumerate_contexts(const Signature& sig, const EnumBudget& budget);

// All substitutions source -> target with component terms within the depth
// budget, componentwise dependent, deterministic order.
struct SubstEnum {
  std::vector<Subst> substs;
  bool truncated = false;
};
SubstEnum enumerate_substs(const Signature& sig, const Telescope& source, const Telescope& target,
                           const EnumBudget& budget);

struct UnifierEnum {
  struct Entry {
    Telescope theta;
    Subst sub;  // theta -> flexible context, sub+ unifies the pair
  };
  std::vector<Entry> unifiers;
  bool truncated = false;
};
UnifierEnum enumerate_unifiers(const Signature& sig, const UnifProblem& p,
                               const EnumBudget& budget);

enum class VerdictKind { Certificate, CounterExample, BudgetExhausted };
std::string to_string(VerdictKind k);

// Certificates are budget-relative; counterexamples are absolute.
struct OracleReport {
  VerdictKind kind = VerdictKind::Certificate;
  EnumBudget budget;
  std::size_t checked = 0;  // unifiers or candidate factors examined
  std::size_t probes = 0;   // naturality probes run (mgg only)
  std::string detail;
};

OracleReport check_mgu_terminal(const Signature& sig, const UnifProblem& p,
                                const MguResult& result, const EnumBudget& budget);

OracleReport check_mgg_terminal(const Signature& sig, const GenProblem& p,
                                const GenResult& result, const EnumBudget& budget);

}  // namespace gatforge
