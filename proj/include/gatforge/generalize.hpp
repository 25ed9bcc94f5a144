#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "gatforge/signature.hpp"
#include "gatforge/syntax.hpp"

namespace gatforge {

// A generalization problem: an anchor context Omega with a rigid telescope
// Delta over it, a working context Gamma mapped into Omega by rho, and an
// item over Gamma.Delta[rho]. The result re-expresses the item over a generic
// context Gamma0 between Gamma and Omega.
struct GenProblem {
  struct SubstItem {
    Telescope target;  // closed
    Subst item;        // Gamma.Delta[rho] -> target
  };
  struct TypeItem {
    Type item;  // over Gamma.Delta[rho]
  };
  struct TermItem {
    Type ambient;  // over Omega.Delta
    Term item;     // over Gamma.Delta[rho], of type ambient[rho+]
  };

  Telescope omega;  // closed
  Telescope delta;  // over omega
  Telescope gamma;  // closed
  Subst rho;        // Gamma -> Omega
  std::variant<SubstItem, TypeItem, TermItem> item;
};

using GenItem = std::variant<Subst, Type, Term>;

struct GenResult {
  Telescope gamma0;  // closed
  Subst rho0;        // Gamma0 -> Omega
  GenItem item0;     // over Gamma0.Delta[rho0], same kind as the input
  Subst factor;      // f : Gamma -> Gamma0 with rho = rho0 . f, item = item0[f+]
};

// Most general generalization. Always succeeds on well-formed input; internal
// unification failures indicate a broken invariant and throw.
GenResult mgg(const Signature& sig, const GenProblem& p);

// Runs mgg on p and on p restricted along sub : Lambda -> Gamma, and reports
// whether the generic data coincides and the factors compose. Holding for all
// substitutions is strict naturality.
bool mgg_natural_check(const Signature& sig, const GenProblem& p, const Telescope& lambda,
                       const Subst& sub);
GenProblem restrict_problem(const GenProblem& p, const Telescope& lambda, const Subst& sub);

// --- Polynomial sorts -------------------------------------------------------

// A monomial's concrete shape over an ambient context: an arity telescope and
// a target (a type kind when absent, a term kind at the given type over
// ambient.arity).
struct MonoShape {
  Telescope arity;
  std::optional<Type> target;
};

// An element of a monomial over gamma: a type or a term over gamma.arity.
using MonoElem = std::variant<Type, Term>;

// Later monomials may depend on the values of earlier components, so a
// polynomial sort is carried as shape builders: given an ambient context and
// the (generalized) earlier components over it, produce the monomial's shape.
// Builders must commute with substitution.
using MonoBuilder =
    std::function<MonoShape(const Signature&, const Telescope&, std::span<const MonoElem>)>;

struct PolySort {
  std::vector<MonoBuilder> monomials;
};

struct PolyGenResult {
  Telescope gamma0;
  std::vector<MonoElem> elem0;  // component i over gamma0 extended by its arity
  Subst factor;                 // Gamma -> Gamma0
};

// Left-to-right fold of mgg over the monomials, threading the accumulated
// generic context.
PolyGenResult mgg_polysort(const Signature& sig, const PolySort& sort, const Telescope& gamma,
                           std::span<const MonoElem> elem);

}  // namespace gatforge
