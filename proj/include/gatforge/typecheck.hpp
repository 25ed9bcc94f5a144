#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gatforge/signature.hpp"
#include "gatforge/syntax.hpp"

namespace gatforge {

struct TypeError {
  std::string message;
};

// Checks that ctx.entries[from..] are well-formed on top of the prefix.
std::optional<TypeError> check_telescope(const Signature& sig, const Telescope& ctx,
                                         std::size_t from = 0);

// ctx must be well-formed. Returns the inferred type (the context entry for a
// variable, the instantiated output type for an application).
std::variant<Type, TypeError> infer_term(const Signature& sig, const Telescope& ctx,
                                         const Term& t);

std::optional<TypeError> check_term(const Signature& sig, const Telescope& ctx, const Term& t,
                                    const Type& expected);

std::optional<TypeError> check_type(const Signature& sig, const Telescope& ctx, const Type& a);

// s : ctx -> target with target a closed telescope.
std::optional<TypeError> check_subst(const Signature& sig, const Telescope& ctx, const Subst& s,
                                     const Telescope& target);

// Every boundary and output type must typecheck against the prefix signature.
// Validation is idempotent; each error names the offending declaration.
std::vector<Diag> validate_signature(const Signature& sig);

}  // namespace gatforge
