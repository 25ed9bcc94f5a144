#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "gatforge/signature.hpp"
#include "gatforge/syntax.hpp"

namespace gatforge {

// Canonical printing. Display variables are v0, v1, ... in binding order;
// terms print applicatively with parenthesized compound arguments. Optional
// rename hook lets callers substitute display names for declarations.
using DeclNamer = std::function<std::string(DeclId)>;

std::string print_term(const Signature& sig, const Term& t, const DeclNamer& namer = nullptr);
std::string print_type(const Signature& sig, const Type& a, const DeclNamer& namer = nullptr);
std::string print_telescope(const Signature& sig, const Telescope& tele,
                            const DeclNamer& namer = nullptr);
// Suffix entries only, with display names continuing at base.
std::string print_telescope_tail(const Signature& sig, const Telescope& tele, std::size_t base,
                                 const DeclNamer& namer = nullptr);
std::string print_subst(const Signature& sig, const Subst& s, const DeclNamer& namer = nullptr);
std::string print_decl(const Signature& sig, const Decl& d, const DeclNamer& namer = nullptr);
// One declaration per line, single spaces, fully parenthesized binders.
std::string print_signature(const Signature& sig);

// Signature file format: UTF-8, one declaration per line or ';'-separated,
// '#' starts a line comment.
std::variant<Signature, std::vector<Diag>> parse_signature(const std::string& source);

// Item parsing against a context of named binders.
struct Scope {
  std::vector<std::string> names;  // display name per level
  void push(std::string name) { names.push_back(std::move(name)); }
};
Scope default_scope(std::size_t n);  // v0, v1, ...

std::variant<Term, Diag> parse_term(const Signature& sig, const Scope& scope,
                                    const std::string& text, int line = 0);
std::variant<Type, Diag> parse_type(const Signature& sig, const Scope& scope,
                                    const std::string& text, int line = 0);
// "(x : X) (y : Y x)" or "()" for the empty telescope; binders extend the
// given base scope, which is mutated to include them.
std::variant<Telescope, Diag> parse_telescope(const Signature& sig, Scope& scope,
                                              const std::string& text, int line = 0);
// "[t0, t1, ...]" or "[]".
std::variant<TermVec, Diag> parse_term_list(const Signature& sig, const Scope& scope,
                                            const std::string& text, int line = 0);

}  // namespace gatforge
