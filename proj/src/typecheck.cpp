#include "gatforge/typecheck.hpp"

#include <sstream>

#include "gatforge/text.hpp"

namespace gatforge {

namespace {

std::string describe(const Signature& sig, const Type& a) { return print_type(sig, a); }
std::string describe(const Signature& sig, const Term& t) { return print_term(sig, t); }

Subst prefix_subst(const TermVec& terms, std::size_t n, std::size_t src) {
  Subst s;
  s.src_size = src;
  s.terms.assign(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(n));
  return s;
}

}  // namespace

std::optional<TypeError> check_subst(const Signature& sig, const Telescope& ctx, const Subst& s,
                                     const Telescope& target) {
  if (s.terms.size() != target.size()) {
    std::ostringstream os;
    os << "substitution has " << s.terms.size() << " terms, target telescope has "
       << target.size();
    return TypeError{os.str()};
  }
  for (std::size_t i = 0; i < target.size(); ++i) {
    Type expected = apply_subst(target.entries[i], prefix_subst(s.terms, i, ctx.size()));
    if (auto err = check_term(sig, ctx, s.terms[i], expected)) {
      std::ostringstream os;
      os << "at argument " << i << ": " << err->message;
      return TypeError{os.str()};
    }
  }
  return std::nullopt;
}

std::optional<TypeError> check_type(const Signature& sig, const Telescope& ctx, const Type& a) {
  if (a.head >= sig.size()) return TypeError{"unknown sort-former id"};
  const Decl& d = sig[a.head];
  if (d.kind != DeclKind::SortFormer)
    return TypeError{"'" + d.name + "' is a term-former, not a sort-former"};
  Subst args;
  args.src_size = ctx.size();
  args.terms = a.args;
  if (auto err = check_subst(sig, ctx, args, d.boundary)) {
    return TypeError{"in arguments of '" + d.name + "': " + err->message};
  }
  return std::nullopt;
}

std::variant<Type, TypeError> infer_term(const Signature& sig, const Telescope& ctx,
                                         const Term& t) {
  if (t.is_var()) {
    if (t.var() >= ctx.size()) {
      std::ostringstream os;
      os << "invalid variable index " << t.var() << " in context of length " << ctx.size();
      return TypeError{os.str()};
    }
    return ctx.entries[t.var()];
  }
  if (t.head() >= sig.size()) return TypeError{"unknown term-former id"};
  const Decl& d = sig[t.head()];
  if (d.kind != DeclKind::TermFormer)
    return TypeError{"'" + d.name + "' is a sort-former, not a term-former"};
  if (!d.output_type) return TypeError{"'" + d.name + "' has no output type"};
  Subst args;
  args.src_size = ctx.size();
  args.terms = t.args();
  if (auto err = check_subst(sig, ctx, args, d.boundary)) {
    return TypeError{"in arguments of '" + d.name + "': " + err->message};
  }
  return apply_subst(*d.output_type, args);
}

std::optional<TypeError> check_term(const Signature& sig, const Telescope& ctx, const Term& t,
                                    const Type& expected) {
  auto inferred = infer_term(sig, ctx, t);
  if (auto* err = std::get_if<TypeError>(&inferred)) return *err;
  const Type& actual = std::get<Type>(inferred);
  if (actual != expected) {
    std::ostringstream os;
    os << "type mismatch for " << describe(sig, t) << ": expected " << describe(sig, expected)
       << ", got " << describe(sig, actual);
    return TypeError{os.str()};
  }
  return std::nullopt;
}

std::optional<TypeError> check_telescope(const Signature& sig, const Telescope& ctx,
                                         std::size_t from) {
  for (std::size_t i = from; i < ctx.size(); ++i) {
    Telescope pre = ctx.prefix(i);
    if (auto err = check_type(sig, pre, ctx.entries[i])) {
      std::ostringstream os;
      os << "at telescope entry " << i << ": " << err->message;
      return TypeError{os.str()};
    }
  }
  return std::nullopt;
}

std::vector<Diag> validate_signature(const Signature& sig) {
  std::vector<Diag> out;
  for (std::size_t i = 0; i < sig.size(); ++i) {
    const Decl& d = sig[static_cast<DeclId>(i)];
    // A prefix view: heads must be declared strictly earlier.
    if (auto lvl = first_head_at_or_above(d.boundary, static_cast<DeclId>(i));
        lvl.has_value()) {
      out.push_back({d.line, 1,
                     "declaration '" + d.name + "' refers to '" + sig[*lvl].name +
                         "', which is not declared earlier"});
      continue;
    }
    if (auto err = check_telescope(sig, d.boundary)) {
      out.push_back({d.line, 1, "in boundary of '" + d.name + "': " + err->message});
      continue;
    }
    if (d.kind == DeclKind::TermFormer) {
      if (!d.output_type.has_value()) {
        out.push_back({d.line, 1, "term-former '" + d.name + "' lacks an output type"});
        continue;
      }
      if (auto lvl = first_head_at_or_above(*d.output_type, static_cast<DeclId>(i))) {
        out.push_back({d.line, 1,
                       "declaration '" + d.name + "' refers to '" + sig[*lvl].name +
                           "', which is not declared earlier"});
        continue;
      }
      if (auto err = check_type(sig, d.boundary, *d.output_type)) {
        out.push_back({d.line, 1, "in output type of '" + d.name + "': " + err->message});
      }
    } else if (d.output_type.has_value()) {
      out.push_back({d.line, 1, "sort-former '" + d.name + "' cannot have an output type"});
    }
  }
  return out;
}

}  // namespace gatforge
