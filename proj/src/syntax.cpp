#include "gatforge/syntax.hpp"

#include <algorithm>
#include <stdexcept>

namespace gatforge {

Term Term::var(VarIdx v) {
  Term t;
  t.var_ = v;
  return t;
}

Term Term::app(DeclId head, TermVec args) {
  Term t;
  t.app_ = std::make_shared<const AppNode>(AppNode{head, std::move(args)});
  return t;
}

bool operator==(const Term& a, const Term& b) {
  if (a.app_ == b.app_) return a.app_ ? true : a.var_ == b.var_;
  if (!a.app_ || !b.app_) return false;
  return a.app_->head == b.app_->head && a.app_->args == b.app_->args;
}

Telescope Telescope::prefix(std::size_t n) const {
  Telescope out;
  out.entries.assign(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

Telescope Telescope::suffix_from(std::size_t n) const {
  Telescope out;
  out.entries.assign(entries.begin() + static_cast<std::ptrdiff_t>(n), entries.end());
  return out;
}

Telescope Telescope::concat(const Telescope& a, const Telescope& b) {
  Telescope out = a;
  out.entries.insert(out.entries.end(), b.entries.begin(), b.entries.end());
  return out;
}

Subst Subst::identity(std::size_t n) {
  Subst s;
  s.src_size = n;
  s.terms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) s.terms.push_back(Term::var(static_cast<VarIdx>(i)));
  return s;
}

bool Subst::is_identity() const {
  if (src_size != terms.size()) return false;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!terms[i].is_var() || terms[i].var() != i) return false;
  }
  return true;
}

Term apply_subst(const Term& t, const Subst& s) {
  if (t.is_var()) {
    if (t.var() >= s.terms.size()) throw std::logic_error("apply_subst: level out of range");
    return s.terms[t.var()];
  }
  return Term::app(t.head(), apply_subst(t.args(), s));
}

Type apply_subst(const Type& a, const Subst& s) { return Type{a.head, apply_subst(a.args, s)}; }

TermVec apply_subst(const TermVec& ts, const Subst& s) {
  TermVec out;
  out.reserve(ts.size());
  for (const Term& t : ts) out.push_back(apply_subst(t, s));
  return out;
}

Subst apply_subst(const Subst& g, const Subst& s) {
  Subst out;
  out.src_size = s.src_size;
  out.terms = apply_subst(g.terms, s);
  return out;
}

Subst compose(const Subst& outer, const Subst& inner) {
  Subst out;
  out.src_size = inner.src_size;
  out.terms = apply_subst(outer.terms, inner);
  return out;
}

Subst extend(const Subst& s, std::size_t k) {
  Subst out = s;
  out.src_size = s.src_size + k;
  out.terms.reserve(out.terms.size() + k);
  for (std::size_t j = 0; j < k; ++j)
    out.terms.push_back(Term::var(static_cast<VarIdx>(s.src_size + j)));
  return out;
}

Telescope apply_subst_telescope(const Telescope& tele, const Subst& s) {
  Telescope out;
  out.entries.reserve(tele.size());
  for (std::size_t i = 0; i < tele.size(); ++i)
    out.entries.push_back(apply_subst(tele.entries[i], extend(s, i)));
  return out;
}

Term weaken(const Term& t, std::size_t) { return t; }
Type weaken(const Type& a, std::size_t) { return a; }

std::optional<VarIdx> first_level_in_range(const Term& t, VarIdx begin, VarIdx end) {
  if (t.is_var()) {
    if (t.var() >= begin && t.var() < end) return t.var();
    return std::nullopt;
  }
  return first_level_in_range(t.args(), begin, end);
}

std::optional<VarIdx> first_level_in_range(const Type& a, VarIdx begin, VarIdx end) {
  return first_level_in_range(a.args, begin, end);
}

std::optional<VarIdx> first_level_in_range(const TermVec& ts, VarIdx begin, VarIdx end) {
  for (const Term& t : ts) {
    if (auto hit = first_level_in_range(t, begin, end)) return hit;
  }
  return std::nullopt;
}

std::optional<StrengthenFailure> strengthen_check(const Term& t, std::size_t gamma_len,
                                                  std::size_t delta_len) {
  auto hit = first_level_in_range(t, static_cast<VarIdx>(gamma_len),
                                  static_cast<VarIdx>(gamma_len + delta_len));
  if (hit) return StrengthenFailure{*hit};
  return std::nullopt;
}

std::optional<StrengthenFailure> strengthen_check(const Type& a, std::size_t gamma_len,
                                                  std::size_t delta_len) {
  auto hit = first_level_in_range(a, static_cast<VarIdx>(gamma_len),
                                  static_cast<VarIdx>(gamma_len + delta_len));
  if (hit) return StrengthenFailure{*hit};
  return std::nullopt;
}

std::optional<DeclId> first_head_at_or_above(const Term& t, DeclId bound) {
  if (t.is_var()) return std::nullopt;
  if (t.head() >= bound) return t.head();
  for (const Term& u : t.args()) {
    if (auto hit = first_head_at_or_above(u, bound)) return hit;
  }
  return std::nullopt;
}

std::optional<DeclId> first_head_at_or_above(const Type& a, DeclId bound) {
  if (a.head >= bound) return a.head;
  for (const Term& u : a.args) {
    if (auto hit = first_head_at_or_above(u, bound)) return hit;
  }
  return std::nullopt;
}

std::optional<DeclId> first_head_at_or_above(const Telescope& tele, DeclId bound) {
  for (const Type& a : tele.entries) {
    if (auto hit = first_head_at_or_above(a, bound)) return hit;
  }
  return std::nullopt;
}

namespace {

void collect_levels(const Term& t, std::vector<bool>& seen) {
  if (t.is_var()) {
    if (t.var() >= seen.size()) throw std::logic_error("support: level out of range");
    seen[t.var()] = true;
    return;
  }
  for (const Term& u : t.args()) collect_levels(u, seen);
}

std::vector<VarIdx> close_under_dependencies(const Telescope& ctx, std::vector<bool> seen) {
  // Scan from the top down: entry types only mention earlier levels, so one
  // right-to-left pass reaches the fixed point.
  for (std::size_t i = seen.size(); i-- > 0;) {
    if (!seen[i]) continue;
    for (const Term& arg : ctx.entries[i].args) collect_levels(arg, seen);
  }
  std::vector<VarIdx> out;
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i]) out.push_back(static_cast<VarIdx>(i));
  return out;
}

}  // namespace

std::vector<VarIdx> support(const Telescope& ctx, const Term& t) {
  std::vector<bool> seen(ctx.size(), false);
  collect_levels(t, seen);
  return close_under_dependencies(ctx, std::move(seen));
}

std::vector<VarIdx> support(const Telescope& ctx, const Type& a) {
  std::vector<bool> seen(ctx.size(), false);
  for (const Term& arg : a.args) collect_levels(arg, seen);
  return close_under_dependencies(ctx, std::move(seen));
}

SupportSplit split_by_support(const Telescope& ctx, const std::vector<VarIdx>& subset) {
  const std::size_t n = ctx.size();
  std::vector<bool> in_subset(n, false);
  for (VarIdx v : subset) {
    if (v >= n) throw std::logic_error("split_by_support: level out of range");
    in_subset[v] = true;
  }

  SupportSplit out;
  out.gamma0_len = subset.size();
  out.old_pos.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (in_subset[i]) out.old_pos.push_back(static_cast<VarIdx>(i));
  for (std::size_t i = 0; i < n; ++i)
    if (!in_subset[i]) out.old_pos.push_back(static_cast<VarIdx>(i));

  out.new_pos.assign(n, 0);
  for (std::size_t q = 0; q < n; ++q) out.new_pos[out.old_pos[q]] = static_cast<VarIdx>(q);

  Subst rename_to_new;  // maps old var l to Var(new_pos[l]); acts on items over Gamma
  rename_to_new.src_size = n;
  for (std::size_t l = 0; l < n; ++l) rename_to_new.terms.push_back(Term::var(out.new_pos[l]));

  out.reordered.entries.reserve(n);
  for (std::size_t q = 0; q < n; ++q) {
    // Dependency closure of the subset guarantees every dependency of the
    // entry lands at an earlier new position.
    out.reordered.entries.push_back(apply_subst(ctx.entries[out.old_pos[q]], rename_to_new));
  }

  out.renaming.src_size = n;  // Gamma0.Gamma1 -> Gamma
  out.renaming.terms = rename_to_new.terms;
  out.renaming_inv.src_size = n;  // Gamma -> Gamma0.Gamma1
  for (std::size_t q = 0; q < n; ++q) out.renaming_inv.terms.push_back(Term::var(out.old_pos[q]));
  return out;
}

}  // namespace gatforge
