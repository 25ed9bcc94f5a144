#pragma once

#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "gatforge/generalize.hpp"
#include "gatforge/oracle.hpp"
#include "gatforge/signature.hpp"
#include "gatforge/syntax.hpp"
#include "gatforge/text.hpp"
#include "gatforge/typecheck.hpp"
#include "gatforge/unify.hpp"

namespace gatforge::testing {

inline const char* kDemoSig =
    "sort X\n"
    "sort Y (x : X)\n"
    "fun f1 (x : X) : X\n"
    "fun f2 (x : X) (y : X) : X\n"
    "fun g (x : X) (y : Y x) : X\n"
    "fun h (x : X) (y : Y x) : Y (f1 x)\n";

inline Signature demo_signature() {
  auto r = parse_signature(kDemoSig);
  if (auto* errs = std::get_if<std::vector<Diag>>(&r))
    throw std::runtime_error(format_diags(*errs));
  return std::get<Signature>(r);
}

// Terse parse helpers; failures throw so tests read linearly.
inline Term term(const Signature& sig, const Scope& sc, const std::string& s) {
  auto r = parse_term(sig, sc, s);
  if (auto* d = std::get_if<Diag>(&r)) throw std::runtime_error("term '" + s + "': " + d->message);
  return std::get<Term>(r);
}

inline Type type(const Signature& sig, const Scope& sc, const std::string& s) {
  auto r = parse_type(sig, sc, s);
  if (auto* d = std::get_if<Diag>(&r)) throw std::runtime_error("type '" + s + "': " + d->message);
  return std::get<Type>(r);
}

inline Telescope tele(const Signature& sig, Scope& sc, const std::string& s) {
  auto r = parse_telescope(sig, sc, s);
  if (auto* d = std::get_if<Diag>(&r)) throw std::runtime_error("tele '" + s + "': " + d->message);
  return std::get<Telescope>(r);
}

inline Subst subst_of(std::size_t src, TermVec terms) {
  Subst s;
  s.src_size = src;
  s.terms = std::move(terms);
  return s;
}

inline Type infer(const Signature& sig, const Telescope& ctx, const Term& t) {
  auto r = infer_term(sig, ctx, t);
  if (auto* e = std::get_if<TypeError>(&r)) throw std::runtime_error(e->message);
  return std::get<Type>(r);
}

// ---------------------------------------------------------------------------
// Seeded random generation for the property and acceptance suites.

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  std::size_t pick(std::size_t n) { return n == 0 ? 0 : eng() % n; }
  int range(int lo, int hi) { return lo + static_cast<int>(pick(hi - lo + 1)); }
  bool percent(int p) { return static_cast<int>(pick(100)) < p; }
};

// A small stratified signature: one or two base sorts, possibly a dependent
// sort, and a handful of term-formers whose boundaries and output types are
// drawn from bounded enumeration over the prefix.
inline Signature random_signature(Rng& rng) {
  Signature sig;
  EnumBudget tiny{1, 2, 64};

  int n_sorts = rng.range(1, 2);
  for (int i = 0; i < n_sorts; ++i) {
    Decl d;
    d.name = "S" + std::to_string(i);
    d.kind = DeclKind::SortFormer;
    sig.push(std::move(d));
  }
  int n_dep = rng.percent(60) ? (rng.percent(20) ? 2 : 1) : 0;
  for (int i = 0; i < n_dep; ++i) {
    Decl d;
    d.name = "D" + std::to_string(i);
    d.kind = DeclKind::SortFormer;
    int arity = rng.percent(75) ? 1 : 2;
    bool ok = true;
    for (int k = 0; k < arity && ok; ++k) {
      TypeEnum options = enumerate_types(sig, d.boundary, tiny);
      if (options.types.empty()) {
        ok = false;
        break;
      }
      d.boundary.entries.push_back(options.types[rng.pick(options.types.size())]);
    }
    if (ok) sig.push(std::move(d));
  }

  int n_funs = rng.range(2, 4);
  for (int i = 0; i < n_funs; ++i) {
    Decl d;
    d.name = "F" + std::to_string(i);
    d.kind = DeclKind::TermFormer;
    int arity = rng.range(0, 2);
    bool ok = true;
    for (int k = 0; k < arity && ok; ++k) {
      TypeEnum options = enumerate_types(sig, d.boundary, tiny);
      if (options.types.empty()) {
        ok = false;
        break;
      }
      d.boundary.entries.push_back(options.types[rng.pick(options.types.size())]);
    }
    if (!ok) continue;
    TypeEnum outs = enumerate_types(sig, d.boundary, tiny);
    if (outs.types.empty()) continue;
    d.output_type = outs.types[rng.pick(outs.types.size())];
    sig.push(std::move(d));
  }
  return sig;
}

inline std::optional<Type> random_type(const Signature& sig, const Telescope& ctx, Rng& rng,
                                       int depth = 2) {
  TypeEnum options = enumerate_types(sig, ctx, EnumBudget{depth, 0, 256});
  if (options.types.empty()) return std::nullopt;
  return options.types[rng.pick(options.types.size())];
}

inline Telescope random_context(const Signature& sig, Rng& rng, int max_len) {
  Telescope ctx;
  int len = rng.range(0, max_len);
  for (int i = 0; i < len; ++i) {
    auto t = random_type(sig, ctx, rng, 1);
    if (!t) break;
    ctx.entries.push_back(*t);
  }
  return ctx;
}

inline std::optional<Term> random_term(const Signature& sig, const Telescope& ctx,
                                       const Type& type, Rng& rng, int depth = 2) {
  TermEnum options = enumerate_terms(sig, ctx, type, EnumBudget{depth, 0, 256});
  if (options.terms.empty()) return std::nullopt;
  return options.terms[rng.pick(options.terms.size())];
}

// sigma : Lambda -> gamma built componentwise; nullopt when an entry type has
// no inhabitants over the drawn context.
inline std::optional<std::pair<Telescope, Subst>> random_substitution(const Signature& sig,
                                                                      const Telescope& gamma,
                                                                      Rng& rng, int tries = 16) {
  for (int attempt = 0; attempt < tries; ++attempt) {
    Telescope lambda = random_context(sig, rng, 3);
    Subst sub;
    sub.src_size = lambda.size();
    bool ok = true;
    for (std::size_t i = 0; i < gamma.size() && ok; ++i) {
      Subst pre = subst_of(lambda.size(), sub.terms);
      Type expected = apply_subst(gamma.entries[i], pre);
      auto t = random_term(sig, lambda, expected, rng);
      if (!t) {
        ok = false;
        break;
      }
      sub.terms.push_back(*t);
    }
    if (ok) return std::make_pair(lambda, sub);
  }
  return std::nullopt;
}

// Collects every subterm position of t as (path-free) subterm copies.
inline void collect_subterms(const Term& t, std::vector<Term>& out) {
  out.push_back(t);
  if (t.is_app())
    for (const Term& a : t.args()) collect_subterms(a, out);
}

// Replaces the first occurrence of `what` by `with`.
inline Term replace_first(const Term& t, const Term& what, const Term& with, bool& done) {
  if (done) return t;
  if (t == what) {
    done = true;
    return with;
  }
  if (t.is_var()) return t;
  TermVec args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(replace_first(a, what, with, done));
  return Term::app(t.head(), std::move(args));
}

// A random unification problem; solvable with good probability thanks to the
// abstraction strategy: both sides are the same ground term with distinct
// flexible variables spliced over distinct subterms.
inline std::optional<UnifProblem> random_unify_problem(const Signature& sig, Rng& rng) {
  for (int attempt = 0; attempt < 12; ++attempt) {
    Telescope ctx = random_context(sig, rng, 4);
    std::size_t flex_len = rng.pick(ctx.size() + 1);
    auto a = random_type(sig, ctx, rng, 2);
    if (!a) continue;

    UnifProblem p;
    p.ctx = ctx;
    p.flex_len = flex_len;

    if (rng.percent(20)) {
      auto lt = random_type(sig, ctx, rng, 2);
      auto rt = random_type(sig, ctx, rng, 2);
      if (!lt || !rt) continue;
      p.pair = UnifProblem::TypePair{*lt, *rt};
      return p;
    }

    auto t = random_term(sig, ctx, *a, rng, 2);
    if (!t) continue;
    Term lhs = *t, rhs = *t;
    if (rng.percent(75)) {
      // Splice flexible variables that do not occur in the base term over
      // subterms of matching type.
      std::vector<Term> subs;
      collect_subterms(*t, subs);
      for (int k = 0; k < 2; ++k) {
        const Term& target = subs[rng.pick(subs.size())];
        Type target_ty = infer(sig, ctx, target);
        std::vector<VarIdx> cands;
        for (std::size_t v = 0; v < flex_len; ++v) {
          if (ctx.entries[v] == target_ty && !first_level_in_range(*t, static_cast<VarIdx>(v),
                                                                   static_cast<VarIdx>(v) + 1))
            cands.push_back(static_cast<VarIdx>(v));
        }
        if (cands.empty()) continue;
        bool done = false;
        Term var = Term::var(cands[rng.pick(cands.size())]);
        if (k == 0)
          lhs = replace_first(lhs, target, var, done);
        else
          rhs = replace_first(rhs, target, var, done);
      }
    } else {
      auto other = random_term(sig, ctx, *a, rng, 2);
      if (other) rhs = *other;
    }
    p.pair = UnifProblem::TermPair{*a, lhs, rhs};
    return p;
  }
  return std::nullopt;
}

// A random generalization problem over omega/delta/gamma/rho.
inline std::optional<GenProblem> random_gen_problem(const Signature& sig, Rng& rng) {
  for (int attempt = 0; attempt < 12; ++attempt) {
    GenProblem p;
    p.omega = rng.percent(60) ? Telescope{} : random_context(sig, rng, 2);
    // delta over omega
    int dlen = rng.range(0, 2);
    Telescope od = p.omega;
    for (int i = 0; i < dlen; ++i) {
      auto t = random_type(sig, od, rng, 1);
      if (!t) break;
      od.entries.push_back(*t);
      p.delta.entries.push_back(*t);
    }
    p.gamma = random_context(sig, rng, 3);
    p.rho.src_size = p.gamma.size();
    bool ok = true;
    for (std::size_t i = 0; i < p.omega.size() && ok; ++i) {
      Subst pre = subst_of(p.gamma.size(), p.rho.terms);
      Type expected = apply_subst(p.omega.entries[i], pre);
      auto t = random_term(sig, p.gamma, expected, rng);
      if (!t) ok = false;
      else p.rho.terms.push_back(*t);
    }
    if (!ok) continue;

    Telescope delta_rho = apply_subst_telescope(p.delta, p.rho);
    Telescope item_ctx = Telescope::concat(p.gamma, delta_rho);
    if (rng.percent(70)) {
      auto t = random_type(sig, item_ctx, rng, 3);
      if (!t) continue;
      p.item = GenProblem::TypeItem{*t};
    } else {
      auto ambient = random_type(sig, od, rng, 2);
      if (!ambient) continue;
      Type expected = apply_subst(*ambient, extend(p.rho, p.delta.size()));
      auto t = random_term(sig, item_ctx, expected, rng, 2);
      if (!t) continue;
      p.item = GenProblem::TermItem{*ambient, *t};
    }
    return p;
  }
  return std::nullopt;
}

// A generalization problem whose item is a bare flexible variable; paired
// with a substitution mapping that variable to a compound term, it exercises
// the case analysis where naturality is most fragile.
inline std::optional<std::pair<GenProblem, std::pair<Telescope, Subst>>>
variable_subtlety_pair(const Signature& sig, Rng& rng) {
  for (int attempt = 0; attempt < 24; ++attempt) {
    Telescope gamma = random_context(sig, rng, 3);
    if (gamma.empty()) continue;
    std::size_t v = rng.pick(gamma.size());
    if (support(gamma, Term::var(static_cast<VarIdx>(v))).size() != 1) continue;  // closed entry
    Type vt = gamma.entries[v];

    GenProblem p;
    p.gamma = gamma;
    p.rho.src_size = gamma.size();
    p.item = GenProblem::TermItem{vt, Term::var(static_cast<VarIdx>(v))};

    auto drawn = random_substitution(sig, gamma, rng);
    if (!drawn) continue;
    // Make sure the variable lands on an application.
    if (!drawn->second.terms[v].is_app()) {
      Type expected = apply_subst(gamma.entries[v], subst_of(drawn->first.size(), {}));
      TermEnum apps = enumerate_terms(sig, drawn->first, expected, EnumBudget{2, 0, 128});
      Term found;
      bool have = false;
      for (const Term& cand : apps.terms) {
        if (cand.is_app()) {
          found = cand;
          have = true;
          break;
        }
      }
      if (!have) continue;
      drawn->second.terms[v] = found;
    }
    return std::make_pair(p, *drawn);
  }
  return std::nullopt;
}

}  // namespace gatforge::testing
