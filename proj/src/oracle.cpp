#include "gatforge/oracle.hpp"

#include <algorithm>

#include "gatforge/text.hpp"

namespace gatforge {

std::string to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Certificate: return "certificate";
    case VerdictKind::CounterExample: return "counterexample";
    case VerdictKind::BudgetExhausted: return "budget-exhausted";
  }
  return "?";
}

namespace {

// One work meter per top-level enumeration; exhausting it flips truncated.
struct Meter {
  long remaining_results;
  long remaining_steps;
  bool truncated = false;

  explicit Meter(const EnumBudget& b)
      : remaining_results(b.max_results),
        remaining_steps(std::max(10000L, b.max_results * 200)) {}

  bool step() {
    if (--remaining_steps < 0) {
      truncated = true;
      return false;
    }
    return true;
  }
  bool emit() {
    if (remaining_results <= 0) {
      truncated = true;
      return false;
    }
    --remaining_results;
    return true;
  }
};

class Enumerator {
 public:
  Enumerator(const Signature& sig, Meter& meter) : sig_(sig), meter_(meter) {}

  // Depth-first, variables first, then term-formers in declaration order with
  // argument tuples in lexicographic order.
  bool terms_of(const Telescope& ctx, const Type& type, int depth,
                const std::function<bool(const Term&)>& emit) {
    for (std::size_t l = 0; l < ctx.size(); ++l) {
      if (!meter_.step()) return false;
      if (ctx.entries[l] == type) {
        if (!emit(Term::var(static_cast<VarIdx>(l)))) return false;
      }
    }
    if (depth < 1) return true;
    for (std::size_t id = 0; id < sig_.size(); ++id) {
      const Decl& d = sig_[static_cast<DeclId>(id)];
      if (d.kind != DeclKind::TermFormer) continue;
      TermVec partial;
      bool ok = args_of(ctx, d.boundary, partial, depth - 1, [&](const TermVec& args) {
        Subst s;
        s.src_size = ctx.size();
        s.terms = args;
        if (apply_subst(*d.output_type, s) != type) return true;
        return emit(Term::app(static_cast<DeclId>(id), args));
      });
      if (!ok) return false;
    }
    return true;
  }

  bool args_of(const Telescope& ctx, const Telescope& target, TermVec& partial, int depth,
               const std::function<bool(const TermVec&)>& emit) {
    if (partial.size() == target.size()) return emit(partial);
    Subst pre;
    pre.src_size = ctx.size();
    pre.terms = partial;
    Type expected = apply_subst(target.entries[partial.size()], pre);
    return terms_of(ctx, expected, depth, [&](const Term& t) {
      partial.push_back(t);
      bool ok = args_of(ctx, target, partial, depth, emit);
      partial.pop_back();
      return ok;
    });
  }

  bool types_of(const Telescope& ctx, int depth, const std::function<bool(const Type&)>& emit) {
    for (std::size_t id = 0; id < sig_.size(); ++id) {
      const Decl& d = sig_[static_cast<DeclId>(id)];
      if (d.kind != DeclKind::SortFormer) continue;
      if (!meter_.step()) return false;
      if (d.boundary.empty()) {
        if (!emit(Type{static_cast<DeclId>(id), {}})) return false;
        continue;
      }
      if (depth < 1) continue;
      TermVec partial;
      bool ok = args_of(ctx, d.boundary, partial, depth - 1, [&](const TermVec& args) {
        return emit(Type{static_cast<DeclId>(id), args});
      });
      if (!ok) return false;
    }
    return true;
  }

 private:
  const Signature& sig_;
  Meter& meter_;
};

}  // namespace

TermEnum enumerate_terms(const Signature& sig, const Telescope& ctx, const Type& type,
                         const EnumBudget& budget) {
  TermEnum out;
  Meter meter(budget);
  Enumerator e(sig, meter);
  e.terms_of(ctx, type, budget.max_term_depth, [&](const Term& t) {
    if (!meter.emit()) return false;
    out.terms.push_back(t);
    return true;
  });
  out.truncated = meter.truncated;
  return out;
}

TypeEnum enumerate_types(const Signature& sig, const Telescope& ctx, const EnumBudget& budget) {
  TypeEnum out;
  Meter meter(budget);
  Enumerator e(sig, meter);
  e.types_of(ctx, budget.max_term_depth, [&](const Type& t) {
    if (!meter.emit()) return false;
    out.types.push_back(t);
    return true;
  });
  out.truncated = meter.truncated;
  return out;
}

ContextEnum enumerate_contexts(const Signature& sig, const EnumBudget& budget) {
  ContextEnum out;
  Meter meter(budget);
  Enumerator e(sig, meter);
  out.contexts.push_back(Telescope{});
  --meter.remaining_results;
  std::size_t next = 0;
  while (next < out.contexts.size()) {
    Telescope base = out.contexts[next++];
    if (base.size() >= static_cast<std::size_t>(budget.max_context_len)) continue;
    bool ok = e.types_of(base, std::max(0, budget.max_term_depth - 1), [&](const Type& t) {
      if (!meter.emit()) return false;
      Telescope ext = base;
      ext.entries.push_back(t);
      out.contexts.push_back(std::move(ext));
      return true;
    });
    if (!ok) break;
  }
  out.truncated = meter.truncated;
  return out;
}

SubstEnum enumerate_substs(const Signature& sig, const Telescope& source, const Telescope& target,
                           const EnumBudget& budget) {
  SubstEnum out;
  Meter meter(budget);
  Enumerator e(sig, meter);
  TermVec partial;
  e.args_of(source, target, partial, budget.max_term_depth, [&](const TermVec& terms) {
    if (!meter.emit()) return false;
    Subst s;
    s.src_size = source.size();
    s.terms = terms;
    out.substs.push_back(std::move(s));
    return true;
  });
  out.truncated = meter.truncated;
  return out;
}

namespace {

constexpr VarIdx kWildBase = 1u << 30;

int term_depth(const Term& t) {
  if (t.is_var()) return 0;
  int m = 0;
  for (const Term& a : t.args()) m = std::max(m, term_depth(a));
  return 1 + m;
}

bool lenient_equal(const Term& a, const Term& b) {
  if (a.is_var() && a.var() >= kWildBase) return true;
  if (b.is_var() && b.var() >= kWildBase) return true;
  if (a.is_var() || b.is_var()) return a.is_var() && b.is_var() && a.var() == b.var();
  if (a.head() != b.head()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    if (!lenient_equal(a.args()[i], b.args()[i])) return false;
  }
  return true;
}

struct ProblemItems {
  TermVec lhs, rhs;  // heads already matched where forced
  bool impossible = false;
};

// Reduces every problem kind to a parallel vector of terms; rigid structural
// mismatches that no substitution can repair short-circuit.
ProblemItems problem_items(const UnifProblem& p) {
  ProblemItems out;
  if (const auto* sp = std::get_if<UnifProblem::SubstPair>(&p.pair)) {
    out.lhs = sp->lhs.terms;
    out.rhs = sp->rhs.terms;
  } else if (const auto* tp = std::get_if<UnifProblem::TypePair>(&p.pair)) {
    if (tp->lhs.head != tp->rhs.head) {
      out.impossible = true;
      return out;
    }
    out.lhs = tp->lhs.args;
    out.rhs = tp->rhs.args;
  } else {
    const auto& tm = std::get<UnifProblem::TermPair>(p.pair);
    out.lhs.push_back(tm.lhs);
    out.rhs.push_back(tm.rhs);
  }
  return out;
}

}  // namespace

UnifierEnum enumerate_unifiers(const Signature& sig, const UnifProblem& p,
                               const EnumBudget& budget) {
  UnifierEnum out;
  ProblemItems items = problem_items(p);
  if (items.impossible) return out;

  const std::size_t nflex = p.flex_len;
  const std::size_t nrigid = p.ctx.size() - nflex;
  Telescope flex = p.ctx.prefix(nflex);

  ContextEnum thetas = enumerate_contexts(sig, budget);
  out.truncated = thetas.truncated;

  Meter meter(budget);
  Enumerator e(sig, meter);

  for (const Telescope& theta : thetas.contexts) {
    // Candidate substitutions theta -> flex, componentwise with wildcard
    // pruning: unassigned flexible variables match anything; a rigid
    // mismatch at assigned positions kills the whole branch.
    TermVec partial;
    std::function<bool()> go = [&]() -> bool {
      const std::size_t i = partial.size();
      Subst probe;
      probe.src_size = theta.size() + nrigid;
      probe.terms = partial;
      for (std::size_t l = i; l < nflex; ++l)
        probe.terms.push_back(Term::var(kWildBase + static_cast<VarIdx>(l)));
      for (std::size_t k = 0; k < nrigid; ++k)
        probe.terms.push_back(Term::var(static_cast<VarIdx>(theta.size() + k)));
      for (std::size_t j = 0; j < items.lhs.size(); ++j) {
        if (!lenient_equal(apply_subst(items.lhs[j], probe), apply_subst(items.rhs[j], probe)))
          return true;  // prune this branch, keep enumerating siblings
      }
      if (i == nflex) {
        Subst cand;
        cand.src_size = theta.size();
        cand.terms = partial;
        Subst ext = extend(cand, nrigid);
        bool unifies = true;
        for (std::size_t j = 0; j < items.lhs.size(); ++j) {
          if (apply_subst(items.lhs[j], ext) != apply_subst(items.rhs[j], ext)) {
            unifies = false;
            break;
          }
        }
        if (unifies) {
          if (!meter.emit()) return false;
          out.unifiers.push_back({theta, cand});
        }
        return true;
      }
      Subst pre;
      pre.src_size = theta.size();
      pre.terms = partial;
      Type expected = apply_subst(flex.entries[i], pre);
      return e.terms_of(theta, expected, budget.max_term_depth, [&](const Term& t) {
        partial.push_back(t);
        bool ok = go();
        partial.pop_back();
        return ok;
      });
    };
    if (!go()) break;
  }
  out.truncated = out.truncated || meter.truncated;
  return out;
}

namespace {

bool apply_unifies(const UnifProblem& p, const Subst& rho) {
  ProblemItems items = problem_items(p);
  if (items.impossible) return false;
  Subst ext = extend(rho, p.ctx.size() - p.flex_len);
  for (std::size_t j = 0; j < items.lhs.size(); ++j) {
    if (apply_subst(items.lhs[j], ext) != apply_subst(items.rhs[j], ext)) return false;
  }
  return true;
}

// A rigid structural clash survives every substitution: comparing the two
// sides with all flexible variables wildcarded decides emptiness outright.
bool analytically_impossible(const UnifProblem& p) {
  ProblemItems items = problem_items(p);
  if (items.impossible) return true;
  const std::size_t nflex = p.flex_len;
  const std::size_t nrigid = p.ctx.size() - nflex;
  Subst probe;
  probe.src_size = p.ctx.size();
  for (std::size_t l = 0; l < nflex; ++l)
    probe.terms.push_back(Term::var(kWildBase + static_cast<VarIdx>(l)));
  for (std::size_t k = 0; k < nrigid; ++k)
    probe.terms.push_back(Term::var(static_cast<VarIdx>(nflex + k)));
  for (std::size_t j = 0; j < items.lhs.size(); ++j) {
    if (!lenient_equal(apply_subst(items.lhs[j], probe), apply_subst(items.rhs[j], probe)))
      return true;
  }
  return false;
}

// Matches pattern[g+] against target, pinning components of g (a map from
// the pattern's flexible context into the target's). Rigid variables must
// correspond on the nose; a pinned component may not mention the target's
// rigid variables. Returns false when no g can satisfy the equation.
bool match_pin(const Term& pattern, const Term& target, std::size_t pat_flex,
               std::size_t tgt_flex, std::vector<std::optional<Term>>& pin) {
  if (pattern.is_var()) {
    const VarIdx w = pattern.var();
    if (w < pat_flex) {
      if (first_level_in_range(target, static_cast<VarIdx>(tgt_flex), kWildBase)) return false;
      if (pin[w].has_value()) return *pin[w] == target;
      pin[w] = target;
      return true;
    }
    return target.is_var() && target.var() == tgt_flex + (w - pat_flex);
  }
  if (target.is_var() || pattern.head() != target.head()) return false;
  for (std::size_t i = 0; i < pattern.args().size(); ++i) {
    if (!match_pin(pattern.args()[i], target.args()[i], pat_flex, tgt_flex, pin)) return false;
  }
  return true;
}

struct FactorCount {
  std::size_t count = 0;  // capped at 2
  bool inconclusive = false;
  Subst witness;
};

// Counts substitutions g : source_ctx -> pat_ctx satisfying the pinned
// equations plus a final verifier, enumerating only the components left
// unpinned by propagation.
FactorCount count_solutions(const Signature& sig, const Telescope& source_ctx,
                            const Telescope& pat_ctx, std::vector<std::optional<Term>> pin,
                            const std::function<bool(const Subst&)>& verify,
                            const EnumBudget& budget) {
  FactorCount out;
  Meter meter(budget);
  Enumerator e(sig, meter);
  TermVec partial;
  std::function<bool()> go = [&]() -> bool {
    const std::size_t w = partial.size();
    if (w == pat_ctx.size()) {
      Subst g;
      g.src_size = source_ctx.size();
      g.terms = partial;
      if (verify(g)) {
        if (out.count == 0) out.witness = g;
        if (++out.count >= 2) return false;
      }
      return true;
    }
    if (pin[w].has_value()) {
      partial.push_back(*pin[w]);
      bool ok = go();
      partial.pop_back();
      return ok;
    }
    Subst pre;
    pre.src_size = source_ctx.size();
    pre.terms = partial;
    Type expected = apply_subst(pat_ctx.entries[w], pre);
    return e.terms_of(source_ctx, expected, budget.max_term_depth, [&](const Term& t) {
      partial.push_back(t);
      bool ok = go();
      partial.pop_back();
      return ok;
    });
  };
  go();
  if (meter.truncated && out.count < 2) out.inconclusive = true;
  return out;
}

}  // namespace

OracleReport check_mgu_terminal(const Signature& sig, const UnifProblem& p,
                                const MguResult& result, const EnumBudget& budget) {
  OracleReport rep;
  rep.budget = budget;

  if (!result.ok()) {
    if (analytically_impossible(p)) {
      rep.kind = VerdictKind::Certificate;
      rep.detail = "a rigid clash survives every substitution";
      return rep;
    }
    UnifierEnum e = enumerate_unifiers(sig, p, budget);
    rep.checked = e.unifiers.size();
    if (!e.unifiers.empty()) {
      rep.kind = VerdictKind::CounterExample;
      rep.detail = "a unifier exists although no-unifier was reported";
      return rep;
    }
    rep.kind = e.truncated ? VerdictKind::BudgetExhausted : VerdictKind::Certificate;
    if (e.truncated) rep.detail = "unifier enumeration truncated";
    return rep;
  }

  const Mgu& m = result.mgu();
  if (!apply_unifies(p, m.rho)) {
    rep.kind = VerdictKind::CounterExample;
    rep.detail = "reported mgu does not unify the pair";
    return rep;
  }
  if (!m.rho.is_identity() && m.omega.size() >= p.flex_len) {
    rep.kind = VerdictKind::CounterExample;
    rep.detail = "size bound violated: non-identity mgu without a shorter context";
    return rep;
  }

  UnifierEnum e = enumerate_unifiers(sig, p, budget);
  bool inconclusive = false;
  for (const auto& entry : e.unifiers) {
    // tau must satisfy rho . tau = sigma; variable positions of rho pin tau's
    // components, the rest are enumerated.
    std::vector<std::optional<Term>> pin(m.omega.size());
    bool consistent = true;
    for (std::size_t l = 0; l < m.rho.terms.size() && consistent; ++l) {
      if (!m.rho.terms[l].is_var()) continue;
      const VarIdx w = m.rho.terms[l].var();
      if (pin[w].has_value()) {
        if (*pin[w] != entry.sub.terms[l]) consistent = false;
      } else {
        pin[w] = entry.sub.terms[l];
      }
    }
    FactorCount fc;
    if (consistent) {
      fc = count_solutions(sig, entry.theta, m.omega, std::move(pin),
                           [&](const Subst& tau) { return compose(m.rho, tau) == entry.sub; },
                           budget);
    }
    ++rep.checked;
    if (fc.count > 1) {
      rep.kind = VerdictKind::CounterExample;
      rep.detail = "unifier factors through the mgu in more than one way";
      return rep;
    }
    if (fc.count == 0) {
      if (fc.inconclusive) {
        inconclusive = true;
        continue;
      }
      rep.kind = VerdictKind::CounterExample;
      rep.detail = "unifier does not factor through the mgu";
      return rep;
    }
    if (fc.inconclusive) inconclusive = true;
  }
  if (inconclusive) {
    rep.kind = VerdictKind::BudgetExhausted;
    rep.detail = "factorization search truncated";
    return rep;
  }
  rep.kind = VerdictKind::Certificate;
  if (e.truncated) rep.detail = "unifier enumeration capped at the result budget";
  return rep;
}

namespace {

GenItem apply_to_item(const GenItem& item, const Subst& s) {
  if (const auto* sub = std::get_if<Subst>(&item)) return apply_subst(*sub, s);
  if (const auto* ty = std::get_if<Type>(&item)) return apply_subst(*ty, s);
  return apply_subst(std::get<Term>(item), s);
}

GenItem input_item(const GenProblem& p) {
  if (const auto* si = std::get_if<GenProblem::SubstItem>(&p.item)) return si->item;
  if (const auto* ti = std::get_if<GenProblem::TypeItem>(&p.item)) return ti->item;
  return std::get<GenProblem::TermItem>(p.item).item;
}

}  // namespace

namespace {

// Pins components of a candidate factor g from the equations rho0 . g = rho
// and item0[g+] = item. Returns false when the equations are unsatisfiable.
bool pin_factor(const GenProblem& p, const GenResult& result,
                std::vector<std::optional<Term>>& pin) {
  const std::size_t n0 = result.gamma0.size();
  const std::size_t n = p.gamma.size();
  for (std::size_t l = 0; l < result.rho0.terms.size(); ++l) {
    if (!match_pin(result.rho0.terms[l], p.rho.terms[l], n0, n, pin)) return false;
  }
  GenItem item = input_item(p);
  TermVec pat, tgt;
  if (const auto* s0 = std::get_if<Subst>(&result.item0)) {
    pat = s0->terms;
    tgt = std::get<Subst>(item).terms;
  } else if (const auto* t0 = std::get_if<Type>(&result.item0)) {
    pat = t0->args;
    const Type& t = std::get<Type>(item);
    if (t0->head != t.head) return false;
    tgt = t.args;
  } else {
    pat.push_back(std::get<Term>(result.item0));
    tgt.push_back(std::get<Term>(item));
  }
  for (std::size_t j = 0; j < pat.size(); ++j) {
    if (!match_pin(pat[j], tgt[j], n0, n, pin)) return false;
  }
  return true;
}

}  // namespace

OracleReport check_mgg_terminal(const Signature& sig, const GenProblem& p,
                                const GenResult& result, const EnumBudget& budget) {
  OracleReport rep;
  rep.budget = budget;

  const std::size_t nrigid = p.delta.size();
  GenItem item = input_item(p);
  if (compose(result.rho0, result.factor) != p.rho ||
      apply_to_item(result.item0, extend(result.factor, nrigid)) != item) {
    rep.kind = VerdictKind::CounterExample;
    rep.detail = "factorization equations do not hold";
    return rep;
  }

  // Uniqueness of the factor within the budget: propagate pins from the
  // factorization equations, enumerate any components left free.
  std::vector<std::optional<Term>> pin(result.gamma0.size());
  FactorCount fc;
  if (pin_factor(p, result, pin)) {
    fc = count_solutions(sig, p.gamma, result.gamma0, std::move(pin),
                         [&](const Subst& g) {
                           return compose(result.rho0, g) == p.rho &&
                                  apply_to_item(result.item0, extend(g, nrigid)) == item;
                         },
                         budget);
  }
  rep.checked = fc.count;
  if (fc.count > 1) {
    rep.kind = VerdictKind::CounterExample;
    rep.detail = "a second factoring substitution exists within the budget";
    return rep;
  }
  if (fc.count == 1 && fc.witness != result.factor) {
    rep.kind = VerdictKind::CounterExample;
    rep.detail = "the unique factoring substitution differs from the reported factor";
    return rep;
  }
  if (fc.count == 0 && !fc.inconclusive) {
    // The reported factor satisfies the equations, so a complete search can
    // only miss it when its terms exceed the depth budget.
    bool fits = true;
    for (const Term& t : result.factor.terms) fits = fits && term_depth(t) <= budget.max_term_depth;
    if (fits) {
      rep.kind = VerdictKind::CounterExample;
      rep.detail = "the factoring substitution was not found by the bounded search";
      return rep;
    }
    rep.detail = "factor exceeds the depth budget; no competing factor within budget";
  }

  // Naturality probes: re-run the construction on restricted problems and
  // confirm the supplied result transports to it.
  EnumBudget probe_budget = budget;
  probe_budget.max_results = std::min<long>(budget.max_results, 64);
  ContextEnum lambdas = enumerate_contexts(sig, probe_budget);
  const std::size_t probe_cap = 12;
  for (const Telescope& lambda : lambdas.contexts) {
    if (rep.probes >= probe_cap) break;
    SubstEnum sigmas = enumerate_substs(sig, lambda, p.gamma, probe_budget);
    for (const Subst& s : sigmas.substs) {
      if (rep.probes >= probe_cap) break;
      ++rep.probes;
      GenResult rr = mgg(sig, restrict_problem(p, lambda, s));
      bool same = rr.gamma0 == result.gamma0 && rr.rho0 == result.rho0 &&
                  rr.item0 == result.item0 && rr.factor == compose(result.factor, s);
      if (!same) {
        rep.kind = VerdictKind::CounterExample;
        rep.detail = "naturality equations fail under a probe substitution";
        return rep;
      }
    }
  }

  if (fc.inconclusive) {
    rep.kind = VerdictKind::BudgetExhausted;
    rep.detail = "factor search truncated";
    return rep;
  }
  rep.kind = VerdictKind::Certificate;
  return rep;
}

}  // namespace gatforge
