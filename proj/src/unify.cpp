#include "gatforge/unify.hpp"

#include <algorithm>
#include <stdexcept>

namespace gatforge {

std::string to_string(NoUnifierReason r) {
  switch (r) {
    case NoUnifierReason::HeadClash: return "head-clash";
    case NoUnifierReason::Occurs: return "occurs";
    case NoUnifierReason::RigidDependency: return "rigid-dependency";
    case NoUnifierReason::RigidMismatch: return "rigid-mismatch";
  }
  return "?";
}

std::variant<Instantiation, NoUnifierReason> instantiate(const Telescope& ctx, VarIdx var,
                                                         const Term& term) {
  if (var >= ctx.size()) throw std::logic_error("instantiate: variable out of range");
  std::vector<VarIdx> supp = support(ctx, term);
  if (std::binary_search(supp.begin(), supp.end(), var)) return NoUnifierReason::Occurs;

  // Gamma ~ Gamma0.Gamma1 with Gamma0 the support of the term; the variable
  // sits in Gamma1 and is dropped, later entries are substituted.
  SupportSplit split = split_by_support(ctx, supp);
  const std::size_t n = ctx.size();
  const VarIdx vpos = split.new_pos[var];

  // Positions in the reordered context, skipping vpos, become the new context.
  Instantiation out;
  out.rho.src_size = n - 1;
  out.rho.terms.assign(n, Term());

  std::vector<VarIdx> final_of_old(n, 0);
  VarIdx next = 0;
  for (std::size_t q = 0; q < n; ++q) {
    if (q == vpos) continue;
    final_of_old[split.old_pos[q]] = next;
    out.origin.push_back(split.old_pos[q]);
    ++next;
  }

  Subst to_final;  // maps old levels to final variables / the instantiated term
  to_final.src_size = n - 1;
  to_final.terms.reserve(n);
  for (std::size_t l = 0; l < n; ++l) to_final.terms.push_back(Term::var(final_of_old[l]));
  // The instantiated variable maps to the term, transported to the final
  // context. Its support lies in Gamma0, which keeps its relative order.
  to_final.terms[var] = Term();  // placeholder, fixed after the loop below

  Term term_final = [&] {
    Subst rename;
    rename.src_size = n - 1;
    rename.terms.reserve(n);
    for (std::size_t l = 0; l < n; ++l) rename.terms.push_back(Term::var(final_of_old[l]));
    // var itself cannot occur in term (occurs check above).
    rename.terms[var] = Term::var(0);
    return apply_subst(term, rename);
  }();
  to_final.terms[var] = term_final;

  out.ctx.entries.reserve(n - 1);
  for (std::size_t q = 0; q < n; ++q) {
    if (q == vpos) continue;
    const VarIdx old = split.old_pos[q];
    out.ctx.entries.push_back(apply_subst(ctx.entries[old], to_final));
  }
  out.rho.terms = to_final.terms;
  return out;
}

namespace {

class Unifier {
 public:
  Unifier(const Signature& sig, Telescope flex, Telescope rigid)
      : sig_(sig), flex_(std::move(flex)), rigid_(std::move(rigid)) {
    acc_ = Subst::identity(flex_.size());
    origin_.resize(flex_.size());
    for (std::size_t i = 0; i < origin_.size(); ++i) origin_[i] = static_cast<VarIdx>(i);
  }

  // Local steps are substitutions Gamma_new -> Gamma_at-call-entry; callers
  // use them to transport pending siblings.
  struct Step {
    Subst sub;
    std::vector<VarIdx> origin;
    bool identity = true;
  };

  Step identity_step() const {
    Step s;
    s.sub = Subst::identity(flex_.size());
    s.origin.resize(flex_.size());
    for (std::size_t i = 0; i < s.origin.size(); ++i) s.origin[i] = static_cast<VarIdx>(i);
    return s;
  }

  static Step compose_steps(const Step& first, const Step& then) {
    if (first.identity) return then;
    if (then.identity) return first;
    Step out;
    out.identity = false;
    out.sub = compose(first.sub, then.sub);
    out.origin.reserve(then.origin.size());
    for (VarIdx w : then.origin) out.origin.push_back(first.origin[w]);
    return out;
  }

  std::variant<Step, NoUnifierReason> unify_term(const Term& a, const Term& b) {
    if (a == b) return identity_step();
    const std::size_t nflex = flex_.size();
    const bool a_flex = a.is_var() && a.var() < nflex;
    const bool b_flex = b.is_var() && b.var() < nflex;
    if (a_flex || b_flex) {
      if (a_flex && b_flex) {
        // Instantiate the later variable to the earlier one.
        VarIdx later = std::max(a.var(), b.var());
        VarIdx earlier = std::min(a.var(), b.var());
        return do_instantiate(later, Term::var(earlier));
      }
      const VarIdx v = a_flex ? a.var() : b.var();
      const Term& t = a_flex ? b : a;
      if (strengthen_check(t, nflex, rigid_.size())) return NoUnifierReason::RigidDependency;
      return do_instantiate(v, t);
    }
    if (a.is_app() && b.is_app()) {
      if (a.head() != b.head()) return NoUnifierReason::HeadClash;
      return unify_args(a.args(), b.args());
    }
    // Rigid variable against a different rigid variable or an application;
    // morphisms of unification contexts preserve rigid variables.
    return NoUnifierReason::RigidMismatch;
  }

  std::variant<Step, NoUnifierReason> unify_type(const Type& a, const Type& b) {
    if (a.head != b.head) return NoUnifierReason::HeadClash;
    return unify_args(a.args, b.args);
  }

  // Componentwise left to right; after a non-identity step the remaining
  // components are transported and unified in the smaller context.
  std::variant<Step, NoUnifierReason> unify_args(TermVec lhs, TermVec rhs) {
    Step total = identity_step();
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      auto r = unify_term(lhs[i], rhs[i]);
      if (auto* reason = std::get_if<NoUnifierReason>(&r)) return *reason;
      Step& step = std::get<Step>(r);
      if (!step.identity) {
        Subst ext = extend(step.sub, rigid_.size());
        for (std::size_t j = i + 1; j < lhs.size(); ++j) {
          lhs[j] = apply_subst(lhs[j], ext);
          rhs[j] = apply_subst(rhs[j], ext);
        }
        total = compose_steps(total, step);
      }
    }
    return total;
  }

  const Telescope& flex() const { return flex_; }
  const Subst& acc() const { return acc_; }
  const std::vector<VarIdx>& origin() const { return origin_; }

 private:
  std::variant<Step, NoUnifierReason> do_instantiate(VarIdx v, const Term& t) {
    auto r = instantiate(flex_, v, t);
    if (auto* reason = std::get_if<NoUnifierReason>(&r)) return *reason;
    Instantiation& inst = std::get<Instantiation>(r);
    Step step;
    step.identity = false;
    step.sub = inst.rho;
    step.origin = inst.origin;

    rigid_ = apply_subst_telescope(rigid_, inst.rho);
    flex_ = std::move(inst.ctx);
    acc_ = compose(acc_, step.sub);
    std::vector<VarIdx> new_origin;
    new_origin.reserve(step.origin.size());
    for (VarIdx w : step.origin) new_origin.push_back(origin_[w]);
    origin_ = std::move(new_origin);
    return step;
  }

  const Signature& sig_;
  Telescope flex_;
  Telescope rigid_;
  Subst acc_;
  std::vector<VarIdx> origin_;
};

}  // namespace

MguResult mgu(const Signature& sig, const UnifProblem& p) {
  Unifier u(sig, p.flexible(), p.rigid());
  std::variant<Unifier::Step, NoUnifierReason> r = u.identity_step();
  if (const auto* sp = std::get_if<UnifProblem::SubstPair>(&p.pair)) {
    r = u.unify_args(sp->lhs.terms, sp->rhs.terms);
  } else if (const auto* tp = std::get_if<UnifProblem::TypePair>(&p.pair)) {
    r = u.unify_type(tp->lhs, tp->rhs);
  } else {
    const auto& tm = std::get<UnifProblem::TermPair>(p.pair);
    r = u.unify_term(tm.lhs, tm.rhs);
  }
  if (auto* reason = std::get_if<NoUnifierReason>(&r)) return MguResult{*reason};
  return MguResult{Mgu{u.flex(), u.acc(), u.origin()}};
}

}  // namespace gatforge
