#include "gatforge/generalize.hpp"

#include <stdexcept>

#include "gatforge/unify.hpp"

namespace gatforge {

namespace {

struct GenState {
  Telescope gamma0;
  Subst rho0;    // Gamma0 -> Omega
  Subst factor;  // Gamma -> Gamma0
};

Subst prefix_subst(const TermVec& terms, std::size_t n, std::size_t src) {
  Subst s;
  s.src_size = src;
  s.terms.assign(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(n));
  return s;
}

// Factors a unifier through a most general unifier using the origin map;
// every variable of omega is the image of a unique surviving variable.
Subst factor_through(const Subst& unifier, const Mgu& m) {
  Subst g;
  g.src_size = unifier.src_size;
  g.terms.reserve(m.origin.size());
  for (VarIdx o : m.origin) g.terms.push_back(unifier.terms[o]);
  if (compose(m.rho, g) != unifier)
    throw std::logic_error("mgg: unifier does not factor through the mgu");
  return g;
}

class Generalizer {
 public:
  explicit Generalizer(const Signature& sig) : sig_(sig) {}

  // All methods take the anchor (omega, delta over omega), the working
  // context gamma with rho : gamma -> omega, and an item over
  // gamma.delta[rho]; they return the generic context, rho0, the generalized
  // item and the unique factor.

  struct SubstOut {
    GenState st;
    TermVec item0;
  };
  struct TypeOut {
    GenState st;
    Type item0;
  };
  struct TermOut {
    GenState st;
    Term item0;
  };

  SubstOut gen_subst(const Telescope& omega, const Telescope& delta, const Telescope& gamma,
                     const Subst& rho, const Telescope& target, const TermVec& item) {
    GenState st{omega, Subst::identity(omega.size()), rho};
    Telescope delta0 = delta;  // over st.gamma0
    TermVec item0;
    for (std::size_t i = 0; i < item.size(); ++i) {
      // Expected classifier of component i over the accumulated generic
      // context: the target entry instantiated at the generalized prefix.
      Type ambient = apply_subst(target.entries[i],
                                 prefix_subst(item0, i, st.gamma0.size() + delta0.size()));
      TermOut comp = gen_term(st.gamma0, delta0, gamma, st.factor, ambient, item[i]);
      const Subst& rho1 = comp.st.rho0;  // Gamma1 -> previous Gamma0
      if (!rho1.is_identity()) {
        Subst ext = extend(rho1, delta0.size());
        for (Term& t : item0) t = apply_subst(t, ext);
        delta0 = apply_subst_telescope(delta0, rho1);
        st.rho0 = compose(st.rho0, rho1);
      }
      st.gamma0 = comp.st.gamma0;
      st.factor = comp.st.factor;
      item0.push_back(comp.item0);
    }
    return {st, item0};
  }

  TypeOut gen_type(const Telescope& omega, const Telescope& delta, const Telescope& gamma,
                   const Subst& rho, const Type& item) {
    const Decl& head = sig_[item.head];
    SubstOut s = gen_subst(omega, delta, gamma, rho, head.boundary, item.args);
    return {s.st, Type{item.head, s.item0}};
  }

  TermOut gen_term(const Telescope& omega, const Telescope& delta, const Telescope& gamma,
                   const Subst& rho, const Type& ambient, const Term& item) {
    const std::size_t nflex = gamma.size();
    const std::size_t nrigid = delta.size();

    // The strengthening special case comes first: a term with no rigid
    // dependence collapses to one fresh variable appended to omega. Flexible
    // variables land here too, which is what makes the construction natural.
    if (!strengthen_check(item, nflex, nrigid)) {
      if (strengthen_check(ambient, omega.size(), nrigid))
        throw std::logic_error("mgg: ambient type depends on the rigid telescope "
                               "while the term does not");
      Telescope gamma0 = omega;
      gamma0.entries.push_back(ambient);
      Subst rho0;  // the projection Gamma0 -> Omega
      rho0.src_size = gamma0.size();
      for (std::size_t i = 0; i < omega.size(); ++i)
        rho0.terms.push_back(Term::var(static_cast<VarIdx>(i)));
      Subst factor = rho;
      factor.terms.push_back(item);  // the strengthened term, same representation
      return {GenState{std::move(gamma0), std::move(rho0), std::move(factor)},
              Term::var(static_cast<VarIdx>(omega.size()))};
    }

    if (item.is_var()) {
      // Necessarily a rigid variable. Keep it, repairing the ambient type
      // against the variable's declared type when they differ.
      const VarIdx k = item.var() - static_cast<VarIdx>(nflex);
      Type var_type = delta.entries[k];  // over omega.delta prefix
      GenState st{omega, Subst::identity(omega.size()), rho};
      if (ambient != var_type) {
        UnifProblem up;
        up.ctx = Telescope::concat(omega, delta);
        up.flex_len = omega.size();
        up.pair = UnifProblem::TypePair{ambient, var_type};
        MguResult r = mgu(sig_, up);
        if (!r.ok()) throw std::logic_error("mgg: rigid variable type repair failed to unify");
        const Mgu& m = r.mgu();
        st.factor = factor_through(rho, m);
        st.rho0 = m.rho;
        st.gamma0 = m.omega;
      }
      return {st, Term::var(static_cast<VarIdx>(st.gamma0.size() + k))};
    }

    // Application case: generalize the argument telescope, then repair the
    // output-type mismatch by a most general unifier.
    const Decl& head = sig_[item.head()];
    SubstOut s = gen_subst(omega, delta, gamma, rho, head.boundary, item.args());
    Telescope delta0 = apply_subst_telescope(delta, s.st.rho0);
    Type expected = apply_subst(ambient, extend(s.st.rho0, delta.size()));
    Subst args0;
    args0.src_size = s.st.gamma0.size() + delta0.size();
    args0.terms = s.item0;
    Type actual = apply_subst(*head.output_type, args0);
    if (expected == actual) return {s.st, Term::app(item.head(), s.item0)};

    UnifProblem up;
    up.ctx = Telescope::concat(s.st.gamma0, delta0);
    up.flex_len = s.st.gamma0.size();
    up.pair = UnifProblem::TypePair{expected, actual};
    MguResult r = mgu(sig_, up);
    if (!r.ok()) throw std::logic_error("mgg: output type repair failed to unify");
    const Mgu& m = r.mgu();

    GenState st;
    st.gamma0 = m.omega;
    st.rho0 = compose(s.st.rho0, m.rho);
    st.factor = factor_through(s.st.factor, m);
    TermVec args1 = apply_subst(s.item0, extend(m.rho, delta.size()));
    return {st, Term::app(item.head(), std::move(args1))};
  }

 private:
  const Signature& sig_;
};

}  // namespace

GenResult mgg(const Signature& sig, const GenProblem& p) {
  Generalizer g(sig);
  GenResult out;
  if (const auto* si = std::get_if<GenProblem::SubstItem>(&p.item)) {
    auto r = g.gen_subst(p.omega, p.delta, p.gamma, p.rho, si->target, si->item.terms);
    out.gamma0 = std::move(r.st.gamma0);
    out.rho0 = std::move(r.st.rho0);
    out.factor = std::move(r.st.factor);
    Subst s0;
    s0.src_size = out.gamma0.size() + p.delta.size();
    s0.terms = std::move(r.item0);
    out.item0 = std::move(s0);
  } else if (const auto* ti = std::get_if<GenProblem::TypeItem>(&p.item)) {
    auto r = g.gen_type(p.omega, p.delta, p.gamma, p.rho, ti->item);
    out.gamma0 = std::move(r.st.gamma0);
    out.rho0 = std::move(r.st.rho0);
    out.factor = std::move(r.st.factor);
    out.item0 = std::move(r.item0);
  } else {
    const auto& tm = std::get<GenProblem::TermItem>(p.item);
    auto r = g.gen_term(p.omega, p.delta, p.gamma, p.rho, tm.ambient, tm.item);
    out.gamma0 = std::move(r.st.gamma0);
    out.rho0 = std::move(r.st.rho0);
    out.factor = std::move(r.st.factor);
    out.item0 = std::move(r.item0);
  }
  return out;
}

GenProblem restrict_problem(const GenProblem& p, const Telescope& lambda, const Subst& sub) {
  GenProblem q;
  q.omega = p.omega;
  q.delta = p.delta;
  q.gamma = lambda;
  q.rho = compose(p.rho, sub);
  Subst ext = extend(sub, p.delta.size());
  if (const auto* si = std::get_if<GenProblem::SubstItem>(&p.item)) {
    q.item = GenProblem::SubstItem{si->target, apply_subst(si->item, ext)};
  } else if (const auto* ti = std::get_if<GenProblem::TypeItem>(&p.item)) {
    q.item = GenProblem::TypeItem{apply_subst(ti->item, ext)};
  } else {
    const auto& tm = std::get<GenProblem::TermItem>(p.item);
    q.item = GenProblem::TermItem{tm.ambient, apply_subst(tm.item, ext)};
  }
  return q;
}

bool mgg_natural_check(const Signature& sig, const GenProblem& p, const Telescope& lambda,
                       const Subst& sub) {
  GenResult a = mgg(sig, p);
  GenResult b = mgg(sig, restrict_problem(p, lambda, sub));
  return a.gamma0 == b.gamma0 && a.rho0 == b.rho0 && a.item0 == b.item0 &&
         b.factor == compose(a.factor, sub);
}

PolyGenResult mgg_polysort(const Signature& sig, const PolySort& sort, const Telescope& gamma,
                           std::span<const MonoElem> elem) {
  if (sort.monomials.size() != elem.size())
    throw std::logic_error("mgg_polysort: component count mismatch");

  PolyGenResult acc;
  acc.gamma0 = Telescope{};
  acc.factor.src_size = gamma.size();

  for (std::size_t i = 0; i < elem.size(); ++i) {
    // Shape over the accumulated generic context, instantiated at the
    // generalized prefix; the input component lives over gamma extended by
    // the same shape restricted along the factor.
    MonoShape shape = sort.monomials[i](sig, acc.gamma0,
                                        std::span<const MonoElem>(acc.elem0.data(), i));
    GenProblem p;
    p.omega = acc.gamma0;
    p.delta = shape.arity;
    p.gamma = gamma;
    p.rho = acc.factor;
    if (shape.target.has_value()) {
      p.item = GenProblem::TermItem{*shape.target, std::get<Term>(elem[i])};
    } else {
      p.item = GenProblem::TypeItem{std::get<Type>(elem[i])};
    }
    GenResult r = mgg(sig, p);

    if (!r.rho0.is_identity()) {
      for (std::size_t j = 0; j < i; ++j) {
        MonoShape sj = sort.monomials[j](sig, acc.gamma0,
                                         std::span<const MonoElem>(acc.elem0.data(), j));
        Subst ext = extend(r.rho0, sj.arity.size());
        if (auto* ty = std::get_if<Type>(&acc.elem0[j])) {
          acc.elem0[j] = apply_subst(*ty, ext);
        } else {
          acc.elem0[j] = apply_subst(std::get<Term>(acc.elem0[j]), ext);
        }
      }
    }
    acc.gamma0 = std::move(r.gamma0);
    acc.factor = std::move(r.factor);
    if (shape.target.has_value()) {
      acc.elem0.push_back(std::get<Term>(r.item0));
    } else {
      acc.elem0.push_back(std::get<Type>(r.item0));
    }
  }
  return acc;
}

}  // namespace gatforge
