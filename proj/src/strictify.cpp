#include "gatforge/strictify.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "gatforge/typecheck.hpp"

namespace gatforge {

namespace {

TermVec id_vars(std::size_t n) {
  TermVec out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(Term::var(static_cast<VarIdx>(i)));
  return out;
}

Subst subst_of(TermVec terms, std::size_t src) {
  Subst s;
  s.src_size = src;
  s.terms = std::move(terms);
  return s;
}

[[noreturn]] void bad(const std::string& where, const TypeError& err) {
  throw std::invalid_argument(where + ": " + err.message);
}

}  // namespace

IdStructureTable::IdStructureTable(Signature base)
    : sig_(std::move(base)), base_size_(sig_.size()) {}

std::string IdStructureTable::token(DeclId id) const {
  if (id < base_size_) return sig_[id].name;
  return minted_token_.at(id);
}

std::string IdStructureTable::intro_key(const IdIntro& intro) const {
  DeclNamer namer = [this](DeclId id) { return token(id); };
  return print_telescope(sig_, intro.gamma, namer) + " |- " +
         print_type(sig_, intro.type, namer) + " ; " + print_term(sig_, intro.elem, namer);
}

std::string IdStructureTable::elim_key(const IdElim& elim) const {
  DeclNamer namer = [this](DeclId id) { return token(id); };
  return intro_key(elim.intro) + " // " + print_telescope(sig_, elim.delta, namer) + " ; " +
         print_subst(sig_, elim.gamma_map, namer) + " ; " + print_type(sig_, elim.motive, namer) +
         " ; " + print_term(sig_, elim.base_case, namer);
}

void IdStructureTable::validate_intro(const IdIntro& intro) const {
  if (auto err = check_telescope(sig_, intro.gamma)) bad("introduction context", *err);
  if (auto err = check_type(sig_, intro.gamma, intro.type)) bad("introduction context", *err);
  if (auto err = check_term(sig_, intro.gamma, intro.elem, intro.type))
    bad("introduction context", *err);
}

bool IdStructureTable::intro_registered(const IdIntro& intro) const {
  return intro_memo_.count(intro_key(intro)) > 0;
}

const IdIntro* IdStructureTable::minted_intro(DeclId id_sym) const {
  auto it = minted_intro_.find(id_sym);
  return it == minted_intro_.end() ? nullptr : &it->second;
}

IdSymbols IdStructureTable::ws_id_symbols(const IdIntro& intro) {
  std::string key = intro_key(intro);
  auto it = intro_memo_.find(key);
  if (it != intro_memo_.end()) return it->second;
  validate_intro(intro);

  const std::size_t n = intro.gamma.size();
  Decl id_decl;
  id_decl.name = "id#" + std::to_string(minted_count());
  id_decl.kind = DeclKind::SortFormer;
  id_decl.boundary = intro.gamma;
  id_decl.boundary.entries.push_back(intro.type);
  DeclId id_sym = sig_.push(std::move(id_decl));
  minted_token_.emplace(id_sym, "Id<" + key + ">");

  Decl refl_decl;
  refl_decl.name = "refl#" + std::to_string(minted_count());
  refl_decl.kind = DeclKind::TermFormer;
  refl_decl.boundary = intro.gamma;
  TermVec refl_out_args = id_vars(n);
  refl_out_args.push_back(intro.elem);
  refl_decl.output_type = Type{id_sym, std::move(refl_out_args)};
  DeclId refl_sym = sig_.push(std::move(refl_decl));
  minted_token_.emplace(refl_sym, "refl<" + key + ">");

  IdSymbols syms{id_sym, refl_sym};
  minted_intro_.emplace(id_sym, intro);
  intro_memo_.emplace(std::move(key), syms);
  return syms;
}

void IdStructureTable::validate_elim(const IdElim& elim, const IdSymbols& isyms) const {
  const std::size_t nd = elim.delta.size();
  if (auto err = check_telescope(sig_, elim.delta)) bad("elimination context", *err);
  if (auto err = check_subst(sig_, elim.delta, elim.gamma_map, elim.intro.gamma))
    bad("elimination context", *err);

  Telescope motive_ctx = elim.delta;
  motive_ctx.entries.push_back(apply_subst(elim.intro.type, elim.gamma_map));
  TermVec id_args = elim.gamma_map.terms;
  id_args.push_back(Term::var(static_cast<VarIdx>(nd)));
  motive_ctx.entries.push_back(Type{isyms.id_sym, std::move(id_args)});
  if (auto err = check_type(sig_, motive_ctx, elim.motive)) bad("elimination motive", *err);

  TermVec at_refl = id_vars(nd);
  at_refl.push_back(apply_subst(elim.intro.elem, elim.gamma_map));
  at_refl.push_back(Term::app(isyms.refl_sym, elim.gamma_map.terms));
  Type expected = apply_subst(elim.motive, subst_of(std::move(at_refl), nd));
  if (auto err = check_term(sig_, elim.delta, elim.base_case, expected))
    bad("elimination base case", *err);
}

ElimSymbols IdStructureTable::ws_elim_symbols(const IdElim& elim) {
  if (!intro_registered(elim.intro))
    throw std::invalid_argument("elimination context over an unregistered introduction context");
  IdSymbols isyms = intro_memo_.at(intro_key(elim.intro));

  std::string key = elim_key(elim);
  auto it = elim_memo_.find(key);
  if (it != elim_memo_.end()) return it->second;
  validate_elim(elim, isyms);

  const std::size_t nd = elim.delta.size();

  Decl j_decl;
  j_decl.name = "j#" + std::to_string(minted_count());
  j_decl.kind = DeclKind::TermFormer;
  j_decl.boundary = elim.delta;
  j_decl.boundary.entries.push_back(apply_subst(elim.intro.type, elim.gamma_map));
  {
    TermVec id_args = elim.gamma_map.terms;
    id_args.push_back(Term::var(static_cast<VarIdx>(nd)));
    j_decl.boundary.entries.push_back(Type{isyms.id_sym, std::move(id_args)});
  }
  j_decl.output_type = elim.motive;
  DeclId j_sym = sig_.push(std::move(j_decl));
  minted_token_.emplace(j_sym, "J<" + key + ">");

  // The computation witness lives at the introduction context (delta, P', d)
  // where P' is the motive at (x[gamma_map], refl).
  Term x_mapped = apply_subst(elim.intro.elem, elim.gamma_map);
  Term refl_app = Term::app(isyms.refl_sym, elim.gamma_map.terms);
  TermVec at_refl = id_vars(nd);
  at_refl.push_back(x_mapped);
  at_refl.push_back(refl_app);
  Type motive_at_refl = apply_subst(elim.motive, subst_of(at_refl, nd));
  IdSymbols beta_target = ws_id_symbols(IdIntro{elim.delta, motive_at_refl, elim.base_case});

  TermVec j_at_refl_args = id_vars(nd);
  j_at_refl_args.push_back(x_mapped);
  j_at_refl_args.push_back(refl_app);
  Term j_at_refl = Term::app(j_sym, std::move(j_at_refl_args));

  Decl jb_decl;
  jb_decl.name = "jbeta#" + std::to_string(minted_count());
  jb_decl.kind = DeclKind::TermFormer;
  jb_decl.boundary = elim.delta;
  TermVec beta_out_args = id_vars(nd);
  beta_out_args.push_back(std::move(j_at_refl));
  jb_decl.output_type = Type{beta_target.id_sym, std::move(beta_out_args)};
  DeclId jbeta_sym = sig_.push(std::move(jb_decl));
  minted_token_.emplace(jbeta_sym, "Jbeta<" + key + ">");

  ElimSymbols syms{j_sym, jbeta_sym};
  elim_memo_.emplace(std::move(key), syms);
  return syms;
}

Type IdStructureTable::ws_id(const IdIntro& intro) {
  IdSymbols syms = ws_id_symbols(intro);
  TermVec args = id_vars(intro.gamma.size() + 1);
  return Type{syms.id_sym, std::move(args)};
}

Term IdStructureTable::ws_refl(const IdIntro& intro) {
  IdSymbols syms = ws_id_symbols(intro);
  return Term::app(syms.refl_sym, id_vars(intro.gamma.size()));
}

Term IdStructureTable::ws_j(const IdElim& elim) {
  ElimSymbols syms = ws_elim_symbols(elim);
  return Term::app(syms.j_sym, id_vars(elim.delta.size() + 2));
}

Term IdStructureTable::ws_jbeta(const IdElim& elim) {
  ElimSymbols syms = ws_elim_symbols(elim);
  return Term::app(syms.jbeta_sym, id_vars(elim.delta.size()));
}

std::unordered_map<DeclId, std::string> IdStructureTable::assign_canonical_names() const {
  std::unordered_map<DeclId, std::string> names;
  std::set<std::string> used;
  for (std::size_t i = 0; i < base_size_; ++i) used.insert(sig_[static_cast<DeclId>(i)].name);

  auto fresh_pair = [&](const std::string& a, const std::string& b, std::size_t& counter) {
    while (used.count(a + std::to_string(counter)) || used.count(b + std::to_string(counter)))
      ++counter;
    return counter;
  };

  std::size_t intro_idx = 0;
  for (const auto& [key, syms] : intro_memo_) {
    fresh_pair("Id", "refl", intro_idx);
    names[syms.id_sym] = "Id" + std::to_string(intro_idx);
    names[syms.refl_sym] = "refl" + std::to_string(intro_idx);
    used.insert(names[syms.id_sym]);
    used.insert(names[syms.refl_sym]);
    ++intro_idx;
  }
  std::size_t elim_idx = 0;
  for (const auto& [key, syms] : elim_memo_) {
    fresh_pair("J", "Jbeta", elim_idx);
    names[syms.j_sym] = "J" + std::to_string(elim_idx);
    names[syms.jbeta_sym] = "Jbeta" + std::to_string(elim_idx);
    used.insert(names[syms.j_sym]);
    used.insert(names[syms.jbeta_sym]);
    ++elim_idx;
  }
  return names;
}

DeclNamer IdStructureTable::canonical_namer() const {
  auto names = std::make_shared<std::unordered_map<DeclId, std::string>>(assign_canonical_names());
  return [names](DeclId id) -> std::string {
    auto it = names->find(id);
    return it == names->end() ? std::string() : it->second;
  };
}

std::string IdStructureTable::serialize_minted() const {
  DeclNamer namer = canonical_namer();

  // Kahn's algorithm over the minted declarations; the ready set is ordered
  // by canonical key token so the emission order is independent of minting
  // order.
  std::vector<DeclId> minted;
  for (std::size_t i = base_size_; i < sig_.size(); ++i)
    minted.push_back(static_cast<DeclId>(i));

  auto deps_of = [&](DeclId id) {
    std::vector<DeclId> deps;
    const Decl& d = sig_[id];
    auto scan_type = [&](const Type& t, auto&& scan_term_ref) -> void {
      if (t.head >= base_size_) deps.push_back(t.head);
      for (const Term& a : t.args) scan_term_ref(a, scan_term_ref);
    };
    auto scan_term = [&](const Term& t, auto&& self) -> void {
      if (t.is_app()) {
        if (t.head() >= base_size_) deps.push_back(t.head());
        for (const Term& a : t.args()) self(a, self);
      }
    };
    for (const Type& e : d.boundary.entries) scan_type(e, scan_term);
    if (d.output_type) scan_type(*d.output_type, scan_term);
    return deps;
  };

  std::unordered_map<DeclId, std::vector<DeclId>> dependents;
  std::unordered_map<DeclId, std::size_t> missing;
  for (DeclId id : minted) {
    auto deps = deps_of(id);
    std::sort(deps.begin(), deps.end());
    deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
    missing[id] = deps.size();
    for (DeclId d : deps) dependents[d].push_back(id);
  }

  auto cmp = [this](DeclId a, DeclId b) {
    const std::string& ta = minted_token_.at(a);
    const std::string& tb = minted_token_.at(b);
    return ta != tb ? ta < tb : a < b;
  };
  std::set<DeclId, decltype(cmp)> ready(cmp);
  for (DeclId id : minted)
    if (missing[id] == 0) ready.insert(id);

  std::string out;
  while (!ready.empty()) {
    DeclId id = *ready.begin();
    ready.erase(ready.begin());
    out += print_decl(sig_, sig_[id], namer);
    out += "\n";
    for (DeclId dep : dependents[id]) {
      if (--missing[dep] == 0) ready.insert(dep);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Strictly stable structure

PolySort StrictIdTypes::id_polysort() {
  PolySort p;
  p.monomials.push_back(
      [](const Signature&, const Telescope&, std::span<const MonoElem>) -> MonoShape {
        return MonoShape{Telescope{}, std::nullopt};
      });
  p.monomials.push_back(
      [](const Signature&, const Telescope&, std::span<const MonoElem> prefix) -> MonoShape {
        return MonoShape{Telescope{}, std::get<Type>(prefix[0])};
      });
  return p;
}

PolySort StrictIdTypes::j_polysort() {
  PolySort p = id_polysort();
  p.monomials.push_back([this](const Signature&, const Telescope& ambient,
                               std::span<const MonoElem> prefix) -> MonoShape {
    const Type& a0 = std::get<Type>(prefix[0]);
    const Term& x0 = std::get<Term>(prefix[1]);
    Telescope ext = ambient;
    ext.entries.push_back(a0);
    Type id_ty = strict_id(ext, a0, x0, Term::var(static_cast<VarIdx>(ambient.size())));
    Telescope arity;
    arity.entries.push_back(a0);
    arity.entries.push_back(std::move(id_ty));
    return MonoShape{std::move(arity), std::nullopt};
  });
  p.monomials.push_back([this](const Signature&, const Telescope& ambient,
                               std::span<const MonoElem> prefix) -> MonoShape {
    const Type& a0 = std::get<Type>(prefix[0]);
    const Term& x0 = std::get<Term>(prefix[1]);
    const Type& p0 = std::get<Type>(prefix[2]);
    TermVec at_refl = id_vars(ambient.size());
    at_refl.push_back(x0);
    at_refl.push_back(strict_refl(ambient, a0, x0));
    return MonoShape{Telescope{},
                     apply_subst(p0, subst_of(std::move(at_refl), ambient.size()))};
  });
  return p;
}

namespace {

void validate_id_args(const Signature& sig, const Telescope& gamma, const Type& type,
                      const Term* from, const Term* to) {
  if (auto err = check_telescope(sig, gamma)) bad("context", *err);
  if (auto err = check_type(sig, gamma, type)) bad("type argument", *err);
  if (from) {
    if (auto err = check_term(sig, gamma, *from, type)) bad("element argument", *err);
  }
  if (to) {
    if (auto err = check_term(sig, gamma, *to, type)) bad("endpoint argument", *err);
  }
}

}  // namespace

Type StrictIdTypes::strict_id(const Telescope& gamma, const Type& type, const Term& from,
                              const Term& to) {
  validate_id_args(signature(), gamma, type, &from, &to);
  std::vector<MonoElem> elem{type, from};
  PolyGenResult r = mgg_polysort(signature(), id_polysort(), gamma, elem);
  IdIntro intro{r.gamma0, std::get<Type>(r.elem0[0]), std::get<Term>(r.elem0[1])};
  Type generic = provider_->id_type(intro);
  TermVec args = r.factor.terms;
  args.push_back(to);
  return apply_subst(generic, subst_of(std::move(args), gamma.size()));
}

Term StrictIdTypes::strict_refl(const Telescope& gamma, const Type& type, const Term& elem) {
  validate_id_args(signature(), gamma, type, &elem, nullptr);
  std::vector<MonoElem> e{type, elem};
  PolyGenResult r = mgg_polysort(signature(), id_polysort(), gamma, e);
  IdIntro intro{r.gamma0, std::get<Type>(r.elem0[0]), std::get<Term>(r.elem0[1])};
  Term generic = provider_->refl_term(intro);
  Subst f = r.factor;
  f.src_size = gamma.size();
  return apply_subst(generic, f);
}

Telescope StrictIdTypes::motive_context(const Telescope& gamma, const Type& type,
                                        const Term& elem) {
  Telescope ctx = gamma;
  ctx.entries.push_back(type);
  Type id_ty = strict_id(ctx, type, elem, Term::var(static_cast<VarIdx>(gamma.size())));
  ctx.entries.push_back(std::move(id_ty));
  return ctx;
}

StrictIdTypes::JParts StrictIdTypes::j_parts(const Telescope& gamma, const Type& type,
                                             const Term& elem, const Type& motive,
                                             const Term& base_case) {
  validate_id_args(signature(), gamma, type, &elem, nullptr);
  {
    Telescope mctx = motive_context(gamma, type, elem);
    if (auto err = check_type(signature(), mctx, motive)) bad("motive", *err);
    TermVec at_refl = id_vars(gamma.size());
    at_refl.push_back(elem);
    at_refl.push_back(strict_refl(gamma, type, elem));
    Type d_expected = apply_subst(motive, subst_of(std::move(at_refl), gamma.size()));
    if (auto err = check_term(signature(), gamma, base_case, d_expected)) bad("base case", *err);
  }
  std::vector<MonoElem> e4{type, elem, motive, base_case};
  PolyGenResult r1 = mgg_polysort(signature(), j_polysort(), gamma, e4);
  const Type& a1 = std::get<Type>(r1.elem0[0]);
  const Term& x1 = std::get<Term>(r1.elem0[1]);
  const Type& p1 = std::get<Type>(r1.elem0[2]);
  const Term& d1 = std::get<Term>(r1.elem0[3]);

  // The generic introduction data of (A1, x1) recovers the map from the
  // elimination generic context to the introduction generic context.
  std::vector<MonoElem> e2{a1, x1};
  PolyGenResult r0 = mgg_polysort(signature(), id_polysort(), r1.gamma0, e2);
  IdIntro intro{r0.gamma0, std::get<Type>(r0.elem0[0]), std::get<Term>(r0.elem0[1])};
  provider_->id_type(intro);

  return JParts{r1.gamma0, r1.factor, IdElim{std::move(intro), r1.gamma0, r0.factor, p1, d1}};
}

Term StrictIdTypes::strict_j(const Telescope& gamma, const Type& type, const Term& elem,
                             const Type& motive, const Term& base_case, const Term& to,
                             const Term& path) {
  validate_id_args(signature(), gamma, type, &elem, &to);
  Type path_ty = strict_id(gamma, type, elem, to);
  if (auto err = check_term(signature(), gamma, path, path_ty)) bad("path argument", *err);
  JParts parts = j_parts(gamma, type, elem, motive, base_case);
  Term generic = provider_->j_term(parts.elim);
  TermVec args = parts.g.terms;
  args.push_back(to);
  args.push_back(path);
  return apply_subst(generic, subst_of(std::move(args), gamma.size()));
}

Term StrictIdTypes::strict_jbeta(const Telescope& gamma, const Type& type, const Term& elem,
                                 const Type& motive, const Term& base_case) {
  JParts parts = j_parts(gamma, type, elem, motive, base_case);
  Term generic = provider_->jbeta_term(parts.elim);
  Subst g = parts.g;
  g.src_size = gamma.size();
  return apply_subst(generic, g);
}

}  // namespace gatforge
