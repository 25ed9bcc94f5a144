#include <doctest.h>

#include "support/fixtures.hpp"

using namespace gatforge;
using namespace gatforge::testing;

namespace {

bool unifies(const Signature& sig, const UnifProblem& p, const Subst& rho) {
  Subst ext = extend(rho, p.ctx.size() - p.flex_len);
  if (const auto* sp = std::get_if<UnifProblem::SubstPair>(&p.pair))
    return apply_subst(sp->lhs, ext) == apply_subst(sp->rhs, ext);
  if (const auto* tp = std::get_if<UnifProblem::TypePair>(&p.pair))
    return apply_subst(tp->lhs, ext) == apply_subst(tp->rhs, ext);
  const auto& tm = std::get<UnifProblem::TermPair>(p.pair);
  (void)sig;
  return apply_subst(tm.lhs, ext) == apply_subst(tm.rhs, ext);
}

}  // namespace

TEST_CASE("instantiate drops the variable and permutes by support") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (y : Y x) (z : X)");
  auto r = instantiate(ctx, 2, term(sig, sc, "f1 x"));
  REQUIRE(std::holds_alternative<Instantiation>(r));
  const auto& inst = std::get<Instantiation>(r);
  Scope se;
  CHECK(inst.ctx == tele(sig, se, "(x : X) (y : Y x)"));
  CHECK(inst.rho.terms == TermVec{Term::var(0), Term::var(1), term(sig, se, "f1 x")});
  CHECK(inst.ctx.size() + 1 == ctx.size());
}

TEST_CASE("instantiate occurs check") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X)");
  auto r = instantiate(ctx, 0, term(sig, sc, "f1 x"));
  REQUIRE(std::holds_alternative<NoUnifierReason>(r));
  CHECK(std::get<NoUnifierReason>(r) == NoUnifierReason::Occurs);
}

TEST_CASE("instantiate reorders stably when the support comes later") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (z : X) (y : Y z)");
  auto r = instantiate(ctx, 0, term(sig, sc, "f1 z"));
  REQUIRE(std::holds_alternative<Instantiation>(r));
  const auto& inst = std::get<Instantiation>(r);
  Scope se;
  CHECK(inst.ctx == tele(sig, se, "(z : X) (y : Y z)"));
  // x -> f1 z, z -> z, y -> y after the stable reordering
  CHECK(inst.rho.terms == TermVec{term(sig, se, "f1 z"), Term::var(0), Term::var(1)});
}

TEST_CASE("mgu solves the swap problem") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (y : X)");
  UnifProblem p;
  p.ctx = ctx;
  p.flex_len = 2;
  p.pair = UnifProblem::TermPair{type(sig, sc, "X"), term(sig, sc, "f2 x (f1 y)"),
                                 term(sig, sc, "f2 (f1 y) x")};
  MguResult r = mgu(sig, p);
  REQUIRE(r.ok());
  Scope so;
  CHECK(r.mgu().omega == tele(sig, so, "(y : X)"));
  CHECK(r.mgu().rho.terms == TermVec{term(sig, so, "f1 y"), Term::var(0)});
  CHECK(unifies(sig, p, r.mgu().rho));
}

TEST_CASE("mgu on equal terms is the identity") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (y : Y x)");
  UnifProblem p;
  p.ctx = ctx;
  p.flex_len = 2;
  Term t = term(sig, sc, "g x y");
  p.pair = UnifProblem::TermPair{type(sig, sc, "X"), t, t};
  MguResult r = mgu(sig, p);
  REQUIRE(r.ok());
  CHECK(r.mgu().rho.is_identity());
  CHECK(r.mgu().omega == ctx);
}

TEST_CASE("a flexible variable cannot depend on a rigid one") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (xb : X)");
  UnifProblem p;
  p.ctx = ctx;
  p.flex_len = 1;
  p.pair = UnifProblem::TermPair{type(sig, sc, "X"), term(sig, sc, "x"),
                                 term(sig, sc, "f1 xb")};
  MguResult r = mgu(sig, p);
  REQUIRE(!r.ok());
  CHECK(r.reason() == NoUnifierReason::RigidDependency);
}

TEST_CASE("occurs check under a sort-former") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X)");
  UnifProblem p;
  p.ctx = ctx;
  p.flex_len = 1;
  p.pair = UnifProblem::TypePair{type(sig, sc, "Y x"), type(sig, sc, "Y (f1 x)")};
  MguResult r = mgu(sig, p);
  REQUIRE(!r.ok());
  CHECK(r.reason() == NoUnifierReason::Occurs);
}

TEST_CASE("reason codes: head clash and rigid mismatch") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (a : X) (b : X)");
  UnifProblem p;
  p.ctx = ctx;
  p.flex_len = 0;
  p.pair = UnifProblem::TermPair{type(sig, sc, "X"), term(sig, sc, "f1 x"),
                                 term(sig, sc, "f2 x x")};
  CHECK(mgu(sig, p).reason() == NoUnifierReason::HeadClash);
  p.pair = UnifProblem::TermPair{type(sig, sc, "X"), term(sig, sc, "a"), term(sig, sc, "b")};
  CHECK(mgu(sig, p).reason() == NoUnifierReason::RigidMismatch);
}

TEST_CASE("flexible-flexible instantiates the later variable") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (y : X)");
  UnifProblem p;
  p.ctx = ctx;
  p.flex_len = 2;
  p.pair = UnifProblem::TermPair{type(sig, sc, "X"), term(sig, sc, "x"), term(sig, sc, "y")};
  MguResult r = mgu(sig, p);
  REQUIRE(r.ok());
  CHECK(r.mgu().omega.size() == 1);
  // Both map to the surviving earlier variable.
  CHECK(r.mgu().rho.terms == TermVec{Term::var(0), Term::var(0)});
  CHECK(r.mgu().origin == std::vector<VarIdx>{0});
}

TEST_CASE("substitution pairs re-unify after a non-identity step") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (y : X)");
  Scope st;
  Telescope target = tele(sig, st, "(u : X) (v : X)");
  UnifProblem p;
  p.ctx = ctx;
  p.flex_len = 2;
  p.pair = UnifProblem::SubstPair{
      target, subst_of(2, {term(sig, sc, "x"), term(sig, sc, "f1 x")}),
      subst_of(2, {term(sig, sc, "f1 y"), term(sig, sc, "f1 (f1 y)")})};
  MguResult r = mgu(sig, p);
  REQUIRE(r.ok());
  CHECK(unifies(sig, p, r.mgu().rho));
  CHECK(r.mgu().omega.size() == 1);
}

TEST_CASE("soundness, size bound, idempotence, symmetry on random problems") {
  Rng rng(2024);
  int solved = 0, attempted = 0;
  for (int i = 0; i < 400 && attempted < 250; ++i) {
    Signature sig = random_signature(rng);
    auto p = random_unify_problem(sig, rng);
    if (!p) continue;
    ++attempted;
    MguResult r = mgu(sig, *p);

    UnifProblem swapped = *p;
    if (auto* tp = std::get_if<UnifProblem::TermPair>(&swapped.pair)) std::swap(tp->lhs, tp->rhs);
    if (auto* ty = std::get_if<UnifProblem::TypePair>(&swapped.pair)) std::swap(ty->lhs, ty->rhs);
    if (auto* sp = std::get_if<UnifProblem::SubstPair>(&swapped.pair)) std::swap(sp->lhs, sp->rhs);
    MguResult rs = mgu(sig, swapped);
    CHECK(r.ok() == rs.ok());

    if (!r.ok()) continue;
    ++solved;
    const Mgu& m = r.mgu();
    CHECK(unifies(sig, *p, m.rho));
    CHECK((m.rho.is_identity() || m.omega.size() < p->flex_len));
    // Agreement up to renaming: same context length suffices as a smoke check
    // of symmetry; the oracle certifies terminality elsewhere.
    CHECK(m.omega.size() == rs.mgu().omega.size());

    // Idempotence: re-unifying the instantiated pair yields the identity.
    UnifProblem instd = *p;
    instd.ctx = Telescope::concat(m.omega,
                                  apply_subst_telescope(p->ctx.suffix_from(p->flex_len), m.rho));
    instd.flex_len = m.omega.size();
    Subst ext = extend(m.rho, p->ctx.size() - p->flex_len);
    if (auto* tp = std::get_if<UnifProblem::TermPair>(&instd.pair)) {
      tp->type = apply_subst(tp->type, ext);
      tp->lhs = apply_subst(tp->lhs, ext);
      tp->rhs = apply_subst(tp->rhs, ext);
    } else if (auto* ty = std::get_if<UnifProblem::TypePair>(&instd.pair)) {
      ty->lhs = apply_subst(ty->lhs, ext);
      ty->rhs = apply_subst(ty->rhs, ext);
    } else {
      auto& sp = std::get<UnifProblem::SubstPair>(instd.pair);
      sp.lhs = apply_subst(sp.lhs, ext);
      sp.rhs = apply_subst(sp.rhs, ext);
    }
    MguResult again = mgu(sig, instd);
    REQUIRE(again.ok());
    CHECK(again.mgu().rho.is_identity());
  }
  CHECK(solved > 40);
}

TEST_CASE("instantiation through dependency closure inside the engine") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (y : Y x) (w : X)");
  UnifProblem p;
  p.ctx = ctx;
  p.flex_len = 3;
  p.pair = UnifProblem::TermPair{type(sig, sc, "X"), term(sig, sc, "w"),
                                 term(sig, sc, "g x y")};
  MguResult r = mgu(sig, p);
  REQUIRE(r.ok());
  Scope so;
  CHECK(r.mgu().omega == tele(sig, so, "(x : X) (y : Y x)"));
  CHECK(r.mgu().rho.terms ==
        TermVec{Term::var(0), Term::var(1), term(sig, so, "g x y")});

  // The occurs check fires through the dependency closure: w's image may not
  // mention y, whose type depends on x, when w is x itself.
  UnifProblem q;
  q.ctx = ctx;
  q.flex_len = 3;
  q.pair = UnifProblem::TermPair{type(sig, sc, "X"), term(sig, sc, "x"),
                                 term(sig, sc, "g x y")};
  MguResult rq = mgu(sig, q);
  REQUIRE(!rq.ok());
  CHECK(rq.reason() == NoUnifierReason::Occurs);

  UnifProblem q2;
  q2.ctx = ctx;
  q2.flex_len = 3;
  q2.pair = UnifProblem::TermPair{type(sig, sc, "X"), term(sig, sc, "x"),
                                  term(sig, sc, "g w y")};
  MguResult rq2 = mgu(sig, q2);
  REQUIRE(!rq2.ok());
  // x occurs in the support of g w y through y's type.
  CHECK(rq2.reason() == NoUnifierReason::Occurs);
}
