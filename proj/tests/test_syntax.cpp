#include <doctest.h>

#include "support/fixtures.hpp"

using namespace gatforge;
using namespace gatforge::testing;

TEST_CASE("substitution action replaces variables and keeps heads") {
  Signature sig = demo_signature();
  Scope sg;
  Telescope gamma = tele(sig, sg, "(x : X)");
  Scope sd;
  Telescope delta = tele(sig, sd, "(u : X) (v : X)");

  Type item = type(sig, sg, "Y (f1 x)");
  Subst s = subst_of(2, {term(sig, sd, "f2 u v")});
  Type out = apply_subst(item, s);
  CHECK(out == type(sig, sd, "Y (f1 (f2 u v))"));
  CHECK(check_type(sig, delta, out) == std::nullopt);
}

TEST_CASE("identity and composition laws") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (y : Y x)");
  Term t = term(sig, sc, "g x y");
  CHECK(apply_subst(t, Subst::identity(2)) == t);

  Rng rng(7);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    Signature rsig = random_signature(rng);
    Telescope gamma = random_context(rsig, rng, 3);
    auto a = random_type(rsig, gamma, rng);
    if (!a) continue;
    auto tm = random_term(rsig, gamma, *a, rng);
    if (!tm) continue;
    auto s1 = random_substitution(rsig, gamma, rng);
    if (!s1) continue;
    auto s2 = random_substitution(rsig, s1->first, rng);
    if (!s2) continue;
    // t[s1][s2] == t[s1 . s2]
    CHECK(apply_subst(apply_subst(*tm, s1->second), s2->second) ==
          apply_subst(*tm, compose(s1->second, s2->second)));
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("weakening is level-stable and strengthening checks the suffix") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X)");
  Term t = term(sig, sc, "f1 x");
  CHECK(weaken(t, 1) == t);

  Scope sc2;
  Telescope ctx2 = tele(sig, sc2, "(x : X) (xb : X)");
  Term keeps = term(sig, sc2, "f2 x x");
  Term depends = term(sig, sc2, "f2 x xb");
  CHECK(strengthen_check(keeps, 1, 1) == std::nullopt);
  auto fail = strengthen_check(depends, 1, 1);
  REQUIRE(fail.has_value());
  CHECK(fail->offending == 1);
  // Empty suffix always strengthens.
  CHECK(strengthen_check(depends, 2, 0) == std::nullopt);
}

TEST_CASE("support is dependency-closed") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (y : Y x) (z : X)");
  CHECK(support(ctx, term(sig, sc, "f1 x")) == std::vector<VarIdx>{0});
  CHECK(support(ctx, term(sig, sc, "g x y")) == std::vector<VarIdx>{0, 1});
  CHECK(support(ctx, term(sig, sc, "f1 z")) == std::vector<VarIdx>{2});

  Scope sc0;
  Telescope empty = tele(sig, sc0, "()");
  // no closed terms of X exist in this signature, so build over one binder
  CHECK(support(ctx, Term::var(2)) == std::vector<VarIdx>{2});
}

TEST_CASE("support minimality: outside variables strengthen away") {
  Signature sig = demo_signature();
  Rng rng(11);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    Signature rsig = random_signature(rng);
    Telescope gamma = random_context(rsig, rng, 3);
    auto a = random_type(rsig, gamma, rng);
    if (!a) continue;
    auto tm = random_term(rsig, gamma, *a, rng);
    if (!tm) continue;
    std::vector<VarIdx> supp = support(gamma, *tm);
    // Splitting by the support puts the term entirely over the prefix.
    SupportSplit split = split_by_support(gamma, supp);
    Term moved = apply_subst(*tm, split.renaming);
    CHECK(strengthen_check(moved, split.gamma0_len, gamma.size() - split.gamma0_len) ==
          std::nullopt);
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("split_by_support produces a typed invertible renaming") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (z : X) (y : Y z)");
  SupportSplit split = split_by_support(ctx, {1});
  CHECK(split.gamma0_len == 1);
  CHECK(split.reordered.size() == 3);
  CHECK(check_telescope(sig, split.reordered) == std::nullopt);
  // z first, then x and y with y's type transported.
  Scope sr;
  Telescope expect = tele(sig, sr, "(z : X) (x : X) (y : Y z)");
  CHECK(split.reordered == expect);
  CHECK(compose(split.renaming, split.renaming_inv).is_identity());
  CHECK(compose(split.renaming_inv, split.renaming).is_identity());

  SupportSplit all = split_by_support(ctx, {0, 1, 2});
  CHECK(all.renaming.is_identity());
  SupportSplit none = split_by_support(ctx, {});
  CHECK(none.renaming.is_identity());
}

TEST_CASE("typecheck infers and reports errors") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (yb : Y x)");
  Term ok = term(sig, sc, "h x yb");
  CHECK(infer(sig, ctx, ok) == type(sig, sc, "Y (f1 x)"));

  Scope sc1;
  Telescope ctx1 = tele(sig, sc1, "(x : X)");
  Term bad = Term::app(*sig.lookup("g"), {Term::var(0), Term::var(0)});
  auto err = check_term(sig, ctx1, bad, type(sig, sc1, "X"));
  REQUIRE(err.has_value());
  CHECK(err->message.find("expected") != std::string::npos);

  auto invalid = infer_term(sig, Telescope{}, Term::var(0));
  CHECK(std::holds_alternative<TypeError>(invalid));
}

TEST_CASE("typecheck commutes with substitution") {
  Rng rng(23);
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    Signature rsig = random_signature(rng);
    Telescope gamma = random_context(rsig, rng, 3);
    auto a = random_type(rsig, gamma, rng);
    if (!a) continue;
    auto tm = random_term(rsig, gamma, *a, rng);
    if (!tm) continue;
    auto drawn = random_substitution(rsig, gamma, rng);
    if (!drawn) continue;
    Term mapped = apply_subst(*tm, drawn->second);
    auto ty = infer_term(rsig, drawn->first, mapped);
    REQUIRE(std::holds_alternative<Type>(ty));
    CHECK(std::get<Type>(ty) == apply_subst(*a, drawn->second));
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("printer and parser round-trip items") {
  Signature sig = demo_signature();
  Rng rng(5);
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (y : Y x) (z : X)");
  for (const char* text : {"g (f1 x) (h x y)", "f2 z (f1 (f1 x))", "x"}) {
    Term t = term(sig, sc, text);
    std::string printed = print_term(sig, t);
    Scope canon = default_scope(3);
    Term back = term(sig, canon, printed);
    CHECK(back == t);
  }
  std::string tele_text = print_telescope(sig, ctx);
  Scope fresh;
  Telescope back = tele(sig, fresh, tele_text);
  CHECK(back == ctx);
}

TEST_CASE("removing a variable inside the support blocks strengthening") {
  Rng rng(301);
  int negative = 0;
  for (int i = 0; i < 150 && negative < 30; ++i) {
    Signature rsig = random_signature(rng);
    Telescope gamma = random_context(rsig, rng, 3);
    auto a = random_type(rsig, gamma, rng);
    if (!a) continue;
    auto tm = random_term(rsig, gamma, *a, rng);
    if (!tm) continue;
    std::vector<VarIdx> supp = support(gamma, *tm);
    if (supp.empty()) continue;
    // Move one support variable to the end; the term must then depend on the
    // rigid tail.
    VarIdx victim = supp[rng.pick(supp.size())];
    std::vector<VarIdx> keep;
    for (VarIdx v = 0; v < gamma.size(); ++v)
      if (v != victim) keep.push_back(v);
    // keep is dependency-closed only if nothing after depends on the victim;
    // restrict to victims that nothing else depends on.
    bool closed = true;
    for (VarIdx v : keep) {
      for (VarIdx d : support(gamma, Term::var(v))) closed = closed && d != victim;
    }
    if (!closed) continue;
    SupportSplit split = split_by_support(gamma, keep);
    Term moved = apply_subst(*tm, split.renaming);
    auto blocked = strengthen_check(moved, gamma.size() - 1, 1);
    REQUIRE(blocked.has_value());
    ++negative;
  }
  CHECK(negative >= 30);
}

TEST_CASE("closed terms have empty support") {
  auto parsed = parse_signature("sort X\nfun c : X\nfun f1 (x : X) : X\n");
  Signature sig = std::get<Signature>(parsed);
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (y : X)");
  CHECK(support(ctx, term(sig, sc, "f1 (f1 c)")).empty());
}

TEST_CASE("substitution on a dangling level is a hard fault") {
  Signature sig = demo_signature();
  Scope sc;
  Telescope ctx = tele(sig, sc, "(x : X) (y : X)");
  Term t = term(sig, sc, "f2 x y");
  Subst tooShort = Subst::identity(1);
  CHECK_THROWS_AS(apply_subst(t, tooShort), std::logic_error);
}
