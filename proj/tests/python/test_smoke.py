"""Smoke tests for the python bindings."""

import os

import pytest

gf = pytest.importorskip("gatforge")

SIG = """\
sort X
sort Y (x : X)
fun f1 (x : X) : X
fun f2 (x : X) (y : X) : X
fun g (x : X) (y : Y x) : X
fun h (x : X) (y : Y x) : Y (f1 x)
"""


@pytest.fixture(scope="module")
def sig():
    return gf.parse_signature(SIG)


def test_signature_roundtrip(sig):
    assert len(sig) == 6
    printed = gf.print_signature(sig)
    again = gf.parse_signature(printed)
    assert gf.print_signature(again) == printed
    assert sig.lookup("g")["boundary"] == "(v0 : X) (v1 : Y v0)"
    assert sig.lookup("zzz") is None


def test_parse_errors_raise(sig):
    with pytest.raises(ValueError):
        gf.parse_signature("sort Y (x : X)")
    ctx = gf.parse_telescope(sig, "(v0 : X)")
    with pytest.raises(ValueError):
        gf.parse_term(sig, ctx, "g v0 v0")  # ill-typed second argument


def test_typecheck_and_substitution(sig):
    ctx = gf.parse_telescope(sig, "(v0 : X) (v1 : Y v0)")
    t = gf.parse_term(sig, ctx, "h v0 v1")
    assert gf.print_type(sig, gf.infer_type(sig, ctx, t)) == "Y (f1 v0)"

    delta = gf.parse_telescope(sig, "(v0 : X)")
    s = gf.subst(1, [gf.parse_term(sig, delta, "f1 v0")])
    mapped = gf.apply_subst_term(gf.parse_term(sig, gf.parse_telescope(sig, "(v0 : X)"), "f2 v0 v0"), s)
    assert gf.print_term(sig, mapped) == "f2 (f1 v0) (f1 v0)"


def test_unify(sig):
    ctx = gf.parse_telescope(sig, "(v0 : X) (v1 : X)")
    x_ty = gf.parse_type(sig, ctx, "X")
    lhs = gf.parse_term(sig, ctx, "f2 v0 (f1 v1)")
    rhs = gf.parse_term(sig, ctx, "f2 (f1 v1) v0")
    out = gf.unify_terms(sig, ctx, 2, x_ty, lhs, rhs)
    assert out["ok"]
    assert gf.print_telescope(sig, out["omega"]) == "(v0 : X)"
    assert gf.print_subst(sig, out["rho"]) == "[f1 v0, v0]"

    clash = gf.unify_terms(sig, ctx, 2, x_ty, gf.parse_term(sig, ctx, "f1 v0"),
                           gf.parse_term(sig, ctx, "f2 v0 v0"))
    assert not clash["ok"]
    assert clash["reason"] == "head-clash"


def test_generalize(sig):
    gamma = gf.parse_telescope(sig, "(v0 : X)")
    item = gf.parse_type(sig, gamma, "Y (f1 v0)")
    out = gf.generalize_type(sig, gf.parse_telescope(sig, "()"),
                             gf.parse_telescope(sig, "()"), gamma,
                             gf.subst(1, []), item)
    assert gf.print_telescope(sig, out["gamma0"]) == "(v0 : X)"
    assert gf.print_type(sig, out["item0"]) == "Y v0"
    assert gf.print_subst(sig, out["factor"]) == "[f1 v0]"


def test_strictify_stability(sig):
    strict = gf.StrictIdTypes(sig)
    gamma = gf.parse_telescope(sig, "(v0 : X)")
    a = gf.parse_type(sig, gamma, "X")
    fx = gf.parse_term(sig, gamma, "f1 v0")
    at = strict.strict_id(gamma, a, fx, fx)
    assert strict.minted_count() == 2
    # memo sharing across instances
    x = gf.parse_term(sig, gamma, "v0")
    strict.strict_id(gamma, a, x, x)
    assert strict.minted_count() == 2

    lam = gf.parse_telescope(sig, "(v0 : X) (v1 : X)")
    s = gf.subst(2, [gf.parse_term(sig, lam, "f2 v0 v1")])
    direct = strict.strict_id(lam, a, gf.apply_subst_term(fx, s), gf.apply_subst_term(fx, s))
    assert direct == gf.apply_subst_type(at, s)
    assert "sort Id0" in strict.minted_text()


def test_enumeration(sig):
    gamma = gf.parse_telescope(sig, "(v0 : X)")
    x_ty = gf.parse_type(sig, gamma, "X")
    terms, truncated = gf.enumerate_terms(sig, gamma, x_ty, depth=1)
    assert [gf.print_term(sig, t) for t in terms] == ["v0", "f1 v0", "f2 v0 v0"]
    assert not truncated


def test_run_problem_file():
    demos = os.environ.get("GATFORGE_DEMOS")
    if not demos:
        pytest.skip("GATFORGE_DEMOS not set")
    with open(os.path.join(demos, "generalize_demo.prob")) as f:
        text = f.read()
    code, report = gf.run("generalize", text, base_dir=demos)
    assert code == 0
    assert "item0 Y v0" in report
    assert "factor [f1 v0]" in report
    code2, report2 = gf.run("generalize", text, base_dir=demos)
    assert report2 == report

    with open(os.path.join(demos, "id_demo.prob")) as f:
        id_text = f.read()
    code3, report3 = gf.run("strictify-id", id_text, base_dir=demos, probe=5, seed=3)
    assert code3 == 0
    assert "violations 0" in report3
    assert "sort Id0" in report3
