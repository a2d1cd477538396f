import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lctrs.terms import (
    App,
    BOOL,
    EPSILON,
    FunSym,
    INT,
    Sort,
    TermError,
    Var,
    alpha_key,
    apply_subst,
    compose,
    fresh_name,
    int_val,
    match,
    mk_app,
    parallel_positions,
    positions,
    rename_away,
    replace_at,
    sort_of,
    subterm_at,
    unify,
    variables,
)
from lctrs import theory

PCP = Sort("PCP")
STRING = Sort("String")
U = Sort("U")

f2 = FunSym("f", (U, U), U, "term")
g1 = FunSym("g", (U,), U, "term")
g2 = FunSym("g2", (U, U), U, "term")
a = App(FunSym("a", (), U, "term"))
b = App(FunSym("b", (), U, "term"))
c = App(FunSym("c", (), U, "term"))
d = App(FunSym("d", (), U, "term"))
x, y, z = Var("x", U), Var("y", U), Var("z", U)
yp = Var("y'", U)

test_sym = FunSym("test", (STRING, STRING, INT), PCP, "term")
e_str = App(FunSym("e", (), STRING, "term"))


def test_sort_of_variable():
    assert sort_of(Var("x", INT)) == INT


def test_sort_of_pcp_signature():
    t = App(test_sym, (e_str, e_str, int_val(0)))
    assert sort_of(t) == PCP


def test_sort_of_rejects_sort_clash():
    bad = App(theory.ADD, (int_val(1), theory.bool_val(True)))
    with pytest.raises(TermError):
        sort_of(bad)


def test_mk_app_checks_arity():
    with pytest.raises(TermError):
        mk_app(f2, [a])


def test_positions_variable_has_no_function_positions():
    assert positions(x, "function") == set()


def test_positions_function_filter():
    assert positions(App(f2, (a, y)), "function") == {EPSILON, (1,)}
    # derived by enumerating all subterms and keeping the non-variable ones
    t = App(f2, (App(g1, (x,)), y))
    all_pos = positions(t, "all")
    expected = {p for p in all_pos if not isinstance(subterm_at(t, p), Var)}
    assert positions(t, "function") == expected == {EPSILON, (1,)}


def test_replace_at_single():
    assert replace_at(App(f2, (a, b)), {(1,): c}) == App(f2, (c, b))


def test_replace_at_empty_is_identity():
    t = App(f2, (a, b))
    assert replace_at(t, {}) is t


def test_replace_at_parallel():
    assert replace_at(App(f2, (a, b)), {(1,): c, (2,): d}) == App(f2, (c, d))


def test_replace_at_rejects_overlap():
    t = App(f2, (App(g1, (a,)), b))
    with pytest.raises(TermError):
        replace_at(t, {(1,): c, (1, 1): d})


def test_replace_subterm_roundtrip():
    t = App(f2, (App(g1, (a,)), b))
    out = replace_at(t, {(1, 1): c, (2,): d})
    assert subterm_at(out, (1, 1)) == c
    assert subterm_at(out, (2,)) == d


def test_apply_simple():
    assert apply_subst({Var("x", INT): int_val(0)}, Var("x", INT)) == int_val(0)


def test_apply_structural():
    sigma = {x: App(g1, (z,)), y: yp}
    assert apply_subst(sigma, App(f2, (x, y))) == App(f2, (App(g1, (z,)), yp))


def test_apply_identity():
    t = App(f2, (x, y))
    assert apply_subst({}, t) is t


def test_match_basic():
    sigma = match(App(f2, (x, y)), App(f2, (a, b)))
    assert sigma == {x: a, y: b}


def test_match_nonlinear_clash():
    assert match(App(f2, (x, x)), App(f2, (a, b))) is None


def test_match_swap_then_apply():
    pat = App(g2, (x, y))
    sub = App(g2, (y, x))
    sigma = match(pat, sub)
    assert sigma == {x: y, y: x}
    assert apply_subst(sigma, pat) == sub


def test_unify_trivial():
    assert unify([(a, a)]) == {}


def test_unify_occurs_check():
    assert unify([(x, App(g1, (x,)))]) is None


def test_unify_example():
    lhs = App(f2, (x, y))
    rhs = App(f2, (App(g1, (z,)), yp))
    sigma = unify([(lhs, rhs)])
    assert sigma == {x: App(g1, (z,)), y: yp}
    assert apply_subst(sigma, lhs) == apply_subst(sigma, rhs)
    # generality: another unifier factors through sigma via matching
    tau = {x: App(g1, (a,)), y: b, z: a, yp: b}
    assert match(apply_subst(sigma, lhs), apply_subst(tau, lhs)) is not None


def test_compose_law():
    sigma = {x: App(g1, (y,))}
    tau = {y: a}
    t = App(f2, (x, y))
    assert apply_subst(compose(sigma, tau), t) == apply_subst(tau, apply_subst(sigma, t))


def test_fresh_name_primes():
    assert fresh_name("x", set()) == "x"
    assert fresh_name("x", {"x"}) == "x'"
    assert fresh_name("x", {"x", "x'"}) == "x''"


def test_rename_away():
    ren = rename_away([x, y], [x, z])
    assert ren[x] == Var("x'", U)
    assert y not in ren  # no collision, keeps its name


def test_alpha_key_variants():
    t1 = App(f2, (x, App(g1, (x,))))
    t2 = App(f2, (y, App(g1, (y,))))
    assert alpha_key([t1]) == alpha_key([t2])
    assert alpha_key([t1]) != alpha_key([App(f2, (x, App(g1, (y,))))])


# --- property tests ---------------------------------------------------------

SYMS = [f2, g1, g2]
CONSTS = [a, b, c]
VARS = [x, y, z]


def term_strategy(max_depth=3, vars_allowed=True):
    leaves = st.sampled_from(CONSTS + (VARS if vars_allowed else []))

    def extend(children):
        return st.one_of(
            st.tuples(st.just(f2), children, children).map(lambda t: App(t[0], (t[1], t[2]))),
            st.tuples(st.just(g2), children, children).map(lambda t: App(t[0], (t[1], t[2]))),
            children.map(lambda u: App(g1, (u,))),
        )

    return st.recursive(leaves, extend, max_leaves=8)


@settings(max_examples=200)
@given(term_strategy(), term_strategy(vars_allowed=False))
def test_match_soundness(pattern, subject):
    sigma = match(pattern, subject)
    if sigma is not None:
        assert apply_subst(sigma, pattern) == subject


@settings(max_examples=300)
@given(term_strategy(), term_strategy())
def test_unify_soundness_and_idempotence(s, t):
    sigma = unify([(s, t)])
    if sigma is None:
        return
    left, right = apply_subst(sigma, s), apply_subst(sigma, t)
    assert left == right
    for v, u in sigma.items():
        assert apply_subst(sigma, u) == u  # idempotent


@settings(max_examples=100)
@given(term_strategy())
def test_produced_position_sets_are_parallel(t):
    pos = positions(t, "function")
    leaves = {p for p in pos if not any(q != p and q[: len(p)] == p for q in pos)}
    assert parallel_positions(leaves)
    assert positions(t, "all") >= pos
