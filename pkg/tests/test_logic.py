import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lctrs import cooper, theory
from lctrs.logic import ConstraintSolver, search_model
from lctrs.terms import INT, Var, apply_subst, int_val, variables

x, y, z, n, m = (Var(s, INT) for s in "xyznm")


@pytest.fixture(scope="module")
def solver():
    return ConstraintSolver()


# --- interpretation ---------------------------------------------------------

def test_interpret_two_times_two():
    assert theory.interpret(theory.mul(2, 2)) == 4


def test_interpret_one_plus_one():
    assert theory.interpret(theory.add(1, 1)) == 2
    assert theory.interpret(theory.add(3, 1)) == 4


def test_interpret_bool():
    assert theory.interpret(theory.conj(theory.bool_val(True), theory.bool_val(False))) is False


def test_interpret_rejects_nonground():
    with pytest.raises(Exception):
        theory.interpret(theory.add(x, 1))


def test_interpret_homomorphism_random():
    rng = random.Random(7)
    ops = [
        (theory.add, lambda a, b: a + b),
        (theory.sub, lambda a, b: a - b),
        (theory.mul, lambda a, b: a * b),
    ]

    def gen(depth):
        if depth == 0:
            return rng.randint(-20, 20)
        op, py = rng.choice(ops)
        return (op, py, gen(depth - 1), gen(depth - 1))

    def build(node):
        if isinstance(node, int):
            return int_val(node), node
        op, py, l, r = node
        tl, vl = build(l)
        tr, vr = build(r)
        return op(tl, tr), py(vl, vr)

    for _ in range(500):
        t, expected = build(rng.randint(1, 3))
        assert theory.interpret(t) == expected


# --- satisfiability ---------------------------------------------------------

def test_unsat_strict_window(solver):
    phi = theory.conj(theory.gt(x, 0), theory.lt(x, 0))
    assert solver.is_satisfiable(phi).status == "unsat"


def test_sat_pcp_guard(solver):
    phi = theory.conj(theory.eq(theory.add(theory.mul(3, m), 1), n), theory.gt(n, 0))
    res = solver.is_satisfiable(phi)
    assert res.status == "sat"
    assert theory.holds(apply_subst(res.assignment, phi))


def test_unsat_parity(solver):
    phi = theory.conj(theory.eq(x, theory.mul(2, z)), theory.eq(x, theory.add(theory.mul(2, z), 1)))
    # bounded enumeration agrees there is no model in a window
    found = any(
        xv == 2 * zv and xv == 2 * zv + 1
        for xv in range(-8, 9)
        for zv in range(-8, 9)
    )
    assert not found
    assert solver.is_satisfiable(phi).status == "unsat"


def test_parity_disequal_slopes(solver):
    phi = theory.conj(theory.eq(x, theory.mul(2, z)), theory.eq(x, theory.add(theory.mul(2, y), 1)))
    assert solver.is_satisfiable(phi).status == "unsat"


# --- validity ---------------------------------------------------------------

def test_valid_reflexivity(solver):
    assert solver.is_valid(theory.eq(x, x)).status == "valid"


def test_valid_implication(solver):
    assert solver.is_valid(theory.imp(theory.gt(x, 3), theory.gt(x, 0))).status == "valid"


def test_invalid_with_counter_valuation(solver):
    res = solver.is_valid(theory.gt(x, 0))
    assert res.status == "invalid"
    assert not theory.holds(apply_subst(res.assignment, theory.gt(x, 0)))


# --- quantified sentences ----------------------------------------------------

def test_forall_exists_witness(solver):
    phi = theory.imp(theory.gt(x, 3), theory.conj(theory.eq(z, theory.add(x, 1)), theory.gt(x, 3)))
    res = solver.is_valid_quantified([("forall", [x]), ("exists", [z])], phi)
    assert res.status == "valid"


def test_forall_monotone(solver):
    phi = theory.imp(theory.gt(x, 3), theory.gt(x, 1))
    assert solver.is_valid_quantified([("forall", [x])], phi).status == "valid"


def test_forall_exists_empty_interval(solver):
    phi = theory.conj(theory.gt(y, x), theory.lt(y, x))
    res = solver.is_valid_quantified([("forall", [x]), ("exists", [y])], phi)
    assert res.status == "invalid"


def test_counter_valuation_refutes(solver):
    phi = theory.imp(theory.gt(x, 0), theory.gt(theory.mul(2, x), 2))
    res = solver.is_valid_quantified([("forall", [x])], phi)
    assert res.status == "invalid"
    sigma = res.assignment
    assert not theory.holds(apply_subst(sigma, phi))


def test_nonlinear_reports_unknown(solver):
    phi = theory.eq(theory.mul(x, y), 7)
    assert solver.is_satisfiable(phi).status == "unknown"


# --- differential tests ------------------------------------------------------

def random_linear_constraint(rng, nvars=3, natoms=3):
    vs = [x, y, z][:nvars]

    def atom():
        coeffs = [rng.randint(-3, 3) for _ in vs]
        lhs = int_val(rng.randint(-4, 4))
        for v, c in zip(vs, coeffs):
            lhs = theory.add(lhs, theory.mul(c, v))
        rel = rng.choice([theory.lt, theory.le, theory.gt, theory.ge, theory.eq, theory.ne])
        return rel(lhs, rng.randint(-8, 8))

    phi = atom()
    for _ in range(natoms - 1):
        join = rng.choice([theory.conj, theory.disj, theory.imp])
        phi = join(phi, atom())
    return phi


def enumerate_box(phi, bound):
    vs = sorted(variables(phi), key=lambda v: v.name)
    for vals in itertools.product(range(-bound, bound + 1), repeat=len(vs)):
        yield {v: int_val(c) for v, c in zip(vs, vals)}


def test_validity_agrees_with_bounded_enumeration():
    rng = random.Random(42)
    solver = ConstraintSolver()
    for _ in range(150):
        phi = random_linear_constraint(rng)
        res = solver.is_valid(phi)
        if res.status == "valid":
            for sigma in enumerate_box(phi, 12):
                assert theory.holds(apply_subst(sigma, phi)), (phi, sigma)
        else:
            assert res.status == "invalid"
            assert not theory.holds(apply_subst(res.assignment, phi))


def test_sat_agrees_with_bounded_enumeration():
    rng = random.Random(43)
    solver = ConstraintSolver()
    for _ in range(150):
        phi = random_linear_constraint(rng)
        res = solver.is_satisfiable(phi)
        if res.status == "sat":
            assert theory.holds(apply_subst(res.assignment, phi))
        else:
            assert res.status == "unsat"
            for sigma in enumerate_box(phi, 12):
                assert not theory.holds(apply_subst(sigma, phi)), (phi, sigma)


def test_elimination_matches_witness_window_oracle():
    """exists-x elimination vs direct search over the certified window.

    For fixed values of the other variables, any satisfying x can be taken
    among the boundary points shifted by 1..period, or below every boundary
    point within one period (the minus-infinity disjunct), so checking that
    window is an exact oracle.
    """
    rng = random.Random(44)
    for _ in range(120):
        phi = random_linear_constraint(rng, nvars=3, natoms=3)
        f = cooper.formula_of(phi)
        eliminated = cooper.eliminate_int("x", f)
        for _ in range(8):
            env = {"y": rng.randint(-6, 6), "z": rng.randint(-6, 6)}
            got = cooper.eval_formula(eliminated, env) if cooper.formula_vars(eliminated) <= {"y", "z"} else None
            if got is None:
                continue
            want = _exists_x_by_window(f, env)
            assert got == want, (phi, env)


def _exists_x_by_window(f, env):
    coeffs = [
        cooper.lcoeff(a[-1], "x")
        for a in cooper.atoms(f)
        if a[0] not in ("bvar", "nbvar") and cooper.lcoeff(a[-1], "x")
    ]
    if not coeffs:
        return cooper.eval_formula(f, env)
    import math

    unit = math.lcm(*(abs(c) for c in coeffs))
    bounds = []
    for a in cooper.atoms(f):
        if a[0] in ("bvar", "nbvar"):
            continue
        l = a[-1]
        if cooper.lcoeff(l, "x") == 0:
            continue
        rest = sum(c if v == "" else c * env[v] for v, c in l if v != "x")
        bounds.append(rest)
    # candidate x's: around every scaled boundary point, plus one period below
    window = set()
    for r in bounds:
        for j in range(-2 * unit - 2, 2 * unit + 3):
            for c in coeffs:
                window.add((-r + j) // abs(c))
                window.add((r + j) // abs(c))
    low = min(window, default=0) - unit - 1
    window |= {low - j for j in range(0, unit + 1)}
    return any(cooper.eval_formula(f, {**env, "x": xv}) for xv in window)


def test_search_model_prefers_small():
    sigma = search_model(theory.gt(x, 5))
    assert sigma[x] == int_val(6)


@settings(max_examples=150)
@given(
    st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9),
    st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20),
)
def test_formula_translation_matches_direct_evaluation(a, b, c, vx, vy, vz):
    phi = theory.disj(
        theory.le(theory.add(theory.mul(a, x), theory.mul(b, y)), c),
        theory.conj(theory.ne(x, z), theory.ge(theory.mul(c, z), theory.sub(y, a))),
    )
    env = {"x": vx, "y": vy, "z": vz}
    sigma = {x: int_val(vx), y: int_val(vy), z: int_val(vz)}
    assert cooper.eval_formula(cooper.formula_of(phi), env) == theory.holds(apply_subst(sigma, phi))
