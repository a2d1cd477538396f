"""Satisfiability and validity of constraints.

The internal route is complete for linear integer arithmetic with booleans;
anything nonlinear goes to the configured external SMT solver, or comes back
Unknown when none is configured.  Every model produced on any route is
re-checked by direct evaluation before it is accepted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import cooper, smtlib, theory
from .terms import BOOL, INT, Term, Var, apply_subst, bool_val, int_val, term_key, variables

Prefix = list[tuple[str, list[Var]]]


@dataclass
class SolverVerdict:
    status: str  # "valid" | "invalid" | "sat" | "unsat" | "unknown"
    assignment: dict[Var, Term] | None = None
    reason: str | None = None

    @property
    def is_valid(self) -> bool:
        return self.status == "valid"

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"

    @property
    def is_unknown(self) -> bool:
        return self.status == "unknown"

    def __repr__(self):
        extra = f" {self.assignment}" if self.assignment else ""
        if self.reason:
            extra += f" ({self.reason})"
        return f"<{self.status}{extra}>"


_RADII = (0, 1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256, 512, 1024, 4096)


def search_model(phi: Term, budget: int = 2_000_000) -> dict[Var, Term] | None:
    """Value assignment satisfying phi: extracted from the decision procedure
    on the linear fragment, found by expanding-box search otherwise."""
    vs = sorted(variables(phi), key=lambda v: v.name)
    try:
        f = cooper.formula_of(phi)
    except cooper.NonlinearError:
        return _box_search_model(phi, budget)
    kinds = {v.name: "bool" if v.sort == BOOL else "int" for v in vs}
    env = cooper.find_model(f, kinds)
    if env is None:
        return None
    sigma = {
        v: bool_val(bool(env.get(v.name, False))) if v.sort == BOOL else int_val(int(env.get(v.name, 0)))
        for v in vs
    }
    assert theory.holds(apply_subst(sigma, phi)), f"extracted model fails: {phi}"
    return sigma


def _box_search_model(phi: Term, budget: int, radii=_RADII) -> dict[Var, Term] | None:
    ivars = sorted((v for v in variables(phi) if v.sort == INT), key=lambda v: v.name)
    bvars = sorted((v for v in variables(phi) if v.sort == BOOL), key=lambda v: v.name)
    spent = 0
    for radius in radii:
        for ints in itertools.product(range(-radius, radius + 1), repeat=len(ivars)):
            if ints and max(abs(i) for i in ints) != radius:
                continue  # inner shell already covered
            if not ints and radius > 0:
                break
            for bools in itertools.product((True, False), repeat=len(bvars)):
                sigma: dict[Var, Term] = {v: int_val(i) for v, i in zip(ivars, ints)}
                sigma.update({v: bool_val(b) for v, b in zip(bvars, bools)})
                if theory.holds(apply_subst(sigma, phi)):
                    return sigma
                spent += 1
                if spent > budget:
                    raise RuntimeError(f"model search budget exhausted on {phi}")
    return None


class ConstraintSolver:
    """Decision procedures with per-query memoization.

    smt_command, when set, is a shell command reading SMT-LIB 2 on stdin
    (e.g. "z3 -in"); it serves the nonlinear fragment and cross-checks.
    """

    def __init__(self, smt_command: str | None = None, timeout_ms: int = 2000):
        self.smt_command = smt_command
        self.timeout_ms = timeout_ms
        self._memo: dict[tuple, SolverVerdict] = {}

    # -- internal helpers --

    def _checked_model(self, phi: Term, model: dict[Var, Term] | None, origin: str) -> SolverVerdict:
        if model is None:
            return SolverVerdict("unknown", reason=f"{origin}: no model produced")
        missing = variables(phi) - model.keys()
        if missing:
            extra = search_model(apply_subst(model, phi))
            if extra is None:
                return SolverVerdict("unknown", reason=f"{origin}: partial model")
            model = {**model, **extra}
        if not theory.holds(apply_subst(model, phi)):
            return SolverVerdict("unknown", reason=f"{origin}: model failed re-validation")
        return SolverVerdict("sat", assignment=model)

    # -- public API --

    def is_satisfiable(self, phi: Term) -> SolverVerdict:
        key = ("sat", term_key(phi))
        if key not in self._memo:
            self._memo[key] = self._is_satisfiable(phi)
        return self._memo[key]

    def _is_satisfiable(self, phi: Term) -> SolverVerdict:
        try:
            if cooper.decide_sat(phi):
                model = search_model(phi)
                assert model is not None, f"decision procedure claims sat: {phi}"
                return SolverVerdict("sat", assignment=model)
            return SolverVerdict("unsat")
        except cooper.NonlinearError as exc:
            if self.smt_command is None:
                return SolverVerdict("unknown", reason=str(exc))
            return self.smt_backend(phi)

    def is_valid(self, phi: Term) -> SolverVerdict:
        key = ("valid", term_key(phi))
        if key not in self._memo:
            self._memo[key] = self._is_valid(phi)
        return self._memo[key]

    def _is_valid(self, phi: Term) -> SolverVerdict:
        res = self.is_satisfiable(theory.neg(phi))
        if res.status == "unsat":
            return SolverVerdict("valid")
        if res.status == "sat":
            return SolverVerdict("invalid", assignment=res.assignment)
        return res

    def is_valid_quantified(self, prefix: Prefix, phi: Term) -> SolverVerdict:
        key = (
            "q",
            tuple((q, tuple(v.name for v in vs)) for q, vs in prefix),
            term_key(phi),
        )
        if key not in self._memo:
            self._memo[key] = self._is_valid_quantified(prefix, phi)
        return self._memo[key]

    def _is_valid_quantified(self, prefix: Prefix, phi: Term) -> SolverVerdict:
        try:
            if cooper.decide_prefixed(prefix, phi):
                return SolverVerdict("valid")
            return SolverVerdict("invalid", assignment=self._counter_valuation(prefix, phi))
        except cooper.NonlinearError as exc:
            if self.smt_command is None:
                return SolverVerdict("unknown", reason=str(exc))
            res = self.smt_backend(theory.neg(phi), prefix=_negate_prefix(prefix))
            if res.status == "unsat":
                return SolverVerdict("valid")
            if res.status == "sat":
                return SolverVerdict("invalid")
            return res

    def _counter_valuation(self, prefix: Prefix, phi: Term) -> dict[Var, Term] | None:
        """Valuation of the free/leading-forall variables refuting the sentence."""
        bound_after: Prefix = list(prefix)
        outer: list[Var] = sorted(
            variables(phi) - {v for _, vs in prefix for v in vs}, key=lambda v: v.name
        )
        if not outer and bound_after and bound_after[0][0] == "forall":
            outer = list(bound_after.pop(0)[1])
        if not outer:
            return None
        residual = cooper.residual(bound_after, phi)
        kinds = {v.name: "bool" if v.sort == BOOL else "int" for v in outer}
        env = cooper.find_model(cooper.mk_not(residual), kinds)
        if env is None:
            return None
        return {
            v: bool_val(bool(env.get(v.name, False)))
            if v.sort == BOOL
            else int_val(int(env.get(v.name, 0)))
            for v in outer
        }

    def smt_backend(self, phi: Term, prefix: Prefix | None = None) -> SolverVerdict:
        """Serialize, spawn the external solver, parse and re-validate."""
        if self.smt_command is None:
            return SolverVerdict("unknown", reason="no external solver configured")
        script = smtlib.smt_script(phi, prefix=prefix, logic=smtlib.pick_logic(phi))
        output, diag = smtlib.run_solver(self.smt_command, script, self.timeout_ms)
        if output is None:
            return SolverVerdict("unknown", reason=diag)
        bound = {v for _, vs in (prefix or []) for v in vs}
        wanted = {v.name: v for v in variables(phi) - bound}
        status, model = smtlib.parse_result(output, wanted)
        if status == "unsat":
            return SolverVerdict("unsat")
        if status == "sat":
            if prefix:
                return SolverVerdict("sat")
            return self._checked_model(phi, model or search_model(phi), "external solver")
        return SolverVerdict("unknown", reason="solver answered unknown")


def _negate_prefix(prefix: Prefix) -> Prefix:
    return [("forall" if q == "exists" else "exists", vs) for q, vs in prefix]
