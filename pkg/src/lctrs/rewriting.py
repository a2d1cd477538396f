"""Rewrite relations on terms and constrained terms.

Plain steps instantiate logical variables by values (enumerated over a finite
domain, except calculation results which are computed exactly).  Steps on
constrained terms keep the constraint fixed; the tilde variants compose with
the equivalence moves produced by equiv_extensions, which only ever extend a
constraint by a definition z = f(u1..un) of a theory subterm.  Parallel and
multi-step relations follow their inductive definitions, recording redex
position sets; multi-step nesting is depth-bounded.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import theory
from .logic import ConstraintSolver
from .rules import ConstrainedRule, Lctrs
from .terms import (
    App,
    BOOL,
    EPSILON,
    INT,
    Position,
    Sort,
    Subst,
    Term,
    Var,
    apply_subst,
    bool_val,
    fresh_name,
    int_val,
    is_value,
    match,
    positions,
    rename_away,
    replace_at,
    sort_of,
    subterm_at,
    term_key,
    variables,
)


@dataclass(frozen=True)
class ConstrainedTerm:
    term: Term
    constraint: Term = theory.bool_val(True)

    def key(self) -> str:
        return f"{term_key(self.term)} [{term_key(self.constraint)}]"

    def __repr__(self):
        return f"{self.term!r} [{self.constraint!r}]"


@dataclass(frozen=True)
class StepRecord:
    position: Position
    rule: ConstrainedRule
    bindings: tuple[tuple[Var, Term], ...]
    flavor: str  # "plain" | "constrained" | "parallel" | "multi"
    pset: tuple[Position, ...] = ()

    @property
    def sigma(self) -> Subst:
        return dict(self.bindings)


@dataclass(frozen=True)
class RewriteConfig:
    lo: int = -4
    hi: int = 4
    multi_nesting: int = 3
    max_unbound: int = 3
    max_parallel_sets: int = 4096

    def int_domain(self, lctrs: Lctrs) -> tuple[int, ...]:
        return tuple(sorted(set(range(self.lo, self.hi + 1)) | lctrs.literals()))


def domain_terms(lctrs: Lctrs, config: RewriteConfig) -> dict[Sort, tuple[Term, ...]]:
    ints = tuple(int_val(n) for n in config.int_domain(lctrs))
    return {INT: ints, BOOL: (bool_val(True), bool_val(False))}


def _freeze(sigma: Subst) -> tuple[tuple[Var, Term], ...]:
    return tuple(sorted(sigma.items(), key=lambda kv: kv[0].name))


def _renamed(rule: ConstrainedRule, away: set[Var]) -> ConstrainedRule:
    return rule.rename(rename_away(rule.variables(), away))


# --- plain rewriting --------------------------------------------------------

def _guard_solutions(guard: Term, unbound: list[Var], domain, config: RewriteConfig, lctrs: Lctrs):
    """Domain assignments of the unbound variables satisfying the guard.

    Enumerated by the decision procedure with blocking clauses when the
    domain product is large, by direct products otherwise (or when the guard
    falls outside the linear fragment)."""
    total = 1
    for x in unbound:
        total *= len(domain[x.sort])
    if total > 64:
        from . import cooper

        bounds = []
        for x in unbound:
            if x.sort == INT:
                window = theory.conj(theory.le(config.lo, x), theory.le(x, config.hi))
                extras = [theory.eq(x, n) for n in lctrs.literals() if not config.lo <= n <= config.hi]
                bounds.append(theory.disj(window, *extras))
        phi = theory.conj(guard, *bounds)
        try:
            f = cooper.formula_of(phi)
        except cooper.NonlinearError:
            f = None
        if f is not None:
            kinds = {x.name: "bool" if x.sort == BOOL else "int" for x in unbound}
            out = []
            while len(out) < 4096:
                env = cooper.find_model(f, kinds)
                if env is None:
                    return out
                sigma = {
                    x: bool_val(bool(env.get(x.name, False)))
                    if x.sort == BOOL
                    else int_val(int(env.get(x.name, 0)))
                    for x in unbound
                }
                out.append(sigma)
                block = theory.disj(*(theory.ne(x, v) for x, v in sigma.items()))
                f = cooper.mk_and((f, cooper.formula_of(block)))
            return out
    out = []
    for choice in itertools.product(*(domain[x.sort] for x in unbound)):
        sigma = dict(zip(unbound, choice))
        ground = apply_subst(sigma, guard)
        if not variables(ground) and theory.holds(ground):
            out.append(sigma)
    return out


def _plain_redexes_at(sub: Term, avoid: set[Var], lctrs: Lctrs, config: RewriteConfig, renamed=None, domain=None):
    domain = domain if domain is not None else domain_terms(lctrs, config)
    out = []
    for rule in renamed if renamed is not None else (_renamed(r, avoid) for r in lctrs.rc_rules):
        sigma0 = match(rule.lhs, sub)
        if sigma0 is None:
            continue
        lvars = rule.lvar()
        if any(not is_value(sigma0[x]) for x in lvars if x in sigma0):
            continue
        unbound = sorted((x for x in lvars if x not in sigma0), key=lambda v: v.name)
        if rule.calc:
            # output value computed exactly, never enumerated
            if any(not is_value(sigma0[x]) for x in variables(rule.lhs)):
                continue
            (y,) = unbound
            val = theory.interpret_term(apply_subst(sigma0, rule.lhs))
            out.append((rule, {**sigma0, y: val}))
            continue
        if len(unbound) > config.max_unbound:
            continue
        guard0 = apply_subst(sigma0, rule.guard)
        if not unbound:
            if not variables(guard0) and theory.holds(guard0):
                out.append((rule, dict(sigma0)))
            continue
        for extra in _guard_solutions(guard0, unbound, domain, config, lctrs):
            out.append((rule, {**sigma0, **extra}))
    return out


def plain_redexes(s: Term, lctrs: Lctrs, config: RewriteConfig) -> list[tuple[Position, ConstrainedRule, Subst]]:
    """All (position, rule, full substitution) with the substitution
    respecting the rule and extra values drawn from the finite domain."""
    svars = variables(s)
    renamed = [_renamed(r, svars) for r in lctrs.rc_rules]
    domain = domain_terms(lctrs, config)
    out = []
    for p in sorted(positions(s, "function")):
        for rule, sigma in _plain_redexes_at(subterm_at(s, p), svars, lctrs, config, renamed, domain):
            out.append((p, rule, sigma))
    return out


def plain_successors(s: Term, lctrs: Lctrs, config: RewriteConfig = RewriteConfig()) -> list[tuple[Term, StepRecord]]:
    out = []
    for p, rule, sigma in plain_redexes(s, lctrs, config):
        result = replace_at(s, {p: apply_subst(sigma, rule.rhs)})
        out.append((result, StepRecord(p, rule, _freeze(sigma), "plain")))
    return out


def plain_parallel_successors(
    s: Term, lctrs: Lctrs, config: RewriteConfig = RewriteConfig()
) -> list[tuple[Term, tuple[Position, ...]]]:
    """All parallel-step results with their exact redex position sets."""
    redexes = plain_redexes(s, lctrs, config)
    out = []
    for subset in _parallel_subsets(redexes, config.max_parallel_sets):
        repl = {p: apply_subst(sigma, rule.rhs) for p, rule, sigma in subset}
        out.append((replace_at(s, repl), tuple(sorted(repl))))
    return out


def _parallel_subsets(redexes, cap):
    """Subsets of redexes with pairwise parallel, distinct positions."""
    subsets = [[]]
    for red in redexes:
        extended = []
        for chosen in subsets:
            if all(_parallel(red[0], c[0]) for c in chosen):
                extended.append(chosen + [red])
        subsets.extend(extended)
        if len(subsets) > cap:
            raise RuntimeError("parallel subset explosion")
    return subsets


def _parallel(p: Position, q: Position) -> bool:
    k = min(len(p), len(q))
    return p[:k] != q[:k]


def plain_multi_successors(
    s: Term, lctrs: Lctrs, config: RewriteConfig = RewriteConfig(), depth: int | None = None
) -> set[Term]:
    """Multi-step results: nested redex contraction up to the nesting bound."""
    if depth is None:
        depth = config.multi_nesting
    memo: dict[tuple[str, int], set[Term]] = {}

    def go(t: Term, budget: int) -> set[Term]:
        key = (term_key(t), budget)
        if key in memo:
            return memo[key]
        memo[key] = {t}  # cycle guard; overwritten below
        out: set[Term] = set()
        if isinstance(t, Var):
            out.add(t)
        else:
            for combo in itertools.product(*(go(a, budget) for a in t.args)):
                out.add(App(t.sym, combo))
            if budget > 0:
                for rule, sigma in _plain_redexes_at(t, variables(t), lctrs, config):
                    rvars = sorted(variables(rule.rhs), key=lambda v: v.name)
                    opts = [go(sigma[x], budget - 1) if x in sigma else {x} for x in rvars]
                    for picks in itertools.product(*opts):
                        tau = dict(zip(rvars, picks))
                        out.add(apply_subst(tau, rule.rhs))
        memo[key] = out
        return out

    return go(s, depth)


# --- rewriting on constrained terms ----------------------------------------

def _candidate_values(
    x: Var, rule: ConstrainedRule, sigma0: Subst, phi: Term, lctrs: Lctrs, config: RewriteConfig
) -> list[Term]:
    """Instantiation candidates for an unbound logical variable: constraint
    variables of the right sort, the exact calculation result when available,
    and domain values."""
    cands: list[Term] = [v for v in sorted(variables(phi), key=lambda v: v.name) if v.sort == x.sort]
    if rule.calc:
        args = apply_subst(sigma0, rule.lhs)
        if not variables(args):
            cands.append(theory.interpret_term(args))
    if x.sort == BOOL:
        cands.extend((bool_val(True), bool_val(False)))
    else:
        cands.extend(int_val(n) for n in config.int_domain(lctrs))
    seen, out = set(), []
    for c in cands:
        k = term_key(c)
        if k not in seen:
            seen.add(k)
            out.append(c)
    return out


def _constrained_redexes_at(
    sub: Term,
    phi: Term,
    avoid: set[Var],
    lctrs: Lctrs,
    solver: ConstraintSolver,
    config: RewriteConfig,
    renamed=None,
) -> list[tuple[ConstrainedRule, Subst]]:
    """Root redexes of the constrained-step relation on sub under phi."""
    phi_vars = variables(phi)
    out = []
    for rule in renamed if renamed is not None else (_renamed(r, avoid) for r in lctrs.rc_rules):
        sigma0 = match(rule.lhs, sub)
        if sigma0 is None:
            continue
        lvars = rule.lvar()
        ok = all(
            is_value(sigma0[x]) or (isinstance(sigma0[x], Var) and sigma0[x] in phi_vars)
            for x in lvars
            if x in sigma0
        )
        if not ok:
            continue
        unbound = sorted((x for x in lvars if x not in sigma0), key=lambda v: v.name)
        if len(unbound) > config.max_unbound:
            continue
        options = [_candidate_values(x, rule, sigma0, phi, lctrs, config) for x in unbound]
        for choice in itertools.product(*options):
            sigma = {**sigma0, **dict(zip(unbound, choice))}
            need = theory.imp(phi, apply_subst(sigma, rule.guard))
            if solver.is_valid(need).is_valid:
                out.append((rule, sigma))
    return out


def constrained_redexes(
    ct: ConstrainedTerm,
    lctrs: Lctrs,
    solver: ConstraintSolver,
    config: RewriteConfig = RewriteConfig(),
    below: Position = EPSILON,
) -> list[tuple[Position, ConstrainedRule, Subst]]:
    """Redexes of the constrained-step relation at positions under `below`.

    Conditions: sigma maps logical variables into values or constraint
    variables, the constraint is satisfiable, and constraint => guard*sigma
    is valid.  Unknown solver verdicts suppress the candidate.
    """
    phi = ct.constraint
    if not solver.is_satisfiable(phi).is_sat:
        return []
    avoid = variables(ct.term) | variables(phi)
    renamed = [_renamed(r, avoid) for r in lctrs.rc_rules]
    out = []
    for p in sorted(positions(ct.term, "function")):
        if p[: len(below)] != below:
            continue
        sub = subterm_at(ct.term, p)
        for rule, sigma in _constrained_redexes_at(sub, phi, avoid, lctrs, solver, config, renamed):
            out.append((p, rule, sigma))
    return out


def cstep(
    ct: ConstrainedTerm,
    lctrs: Lctrs,
    solver: ConstraintSolver,
    config: RewriteConfig = RewriteConfig(),
    below: Position = EPSILON,
) -> list[tuple[ConstrainedTerm, StepRecord]]:
    """One constrained step; the constraint is never modified."""
    out = []
    for p, rule, sigma in constrained_redexes(ct, lctrs, solver, config, below):
        result = replace_at(ct.term, {p: apply_subst(sigma, rule.rhs)})
        out.append(
            (ConstrainedTerm(result, ct.constraint), StepRecord(p, rule, _freeze(sigma), "constrained"))
        )
    return out


def equiv_extensions(ct: ConstrainedTerm) -> list[ConstrainedTerm]:
    """Equivalent reformulations: the term itself plus one definitional
    extension z = f(u1..un) per theory subterm whose arguments are values or
    constraint variables.  Each output is equivalent by construction."""
    phi = ct.constraint
    phi_vars = variables(phi)
    taken = {v.name for v in phi_vars | variables(ct.term)}
    out = [ct]
    seen: set[str] = set()
    for p in sorted(positions(ct.term, "function")):
        sub = subterm_at(ct.term, p)
        if not isinstance(sub, App) or sub.sym.kind != "theory":
            continue
        if not all(
            is_value(a) or (isinstance(a, Var) and a in phi_vars) for a in sub.args
        ):
            continue
        k = term_key(sub)
        if k in seen:
            continue
        seen.add(k)
        z = Var(fresh_name("w", taken), sub.sym.result_sort)
        out.append(ConstrainedTerm(ct.term, theory.conj(theory.eq(z, sub), phi)))
    return out


def cstep_tilde(
    ct: ConstrainedTerm,
    lctrs: Lctrs,
    solver: ConstraintSolver,
    config: RewriteConfig = RewriteConfig(),
    below: Position = EPSILON,
) -> list[tuple[ConstrainedTerm, StepRecord]]:
    """Constrained step modulo equivalence: extension moves, then a step."""
    out = []
    seen: set[str] = set()
    for e in equiv_extensions(ct):
        for res, rec in cstep(e, lctrs, solver, config, below):
            if res.key() not in seen:
                seen.add(res.key())
                out.append((res, rec))
    return out


def parallel_successors(
    ct: ConstrainedTerm,
    lctrs: Lctrs,
    solver: ConstraintSolver,
    config: RewriteConfig = RewriteConfig(),
    below: Position = EPSILON,
) -> list[tuple[ConstrainedTerm, tuple[Position, ...]]]:
    """Constrained parallel steps with exact redex position sets."""
    redexes = constrained_redexes(ct, lctrs, solver, config, below)
    out = []
    for subset in _parallel_subsets(redexes, config.max_parallel_sets):
        repl = {p: apply_subst(sigma, rule.rhs) for p, rule, sigma in subset}
        out.append((ConstrainedTerm(replace_at(ct.term, repl), ct.constraint), tuple(sorted(repl))))
    return out


def parallel_tilde(
    ct: ConstrainedTerm,
    lctrs: Lctrs,
    solver: ConstraintSolver,
    config: RewriteConfig = RewriteConfig(),
    below: Position = EPSILON,
) -> list[tuple[ConstrainedTerm, tuple[Position, ...]]]:
    out = []
    seen: set[tuple[str, tuple[Position, ...]]] = set()
    for e in equiv_extensions(ct):
        for res, pset in parallel_successors(e, lctrs, solver, config, below):
            k = (res.key(), pset)
            if k not in seen:
                seen.add(k)
                out.append((res, pset))
    return out


def multi_successors(
    ct: ConstrainedTerm,
    lctrs: Lctrs,
    solver: ConstraintSolver,
    config: RewriteConfig = RewriteConfig(),
    below: Position = EPSILON,
    depth: int | None = None,
) -> list[ConstrainedTerm]:
    """Constrained multi-step results (constraint unchanged)."""
    if depth is None:
        depth = config.multi_nesting
    phi = ct.constraint
    if not solver.is_satisfiable(phi).is_sat:
        return []
    memo: dict[tuple[str, int], set[Term]] = {}

    def go(t: Term, budget: int) -> set[Term]:
        key = (term_key(t), budget)
        if key in memo:
            return memo[key]
        memo[key] = {t}
        out: set[Term] = set()
        if isinstance(t, Var):
            out.add(t)
        else:
            for combo in itertools.product(*(go(a, budget) for a in t.args)):
                out.add(App(t.sym, combo))
            if budget > 0:
                avoid = variables(t) | variables(phi)
                for rule, sigma in _constrained_redexes_at(t, phi, avoid, lctrs, solver, config):
                    rvars = sorted(variables(rule.rhs), key=lambda v: v.name)
                    opts = [go(sigma[x], budget - 1) if x in sigma else {x} for x in rvars]
                    for picks in itertools.product(*opts):
                        tau = dict(zip(rvars, picks))
                        out.add(apply_subst(tau, rule.rhs))
        memo[key] = out
        return out

    scope = subterm_at(ct.term, below)
    results = go(scope, depth)
    return [ConstrainedTerm(replace_at(ct.term, {below: r}), phi) for r in sorted(results, key=term_key)]


def multi_tilde(
    ct: ConstrainedTerm,
    lctrs: Lctrs,
    solver: ConstraintSolver,
    config: RewriteConfig = RewriteConfig(),
    below: Position = EPSILON,
    depth: int | None = None,
) -> list[ConstrainedTerm]:
    out = []
    seen: set[str] = set()
    for e in equiv_extensions(ct):
        for res in multi_successors(e, lctrs, solver, config, below, depth):
            if res.key() not in seen:
                seen.add(res.key())
                out.append(res)
    return out


# --- equivalence of constrained terms ---------------------------------------

def equiv(a: ConstrainedTerm, b: ConstrainedTerm, solver: ConstraintSolver) -> str:
    """Yes / No / Unknown for the equivalence of two constrained terms.

    Structural alignment first: outside constraint-variable positions the
    terms must agree syntactically; the aligned positions reduce equivalence
    to a pair of forall/exists sentences over the theory.
    """
    sat_a = solver.is_satisfiable(a.constraint)
    sat_b = solver.is_satisfiable(b.constraint)
    if sat_a.is_unknown or sat_b.is_unknown:
        return "unknown"
    if sat_a.status == "unsat" and sat_b.status == "unsat":
        return "yes"
    if sat_a.status == "unsat" or sat_b.status == "unsat":
        return "no"

    eqs = _align(a.term, variables(a.constraint), b.term, variables(b.constraint))
    if eqs is None:
        return "no"

    verdict1 = _direction(a, b, eqs, solver)
    verdict2 = _direction(b, a, [(r, l) for l, r in eqs], solver)
    if verdict1 == "valid" and verdict2 == "valid":
        return "yes"
    if "invalid" in (verdict1, verdict2):
        return "no"
    return "unknown"


def _align(s: Term, svars: set[Var], t: Term, tvars: set[Var]) -> list[tuple[Term, Term]] | None:
    """Pairs (left, right) of logical variables/values at aligned positions,
    or None on a rigid mismatch."""
    s_log = isinstance(s, Var) and s in svars
    t_log = isinstance(t, Var) and t in tvars
    if s_log or t_log:
        s_ok = s_log or is_value(s)
        t_ok = t_log or is_value(t)
        if not (s_ok and t_ok) or sort_of(s) != sort_of(t):
            return None
        return [(s, t)]
    if isinstance(s, Var) or isinstance(t, Var):
        return [] if s == t else None
    if is_value(s) or is_value(t):
        return [] if s == t else None
    if s.sym != t.sym:
        return None
    out: list[tuple[Term, Term]] = []
    for sa, ta in zip(s.args, t.args):
        sub = _align(sa, svars, ta, tvars)
        if sub is None:
            return None
        out.extend(sub)
    return out


def _direction(a: ConstrainedTerm, b: ConstrainedTerm, eqs, solver: ConstraintSolver) -> str:
    """forall models of a.constraint, exists model of b.constraint matching."""
    avars = sorted(variables(a.constraint), key=lambda v: v.name)
    bvars = sorted(variables(b.constraint), key=lambda v: v.name)
    ren = rename_away(bvars, avars)
    psi = apply_subst(ren, b.constraint)
    conds = [theory.eq(l, apply_subst(ren, r)) for l, r in eqs]
    body = theory.imp(a.constraint, theory.conj(psi, *conds))
    prefix = [("forall", avars), ("exists", [ren.get(v, v) for v in bvars])]
    return solver.is_valid_quantified(prefix, body).status
