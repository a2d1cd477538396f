"""Overlaps, constrained (parallel) critical pairs, closedness, verdicts.

Critical pairs are generated from variable-disjoint copies of the combined
rule set (rules plus calculation rules); pairs of calculation rules are
skipped since their self-overlays pin both results to the same value.  For
closedness searches the two sides are packed into a binary pair constructor
so the >=1 / >=2 position filters are ordinary subterm filters.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import theory
from .logic import ConstraintSolver
from .rewriting import (
    ConstrainedTerm,
    RewriteConfig,
    cstep_tilde,
    multi_tilde,
    parallel_tilde,
)
from .rules import ConstrainedRule, Lctrs, is_variant, rename_apart
from .terms import (
    App,
    EPSILON,
    FunSym,
    Position,
    Sort,
    Term,
    Var,
    alpha_key,
    apply_subst,
    is_value,
    positions,
    replace_at,
    sort_of,
    subterm_at,
    variables,
)

PAIR_SORT = Sort("<Pair>")


def pair_sym(sort: Sort) -> FunSym:
    return FunSym("<pair>", (sort, sort), PAIR_SORT, "term")


def mk_pair(s: Term, t: Term) -> App:
    return App(pair_sym(sort_of(s)), (s, t))


@dataclass(frozen=True)
class CCPRecord:
    left: Term
    right: Term
    constraint: Term
    position: Position
    peak_source: Term
    inner_rule: ConstrainedRule
    outer_rule: ConstrainedRule
    sat_unknown: bool = False

    @property
    def overlay(self) -> bool:
        return self.position == EPSILON

    def pair(self) -> ConstrainedTerm:
        return ConstrainedTerm(mk_pair(self.left, self.right), self.constraint)

    def key(self) -> str:
        return alpha_key([self.left, self.right, self.constraint])

    def __repr__(self):
        return f"{self.left!r} ~ {self.right!r} [{self.constraint!r}]"


@dataclass(frozen=True)
class CPCPRecord:
    left: Term
    right: Term
    constraint: Term
    pset: tuple[Position, ...]
    peak_source: Term
    outer_rule: ConstrainedRule
    sat_unknown: bool = False

    def pair(self) -> ConstrainedTerm:
        return ConstrainedTerm(mk_pair(self.left, self.right), self.constraint)

    def key(self) -> str:
        return alpha_key([self.left, self.right, self.constraint]) + f" P={self.pset}"

    def __repr__(self):
        return f"{self.left!r} ~ {self.right!r} [{self.constraint!r}] P={self.pset}"


_disjoint_copies = rename_apart


def _lvar_condition(sigma, lvars) -> bool:
    return all(
        is_value(sigma.get(x, x)) or isinstance(sigma.get(x, x), Var) for x in lvars
    )


def ccps(lctrs: Lctrs, solver: ConstraintSolver) -> list[CCPRecord]:
    """All constrained critical pairs, both orientations, deduplicated only
    up to variable renaming."""
    from .terms import unify

    rc = lctrs.rc_rules
    seen: dict[str, CCPRecord] = {}
    for r1, r2 in itertools.product(rc, repeat=2):
        if r1.calc and r2.calc:
            continue  # value-pinned self-overlays, trivial by construction
        rho1, rho2 = _disjoint_copies([r1, r2])
        for p in sorted(positions(rho2.lhs, "function")):
            sigma = unify([(rho1.lhs, subterm_at(rho2.lhs, p))])
            if sigma is None:
                continue
            if not _lvar_condition(sigma, rho1.lvar() | rho2.lvar()):
                continue
            if p == EPSILON and is_variant(rho1, rho2):
                if variables(rho1.rhs) <= variables(rho1.lhs):
                    continue
            guards = theory.conj(
                apply_subst(sigma, rho1.guard), apply_subst(sigma, rho2.guard)
            )
            sat = solver.is_satisfiable(guards)
            if sat.status == "unsat":
                continue
            ec = theory.conj(rho1.ec(), rho2.ec())
            phi = theory.conj(guards, apply_subst(sigma, ec))
            peak = apply_subst(sigma, rho2.lhs)
            rec = CCPRecord(
                left=replace_at(peak, {p: apply_subst(sigma, rho1.rhs)}),
                right=apply_subst(sigma, rho2.rhs),
                constraint=phi,
                position=p,
                peak_source=peak,
                inner_rule=rho1,
                outer_rule=rho2,
                sat_unknown=sat.is_unknown,
            )
            seen.setdefault(rec.key(), rec)
    return sorted(seen.values(), key=lambda r: r.key())


def _antichains(ps: list[Position]) -> list[tuple[Position, ...]]:
    out: list[tuple[Position, ...]] = [()]
    for p in ps:
        out.extend(
            chain + (p,)
            for chain in out
            if all(_par(p, q) for q in chain)
        )
    return [c for c in out if c]


def _par(p: Position, q: Position) -> bool:
    k = min(len(p), len(q))
    return p[:k] != q[:k]


def cpcps(lctrs: Lctrs, solver: ConstraintSolver) -> list[CPCPRecord]:
    """All constrained parallel critical pairs."""
    from .terms import unify

    rc = lctrs.rc_rules
    seen: dict[str, CPCPRecord] = {}
    for outer in rc:
        outer_c = _disjoint_copies([outer])[0]
        pos_f = sorted(positions(outer_c.lhs, "function"))
        for pset in _antichains(pos_f):
            roots = [subterm_at(outer_c.lhs, p) for p in pset]
            candidates = [
                [r for r in rc if isinstance(sub, App) and r.lhs.sym == sub.sym]
                for sub in roots
            ]
            if any(not c for c in candidates):
                continue
            for inner_choice in itertools.product(*candidates):
                if outer.calc and all(r.calc for r in inner_choice):
                    continue
                copies = _disjoint_copies([outer] + list(inner_choice))
                rho, inners = copies[0], copies[1:]
                eqs = [
                    (inner.lhs, subterm_at(rho.lhs, p))
                    for inner, p in zip(inners, pset)
                ]
                sigma = unify(eqs)
                if sigma is None:
                    continue
                lvars = set(rho.lvar()).union(*(r.lvar() for r in inners))
                if not _lvar_condition(sigma, lvars):
                    continue
                if pset == (EPSILON,) and is_variant(inners[0], rho):
                    if variables(rho.rhs) <= variables(rho.lhs):
                        continue
                guards = theory.conj(
                    apply_subst(sigma, rho.guard),
                    *(apply_subst(sigma, r.guard) for r in inners),
                )
                sat = solver.is_satisfiable(guards)
                if sat.status == "unsat":
                    continue
                ec = theory.conj(rho.ec(), *(r.ec() for r in inners))
                phi = theory.conj(
                    apply_subst(sigma, rho.guard),
                    apply_subst(sigma, ec),
                    *(apply_subst(sigma, r.guard) for r in inners),
                )
                peak = apply_subst(sigma, rho.lhs)
                repl = {
                    p: apply_subst(sigma, inner.rhs)
                    for inner, p in zip(inners, pset)
                }
                rec = CPCPRecord(
                    left=replace_at(peak, repl),
                    right=apply_subst(sigma, rho.rhs),
                    constraint=phi,
                    pset=pset,
                    peak_source=peak,
                    outer_rule=rho,
                    sat_unknown=sat.is_unknown,
                )
                seen.setdefault(rec.key(), rec)
    return sorted(seen.values(), key=lambda r: r.key())


# --- triviality ---------------------------------------------------------------

def is_trivial(pair: ConstrainedTerm, solver: ConstraintSolver) -> str:
    """Yes / no / unknown: do both components coincide under every model?"""
    term = pair.term
    assert term.sym.name == "<pair>", "triviality is asked of encoded pairs"
    return trivial_equation(term.args[0], term.args[1], pair.constraint, solver)


def trivial_equation(s: Term, t: Term, phi: Term, solver: ConstraintSolver) -> str:
    from .rewriting import _align

    log = variables(phi)
    eqs = _align(s, log, t, log)
    if eqs is None:
        sat = solver.is_satisfiable(phi)
        if sat.is_unknown:
            return "unknown"
        return "yes" if sat.status == "unsat" else "no"
    if not eqs:
        return "yes"
    goal = theory.imp(phi, theory.conj(*(theory.eq(l, r) for l, r in eqs)))
    res = solver.is_valid(goal)
    if res.is_valid:
        return "yes"
    return "no" if res.status == "invalid" else "unknown"


def tvar(t: Term, phi: Term, pset) -> set[Var]:
    """Non-logical variables of t below the given parallel positions."""
    log = variables(phi)
    out: set[Var] = set()
    for p in pset:
        out |= variables(subterm_at(t, p)) - log
    return out


# --- closedness ----------------------------------------------------------------

@dataclass
class Closing:
    status: str  # "closed" | "not_closed" | "unknown"
    sequence: list[ConstrainedTerm] = field(default_factory=list)
    qset: tuple[Position, ...] | None = None


def _tail_search(
    start: ConstrainedTerm,
    below: Position,
    lctrs: Lctrs,
    solver: ConstraintSolver,
    config: RewriteConfig,
    depth: int,
    accept,
) -> Closing:
    """Breadth-first over constrained steps below a position, testing accept
    (which returns a Closing or None) on every node including the start."""
    unknown = False
    frontier = [(start, [start])]
    seen = {start.key()}
    for _ in range(depth + 1):
        nxt = []
        for node, trail in frontier:
            got = accept(node, trail)
            if isinstance(got, Closing):
                return got
            if got == "unknown":
                unknown = True
            for res, _rec in cstep_tilde(node, lctrs, solver, config, below=below):
                if res.key() not in seen:
                    seen.add(res.key())
                    nxt.append((res, trail + [res]))
        frontier = nxt
        if not frontier:
            break
    return Closing("unknown" if unknown else "not_closed")


def dev_closed_check(
    ccp: CCPRecord,
    lctrs: Lctrs,
    solver: ConstraintSolver,
    config: RewriteConfig = RewriteConfig(),
    depth: int = 4,
) -> Closing:
    """(Almost) development closedness of one constrained critical pair:
    one multi-step below position 1, then (for overlays only) a rewrite tail
    below position 2, ending in a trivial pair."""
    start = ccp.pair()
    unknown = False
    for mid in multi_tilde(start, lctrs, solver, config, below=(1,)):
        verdict = is_trivial(mid, solver)
        if verdict == "yes":
            seq = [start, mid] if mid.key() != start.key() else [start]
            return Closing("closed", seq)
        if verdict == "unknown":
            unknown = True
        if not ccp.overlay:
            continue

        def accept(node, trail):
            t = is_trivial(node, solver)
            if t == "yes":
                return Closing("closed", [start, mid] + trail[1:])
            return t

        got = _tail_search(mid, (2,), lctrs, solver, config, depth, accept)
        if got.status == "closed":
            return got
        if got.status == "unknown":
            unknown = True
    return Closing("unknown" if unknown else "not_closed")


def parallel_closed_1(
    ccp: CCPRecord,
    lctrs: Lctrs,
    solver: ConstraintSolver,
    config: RewriteConfig = RewriteConfig(),
    depth: int = 4,
) -> Closing:
    """One parallel step below position 1, then a rewrite tail below 2."""
    start = ccp.pair()
    unknown = False
    for mid, _pset in parallel_tilde(start, lctrs, solver, config, below=(1,)):

        def accept(node, trail):
            t = is_trivial(node, solver)
            if t == "yes":
                return Closing("closed", [start, mid] + trail[1:])
            return t

        got = _tail_search(mid, (2,), lctrs, solver, config, depth, accept)
        if got.status == "closed":
            return got
        if got.status == "unknown":
            unknown = True
    return Closing("unknown" if unknown else "not_closed")


def parallel_closed_2(
    cpcp: CPCPRecord,
    lctrs: Lctrs,
    solver: ConstraintSolver,
    config: RewriteConfig = RewriteConfig(),
    depth: int = 4,
) -> Closing:
    """Parallel step below position 2 with recorded positions Q, then a
    rewrite tail below 1, ending trivial, with the variable-tracking
    inclusion TVar(final right side, Q) within TVar(peak source, P)."""
    start = cpcp.pair()
    allowed = tvar(cpcp.peak_source, cpcp.constraint, cpcp.pset)
    unknown = False
    for mid, qset in parallel_tilde(start, lctrs, solver, config, below=(2,)):

        def accept(node, trail):
            t = is_trivial(node, solver)
            if t == "yes":
                if tvar(node.term, node.constraint, qset) <= allowed:
                    return Closing("closed", [start, mid] + trail[1:], qset=qset)
                return None  # closed but the variable condition fails
            return t

        got = _tail_search(mid, (1,), lctrs, solver, config, depth, accept)
        if got.status == "closed":
            return got
        if got.status == "unknown":
            unknown = True
    return Closing("unknown" if unknown else "not_closed")


# --- system-level criteria ------------------------------------------------------

def is_left_linear(lctrs: Lctrs) -> bool:
    """Linear in the non-logical variables of every left-hand side."""
    for rule in lctrs.rules:
        lvars = rule.lvar()
        counts: dict[Var, int] = {}

        def walk(t: Term):
            if isinstance(t, Var):
                counts[t] = counts.get(t, 0) + 1
            else:
                for a in t.args:
                    walk(a)

        walk(rule.lhs)
        if any(n > 1 for v, n in counts.items() if v not in lvars):
            return False
    return True


def is_weakly_orthogonal(lctrs: Lctrs, solver: ConstraintSolver) -> str:
    if not is_left_linear(lctrs):
        return "no"
    unknown = False
    for ccp in ccps(lctrs, solver):
        verdict = is_trivial(ccp.pair(), solver)
        if verdict == "no":
            return "no"
        if verdict == "unknown":
            unknown = True
    return "unknown" if unknown else "yes"


@dataclass
class AnalysisConfig:
    criteria: tuple[str, ...] = ("wo", "adc", "pc")
    depth: int = 4
    rewrite: RewriteConfig = field(default_factory=RewriteConfig)
    no_search_depth: int = 8


@dataclass
class Verdict:
    result: str  # "YES" | "NO" | "MAYBE"
    criterion: str | None = None
    reasons: dict[str, str] = field(default_factory=dict)
    witness: tuple[Term, Term] | None = None
    ccp_count: int = 0
    cpcp_count: int = 0


def analyze(lctrs: Lctrs, solver: ConstraintSolver, config: AnalysisConfig | None = None) -> Verdict:
    """Confluence verdict: YES via a closedness criterion, NO via a ground
    non-joinability witness, MAYBE with per-criterion failure reasons."""
    config = config or AnalysisConfig()
    reasons: dict[str, str] = {}
    ll = is_left_linear(lctrs)
    pairs = ccps(lctrs, solver)
    if not ll:
        reasons["left-linearity"] = "a left-hand side repeats a non-logical variable"

    if ll and "wo" in config.criteria:
        nontrivial = [c for c in pairs if is_trivial(c.pair(), solver) != "yes"]
        if not nontrivial:
            return Verdict("YES", "weak-orthogonality", ccp_count=len(pairs))
        reasons["weak-orthogonality"] = f"{len(nontrivial)} nontrivial critical pair(s)"

    if ll and "adc" in config.criteria:
        failed = []
        for ccp in pairs:
            got = dev_closed_check(ccp, lctrs, solver, config.rewrite, config.depth)
            if got.status != "closed":
                failed.append((ccp, got.status))
        if not failed:
            return Verdict("YES", "almost-development-closed", ccp_count=len(pairs))
        reasons["almost-development-closed"] = "; ".join(
            f"{c.left!r} ~ {c.right!r}: {s}" for c, s in failed[:3]
        )

    ppairs = []
    if ll and "pc" in config.criteria:
        ppairs = cpcps(lctrs, solver)
        failed = []
        for ccp in pairs:
            got = parallel_closed_1(ccp, lctrs, solver, config.rewrite, config.depth)
            if got.status != "closed":
                failed.append((f"{ccp.left!r} ~ {ccp.right!r}", f"not 1-parallel closed: {got.status}"))
        for cpcp in ppairs:
            got = parallel_closed_2(cpcp, lctrs, solver, config.rewrite, config.depth)
            if got.status != "closed":
                failed.append((f"{cpcp.left!r} ~ {cpcp.right!r} P={cpcp.pset}", f"not 2-parallel closed: {got.status}"))
        if not failed:
            return Verdict(
                "YES", "parallel-closed", ccp_count=len(pairs), cpcp_count=len(ppairs)
            )
        reasons["parallel-closed"] = "; ".join(f"{w}: {s}" for w, s in failed[:3])

    from .grounding import find_nonjoinable_peak, ground_fragment

    fragment = ground_fragment(lctrs, config.rewrite)
    witness = find_nonjoinable_peak(fragment, config.no_search_depth)
    if witness is not None:
        return Verdict(
            "NO",
            "ground-peak-with-distinct-normal-forms",
            reasons=reasons,
            witness=witness,
            ccp_count=len(pairs),
        )
    return Verdict("MAYBE", reasons=reasons, ccp_count=len(pairs), cpcp_count=len(ppairs))
