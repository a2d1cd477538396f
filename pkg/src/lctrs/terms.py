"""Many-sorted first-order terms: positions, substitutions, matching, unification.

Terms live over a split signature: ordinary term symbols, interpreted theory
symbols, and value constants (integer literals, true, false).  Everything here
is an immutable value; substitutions are plain dicts from Var to Term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

Position = tuple[int, ...]
EPSILON: Position = ()


class TermError(Exception):
    """Ill-formed term: arity or sort mismatch."""


@dataclass(frozen=True)
class Sort:
    name: str

    def __repr__(self):
        return self.name


INT = Sort("Int")
BOOL = Sort("Bool")


@dataclass(frozen=True)
class FunSym:
    name: str
    arg_sorts: tuple[Sort, ...]
    result_sort: Sort
    kind: str  # "term" | "theory" | "value"

    def __post_init__(self):
        if self.kind not in ("term", "theory", "value"):
            raise TermError(f"bad symbol kind {self.kind!r}")
        if self.kind == "value" and self.arg_sorts:
            raise TermError(f"value symbol {self.name} must be a constant")

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class App:
    sym: FunSym
    args: tuple["Term", ...] = ()

    def __repr__(self):
        if not self.args:
            return self.sym.name
        return f"{self.sym.name}({', '.join(map(repr, self.args))})"


Term = Var | App
Subst = dict[Var, Term]


def int_val(n: int) -> App:
    """Value constant for an arbitrary-precision integer."""
    return App(FunSym(str(n), (), INT, "value"))


TRUE = App(FunSym("true", (), BOOL, "value"))
FALSE = App(FunSym("false", (), BOOL, "value"))


def bool_val(b: bool) -> App:
    return TRUE if b else FALSE


def is_value(t: Term) -> bool:
    return isinstance(t, App) and t.sym.kind == "value"


def value_of(t: Term) -> int | bool:
    """Python value denoted by a value constant."""
    if not is_value(t):
        raise TermError(f"not a value: {t}")
    if t.sym.result_sort == BOOL:
        return t.sym.name == "true"
    return int(t.sym.name)


def mk_app(sym: FunSym, args: Iterable[Term]) -> App:
    """Sort-checked application."""
    args = tuple(args)
    if len(args) != sym.arity:
        raise TermError(f"{sym.name} expects {sym.arity} arguments, got {len(args)}")
    for a, want in zip(args, sym.arg_sorts):
        got = sort_of(a)
        if got != want:
            raise TermError(f"argument {a} of {sym.name} has sort {got}, expected {want}")
    return App(sym, args)


def sort_of(t: Term) -> Sort:
    """Sort of a term, validating arities and argument sorts along the way."""
    if isinstance(t, Var):
        return t.sort
    if len(t.args) != t.sym.arity:
        raise TermError(f"{t.sym.name} expects {t.sym.arity} arguments, got {len(t.args)}")
    for a, want in zip(t.args, t.sym.arg_sorts):
        if sort_of(a) != want:
            raise TermError(f"argument {a} of {t.sym.name} has sort {sort_of(a)}, expected {want}")
    return t.sym.result_sort


def variables(t: Term) -> set[Var]:
    if isinstance(t, Var):
        return {t}
    out: set[Var] = set()
    for a in t.args:
        out |= variables(a)
    return out


def positions(t: Term, filter: str = "all") -> set[Position]:
    """All positions of t; filter="function" keeps only non-variable ones."""
    if filter not in ("all", "function"):
        raise ValueError(f"unknown position filter {filter!r}")
    out: set[Position] = set()

    def walk(s: Term, here: Position):
        if isinstance(s, Var):
            if filter == "all":
                out.add(here)
            return
        out.add(here)
        for i, a in enumerate(s.args, start=1):
            walk(a, here + (i,))

    walk(t, EPSILON)
    return out


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        if isinstance(t, Var) or not 1 <= i <= len(t.args):
            raise TermError(f"position {p} does not address a subterm")
        t = t.args[i - 1]
    return t


def parallel_positions(ps: Iterable[Position]) -> bool:
    """Pairwise prefix-incomparable?"""
    ps = list(ps)
    for i, p in enumerate(ps):
        for q in ps[i + 1 :]:
            k = min(len(p), len(q))
            if p[:k] == q[:k]:
                return False
    return True


def replace_at(t: Term, assignments: Mapping[Position, Term]) -> Term:
    """Simultaneous replacement at pairwise parallel positions."""
    if not assignments:
        return t
    if not parallel_positions(assignments.keys()):
        raise TermError("replacement positions overlap")

    expected = {p: sort_of(subterm_at(t, p)) for p in assignments}
    for p, s in assignments.items():
        if sort_of(s) != expected[p]:
            raise TermError(f"replacement at {p} has sort {sort_of(s)}, expected {expected[p]}")

    def go(s: Term, here: Position) -> Term:
        if here in assignments:
            return assignments[here]
        if isinstance(s, Var) or not any(p[: len(here)] == here for p in assignments):
            return s
        return App(s.sym, tuple(go(a, here + (i,)) for i, a in enumerate(s.args, start=1)))

    return go(t, EPSILON)


def apply_subst(sigma: Mapping[Var, Term], t: Term) -> Term:
    if isinstance(t, Var):
        return sigma.get(t, t)
    if not sigma:
        return t
    return App(t.sym, tuple(apply_subst(sigma, a) for a in t.args))


def compose(sigma: Subst, tau: Subst) -> Subst:
    """sigma then tau: apply(compose(sigma, tau), t) == apply(tau, apply(sigma, t))."""
    out = {x: apply_subst(tau, s) for x, s in sigma.items()}
    for y, s in tau.items():
        out.setdefault(y, s)
    return {x: s for x, s in out.items() if s != x}


def restrict(sigma: Mapping[Var, Term], dom: Iterable[Var]) -> Subst:
    dom = set(dom)
    return {x: s for x, s in sigma.items() if x in dom}


def match(pattern: Term, subject: Term) -> Subst | None:
    """Minimal sigma with apply(sigma, pattern) == subject, or None."""
    sigma: Subst = {}

    def go(p: Term, s: Term) -> bool:
        if isinstance(p, Var):
            if p.sort != sort_of(s):
                return False
            if p in sigma:
                return sigma[p] == s
            sigma[p] = s
            return True
        return (
            isinstance(s, App)
            and p.sym == s.sym
            and all(go(pa, sa) for pa, sa in zip(p.args, s.args))
        )

    if not go(pattern, subject):
        return None
    return {x: s for x, s in sigma.items() if s != x}


def occurs(x: Var, t: Term) -> bool:
    if isinstance(t, Var):
        return t == x
    return any(occurs(x, a) for a in t.args)


def unify(equations: Iterable[tuple[Term, Term]]) -> Subst | None:
    """Idempotent mgu of the simultaneous system, or None.

    Syntactic first-order unification with occurs check; sorts must agree on
    every solved variable.
    """
    todo = list(equations)
    sigma: Subst = {}

    def bind(x: Var, t: Term) -> bool:
        if x == t:
            return True
        if x.sort != sort_of(t) or occurs(x, t):
            return False
        step = {x: t}
        nonlocal sigma, todo
        sigma = {y: apply_subst(step, s) for y, s in sigma.items()}
        sigma[x] = t
        todo = [(apply_subst(step, l), apply_subst(step, r)) for l, r in todo]
        return True

    while todo:
        l, r = todo.pop()
        if l == r:
            continue
        if isinstance(l, App) and isinstance(r, App):
            if l.sym != r.sym:
                return None
            todo.extend(zip(l.args, r.args))
        elif isinstance(l, Var):
            if not bind(l, r):
                return None
        else:
            assert isinstance(r, Var)
            if not bind(r, l):
                return None
    return {x: s for x, s in sigma.items() if s != x}


def fresh_name(base: str, avoid: set[str]) -> str:
    """First of base, base', base'', ... not in avoid."""
    name = base
    while name in avoid:
        name += "'"
    return name


def rename_away(vars_to_rename: Iterable[Var], avoid: Iterable[Var]) -> Subst:
    """Injective renaming of the given variables off the avoid set."""
    taken = {v.name for v in avoid}
    out: Subst = {}
    for v in sorted(vars_to_rename, key=lambda v: v.name):
        name = fresh_name(v.name, taken)
        taken.add(name)
        if name != v.name:
            out[v] = Var(name, v.sort)
    return out


def term_key(t: Term) -> str:
    """Canonical render for deterministic ordering and dedup keys."""
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.sym.name
    return f"({t.sym.name} {' '.join(term_key(a) for a in t.args)})"


def alpha_key(terms: Iterable[Term]) -> str:
    """Render of a term tuple with variables canonicalized by first occurrence."""
    names: dict[Var, str] = {}

    def go(t: Term) -> str:
        if isinstance(t, Var):
            if t not in names:
                names[t] = f"_v{len(names)}"
            return names[t]
        if not t.args:
            return t.sym.name
        return f"({t.sym.name} {' '.join(go(a) for a in t.args)})"

    return " | ".join(go(t) for t in terms)
