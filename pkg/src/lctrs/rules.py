"""Constrained rewrite rules and rewrite systems.

A rule is lhs -> rhs [guard].  Its logical variables (guard variables plus
right-hand-side variables not bound by the left) must be instantiated by
values; the extra variables (in the right-hand side only) are additionally
collected into the trivial guard EC used when building critical pairs.
Calculation rules f(x1..xn) -> y [y = f(x1..xn)] are derived from the theory
signature and marked with calc=True.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from . import theory
from .terms import (
    App,
    BOOL,
    FunSym,
    INT,
    Sort,
    Subst,
    Term,
    Var,
    apply_subst,
    is_value,
    sort_of,
    variables,
)


class RuleError(Exception):
    pass


@dataclass(frozen=True)
class ConstrainedRule:
    lhs: Term
    rhs: Term
    guard: Term = theory.bool_val(True)
    calc: bool = False

    def __post_init__(self):
        if not isinstance(self.lhs, App):
            raise RuleError("left-hand side must not be a variable")
        if not self.calc and self.lhs.sym.kind != "term":
            raise RuleError(f"left-hand side root {self.lhs.sym.name} must be a plain term symbol")
        if sort_of(self.lhs) != sort_of(self.rhs):
            raise RuleError("rule sides have different sorts")
        if sort_of(self.guard) != BOOL or not theory.is_logical_term(self.guard):
            raise RuleError("guard must be a constraint of sort Bool")
        for x in self.evar():
            if x.sort not in (INT, BOOL):
                raise RuleError(f"extra variable {x.name} has non-theory sort {x.sort}")

    def variables(self) -> set[Var]:
        return variables(self.lhs) | variables(self.rhs) | variables(self.guard)

    def lvar(self) -> set[Var]:
        return variables(self.guard) | (variables(self.rhs) - variables(self.lhs))

    def evar(self) -> set[Var]:
        return variables(self.rhs) - (variables(self.lhs) | variables(self.guard))

    def ec(self) -> Term:
        return theory.conj(*(theory.eq(x, x) for x in sorted(self.evar(), key=lambda v: v.name)))

    def rename(self, ren: Subst) -> "ConstrainedRule":
        return ConstrainedRule(
            apply_subst(ren, self.lhs),
            apply_subst(ren, self.rhs),
            apply_subst(ren, self.guard),
            self.calc,
        )

    def __repr__(self):
        guard = "" if self.guard == theory.bool_val(True) else f" [{self.guard!r}]"
        return f"{self.lhs!r} -> {self.rhs!r}{guard}"


def rename_apart(rules: list[ConstrainedRule]) -> list[ConstrainedRule]:
    """Pairwise variable-disjoint copies; the first keeps its names, later
    copies get primed where they collide."""
    from .terms import rename_away

    out: list[ConstrainedRule] = []
    taken: set[Var] = set()
    for rule in rules:
        renamed = rule.rename(rename_away(rule.variables(), taken))
        out.append(renamed)
        taken |= renamed.variables()
    return out


def is_variant(r1: ConstrainedRule, r2: ConstrainedRule) -> bool:
    """Equal up to a variable renaming (lhs, rhs and guard simultaneously)?"""

    def embeds(a: ConstrainedRule, b: ConstrainedRule) -> bool:
        ren: dict[Var, Var] = {}

        def go(s: Term, t: Term) -> bool:
            if isinstance(s, Var):
                if not isinstance(t, Var) or s.sort != t.sort:
                    return False
                if s in ren:
                    return ren[s] == t
                ren[s] = t
                return True
            return (
                isinstance(t, App)
                and s.sym == t.sym
                and all(go(sa, ta) for sa, ta in zip(s.args, t.args))
            )

        return go(a.lhs, b.lhs) and go(a.rhs, b.rhs) and go(a.guard, b.guard)

    return embeds(r1, r2) and embeds(r2, r1)


def respects(sigma: Subst, rule: ConstrainedRule) -> bool:
    """sigma instantiates the rule: logical variables to values, guard true."""
    rule_vars = rule.variables()
    if any(x not in rule_vars for x in sigma):
        return False
    if any(not is_value(sigma.get(x, x)) for x in rule.lvar()):
        return False
    guard = apply_subst(sigma, rule.guard)
    if variables(guard):
        return False
    return theory.holds(guard)


@dataclass
class Signature:
    sorts: dict[str, Sort] = field(default_factory=dict)
    term_syms: dict[str, FunSym] = field(default_factory=dict)
    theory_syms: tuple[FunSym, ...] = theory.THEORY_SYMS

    def __post_init__(self):
        self.sorts.setdefault("Int", INT)
        self.sorts.setdefault("Bool", BOOL)

    def add_sort(self, name: str) -> Sort:
        if name in self.sorts:
            raise RuleError(f"sort {name} already declared")
        self.sorts[name] = Sort(name)
        return self.sorts[name]

    def add_fun(self, name: str, arg_sorts: list[Sort], result: Sort) -> FunSym:
        if name in self.term_syms:
            raise RuleError(f"function {name} already declared")
        sym = FunSym(name, tuple(arg_sorts), result, "term")
        self.term_syms[name] = sym
        return sym


def calc_rules(signature: Signature) -> tuple[ConstrainedRule, ...]:
    """One rule f(x1..xn) -> y [y = f(x1..xn)] per non-value theory symbol."""
    out = []
    for f in signature.theory_syms:
        args = tuple(Var(f"x{i}", s) for i, s in enumerate(f.arg_sorts, start=1))
        y = Var("y", f.result_sort)
        out.append(ConstrainedRule(App(f, args), y, theory.eq(y, App(f, args)), calc=True))
    return tuple(out)


@dataclass
class Lctrs:
    signature: Signature
    rules: tuple[ConstrainedRule, ...]

    @cached_property
    def rc_rules(self) -> tuple[ConstrainedRule, ...]:
        return self.rules + calc_rules(self.signature)

    def literals(self) -> set[int]:
        """Integer values appearing anywhere in the rules."""
        out: set[int] = set()

        def scan(t: Term):
            if isinstance(t, App):
                if is_value(t) and t.sym.result_sort == INT:
                    out.add(int(t.sym.name))
                for a in t.args:
                    scan(a)

        for rule in self.rules:
            scan(rule.lhs)
            scan(rule.rhs)
            scan(rule.guard)
        return out
