"""Post correspondence problems as constrained rewrite systems.

Candidate index strings over 1..N are packed into naturals: the empty string
is 0 and i0 i1...ik maps to N*[i1...ik] + i0, a bijection for every N.  The
generated system unfolds a candidate number into both concatenations and
compares them constructor by constructor, ending in top (a match) or bot.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import theory
from .rewriting import RewriteConfig, plain_successors
from .rules import ConstrainedRule, Lctrs, Signature
from .terms import App, INT, Sort, Term, Var, int_val, is_value, value_of

STRING = Sort("String")
PCP_SORT = Sort("PCP")


@dataclass(frozen=True)
class PCPInstance:
    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("an instance needs at least one pair")
        for a, b in self.pairs:
            if not a or not b:
                raise ValueError("word pairs must be non-empty")
            if set(a + b) - {"0", "1"}:
                raise ValueError(f"words must be over 0/1: {a},{b}")
        if all(a == b for a, b in self.pairs):
            raise ValueError("some pair must have distinct words (instance is trivially solvable)")

    @property
    def size(self) -> int:
        return len(self.pairs)

    @classmethod
    def parse(cls, text: str) -> "PCPInstance":
        """Pairs separated by ';', components by ',': "1,101;10,00;011,11"."""
        pairs = []
        for chunk in text.split(";"):
            parts = chunk.split(",")
            if len(parts) != 2:
                raise ValueError(f"malformed pair {chunk!r}")
            pairs.append((parts[0].strip(), parts[1].strip()))
        return cls(tuple(pairs))


def encode_string(indices, size: int) -> int:
    """Candidate string to natural number; accepts digit strings for N <= 9."""
    if isinstance(indices, str):
        indices = [int(c) for c in indices]
    indices = list(indices)
    if any(not 1 <= i <= size for i in indices):
        raise ValueError(f"indices must lie in 1..{size}: {indices}")
    out = 0
    for i in reversed(indices):
        out = size * out + i
    return out


def decode(n: int, size: int) -> tuple[int, ...]:
    if n < 0 or size < 1:
        raise ValueError("need n >= 0 and size >= 1")
    out = []
    while n > 0:
        i = (n - 1) % size + 1
        out.append(i)
        n = (n - i) // size
    return tuple(out)


def build_rp(instance: PCPInstance) -> Lctrs:
    """The test/alpha/beta system for one instance."""
    sig = Signature()
    sig.sorts["String"] = STRING
    sig.sorts["PCP"] = PCP_SORT
    e = sig.add_fun("e", [], STRING)
    s0 = sig.add_fun("s0", [STRING], STRING)
    s1 = sig.add_fun("s1", [STRING], STRING)
    start = sig.add_fun("start", [], PCP_SORT)
    top = sig.add_fun("top", [], PCP_SORT)
    bot = sig.add_fun("bot", [], PCP_SORT)
    test = sig.add_fun("test", [STRING, STRING, INT], PCP_SORT)
    alpha = sig.add_fun("alpha", [INT], STRING)
    beta = sig.add_fun("beta", [INT], STRING)

    n, m = Var("n", INT), Var("m", INT)
    x, y = Var("x", STRING), Var("y", STRING)
    digit = {"0": s0, "1": s1}

    def word(w: str, tail: Term) -> Term:
        out = tail
        for c in reversed(w):
            out = App(digit[c], (out,))
        return out

    rules = [
        ConstrainedRule(
            App(start),
            App(test, (App(alpha, (n,)), App(beta, (n,)), n)),
            theory.gt(n, 0),
        ),
        ConstrainedRule(App(test, (App(e), App(e), n)), App(top)),
        ConstrainedRule(
            App(test, (App(s0, (x,)), App(s0, (y,)), n)), App(test, (x, y, n))
        ),
        ConstrainedRule(
            App(test, (App(s1, (x,)), App(s1, (y,)), n)), App(test, (x, y, n))
        ),
        ConstrainedRule(App(test, (App(s0, (x,)), App(s1, (y,)), n)), App(bot)),
        ConstrainedRule(App(test, (App(s1, (x,)), App(s0, (y,)), n)), App(bot)),
        ConstrainedRule(App(test, (App(s0, (x,)), App(e), n)), App(bot)),
        ConstrainedRule(App(test, (App(s1, (x,)), App(e), n)), App(bot)),
        ConstrainedRule(App(test, (App(e), App(s0, (y,)), n)), App(bot)),
        ConstrainedRule(App(test, (App(e), App(s1, (y,)), n)), App(bot)),
        ConstrainedRule(App(alpha, (int_val(0),)), App(e)),
        ConstrainedRule(App(beta, (int_val(0),)), App(e)),
    ]
    size = instance.size
    for i, (aw, bw) in enumerate(instance.pairs, start=1):
        guard = theory.conj(
            theory.eq(theory.add(theory.mul(size, m), i), n), theory.gt(n, 0)
        )
        rules.append(ConstrainedRule(App(alpha, (n,)), word(aw, App(alpha, (m,))), guard))
        rules.append(ConstrainedRule(App(beta, (n,)), word(bw, App(beta, (m,))), guard))
    return Lctrs(sig, tuple(rules))


def _max_literal(t: Term) -> int:
    if isinstance(t, App):
        if is_value(t) and t.sym.result_sort == INT:
            return abs(value_of(t))
        return max((_max_literal(a) for a in t.args), default=0)
    return 0


def check_candidate(instance: PCPInstance, n: int, depth: int | None = None) -> str:
    """Rewrite the candidate test to a normal form within the fuel bound.

    The quotient in the recursive guards strictly decreases, so the default
    fuel of 10 steps per decoded index always suffices.
    """
    if n <= 0:
        raise ValueError("candidates are positive numbers")
    system = build_rp(instance)
    word_len = len(decode(n, instance.size))
    fuel = depth if depth is not None else 10 * max(word_len, 1)
    sig = system.signature.term_syms
    t: Term = App(sig["test"], (App(sig["alpha"], (int_val(n),)), App(sig["beta"], (int_val(n),)), int_val(n)))
    for _ in range(fuel):
        config = RewriteConfig(lo=0, hi=_max_literal(t))
        successors = plain_successors(t, system, config)
        if not successors:
            break
        t = sorted((r for r, _ in successors), key=repr)[0]
    if t == App(sig["top"]):
        return "solution"
    if t == App(sig["bot"]):
        return "non_solution"
    return "out_of_fuel"
