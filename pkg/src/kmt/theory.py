"""Client-theory contract and registry.

A theory supplies primitive payloads (tests and actions), their subterms,
a pushback table, a satisfiability check on literal conjunctions, a state
model for the oracle, and parser hooks.  Every hook receives the engine
(``ctx``) so composite theories can call back into the combined engine.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

from .terms import Term


class TheoryError(ValueError):
    pass


class ParseNoMatch(Exception):
    """Raised by a parser hook to say 'not mine'."""


@dataclass
class Budget:
    """Bounds for the oracle and for theory validation."""

    states: int = 4  # largest numeric value enumerated
    trace_len: int = 3  # longest trace the oracle produces
    bits: int = 3
    samples: int = 200
    seed: int = 0
    max_states: int = 4096  # cap on enumerated initial states
    hist_len: int = 2  # actions in initial histories (temporal theories)


class Theory:
    """Base class for client theories.

    Subclasses set ``test_types`` and ``action_types`` to the payload classes
    they own and override the hooks below.
    """

    name: str = "?"
    test_types: tuple = ()
    action_types: tuple = ()
    temporal = False

    # -- ownership / universe -----------------------------------------------
    def owns(self, payload) -> bool:
        return isinstance(payload, self.test_types + self.action_types)

    def parts(self) -> list["Theory"]:
        return [self]

    def observe(self, payload, universe: dict) -> bool:
        """Record a newly interned payload; return True if sub() may change."""
        return False

    # -- algebra ------------------------------------------------------------
    def sub(self, payload, ctx) -> Iterable[Term]:
        return ()

    def push_back(self, act, test, ctx) -> list[Term]:
        raise NotImplementedError

    def consistent(self, lits: Sequence[tuple[Any, bool]], ctx) -> bool:
        """Is the conjunction of (payload, polarity) literals satisfiable?"""
        raise NotImplementedError

    def labelings(self, atoms: Sequence[Term], ctx) -> list[tuple[bool, ...]]:
        """All consistent truth assignments to ``atoms`` (in order)."""
        return dpll_labelings(atoms, lambda lits: self.consistent(lits, ctx))

    def reduce_lits(self, lits: list[Term], ctx) -> Optional[list[Term]]:
        """Drop literals implied by others; None if the conjunction is contradictory.

        Optional: the default keeps every literal.  Literals the theory does
        not own must be passed through untouched.
        """
        return lits

    # -- state model ----------------------------------------------------------
    has_model = True

    def pred(self, payload, trace, ctx) -> bool:
        raise NotImplementedError

    def act(self, payload, state, ctx):
        raise NotImplementedError

    def states(self, ctx, budget: Budget) -> list:
        raise NotImplementedError

    def initial_traces(self, ctx, budget: Budget) -> list:
        return [((s, None),) for s in self.states(ctx, budget)]

    # -- parser -------------------------------------------------------------
    def parse_call(self, head: str, args: list, P) -> Optional[Term]:
        return None

    def parse_infix(self, lhs: str, op: str, rhs: str, P) -> Optional[Term]:
        return None

    def parse_word(self, word: str, P) -> Optional[Term]:
        return None

    # -- generators (tests, validation) -----------------------------------
    def sample_tests(self, ctx, rng: random.Random) -> list:
        return []

    def sample_actions(self, ctx, rng: random.Random) -> list:
        return []

    def __repr__(self):
        return f"<theory {self.name}>"


def dpll_labelings(atoms: Sequence[Term], consistent: Callable) -> list[tuple[bool, ...]]:
    """Enumerate assignments, pruning any partial one that is inconsistent."""
    atoms = list(atoms)
    out: list[tuple[bool, ...]] = []
    n = len(atoms)

    def go(i, lits, vals):
        if i == n:
            out.append(tuple(vals))
            return
        p = atoms[i].payload
        for v in (False, True):
            lits.append((p, v))
            if consistent(lits):
                vals.append(v)
                go(i + 1, lits, vals)
                vals.pop()
            lits.pop()

    if consistent([]):
        go(0, [], [])
    return out


# -- registry -----------------------------------------------------------------
_REGISTRY: dict[str, Callable[..., Theory]] = {}
_ARITY: dict[str, int] = {}


def register_theory(name: str, factory: Callable[..., Theory], arity: int = 0) -> str:
    """Register a theory constructor; composites take inner theories as args."""
    if name in _REGISTRY:
        raise TheoryError(f"duplicate theory name: {name}")
    _REGISTRY[name] = factory
    _ARITY[name] = arity
    return name


def theory_names() -> list[str]:
    return sorted(_REGISTRY)


def _split_args(s: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


def _build_polish(words: list[str]) -> tuple[Theory, list[str]]:
    if not words:
        raise TheoryError("empty theory name")
    head, rest = words[0], words[1:]
    if head not in _REGISTRY:
        raise TheoryError(f"unknown theory: {head}")
    args = []
    for _ in range(_ARITY[head]):
        t, rest = _build_polish(rest)
        args.append(t)
    return _REGISTRY[head](*args), rest


def make_theory(name: str) -> Theory:
    """Build a theory from ``ltlf(incnat)`` or ``ltlf-incnat`` style names."""
    from . import theories  # noqa: F401  (registers built-ins)

    name = name.strip().lower().replace(" ", "")
    if "(" in name:
        i = name.index("(")
        if not name.endswith(")"):
            raise TheoryError(f"bad theory name: {name}")
        head = name[:i]
        if head not in _REGISTRY:
            raise TheoryError(f"unknown theory: {head}")
        args = [make_theory(a) for a in _split_args(name[i + 1:-1])]
        if len(args) != _ARITY[head]:
            raise TheoryError(f"{head} takes {_ARITY[head]} argument(s)")
        return _REGISTRY[head](*args)
    t, rest = _build_polish(name.split("-"))
    if rest:
        raise TheoryError(f"trailing theory name parts: {'-'.join(rest)}")
    return t


# -- contract validation ----------------------------------------------------
@dataclass
class Report:
    theory: str
    ok: bool = True
    checked: int = 0
    failures: list = field(default_factory=list)
    budget_exhausted: bool = False

    def fail(self, kind: str, detail: str):
        self.ok = False
        self.failures.append((kind, detail))

    def __str__(self):
        head = f"{self.theory}: {'pass' if self.ok else 'FAIL'} ({self.checked} checks)"
        if self.budget_exhausted:
            head += " [budget exhausted]"
        lines = [head] + [f"  {k}: {d}" for k, d in self.failures[:20]]
        return "\n".join(lines)


def validate_theory(engine, budget: Optional[Budget] = None, tests=None, actions=None) -> Report:
    """Check the pushback contract and subterm well-behavedness.

    For each sampled (action, primitive test) pair the pushback must be
    oracle-equivalent to the original and no larger in the subterm ordering;
    every primitive's theory subterms must be closed and strictly smaller.
    """
    from .oracle import equiv_bounded, OracleBudgetError
    from . import ordering

    budget = budget or Budget()
    eng = engine
    rng = random.Random(budget.seed)
    th = eng.theory
    rep = Report(th.name)
    tests = list(tests) if tests is not None else th.sample_tests(eng, rng)
    actions = list(actions) if actions is not None else th.sample_actions(eng, rng)
    st = eng.store
    # interning everything first fixes the universe used by sub()
    tests = [t if isinstance(t, Term) else st.test(t) for t in tests]
    actions = [a if isinstance(a, Term) else st.act(a) for a in actions]

    for t in tests:
        subs = ordering.sub(eng, t)
        rep.checked += 1
        for b in subs:
            if b in (st.zero, st.one, t):
                continue
            if not ordering.sub(eng, b) <= subs:
                rep.fail("sub-closure", f"sub({b}) not within sub({t})")
            if b.kind == 2 and not eng.test_key(b) < eng.test_key(t):
                rep.fail("sub-order", f"{b} does not precede {t}")
        if t in ordering.sub_strict(eng, t):
            rep.fail("sub-cycle", f"{t} is a proper subterm of itself")

    pairs = [(a, t) for a in actions for t in tests]
    rng.shuffle(pairs)
    pairs = pairs[: budget.samples]
    for a, t in pairs:
        rep.checked += 1
        try:
            res = th.push_back(a.payload, t.payload, eng)
        except Exception as e:  # contract violation by exception
            rep.fail("pushback-error", f"{a}·{t}: {e}")
            continue
        lhs = st.seq(a, t)
        rhs = st.seq(st.sum(res), a)
        try:
            ok, cex = equiv_bounded(eng, lhs, rhs, budget)
        except OracleBudgetError:
            rep.budget_exhausted = True
            continue
        if not ok:
            rep.fail("pushback-unsound", f"{a}·{t} ⇝ {{{', '.join(map(str, res))}}}: {cex}")
        for r in res:
            if not ordering.leq(eng, r, t):
                rep.fail("pushback-measure", f"{r} not ⪯ {t} (from {a})")
    return rep

