"""The KMT engine: one term store, one theory, shared caches.

The engine is also the context object handed to theory hooks, which is how
composite theories (LTLf, Set, Map) call back into pushback, subterms and
satisfiability of the combined theory.
"""
from __future__ import annotations

import itertools
import threading
from typing import Iterable, Optional, Union

from . import ordering, solver
from .normal import Normalizer, nf_term
from .terms import NOT, ONE, PLUS, SEQ, TEST, ZERO, Term, TermStore, nnf, show
from .theory import Budget, Theory, make_theory


class KMT:
    def __init__(self, theory: Union[str, Theory], fuel: int = 10**6, debug: bool = False):
        self.theory = make_theory(theory) if isinstance(theory, str) else theory
        self.store = TermStore()
        self.universe: dict = {}
        self.version = 0
        self.sub_cache: dict = {}
        self.sat_cache: dict = {}
        self.theory_cache: dict = {}
        self._key_cache: dict = {}
        self._lock = threading.RLock()
        self.store.observers.append(self._observe)
        self.norm = Normalizer(self, fuel=fuel, debug=debug)

    # -- universe -----------------------------------------------------------
    def _observe(self, payload, kind):
        if self.theory.observe(payload, self.universe):
            self.version += 1
            self.sub_cache.clear()
            self.sat_cache.clear()
            self.theory_cache.clear()

    @property
    def measure_violations(self) -> list[str]:
        return self.norm.violations

    # -- construction helpers ------------------------------------------------
    def test(self, payload) -> Term:
        return self.store.test(payload)

    def act(self, payload) -> Term:
        return self.store.act(payload)

    def parse(self, src: str) -> Term:
        from .parser import parse

        return parse(src, self)

    def show(self, t: Term) -> str:
        return show(t)

    def test_key(self, t: Term):
        k = self._key_cache.get(t.id)
        if k is None:
            if t.kind == TEST:
                p = t.payload
                pk = (type(p).__name__, p.key())
            else:
                pk = ("", ())
            k = (t.level, t.size, pk, t.id)
            self._key_cache[t.id] = k
        return k

    def conj_list(self, tests: Iterable[Term]) -> Term:
        """Canonical product of tests: flattened, deduplicated, ordered."""
        st = self.store
        parts: dict[int, Term] = {}
        for a in tests:
            for c in ordering.seqs(a):
                if c.kind == ZERO:
                    return st.zero
                if c.kind == ONE:
                    continue
                parts[c.id] = c
        for c in parts.values():
            if c.kind == NOT and c.args[0].id in parts:
                return st.zero
        items = list(parts.values())
        if len(items) > 1:
            lits = [c for c in items if c.kind == TEST or (c.kind == NOT and c.args[0].kind == TEST)]
            if len(lits) > 1:
                kept = self.theory.reduce_lits(lits, self)
                if kept is None:
                    return st.zero
                drop = set(lits) - set(kept)
                items = [c for c in items if c not in drop]
        return st.seqs(sorted(items, key=self.test_key))

    def conj(self, a: Term, b: Term) -> Term:
        return self.conj_list((a, b))

    def canon(self, a: Term) -> Term:
        return self.conj_list((a,))

    def dnf(self, a: Term) -> list[Term]:
        """Literal products whose sum is equivalent to the nnf test ``a``."""
        k = a.kind
        if k == ZERO:
            return []
        if k in (ONE, TEST, NOT):
            return [a]
        if k == PLUS:
            out = []
            for c in a.args:
                out.extend(self.dnf(c))
            return list(dict.fromkeys(out))
        if k == SEQ:
            out = []
            for l, r in itertools.product(self.dnf(a.args[0]), self.dnf(a.args[1])):
                c = self.conj(l, r)
                if c.kind != ZERO:
                    out.append(c)
            return list(dict.fromkeys(out))
        raise ValueError(f"dnf of a non-test: {a}")

    # -- ordering ---------------------------------------------------------------
    def sub(self, a: Term) -> frozenset:
        return ordering.sub(self, a)

    def leq(self, x, y) -> bool:
        return ordering.leq(self, x, y)

    def lt(self, x, y) -> bool:
        return ordering.lt(self, x, y)

    def mt(self, x) -> list:
        return ordering.mt_nf(self, x)

    def split(self, x, a):
        return ordering.split(self, x, a)

    # -- satisfiability ----------------------------------------------------------
    def satisfiable(self, t: Term) -> bool:
        return solver.satisfiable(self, t)

    # -- normalization -------------------------------------------------------------
    def normalize(self, p: Term):
        return self.norm.normalize(p)

    def pb_dot(self, m: Term, a: Term):
        return self.norm.pb_dot(m, a)

    def pb_dot_tests(self, act_payload, a: Term) -> list[Term]:
        """Tests b_i with π·a ≡ Σ b_i·π; used by composite theories."""
        m = self.store.act(act_payload)
        return [b for b, _ in self.norm.pb_dot(m, a)]

    def pb_star(self, x):
        return self.norm.pb_star(x)

    def pb_join(self, x, y):
        return self.norm.pb_join(x, y)

    def pb_test(self, x, a):
        return self.norm.pb_test(x, a)

    def pb_restricted(self, m, x):
        return self.norm.pb_restricted(m, x)

    def nf_term(self, x) -> Term:
        return nf_term(self, x)

    def show_nf(self, x) -> str:
        if not x:
            return "false"
        parts = sorted(_nf_pair(a, m) for a, m in x)
        return " + ".join(parts)

    # -- decisions --------------------------------------------------------------------
    def equivalent(self, p: Term, q: Term):
        from .automata import equivalent

        return equivalent(self, p, q)

    def empty(self, p: Term):
        from .automata import empty

        return empty(self, p)

    def equiv_bounded(self, p: Term, q: Term, budget: Optional[Budget] = None):
        from .oracle import equiv_bounded

        return equiv_bounded(self, p, q, budget or Budget())

    def validate(self, budget: Optional[Budget] = None):
        from .theory import validate_theory

        return validate_theory(self, budget)


def _nf_pair(a: Term, m: Term) -> str:
    if m.kind == ONE:
        return show(a, 1)
    if a.kind == ONE:
        return show(m, 1)
    return f"{show(a, 2)}; {show(m, 1)}"


def load(theory: Union[str, Theory], **kw) -> KMT:
    """Convenience constructor: ``load("ltlf(incnat)")``."""
    return KMT(theory, **kw)
