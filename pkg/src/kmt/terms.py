"""Hash-consed terms of Kleene algebra modulo theories.

Terms are interned in a :class:`TermStore`; structural equality is object
identity, so sets and dicts of terms are cheap.  Only a small fixed set of
simplifications happens at construction time (see ``TermStore.plus`` and
friends); anything deeper belongs to the normalizer.
"""
from __future__ import annotations

import threading
from typing import Callable, Iterable, Optional

ZERO, ONE, TEST, NOT, PLUS, SEQ, STAR, ACT = range(8)
KIND_NAMES = ("zero", "one", "test", "not", "plus", "seq", "star", "act")


class KernelError(ValueError):
    pass


class Term:
    __slots__ = ("id", "kind", "args", "payload", "label", "is_test", "size", "level", "store")

    def __init__(self, tid, kind, args, payload, label, is_test, size, level, store):
        self.id = tid
        self.kind = kind
        self.args = args
        self.payload = payload
        self.label = label
        self.is_test = is_test
        self.size = size
        self.level = level
        self.store = store

    def __hash__(self):
        return self.id

    def __lt__(self, other):
        return self.id < other.id

    def __repr__(self):
        return show(self)

    def __str__(self):
        return show(self)

    @property
    def is_atom(self):
        return self.kind == TEST

    @property
    def is_action(self):
        return self.kind == ACT


def payload_key(p) -> tuple:
    return (type(p).__name__, p.key())


class TermStore:
    """Interning table.  Thread safe for interning; terms are immutable."""

    def __init__(self):
        self._table: dict = {}
        self._terms: list[Term] = []
        self._lock = threading.Lock()
        self.observers: list[Callable] = []
        self._seq_memo: dict = {}
        self.zero = self._mk(ZERO, (), None, None, True)
        self.one = self._mk(ONE, (), None, None, True)

    def __len__(self):
        return len(self._terms)

    def deref(self, tid: int) -> Term:
        return self._terms[tid]

    def _mk(self, kind, args, payload, label, is_test) -> Term:
        key = (kind, tuple(a.id for a in args), payload, label)
        t = self._table.get(key)
        if t is not None:
            return t
        with self._lock:
            t = self._table.get(key)
            if t is not None:
                return t
            size = 1 + sum(a.size for a in args)
            if payload is not None:
                level = getattr(payload, "level", 0)
            else:
                level = max((a.level for a in args), default=0)
            t = Term(len(self._terms), kind, tuple(args), payload, label, is_test, size, level, self)
            self._terms.append(t)
            self._table[key] = t
        if payload is not None:
            for obs in self.observers:
                obs(payload, kind)
        return t

    # -- smart constructors -------------------------------------------------
    def test(self, payload) -> Term:
        return self._mk(TEST, (), payload, None, True)

    def act(self, payload, label: Optional[int] = None) -> Term:
        return self._mk(ACT, (), payload, label, False)

    def neg(self, a: Term) -> Term:
        if not a.is_test:
            raise KernelError(f"negation applied to action: {show(a)}")
        if a.kind == NOT:
            return a.args[0]
        return self._mk(NOT, (a,), None, None, True)

    def plus(self, *terms: Term) -> Term:
        return self.sum(terms)

    def sum(self, terms: Iterable[Term]) -> Term:
        seen = set()
        for t in terms:
            if t.kind == PLUS:
                seen.update(t.args)
            elif t.kind != ZERO:
                seen.add(t)
        if not seen:
            return self.zero
        if len(seen) == 1:
            return next(iter(seen))
        args = tuple(sorted(seen, key=lambda t: t.id))
        return self._mk(PLUS, args, None, None, all(a.is_test for a in args))

    def seq(self, a: Term, b: Term) -> Term:
        if a.kind == ZERO or b.kind == ZERO:
            return self.zero
        if a.kind == ONE:
            return b
        if b.kind == ONE:
            return a
        if a.kind == SEQ:
            key = (a.id, b.id)
            r = self._seq_memo.get(key)
            if r is None:
                r = self._seq_memo[key] = self.seq(a.args[0], self.seq(a.args[1], b))
            return r
        return self._mk(SEQ, (a, b), None, None, a.is_test and b.is_test)

    def seqs(self, terms: Iterable[Term]) -> Term:
        terms = list(terms)
        out = self.one
        for t in reversed(terms):
            out = self.seq(t, out)
        return out

    def star(self, a: Term) -> Term:
        if a.kind in (ZERO, ONE):
            return self.one
        return self._mk(STAR, (a,), None, None, False)

    def relabel(self, t: Term, label: Optional[int]) -> Term:
        assert t.kind == ACT
        return self.act(t.payload, label)


def is_test(t: Term) -> bool:
    return t.is_test


def is_restricted(t: Term) -> bool:
    """True when the only test inside ``t`` is 1 (0 is allowed as the empty sum)."""
    k = t.kind
    if k in (ONE, ZERO, ACT):
        return True
    if k in (TEST, NOT):
        return False
    return all(is_restricted(a) for a in t.args)


def nnf(a: Term) -> Term:
    """Push negations down to primitive tests."""
    st = a.store
    k = a.kind
    if k in (ZERO, ONE, TEST):
        return a
    if k == PLUS:
        return st.sum(nnf(c) for c in a.args)
    if k == SEQ:
        return st.seq(nnf(a.args[0]), nnf(a.args[1]))
    if k != NOT:
        raise KernelError("nnf of a non-test")
    b = a.args[0]
    kb = b.kind
    if kb == ZERO:
        return st.one
    if kb == ONE:
        return st.zero
    if kb == TEST:
        return a
    if kb == NOT:  # unreachable through smart constructors, kept for clarity
        return nnf(b.args[0])
    if kb == PLUS:
        out = st.one
        for c in reversed(b.args):
            out = st.seq(nnf(st.neg(c)), out)
        return out
    # SEQ
    return st.plus(nnf(st.neg(b.args[0])), nnf(st.neg(b.args[1])))


def atoms(t: Term) -> set[Term]:
    """Primitive test subterms (not looking inside theory payloads)."""
    out: set[Term] = set()
    stack = [t]
    seen = set()
    while stack:
        u = stack.pop()
        if u.id in seen:
            continue
        seen.add(u.id)
        if u.kind == TEST:
            out.add(u)
        else:
            stack.extend(u.args)
    return out


def actions(t: Term) -> set[Term]:
    out: set[Term] = set()
    stack = [t]
    seen = set()
    while stack:
        u = stack.pop()
        if u.id in seen:
            continue
        seen.add(u.id)
        if u.kind == ACT:
            out.add(u)
        else:
            stack.extend(u.args)
    return out


# -- display ---------------------------------------------------------------
# precedence: + is 0, ; is 1, postfix/prefix is 2, atoms 3
def show(t: Term, ctx: int = 0, labels: bool = False) -> str:
    k = t.kind
    if k == ZERO:
        return "false"
    if k == ONE:
        return "true"
    if k == TEST:
        return str(t.payload)
    if k == ACT:
        s = str(t.payload)
        if labels and t.label is not None:
            s += f"^{t.label}"
        return s
    if k == PLUS:
        parts = sorted(show(c, 1, labels) for c in t.args)
        s = " + ".join(parts)
        return f"({s})" if ctx > 0 else s
    if k == SEQ:
        parts = []
        u = t
        while u.kind == SEQ:
            parts.append(show(u.args[0], 2, labels))
            u = u.args[1]
        parts.append(show(u, 2, labels))
        s = "; ".join(parts)
        return f"({s})" if ctx > 1 else s
    if k == STAR:
        return show(t.args[0], 3, labels) + "*"
    # NOT
    return "~" + show(t.args[0], 3, labels)
