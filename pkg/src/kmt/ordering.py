"""Maximal-subterm machinery: seqs, sub, tests, mt, the ⪯ ordering and split.

Normal forms are frozensets of ``(test, restricted action)`` pairs.  The
ordering functions accept either a normal form or a single test, which is
lifted to the normal form ``{(a, 1)}``.
"""
from __future__ import annotations

from typing import Iterable, Union

from .terms import NOT, ONE, PLUS, SEQ, TEST, ZERO, Term

NF = frozenset


class SplitError(ValueError):
    pass


def seqs(a: Term) -> list[Term]:
    out = []
    while a.kind == SEQ:
        out.append(a.args[0])
        a = a.args[1]
    out.append(a)
    return out


def seqs_of(tests: Iterable[Term]) -> set[Term]:
    out: set[Term] = set()
    for a in tests:
        out.update(seqs(a))
    return out


def tests(eng, x) -> set[Term]:
    """``tests`` of a normal form (always includes 1); a test is lifted first."""
    one = eng.store.one
    if isinstance(x, Term):
        return {one, x}
    return {one} | {a for a, _ in x}


def sub(eng, a: Term) -> frozenset[Term]:
    cache = eng.sub_cache
    r = cache.get(a.id)
    if r is not None:
        return r
    st = eng.store
    k = a.kind
    if k == ZERO:
        r = frozenset((st.zero,))
    elif k == ONE:
        r = frozenset((st.zero, st.one))
    elif k == TEST:
        r = frozenset((st.zero, st.one, a)) | frozenset(eng.theory.sub(a.payload, eng))
    elif k == NOT:
        inner = sub(eng, a.args[0])
        r = frozenset((st.zero, st.one)) | inner | frozenset(st.neg(b) for b in inner)
    elif k in (PLUS, SEQ):
        acc = {a}
        for c in a.args:
            acc |= sub(eng, c)
        r = frozenset(acc)
    else:
        raise ValueError(f"sub of a non-test: {a}")
    cache[a.id] = r
    return r


def sub_strict(eng, a: Term) -> frozenset[Term]:
    """Subterms reachable from ``a`` through something other than ``a`` itself."""
    st = eng.store
    if a.kind != TEST:
        return sub(eng, a) - {a}
    acc: set[Term] = set()
    for b in eng.theory.sub(a.payload, eng):
        if b is not a:
            acc |= sub(eng, b)
    return frozenset(acc)


def sub_set(eng, A: Iterable[Term]) -> frozenset[Term]:
    acc: set[Term] = set()
    for a in A:
        acc |= sub(eng, a)
    return frozenset(acc)


def mt(eng, A: Iterable[Term]) -> list[Term]:
    """Maximal tests of a set of tests, in the global order.

    When subterm cycles leave no maximal element (a theory that is not well
    behaved), fall back to the elements with the largest subterm sets.
    """
    S = seqs_of(A)
    if not S:
        return [eng.store.zero]
    out = []
    for b in S:
        if all(c is b or b not in sub(eng, c) for c in S):
            out.append(b)
    if not out:
        subs = {b: sub(eng, b) for b in S}
        out = [b for b in S if not any(subs[b] < subs[c] for c in S)]
    out.sort(key=eng.test_key)
    return out


def mt_nf(eng, x) -> list[Term]:
    return mt(eng, tests(eng, x))


def measure(eng, x) -> frozenset[Term]:
    """``sub(mt(x))``; equal to the subterms of every sequenced test of x."""
    memo = eng.theory_cache.setdefault("measure", {})
    key = x if isinstance(x, (Term, frozenset)) else frozenset(x)
    r = memo.get(key)
    if r is None:
        r = memo[key] = sub_set(eng, seqs_of(tests(eng, x)))
    return r


def leq(eng, x, y) -> bool:
    return measure(eng, x) <= measure(eng, y)


def lt(eng, x, y) -> bool:
    return measure(eng, x) < measure(eng, y)


def split(eng, x, a: Term) -> tuple[frozenset, frozenset]:
    """Partition x into (y, z) with x ≡ a·y + z and a absent from y and z."""
    if a not in mt_nf(eng, x):
        raise SplitError(f"{a} is not a maximal test of the normal form")
    y, z = [], []
    for b, m in x:
        parts = seqs(b)
        if a in parts:
            rest = [c for c in parts if c is not a]
            y.append((eng.conj_list(rest), m))
        else:
            z.append((b, m))
    return NF(y), NF(z)
