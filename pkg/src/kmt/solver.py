"""Satisfiability of combined tests.

Literal conjunctions go straight to the theory's ``consistent``; anything
else is decided by enumerating the theory's consistent labelings of the
test's atoms and evaluating.
"""
from __future__ import annotations

from .terms import NOT, ONE, PLUS, SEQ, TEST, ZERO, Term, atoms


class SolverError(RuntimeError):
    pass


def literals(t: Term):
    """(payload, polarity) list if t is a product of literals, else None."""
    out = []
    stack = [t]
    while stack:
        u = stack.pop()
        k = u.kind
        if k == ONE:
            continue
        if k == ZERO:
            return [(None, False)]
        if k == TEST:
            out.append((u.payload, True))
        elif k == NOT and u.args[0].kind == TEST:
            out.append((u.args[0].payload, False))
        elif k == SEQ:
            stack.extend(u.args)
        else:
            return None
    return out


def evaluate(t: Term, val) -> bool:
    """Evaluate a test under ``val``: a callable from atom Term to bool."""
    k = t.kind
    if k == ONE:
        return True
    if k == ZERO:
        return False
    if k == TEST:
        return val(t)
    if k == NOT:
        return not evaluate(t.args[0], val)
    if k == SEQ:
        return evaluate(t.args[0], val) and evaluate(t.args[1], val)
    if k == PLUS:
        return any(evaluate(c, val) for c in t.args)
    raise SolverError(f"not a test: {t}")


def satisfiable(eng, t: Term) -> bool:
    cache = eng.sat_cache
    r = cache.get(t.id)
    if r is not None:
        return r
    r = _satisfiable(eng, t)
    cache[t.id] = r
    return r


def _satisfiable(eng, t: Term) -> bool:
    if t.kind == ZERO:
        return False
    if t.kind == ONE:
        return True
    lits = literals(t)
    if lits is not None:
        if any(p is None for p, _ in lits):
            return False
        seen = {}
        for p, v in lits:
            if seen.get(p, v) != v:
                return False
            seen[p] = v
        return eng.theory.consistent(list(seen.items()), eng)
    if t.kind == PLUS:
        return any(satisfiable(eng, c) for c in t.args)
    ats = sorted(atoms(t), key=eng.test_key)
    idx = {a: i for i, a in enumerate(ats)}
    for lab in eng.theory.labelings(ats, eng):
        if evaluate(t, lambda a: lab[idx[a]]):
            return True
    return False


def valid(eng, t: Term) -> bool:
    return not satisfiable(eng, eng.store.neg(t))


def implies(eng, a: Term, b: Term) -> bool:
    st = eng.store
    return not satisfiable(eng, st.seq(a, st.neg(b)))
