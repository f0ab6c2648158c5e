"""Bounded trace semantics, used to cross-check the decision procedure.

A trace is a tuple of ``(state, label)`` entries; the first label is None.
Terms denote maps from a trace to a set of traces extending it.  Runs are
cut once they append more than ``steps`` actions to the input trace, and the
cut applies to both sides of a comparison, so bounded equality is exact up
to that bound.
"""
from __future__ import annotations

from typing import Optional, Sequence

from .terms import ACT, NOT, ONE, PLUS, SEQ, STAR, TEST, ZERO, Term
from .theory import Budget


class OracleBudgetError(RuntimeError):
    pass


def holds(eng, a: Term, trace) -> bool:
    k = a.kind
    if k == ONE:
        return True
    if k == ZERO:
        return False
    if k == TEST:
        return eng.theory.pred(a.payload, trace, eng)
    if k == NOT:
        return not holds(eng, a.args[0], trace)
    if k == SEQ:
        return holds(eng, a.args[0], trace) and holds(eng, a.args[1], trace)
    if k == PLUS:
        return any(holds(eng, c, trace) for c in a.args)
    raise ValueError(f"not a test: {a}")


def denote(eng, p: Term, traces, limit: int, word: Optional[Sequence] = None, base: int = 0) -> set:
    """Outputs of p on each input trace, dropping traces longer than ``limit``.

    With ``word`` given, only the action ``word[len(t) - base]`` may be
    appended to a trace t; this replays one run without branching.
    """
    T = set(traces)
    k = p.kind
    if k == ZERO:
        return set()
    if k == ONE:
        return T
    if p.is_test:
        return {t for t in T if holds(eng, p, t)}
    if k == ACT:
        out = set()
        for t in T:
            if len(t) >= limit:
                continue
            if word is not None:
                j = len(t) - base
                if j >= len(word) or word[j] != p.payload:
                    continue
            out.add(t + ((eng.theory.act(p.payload, t[-1][0], eng), p.payload),))
        return out
    if k == PLUS:
        out = set()
        for c in p.args:
            out |= denote(eng, c, T, limit, word, base)
        return out
    if k == SEQ:
        return denote(eng, p.args[1], denote(eng, p.args[0], T, limit, word, base), limit, word, base)
    if k == STAR:
        seen = set(T)
        frontier = T
        while frontier:
            nxt = denote(eng, p.args[0], frontier, limit, word, base) - seen
            seen |= nxt
            frontier = nxt
        return seen
    raise ValueError(p)


def run(eng, p: Term, trace, steps: int) -> set:
    return denote(eng, p, {trace}, len(trace) + steps)


def initial_traces(eng, budget: Budget) -> list:
    if not eng.theory.has_model:
        raise OracleBudgetError("theory has no state model")
    ts = eng.theory.initial_traces(eng, budget)
    if not ts:
        raise OracleBudgetError("budget produces no initial traces")
    return ts


def equiv_bounded(eng, p: Term, q: Term, budget: Optional[Budget] = None):
    """(True, None) or (False, (initial trace, trace produced by one side only))."""
    budget = budget or Budget()
    for t in initial_traces(eng, budget):
        a = run(eng, p, t, budget.trace_len)
        b = run(eng, q, t, budget.trace_len)
        if a != b:
            diff = sorted(a ^ b, key=lambda u: (len(u), repr(u)))[0]
            return False, (t, diff)
    return True, None


def accepts(eng, p: Term, trace, word: Sequence) -> bool:
    """Is trace extended by ``word`` an output of p on ``trace``?"""
    out = denote(eng, p, {trace}, len(trace) + len(word), word=list(word), base=len(trace))
    return any(len(u) == len(trace) + len(word) for u in out)


def extend(eng, trace, word: Sequence):
    for a in word:
        trace = trace + ((eng.theory.act(a, trace[-1][0], eng), a),)
    return trace


def show_trace(t) -> str:
    parts = []
    for s, lab in t:
        parts.append(f"<{_show_state(s)}, {'⊥' if lab is None else lab}>")
    return "".join(parts)


def _show_state(s) -> str:
    if isinstance(s, tuple) and all(isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], str) for x in s):
        return "{" + ", ".join(f"{k}:{_show_state(v)}" for k, v in s) + "}"
    if isinstance(s, tuple):
        return "(" + ", ".join(_show_state(x) for x in s) + ")"
    if isinstance(s, frozenset):
        return "{" + ",".join(map(str, sorted(s))) + "}"
    return str(s)
