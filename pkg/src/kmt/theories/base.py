"""Small helpers shared by the built-in theories."""
from __future__ import annotations

import itertools
import re
from typing import Iterable

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
INT = re.compile(r"\d+\Z")


def is_ident(s: str) -> bool:
    return bool(IDENT.match(s))


def is_int(s: str) -> bool:
    return bool(INT.match(s))


# states are tuples of sorted (key, value) pairs so they hash and compare
def sget(state: tuple, k, default=None):
    for kk, v in state:
        if kk == k:
            return v
    return default


def sset(state: tuple, k, v) -> tuple:
    d = dict(state)
    d[k] = v
    return tuple(sorted(d.items()))


def assignments(keys: Iterable, values_for) -> list[tuple]:
    keys = sorted(keys)
    doms = [list(values_for(k)) for k in keys]
    return [tuple(zip(keys, combo)) for combo in itertools.product(*doms)]


def lits_by_payload(lits):
    """Merge duplicate literals; None if some payload appears with both signs."""
    seen = {}
    for p, v in lits:
        if seen.get(p, v) != v:
            return None
        seen[p] = v
    return seen


def uset(universe: dict, key: str) -> set:
    return universe.setdefault(key, set())


def add_to(universe: dict, key: str, *items) -> bool:
    s = uset(universe, key)
    n = len(s)
    s.update(items)
    return len(s) != n


def neg_sub(ctx, t) -> set:
    """Subterms of the (unsimplified) negation of t: sub(t) plus negations."""
    s = ctx.sub(t)
    return set(s) | {ctx.store.neg(b) for b in s}
