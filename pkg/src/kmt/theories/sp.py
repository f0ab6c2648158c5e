"""Shortest paths over naturals with infinity: ``x<n`` tests, ``x:=minp(xs)`` actions.

``x:=minp(a,b)`` sets x to one more than the least of a and b.  Subterms
range over the variables mentioned in the current engine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ..theory import Theory, register_theory
from .base import add_to, assignments, is_ident, is_int, lits_by_payload, sget, sset, uset

INF = math.inf


@dataclass(frozen=True)
class Lt:
    var: str
    n: Optional[int]  # None is infinity
    level = 0

    def key(self):
        return (1, 0, self.var) if self.n is None else (0, self.n, self.var)

    def __str__(self):
        return f"{self.var}<{'inf' if self.n is None else self.n}"


@dataclass(frozen=True)
class MinPlus:
    var: str
    args: tuple

    def key(self):
        return (self.var, self.args)

    def __str__(self):
        return f"{self.var}:=minp({','.join(self.args)})"


class SP(Theory):
    name = "sp"
    test_types = (Lt,)
    action_types = (MinPlus,)

    def observe(self, p, universe):
        if isinstance(p, Lt):
            a = add_to(universe, "sp.vars", p.var)
            if p.n is not None:
                add_to(universe, "sp.consts", p.n)
            return a
        if isinstance(p, MinPlus):
            return add_to(universe, "sp.vars", p.var, *p.args)
        return False

    def sub(self, p, ctx):
        st = ctx.store
        vs = sorted(uset(ctx.universe, "sp.vars"))
        if p.n is None:
            return [st.test(Lt(y, None)) for y in vs]
        return [st.test(Lt(y, m)) for y in vs for m in range(p.n)]

    def push_back(self, act, test, ctx):
        st = ctx.store
        if act.var != test.var:
            return [st.test(test)]
        if test.n is None:
            return [st.test(Lt(y, None)) for y in act.args]
        if test.n <= 1:
            return [st.zero]
        return [st.test(Lt(y, test.n - 1)) for y in act.args]

    def consistent(self, lits, ctx):
        seen = lits_by_payload(lits)
        if seen is None:
            return False
        by_var: dict = {}
        for p, v in seen.items():
            by_var.setdefault(p.var, []).append((p.n, v))
        for cs in by_var.values():
            if not self._var_ok(cs):
                return False
        return True

    @staticmethod
    def _var_ok(cs):
        lo, hi, finite, infinite = 0, INF, False, False
        for n, v in cs:
            if n is None:
                if v:
                    finite = True
                else:
                    infinite = True
            elif v:
                hi = min(hi, n)
                finite = True
            else:
                lo = max(lo, n)
        if infinite:
            return not finite
        return lo < hi

    def pred(self, p, trace, ctx):
        x = sget(trace[-1][0], p.var, INF)
        return x < (INF if p.n is None else p.n)

    def act(self, p, state, ctx):
        m = min(sget(state, y, INF) for y in p.args)
        return sset(state, p.var, m + 1)

    def states(self, ctx, budget):
        vs = uset(ctx.universe, "sp.vars")
        return assignments(vs, lambda _: list(range(budget.states + 1)) + [INF])

    def parse_infix(self, lhs, op, rhs, P):
        if not is_ident(lhs):
            return None
        if op == "<":
            if rhs == "inf":
                return P.eng.test(Lt(lhs, None))
            if is_int(rhs):
                return P.eng.test(Lt(lhs, int(rhs)))
        if op == ":=" and rhs.startswith("minp(") and rhs.endswith(")"):
            args = tuple(a.strip() for a in rhs[5:-1].split(","))
            if args and all(is_ident(a) for a in args):
                return P.eng.act(MinPlus(lhs, args))
        return None

    def sample_tests(self, ctx, rng):
        return [Lt(v, n) for v in ("A", "B", "C") for n in (1, 2, 3)] + [Lt("A", None), Lt("B", None)]

    def sample_actions(self, ctx, rng):
        return [MinPlus("A", ("B", "C")), MinPlus("B", ("A",)), MinPlus("C", ("A", "B"))]


register_theory("sp", SP)
