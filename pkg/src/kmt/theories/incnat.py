"""Increasing naturals: ``x>n`` tests, ``inc(x)`` and ``x:=n`` actions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..terms import TEST
from ..theory import Theory, register_theory
from .base import add_to, assignments, is_ident, is_int, lits_by_payload, sget, sset, uset


@dataclass(frozen=True)
class Gt:
    var: str
    n: int
    level = 0

    def key(self):
        return (self.n, self.var)

    def __str__(self):
        return f"{self.var}>{self.n}"


@dataclass(frozen=True)
class Inc:
    var: str

    def key(self):
        return (self.var,)

    def __str__(self):
        return f"inc({self.var})"


@dataclass(frozen=True)
class Assign:
    var: str
    n: int

    def key(self):
        return (self.var, self.n)

    def __str__(self):
        return f"{self.var}:={self.n}"


def bounds(lits):
    """Per-variable (lower, upper): x > lower and x <= upper (upper None = unbounded)."""
    out: dict[str, list] = {}
    for p, v in lits:
        b = out.setdefault(p.var, [-1, None])
        if v:
            b[0] = max(b[0], p.n)
        else:
            b[1] = p.n if b[1] is None else min(b[1], p.n)
    return out


def interval_ok(lo, hi):
    return hi is None or lo < hi


class IncNat(Theory):
    name = "incnat"
    test_types = (Gt,)
    action_types = (Inc, Assign)

    def observe(self, p, universe):
        if isinstance(p, (Gt, Inc, Assign)):
            add_to(universe, "incnat.vars", p.var)
            if isinstance(p, (Gt, Assign)):
                add_to(universe, "incnat.consts", p.n)
        return False

    def sub(self, p, ctx):
        st = ctx.store
        return [st.test(Gt(p.var, m)) for m in range(p.n)]

    def push_back(self, act, test, ctx):
        st = ctx.store
        if act.var != test.var:
            return [st.test(test)]
        if isinstance(act, Assign):
            return [st.one if act.n > test.n else st.zero]
        if test.n == 0:
            return [st.one]
        return [st.test(Gt(test.var, test.n - 1))]

    def consistent(self, lits, ctx):
        if lits_by_payload(lits) is None:
            return False
        return all(interval_ok(lo, hi) for lo, hi in bounds(lits).values())

    def labelings(self, atoms, ctx):
        # each variable's value falls in one of the intervals cut by its thresholds
        by_var: dict[str, list[int]] = {}
        for a in atoms:
            by_var.setdefault(a.payload.var, []).append(a.payload.n)
        reps = {}
        for v, ns in by_var.items():
            cuts = sorted(set(ns))
            reps[v] = [0] + [n + 1 for n in cuts]
        vs = sorted(reps)
        out = []
        for combo in itertools.product(*(reps[v] for v in vs)):
            val = dict(zip(vs, combo))
            out.append(tuple(val[a.payload.var] > a.payload.n for a in atoms))
        return out

    def reduce_lits(self, lits, ctx):
        lo: dict = {}  # var -> largest n with x>n asserted
        hi: dict = {}  # var -> smallest n with ~(x>n) asserted
        rest = []
        for t in lits:
            neg = t.kind != TEST
            p = (t.args[0] if neg else t).payload
            if not isinstance(p, Gt):
                rest.append(t)
                continue
            d = hi if neg else lo
            if p.var not in d or (p.n < d[p.var].payload.n if neg else p.n > d[p.var].payload.n):
                d[p.var] = t.args[0] if neg else t
        for v, g in lo.items():
            if v in hi and g.payload.n >= hi[v].payload.n:
                return None
        st = ctx.store
        return rest + list(lo.values()) + [st.neg(g) for g in hi.values()]

    def pred(self, p, trace, ctx):
        return sget(trace[-1][0], p.var, 0) > p.n

    def act(self, p, state, ctx):
        if isinstance(p, Inc):
            return sset(state, p.var, sget(state, p.var, 0) + 1)
        return sset(state, p.var, p.n)

    def states(self, ctx, budget):
        vs = uset(ctx.universe, "incnat.vars")
        return assignments(vs, lambda _: range(budget.states + 1))

    # parsing: x>n, x<n, x<=n, x>=n, x=n, x:=n, inc(x)
    def parse_call(self, head, args, P):
        if head == "inc" and len(args) == 1:
            v = P.text(args[0])
            if is_ident(v):
                return P.eng.act(Inc(v))
        return None

    def parse_infix(self, lhs, op, rhs, P):
        if not (is_ident(lhs) and is_int(rhs)):
            return None
        n = int(rhs)
        return self.compare(P.eng, lhs, op, n)

    def compare(self, eng, x, op, n):
        st = eng.store
        gt = lambda k: st.test(Gt(x, k))
        if op == ">":
            return gt(n)
        if op == ">=":
            return st.one if n == 0 else gt(n - 1)
        if op == "<":
            return st.zero if n == 0 else st.neg(gt(n - 1))
        if op == "<=":
            return st.neg(gt(n))
        if op == "=":
            return eq_test(eng, x, n)
        if op == ":=":
            return eng.act(Assign(x, n))
        return None

    # expression hooks used by Set and Map: e ::= n | x
    def eq(self, eng, e, c):
        st = eng.store
        if isinstance(e, int):
            return st.one if e == c else st.zero
        return eq_test(eng, e, c)

    def note_var(self, universe, v):
        add_to(universe, "incnat.vars", v)

    def eval_expr(self, e, state):
        return e if isinstance(e, int) else sget(state, e, 0)

    def sample_tests(self, ctx, rng):
        return [Gt(v, n) for v in ("x", "y") for n in range(4)]

    def sample_actions(self, ctx, rng):
        return [Inc("x"), Inc("y"), Assign("x", 0), Assign("x", 2), Assign("y", 3)]


def eq_test(eng, x, n):
    """x = n as a test over x>k literals."""
    st = eng.store
    if n == 0:
        return st.neg(st.test(Gt(x, 0)))
    return eng.conj(st.test(Gt(x, n - 1)), st.neg(st.test(Gt(x, n))))


register_theory("incnat", IncNat)
