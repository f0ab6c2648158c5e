"""Unbounded sets of naturals: ``in(x,c)``, ``insert(x,e)``, ``remove(x,e)``.

Expressions e are natural constants or IncNat variables; the expression
theory supplies the ``e=c`` tests that pushback produces.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Union

from ..theory import Theory, TheoryError, register_theory
from .base import add_to, neg_sub, is_ident, is_int, lits_by_payload, sget, uset
from .incnat import IncNat

Expr = Union[int, str]


def parse_expr(s: str):
    if is_int(s):
        return int(s)
    if is_ident(s):
        return s
    return None


def neg_test(st, t):
    if t.kind == 1:  # ONE
        return st.zero
    if t.kind == 0:
        return st.one
    return st.neg(t)


@dataclass(frozen=True)
class In:
    var: str
    c: int
    level = 1

    def key(self):
        return (self.var, self.c)

    def __str__(self):
        return f"in({self.var},{self.c})"


@dataclass(frozen=True)
class Insert:
    var: str
    e: Expr

    def key(self):
        return (self.var, str(self.e))

    def __str__(self):
        return f"insert({self.var},{self.e})"


@dataclass(frozen=True)
class Remove:
    var: str
    e: Expr

    def key(self):
        return (self.var, str(self.e))

    def __str__(self):
        return f"remove({self.var},{self.e})"


class SetTheory(Theory):
    def __init__(self, inner: Theory = None):
        self.inner = inner or IncNat()
        if not all(hasattr(self.inner, h) for h in ("eq", "note_var", "eval_expr")):
            raise TheoryError(f"set needs an expression theory such as incnat, not {self.inner.name}")
        self.name = f"set({self.inner.name})"
        self.test_types = (In,) + self.inner.test_types
        self.action_types = (Insert, Remove) + self.inner.action_types

    def mine(self, p):
        return isinstance(p, (In, Insert, Remove))

    def owns(self, p):
        return self.mine(p) or self.inner.owns(p)

    def observe(self, p, universe):
        if isinstance(p, In):
            add_to(universe, "set.vars", p.var)
            return add_to(universe, f"set.consts.{p.var}", p.c)
        if isinstance(p, (Insert, Remove)):
            add_to(universe, "set.vars", p.var)
            ch = add_to(universe, f"set.exprs.{p.var}", p.e)
            if isinstance(p.e, str):
                self.inner.note_var(universe, p.e)
            return ch
        return self.inner.observe(p, universe)

    def sub(self, p, ctx):
        if not isinstance(p, In):
            return self.inner.sub(p, ctx)
        st = ctx.store
        out = {st.test(p)}
        for e in sorted(uset(ctx.universe, f"set.exprs.{p.var}"), key=str):
            out |= neg_sub(ctx, self.inner.eq(ctx, e, p.c))
        return out

    def push_back(self, act, test, ctx):
        st = ctx.store
        if not self.mine(act):
            if isinstance(test, In):
                return [st.test(test)]
            return self.inner.push_back(act, test, ctx)
        if not isinstance(test, In) or test.var != act.var:
            return [st.test(test)]
        eq = self.inner.eq(ctx, act.e, test.c)
        if isinstance(act, Insert):
            return [eq, st.test(test)]
        return [ctx.conj(neg_test(st, eq), st.test(test))]

    def _split(self, lits):
        a, b = [], []
        for p, v in lits:
            (a if isinstance(p, In) else b).append((p, v))
        return a, b

    def reduce_lits(self, lits, ctx):
        return self.inner.reduce_lits(lits, ctx)

    def consistent(self, lits, ctx):
        mine, rest = self._split(lits)
        return lits_by_payload(mine) is not None and self.inner.consistent(rest, ctx)

    def labelings(self, atoms, ctx):
        mi = [i for i, a in enumerate(atoms) if isinstance(a.payload, In)]
        ri = [i for i, a in enumerate(atoms) if not isinstance(a.payload, In)]
        rs = self.inner.labelings([atoms[i] for i in ri], ctx)
        out = []
        for free in itertools.product((False, True), repeat=len(mi)):
            for r in rs:
                lab = [False] * len(atoms)
                for i, v in zip(mi, free):
                    lab[i] = v
                for i, v in zip(ri, r):
                    lab[i] = v
                out.append(tuple(lab))
        return out

    # state = (sets, inner) with sets a sorted tuple of (var, frozenset)
    def pred(self, p, trace, ctx):
        sets, _ = trace[-1][0]
        if isinstance(p, In):
            return p.c in sget(sets, p.var, frozenset())
        return self.inner.pred(p, tuple((s[1], l) for s, l in trace), ctx)

    def act(self, p, state, ctx):
        sets, inner = state
        if not self.mine(p):
            return (sets, self.inner.act(p, inner, ctx))
        v = self.inner.eval_expr(p.e, inner)
        cur = sget(sets, p.var, frozenset())
        new = cur | {v} if isinstance(p, Insert) else cur - {v}
        d = dict(sets)
        d[p.var] = frozenset(new)
        return (tuple(sorted(d.items())), inner)

    def states(self, ctx, budget):
        inner = self.inner.states(ctx, budget)
        vs = sorted(uset(ctx.universe, "set.vars"))
        per_var = []
        for v in vs:
            cs = sorted(uset(ctx.universe, f"set.consts.{v}"))
            subsets = [frozenset(c) for k in range(len(cs) + 1) for c in itertools.combinations(cs, k)]
            per_var.append(subsets)
        out = []
        for combo in itertools.product(*per_var):
            sets = tuple(zip(vs, combo))
            out.extend((sets, s) for s in inner)
        return out

    def parse_call(self, head, args, P):
        if head in ("in", "insert", "remove") and len(args) == 2:
            x, e = P.text(args[0]), parse_expr(P.text(args[1]))
            if not is_ident(x) or e is None:
                return None
            if head == "in":
                return P.eng.test(In(x, e)) if isinstance(e, int) else None
            return P.eng.act((Insert if head == "insert" else Remove)(x, e))
        return self.inner.parse_call(head, args, P)

    def parse_infix(self, lhs, op, rhs, P):
        return self.inner.parse_infix(lhs, op, rhs, P)

    def parse_word(self, word, P):
        return self.inner.parse_word(word, P)

    def sample_tests(self, ctx, rng):
        return [In("s", c) for c in (0, 1, 2)] + [In("t", 1)] + self.inner.sample_tests(ctx, rng)

    def sample_actions(self, ctx, rng):
        return [Insert("s", "x"), Insert("s", 1), Remove("s", "x"), Remove("s", 2), Insert("t", "y")] + [
            a for a in self.inner.sample_actions(ctx, rng)
        ]


register_theory("set", SetTheory, arity=1)
