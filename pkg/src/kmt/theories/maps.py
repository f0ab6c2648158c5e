"""Unbounded maps of naturals: reads ``x[e]=c`` and writes ``x[c]:=e``.

Writes use constant keys and expression values; reads use expression keys
and constant values.  Unwritten keys hold a default that no constant equals.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass

from ..theory import Theory, TheoryError, register_theory
from .base import add_to, neg_sub, is_ident, is_int, sget, uset
from .incnat import Gt, IncNat
from .sets import Expr, neg_test, parse_expr

DEFAULT = -1
INDEX = re.compile(r"([A-Za-z_][A-Za-z0-9_']*)\[([A-Za-z0-9_']+)\]\Z")


@dataclass(frozen=True)
class Read:
    var: str
    e: Expr
    c: int
    level = 1

    def key(self):
        return (self.var, str(self.e), self.c)

    def __str__(self):
        return f"{self.var}[{self.e}]={self.c}"


@dataclass(frozen=True)
class Write:
    var: str
    c: int
    e: Expr

    def key(self):
        return (self.var, self.c, str(self.e))

    def __str__(self):
        return f"{self.var}[{self.c}]:={self.e}"


class MapTheory(Theory):
    def __init__(self, inner: Theory = None):
        self.inner = inner or IncNat()
        if not all(hasattr(self.inner, h) for h in ("eq", "note_var", "eval_expr")):
            raise TheoryError(f"map needs an expression theory such as incnat, not {self.inner.name}")
        self.name = f"map({self.inner.name})"
        self.test_types = (Read,) + self.inner.test_types
        self.action_types = (Write,) + self.inner.action_types

    def mine(self, p):
        return isinstance(p, (Read, Write))

    def owns(self, p):
        return self.mine(p) or self.inner.owns(p)

    def observe(self, p, universe):
        if isinstance(p, Read):
            add_to(universe, "map.vars", p.var)
            add_to(universe, f"map.consts.{p.var}", p.c)
            if isinstance(p.e, str):
                self.inner.note_var(universe, p.e)
            return add_to(universe, f"map.rkeys.{p.var}", p.e)
        if isinstance(p, Write):
            add_to(universe, "map.vars", p.var)
            if isinstance(p.e, str):
                self.inner.note_var(universe, p.e)
            a = add_to(universe, f"map.keys.{p.var}", p.c)
            b = add_to(universe, f"map.vals.{p.var}", p.e)
            return a or b
        return self.inner.observe(p, universe)

    def sub(self, p, ctx):
        if not isinstance(p, Read):
            return self.inner.sub(p, ctx)
        st = ctx.store
        eq = lambda e, c: self.inner.eq(ctx, e, c)
        out = {st.test(p)}
        for c in sorted(uset(ctx.universe, f"map.keys.{p.var}")):
            out |= neg_sub(ctx, eq(p.e, c))
        for e in sorted(uset(ctx.universe, f"map.vals.{p.var}"), key=str):
            out |= neg_sub(ctx, eq(e, p.c))
        return out

    def push_back(self, act, test, ctx):
        st = ctx.store
        if not self.mine(act):
            if isinstance(test, Read):
                if isinstance(test.e, str) and getattr(act, "var", None) == test.e:
                    # no table entry: the key read afterwards is not the key read before
                    raise TheoryError(f"{act} changes the key of {test}; reads keyed by a variable need it fixed")
                return [st.test(test)]
            return self.inner.push_back(act, test, ctx)
        if not isinstance(test, Read) or test.var != act.var:
            return [st.test(test)]
        hit = self.inner.eq(ctx, test.e, act.c)
        val = self.inner.eq(ctx, act.e, test.c)
        return [ctx.conj(hit, val), ctx.conj(neg_test(st, hit), st.test(test))]

    def _split(self, lits):
        a, b = [], []
        for p, v in lits:
            (a if isinstance(p, Read) else b).append((p, v))
        return a, b

    def reduce_lits(self, lits, ctx):
        return self.inner.reduce_lits(lits, ctx)

    def consistent(self, lits, ctx):
        reads, rest = self._split(lits)
        if not reads:
            return self.inner.consistent(rest, ctx)
        kvars = sorted({p.e for p, _ in reads if isinstance(p.e, str)})
        if not kvars:
            return self.inner.consistent(rest, ctx) and self._reads_ok(reads, {})
        consts = [p.n for p, _ in rest if isinstance(p, Gt)]
        consts += [p.e for p, _ in reads if isinstance(p.e, int)]
        top = max(consts, default=0) + 1 + len(kvars)
        fixed = [(p, v) for p, v in rest if not (isinstance(p, Gt) and p.var in kvars)]
        pinned = [(p, v) for p, v in rest if isinstance(p, Gt) and p.var in kvars]
        if not self.inner.consistent(fixed, ctx):
            return False
        for vals in itertools.product(range(top + 1), repeat=len(kvars)):
            env = dict(zip(kvars, vals))
            if all((env[p.var] > p.n) == v for p, v in pinned) and self._reads_ok(reads, env):
                return True
        return False

    def _reads_ok(self, reads, env):
        pos: dict = {}
        neg: dict = {}
        for p, v in reads:
            k = (p.var, p.e if isinstance(p.e, int) else env[p.e])
            if v:
                if pos.setdefault(k, p.c) != p.c:
                    return False
            else:
                neg.setdefault(k, set()).add(p.c)
        return all(c not in neg.get(k, ()) for k, c in pos.items())

    # state = (maps, inner) with maps a sorted tuple of (var, sorted items)
    def pred(self, p, trace, ctx):
        maps, inner = trace[-1][0]
        if isinstance(p, Read):
            k = self.inner.eval_expr(p.e, inner)
            return dict(sget(maps, p.var, ())).get(k, DEFAULT) == p.c
        return self.inner.pred(p, tuple((s[1], l) for s, l in trace), ctx)

    def act(self, p, state, ctx):
        maps, inner = state
        if not self.mine(p):
            return (maps, self.inner.act(p, inner, ctx))
        v = self.inner.eval_expr(p.e, inner)
        m = dict(sget(maps, p.var, ()))
        m[p.c] = v
        d = dict(maps)
        d[p.var] = tuple(sorted(m.items()))
        return (tuple(sorted(d.items())), inner)

    def states(self, ctx, budget):
        inner = self.inner.states(ctx, budget)
        U = ctx.universe
        vs = sorted(uset(U, "map.vars"))
        per_var = []
        for v in vs:
            keys = set(uset(U, f"map.keys.{v}"))
            keys |= {e for e in uset(U, f"map.rkeys.{v}") if isinstance(e, int)}
            if any(isinstance(e, str) for e in uset(U, f"map.rkeys.{v}")):
                keys |= set(range(budget.states + 1))
            vals = sorted(uset(U, f"map.consts.{v}")) + [DEFAULT]
            keys = sorted(keys)
            contents = []
            for combo in itertools.product(vals, repeat=len(keys)):
                contents.append(tuple((k, c) for k, c in zip(keys, combo) if c != DEFAULT))
                if len(contents) > budget.max_states:
                    break
            per_var.append(contents)
        out = []
        for combo in itertools.product(*per_var):
            maps = tuple(zip(vs, combo))
            out.extend((maps, s) for s in inner)
        if len(out) > budget.max_states:
            rng = random.Random(budget.seed)
            out = rng.sample(out, budget.max_states)
        return out

    def parse_infix(self, lhs, op, rhs, P):
        m = INDEX.match(lhs)
        if m:
            x, k = m.group(1), parse_expr(m.group(2))
            if op == "=" and is_int(rhs) and k is not None:
                return P.eng.test(Read(x, k, int(rhs)))
            if op == ":=" and isinstance(k, int):
                e = parse_expr(rhs)
                if e is not None:
                    return P.eng.act(Write(x, k, e))
            return None
        return self.inner.parse_infix(lhs, op, rhs, P)

    def parse_call(self, head, args, P):
        return self.inner.parse_call(head, args, P)

    def parse_word(self, word, P):
        return self.inner.parse_word(word, P)

    def sample_tests(self, ctx, rng):
        return [Read("m", "x", 1), Read("m", 0, 2), Read("m", "x", 2), Read("n", 1, 1)] + self.inner.sample_tests(ctx, rng)[:4]

    def sample_actions(self, ctx, rng):
        # inner actions may not touch read-key variables (x here), so only y moves
        inner = [a for a in self.inner.sample_actions(ctx, rng) if getattr(a, "var", None) != "x"]
        return [Write("m", 1, "x"), Write("m", 0, 2), Write("m", 2, "y"), Write("n", 1, 1)] + inner[:3]


register_theory("map", MapTheory, arity=1)
