"""Tracing NetKAT: field tests ``f=v`` and field writes ``f<-v``.

Values are opaque words.  With no declared value universe each field ranges
over the values mentioned for it plus one fresh value.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..theory import Theory, TheoryError, register_theory
from .base import add_to, assignments, is_ident, is_int, lits_by_payload, sget, sset, uset

FRESH = "_"


@dataclass(frozen=True)
class FieldEq:
    field: str
    value: str
    level = 0

    def key(self):
        return (self.field, self.value)

    def __str__(self):
        return f"{self.field}={self.value}"


@dataclass(frozen=True)
class FieldMod:
    field: str
    value: str

    def key(self):
        return (self.field, self.value)

    def __str__(self):
        return f"{self.field}<-{self.value}"


class NetKAT(Theory):
    name = "netkat"
    test_types = (FieldEq,)
    action_types = (FieldMod,)

    def __init__(self, values: Optional[dict] = None):
        # values: optional closed universe field -> list of values
        self.declared = {f: tuple(vs) for f, vs in (values or {}).items()}

    def observe(self, p, universe):
        if isinstance(p, (FieldEq, FieldMod)):
            if self.declared and p.value not in self.declared.get(p.field, ()):
                raise TheoryError(f"undeclared field/value: {p.field}={p.value}")
            add_to(universe, "netkat.fields", p.field)
            add_to(universe, f"netkat.vals.{p.field}", p.value)
        return False

    def domain(self, ctx, f):
        if f in self.declared:
            return list(self.declared[f])
        return sorted(uset(ctx.universe, f"netkat.vals.{f}")) + [FRESH]

    def push_back(self, act, test, ctx):
        st = ctx.store
        if act.field != test.field:
            return [st.test(test)]
        return [st.one if act.value == test.value else st.zero]

    def consistent(self, lits, ctx):
        seen = lits_by_payload(lits)
        if seen is None:
            return False
        by_field: dict = {}
        for p, v in seen.items():
            pos, neg = by_field.setdefault(p.field, (set(), set()))
            (pos if v else neg).add(p.value)
        for f, (pos, neg) in by_field.items():
            if len(pos) > 1 or pos & neg:
                return False
            if not pos and f in self.declared and set(self.declared[f]) <= neg:
                return False
        return True

    def pred(self, p, trace, ctx):
        return sget(trace[-1][0], p.field, FRESH) == p.value

    def act(self, p, state, ctx):
        return sset(state, p.field, p.value)

    def states(self, ctx, budget):
        fs = set(uset(ctx.universe, "netkat.fields")) | set(self.declared)
        return assignments(fs, lambda f: self.domain(ctx, f))

    def parse_infix(self, lhs, op, rhs, P):
        if op in ("=", "<-") and is_ident(lhs) and (is_ident(rhs) or is_int(rhs)):
            if rhs in ("true", "false"):
                return None
            cls = FieldEq if op == "=" else FieldMod
            p = cls(lhs, rhs)
            return P.eng.test(p) if op == "=" else P.eng.act(p)
        return None

    def sample_tests(self, ctx, rng):
        return [FieldEq(f, v) for f in ("sw", "pt") for v in ("1", "2")]

    def sample_actions(self, ctx, rng):
        return [FieldMod(f, v) for f in ("sw", "pt") for v in ("1", "2", "3")]


register_theory("netkat", NetKAT)
