"""Bit vectors: ``b=true`` tests and ``set(b)`` / ``unset(b)`` actions."""
from __future__ import annotations

from dataclasses import dataclass

from ..theory import Theory, register_theory
from .base import add_to, assignments, is_ident, lits_by_payload, sget, sset, uset


@dataclass(frozen=True)
class BitTest:
    var: str
    level = 0

    def key(self):
        return (self.var,)

    def __str__(self):
        return f"{self.var}=true"


@dataclass(frozen=True)
class BitSet:
    var: str
    value: bool

    def key(self):
        return (self.var, self.value)

    def __str__(self):
        return f"{'set' if self.value else 'unset'}({self.var})"


class BitVec(Theory):
    name = "bitvec"
    test_types = (BitTest,)
    action_types = (BitSet,)

    def observe(self, p, universe):
        if isinstance(p, (BitTest, BitSet)):
            add_to(universe, "bitvec.vars", p.var)
        return False

    def push_back(self, act, test, ctx):
        st = ctx.store
        if act.var == test.var:
            return [st.one if act.value else st.zero]
        return [st.test(test)]

    def consistent(self, lits, ctx):
        return lits_by_payload(lits) is not None

    def labelings(self, atoms, ctx):
        import itertools

        return list(itertools.product((False, True), repeat=len(atoms)))

    def pred(self, p, trace, ctx):
        return bool(sget(trace[-1][0], p.var, False))

    def act(self, p, state, ctx):
        return sset(state, p.var, p.value)

    def states(self, ctx, budget):
        vs = uset(ctx.universe, "bitvec.vars")
        return assignments(vs, lambda _: (False, True))

    def parse_call(self, head, args, P):
        if head in ("set", "unset") and len(args) == 1:
            v = P.text(args[0])
            if is_ident(v):
                return P.eng.act(BitSet(v, head == "set"))
        return None

    def parse_infix(self, lhs, op, rhs, P):
        if op == "=" and is_ident(lhs) and rhs in ("true", "false"):
            t = P.eng.test(BitTest(lhs))
            return t if rhs == "true" else P.eng.store.neg(t)
        return None

    def sample_tests(self, ctx, rng):
        return [BitTest(v) for v in ("a", "b", "c")]

    def sample_actions(self, ctx, rng):
        return [BitSet(v, b) for v in ("a", "b", "c") for b in (True, False)]


register_theory("bitvec", BitVec)
