"""Disjoint product of two theories: actions of one side commute with tests of the other."""
from __future__ import annotations

import itertools

from ..theory import Theory, TheoryError, register_theory


class Prod(Theory):
    def __init__(self, left: Theory, right: Theory):
        lt = set(left.test_types + left.action_types)
        rt = set(right.test_types + right.action_types)
        if lt & rt:
            raise TheoryError("product sides must be disjoint theories")
        self.left, self.right = left, right
        self.name = f"prod({left.name},{right.name})"
        self.test_types = left.test_types + right.test_types
        self.action_types = left.action_types + right.action_types
        self.has_model = left.has_model and right.has_model

    def owns(self, p):
        return self.left.owns(p) or self.right.owns(p)

    def side(self, p) -> int:
        if self.left.owns(p):
            return 0
        if self.right.owns(p):
            return 1
        raise TheoryError(f"payload {p!r} belongs to neither side of {self.name}")

    def parts(self):
        return self.left.parts() + self.right.parts()

    def _th(self, i):
        return self.left if i == 0 else self.right

    def observe(self, p, universe):
        return self._th(self.side(p)).observe(p, universe)

    def sub(self, p, ctx):
        return self._th(self.side(p)).sub(p, ctx)

    def push_back(self, act, test, ctx):
        i, j = self.side(act), self.side(test)
        if i != j:
            return [ctx.store.test(test)]
        return self._th(i).push_back(act, test, ctx)

    def _split(self, lits):
        l, r = [], []
        for p, v in lits:
            (l if self.side(p) == 0 else r).append((p, v))
        return l, r

    def reduce_lits(self, lits, ctx):
        lits = self.left.reduce_lits(lits, ctx)
        return None if lits is None else self.right.reduce_lits(lits, ctx)

    def consistent(self, lits, ctx):
        l, r = self._split(lits)
        return self.left.consistent(l, ctx) and self.right.consistent(r, ctx)

    def labelings(self, atoms, ctx):
        li = [i for i, a in enumerate(atoms) if self.side(a.payload) == 0]
        ri = [i for i, a in enumerate(atoms) if self.side(a.payload) == 1]
        ls = self.left.labelings([atoms[i] for i in li], ctx)
        rs = self.right.labelings([atoms[i] for i in ri], ctx)
        out = []
        for a, b in itertools.product(ls, rs):
            lab = [False] * len(atoms)
            for i, v in zip(li, a):
                lab[i] = v
            for i, v in zip(ri, b):
                lab[i] = v
            out.append(tuple(lab))
        return out

    def pred(self, p, trace, ctx):
        i = self.side(p)
        proj = tuple((s[i], lab) for s, lab in trace)
        return self._th(i).pred(p, proj, ctx)

    def act(self, p, state, ctx):
        i = self.side(p)
        s = list(state)
        s[i] = self._th(i).act(p, s[i], ctx)
        return tuple(s)

    def states(self, ctx, budget):
        return list(itertools.product(self.left.states(ctx, budget), self.right.states(ctx, budget)))

    def parse_call(self, head, args, P):
        r = self.left.parse_call(head, args, P)
        return r if r is not None else self.right.parse_call(head, args, P)

    def parse_infix(self, lhs, op, rhs, P):
        r = self.left.parse_infix(lhs, op, rhs, P)
        return r if r is not None else self.right.parse_infix(lhs, op, rhs, P)

    def parse_word(self, word, P):
        r = self.left.parse_word(word, P)
        return r if r is not None else self.right.parse_word(word, P)

    def sample_tests(self, ctx, rng):
        return self.left.sample_tests(ctx, rng) + self.right.sample_tests(ctx, rng)

    def sample_actions(self, ctx, rng):
        return self.left.sample_actions(ctx, rng) + self.right.sample_actions(ctx, rng)


register_theory("prod", Prod, arity=2)
