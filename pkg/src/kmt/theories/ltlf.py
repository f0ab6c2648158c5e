"""Past-time LTL on finite traces over any inner theory.

Primitives are ``last(a)`` and ``since(a,b)``; ``ever``, ``always``,
``wlast``, ``backto`` and ``start`` are sugar.  Satisfiability of temporal
literals is decided over labelings that some trace can actually reach: start
labelings (nothing happened before) closed under the history actions, which
are the actions mentioned in the engine plus a stutter step.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..terms import ONE, Term, show
from ..theory import Budget, Theory, TheoryError, register_theory
from .base import add_to, lits_by_payload, uset


@dataclass(frozen=True)
class Last:
    a: Term

    @property
    def level(self):
        return self.a.level + 1

    def key(self):
        return (self.a.id,)

    def __str__(self):
        return f"last({show(self.a)})"


@dataclass(frozen=True)
class Since:
    a: Term
    b: Term

    @property
    def level(self):
        return max(self.a.level, self.b.level) + 1

    def key(self):
        return (self.a.id, self.b.id)

    def __str__(self):
        if self.a.kind == ONE:
            return f"ever({show(self.b)})"
        return f"since({show(self.a)}, {show(self.b)})"


@dataclass(frozen=True)
class Noop:
    """Stutter step used only for trace histories."""

    def key(self):
        return ()

    def __str__(self):
        return "noop"


TEMPORAL = (Last, Since)


class LTLf(Theory):
    temporal = True

    def __init__(self, inner: Theory):
        self.inner = inner
        self.name = f"ltlf({inner.name})"
        self.test_types = (Last, Since) + inner.test_types
        self.action_types = (Noop,) + inner.action_types
        self.has_model = inner.has_model

    def owns(self, p):
        return isinstance(p, (Last, Since, Noop)) or self.inner.owns(p)

    def parts(self):
        return [self] + self.inner.parts()

    def observe(self, p, universe):
        if isinstance(p, (Last, Since, Noop)):
            return False
        changed = self.inner.observe(p, universe)
        if isinstance(p, self.inner.action_types):
            changed = add_to(universe, "ltlf.history", p) or changed
        return changed

    def history(self, ctx) -> list:
        hs = sorted(uset(ctx.universe, "ltlf.history"), key=lambda p: (type(p).__name__, p.key()))
        return hs + [Noop()]

    def sub(self, p, ctx):
        st = ctx.store
        if isinstance(p, Last):
            return {st.test(p)} | ctx.sub(p.a)
        if isinstance(p, Since):
            return {st.test(p)} | ctx.sub(p.a) | ctx.sub(p.b)
        return self.inner.sub(p, ctx)

    def push_back(self, act, test, ctx):
        st = ctx.store
        if isinstance(test, Last):
            return [test.a]
        if isinstance(test, Since):
            bs = ctx.pb_dot_tests(act, test.b)
            as_ = ctx.pb_dot_tests(act, test.a)
            me = st.test(test)
            return list(dict.fromkeys(bs + [ctx.conj(a, me) for a in as_]))
        if isinstance(act, Noop):
            return [st.test(test)]
        return self.inner.push_back(act, test, ctx)

    # -- satisfiability over reachable labelings --------------------------
    def realizable(self, atoms, ctx):
        """(space, labels) with labels the reachable labelings over the closure."""
        from ..automata import AtomSpace

        key = ("ltlf.R", frozenset(a.id for a in atoms))
        hit = ctx.theory_cache.get(key)
        if hit is not None:
            return hit
        space = AtomSpace(ctx, atoms, self.history(ctx))
        res = (space, space.reachable(self.start_labelings(space, ctx), self.history(ctx)))
        ctx.theory_cache[key] = res
        return res

    def start_labelings(self, space, ctx) -> list[int]:
        inner_idx = [i for i, a in enumerate(space.atoms) if not isinstance(a.payload, TEMPORAL)]
        temp_idx = [i for i, a in enumerate(space.atoms) if isinstance(a.payload, TEMPORAL)]
        temp_idx.sort(key=lambda i: space.atoms[i].level)
        out = []
        for lab in self.inner.labelings([space.atoms[i] for i in inner_idx], ctx):
            L = 0
            for i, v in zip(inner_idx, lab):
                if v:
                    L |= 1 << i
            for i in temp_idx:
                p = space.atoms[i].payload
                if isinstance(p, Since) and space.eval(p.b, L):
                    L |= 1 << i
            out.append(L)
        return out

    def reduce_lits(self, lits, ctx):
        return self.inner.reduce_lits(lits, ctx)

    def consistent(self, lits, ctx):
        seen = lits_by_payload(lits)
        if seen is None:
            return False
        if not any(isinstance(p, TEMPORAL) for p in seen):
            return self.inner.consistent(list(seen.items()), ctx)
        st = ctx.store
        atoms = [st.test(p) for p in seen]
        space, labels = self.realizable(atoms, ctx)
        want = 0
        mask = 0
        for p, v in seen.items():
            bit = 1 << space.index[st.test(p)]
            mask |= bit
            if v:
                want |= bit
        return any(L & mask == want for L in labels)

    def labelings(self, atoms, ctx):
        if not any(isinstance(a.payload, TEMPORAL) for a in atoms):
            return self.inner.labelings(atoms, ctx)
        space, labels = self.realizable(atoms, ctx)
        idx = [space.index[a] for a in atoms]
        return list(dict.fromkeys(tuple(bool(L >> i & 1) for i in idx) for L in labels))

    # -- state model -----------------------------------------------------------
    def pred(self, p, trace, ctx):
        from ..oracle import holds

        if isinstance(p, Last):
            return len(trace) > 1 and holds(ctx, p.a, trace[:-1])
        if isinstance(p, Since):
            t = trace
            while True:
                if holds(ctx, p.b, t):
                    return True
                if len(t) == 1 or not holds(ctx, p.a, t):
                    return False
                t = t[:-1]
        return self.inner.pred(p, trace, ctx)

    def act(self, p, state, ctx):
        if isinstance(p, Noop):
            return state
        return self.inner.act(p, state, ctx)

    def states(self, ctx, budget):
        return self.inner.states(ctx, budget)

    def initial_traces(self, ctx, budget: Budget):
        hist = self.history(ctx)
        layer = [((s, None),) for s in self.inner.states(ctx, budget)]
        out = list(layer)
        for _ in range(budget.hist_len):
            layer = [t + ((self.act(h, t[-1][0], ctx), h),) for t in layer for h in hist]
            out.extend(layer)
        return out

    # -- parser ------------------------------------------------------------
    def parse_call(self, head, args, P):
        st = P.eng.store
        unary = {"last", "ever", "always", "wlast"}
        binary = {"since", "backto"}
        if head in unary and len(args) == 1:
            a = P.test_arg(args[0])
            if head == "last":
                return P.eng.test(Last(a))
            if head == "ever":
                return P.eng.test(Since(st.one, a))
            if head == "always":
                return st.neg(P.eng.test(Since(st.one, st.neg(a))))
            return st.neg(P.eng.test(Last(st.neg(a))))
        if head in binary and len(args) == 2:
            a, b = P.test_arg(args[0]), P.test_arg(args[1])
            s = P.eng.test(Since(a, b))
            if head == "since":
                return s
            return st.plus(s, st.neg(P.eng.test(Since(st.one, st.neg(a)))))
        return self.inner.parse_call(head, args, P)

    def parse_infix(self, lhs, op, rhs, P):
        return self.inner.parse_infix(lhs, op, rhs, P)

    def parse_word(self, word, P):
        if word == "start":
            st = P.eng.store
            return st.neg(P.eng.test(Last(st.one)))
        return self.inner.parse_word(word, P)

    def sample_tests(self, ctx, rng):
        inner = self.inner.sample_tests(ctx, rng)
        st = ctx.store
        base = [st.test(p) for p in inner[:4]]
        out = list(inner)
        for a in base[:3]:
            out.append(Last(a))
            out.append(Since(st.one, a))
        if len(base) >= 2:
            out.append(Since(base[0], base[1]))
            out.append(Since(st.neg(base[1]), base[0]))
        return out

    def sample_actions(self, ctx, rng):
        return self.inner.sample_actions(ctx, rng)


register_theory("ltlf", LTLf, arity=1)
