"""Pushback normalization.

``normalize`` turns any term into a set of ``(test, restricted action)``
pairs.  The work happens in ``pb_dot`` (push a test back through a
restricted action) and ``pb_star`` (star of a normal form); the other
relations are thin wrappers.
"""
from __future__ import annotations

from . import ordering
from .ordering import NF, lt, leq, mt_nf, split
from .solver import satisfiable
from .terms import ACT, NOT, ONE, PLUS, SEQ, STAR, TEST, ZERO, Term, nnf


class FuelExhausted(RuntimeError):
    pass


class PushbackCycle(RuntimeError):
    pass


EMPTY = NF()


def spine(m: Term) -> int:
    n = 1
    while m.kind == SEQ:
        m = m.args[1]
        n += 1
    return n


class Normalizer:
    def __init__(self, eng, fuel: int = 10**6, debug: bool = False):
        self.eng = eng
        self.st = eng.store
        self.fuel = fuel
        self.debug = debug
        self.violations: list[str] = []
        self.dot_memo: dict = {}
        self.star_memo: dict = {}
        self._active: set = set()

    def _burn(self, n: int = 1):
        self.fuel -= n
        if self.fuel < 0:
            raise FuelExhausted("normalization fuel exhausted; run validate-theory on the theory")

    def _check(self, ok: bool, what):
        if self.debug and not ok:
            self.violations.append(what())

    # -- helpers ----------------------------------------------------------
    def prune(self, pairs, sat: bool = True) -> frozenset:
        eng = self.eng
        out = []
        for a, m in pairs:
            self._burn()
            if a.kind == ZERO or m.kind == ZERO:
                continue
            if sat and a.kind != ONE and not satisfiable(eng, a):
                continue
            out.append((a, m))
        return NF(out)

    def guard(self, a: Term, x) -> frozenset:
        """a·x for a test a and a normal form x."""
        conj = self.eng.conj
        return self.prune((conj(a, b), m) for b, m in x)

    def then(self, x, n: Term) -> frozenset:
        """x·n for a normal form x and restricted action n."""
        seq = self.st.seq
        for _, m in x:
            self._burn(spine(m))  # re-associating m walks its ; spine
        return NF((a, seq(m, n)) for a, m in x)

    # -- top level ----------------------------------------------------------
    def normalize(self, p: Term) -> frozenset:
        st = self.st
        k = p.kind
        self._burn()
        if k == ZERO:
            return EMPTY
        if k == ONE:
            return NF(((st.one, st.one),))
        if k == TEST:
            return self.prune(((p, st.one),))
        if p.is_test:
            # literal products keep clashes visible to conj
            return self.prune((d, st.one) for d in self.eng.dnf(nnf(p)))
        if k == ACT:
            return NF(((st.one, p),))
        if k == PLUS:
            out = set()
            for c in p.args:
                out |= self.normalize(c)
            return NF(out)
        if k == SEQ:
            return self.pb_join(self.normalize(p.args[0]), self.normalize(p.args[1]))
        if k == STAR:
            return self.pb_star(self.normalize(p.args[0]))
        raise ValueError(p)

    # -- lifted relations -----------------------------------------------------
    def pb_restricted(self, m: Term, x) -> frozenset:
        out = set()
        for a, n in x:
            out |= self.then(self.pb_dot(m, a), n)
        r = NF(out)
        self.debug and self._check(leq(self.eng, r, x), lambda: f"PBR: {m}·x not ⪯ x")
        return r

    def pb_test(self, x, a: Term) -> frozenset:
        conj = self.eng.conj
        out = []
        for b, m in x:
            for c, l in self.pb_dot(m, a):
                out.append((conj(b, c), l))
        return self.prune(out)

    def pb_join(self, x, y) -> frozenset:
        conj = self.eng.conj
        seq = self.st.seq
        out = []
        for a, m in x:
            for b, n in y:
                for c, l in self.pb_dot(m, b):
                    self._burn(spine(l))
                    out.append((conj(a, c), seq(l, n)))
        return self.prune(out)

    # -- pushing a test through a restricted action ------------------------
    def pb_dot(self, m: Term, a: Term) -> frozenset:
        key = (m.id, a.id)
        r = self.dot_memo.get(key)
        if r is not None:
            return r
        if key in self._active:
            raise PushbackCycle(
                f"pushback of {a} through {m} re-entered itself; run validate-theory on the theory"
            )
        self._active.add(key)
        try:
            r = self._pb_dot(m, a)
        finally:
            self._active.discard(key)
        self.debug and self._check(leq(self.eng, r, a), lambda: f"PBdot: {m}·{a} result not ⪯ {a}")
        self.dot_memo[key] = r
        return r

    def _pb_dot(self, m: Term, a: Term) -> frozenset:
        self._burn()
        st = self.st
        eng = self.eng
        if a.kind == ZERO or m.kind == ZERO:
            return EMPTY
        if a.kind == ONE:
            return NF(((st.one, m),))
        if m.kind == ONE:
            return self.prune(((a, st.one),))
        if a.kind == NOT and a.args[0].kind != TEST:
            return self.pb_dot(m, nnf(a))
        # action shape first
        if m.kind == SEQ:
            x = self.pb_dot(m.args[1], a)
            return self.pb_restricted(m.args[0], x)
        if m.kind == PLUS:
            out = set()
            for c in m.args:
                out |= self.pb_dot(c, a)
            return NF(out)
        if m.kind == STAR and a.kind == SEQ:
            # a conjunction that survives the loop body whole is an invariant
            # candidate; decomposing it first can revisit it through m
            r = self._pb_star_conj(m, a)
            if r is not None:
                return r
        # then test shape
        if a.kind == SEQ:
            y = self.pb_dot(m, a.args[0])
            return self.pb_test(y, a.args[1])
        if a.kind == PLUS:
            out = set()
            for c in a.args:
                out |= self.pb_dot(m, c)
            return NF(out)
        if m.kind == STAR:
            return self._pb_star_action(m, a)
        if m.kind != ACT:
            raise ValueError(f"not a restricted action: {m}")
        if a.kind == TEST:
            # no satisfiability pruning here: for temporal atoms it would need
            # this very pushback to build the reachable labelings
            res = eng.theory.push_back(m.payload, a.payload, eng)
            # compound results such as ~(e=c) are split into literal products
            return self.prune(((d, m) for b in res for d in eng.dnf(nnf(b))), sat=False)
        # PrimNeg: negate the pushed-back sum, split into literal products
        pos = self.pb_dot(m, a.args[0])
        b = nnf(st.neg(st.sum(c for c, _ in pos)))
        return self.prune((d, m) for d in eng.dnf(b))

    def _pb_star_action(self, m: Term, a: Term) -> frozenset:
        eng = self.eng
        st = self.st
        inner = m.args[0]
        x = self.pb_dot(inner, a)
        if lt(eng, x, a):
            # SeqStarSmaller: m*·a ≡ a + m*·x
            y = self.pb_restricted(m, x)
            return self.prune({(a, st.one)} | y)
        # SeqStarInv with m·a ≡ a·t + u:  m*·a ≡ a·t* + m*·u·t*
        if a in mt_nf(eng, x):
            t, u = split(eng, x, a)
        else:
            t, u = EMPTY, x
        y = self.pb_star(t)
        X = self.pb_restricted(m, u)
        z = self.pb_join(X, y)
        return NF(self.guard(a, y) | z)

    def _pb_star_conj(self, m: Term, a: Term):
        """SeqStarInv for a conjunction a, or None when x has no a-summand."""
        eng = self.eng
        parts = set(ordering.seqs(a))
        x = self.pb_dot(m.args[0], a)
        t, u = [], []
        for b, n in x:
            bs = ordering.seqs(b)
            if parts <= set(bs):
                t.append((eng.conj_list(c for c in bs if c not in parts), n))
            else:
                u.append((b, n))
        if not t:
            return None
        t, u = NF(t), NF(u)
        y = self.pb_star(t)
        z = self.pb_join(self.pb_restricted(m, u), y)
        return NF(self.guard(a, y) | z)

    # -- star of a normal form --------------------------------------------------
    def pb_star(self, x) -> frozenset:
        # (a + x)* = x* for a test a, so summands without an action drop out
        x = self.prune((a, m) for a, m in x if m.kind != ONE)
        r = self.star_memo.get(x)
        if r is not None:
            return r
        r = self._pb_star(x)
        self.debug and self._check(leq(self.eng, r, x), lambda: "PB*: result not ⪯ argument")
        self.star_memo[x] = r
        return r

    def _pb_star(self, x) -> frozenset:
        self._burn()
        st = self.st
        eng = self.eng
        if not x:
            return NF(((st.one, st.one),))
        if all(a.kind == ONE for a, _ in x):
            body = st.sum(m for _, m in x)
            # p** = p*, which keeps nested loops from growing star towers
            return NF(((st.one, body if body.kind == STAR else st.star(body)),))
        cands = [c for c in mt_nf(eng, x) if c.kind not in (ONE, ZERO)]
        a = cands[0]
        x1, x2 = split(eng, x, a)
        if not x2:
            return self.star_single(a, x1)
        # Denest: (a·x1 + x2)* ≡ x2*·(a·x1·x2*)*
        self.debug and self._check(lt(eng, x2, x), lambda: "Denest: remainder not ≺ x")
        y1 = self.pb_star(x2)
        x1p = self.pb_join(x1, y1)
        z = self.star_single(a, x1p)
        return self.pb_join(y1, z)

    def star_single(self, a: Term, x1) -> frozenset:
        """(a·x1)* ≡ 1 + a·(x1·a)*·x1, with (x1·a) split around a."""
        eng = self.eng
        st = self.st
        key = ("single", a.id, x1)
        r = self.star_memo.get(key)
        if r is not None:
            return r
        self._burn()
        w = self.pb_test(x1, a)
        if a in mt_nf(eng, w):
            t, u = split(eng, w, a)
            w = NF(t | u)
        # measured on the unpruned product a·x1
        self.debug and self._check(
            ordering.measure(eng, w) < ordering.sub(eng, a) | ordering.measure(eng, x1),
            lambda: f"Slide/Expand: loop body not ≺ ({a}·x)",
        )
        y = self.pb_star(w)
        z = self.pb_join(y, x1)
        r = NF({(st.one, st.one)} | self.guard(a, z))
        self.star_memo[key] = r
        return r


def nf_term(eng, x) -> Term:
    """Read a normal form back as a term."""
    st = eng.store
    return st.sum(st.seq(a, m) for a, m in sorted(x, key=lambda p: (p[0].id, p[1].id)))
