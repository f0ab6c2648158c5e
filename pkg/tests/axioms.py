"""Random instances of the KAT axioms, their consequences and the theory tables.

Each generator takes an rng and returns ``(theory, hypotheses, lhs, rhs)``
where every hypothesis is itself an ``(lhs, rhs)`` pair that must hold for
the instance to be meaningful.  Terms are concrete syntax strings, except
for the consequences that need the normalizer to build their premise; those
return engine-independent strings too, built from a scratch engine.
"""
from __future__ import annotations

import random

from gen import POOLS, THEORIES, rand_term, rand_test

from kmt import KMT
from kmt.normal import FuelExhausted
from kmt.ordering import seqs
from kmt.theories.netkat import NetKAT

NETKAT_VALUES = {"f": ["1", "2"], "g": ["1", "2"]}


def engine(theory: str) -> KMT:
    """Engine for an axiom instance; NetKAT gets a closed value universe."""
    if theory == "netkat-closed":
        return KMT(NetKAT(NETKAT_VALUES))
    return KMT(theory)


def _pool_theory(theory: str) -> str:
    return "netkat" if theory == "netkat-closed" else theory


def term(rng, theory, hi=4):
    return rand_term(rng, _pool_theory(theory), rng.randint(1, hi))


def test(rng, theory, hi=3):
    return rand_test(rng, POOLS[_pool_theory(theory)][0], rng.randint(1, hi))


def leq(a: str, b: str) -> tuple[str, str]:
    """a ≤ b, stated as the equation a + b ≡ b."""
    return f"({a}) + ({b})", f"({b})"


# -- Kleene algebra ------------------------------------------------------------
def _ka(shape):
    def gen(rng, theory):
        p, q, r = (term(rng, theory) for _ in range(3))
        lhs, rhs = shape(p, q, r)
        return [], lhs, rhs

    return gen


KA = {
    "KA-Plus-Assoc": _ka(lambda p, q, r: (f"({p}) + (({q}) + ({r}))", f"(({p}) + ({q})) + ({r})")),
    "KA-Plus-Comm": _ka(lambda p, q, r: (f"({p}) + ({q})", f"({q}) + ({p})")),
    "KA-Plus-Zero": _ka(lambda p, q, r: (f"({p}) + false", f"({p})")),
    "KA-Plus-Idem": _ka(lambda p, q, r: (f"({p}) + ({p})", f"({p})")),
    "KA-Seq-Assoc": _ka(lambda p, q, r: (f"({p}); (({q}); ({r}))", f"(({p}); ({q})); ({r})")),
    "KA-Seq-One": _ka(lambda p, q, r: (f"true; ({p})", f"({p})")),
    "KA-One-Seq": _ka(lambda p, q, r: (f"({p}); true", f"({p})")),
    "KA-Dist-L": _ka(lambda p, q, r: (f"({p}); (({q}) + ({r}))", f"({p}); ({q}) + ({p}); ({r})")),
    "KA-Dist-R": _ka(lambda p, q, r: (f"(({p}) + ({q})); ({r})", f"({p}); ({r}) + ({q}); ({r})")),
    "KA-Zero-Seq": _ka(lambda p, q, r: (f"false; ({p})", "false")),
    "KA-Seq-Zero": _ka(lambda p, q, r: (f"({p}); false", "false")),
    "KA-Unroll-L": _ka(lambda p, q, r: (f"true + ({p}); ({p})*", f"({p})*")),
    "KA-Unroll-R": _ka(lambda p, q, r: (f"true + ({p})*; ({p})", f"({p})*")),
}


def _lfp_l(rng, theory):
    # r := p*;(q + s) satisfies q + p;r ≤ r
    p, q, s = (term(rng, theory) for _ in range(3))
    r = f"({p})*; (({q}) + ({s}))"
    hyp = leq(f"({q}) + ({p}); ({r})", r)
    return [hyp], *leq(f"({p})*; ({q})", r)


def _lfp_r(rng, theory):
    # q := (p + s);r* satisfies p + q;r ≤ q
    p, r, s = (term(rng, theory) for _ in range(3))
    q = f"(({p}) + ({s})); ({r})*"
    hyp = leq(f"({p}) + ({q}); ({r})", q)
    return [hyp], *leq(f"({p}); ({r})*", q)


KA["KA-LFP-L"] = _lfp_l
KA["KA-LFP-R"] = _lfp_r


# -- Boolean algebra -------------------------------------------------------------
def _ba(shape):
    def gen(rng, theory):
        a, b, c = (test(rng, theory) for _ in range(3))
        lhs, rhs = shape(a, b, c)
        return [], lhs, rhs

    return gen


BA = {
    "BA-Plus-Dist": _ba(lambda a, b, c: (f"({a}) + (({b}); ({c}))", f"(({a}) + ({b})); (({a}) + ({c}))")),
    "BA-Plus-One": _ba(lambda a, b, c: (f"({a}) + true", "true")),
    "BA-Excl-Mid": _ba(lambda a, b, c: (f"({a}) + ~({a})", "true")),
    "BA-Seq-Comm": _ba(lambda a, b, c: (f"({a}); ({b})", f"({b}); ({a})")),
    "BA-Contra": _ba(lambda a, b, c: (f"({a}); ~({a})", "false")),
    "BA-Seq-Idem": _ba(lambda a, b, c: (f"({a}); ({a})", f"({a})")),
}


# -- consequences ------------------------------------------------------------------
def _split_on(eng, p: str, a: str, fuel=20000):
    """(q, r) with p;a ≡ a;q + r, read off the normal form of p;a."""
    e = KMT(eng.theory, fuel=fuel)
    at = e.parse(a)
    x = e.normalize(e.parse(f"({p}); ({a})"))
    st = e.store
    qs, rs = [], []
    for b, m in x:
        parts = seqs(b)
        if at in parts:
            rest = e.conj_list(c for c in parts if c is not at)
            qs.append(st.seq(rest, m))
        else:
            rs.append(st.seq(b, m))
    return e.show(st.sum(qs)), e.show(st.sum(rs))


def _star_premise(rng, theory):
    eng = engine(theory)
    while True:
        p = term(rng, theory, 3)
        if rng.random() < 0.5:
            a = rng.choice(POOLS[_pool_theory(theory)][0])
        else:
            a = test(rng, theory, 2)
        try:
            q, r = _split_on(eng, p, a)
        except FuelExhausted:
            continue
        return p, a, q, r


def _star_inv(rng, theory):
    p, a, q, r = _star_premise(rng, theory)
    hyp = (f"({p}); ({a})", f"({a}); ({q}) + ({r})")
    return [hyp], f"({p})*; ({a})", f"(({a}) + ({p})*; ({r})); ({q})*"


def _star_expand(rng, theory):
    p, a, q, r = _star_premise(rng, theory)
    hyp = (f"({p}); ({a})", f"({a}); ({q}) + ({r})")
    return [hyp], f"({p}); ({a}); (({p}); ({a}))*", f"(({a}); ({q}) + ({r})); (({q}) + ({r}))*"


def _pushback_neg(rng, theory):
    # p a primitive action, a a test; b is the pushed-back sum so p;a ≡ b;p
    eng = engine(theory)
    p = rng.choice(POOLS[_pool_theory(theory)][1])
    a = test(rng, theory, 2)
    pt, at = eng.parse(p), eng.parse(a)
    b = eng.show(eng.store.sum(c for c, _ in eng.pb_dot(pt, at)))
    hyp = (f"({p}); ({a})", f"({b}); ({p})")
    return [hyp], f"({p}); ~({a})", f"~({b}); ({p})"


CONSEQUENCES = {
    "Pushback-Neg": _pushback_neg,
    "Sliding": _ka(lambda p, q, r: (f"({p}); (({q}); ({p}))*", f"(({p}); ({q}))*; ({p})")),
    "Denesting": _ka(lambda p, q, r: (f"(({p}) + ({q}))*", f"({q})*; (({p}); ({q})*)*")),
    "Star-Inv": _star_inv,
    "Star-Expand": _star_expand,
}


# -- theory axiom tables ------------------------------------------------------------
def _ctx(rng, theory, lhs, rhs):
    """Optionally wrap both sides in the same random context."""
    if rng.random() < 0.5:
        return lhs, rhs
    c1, c2 = term(rng, theory, 3), term(rng, theory, 3)
    return f"({c1}); ({lhs}); ({c2})", f"({c1}); ({rhs}); ({c2})"


def _table(theory, shape):
    def gen(rng, _theory=None):
        lhs, rhs = shape(rng)
        return [], *_ctx(rng, theory, lhs, rhs)

    gen.theory = theory
    return gen


def _two(rng, pool):
    x = rng.choice(pool)
    y = rng.choice([v for v in pool if v != x])
    return x, y


def _bool(b: bool) -> str:
    return "true" if b else "false"


BITS = ["a", "b", "c"]
NATS = ["x", "y"]


def _asgn_gt(rng):
    x, n, m = rng.choice(NATS), rng.randint(0, 6), rng.randint(0, 6)
    return f"{x}:={n}; {x}>{m}", f"{_bool(n > m)}; {x}:={n}"


def _gt_contra(rng):
    x, m = rng.choice(NATS), rng.randint(0, 6)
    n = rng.randint(0, m)
    return f"~({x}>{n}); {x}>{m}", "false"


def _gt_min(rng):
    x, m, n = rng.choice(NATS), rng.randint(0, 6), rng.randint(0, 6)
    return f"{x}>{m}; {x}>{n}", f"{x}>{max(m, n)}"


def _gt_comm(rng):
    x, y = _two(rng, NATS)
    n = rng.randint(0, 6)
    return f"inc({y}); {x}>{n}", f"{x}>{n}; inc({y})"


def _inc_gt(rng):
    x, n = rng.choice(NATS), rng.randint(1, 6)
    return f"inc({x}); {x}>{n}", f"{x}>{n - 1}; inc({x})"


def _bit_action(rng):
    return f"{rng.choice(['set', 'unset'])}({rng.choice(BITS)})"


def _nat_action(rng):
    x = rng.choice(NATS)
    return f"inc({x})" if rng.random() < 0.6 else f"{x}:={rng.randint(0, 4)}"


def _bit_test(rng):
    return f"{rng.choice(BITS)}=true"


def _nat_test(rng):
    return f"{rng.choice(NATS)}>{rng.randint(0, 4)}"


# Set and map expressions: constants or the naturals i, j (sets) / y (maps).
def _expr_eq(e, c):
    """The expression test e=c in concrete syntax."""
    if isinstance(e, int):
        return _bool(e == c)
    return f"{e}={c}"


def _set_expr(rng):
    return rng.choice([0, 1, 2, "i", "j"])


def _inner_test(rng, var):
    return f"{var}>{rng.randint(0, 2)}"


def _add_comm(rng):
    x, y = _two(rng, ["s", "t"])
    e, c = _set_expr(rng), rng.randint(0, 2)
    return f"insert({y},{e}); in({x},{c})", f"in({x},{c}); insert({y},{e})"


def _add_in(rng):
    # only the e=c instances hold; see the sets notes in the ledger
    x, c = rng.choice(["s", "t"]), rng.randint(0, 2)
    return f"insert({x},{c}); in({x},{c})", f"insert({x},{c})"


def _del_comm(rng):
    x, y = _two(rng, ["s", "t"])
    e, c = _set_expr(rng), rng.randint(0, 2)
    return f"remove({y},{e}); in({x},{c})", f"in({x},{c}); remove({y},{e})"


def _del_in(rng):
    x = rng.choice(["s", "t"])
    e, c = _set_expr(rng), rng.randint(0, 2)
    return f"remove({x},{e}); in({x},{c})", f"~({_expr_eq(e, c)}); in({x},{c}); remove({x},{e})"


def _set_e_comm(op):
    def shape(rng):
        x, e = rng.choice(["s", "t"]), _set_expr(rng)
        a = _inner_test(rng, rng.choice(["i", "j"]))
        return f"{op}({x},{e}); {a}", f"{a}; {op}({x},{e})"

    return shape


def _map_key(rng):
    return rng.choice([0, 1, "x"])


def _map_val(rng):
    return rng.choice([0, 1, "y"])


def _e_comm(rng):
    m, c, e = rng.choice(["m", "n"]), rng.randint(0, 1), _map_val(rng)
    a = _inner_test(rng, rng.choice(["x", "y"]))
    return f"{m}[{c}]:={e}; {a}", f"{a}; {m}[{c}]:={e}"


def _map_neq(rng):
    x, y = _two(rng, ["m", "n"])
    c1, e1, e2, c2 = rng.randint(0, 1), _map_val(rng), _map_key(rng), rng.randint(0, 1)
    return f"{y}[{c1}]:={e1}; {x}[{e2}]={c2}", f"{x}[{e2}]={c2}; {y}[{c1}]:={e1}"


def _map_eq(rng):
    x = rng.choice(["m", "n"])
    c1, e1, e2, c2 = rng.randint(0, 1), _map_val(rng), _map_key(rng), rng.randint(0, 1)
    rhs = f"(({_expr_eq(e2, c1)}); ({_expr_eq(e1, c2)}) + ~({_expr_eq(e2, c1)}); {x}[{e2}]={c2}); {x}[{c1}]:={e1}"
    return f"{x}[{c1}]:={e1}; {x}[{e2}]={c2}", rhs


def _pa_mod_comm(rng):
    f, g = _two(rng, ["f", "g"])
    v, w = rng.choice("12"), rng.choice("12")
    return f"{f}<-{v}; {g}={w}", f"{g}={w}; {f}<-{v}"


def _pa_mod_filter(rng):
    f, v = rng.choice("fg"), rng.choice("12")
    return f"{f}<-{v}; {f}={v}", f"{f}<-{v}"


def _pa_contra(rng):
    f = rng.choice("fg")
    return f"{f}=1; {f}=2" if rng.random() < 0.5 else f"{f}=2; {f}=1", "false"


def _pa_match_all(rng):
    f = rng.choice("fg")
    return f"{f}=1 + {f}=2", "true"


PB = "prod(bitvec,incnat)"


def _set_true(rng):
    b = rng.choice(BITS)
    return f"set({b}); {b}=true", f"set({b})"


def _set_false(rng):
    b = rng.choice(BITS)
    return f"unset({b}); {b}=true", "false"


TABLES = {
    "Set-Test-True-True": _table("bitvec", _set_true),
    "Set-Test-False-True": _table("bitvec", _set_false),
    "GT-Contra": _table("incnat", _gt_contra),
    "Asgn-GT": _table("incnat", _asgn_gt),
    "GT-Min": _table("incnat", _gt_min),
    "GT-Comm": _table("incnat", _gt_comm),
    "Inc-GT": _table("incnat", _inc_gt),
    "Inc-GT-Z": _table("incnat", lambda r: (lambda x: (f"inc({x}); {x}>0", f"inc({x})"))(r.choice(NATS))),
    "L-R-Comm": _table(PB, lambda r: (lambda p, a: (f"{p}; {a}", f"{a}; {p}"))(_bit_action(r), _nat_test(r))),
    "R-L-Comm": _table(PB, lambda r: (lambda p, a: (f"{p}; {a}", f"{a}; {p}"))(_nat_action(r), _bit_test(r))),
    "Add-Comm": _table("set(incnat)", _add_comm),
    "Add-In": _table("set(incnat)", _add_in),
    "Del-Comm": _table("set(incnat)", _del_comm),
    "Del-In": _table("set(incnat)", _del_in),
    "Add-E-Comm": _table("set(incnat)", _set_e_comm("insert")),
    "Del-E-Comm": _table("set(incnat)", _set_e_comm("remove")),
    "E-Comm": _table("map(incnat)", _e_comm),
    "Map-NEq": _table("map(incnat)", _map_neq),
    "Map-Eq": _table("map(incnat)", _map_eq),
    "PA-Mod-Comm": _table("netkat-closed", _pa_mod_comm),
    "PA-Mod-Filter": _table("netkat-closed", _pa_mod_filter),
    "PA-Contra": _table("netkat-closed", _pa_contra),
    "PA-Match-All": _table("netkat-closed", _pa_match_all),
}


def instances(gen, n: int, seed: int, theories=None):
    """n instances of one generator, as (theory, hypotheses, lhs, rhs)."""
    rng = random.Random(seed)
    fixed = getattr(gen, "theory", None)
    pool = list(theories or THEORIES)
    out = []
    for i in range(n):
        th = fixed or pool[i % len(pool)]
        hyps, lhs, rhs = gen(rng, th)
        out.append((th, hyps, lhs, rhs))
    return out


def check(theory, hyps, lhs, rhs):
    """None if the instance holds under ``equivalent``, else a message."""
    eng = engine(theory)
    for h1, h2 in hyps:
        if not eng.equivalent(eng.parse(h1), eng.parse(h2)):
            return f"premise fails: {h1} == {h2}"
    r = eng.equivalent(eng.parse(lhs), eng.parse(rhs))
    if not r:
        return f"{lhs} != {rhs}: {r.witness}"
    return None
