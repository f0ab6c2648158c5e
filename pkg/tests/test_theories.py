import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from gen import BUDGETS, POOLS
from kmt import KMT, load
from kmt.oracle import denote, holds, initial_traces
from kmt.theories.incnat import Gt, Inc, IncNat
from kmt.theories.netkat import NetKAT
from kmt.theory import Budget, TheoryError, make_theory, theory_names


def pb(e, act: str, test: str):
    a, t = e.parse(act), e.parse(test)
    return e.theory.push_back(a.payload, t.payload, e)


def same_tests(e, got, want):
    """got and want match one-to-one up to equivalence of tests."""
    want = [e.parse(w) if isinstance(w, str) else w for w in want]
    if len(got) != len(want):
        return False
    left = list(want)
    for g in got:
        hit = next((w for w in left if g is w or e.equivalent(g, w)), None)
        if hit is None:
            return False
        left.remove(hit)
    return True


def sound(e, act, test, budget):
    """act;test == (sum of pushback);act under the oracle."""
    a, t = e.parse(act), e.parse(test)
    res = e.theory.push_back(a.payload, t.payload, e)
    s = e.store
    return e.equiv_bounded(s.seq(a, t), s.seq(s.sum(res), a), budget)[0]


# -- registry -------------------------------------------------------------------
def test_registry_names():
    assert make_theory("incnat").name == "incnat"
    assert make_theory("ltlf-incnat").name == "ltlf(incnat)"
    assert make_theory("ltlf(incnat)").name == "ltlf(incnat)"
    assert make_theory("prod-bitvec-incnat").name == "prod(bitvec,incnat)"
    for n in ("bitvec", "incnat", "prod", "set", "map", "ltlf", "netkat", "sp"):
        assert n in theory_names()


def test_unknown_theory_is_rejected():
    with pytest.raises(TheoryError):
        make_theory("nosuch")
    with pytest.raises(TheoryError):
        make_theory("set(bitvec)")  # sets need an expression theory


# -- BitVec ----------------------------------------------------------------------
def test_bitvec_pushback():
    e = load("bitvec")
    assert pb(e, "set(b)", "b=true") == [e.store.one]
    assert pb(e, "unset(b)", "b=true") == [e.store.zero]
    assert pb(e, "set(b)", "c=true") == [e.parse("c=true")]
    assert sound(e, "set(b)", "c=true", Budget(states=1, trace_len=2))


# -- IncNat ----------------------------------------------------------------------
def test_incnat_pushback():
    e = load("incnat")
    assert pb(e, "inc(x)", "x>3") == [e.parse("x>2")]
    assert pb(e, "inc(x)", "x>0") == [e.store.one]
    assert pb(e, "x:=5", "x>3") == [e.store.one]
    assert pb(e, "x:=2", "x>3") == [e.store.zero]
    assert pb(e, "inc(y)", "x>3") == [e.parse("x>3")]


def test_incnat_satisfiable_examples():
    e = load("incnat")
    assert e.satisfiable(e.parse("x>3; ~x>5"))
    assert not e.satisfiable(e.parse("x>5; ~x>3"))
    assert e.satisfiable(e.parse("x>3; y>2"))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("xy"), st.integers(0, 6), st.booleans()), min_size=1, max_size=5))
def test_incnat_satisfiable_matches_brute_force(lits):
    e = load("incnat")
    s = e.store
    t = s.seqs(s.test(Gt(v, n)) if pos else s.neg(s.test(Gt(v, n))) for v, n, pos in lits)
    brute = any(
        all((vals[v] > n) == pos for v, n, pos in lits)
        for vals in ({"x": a, "y": b} for a in range(8) for b in range(8))
    )
    assert e.satisfiable(t) == brute


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.sampled_from("xyz"), st.integers(0, 20), min_size=1), st.sampled_from("xyz"))
def test_incnat_increment_is_monotone(vals, var):
    th = IncNat()
    e = load("incnat")
    state = tuple(sorted(vals.items()))
    after = dict(th.act(Inc(var), state, e))
    for v, n in vals.items():
        assert after.get(v, 0) >= n


class BrokenIncNat(IncNat):
    name = "broken-incnat"

    def push_back(self, act, test, ctx):
        if isinstance(act, Inc) and act.var == test.var:
            return [ctx.store.test(test)]  # forgets the decrement
        return super().push_back(act, test, ctx)


def test_broken_pushback_fails_validation():
    e = KMT(BrokenIncNat())
    rep = e.validate(Budget(states=8, trace_len=3))
    assert not rep.ok
    assert any(k == "pushback-unsound" for k, _ in rep.failures)
    # the oracle's counterexample starts exactly at x = n
    ok, (t0, _) = e.equiv_bounded(e.parse("inc(x); x>3"), e.parse("x>3; inc(x)"), Budget(states=8, trace_len=3))
    assert not ok and dict(t0[0][0])["x"] == 3


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("xy"), st.integers(0, 4)), min_size=1, max_size=4))
def test_incnat_labelings_match_brute_force(specs):
    e = load("incnat")
    atoms = list(dict.fromkeys(e.store.test(Gt(v, n)) for v, n in specs))
    got = set(e.theory.labelings(atoms, e))
    want = {
        tuple(vals[a.payload.var] > a.payload.n for a in atoms)
        for vals in ({"x": a, "y": b} for a in range(7) for b in range(7))
    }
    assert got == want


# -- Prod ------------------------------------------------------------------------
def test_prod_pushback():
    e = load("prod(bitvec,incnat)")
    assert pb(e, "inc(x)", "b=true") == [e.parse("b=true")]
    assert pb(e, "set(b)", "x>1") == [e.parse("x>1")]
    assert pb(e, "inc(x)", "x>1") == [e.parse("x>0")]


# -- Sets ------------------------------------------------------------------------
SET_BUDGET = Budget(states=3, trace_len=2)


def test_set_pushback_insert():
    e = load("set(incnat)")
    got = pb(e, "insert(s,i)", "in(s,2)")
    # an element already present stays present, so in(s,2) joins i=2
    assert same_tests(e, got, ["i=2", "in(s,2)"])
    assert sound(e, "insert(s,i)", "in(s,2)", SET_BUDGET)
    # the one-summand reading {e=c} alone is refuted by the oracle
    lhs = e.parse("insert(s,i); in(s,2)")
    ok, (t0, _) = e.equiv_bounded(lhs, e.parse("i=2; insert(s,i)"), SET_BUDGET)
    assert not ok


def test_set_pushback_remove_and_commute():
    e = load("set(incnat)")
    assert same_tests(e, pb(e, "remove(s,i)", "in(s,2)"), ["~(i=2); in(s,2)"])
    assert pb(e, "insert(t,i)", "in(s,2)") == [e.parse("in(s,2)")]
    assert pb(e, "insert(s,i)", "j>1") == [e.parse("j>1")]
    for act, test in [("remove(s,i)", "in(s,2)"), ("insert(t,i)", "in(s,2)"), ("insert(s,1)", "in(s,1)")]:
        assert sound(e, act, test, SET_BUDGET)


# -- Maps ------------------------------------------------------------------------
MAP_BUDGET = Budget(states=2, trace_len=2, max_states=3000)


def test_map_pushback():
    e = load("map(incnat)")
    got = pb(e, "m[0]:=y", "m[x]=1")
    assert same_tests(e, got, ["x=0; y=1", "~(x=0); m[x]=1"])
    assert pb(e, "n[0]:=y", "m[x]=1") == [e.parse("m[x]=1")]
    assert pb(e, "m[0]:=y", "x>0") == [e.parse("x>0")]
    for act, test in [("m[0]:=y", "m[x]=1"), ("n[0]:=y", "m[x]=1"), ("m[0]:=y", "x>0")]:
        assert sound(e, act, test, MAP_BUDGET)


def test_map_rejects_moving_a_read_key():
    e = load("map(incnat)")
    with pytest.raises(TheoryError):
        pb(e, "inc(x)", "m[x]=1")


# -- LTLf ------------------------------------------------------------------------
def test_ltlf_pushback():
    e = load("ltlf(incnat)")
    assert pb(e, "inc(x)", "last(x>1)") == [e.parse("x>1")]
    got = pb(e, "inc(x)", "ever(x>2)")
    assert set(got) == {e.parse("x>1"), e.parse("ever(x>2)")}


def test_ltlf_satisfiable():
    e = load("ltlf(incnat)")
    assert e.satisfiable(e.parse("ever(x>2)"))
    assert not e.satisfiable(e.parse("last(true); start"))
    a = e.parse("always(x>2); ~(x>2)")
    assert not e.satisfiable(a)
    traces = initial_traces(e, Budget(states=4, hist_len=2))
    assert not any(holds(e, a, t) for t in traces)


def test_ltlf_degenerate_start():
    e = load("ltlf(incnat)")
    for t in initial_traces(e, Budget(states=4, hist_len=0)):
        assert not holds(e, e.parse("last(x>0)"), t)
        for src in ("since(x>0, x>2)", "since(true, x>1)"):
            b = e.parse(src).payload.b
            assert holds(e, e.parse(src), t) == holds(e, b, t)


# -- NetKAT ----------------------------------------------------------------------
def test_netkat_pushback():
    e = load("netkat")
    assert pb(e, "f<-1", "f=1") == [e.store.one]
    assert pb(e, "f<-1", "f=2") == [e.store.zero]
    assert pb(e, "g<-1", "f=1") == [e.parse("f=1")]


def test_netkat_undeclared_value():
    e = KMT(NetKAT({"f": ["1", "2"]}))
    with pytest.raises(TheoryError):
        e.parse("f=3")


def test_netkat_repeated_write_leaves_a_different_trace():
    e = load("netkat")
    one, two = e.parse("f<-1"), e.parse("f<-1; f<-1")
    for t in initial_traces(e, Budget(states=2)):
        assert denote(e, one, {t}, 5) != denote(e, two, {t}, 5)


# -- SP --------------------------------------------------------------------------
def test_sp_pushback():
    e = load("sp")
    assert set(pb(e, "B:=minp(A,C,D)", "B<3")) == {e.parse(s) for s in ("A<2", "C<2", "D<2")}
    assert set(pb(e, "B:=minp(A,C,D)", "B<inf")) == {e.parse(s) for s in ("A<inf", "C<inf", "D<inf")}
    assert pb(e, "B:=minp(A,C)", "D<5") == [e.parse("D<5")]
    assert sound(e, "B:=minp(A,C)", "D<5", Budget(states=3, trace_len=2))
    assert sound(e, "B:=minp(A,C,D)", "B<3", Budget(states=3, trace_len=2))


# -- cross-theory properties -------------------------------------------------------
@pytest.mark.parametrize("theory", sorted(POOLS))
def test_payload_display_roundtrip(theory):
    e = load(theory)
    rng = random.Random(0)
    for p in e.theory.sample_tests(e, rng) + e.theory.sample_actions(e, rng):
        t = e.test(p) if e.theory.owns(p) and type(p) in _test_types(e.theory) else e.act(p)
        assert e.parse(str(p)) is t


def _test_types(th):
    out = set(th.test_types)
    for sub in th.parts():
        out |= set(sub.test_types)
    return out


@pytest.mark.parametrize("theory", sorted(POOLS))
def test_sampled_pushbacks_are_sound(theory):
    e = load(theory)
    rep = e.validate(BUDGETS[theory])
    unsound = [d for k, d in rep.failures if k == "pushback-unsound"]
    assert not unsound, unsound[:3]


def test_bitvec_labelings_are_exhaustive():
    e = load("bitvec")
    atoms = [e.parse(f"{v}=true") for v in "abc"]
    assert set(e.theory.labelings(atoms, e)) == set(itertools.product((False, True), repeat=3))
