import random

import pytest
from hypothesis import given, settings, strategies as st

from gen import BUDGETS, POOLS, rand_term, rand_test
from kmt import load, nnf
from kmt.oracle import equiv_bounded
from kmt.terms import KernelError, NOT, TEST, atoms, is_restricted


@pytest.fixture
def e():
    return load("incnat")


def test_interning_returns_the_same_object(e):
    assert e.parse("inc(x); x>1") is e.parse("inc(x) ; x>1")
    assert e.test(e.parse("x>1").payload) is e.parse("x>1")


def test_smart_constructors(e):
    s = e.store
    p = e.parse("inc(x)")
    assert s.plus(p, s.zero) is p
    assert s.plus(p, p) is p
    assert s.star(s.zero) is s.one
    assert s.star(s.one) is s.one
    assert s.seq(s.one, p) is p and s.seq(p, s.one) is p
    assert s.seq(s.zero, p) is s.zero and s.seq(p, s.zero) is s.zero
    a = e.parse("x>1")
    assert s.neg(s.neg(a)) is a


def test_no_extra_star_rewrites_in_kernel(e):
    s = e.store
    p = e.parse("inc(x)*")
    assert s.star(p) is not p


def test_plus_is_a_set(e):
    assert e.parse("inc(x) + inc(y)") is e.parse("inc(y) + inc(x)")
    assert e.parse("(inc(x) + inc(y)) + inc(x)") is e.parse("inc(x) + inc(y)")


def test_seq_is_right_associated(e):
    a = e.parse("(inc(x); inc(y)); x>1")
    b = e.parse("inc(x); (inc(y); x>1)")
    assert a is b


def test_negating_an_action_is_rejected(e):
    with pytest.raises(KernelError):
        e.store.neg(e.parse("inc(x)"))


def test_is_test(e):
    assert e.parse("~(x>1) + true").is_test
    assert not e.parse("inc(x)").is_test
    assert not e.parse("x>1; inc(x)").is_test


def test_nnf_examples(e):
    s = e.store
    assert nnf(s.neg(s.zero)) is s.one
    assert nnf(e.parse("~(x>1; y>2)")) is e.parse("~x>1 + ~y>2")
    assert nnf(e.parse("~~(x>1)")) is e.parse("x>1")
    assert nnf(e.parse("~(x>1 + y>2)")) is e.parse("~x>1; ~y>2")


def _negations_on_atoms_only(t):
    if t.kind == NOT:
        return t.args[0].kind == TEST
    return all(_negations_on_atoms_only(c) for c in t.args)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["incnat", "bitvec", "ltlf(incnat)"]))
def test_nnf_properties(seed, theory):
    rng = random.Random(seed)
    e = load(theory)
    a = e.parse(rand_test(rng, POOLS[theory][0], rng.randint(1, 6)))
    n = nnf(a)
    assert nnf(n) is n
    assert _negations_on_atoms_only(n)
    ok, cex = equiv_bounded(e, a, n, BUDGETS[theory])
    assert ok, cex


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(sorted(POOLS)))
def test_show_parse_roundtrip(seed, theory):
    rng = random.Random(seed)
    e = load(theory)
    t = e.parse(rand_term(rng, theory, rng.randint(1, 10)))
    assert e.parse(e.show(t)) is t
    s = e.show(t)
    assert e.show(e.parse(s)) == s


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_smart_constructors_preserve_denotation(seed):
    # sum with 0, seq with 1 and double negation all happen at construction;
    # compare against a term built with the smart constructor bypassed
    rng = random.Random(seed)
    e = load("incnat")
    s = e.store
    p = e.parse(rand_term(rng, "incnat", rng.randint(1, 6)))
    raw = s._mk(5, (s.one, p), None, None, p.is_test)  # SEQ(1, p) without simplification
    assert raw is not p
    ok, cex = equiv_bounded(e, raw, p, BUDGETS["incnat"])
    assert ok, cex


def test_atoms_and_restricted(e):
    t = e.parse("x>1; inc(x) + ~y>2")
    assert atoms(t) == {e.parse("x>1"), e.parse("y>2")}
    assert is_restricted(e.parse("inc(x); inc(y)*"))
    assert not is_restricted(e.parse("inc(x); x>1"))


def test_deref(e):
    t = e.parse("inc(x)*")
    assert e.store.deref(t.id) is t
