"""Symbolic KMT automata and the decision procedures built on them.

A term automaton comes from partial derivatives: its states are
continuation terms, its transitions carry a guard test and a labeled action,
and its acceptance conditions are arbitrary tests.  Theory tests are then
tracked by a labeling: a bitmask over a closed set of primitive atoms, which
each action updates through pushback (after π, atom s holds iff the pushed
back test held before).  Pairing continuations with labelings gives an
automaton whose acceptance conditions are just 0 or 1.

Equivalence runs a union-find bisimulation over the subset construction,
once for each labeling an initial trace can have; emptiness is a lazy
breadth-first search.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .solver import evaluate, satisfiable
from .terms import ACT, NOT, ONE, PLUS, SEQ, STAR, TEST, ZERO, Term, actions, atoms, show
from .theory import Budget


class AutomatonOverflow(RuntimeError):
    pass


def payload_order(p):
    return (type(p).__name__, p.key())


# -- labels, derivatives, acceptance ---------------------------------------
def label_actions(eng, p: Term) -> Term:
    """Give each action occurrence a distinct label 1..k, left to right."""
    st = eng.store
    counter = itertools.count(1)

    def go(t: Term) -> Term:
        k = t.kind
        if k == ACT:
            return st.act(t.payload, t.label if t.label is not None else next(counter))
        if k in (ZERO, ONE, TEST, NOT):
            return t
        if k == PLUS:
            return st.sum(go(c) for c in t.args)
        if k == SEQ:
            a = go(t.args[0])
            return st.seq(a, go(t.args[1]))
        return st.star(go(t.args[0]))

    if all(a.label is not None for a in actions(p)):
        return p
    return go(p)


def acceptance(eng, p: Term) -> Term:
    cache = eng.theory_cache.setdefault("E", {})
    r = cache.get(p.id)
    if r is not None:
        return r
    st = eng.store
    k = p.kind
    if p.is_test:
        r = p
    elif k == ACT:
        r = st.zero
    elif k == PLUS:
        r = st.sum(acceptance(eng, c) for c in p.args)
    elif k == SEQ:
        r = st.seq(acceptance(eng, p.args[0]), acceptance(eng, p.args[1]))
    elif k == STAR:
        r = st.one
    else:
        raise ValueError(p)
    cache[p.id] = r
    return r


@dataclass(frozen=True)
class LinearForm:
    guard: Term
    action: Term
    cont: Term

    def __str__(self):
        lab = self.action.label
        return f"<{show(self.guard)}, {self.action}^{lab}, {show(self.cont)}>"


def derivative(eng, p: Term) -> tuple[LinearForm, ...]:
    cache = eng.theory_cache.setdefault("D", {})
    r = cache.get(p.id)
    if r is not None:
        return r
    st = eng.store
    k = p.kind
    if p.is_test:
        out = []
    elif k == ACT:
        out = [LinearForm(st.one, p, st.one)]
    elif k == PLUS:
        out = [lf for c in p.args for lf in derivative(eng, c)]
    elif k == SEQ:
        a, b = p.args
        out = [LinearForm(lf.guard, lf.action, st.seq(lf.cont, b)) for lf in derivative(eng, a)]
        e = acceptance(eng, a)
        if e.kind != ZERO:
            out += [LinearForm(st.seq(e, lf.guard), lf.action, lf.cont) for lf in derivative(eng, b)]
    elif k == STAR:
        out = [LinearForm(lf.guard, lf.action, st.seq(lf.cont, p)) for lf in derivative(eng, p.args[0])]
    else:
        raise ValueError(p)
    r = tuple(dict.fromkeys(lf for lf in out if lf.guard.kind != ZERO))
    cache[p.id] = r
    return r


@dataclass
class TermAutomaton:
    """State 0 is initial; every other state is reached by one action label."""

    states: list  # continuation terms; states[0] is the labeled input term
    labels: list  # action label of each state (None for the initial state)
    accept: list  # acceptance test per state
    trans: list  # per state: list of (guard, action term, target index)

    def __len__(self):
        return len(self.states)


def build_term_automaton(eng, p: Term) -> TermAutomaton:
    p = label_actions(eng, p)
    index: dict = {}
    states, labels, trans = [p], [None], []
    i = 0
    while i < len(states):
        row = []
        for lf in derivative(eng, states[i]):
            key = (lf.action.label, lf.cont)
            j = index.get(key)
            if j is None:
                j = index[key] = len(states)
                states.append(lf.cont)
                labels.append(lf.action.label)
            row.append((lf.guard, lf.action, j))
        trans.append(row)
        i += 1
    return TermAutomaton(states, labels, [acceptance(eng, k) for k in states], trans)


# -- atom spaces: labelings and compiled steps --------------------------------
class AtomSpace:
    """A set of primitive atoms closed under subterms and pushback.

    Labelings are ints; bit i is the truth of ``atoms[i]``.
    """

    def __init__(self, eng, seed: Iterable[Term], acts: Iterable, limit: int = 4096):
        self.eng = eng
        self.acts = sorted(set(acts), key=payload_order)
        found: set[Term] = set()
        work = list(seed)
        while work:
            s = work.pop()
            if s in found:
                continue
            found.add(s)
            if len(found) > limit:
                raise AutomatonOverflow(f"more than {limit} atoms in the closure")
            for b in eng.sub(s):
                for a in atoms(b):
                    if a not in found:
                        work.append(a)
            for pi in self.acts:
                for t in eng.pb_dot_tests(pi, s):
                    for a in atoms(t):
                        if a not in found:
                            work.append(a)
        self.atoms = sorted(found, key=eng.test_key)
        self.index = {a: i for i, a in enumerate(self.atoms)}
        self._tests: dict = {}
        self._steps: dict = {}

    def __len__(self):
        return len(self.atoms)

    def _expr(self, t: Term) -> str:
        k = t.kind
        if k == ONE:
            return "True"
        if k == ZERO:
            return "False"
        if k == TEST:
            return f"(L>>{self.index[t]}&1)"
        if k == NOT:
            return f"(not {self._expr(t.args[0])})"
        if k == SEQ:
            return f"({self._expr(t.args[0])} and {self._expr(t.args[1])})"
        if k == PLUS:
            return "(" + " or ".join(self._expr(c) for c in t.args) + ")"
        raise ValueError(f"not a test: {t}")

    def test_fn(self, t: Term):
        f = self._tests.get(t.id)
        if f is None:
            f = eval(f"lambda L: bool({self._expr(t)})")
            self._tests[t.id] = f
        return f

    def eval(self, t: Term, L: int) -> bool:
        return self.test_fn(t)(L)

    def step_fn(self, pi):
        f = self._steps.get(pi)
        if f is not None:
            return f
        keep = 0
        parts = []
        for i, s in enumerate(self.atoms):
            pbs = self.eng.pb_dot_tests(pi, s)
            if pbs == [s]:
                keep |= 1 << i
                continue
            if not pbs:
                continue
            st = self.eng.store
            e = self._expr(st.sum(pbs))
            if e == "True":
                keep_const = 1 << i
                parts.append(str(keep_const))
            elif e != "False":
                parts.append(f"({e} and {1 << i} or 0)")
        body = " | ".join([f"(L & {keep})"] + parts)
        f = eval(f"lambda L: {body}")
        self._steps[pi] = f
        return f

    def step(self, L: int, pi) -> int:
        return self.step_fn(pi)(L)

    def reachable(self, starts: Iterable[int], acts: Iterable) -> list[int]:
        acts = list(acts)
        seen = dict.fromkeys(starts)
        work = deque(seen)
        while work:
            L = work.popleft()
            for pi in acts:
                M = self.step(L, pi)
                if M not in seen:
                    seen[M] = None
                    work.append(M)
        return list(seen)

    def true_atoms(self, L: int) -> list[Term]:
        return [a for i, a in enumerate(self.atoms) if L >> i & 1]

    def label_set(self, L: int) -> frozenset:
        return frozenset(self.true_atoms(L)) | {self.eng.store.one}

    def mask(self, lab) -> int:
        L = 0
        for i, v in enumerate(lab):
            if v:
                L |= 1 << i
        return L


def initial_labelings(eng, space: AtomSpace) -> list[int]:
    """Labelings the last state of some initial trace can have, fewest true atoms first."""
    th = eng.theory
    if th.temporal:
        starts = th.start_labelings(space, eng)
        labs = space.reachable(starts, th.history(eng))
    else:
        labs = [space.mask(lab) for lab in th.labelings(space.atoms, eng)]
    return sorted(set(labs), key=lambda L: (bin(L).count("1"), L))


# -- the product, explored lazily ---------------------------------------------
class Product:
    """Subset construction over continuations, paired with a labeling."""

    def __init__(self, eng, roots: list[Term], extra_atoms: Iterable[Term] = ()):
        self.eng = eng
        self.roots = [label_actions(eng, r) for r in roots]
        acts = set()
        ats = set(extra_atoms)
        for r in self.roots:
            acts |= {a.payload for a in actions(r)}
            ats |= atoms(r)
        self.actions = sorted(acts, key=payload_order)
        hist = eng.theory.history(eng) if eng.theory.temporal else []
        self.space = AtomSpace(eng, ats, set(self.actions) | set(hist))
        self._moves: dict = {}
        self._acc: dict = {}

    def inits(self) -> list[int]:
        return initial_labelings(self.eng, self.space)

    def _moves_of(self, k: Term):
        m = self._moves.get(k)
        if m is None:
            m = {}
            for lf in derivative(self.eng, k):
                m.setdefault(lf.action.payload, []).append((self.space.test_fn(lf.guard), lf.cont))
            self._moves[k] = m
        return m

    def accepting(self, S: frozenset, L: int) -> bool:
        for k in S:
            f = self._acc.get(k)
            if f is None:
                f = self._acc[k] = self.space.test_fn(acceptance(self.eng, k))
            if f(L):
                return True
        return False

    def succ(self, S: frozenset, L: int, pi) -> tuple[frozenset, int]:
        out = set()
        for k in S:
            for g, c in self._moves_of(k).get(pi, ()):
                if g(L):
                    out.add(c)
        return frozenset(out), self.space.step(L, pi)


@dataclass
class Witness:
    labeling: list  # atoms true initially (others false)
    word: list  # action payloads
    trace: Optional[tuple] = None  # concrete initial trace, when one was found
    side: Optional[str] = None  # which term accepts (equivalence only)

    def __str__(self):
        from .oracle import show_trace

        init = " · ".join(map(str, self.labeling)) or "(no atom true)"
        w = "; ".join(map(str, self.word)) or "(no actions)"
        s = f"initial: {init}\nactions: {w}"
        if self.side:
            s += f"\naccepted only by: {self.side}"
        if self.trace is not None:
            s += f"\ntrace: {show_trace(self.trace)}"
        return s


@dataclass
class Result:
    value: bool
    witness: Optional[Witness] = None
    explored: int = 0
    relation: list = field(default_factory=list)

    def __bool__(self):
        return self.value


def _word(parent, node):
    out = []
    while parent.get(node) is not None:
        node, pi = parent[node]
        out.append(pi)
    return out[::-1]


def equivalent(eng, p: Term, q: Term, concretize: bool = True, keep_relation: bool = False) -> Result:
    prod = Product(eng, [p, q])
    P0, Q0 = prod.roots
    uf: dict = {}

    def find(x):
        root = x
        while uf.get(root, root) != root:
            root = uf[root]
        while uf.get(x, x) != root:
            uf[x], x = root, uf[x]
        return root

    explored = 0
    relation = []
    for L0 in prod.inits():
        start = (frozenset((P0,)), frozenset((Q0,)), L0)
        parent = {start: None}
        work = deque([start])
        while work:
            node = work.popleft()
            Sp, Sq, L = node
            x, y = ("p", Sp, L), ("q", Sq, L)
            rx, ry = find(x), find(y)
            if rx == ry:
                continue
            explored += 1
            ap, aq = prod.accepting(Sp, L), prod.accepting(Sq, L)
            if ap != aq:
                w = Witness(prod.space.true_atoms(L0), _word(parent, node), side="left" if ap else "right")
                if concretize:
                    w.trace = concretize_labeling(eng, prod.space, L0)
                return Result(False, w, explored)
            uf[rx] = ry
            if keep_relation:
                relation.append((Sp, Sq, L))
            for pi in prod.actions:
                Sp2, L2 = prod.succ(Sp, L, pi)
                Sq2, _ = prod.succ(Sq, L, pi)
                nxt = (Sp2, Sq2, L2)
                if nxt not in parent:
                    parent[nxt] = (node, pi)
                work.append(nxt)
    return Result(True, None, explored, relation)


def empty(eng, p: Term, concretize: bool = True) -> Result:
    """Result(True) when p accepts nothing; otherwise a witness run."""
    prod = Product(eng, [p])
    P0 = prod.roots[0]
    seen: set = set()
    explored = 0
    for L0 in prod.inits():
        start = (frozenset((P0,)), L0)
        if start in seen:
            continue
        seen.add(start)
        parent = {start: None}
        work = deque([start])
        while work:
            node = work.popleft()
            S, L = node
            explored += 1
            if prod.accepting(S, L):
                w = Witness(prod.space.true_atoms(L0), _word(parent, node))
                if concretize:
                    w.trace = concretize_labeling(eng, prod.space, L0)
                return Result(False, w, explored)
            for pi in prod.actions:
                S2, L2 = prod.succ(S, L, pi)
                if not S2:
                    continue
                nxt = (S2, L2)
                if nxt not in seen:
                    seen.add(nxt)
                    parent[nxt] = (node, pi)
                    work.append(nxt)
    return Result(True, None, explored)


def concretize_labeling(eng, space: AtomSpace, L0: int, budget: Optional[Budget] = None):
    """Find an initial trace whose last entry has labeling L0 (or None)."""
    from .oracle import holds

    if not eng.theory.has_model:
        return None
    if budget is None:
        top = 0
        for a in space.atoms:
            for v in vars(a.payload).values() if hasattr(a.payload, "__dict__") else ():
                if isinstance(v, int) and not isinstance(v, bool):
                    top = max(top, v)
        budget = Budget(states=top + 2, max_states=200000)
    try:
        traces = eng.theory.initial_traces(eng, budget)
    except Exception:
        return None
    for t in traces:
        if all(holds(eng, a, t) == bool(L0 >> i & 1) for i, a in enumerate(space.atoms)):
            return t
    return None


def replay(eng, p: Term, q: Optional[Term], w: Witness) -> bool:
    """Check a witness concretely in the oracle.

    For emptiness (q None) the run must be an output of p; for equivalence it
    must be an output of exactly one of p and q.
    """
    from .oracle import accepts

    if w.trace is None:
        return False
    a = accepts(eng, p, w.trace, w.word)
    if q is None:
        return a
    return a != accepts(eng, q, w.trace, w.word)


# -- explicit automata (theory automata, products, determinization, DOT) ------
@dataclass
class TheoryAutomaton:
    test: Term
    space: AtomSpace
    states: list  # labelings
    initial: list  # indices of initial labelings
    trans: list  # (src, action payload, dst)
    accept: list  # bool per state

    def labels(self, i) -> frozenset:
        return self.space.label_set(self.states[i])


def build_theory_automaton(eng, a: Term, acts: Iterable) -> TheoryAutomaton:
    acts = sorted(set(acts), key=payload_order)
    hist = eng.theory.history(eng) if eng.theory.temporal else []
    space = AtomSpace(eng, atoms(a), set(acts) | set(hist))
    inits = initial_labelings(eng, space)
    states = space.reachable(inits, acts)
    idx = {L: i for i, L in enumerate(states)}
    trans = [(idx[L], pi, idx[space.step(L, pi)]) for L in states for pi in acts]
    return TheoryAutomaton(a, space, states, [idx[L] for L in inits], trans, [space.eval(a, L) for L in states])


@dataclass
class ProductAutomaton:
    states: list  # (frozenset of continuation terms, labeling)
    accept: list  # 0/1 per state
    initial: list  # (labeling, state index)
    trans: list  # (src, guard text, action payload, dst)
    space: AtomSpace
    roots: list

    def __len__(self):
        return len(self.states)


def product(eng, p: Term, deterministic: bool = False, limit: int = 100000) -> ProductAutomaton:
    """Materialize the reachable product of p's term automaton and its labelings.

    Without ``deterministic`` states pair a single continuation with a
    labeling; with it, states pair sets of continuations (the subset
    construction), so each state has at most one successor per action.
    """
    prod = Product(eng, [p])
    root = prod.roots[0]
    states: list = []
    index: dict = {}

    def node(S, L):
        key = (S, L)
        i = index.get(key)
        if i is None:
            i = index[key] = len(states)
            states.append(key)
            if len(states) > limit:
                raise AutomatonOverflow("product too large")
        return i

    initial = []
    for L0 in prod.inits():
        if deterministic:
            initial.append((L0, node(frozenset((root,)), L0)))
        else:
            initial.append((L0, node(frozenset((root,)), L0)))
    trans = []
    i = 0
    while i < len(states):
        S, L = states[i]
        for pi in prod.actions:
            if deterministic:
                S2, L2 = prod.succ(S, L, pi)
                if S2:
                    trans.append((i, "true", pi, node(S2, L2)))
            else:
                (k,) = S
                L2 = prod.space.step(L, pi)
                for g, c in prod._moves_of(k).get(pi, ()):
                    if g(L):
                        trans.append((i, "true", pi, node(frozenset((c,)), L2)))
        i += 1
    accept = [int(prod.accepting(S, L)) for S, L in states]
    return ProductAutomaton(states, accept, initial, trans, prod.space, prod.roots)


def determinize(eng, aut: ProductAutomaton) -> ProductAutomaton:
    """Powerset construction on an explicit product automaton.

    Guards of a product are already resolved by the labeling, so minterms
    collapse to one per action and the subsets merge same-action targets.
    """
    succ: dict = {}
    for s, _, pi, d in aut.trans:
        succ.setdefault((s, pi), set()).add(d)
    acts = sorted({pi for _, _, pi, _ in aut.trans}, key=payload_order)
    states: list = []
    index: dict = {}

    def node(T):
        i = index.get(T)
        if i is None:
            i = index[T] = len(states)
            states.append(T)
        return i

    initial = [(L0, node(frozenset((i,)))) for L0, i in aut.initial]
    trans = []
    j = 0
    while j < len(states):
        T = states[j]
        for pi in acts:
            D = frozenset(d for s in T for d in succ.get((s, pi), ()))
            if D:
                trans.append((j, "true", pi, node(D)))
        j += 1
    accept = [int(any(aut.accept[s] for s in T)) for T in states]
    merged = [(frozenset(k for s in T for k in aut.states[s][0]), aut.states[min(T)][1]) for T in states]
    return ProductAutomaton(merged, accept, initial, trans, aut.space, aut.roots)


def minterms(eng, guards: list[Term]) -> list[tuple[Term, frozenset]]:
    """Satisfiable sign combinations of guards, as (test, indices of positive guards)."""
    st = eng.store
    out = []
    for signs in itertools.product((True, False), repeat=len(guards)):
        parts = [g if s else st.neg(g) for g, s in zip(guards, signs)]
        t = eng.conj_list(parts) if parts else st.one
        if t.kind == ZERO or not satisfiable(eng, t):
            continue
        out.append((simplify_conj(eng, t), frozenset(i for i, s in enumerate(signs) if s)))
    return out


def simplify_conj(eng, t: Term) -> Term:
    """Drop factors implied by the remaining ones."""
    from .ordering import seqs
    from .solver import implies

    parts = seqs(t)
    i = 0
    while i < len(parts) and len(parts) > 1:
        rest = parts[:i] + parts[i + 1:]
        if implies(eng, eng.conj_list(rest), parts[i]):
            parts = rest
        else:
            i += 1
    return eng.conj_list(parts)


def determinize_terms(eng, ta: TermAutomaton) -> list[tuple[frozenset, Term, object, frozenset]]:
    """Symbolic subset construction: (source set, minterm, action, target set)."""
    start = frozenset((0,))
    seen = {start: None}
    work = deque([start])
    out = []
    while work:
        S = work.popleft()
        by_act: dict = {}
        for s in sorted(S):
            for g, a, d in ta.trans[s]:
                by_act.setdefault(a.payload, []).append((g, d))
        for pi in sorted(by_act, key=payload_order):
            edges = by_act[pi]
            guards = list(dict.fromkeys(g for g, _ in edges))
            for mt, pos in minterms(eng, guards):
                T = frozenset(d for g, d in edges if guards.index(g) in pos)
                out.append((S, mt, pi, T))
                if T and T not in seen:
                    seen[T] = None
                    work.append(T)
    return out


# -- DOT -----------------------------------------------------------------------
def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def term_dot(eng, ta: TermAutomaton) -> str:
    lines = ["digraph term {", "  rankdir=LR;"]
    for i in range(len(ta.states)):
        name = 0 if ta.labels[i] is None else ta.labels[i]
        lines.append(f"  s{i} [label={_q(f'{name}/{show(ta.accept[i])}')}];")
    for i, row in enumerate(ta.trans):
        for g, a, j in row:
            lines.append(f"  s{i} -> s{j} [label={_q(f'{show(g)};{a.payload}')}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def product_dot(eng, aut: ProductAutomaton, query_atoms: Optional[Iterable[Term]] = None) -> str:
    sp = aut.space
    shown = sorted(set(query_atoms) if query_atoms is not None else sp.atoms, key=eng.test_key)
    lines = ["digraph kmt {", "  rankdir=LR;", '  init [label="0", shape=point];']
    for i in range(len(aut.states)):
        shape = "doublecircle" if aut.accept[i] else "circle"
        lines.append(f"  s{i} [label={_q(f'{i + 1}/{aut.accept[i]}')}, shape={shape}];")
    for L0, i in aut.initial:
        lits = [show(a) if L0 >> sp.index[a] & 1 else "~" + show(a, 3) for a in shown if a in sp.index]
        g = "; ".join(lits) or "true"
        lines.append(f"  init -> s{i} [label={_q(g)}];")
    for s, g, pi, d in aut.trans:
        lines.append(f"  s{s} -> s{d} [label={_q(f'{g};{pi}')}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
