"""Recursive-descent parser for KMT terms.

Grammar (``~`` binds tightest, then postfix ``*``, then ``;``, then ``+``)::

    sum     := seq ('+' seq)*
    seq     := postfix ((';' | '.') postfix)*
    postfix := prefix '*'*
    prefix  := '~' prefix | primary
    primary := '(' sum ')' | 'true' | 'false' | atom

Atoms belong to the theory.  ``head(args)`` goes to ``parse_call``,
``lhs OP rhs`` to ``parse_infix`` and a bare word to ``parse_word``.
"""
from __future__ import annotations

import re
from typing import Optional

from .terms import KernelError, Term

TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>:=|<-|<=|>=|=|>|<)|(?P<p>[(),;.+*~\[\]]))"
)
INFIX = {":=", "<-", "<=", ">=", "=", ">", "<"}


class ParseError(ValueError):
    def __init__(self, msg: str, pos: Optional[int] = None):
        self.pos = pos
        super().__init__(msg if pos is None else f"{msg} at position {pos}")


def tokenize(src: str) -> list[tuple[str, str, int]]:
    out = []
    i = 0
    n = len(src)
    while i < n:
        if src[i].isspace():
            i += 1
            continue
        m = TOKEN.match(src, i)
        if not m or m.end() == i:
            raise ParseError(f"syntax error: unexpected {src[i]!r}", i)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        i = m.end()
    out.append(("eof", "", n))
    return out


class Parser:
    def __init__(self, src: str, eng):
        self.src = src
        self.eng = eng
        self.toks = tokenize(src)
        self.i = 0

    # -- helpers offered to theory hooks ------------------------------------
    def text(self, toks) -> str:
        return "".join(t[1] for t in toks)

    def term(self, toks) -> Term:
        sub = Parser.__new__(Parser)
        sub.src, sub.eng = self.src, self.eng
        end = toks[-1][2] + len(toks[-1][1]) if toks else 0
        sub.toks = list(toks) + [("eof", "", end)]
        sub.i = 0
        t = sub.sum()
        sub.expect_eof()
        return t

    def test_arg(self, toks) -> Term:
        t = self.term(toks)
        if not t.is_test:
            pos = toks[0][2] if toks else None
            raise ParseError("expected a test argument", pos)
        return t

    # -- token stream ----------------------------------------------------------
    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, val: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t[0] in ("p", "op") and t[1] == val

    def expect(self, val: str):
        t = self.peek()
        if not self.at(val):
            raise ParseError(f"syntax error: expected {val!r}, found {t[1] or 'end of input'!r}", t[2])
        return self.next()

    def expect_eof(self):
        t = self.peek()
        if t[0] != "eof":
            raise ParseError(f"syntax error: unexpected {t[1]!r}", t[2])

    # -- grammar ------------------------------------------------------------------
    def sum(self) -> Term:
        parts = [self.seq()]
        while self.at("+"):
            self.next()
            parts.append(self.seq())
        return parts[0] if len(parts) == 1 else self.eng.store.sum(parts)

    def seq(self) -> Term:
        t = self.postfix()
        parts = [t]
        while self.at(";") or self.at("."):
            self.next()
            parts.append(self.postfix())
        st = self.eng.store
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = st.seq(p, out)
        return out

    def postfix(self) -> Term:
        t = self.prefix()
        while self.at("*"):
            self.next()
            t = self.eng.store.star(t)
        return t

    def prefix(self) -> Term:
        if self.at("~"):
            pos = self.next()[2]
            t = self.prefix()
            try:
                return self.eng.store.neg(t)
            except KernelError as e:
                raise ParseError(str(e), pos) from None
        return self.primary()

    def primary(self) -> Term:
        st = self.eng.store
        tok = self.peek()
        if self.at("("):
            self.next()
            t = self.sum()
            self.expect(")")
            return t
        if tok[0] == "id":
            if tok[1] == "true" and not self._infix_follows():
                self.next()
                return st.one
            if tok[1] == "false" and not self._infix_follows():
                self.next()
                return st.zero
            return self.atom()
        what = tok[1] or "end of input"
        raise ParseError(f"syntax error: unexpected {what!r}", tok[2])

    def _infix_follows(self) -> bool:
        t = self.peek(1)
        return t[0] == "op"

    def atom(self) -> Term:
        th = self.eng.theory
        head = self.next()
        start = head[2]
        if self.at("("):
            self.next()
            args = self._args()
            t = th.parse_call(head[1], args, self)
            if t is None:
                raise ParseError(f"unknown atom: {head[1]}({', '.join(self.text(a) for a in args)})", start)
            return t
        lhs = head[1]
        if self.at("["):
            self.next()
            key = []
            while not self.at("]"):
                t = self.peek()
                if t[0] == "eof":
                    raise ParseError("syntax error: missing ']'", t[2])
                key.append(self.next())
            self.next()
            lhs = f"{lhs}[{self.text(key)}]"
        if self.peek()[0] == "op":
            op = self.next()[1]
            rhs = self._rhs()
            t = th.parse_infix(lhs, op, rhs, self)
            if t is None:
                raise ParseError(f"unknown atom: {lhs}{op}{rhs}", start)
            return t
        t = th.parse_word(lhs, self)
        if t is None:
            raise ParseError(f"unknown atom: {lhs}", start)
        return t

    def _args(self) -> list[list]:
        """Comma-separated token lists up to the matching ')'."""
        args: list[list] = []
        cur: list = []
        depth = 0
        while True:
            t = self.peek()
            if t[0] == "eof":
                raise ParseError("syntax error: missing ')'", t[2])
            self.next()
            if t[0] == "p" and t[1] in "([":
                depth += 1
            elif t[0] == "p" and t[1] in ")]":
                if depth == 0:
                    break
                depth -= 1
            elif t[0] == "p" and t[1] == "," and depth == 0:
                args.append(cur)
                cur = []
                continue
            cur.append(t)
        if cur or args:
            args.append(cur)
        return args

    def _rhs(self) -> str:
        t = self.peek()
        if t[0] == "num":
            return self.next()[1]
        if t[0] == "id":
            name = self.next()[1]
            if self.at("("):
                self.next()
                args = self._args()
                return f"{name}({','.join(self.text(a) for a in args)})"
            return name
        raise ParseError(f"syntax error: expected a value, found {t[1] or 'end of input'!r}", t[2])


def parse(src: str, eng) -> Term:
    p = Parser(src, eng)
    t = p.sum()
    p.expect_eof()
    return t
