"""Command-line front end.

Exit codes: 0 and 1 are query answers (equivalent/not, empty/nonempty,
valid/invalid); 2 means a parse or usage error; 3 means normalization ran
out of fuel or hit a solver failure.
"""
from __future__ import annotations

import argparse
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from io import StringIO

from .automata import AutomatonOverflow, build_term_automaton, product, product_dot, term_dot
from .engine import KMT
from .normal import FuelExhausted, PushbackCycle
from .oracle import OracleBudgetError, show_trace
from .parser import ParseError
from .terms import KernelError
from .theory import Budget, TheoryError, theory_names

EXIT_USAGE = 2
EXIT_FUEL = 3


class Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise Usage(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="kmt", description="Decide equivalence and emptiness of KAT terms modulo a theory.")
    ap.add_argument("--theory", default="incnat", help="theory name, e.g. incnat, ltlf(incnat), ltlf-incnat")
    ap.add_argument("--fuel", type=int, default=10**6, help="normalization step budget")
    ap.add_argument("--states", type=int, default=4, help="largest value the oracle enumerates")
    ap.add_argument("--trace-len", type=int, default=3, help="longest run the oracle explores")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--batch", metavar="FILE", help="run one query per line of FILE concurrently")
    ap.add_argument("--debug", action="store_true", help="check measure decrease during normalization")
    # budget flags may also follow the subcommand; SUPPRESS keeps the global values
    bud = argparse.ArgumentParser(add_help=False)
    bud.add_argument("--states", type=int, default=argparse.SUPPRESS)
    bud.add_argument("--trace-len", type=int, default=argparse.SUPPRESS)
    bud.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="cmd")
    p = sub.add_parser("equiv", help="decide p == q")
    p.add_argument("p")
    p.add_argument("q")
    p = sub.add_parser("empty", help="decide whether p accepts nothing")
    p.add_argument("p")
    p = sub.add_parser("normalize", help="print the pushback normal form")
    p.add_argument("p")
    p = sub.add_parser("oracle-equiv", parents=[bud], help="compare p and q on bounded traces")
    p.add_argument("p")
    p.add_argument("q")
    sub.add_parser("validate-theory", parents=[bud], help="check the theory's pushback and subterm contract")
    p = sub.add_parser("dot", help="write the automaton for p in DOT format")
    p.add_argument("p")
    p.add_argument("-o", "--output", metavar="FILE")
    p.add_argument("--kind", choices=("product", "term"), default="product")
    sub.add_parser("theories", help="list theory names")
    return ap


def _budget(a) -> Budget:
    return Budget(states=a.states, trace_len=a.trace_len, seed=a.seed)


def run(args: argparse.Namespace, out) -> int:
    if args.cmd == "theories":
        print("\n".join(theory_names()), file=out)
        return 0
    eng = KMT(args.theory, fuel=args.fuel, debug=args.debug)
    cmd = args.cmd
    if cmd == "equiv":
        p, q = eng.parse(args.p), eng.parse(args.q)
        r = eng.equivalent(p, q)
        if r:
            print(f"equivalent (bisimulation of {r.explored} state pairs)", file=out)
            return 0
        print("not equivalent", file=out)
        print(r.witness, file=out)
        return 1
    if cmd == "empty":
        p = eng.parse(args.p)
        r = eng.empty(p)
        if r:
            print(f"empty ({r.explored} states explored)", file=out)
            return 0
        print("nonempty", file=out)
        print(r.witness, file=out)
        return 1
    if cmd == "normalize":
        p = eng.parse(args.p)
        x = eng.normalize(p)
        print(eng.show_nf(x), file=out)
        for v in eng.measure_violations:
            print(f"measure: {v}", file=sys.stderr)
        return 0
    if cmd == "oracle-equiv":
        p, q = eng.parse(args.p), eng.parse(args.q)
        ok, cex = eng.equiv_bounded(p, q, _budget(args))
        if ok:
            print(f"equivalent up to {args.trace_len} actions", file=out)
            return 0
        t0, diff = cex
        print("not equivalent", file=out)
        print(f"input:  {show_trace(t0)}\noutput: {show_trace(diff)}", file=out)
        return 1
    if cmd == "validate-theory":
        rep = eng.validate(_budget(args))
        print(rep, file=out)
        return 0 if rep.ok else 1
    if cmd == "dot":
        p = eng.parse(args.p)
        if args.kind == "term":
            text = term_dot(eng, build_term_automaton(eng, p))
        else:
            text = product_dot(eng, product(eng, p))
        if args.output:
            with open(args.output, "w", encoding="utf-8") as f:
                f.write(text)
        else:
            out.write(text)
        return 0
    raise Usage("missing subcommand")


def _guarded(args, out, err) -> int:
    try:
        return run(args, out)
    except (ParseError, KernelError, TheoryError, Usage) as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except (FuelExhausted, PushbackCycle, OracleBudgetError, AutomatonOverflow, RecursionError) as e:
        print(f"error: {e}", file=err)
        return EXIT_FUEL


def _batch(ap, base: argparse.Namespace, path: str, out, err) -> int:
    with open(path, encoding="utf-8") as f:
        lines = [ln.strip() for ln in f if ln.strip() and not ln.lstrip().startswith("#")]
    globals_ = [f"--theory={base.theory}", f"--fuel={base.fuel}", f"--states={base.states}",
                f"--trace-len={base.trace_len}", f"--seed={base.seed}"]

    def one(line):
        buf = StringIO()
        try:
            a = ap.parse_args(globals_ + shlex.split(line))
        except Usage as e:
            return EXIT_USAGE, f"error: {e}\n"
        code = _guarded(a, buf, buf)
        return code, buf.getvalue()

    with ThreadPoolExecutor() as ex:
        results = list(ex.map(one, lines))
    worst = 0
    for line, (code, text) in zip(lines, results):
        out.write(f"$ {line}\n{text}[exit {code}]\n")
        worst = max(worst, code)
    return worst


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except Usage as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.batch:
        try:
            return _batch(ap, args, args.batch, sys.stdout, sys.stderr)
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
    if args.cmd is None:
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    return _guarded(args, sys.stdout, sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
