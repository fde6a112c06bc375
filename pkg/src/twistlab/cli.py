"""Command line front end.

Exit codes: 0 success, 1 input error, 2 bound exhausted, 3 out of scope
(exponential stratum, or not of maximal rank).
"""

from __future__ import annotations

import argparse
import sys

from . import dehn, oracle
from .errors import BoundExhausted, InputError, ScopeError, TwistlabError
from .formats import format_aut, format_graphmap, parse_aut, parse_document, _lines
from .graphs import reject_exponential, validate_graphmap
from .nielsen import DEFAULT_BOUND, analyze
from .normalize import good_representative, representative_of
from .words import Endo, invert_automorphism

EXIT_OK, EXIT_INPUT, EXIT_BOUND, EXIT_SCOPE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"usage: {message}")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def load_map(path: str):
    """Read an aut or graphmap file; return a validated graph map."""
    kind, obj = parse_document(_read(path))
    if kind == "aut":
        invert_automorphism(obj)
        return validate_graphmap(representative_of(obj))
    return validate_graphmap(obj)


def load_aut(path: str) -> Endo:
    kind, obj = parse_document(_read(path))
    if kind != "aut":
        raise InputError(f"{path}: an aut block is needed here")
    return obj


def _load_auts(path: str) -> list[Endo]:
    """Several aut blocks in one file, each closed by 'end'."""
    blocks, cur = [], []
    for n, line in _lines(_read(path)):
        cur.append((n, line))
        if line == "end":
            blocks.append(parse_aut(cur))
            cur = []
    if cur:
        raise InputError("missing 'end'")
    return blocks


def cmd_validate(args, out):
    m = load_map(args.file)
    reject_exponential(m)
    out.write("valid\n")
    out.write(f"strata {' '.join(m.kinds())}\n")


def cmd_analyze(args, out):
    out.write(analyze(load_map(args.file), args.bound).format())


def cmd_normalize(args, out):
    res = good_representative(load_map(args.file), args.bound)
    for line in res.log:
        out.write(f"# {line}\n")
    out.write(format_graphmap(res.m))


def cmd_twist(args, out):
    res = good_representative(load_map(args.file), args.bound)
    gg, d, m = dehn.build_graph_of_groups(res.m)
    ok, witness = dehn.verify_twist(gg, d, m)
    out.write(dehn.format_gog(gg, d))
    out.write(f"verified: {'true' if ok else 'false'}\n")
    if witness is not None:
        out.write(f"witness: {witness}\n")


def cmd_act(args, out):
    kind, obj = parse_document(_read(args.file))
    if kind == "aut":
        out.write(f"{obj(obj.basis.word(args.word))}\n")
    else:
        m = validate_graphmap(obj)
        out.write(f"{m.graph.format_path(m.apply(m.graph.parse_path(args.word)))}\n")


def cmd_oracle(args, out):
    sub = args.oracle_cmd
    if sub == "fixed":
        aut = load_aut(args.file)
        for w in oracle.fixed_words(aut, args.max_len):
            out.write(f"fixed {w}\n")
    elif sub == "periodic":
        aut = load_aut(args.file)
        for w, p in oracle.periodic_words(aut, args.max_len, args.max_period):
            out.write(f"periodic {w} period {p}\n")
    elif sub == "similar":
        auts = _load_auts(args.file)
        if len(auts) != 2:
            raise InputError("similar needs exactly two aut blocks")
        res = oracle.similar_bounded(auts[0], auts[1], args.bound)
        out.write(f"similar {res.status}" + (f" {res.witness}" if res.witness is not None else "") + "\n")
    elif sub == "extend":
        auts = _load_auts(args.file)
        conj = [a.basis.word(g) for a, g in zip(auts[1:], args.conjugator)]
        ext = oracle.levitt_extension(auts, conj)
        out.write(format_aut(ext))
        check = oracle.check_extension(ext, auts, args.max_len)
        out.write(f"inside {'true' if check.all_inside else 'false'}\n")
        out.write(f"rank {check.rank}\n")
    elif sub == "class-fix":
        aut = load_aut(args.file)
        res = oracle.fixes_conjugacy_class(aut, aut.basis.word(args.word), args.bound)
        out.write(f"conjugator {res.g}\nfixed {res.fixed}\nrepresentative-twist {res.h}\nrank {res.rank}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="twistlab", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    common.add_argument("--max-len", type=int, default=10)
    common.add_argument("--format", choices=["text"], default="text")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name, fn in [("validate", cmd_validate), ("analyze", cmd_analyze),
                     ("normalize", cmd_normalize), ("twist", cmd_twist)]:
        s = sub.add_parser(name, parents=[common])
        s.add_argument("file")
        s.set_defaults(func=fn)
    s = sub.add_parser("act", parents=[common])
    s.add_argument("file")
    s.add_argument("word")
    s.set_defaults(func=cmd_act)
    o = sub.add_parser("oracle")
    osub = o.add_subparsers(dest="oracle_cmd", required=True, parser_class=_Parser)
    for name in ("fixed", "periodic", "similar", "extend", "class-fix"):
        s = osub.add_parser(name, parents=[common])
        s.add_argument("file")
        s.set_defaults(func=cmd_oracle)
        if name == "periodic":
            s.add_argument("--max-period", type=int, default=6)
        if name == "extend":
            s.add_argument("--conjugator", action="append", default=[],
                           help="g_j for the j-th extra block, in order")
        if name == "class-fix":
            s.add_argument("word")
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        args.func(args, out)
        return EXIT_OK
    except BoundExhausted as exc:
        err.write(f"error: {exc}\n")
        return EXIT_BOUND
    except ScopeError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_SCOPE
    except (InputError, TwistlabError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
