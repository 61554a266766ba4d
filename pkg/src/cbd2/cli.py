"""Command-line interface: ``cbd <verb> ...``.

Exit codes: 0 success, 2 parse or validation failure, 3 joint outcome
space over budget, 4 any other domain error.
"""

from __future__ import annotations

import argparse
import logging
import random
import sys

from . import contextuality as cx
from . import corpus, io
from .coupling import DEFAULT_BUDGET, enumerate_multimaximal, multimaximal_binary, multimaximal_exists
from .errors import CbdError, ParseError, TooLarge, UnknownContent, ValidationError
from .lp import to_lp_text
from .model import Cell, connection_of, is_consistently_connected, validate_system

EXIT_OK, EXIT_INVALID, EXIT_TOO_LARGE, EXIT_DOMAIN = 0, 2, 3, 4


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _load(path: str):
    return validate_system(io.parse_system(_read(path)))


def _label_lookup(system, content: str):
    if content not in system.contents:
        raise UnknownContent(content)
    vs = system.value_set(content)
    by_text = {str(v): v for v in vs.labels}

    def find(text: str):
        text = text.strip()
        if text not in by_text:
            raise ParseError(f"value {text!r} is not in {list(vs.labels)} for content {content}")
        return by_text[text]
    return find


def _cmd_validate(args):
    system = _load(args.input)
    cc = is_consistently_connected(system)
    return {"valid": True, "contents": len(system.contents), "contexts": len(system.contexts),
            "cells": len(system.cells), "binary": system.is_binary(),
            "consistently_connected": cc.consistent, "inconsistent_connections": cc.offending}


def _cmd_coupling(args):
    system = _load(args.input)
    contents = [args.content] if args.content else list(system.contents)
    out = []
    for q in contents:
        conn = connection_of(system, q)
        entry = {"connection": q, "cells": [str(c) for c in conn.cells],
                 "binary": conn.value_set.is_binary}
        if conn.value_set.is_binary:
            entry["method"] = "staircase"
            entry["multimaximal_exists"] = True
            entry["multimaximal_coupling"] = io.distribution_to_obj(multimaximal_binary(conn).dist)
        else:
            entry["method"] = "lp"
            res = multimaximal_exists(conn, mode=args.mode, budget=args.budget)
            entry["multimaximal_exists"] = res.exists
            if res.exists:
                entry["multimaximal_coupling"] = io.distribution_to_obj(res.coupling.dist)
                if args.limit:
                    verts = enumerate_multimaximal(conn, limit=args.limit, budget=args.budget)
                    entry["vertices"] = [io.distribution_to_obj(v.dist) for v in verts]
            else:
                rows = [(r.name, y) for r, y in zip(res.program.constraints, res.certificate)
                        if y != 0]
                entry["certificate"] = io.certificate_to_obj(rows)
        out.append(entry)
    return {"connections": out}


def _cmd_check(args):
    system = _load(args.input)
    report = cx.check(system, mode=args.mode, budget=args.budget)
    obj = {"mode": args.mode, **io.report_to_obj(report, include_measure=False)}
    if args.pairs:
        pairs = cx.check_pair_consistency(system, mode=args.mode, budget=args.budget)
        obj["context_pairs"] = {
            "checked": pairs.pairs_checked,
            "contextual": [[a, b] for a, b, _ in pairs.contextual_pairs],
            "note": "an empty list does not imply the whole system is noncontextual",
        }
    return obj


def _cmd_measure(args):
    system = _load(args.input)
    report = cx.measure(system, mode=args.mode, budget=args.budget)
    return {"mode": args.mode, **io.report_to_obj(report)}


def _cmd_subsystem(args):
    system = _load(args.input)
    drop = [Cell.parse(t) for t in args.drop]
    return cx.subsystem(system, drop)


def _parse_labels(find, text: str) -> list:
    return [find(t) for t in text.split(",") if t.strip()]


def _cmd_dichotomize(args):
    system = _load(args.input)
    splits = None
    if args.split:
        find = _label_lookup(system, args.content)
        splits = tuple(tuple(_parse_labels(find, s)) for s in args.split)
    return corpus.dichotomize(system, corpus.DichotomizationMap(args.content, splits))


def _cmd_coarsen(args):
    system = _load(args.input)
    find = _label_lookup(system, args.content)
    lump = [_parse_labels(find, s) for s in args.lump]
    # Values not mentioned stay in their own singleton block.
    mentioned = {v for block in lump for v in block}
    lump += [[v] for v in system.value_set(args.content).labels if v not in mentioned]
    return corpus.coarse_grain(system, args.content, lump)


def _cmd_gen(args):
    rng = random.Random(args.seed)
    if args.family == "prbox":
        return corpus.prbox()
    if args.family == "cyclic":
        return corpus.cyclic_skeleton(args.rank).random_system(rng)
    if args.family == "cea18":
        return corpus.gen_cea18().random_system(rng)
    return corpus.rex_shape(seed=args.seed)


def _cmd_lp_dump(args):
    system = _load(args.input)
    spec = cx.build_coupling_spec(system, args.budget)
    cells = ",".join(str(c) for c in spec.joint_cells)
    legend = [f"\\ x<j> is the joint mass of ({cells}) at the outcome listed below"]
    legend += [f"\\ x{j}: {','.join(str(v) for v in spec.space.outcome(j))}"
               for j in range(spec.num_vars)]
    return "\n".join(legend) + "\n" + to_lp_text(spec.program(signed=args.signed))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("exact", "fast"), default="exact",
                        help="exact rational simplex, or float warm start verified exactly")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="maximum number of joint outcomes (default %(default)s)")
    common.add_argument("--limit", type=int, default=0, help="vertex enumeration cap")
    common.add_argument("--out", help="write output to FILE instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="cbd", description="Contextuality analysis of c-c systems.")
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, func, help_text, takes_input=True):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        if takes_input:
            sp.add_argument("input", help="system JSON file, or - for stdin")
        sp.set_defaults(func=func)
        return sp

    verb("validate", _cmd_validate, "check a system file against every invariant")
    sp = verb("coupling", _cmd_coupling, "multimaximal couplings of connections")
    sp.add_argument("--content", help="only this connection")
    sp = verb("check", _cmd_check, "noncontextuality verdict with witness or certificate")
    sp.add_argument("--pairs", action="store_true", help="also check every pair of contexts")
    verb("measure", _cmd_measure, "minimal total variation of a quasi-coupling")
    sp = verb("subsystem", _cmd_subsystem, "drop cells and marginalize")
    sp.add_argument("--drop", action="append", default=[], metavar="CONTENT@CONTEXT")
    sp = verb("dichotomize", _cmd_dichotomize, "replace a content by binary split indicators")
    sp.add_argument("--content", required=True)
    sp.add_argument("--split", action="append", metavar="V1,V2,...",
                    help="one split per flag; default is every split")
    sp = verb("coarsen", _cmd_coarsen, "lump values of a content")
    sp.add_argument("--content", required=True)
    sp.add_argument("--lump", action="append", required=True, metavar="V1,V2,...")
    sp = verb("gen", _cmd_gen, "emit a generated system", takes_input=False)
    sp.add_argument("family", choices=("cyclic", "cea18", "prbox", "rex-shape"))
    sp.add_argument("--rank", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp = verb("lp-dump", _cmd_lp_dump, "write the coupling LP in LP text format")
    sp.add_argument("--signed", action="store_true", help="the quasi-coupling variant")
    return p


def _render(result) -> str:
    if isinstance(result, str):
        return result
    if hasattr(result, "bunches"):
        return io.dump_system(result)
    return io.dumps(result)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(kind: str, message: str, **extra) -> str:
    return io.dumps({"error": kind, "message": message, **extra})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        result = args.func(args)
    except ValidationError as exc:
        sys.stdout.write(io.dumps({"valid": False,
                                   "violations": [v.as_dict() for v in exc.violations]}))
        return EXIT_INVALID
    except ParseError as exc:
        sys.stdout.write(_error("ParseError", str(exc)))
        return EXIT_INVALID
    except TooLarge as exc:
        sys.stdout.write(_error("TooLarge", str(exc), size=exc.size, budget=exc.budget))
        return EXIT_TOO_LARGE
    except CbdError as exc:
        sys.stdout.write(_error(type(exc).__name__, str(exc)))
        return EXIT_DOMAIN
    _emit(_render(result), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
