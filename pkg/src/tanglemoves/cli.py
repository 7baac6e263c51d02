"""Command line interface.

Exit codes: 0 success / certified; 2 usage error; 3 invalid input diagram;
4 verification (replay) failure; 5 resource exhausted; 6 not found within
bounds; 7 target obstructed.
"""

from __future__ import annotations

import argparse
import os
import sys

from .diagram import DiagramError, crossing_sign, validate
from .invariants import circle_counts, find_obstruction, render_effect_table
from .moves import (
    CLASSICAL_MOVES, MOVE_NAMES, catalog, get_move, move_writhe_delta,
)
from .search import (
    Bounds, CAPPED, FOUND, ReplayFailure,
    certificate_from_text, certificate_to_text, realize, replay,
)
from .textio import ParseError, parse_tangle

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_VERIFY = 4
EXIT_RESOURCE = 5
EXIT_UNKNOWN = 6
EXIT_OBSTRUCTED = 7


def _load_tangle(path: str):
    with open(path) as f:
        text = f.read()
    return parse_tangle(text)


def _bounds(args) -> Bounds:
    return Bounds(args.max_crossings, args.max_depth, args.max_states)


def _add_bounds_flags(p):
    p.add_argument("--max-crossings", type=int, default=8)
    p.add_argument("--max-depth", type=int, default=16)
    p.add_argument("--max-states", type=int, default=10_000_000)


def cmd_validate(args) -> int:
    try:
        d = _load_tangle(args.tangle)
    except (ParseError, DiagramError) as e:
        print(f"invalid: {e}")
        return EXIT_INVALID
    rep = validate(d)
    if rep.ok:
        print("valid")
        return EXIT_OK
    for v in rep.violations:
        print(f"violation {v.code}: {v.message}")
    return EXIT_INVALID


def cmd_invariants(args) -> int:
    try:
        d = _load_tangle(args.tangle)
        qv = circle_counts(d)
    except (ParseError, DiagramError) as e:
        print(f"error: {e}")
        return EXIT_INVALID
    print("format: tanglemoves-invariants/1")
    print(f"c+: {qv.cplus}")
    print(f"c-: {qv.cminus}")
    print(f"w: {qv.w}")
    print(f"rot: {qv.rot}")
    return EXIT_OK


def cmd_effect_table(args) -> int:
    if args.table:
        from .invariants import render_effect_grid
        sys.stdout.write(render_effect_grid())
    else:
        sys.stdout.write(render_effect_table())
    return EXIT_OK


def cmd_catalog(args) -> int:
    print("format: tanglemoves-catalog/1")
    for pat in catalog():
        name = pat.id.name
        sig = ",".join(pat.signature)
        signs_l = [crossing_sign(n) for n in pat.left.nodes if n.kind == "crossing"]
        signs_r = [crossing_sign(n) for n in pat.right.nodes if n.kind == "crossing"]
        kinds = sorted({n.kind for side in (pat.left, pat.right)
                        for n in side.nodes if n.kind != "crossing"})
        vertex = kinds[0] if kinds else "-"
        print(f"move {name} legs={pat.left.k} signature={sig} "
              f"signs={''.join('+' if s > 0 else '-' for s in sorted(signs_l))}"
              f">{''.join('+' if s > 0 else '-' for s in sorted(signs_r))} "
              f"vertex={vertex} writhe-delta={move_writhe_delta(name):+d}")
    print("total: 28")
    return EXIT_OK


def cmd_search(args) -> int:
    moves = frozenset(args.set.split(","))
    for mv in moves | {args.target}:
        if mv not in MOVE_NAMES:
            print(f"unknown move {mv}")
            return EXIT_USAGE
    pat = get_move(args.target)
    if args.target in CLASSICAL_MOVES and moves <= set(CLASSICAL_MOVES):
        q = find_obstruction(moves, args.target)
        if q is not None:
            print(f"obstructed: {args.target} changes {q}, the set preserves it")
            return EXIT_OBSTRUCTED
    out = realize(pat.left, pat.right, moves, _bounds(args))
    if out.status == FOUND:
        cert = out.certificate
        print(f"certified: {len(cert)} steps, {out.explored} states explored")
        for st in cert.steps:
            print(f"step: {st.move} {st.direction} {st.embedding_key}")
        if args.emit_certificate:
            with open(args.emit_certificate, "w") as f:
                f.write(certificate_to_text(cert))
        return EXIT_OK
    if out.status == CAPPED:
        print(f"resource-exhausted: {out.explored} states explored")
        return EXIT_RESOURCE
    print(f"unknown: bounded space exhausted, {out.explored} states explored")
    return EXIT_UNKNOWN


def cmd_classify(args) -> int:
    from .classify import classify_all, graph_fixture_suite, graph_minimal_sets_count
    if args.family == "graphs":
        suite = graph_fixture_suite()
        print("format: tanglemoves-graphs/1")
        for target, moves, cert in suite:
            print(f"realized {target} from {'+'.join(moves)} in {len(cert)} steps")
        print(f"graph-minimal-sets: {graph_minimal_sets_count()}")
        return EXIT_OK
    rep = classify_all(args.kind, _bounds(args))
    text = rep.render()
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_verify_fixtures(args) -> int:
    base = args.fixture_dir or os.environ.get("TANGLEMOVES_FIXTURES") or \
        os.path.join(os.path.dirname(__file__), "fixtures", "certificates")
    names = sorted(n for n in os.listdir(base) if n.endswith(".cert"))
    if not names:
        print("no fixture certificates found")
        return EXIT_VERIFY
    failures = 0
    for name in names:
        with open(os.path.join(base, name)) as f:
            cert = certificate_from_text(f.read())
        try:
            replay(cert)
            print(f"ok {name} ({len(cert)} steps)")
        except (ReplayFailure, DiagramError) as e:
            print(f"FAIL {name}: {e}")
            failures += 1
    print(f"verified: {len(names) - failures}/{len(names)}")
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tanglemoves",
        description="Rewriting engine for oriented tangle diagrams")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", help="check a tangle file")
    sp.add_argument("tangle")
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("invariants", help="circle counts and writhe of a tangle")
    sp.add_argument("tangle")
    sp.set_defaults(fn=cmd_invariants)

    sp = sub.add_parser("effect-table", help="move effects on circle quantities")
    sp.add_argument("--table", action="store_true",
                    help="aligned human-readable table instead of records")
    sp.set_defaults(fn=cmd_effect_table)

    sp = sub.add_parser("catalog", help="list the 28 moves")
    sp.set_defaults(fn=cmd_catalog)

    sp = sub.add_parser("search", help="find a certificate for one move")
    sp.add_argument("--set", required=True, help="comma list of move names")
    sp.add_argument("--target", required=True)
    sp.add_argument("--emit-certificate")
    _add_bounds_flags(sp)
    sp.set_defaults(fn=cmd_search)

    sp = sub.add_parser("classify", help="classify candidate move sets")
    sp.add_argument("--family", choices=("knots", "graphs"), default="knots")
    sp.add_argument("--kind", choices=("all4", "composition"), default="composition")
    sp.add_argument("--out")
    _add_bounds_flags(sp)
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("verify-fixtures", help="replay the certificate corpus")
    sp.add_argument("--fixture-dir")
    sp.set_defaults(fn=cmd_verify_fixtures)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
