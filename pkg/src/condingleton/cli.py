"""Command line entry point.

Exit codes: 0 success or verified, 1 verification failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import ci, dist, entropy, essential, inference, ingleton, model


class UsageError(Exception):
    pass


def thread_count(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("INGLETON_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"INGLETON_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def emit(args, data, text: str) -> None:
    if args.json:
        print(json.dumps(data, indent=2, ensure_ascii=False, sort_keys=True))
    else:
        print(text)


def _load_table(path: str) -> dist.JointTable:
    try:
        return dist.load_table(path)
    except OSError as exc:
        raise UsageError(str(exc))


# ---------------------------------------------------------------------------
# subcommands

def cmd_verify_dist(args) -> int:
    try:
        t = _load_table(args.file)
    except dist.DistributionError as exc:
        print(f"invalid distribution: {exc}", file=sys.stderr)
        return 1
    h = entropy.entropy_vector(t)
    structure = ci.ci_structure(t)
    rows, ok = [], True
    for lab in ingleton.all_ingleton_labels():
        f = ingleton.ingleton_functional(lab)
        cert = entropy.exact_sign(f, t)
        value = entropy.evaluate(f, h)
        if abs(value) > 1e-9 and (value > 0) - (value < 0) != cert.sign:
            ok = False
        rows.append({"ingleton": str(lab), "sign": cert.sign, "value": value, "scale": cert.scale})
    lines = [f"CI structure: {structure}"]
    lines += [f"◻({r['ingleton']}): sign={r['sign']:+d} value={r['value']:.6g}" for r in rows]
    emit(args, {"ci_structure": structure.to_strings(), "ingleton": rows, "consistent": ok},
         "\n".join(lines))
    return 0 if ok else 1


def cmd_masks(args) -> int:
    idents = list(ingleton.MASKS) + [ingleton.DAGGER_1, ingleton.DAGGER_2]
    results, lines = [], []
    for mk in idents:
        good = mk.verify()
        results.append({"name": mk.name, "identity": str(mk), "verified": good})
        lines.append(f"({mk.name}) {mk}" + (f"  [{'ok' if good else 'FAILED'}]" if args.verify else ""))
    for name, lhs, added, rhs in ingleton.score_identities():
        good = ingleton.verify_score_identity(lhs, added, rhs)
        text = f"◻(XY|ZU) + {ingleton.format_combination(added)} = {ingleton.format_combination(rhs)}"
        results.append({"name": name, "identity": text, "verified": good})
        lines.append(f"({name}) {text}" + (f"  [{'ok' if good else 'FAILED'}]" if args.verify else ""))
    emit(args, results, "\n".join(lines))
    if args.verify and not all(r["verified"] for r in results):
        return 1
    return 0


def cmd_circuits(args) -> int:
    cs = ingleton.circuits(ingleton.functional_matrix(), workers=thread_count(args.threads))
    census = ingleton.circuit_census(cs)
    if args.out:
        names = ingleton.column_names()
        with open(args.out, "w") as fh:
            for c in cs:
                fh.write(c.to_csv_line(names) + "\n")
    text = f"total={census['total']} ingleton={census['ingleton']} shortest={census['shortest']}"
    if args.count:
        emit(args, census, text)
        return 0
    orbits = ingleton.name_orbits(ingleton.shortest_masks(cs))
    sizes = {name: len(members) for name, members in sorted(orbits.items())}
    lines = [text] + [f"{name}: orbit size {n}" for name, n in sizes.items()]
    emit(args, {**census, "orbits": sizes}, "\n".join(lines))
    return 0


def cmd_search(args) -> int:
    if args.max_b < 1 or args.max_d < 1 or args.inflate < 0:
        raise UsageError("bounds must be positive and inflation non-negative")
    bounds = model.default_bounds(args.max_b, args.max_d, Fraction(args.inflate) / 100)
    found = model.search_rational(bounds)
    lines = [f"(a,b,c,d)=({r.a},{r.b},{r.c},{r.d}) p0110={r.p0110} "
             f"sign={r.certificate.sign} in_box={r.in_box}" for r in found]
    emit(args, [r.to_dict() for r in found], "\n".join(lines) if lines else "no counterexample found")
    return 0 if found else 1


def cmd_heatmap(args) -> int:
    if args.res < 2:
        raise UsageError("--res must be at least 2")
    cells = model.heatmap(tuple(args.xrange), tuple(args.yrange), args.res,
                          workers=thread_count(args.threads))
    csv = model.heatmap_csv(cells)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv)
        counts = {s: sum(1 for c in cells if c.status == s) for s in (model.INVALID, model.NEG, model.POS)}
        emit(args, counts, " ".join(f"{k}={v}" for k, v in counts.items()))
    else:
        sys.stdout.write(csv)
    return 0


def _parse_assumptions(text: str) -> list[ci.CIStatement]:
    try:
        return [ci.CIStatement.parse(s) for s in text.replace(";", ",").split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_essential(args) -> int:
    assumptions = _parse_assumptions(args.assume)
    if args.sample:
        cert, tried = essential.search_essential(assumptions, args.seed, args.sample, args.order)
        if cert is None:
            emit(args, {"certificate": None, "tried": tried}, f"no certificate in {tried} families")
            return 1
        emit(args, {"certificate": cert.to_dict(), "tried": tried},
             f"certificate found after {tried} families\n" + _describe(cert))
        return 0
    if args.family:
        try:
            with open(args.family) as fh:
                fam = essential.CurveFamily.from_dict(json.load(fh))
        except OSError as exc:
            raise UsageError(str(exc))
    else:
        fam = essential.SPARSE_FAMILY
    try:
        cert = essential.prove_essential(assumptions, fam, args.order)
    except (essential.LimitViolatesAssumptions, essential.Inconclusive) as exc:
        emit(args, {"certificate": None, "reason": str(exc)}, f"inconclusive: {exc}")
        return 1
    emit(args, {"certificate": cert.to_dict()}, _describe(cert))
    return 0


def _describe(cert: essential.EssentialCertificate) -> str:
    lines = [f"family: {json.dumps(cert.family.to_dict())}" if cert.family else "family: <atoms>",
             f"leading order k={cert.order}",
             f"◻: d_{cert.order}={cert.conclusion_d}, c_{cert.order}={cert.conclusion_c}"]
    lines += [f"△({s}): c_{cert.order}={c}" for s, c in cert.assumptions]
    return "\n".join(lines)


def cmd_closure(args) -> int:
    try:
        db = inference.AntecedentDB.load(args.db) if args.db else inference.default_db()
    except OSError as exc:
        raise UsageError(str(exc))
    except (inference.InvalidRecord, inference.InconsistentDB, dist.DistributionError) as exc:
        print(f"invalid database: {exc}", file=sys.stderr)
        return 1
    interval = None
    if args.interval:
        try:
            interval = tuple(inference.parse_structure(s) for s in args.interval)
        except ValueError as exc:
            raise UsageError(str(exc))
    report = inference.closure(db, interval)
    text = f"uncovered before={len(report.before)} after={len(report.after)}"
    if report.placeholders and interval is None:
        text += f" (full lattice; {report.placeholders} counterexample records missing)"
    emit(args, report.to_dict(), text)
    # the full lattice is only a claim once every external record is present
    if interval is None and report.placeholders:
        return 0
    return 0 if not report.after else 1


def cmd_score(args) -> int:
    try:
        t = _load_table(args.file)
    except dist.DistributionError as exc:
        print(f"invalid distribution: {exc}", file=sys.stderr)
        return 1
    which = "rho1" if args.rho1 else "rho2"
    value = model.score(t, which)
    cert = entropy.exact_sign(model.SCORES[which], t)
    emit(args, {"score": which, "value": value, "sign": cert.sign},
         f"{which}={value:.10g} sign={cert.sign:+d}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def global_flags(parser, defaults: bool) -> None:
        # subcommands repeat the flags without defaults so they don't clobber earlier values
        kw = {} if defaults else {"default": argparse.SUPPRESS}
        parser.add_argument("--json", action="store_true", help="machine-readable output", **kw)
        parser.add_argument("--threads", type=int, help="worker processes "
                            "(default: $INGLETON_THREADS or all cores)", **kw)

    common = argparse.ArgumentParser(add_help=False)
    global_flags(common, defaults=False)
    p = argparse.ArgumentParser(prog="condingleton", description="Conditional Ingleton inequality toolkit")
    global_flags(p, defaults=True)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-dist", parents=[common], help="CI structure and Ingleton signs of a table")
    s.add_argument("file")
    s.set_defaults(func=cmd_verify_dist)

    s = sub.add_parser("masks", parents=[common], help="print the mask identities")
    s.add_argument("--verify", action="store_true")
    s.set_defaults(func=cmd_masks)

    s = sub.add_parser("circuits", parents=[common], help="enumerate circuits of the functional matrix")
    s.add_argument("--count", action="store_true", help="print only the census line")
    s.add_argument("--out", help="write all circuits as CSV")
    s.set_defaults(func=cmd_circuits)

    s = sub.add_parser("search", parents=[common], help="rational counterexample search")
    s.add_argument("--max-b", type=int, default=99)
    s.add_argument("--max-d", type=int, default=11)
    s.add_argument("--inflate", type=Fraction, default=Fraction(10), help="box inflation in percent")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("heatmap", parents=[common], help="classify a (p1111, p1011) grid")
    s.add_argument("--res", type=int, default=100)
    s.add_argument("--out")
    s.add_argument("--xrange", type=float, nargs=2, default=(0.0, 1.0), metavar=("LO", "HI"))
    s.add_argument("--yrange", type=float, nargs=2, default=(0.0, 0.1), metavar=("LO", "HI"))
    s.set_defaults(func=cmd_heatmap)

    s = sub.add_parser("essential", parents=[common], help="essential conditionality certificate")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--family", help="JSON file with keys A, B, C and optional D")
    g.add_argument("--sample", type=int, metavar="N", help="try N random families")
    s.add_argument("--order", type=int, default=4)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--assume", default="X⊥Z|U,Y⊥Z|U", help="comma separated CI statements")
    s.set_defaults(func=cmd_essential)

    s = sub.add_parser("closure", parents=[common], help="coverage of CI structures")
    s.add_argument("--db", help="database JSON (default: built-in)")
    s.add_argument("--interval", nargs=2, metavar=("LO", "HI"),
                   help="L0, L1, L2, L or comma separated statements")
    s.set_defaults(func=cmd_closure)

    s = sub.add_parser("score", parents=[common], help="non-Ingleton score of a table")
    s.add_argument("file")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--rho1", action="store_true")
    g.add_argument("--rho2", action="store_true")
    s.set_defaults(func=cmd_score)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
