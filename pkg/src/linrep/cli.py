"""Command-line surface.

Subcommands: analyze (classification report), spectrum (periodic-approximant
bands as CSV), partition (1-partition cuts and preimage), transcendence
(stutter premises and expansion value), catalog (list/export named
definitions).

Exit codes: 0 decided, 1 input error, 3 undecided-at-depth, 4 spectrum
requested for a system without a minimality certificate (computed anyway).
Identical inputs and flags produce byte-identical outputs; reports carry the
effective parameter values instead of timestamps.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import catalog as cat
from . import numtheory as nt
from . import recognizer as rec
from .classify import UNDECIDED, YES, classify
from .spectral import band_spectrum
from .substitution import (
    EmptySubshiftError,
    Substitution,
    SubstitutionError,
    prune_to_reachable,
    validate,
)


def _load_definition(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SystemExit(_fail(f"cannot read {path}: {exc}"))
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemExit(_fail(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}"))


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _write_json(path: str, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _prepare(definition: dict) -> tuple[Substitution, list[str]]:
    report = validate(definition)
    notes = []
    s = report.substitution
    if not report.full_reachability:
        s = prune_to_reachable(s, report.witness)
        notes.append(
            f"alphabet pruned to letters reachable from {report.witness!r}: "
            f"{''.join(s.letters)}"
        )
    return s, notes


def cmd_analyze(args: argparse.Namespace) -> int:
    definition = _load_definition(args.definition)
    try:
        s, notes = _prepare(definition)
        report = classify(
            s,
            compat_depth=args.depth,
            aperiodic_depth=args.depth + 24,
            growth_nmax=args.nmax,
        )
    except EmptySubshiftError as exc:
        return _fail(str(exc))
    except SubstitutionError as exc:
        return _fail(str(exc))

    rules = ", ".join(f"{a}->{s.rules[a]}" for a in s.letters)
    print(f"substitution {s.name or '?'}: {rules}")
    for note in notes:
        print(f"note: {note}")
    print(f"growing letters: {''.join(sorted(report.split.growing)) or '-'}"
          f"   bounded letters: {''.join(sorted(report.split.bounded)) or '-'}")
    print(f"language/subshift compatibility: {report.compatibility.status}"
          + _compat_note(report))
    print(f"primitive: {'yes' if report.primitive.primitive else 'no'}"
          + (f" (power {report.primitive.power})" if report.primitive.primitive else ""))
    print(f"minimal: {report.minimal}" + _minimal_note(report))
    print(f"linearly repetitive: {report.linearly_repetitive}")
    ue_note = "" if report.minimal == YES else " (not implied either way without minimality)"
    print(f"uniquely ergodic: {report.uniquely_ergodic}{ue_note}")
    p = report.periodicity
    if p.status == "periodic":
        print(f"periodic: yes (period {p.period!r}, detected at length {p.depth})")
    else:
        print(f"periodic: {p.status} (depth {p.depth})")
    if report.lr is not None:
        print(
            f"repetitivity constant: {report.lr.value:.6g} "
            f"(G={report.lr.G}, theta={report.lr.growth.theta:.12g}, "
            f"lambda={report.lr.growth.lambda_v:.6g}, rho={report.lr.growth.rho_v:.6g})"
        )
    for caveat in report.depth_caveats:
        print(f"caveat: {caveat}")

    if args.json:
        payload = report.to_json_dict()
        payload["depth_caveats"] = notes + payload["depth_caveats"]
        payload["parameters"] = {"depth": args.depth, "nmax": args.nmax}
        _write_json(args.json, payload)

    undecided = (
        report.minimal == UNDECIDED
        or report.linearly_repetitive == UNDECIDED
        or report.periodicity.status == UNDECIDED
    )
    return 3 if undecided else 0


def _compat_note(report) -> str:
    d = report.compatibility.detail
    if report.compatibility.status == "fails-certified":
        return f" (factor {d['blocked_factor']!r} has no {d['side']} extension)"
    if report.compatibility.status == "holds-certified":
        if d.get("kind") == "interior-recurrence":
            return f" (letter {d['letter']!r} recurs inside its power-{d['power']} image)"
        return f" (two-sided seed {d['left']}.{d['right']}, power {d['power']})"
    return ""


def _minimal_note(report) -> str:
    if report.certificate is not None:
        c = report.certificate
        return f" (letter {c.letter!r} with gap bound {c.kappa}, block bound {c.bblock_bound})"
    if report.counterexample is not None:
        return f" ({report.counterexample.kind})"
    return ""


def cmd_spectrum(args: argparse.Namespace) -> int:
    definition = _load_definition(args.definition)
    try:
        s, notes = _prepare(definition)
    except SubstitutionError as exc:
        return _fail(str(exc))
    window = None
    if args.window is not None:
        lo, hi = args.window
        if not (hi > lo):
            return _fail(f"inverted or empty energy window [{lo}, {hi}]")
        window = (lo, hi)
    try:
        report = classify(s)
    except SubstitutionError as exc:
        return _fail(str(exc))
    letter = report.certificate.letter if report.certificate else min(report.split.growing)

    if args.levels is not None:
        levels = list(range(args.levels[0], args.levels[1] + 1))
    else:
        levels = [args.level]
    rows = []
    for k in levels:
        spec = band_spectrum(
            s, letter, k, window=window, grid_per_unit=args.grid, threads=args.threads
        )
        rows.append(spec)
        merged = "  [possible band merging]" if spec.possible_merging else ""
        print(
            f"level {k}: period |{spec.period_word[:24]}{'...' if len(spec.period_word) > 24 else ''}|"
            f" = {len(spec.period_word)}, {spec.band_count} bands,"
            f" total measure {spec.total_measure:.10g}{merged}"
        )
    if args.csv:
        lines = ["level,band_index,E_minus,E_plus"]
        for spec in rows:
            for i, (lo, hi) in enumerate(spec.bands):
                lines.append(f"{spec.level},{i},{lo:.17g},{hi:.17g}")
        Path(args.csv).write_text("\n".join(lines) + "\n")
    if report.minimal != YES:
        print(
            f"warning: system is not certified minimal (status {report.minimal!r}); "
            "bands describe the chosen periodic word only",
            file=sys.stderr,
        )
        return 4
    return 0


def cmd_partition(args: argparse.Namespace) -> int:
    definition = _load_definition(args.definition)
    try:
        s, _ = _prepare(definition)
        a, b = rec.shape_letters(s)
        report = classify(s)
        if report.primitive.primitive:
            return _fail("requires nonprimitive two-letter shape")
        factors = report.factors
        rule = rec.recognition_rule(s, factors, report)
        if args.word is not None:
            target = args.word
            foreign = set(target) - set(s.letters)
            if foreign:
                return _fail(f"word uses foreign symbols {sorted(foreign)}")
        else:
            target = rec._long_sample(s, a, args.prefix)
        parts = rec.enumerate_one_partitions(s, target)
        if not parts:
            return _fail("word admits no 1-partition (not a factor of the language?)")
        L = rule.half_width
        interior = parts[0].interior_cuts(L)
        distinct = {p.interior_cuts(L) for p in parts}
        print(f"half-width L = {L} ({rule.route}); window set size {len(rule.windows)}")
        print(f"1-partitions: {len(parts)}; distinct interior cut-sets: {len(distinct)}")
        print(f"interior cuts: {list(interior)}")
        if len(target) > 4 * L + 2:
            preimage, offset = rec.desubstitute(s, target, rule)
            print(f"preimage (from offset {offset}): {preimage}")
        if args.json:
            payload = {
                "schema_version": "1",
                "depth_caveats": [
                    f"window rule trained on factors of length {rule.training_length}, "
                    f"validated on {rule.validated_on} fresh samples"
                ],
                "word_length": len(target),
                "half_width": L,
                "route": rule.route,
                "cut_positions": list(interior),
                "blocks": [list(p.blocks[:50]) for p in parts[:1]],
                "partition_count": len(parts),
            }
            _write_json(args.json, payload)
    except rec.ShapeError as exc:
        return _fail(f"requires nonprimitive two-letter shape: {exc}")
    except SubstitutionError as exc:
        return _fail(str(exc))
    return 0


def cmd_transcendence(args: argparse.Namespace) -> int:
    definition = _load_definition(args.definition)
    try:
        s, _ = _prepare(definition)
        if len(s.letters) != 2:
            return _fail("requires a two-letter substitution")
        report = classify(s)
        if report.primitive.primitive:
            print(
                "primitive case: already covered by the Allouche-Zamboni primitive "
                "criterion; not analyzed here"
            )
            return 0
        tr = nt.transcendence_report(s, report, depth=args.depth, bits=args.bits, base=args.base)
    except nt.CaseDetectionError as exc:
        return _fail(str(exc))
    except SubstitutionError as exc:
        return _fail(str(exc))
    except ValueError as exc:
        return _fail(str(exc))

    w = tr.witness
    if w.case_tag == nt.CASE_SEPARATED:
        shape = f"{w.zero} {w.one}^{w.k} {w.zero} w {w.zero}"
    else:
        shape = f"{w.zero} {w.zero} w {w.zero}"
    print(f"case: {w.case_tag} ({shape}), k={w.k}, w={w.w!r}, prefix p={w.p!r}")
    print(f"depth {w.depth}: |U_n| -> {w.u_lengths[-1]}, |V_n| -> {w.v_lengths[-1]}, "
          f"|V'_n| -> {w.v_prime_lengths[-1]}")
    c = tr.conditions
    print(f"lengths diverge: {c.lengths_diverge}")
    print(f"prefix ratio bounded: {c.prefix_ratio_bounded} (max {c.max_prefix_ratio:.6g})")
    print(f"core ratio positive: {c.core_ratio_positive} (min {c.min_core_ratio:.6g})")
    print(f"value ({tr.value.bits} bits, base {tr.value.base}): {tr.value.decimal_string()}")
    print(tr.attribution)
    if args.dump_digits:
        need = tr.value.digits_used
        from .substitution import fixed_point_prefix

        u = fixed_point_prefix(s, w.zero, need)
        nt.dump_digits(args.dump_digits, [tr.digit_letter_map[ch] for ch in u])
    if args.json:
        _write_json(args.json, tr.to_json_dict())
    return 0


def cmd_catalog(args: argparse.Namespace) -> int:
    if args.export:
        paths = cat.export(args.export)
        for p in paths:
            print(p)
        return 0
    for name in cat.names():
        d = cat.definition(name)
        rules = ", ".join(f"{k}->{v}" for k, v in sorted(d["rules"].items()))
        print(f"{name}: {rules}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linrep",
        description="substitution subshifts: classification, spectra, partitions, expansions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify a substitution definition")
    p.add_argument("definition")
    p.add_argument("--depth", type=int, default=16)
    p.add_argument("--nmax", type=int, default=30)
    p.add_argument("--json", metavar="OUT")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("spectrum", help="periodic-approximant band spectrum")
    p.add_argument("definition")
    p.add_argument("--level", type=int, default=6)
    p.add_argument("--levels", type=int, nargs=2, metavar=("FROM", "TO"))
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--grid", type=int, default=10**4, help="grid points per unit energy")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--csv", metavar="OUT")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("partition", help="1-partition cuts and preimage")
    p.add_argument("definition")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--word")
    group.add_argument("--prefix", type=int)
    p.add_argument("--json", metavar="OUT")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("transcendence", help="stutter premises and expansion value")
    p.add_argument("definition")
    p.add_argument("--depth", type=int, default=32)
    p.add_argument("--bits", type=int, default=160)
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--json", metavar="OUT")
    p.add_argument("--dump-digits", metavar="OUT")
    p.set_defaults(func=cmd_transcendence)

    p = sub.add_parser("catalog", help="list or export named definitions")
    p.add_argument("--export", metavar="DIR")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 1


if __name__ == "__main__":
    sys.exit(main())
