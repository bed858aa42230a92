"""Command-line interface: ``liaison-forge classify|chain|verify|corpus``.

Exit codes: 0 pass, 1 usage or I/O error, 2 negative result,
3 refused precondition, 4 obstruction detected.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import os
import random
import sys
import time
from contextlib import contextmanager
from typing import Sequence

from . import __version__, corpus
from .groebner import buchberger
from .liaison import (
    CharTwoRefused,
    ChainObstruction,
    GenericityExhausted,
    LiaisonError,
    PreconditionError,
    biliaison_chain,
    check_ht1,
    check_subm,
    check_subsd,
    classify,
    reverify_certificate,
    sylvester_defect,
    sylvester_membership,
    verify_cross_identities,
)
from .pmatrix import PolyMatrix, StructureError, delete_last_row, minor_ideal
from .ring import PolynomialParseError, field_from_char

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NEGATIVE = 2
EXIT_REFUSED = 3
EXIT_OBSTRUCTION = 4

SEED_ENV = "LIAISON_FORGE_SEED"
CORPUS_PREFIX = "corpus:"
SYLVESTER_SAMPLE = 200

log = logging.getLogger("liaison_forge")


class UsageError(Exception):
    pass


class RunReport:
    def __init__(self, command: str, argv: Sequence[str], seed: int | None):
        self.command = command
        self.argv = list(argv)
        self.seed = seed
        self.timings: dict = {}
        self.warnings: list = []
        self.result: dict | None = None
        self.exit_code = EXIT_OK

    @contextmanager
    def phase(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = round(self.timings.get(name, 0.0) + time.perf_counter() - start, 6)

    def to_json(self) -> dict:
        return {
            "tool": "liaison-forge",
            "version": __version__,
            "command": self.command,
            "argv": self.argv,
            "seed": self.seed,
            "timings": self.timings,
            "warnings": self.warnings,
            "exit_code": self.exit_code,
            "result": self.result,
        }


# ---------------------------------------------------------------- input


def parse_field(spec: str):
    spec = spec.strip().lower()
    if spec in ("q", "qq"):
        return field_from_char(0)
    if spec.startswith("zp:"):
        try:
            return field_from_char(int(spec[3:]))
        except ValueError as exc:
            raise UsageError(f"bad field {spec!r}: {exc}") from exc
    raise UsageError(f"bad field {spec!r}; expected q or zp:<prime>")


def load_document(source: str) -> dict:
    """Matrix JSON from a path, or a builtin example ``corpus:<name>[/<part>]``."""
    if source.startswith(CORPUS_PREFIX):
        name, _, part = source[len(CORPUS_PREFIX):].partition("/")
        try:
            entry = corpus.builtin(name)
        except corpus.UnknownEntry as exc:
            raise UsageError(f"unknown corpus entry {exc.args[0]!r}") from exc
        if not part:
            return entry.to_json()
        if part not in entry.extras:
            raise UsageError(f"{name} has no part {part!r}; parts: {sorted(entry.extras)}")
        return {"matrix": entry.extras[part].to_json(), "t": entry.t}
    try:
        with open(source, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {source}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source} is not valid JSON: {exc}") from exc


def matrix_from_document(doc: dict, field_spec: str | None) -> PolyMatrix:
    data = doc.get("matrix", doc) if isinstance(doc, dict) else doc
    try:
        M = PolyMatrix.from_json(data)
        if field_spec:
            M = PolyMatrix.from_json(data, M.ring.with_field(parse_field(field_spec)))
    except (PolynomialParseError, KeyError, TypeError) as exc:
        raise UsageError(f"bad matrix JSON: {exc}") from exc
    return M


def resolve_t(args, doc: dict) -> int:
    if args.t is not None:
        return args.t
    if isinstance(doc, dict) and isinstance(doc.get("t"), int):
        return doc["t"]
    raise UsageError("--t is required (the input does not record a minor size)")


def resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from exc


# ---------------------------------------------------------------- commands


def cmd_classify(args, report: RunReport) -> int:
    with report.phase("parse"):
        doc = load_document(args.input)
        M = matrix_from_document(doc, args.field)
        t = resolve_t(args, doc)
    with report.phase("classify"):
        rep = classify(M, t)
    report.result = rep.to_json()
    if not args.json:
        print(f"verdict: {rep.verdict}" + (f" ({rep.reason})" if rep.reason else ""))
        print(f"  t-homogeneous: {rep.t_homogeneous}")
        print(f"  saturated:     {rep.saturated}")
        print(f"  codim:         {rep.actual_codim} (expected {rep.expected_codim})")
        print(f"  mu:            {rep.mu}")
    return EXIT_OK if rep.positive else EXIT_NEGATIVE


def _print_chain(cert) -> None:
    print(f"chain of {len(cert.steps)} step(s) from t = {cert.t}, seed {cert.seed}")
    if cert.steps:
        print(f"  {'step':>4} {'t':>3} {'a':>3} {'ht I_t(M)':>10} {'ht I_t(O)':>10} {'ht I_t-1(N)':>12} {'ids':>6} {'failed':>6}")
    for k, s in enumerate(cert.steps):
        h = s.heights
        print(
            f"  {k:>4} {s.t:>3} {s.a:>3} {h['ht_ItM']:>10} {h['ht_ItO']:>10} {h['ht_It1N']:>12}"
            f" {s.identities_checked:>6} {s.identities_failed:>6}"
        )
    print(
        f"terminal ideal: mu = {cert.terminal_mu}, height = {cert.terminal_height},"
        f" complete intersection: {cert.terminal_is_ci}"
    )


def cmd_chain(args, report: RunReport) -> int:
    with report.phase("parse"):
        doc = load_document(args.input)
        M = matrix_from_document(doc, args.field)
        t = resolve_t(args, doc)
    with report.phase("chain"):
        cert = biliaison_chain(M, t, report.seed, force_char2=args.force_char2)
    for step in cert.steps:
        report.warnings.extend(w for w in step.warnings if w not in report.warnings)
        if step.retries:
            report.warnings.append(f"step t={step.t} needed {step.retries} retries")
    report.result = cert.to_json()
    if not args.json:
        _print_chain(cert)
    return EXIT_OK


def _verify_cross(M, t, seed, report) -> tuple[bool, dict]:
    O = delete_last_row(M)
    with report.phase("gb"):
        G = buchberger(minor_ideal(O, t))
    with report.phase("identities"):
        rep = verify_cross_identities(M, t, G)
    return rep.failed == 0, rep.to_json()


def _verify_sylvester(M, a, seed, report) -> tuple[bool, dict]:
    n_r, n_c = M.nrows, M.ncols
    if not 1 <= a < min(n_r, n_c):
        raise UsageError(f"sylvester needs 1 <= a < {min(n_r, n_c)}")
    exact = 0
    exact_failed = []
    with report.phase("identities"):
        for rows in itertools.combinations(range(n_r), a):
            for k in (r for r in range(n_r) if r not in rows):
                for cols in itertools.combinations(range(n_c), a):
                    for l in (c for c in range(n_c) if c not in cols):
                        exact += 1
                        if not sylvester_defect(M, rows, k, cols, l).is_zero():
                            exact_failed.append([list(rows), k, list(cols), l])
    rtups = list(itertools.combinations(range(n_r), a))
    ctups = list(itertools.combinations(range(n_c), a))
    quads = list(itertools.product(rtups, ctups, rtups, ctups))
    if len(quads) > SYLVESTER_SAMPLE:
        quads = random.Random(seed).sample(quads, SYLVESTER_SAMPLE)
    with report.phase("gb"):
        G = buchberger(minor_ideal(M, a + 1))
    member_failed = []
    with report.phase("memberships"):
        for i, j, k, l in quads:
            if not sylvester_membership(M, a, (i, j, k, l), G):
                member_failed.append([i, j, k, l])
    ok = not exact_failed and not member_failed
    return ok, {
        "a": a,
        "exact_checked": exact,
        "exact_failed": exact_failed,
        "memberships_checked": len(quads),
        "memberships_failed": member_failed,
    }


def cmd_verify(args, report: RunReport) -> int:
    with report.phase("parse"):
        doc = load_document(args.input)
    if isinstance(doc, dict) and isinstance(doc.get("result"), dict) and "steps" in doc["result"]:
        doc = doc["result"]  # a saved chain report
    if args.kind == "cross" and isinstance(doc, dict) and "steps" in doc:
        with report.phase("identities"):
            reps = reverify_certificate(doc)
        ok = all(r.failed == 0 for r in reps)
        report.result = {"kind": "cross", "certificate_steps": [r.to_json() for r in reps], "ok": ok}
        report.warnings.append("embedded Groebner bases were checked for closure, not recomputed from the minors")
        if not args.json:
            for k, r in enumerate(reps):
                print(f"step {k}: {r.checked} identities, {r.failed} failed")
        return EXIT_OK if ok else EXIT_NEGATIVE
    with report.phase("parse"):
        M = matrix_from_document(doc, args.field)
        t = resolve_t(args, doc)
    kind = args.kind
    if kind == "cross":
        ok, detail = _verify_cross(M, t, report.seed, report)
    elif kind == "sylvester":
        ok, detail = _verify_sylvester(M, t, report.seed, report)
    elif kind == "ht1":
        with report.phase("heights"):
            res = check_ht1(M, t, report.seed)
        ok, detail = res.ok, res.to_json()
    elif kind == "subm":
        with report.phase("heights"):
            res = check_subm(M, t)
        ok, detail = res.condition2, res.to_json()
    else:
        with report.phase("heights"):
            res = check_subsd(M, t)
        ok, detail = res.condition2, res.to_json()
    report.result = {"kind": kind, "ok": ok, **detail}
    if not args.json:
        print(f"verify {kind}: {'pass' if ok else 'fail'}")
        for key, value in detail.items():
            print(f"  {key}: {value}")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_corpus(args, report: RunReport) -> int:
    if args.action == "list":
        listed = [n for n in corpus.names() if not args.only or args.only in n]
        report.result = {"entries": listed}
        if not args.json:
            print("\n".join(listed))
        return EXIT_OK
    if args.action == "dump":
        if not args.name:
            raise UsageError("corpus dump needs an entry name")
        try:
            entry = corpus.builtin(args.name)
        except corpus.UnknownEntry as exc:
            raise UsageError(f"unknown corpus entry {exc.args[0]!r}") from exc
        report.result = entry.to_json()
        if not args.json:
            print(json.dumps(entry.to_json(), indent=2))
        return EXIT_OK
    results = []
    code = EXIT_OK
    for name in corpus.names():
        if args.only and args.only not in name:
            continue
        with report.phase(name):
            checks = corpus.evaluate(corpus.builtin(name), report.seed)
        bad = [c for c in checks if not c.ok]
        results.append({"name": name, "checks": len(checks), "ok": not bad})
        if not args.json:
            print(f"{name:24s} {'ok' if not bad else 'MISMATCH'} ({len(checks)} checks)")
        if bad:
            diff = [{"key": c.key, "expected": repr(c.expected), "actual": repr(c.actual)} for c in bad]
            results[-1]["diff"] = diff
            if not args.json:
                for d in diff:
                    print(f"  {d['key']}: expected {d['expected']}, got {d['actual']}")
            code = EXIT_NEGATIVE
            break
    if not results:
        raise UsageError(f"no corpus entry matches {args.only!r}")
    report.result = {"entries": results}
    return code


# ---------------------------------------------------------------- driver


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the full JSON report")
    common.add_argument("--out", help="also write the JSON report to this path")
    common.add_argument("--seed", type=int, default=None, help=f"seed for generic choices (default ${SEED_ENV} or 0)")
    common.add_argument("-v", "--verbose", action="store_true")

    def matrix_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("input", help="matrix JSON path, or corpus:<name>")
        p.add_argument("--t", type=int, default=None, help="minor size")
        p.add_argument("--field", default=None, help="override the coefficient field: q or zp:<p>")

    parser = argparse.ArgumentParser(
        prog="liaison-forge",
        description="Symmetric determinantal ideals and their biliaison descent.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    matrix_args(sub.add_parser("classify", parents=[common], help="classify I_t of a matrix"))
    p = sub.add_parser("chain", parents=[common], help="run the descent chain")
    matrix_args(p)
    p.add_argument("--force-char2", action="store_true", help="run in characteristic 2 to exhibit the obstruction")
    p = sub.add_parser("verify", parents=[common], help="run one family of checks")
    p.add_argument("kind", choices=["cross", "sylvester", "ht1", "subm", "subsd"])
    matrix_args(p)
    p = sub.add_parser("corpus", parents=[common], help="built-in examples")
    p.add_argument("action", choices=["run", "list", "dump"])
    p.add_argument("name", nargs="?")
    p.add_argument("--only", default=None, help="substring filter on entry names")
    return parser


COMMANDS = {"classify": cmd_classify, "chain": cmd_chain, "verify": cmd_verify, "corpus": cmd_corpus}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    report = RunReport(args.command, argv, None)
    try:
        report.seed = resolve_seed(args)
        code = COMMANDS[args.command](args, report)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except (StructureError, ValueError) as exc:
        if isinstance(exc, PreconditionError):
            print(f"refused: {exc}", file=sys.stderr)
            code = EXIT_REFUSED
        else:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            code = EXIT_USAGE
    except CharTwoRefused as exc:
        print(f"refused: {exc}", file=sys.stderr)
        report.result = {"error": "CharTwoRefused", "message": str(exc)}
        code = EXIT_REFUSED
    except (ChainObstruction, GenericityExhausted) as exc:
        name = type(exc).__name__
        print(f"{name} at step {exc.step_index}: {exc}", file=sys.stderr)
        report.result = {"error": name, "step": exc.step_index, "message": str(exc), "attempts": exc.attempts}
        code = EXIT_OBSTRUCTION
    except LiaisonError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        code = EXIT_REFUSED
    report.exit_code = code
    payload = json.dumps(report.to_json(), indent=2, default=str)
    if args.json and code != EXIT_USAGE:
        print(payload)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(payload + "\n")
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
