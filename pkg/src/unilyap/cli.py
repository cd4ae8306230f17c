"""Command-line front end.

The JSON report goes to stdout (or ``--out``); a short human summary goes to
stderr.  Exit codes: 0 Yes or success, 1 No, 2 Inconclusive, 64 usage or
malformed input, 65 inconsistent input data, 66 unreadable input file,
69 resource cap exceeded, 70 internal consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import sys
import time
import warnings

import numpy as np

from . import __version__
from .apps import (
    CarpetInput,
    SelfAffineInput,
    SelfSimilarInput,
    carpet_check,
    fourier_diagnostic,
    self_affine_build,
    self_affine_check,
    self_similar_check,
)
from .errors import (
    ContractViolation,
    DegenerateLanguageError,
    InputDataError,
    InternalConsistencyError,
    NumericError,
    ResourceError,
)
from .matcore import DEFAULT_KRON_CAP, MatTuple, is_positively_irreducible
from .schema import InputDocument, InputParseError, parse_input
from .symdyn import build_support_automaton, language_count, sofic_entropy
from .ule import (
    Decision,
    criterion_A,
    criterion_A_fast,
    criterion_B,
    norm_profile,
    pressure_estimate,
    pressure_even,
    r_of,
)
from .ule.jset import DEFAULT_MAX_WORDS
from .ule.verdict import DEFAULT_TOL

EXIT_YES, EXIT_NO, EXIT_INCONCLUSIVE = 0, 1, 2
EXIT_USAGE, EXIT_DATA, EXIT_NOINPUT, EXIT_UNAVAILABLE, EXIT_SOFTWARE = 64, 65, 66, 69, 70

DECISION_EXIT = {Decision.YES: EXIT_YES, Decision.NO: EXIT_NO, Decision.INCONCLUSIVE: EXIT_INCONCLUSIVE}
DEFAULTS = {
    "tol": DEFAULT_TOL,
    "max_words": DEFAULT_MAX_WORDS,
    "kron_cap": DEFAULT_KRON_CAP,
    "method": "A",
    "mode": "float",
    "n": None,
    "fourier_box_radius": 20,
    "fourier_n_max": 50,
}
# Applications whose data is exact by construction default to rational mode.
EXACT_COMMANDS = ("carpet", "self-affine")
# Subcommand -> accepted document kinds.
KINDS = {
    "check": ("tuple",),
    "entropy": ("tuple", "self_similar"),
    "pressure": ("tuple", "self_similar"),
    "profile": ("tuple", "self_similar"),
    "carpet": ("carpet",),
    "self-affine": ("self_affine",),
    "self-similar": ("self_similar",),
}

log = logging.getLogger("unilyap")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _jsonable(x):
    """Plain JSON value with non-finite floats spelled as strings."""
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, Decision):
        return x.value
    return x if x is None or isinstance(x, str) else str(x)


def _sweep(text: str) -> list[float]:
    try:
        start, stop, step = (float(t) for t in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected Q_START:Q_END:Q_STEP") from exc
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError("need Q_STEP > 0 and Q_END >= Q_START")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("input", help="input JSON document, or - for stdin")
    common.add_argument("--tol", type=float, help=f"decision tolerance (default {DEFAULT_TOL:g})")
    common.add_argument("--max-words", type=int, help="cap on visited words when enumerating 𝒥 (default 2^24)")
    common.add_argument("--kron-cap", type=int, help=f"cap on Kronecker power dimension (default {DEFAULT_KRON_CAP})")
    common.add_argument("--method", choices=["A", "A-fast", "B", "all"], help="criterion for check (default A)")
    common.add_argument("--mode", choices=["float", "rational"], help="arithmetic for criterion A (default float; rational for carpet and self-affine)")
    common.add_argument("--format", choices=["json", "text"], default="json", help="primary output format")
    common.add_argument("--sweep", type=_sweep, help="pressure only: q grid Q_START:Q_END:Q_STEP, emits CSV")
    common.add_argument("-n", type=int, help="word length for pressure, profile depth, or count length for entropy")
    common.add_argument("--out", help="write the primary output to this file instead of stdout")
    common.add_argument("-q", "--quiet", action="store_true", help="suppress the summary on stderr")

    parser = _Parser(prog="unilyap", description="Uniform Lyapunov exponent decisions for matrix tuples.")
    parser.add_argument("--version", action="version", version=f"unilyap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("check", "decide the property with criterion A, A-fast, B or all of them"),
        ("entropy", "topological entropy of the language of nonzero products"),
        ("pressure", "even pressures, convexity defect and finite-length estimates"),
        ("profile", "per-length min and max of product norms"),
        ("carpet", "Parry measure projection check for a labelled SFT"),
        ("self-affine", "absolute continuity of an integral self-affine measure"),
        ("self-similar", "absolute continuity checks for a finite-type self-similar measure"),
    ]:
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def _options(args, doc: InputDocument) -> dict:
    opts = dict(DEFAULTS)
    if args.command in EXACT_COMMANDS:
        opts["mode"] = "rational"
    if args.command != "self-affine":
        del opts["fourier_box_radius"], opts["fourier_n_max"]
    opts.update(doc.options)
    for key in ("tol", "max_words", "kron_cap", "method", "mode", "n"):
        value = getattr(args, key)
        if value is not None:
            opts[key] = value
    return opts


def _tuple_of(doc: InputDocument) -> MatTuple:
    return MatTuple.from_exact([np.array(m, dtype=object) for m in doc.payload["matrices"]])


def _check(M: MatTuple, opts: dict) -> tuple[dict, Decision]:
    method = opts["method"]
    nonneg = M.is_nonnegative() and is_positively_irreducible(M)
    runners = {
        "A": lambda: criterion_A(M, tol=opts["tol"], mode=opts["mode"], max_words=opts["max_words"]),
        "A-fast": lambda: criterion_A_fast(M, tol=opts["tol"], mode=opts["mode"]),
        "B": lambda: criterion_B(M, tol=opts["tol"], kron_cap=opts["kron_cap"]),
    }
    if method != "all":
        verdict = runners[method]()
        return {"method": method, "verdicts": {method: verdict.to_dict()}}, verdict.decision
    verdicts, notes = {}, []
    for name, run in runners.items():
        if name != "B" and not nonneg:
            notes.append(f"criterion {name} skipped: it needs a nonnegative positively irreducible tuple")
            continue
        try:
            verdicts[name] = run()
        except ResourceError as exc:
            notes.append(f"criterion {name} skipped: {exc}")
    if not verdicts:
        raise ResourceError("; ".join(notes))
    decided = {v.decision for v in verdicts.values()} - {Decision.INCONCLUSIVE}
    if len(decided) > 1:
        raise InternalConsistencyError(
            "criteria disagree: " + ", ".join(f"{k}={v.decision.value}" for k, v in verdicts.items())
        )
    decision = decided.pop() if decided else Decision.INCONCLUSIVE
    body = {"method": "all", "verdicts": {k: v.to_dict() for k, v in verdicts.items()}, "notes": notes}
    return body, decision


def _entropy(M: MatTuple, opts: dict) -> dict:
    aut = build_support_automaton(M)
    out = {
        "h_top": sofic_entropy(aut),
        "automaton_states": len(aut.states),
        "all_products_nonzero": aut.is_complete(),
    }
    if M.is_nonnegative() and is_positively_irreducible(M):
        out["r"] = r_of(M)
    if opts["n"] is not None:
        out["n"] = opts["n"]
        out["language_count"] = language_count(M, opts["n"])
    return out


def _pressure_even_or_none(M: MatTuple, q: float, cap: int):
    if q != int(q) or int(q) < 2 or int(q) % 2:
        return None
    try:
        return pressure_even(M, int(q), cap=cap)
    except ResourceError:
        return None


def _pressure(M: MatTuple, opts: dict) -> dict:
    n = opts["n"] or 10
    evens = {f"P{q}": _pressure_even_or_none(M, q, opts["kron_cap"]) for q in (2, 4, 6)}
    out = {"n": n, "pressure_even": evens}
    if all(v is not None for v in evens.values()):
        out["defect"] = evens["P2"] + evens["P6"] - 2 * evens["P4"]
    out["estimates"] = {str(q): pressure_estimate(M, q, n) for q in (1, 2, 4, 6)}
    return out


def _sweep_csv(M: MatTuple, grid: list[float], opts: dict) -> str:
    n = opts["n"] or 10
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["q", "estimate_n", "pressure_even_if_available"])
    for q in grid:
        est = pressure_estimate(M, q, n)
        even = _pressure_even_or_none(M, q, opts["kron_cap"])
        writer.writerow([repr(q), repr(est), "" if even is None else repr(even)])
    return buf.getvalue()


def _profile(M: MatTuple, opts: dict) -> dict:
    n = opts["n"] or 12
    prof = norm_profile(M, n)
    out = {"n_max": n, "min": prof.mins, "max": prof.maxs}
    if M.is_nonnegative() and is_positively_irreducible(M):
        r = r_of(M)
        scale = r ** -np.arange(1, n + 1, dtype=float)
        out["r"] = r
        out["normalized_min"] = prof.mins * scale
        out["normalized_max"] = prof.maxs * scale
    return out


def _carpet(doc: InputDocument, opts: dict) -> tuple[dict, Decision]:
    p = doc.payload
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        inp = CarpetInput.create(p["A"], p["tau"], p["m"])
    for w in inp.warnings:
        log.warning("warning: %s", w)
    rep = carpet_check(inp, tol=opts["tol"], mode=opts["mode"], kron_cap=opts["kron_cap"])
    return rep.to_dict(), rep.decision


def _self_affine(doc: InputDocument, opts: dict) -> tuple[dict, Decision]:
    p = doc.payload
    inp = SelfAffineInput.create(p["A"], p["digits"], p["weights"], p["n0"], p["tile_digits"], p["translations"])
    M = self_affine_build(inp)
    rep = self_affine_check(M, tol=opts["tol"], mode=opts["mode"])
    fourier = fourier_diagnostic(inp, box_radius=opts["fourier_box_radius"], n_max=opts["fourier_n_max"])
    out = rep.to_dict()
    out["matrices"] = M.to_jsonable()
    out["fourier_diagnostic"] = fourier.to_dict()
    return out, rep.decision


def _self_similar(doc: InputDocument, opts: dict) -> tuple[dict, Decision]:
    inp = SelfSimilarInput(_tuple_of(doc), float(doc.payload["rho"]))
    rep = self_similar_check(inp, tol=opts["tol"], mode=opts["mode"])
    # The exit code follows the Hausdorff-measure verdict; the Lebesgue one is in the report.
    return rep.to_dict(), rep.verdict_Hs


def _summary(command: str, result: dict, decision: Decision | None) -> str:
    lines = [f"unilyap {command}"]
    if decision is not None:
        lines.append(f"decision: {decision.value}")
    for key in ("h_top", "r", "s", "defect", "conclusion", "verdict_Hs", "verdict_Leb"):
        if key in result:
            lines.append(f"{key}: {result[key]}")
    for name, v in result.get("verdicts", {}).items():
        lam = v.get("lambda")
        lines.append(f"criterion {name}: {v['decision']} (residual {v['residual']}, lambda {lam})")
    for note in result.get("notes", []):
        lines.append(f"note: {note}")
    return "\n".join(lines)


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _run(args) -> int:
    try:
        raw = _read(args.input)
    except OSError as exc:
        log.error("error: cannot open %s: %s", args.input, exc.strerror or exc)
        return EXIT_NOINPUT
    try:
        doc = parse_input(raw.decode("utf-8"), mode_override=args.mode)
    except UnicodeDecodeError as exc:
        log.error("error: input is not UTF-8: %s", exc)
        return EXIT_USAGE
    except InputParseError as exc:
        log.error("error: %s", exc)
        return EXIT_USAGE
    if doc.kind not in KINDS[args.command]:
        log.error("error: /kind: %s expects kind %s, got %r", args.command, " or ".join(KINDS[args.command]), doc.kind)
        return EXIT_USAGE
    if args.sweep is not None and args.command != "pressure":
        log.error("error: --sweep applies to the pressure subcommand only")
        return EXIT_USAGE
    opts = _options(args, doc)
    started = time.perf_counter()
    decision = None
    if args.command == "carpet":
        result, decision = _carpet(doc, opts)
    elif args.command == "self-affine":
        result, decision = _self_affine(doc, opts)
    elif args.command == "self-similar":
        result, decision = _self_similar(doc, opts)
    else:
        M = _tuple_of(doc)
        if args.command == "pressure" and args.sweep is not None:
            _emit(_sweep_csv(M, args.sweep, opts), args.out)
            return EXIT_YES
        if args.command == "check":
            result, decision = _check(M, opts)
        elif args.command == "entropy":
            result = _entropy(M, opts)
        elif args.command == "pressure":
            result = _pressure(M, opts)
        else:
            result = _profile(M, opts)
    elapsed = time.perf_counter() - started
    report = {
        "tool": "unilyap",
        "version": __version__,
        "command": args.command,
        "input_sha256": hashlib.sha256(raw).hexdigest(),
        "kind": doc.kind,
        "options": {k: v for k, v in sorted(opts.items()) if v is not None},
        "decision": decision.value if decision is not None else None,
        "result": result,
        # Keep last: everything above is deterministic.
        "timing": {"seconds": elapsed},
    }
    summary = _summary(args.command, _jsonable(result), decision)
    if args.format == "json":
        _emit(json.dumps(_jsonable(report), indent=2, ensure_ascii=False) + "\n", args.out)
    else:
        _emit(summary + "\n", args.out)
    if not args.quiet:
        log.info("%s", summary)
    return DECISION_EXIT[decision] if decision is not None else EXIT_YES


def main(argv: list[str] | None = None) -> int:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO)
    log.propagate = False
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        log.error("usage error: %s", exc)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return _run(args)
    except ResourceError as exc:
        log.error("resource limit: %s", exc)
        return EXIT_UNAVAILABLE
    except InternalConsistencyError as exc:
        log.error("internal consistency failure: %s", exc)
        return EXIT_SOFTWARE
    except NumericError as exc:
        log.error("numeric failure: %s", exc)
        return EXIT_SOFTWARE
    except (ContractViolation, InputDataError, DegenerateLanguageError) as exc:
        log.error("input data error: %s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
