"""Input documents: parsing, validation with JSON-pointer diagnostics, serialization.

Numbers are read with a ``Decimal`` hook, so every literal keeps the value
that was typed.  Matrix entries, weights and ``rho`` are stored as
``Fraction``; integer-valued fields stay ``int``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from importlib import resources

import jsonschema

from .rational import parse_rational


class InputParseError(ValueError):
    """Malformed input document; ``pointer`` is the JSON pointer of the offending value."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
        self.message = message


def load_schema() -> dict:
    text = resources.files("unilyap").joinpath("input.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _pointer(parts) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in parts)


@dataclass(frozen=True)
class InputDocument:
    kind: str
    payload: dict
    options: dict = field(default_factory=dict)


def _rational(value, ptr: str, mode: str) -> Fraction:
    if mode == "rational" and isinstance(value, Decimal):
        raise InputParseError(ptr, f"rational mode needs integers or exact strings such as \"p/q\", got {value}")
    try:
        return parse_rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputParseError(ptr, str(exc)) from exc


def _matrices(raw, ptr: str, mode: str, d_decl=None, k_decl=None) -> list:
    d = d_decl if d_decl is not None else len(raw[0])
    if k_decl is not None and len(raw) != k_decl:
        raise InputParseError(ptr, f"k = {k_decl} but {len(raw)} matrices are given")
    out = []
    for i, m in enumerate(raw):
        if len(m) != d:
            raise InputParseError(f"{ptr}/{i}", f"expected {d} rows, got {len(m)}")
        rows = []
        for r, row in enumerate(m):
            if len(row) != d:
                raise InputParseError(f"{ptr}/{i}/{r}", f"expected {d} entries, got {len(row)}")
            rows.append([_rational(x, f"{ptr}/{i}/{r}/{c}", mode) for c, x in enumerate(row)])
        out.append(rows)
    return out


def _ints(raw) -> list:
    return [[int(x) for x in row] for row in raw]


def document_from_obj(obj, mode_override: str | None = None) -> InputDocument:
    """Validate a decoded JSON value and normalize it into an :class:`InputDocument`."""
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = list(validator.iter_errors(obj))
    if errors:
        # The deepest error is the most specific one.
        err = max(errors, key=lambda e: len(e.absolute_path))
        raise InputParseError(_pointer(err.absolute_path), err.message)
    options = dict(obj.get("options", {}))
    if "tol" in options:
        options["tol"] = float(options["tol"])
    mode = mode_override or options.get("mode", "float")
    kind = obj["kind"]
    if kind == "tuple":
        payload = {"matrices": _matrices(obj["matrices"], "/matrices", mode, obj.get("d"), obj.get("k"))}
    elif kind == "self_similar":
        payload = {
            "matrices": _matrices(obj["matrices"], "/matrices", mode),
            "rho": _rational(obj["rho"], "/rho", mode),
        }
    elif kind == "carpet":
        n = len(obj["A"])
        for i, row in enumerate(obj["A"]):
            if len(row) != n:
                raise InputParseError(f"/A/{i}", f"expected {n} entries, got {len(row)}")
        payload = {"A": _ints(obj["A"]), "tau": [int(t) for t in obj["tau"]], "m": obj.get("m")}
    else:
        payload = {
            "A": _ints(obj["A"]),
            "digits": _ints(obj["digits"]),
            "weights": [_rational(w, f"/weights/{i}", mode) for i, w in enumerate(obj["weights"])],
            "n0": int(obj["n0"]),
            "tile_digits": _ints(obj["tile_digits"]),
            "translations": _ints(obj["translations"]),
        }
    return InputDocument(kind, payload, options)


def parse_input(text: str, mode_override: str | None = None) -> InputDocument:
    """Parse and validate a UTF-8 JSON input document.

    Raises
    ------
    InputParseError
        On invalid JSON, schema violations and inconsistent shapes, with the
        JSON pointer of the offending value.
    """
    try:
        obj = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise InputParseError("", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return document_from_obj(obj, mode_override)


def serialize(doc: InputDocument) -> str:
    """Canonical JSON text; ``parse_input(serialize(doc)) == doc``."""
    obj: dict = {"kind": doc.kind}
    p = doc.payload
    if doc.kind in ("tuple", "self_similar"):
        mats = p["matrices"]
        if doc.kind == "tuple":
            obj["d"] = len(mats[0])
            obj["k"] = len(mats)
        obj["matrices"] = [[[str(x) for x in row] for row in m] for m in mats]
        if doc.kind == "self_similar":
            obj["rho"] = str(p["rho"])
    elif doc.kind == "carpet":
        obj["A"] = p["A"]
        obj["tau"] = p["tau"]
        if p.get("m") is not None:
            obj["m"] = p["m"]
    else:
        for key in ("A", "digits", "n0", "tile_digits", "translations"):
            obj[key] = p[key]
        obj["weights"] = [str(w) for w in p["weights"]]
    if doc.options:
        obj["options"] = doc.options
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
