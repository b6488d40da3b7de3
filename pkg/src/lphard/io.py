"""JSON instance files with exact rationals.

Rationals are written as ``"num/den"`` strings.  Binary64 values (float row
weights or radii) are written as ``{"real": repr}`` so that they reload
bit-for-bit and are never confused with a rational literal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import metadata

from .basis import RationalBasis, as_fraction
from .errors import DomainError
from .lattice import (AGBddInstance, AGGapCvpInstance, BddInstance, CvpPrimeInstance, SvpInstance)

SCHEMA_VERSION = 1


class SchemaError(DomainError):
    """An instance file does not follow the schema."""


@dataclass(frozen=True)
class GadgetInstance:
    """A lattice with a target, used as the gadget block of a reduction."""

    basis: RationalBasis
    target: tuple


def software_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def encode_number(x):
    if isinstance(x, float):
        return {"real": repr(x)}
    f = as_fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def decode_number(v):
    if isinstance(v, dict):
        if set(v) != {"real"}:
            raise SchemaError(f"unknown number encoding {v!r}")
        return float(v["real"])
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise SchemaError(f"numbers must be rational strings, got {v!r}")
    try:
        return Fraction(str(v).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"malformed rational {v!r}") from exc


def parse_p(v):
    """``p`` as an int when integral, else a float; accepts ``"3/2"`` and ``"1.5"``."""
    f = decode_number(v) if not isinstance(v, float) else v
    if isinstance(f, Fraction) and f.denominator == 1:
        p = int(f)
    else:
        p = float(f)
    if p < 1:
        raise SchemaError("p must be >= 1")
    return p


def _problem(inst):
    if isinstance(inst, CvpPrimeInstance):
        return {"type": "cvp_prime", "gamma": encode_number(inst.gamma)}
    if isinstance(inst, BddInstance):
        return {"type": "bdd", "alpha": encode_number(inst.alpha)}
    if isinstance(inst, AGBddInstance):
        return {"type": "agbdd", "r_pow": encode_number(inst.r_pow), "alpha": encode_number(inst.alpha),
                "A": inst.A, "G": inst.G}
    if isinstance(inst, AGGapCvpInstance):
        return {"type": "agcvp", "r_pow": encode_number(inst.r_pow), "u_pow": encode_number(inst.u_pow),
                "gamma_prime": encode_number(inst.gamma_prime), "A": encode_number(inst.A), "G": inst.G}
    if isinstance(inst, SvpInstance):
        return {"type": "svp", "r_pow": encode_number(inst.r_pow), "gamma": encode_number(inst.gamma)}
    if isinstance(inst, GadgetInstance):
        return {"type": "gadget"}
    raise SchemaError(f"cannot serialise {type(inst).__name__}")


def to_document(inst, p, provenance=()) -> dict:
    basis = inst.basis
    target = getattr(inst, "target", None)
    return {
        "version": SCHEMA_VERSION,
        "p": str(int(p)) if float(p).is_integer() else repr(float(p)),
        "basis": [[encode_number(v) for v in row] for row in basis.rows],
        "row_weights": [encode_number(w) for w in basis.weights],
        "target": None if target is None else [encode_number(v) for v in target],
        "problem": _problem(inst),
        "provenance": list(provenance),
    }


def _require(doc, key):
    if key not in doc:
        raise SchemaError(f"missing field {key!r}")
    return doc[key]


def from_document(doc):
    """Return ``(instance, p, provenance)``."""
    if not isinstance(doc, dict):
        raise SchemaError("instance file must hold a JSON object")
    if _require(doc, "version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {doc['version']!r}")
    p = parse_p(_require(doc, "p"))
    rows = _require(doc, "basis")
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise SchemaError("basis must be a non-empty list of rows")
    rows = [[decode_number(v) for v in r] for r in rows]
    if any(isinstance(v, float) for r in rows for v in r):
        raise SchemaError("basis entries must be rational")
    weights = doc.get("row_weights")
    weights = None if weights is None else [decode_number(w) for w in weights]
    basis = RationalBasis(rows, weights)
    raw_t = doc.get("target")
    target = None if raw_t is None else tuple(decode_number(v) for v in raw_t)
    prob = _require(doc, "problem")
    kind = _require(prob, "type")
    num = lambda k: decode_number(_require(prob, k))  # noqa: E731
    need_t = kind != "svp"
    if need_t and target is None:
        raise SchemaError(f"problem {kind!r} needs a target")
    if kind == "cvp_prime":
        inst = CvpPrimeInstance(basis, target, num("gamma"))
    elif kind == "bdd":
        inst = BddInstance(basis, target, num("alpha"))
    elif kind == "agbdd":
        inst = AGBddInstance(basis, target, num("r_pow"), num("alpha"), int(_require(prob, "A")),
                             int(_require(prob, "G")))
    elif kind == "agcvp":
        inst = AGGapCvpInstance(basis, target, num("r_pow"), num("u_pow"), num("gamma_prime"),
                                num("A"), int(_require(prob, "G")))
    elif kind == "gadget":
        inst = GadgetInstance(basis, target)
    elif kind == "svp":
        inst = SvpInstance(basis, num("r_pow"), num("gamma"))
    else:
        raise SchemaError(f"unknown problem type {kind!r}")
    prov = doc.get("provenance", [])
    if not isinstance(prov, list):
        raise SchemaError("provenance must be a list")
    return inst, p, prov


def dumps(inst, p, provenance=()) -> str:
    return json.dumps(to_document(inst, p, provenance), indent=2, sort_keys=True) + "\n"


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return from_document(doc)


def write_instance(path, inst, p, provenance=()):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(inst, p, provenance))


def read_instance(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def provenance_record(stage, params, seed) -> dict:
    return {"stage": stage, "params": params, "seed": seed, "software": f"artifact {software_version()}"}
