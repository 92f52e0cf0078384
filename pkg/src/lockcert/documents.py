"""JSON documents: chain specs, profile specs and certificates.

Floats are written with 17 significant digits so a double survives the
round trip bit for bit; keys are emitted in a fixed order so identical inputs
give byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

from .chain_engine import (
    CONVENTION,
    CornerChain,
    DefectLedger,
    InterfaceData,
    InterfaceRecord,
    LockCertificate,
    effective_bounds,
)
from .errors import LockError, ParseError, ValidationError
from .radial_geometry import RadialProfile

SCHEMA_VERSION = 1


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _emit(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _emit(obj, indent, 0) + "\n"


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file in the same directory."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load(data) -> dict:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    return doc


def _real(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{where}: non-finite value")
    return value


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: expected an integer, got {value!r}")
    return value


def _reals(value, where: str) -> list[float]:
    if not isinstance(value, list):
        raise ValidationError(f"{where}: expected a list")
    return [_real(v, f"{where}[{k}]") for k, v in enumerate(value)]


def parse_chain_document(data) -> tuple[CornerChain, float | None]:
    """Parse a chain spec; returns the chain and the document's ``tol`` (if any)."""
    doc = _load(data)
    n = _int(doc.get("n"), "n")
    lam = doc.get("lambda")
    lam = None if lam is None else _int(lam, "lambda")
    tol = doc.get("tol")
    tol = None if tol is None else _real(tol, "tol")
    if tol is not None and tol <= 0:
        raise ValidationError("tol must be positive")
    raw = doc.get("interfaces")
    if not isinstance(raw, list):
        raise ValidationError("interfaces: expected a list")
    interfaces = []
    for i, entry in enumerate(raw, start=1):
        where = f"interface {i}"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where}: expected an object")
        minus = _reals(entry.get("samples_minus"), f"{where}.samples_minus")
        plus = _reals(entry.get("samples_plus"), f"{where}.samples_plus")
        if not minus or not plus:
            raise ValidationError(f"{where}: empty samples")
        lo = entry.get("bound_low_minus")
        up = entry.get("bound_up_plus")
        try:
            iface = InterfaceData(
                str(entry.get("name", f"sigma_{i}")),
                minus,
                plus,
                None if lo is None else _real(lo, f"{where}.bound_low_minus"),
                None if up is None else _real(up, f"{where}.bound_up_plus"),
            )
            effective_bounds(iface)
        except ValidationError:
            raise
        except LockError as exc:
            raise ValidationError(f"{where}: {exc}") from exc
        interfaces.append(iface)
    try:
        chain = CornerChain(n, tuple(interfaces), lam)
    except ValidationError:
        raise
    except LockError as exc:
        raise ValidationError(str(exc)) from exc
    return chain, tol


def parse_chain_spec(data) -> CornerChain:
    return parse_chain_document(data)[0]


def chain_to_document(chain: CornerChain, tol: float | None = None) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "n": chain.n}
    if chain.lam is not None:
        doc["lambda"] = chain.lam
    if tol is not None:
        doc["tol"] = tol
    ifaces = []
    for f in chain.interfaces:
        entry = {
            "name": f.name,
            "samples_minus": list(f.samples_minus),
            "samples_plus": list(f.samples_plus),
        }
        if f.bound_low_minus is not None:
            entry["bound_low_minus"] = f.bound_low_minus
        if f.bound_up_plus is not None:
            entry["bound_up_plus"] = f.bound_up_plus
        ifaces.append(entry)
    doc["interfaces"] = ifaces
    return doc


def serialize_chain(chain: CornerChain, tol: float | None = None) -> str:
    return dumps(chain_to_document(chain, tol))


def parse_profile_spec(data) -> RadialProfile:
    doc = _load(data)
    n = _int(doc.get("n"), "n")
    pieces = doc.get("pieces")
    if not isinstance(pieces, list) or not pieces:
        raise ValidationError("pieces: expected a non-empty list")
    for j, p in enumerate(pieces):
        if not isinstance(p, dict):
            raise ValidationError(f"piece {j}: expected an object")
        for key, value in p.items():
            if key != "kind":
                _real(value, f"piece {j}.{key}")
    try:
        return RadialProfile.build(n, pieces, bool(doc.get("inner_boundary", False)))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed piece: {exc}") from exc


def certificate_to_document(cert: LockCertificate) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "verdict": cert.label,
        "status": cert.verdict,
        "reason": cert.reason,
        "failed_interface": cert.failed_interface,
        "n": cert.n,
        "lambda": cert.lam,
        "square_sum": cert.square_sum,
        "ledger": {
            "d": list(cert.ledger.d),
            "c": list(cert.ledger.c),
            "lambda_prime": cert.ledger.lambda_prime,
        },
        "interfaces": [
            {
                "name": r.name,
                "a": r.a,
                "effective_up": r.effective_up,
                "xi": r.xi,
                "theta": r.theta,
                "sinh_theta": r.sinh_theta,
                "min_margin": r.min_margin,
                "sample_count": r.sample_count,
            }
            for r in cert.interfaces
        ],
        "k_factors": list(cert.k_factors),
        "tol": cert.tol,
        "scale": cert.scale,
        "warnings": list(cert.warnings),
        "convention": dict(cert.convention),
        "unchecked_hypotheses": list(cert.unchecked_hypotheses),
    }


def serialize_certificate(cert: LockCertificate) -> str:
    return dumps(certificate_to_document(cert))


def parse_certificate(data) -> LockCertificate:
    doc = _load(data)
    try:
        ledger = doc["ledger"]
        records = tuple(
            InterfaceRecord(
                r["name"], float(r["a"]), float(r["effective_up"]), float(r["xi"]),
                float(r["theta"]),
                math.nan if r["min_margin"] is None else float(r["min_margin"]),
                int(r["sample_count"]),
                float(r["sinh_theta"]) if "sinh_theta" in r else math.sinh(float(r["theta"])),
            )
            for r in doc["interfaces"]
        )
        return LockCertificate(
            n=int(doc["n"]),
            verdict=doc["status"],
            square_sum=float(doc["square_sum"]),
            ledger=DefectLedger(
                tuple(float(x) for x in ledger["d"]),
                tuple(float(x) for x in ledger["c"]),
                ledger["lambda_prime"],
            ),
            interfaces=records,
            k_factors=tuple(float(x) for x in doc["k_factors"]),
            tol=float(doc["tol"]),
            scale=float(doc["scale"]),
            reason=doc.get("reason"),
            failed_interface=doc.get("failed_interface"),
            lam=doc.get("lambda"),
            warnings=tuple(doc.get("warnings", ())),
            convention=dict(doc.get("convention", CONVENTION)),
            unchecked_hypotheses=tuple(doc.get("unchecked_hypotheses", ())),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed certificate: {exc!r}") from exc

