"""Module files and report rendering.

Modules travel as JSON objects {"arity", "dim", "legs", "metadata"?} where
each leg is a dim x dim nested array of [re, im] pairs in row-major order.
All floats are rendered with 12 significant digits, keys sorted, so the same
object always renders to identical bytes and a render/parse roundtrip
preserves entries to 12 significant digits.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from . import core, families, structure
from .errors import ParseError, PythagoreanViolation, ShapeError, ShapeMismatch


def _round12(x: float) -> float:
    if x == 0.0 or not np.isfinite(x):
        return 0.0 if x == 0.0 else x
    out = float(f"{x:.12g}")
    return 0.0 if out == 0.0 else out  # normalize -0.0


def _pair(z: complex) -> list[float]:
    return [_round12(float(np.real(z))), _round12(float(np.imag(z)))]


def _matrix_payload(m: np.ndarray) -> list:
    return [[_pair(m[i, j]) for j in range(m.shape[1])] for i in range(m.shape[0])]


def serialize_module(m: core.PModule, metadata: dict | None = None) -> str:
    """Canonical module-file JSON (sorted keys, 12 significant digits)."""
    payload: dict[str, Any] = {
        "arity": m.arity,
        "dim": m.dim,
        "legs": [_matrix_payload(leg) for leg in m.legs],
    }
    if metadata:
        payload["metadata"] = metadata
    return json.dumps(payload, sort_keys=True, indent=2)


def _parse_entry(value, where: str) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        raise ShapeError(f"{where}: expected an [re, im] pair, got {value!r}")
    re, im = float(value[0]), float(value[1])
    if not (np.isfinite(re) and np.isfinite(im)):
        raise ShapeError(f"{where}: entries must be finite")
    return complex(re, im)


# Acceptance gate for files: 12-significant-digit serialization plus files
# written with ~8 digits (the documented minimum) must both round-trip.
PARSE_TOL = 1e-8


def parse_module_file(text: str, tol: float = PARSE_TOL) -> tuple[core.PModule, dict]:
    """Parse a module file; returns (module, metadata).

    Raises ParseError for malformed JSON, ShapeError for inconsistent
    declarations, and PythagoreanViolation (with the residual) when the legs
    fail the defining identity at the given tolerance.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError("top level must be a JSON object")
    arity = obj.get("arity")
    dim = obj.get("dim")
    legs = obj.get("legs")
    if not isinstance(arity, int) or arity < 2:
        raise ShapeError(f"arity: expected an integer >= 2, got {arity!r}")
    if not isinstance(dim, int) or dim < 1:
        raise ShapeError(f"dim: expected a positive integer, got {dim!r}")
    if not isinstance(legs, list) or len(legs) != arity:
        raise ShapeError(
            f"legs: expected a list of {arity} matrices, got "
            f"{len(legs) if isinstance(legs, list) else type(legs).__name__}"
        )
    parsed = []
    for k, leg in enumerate(legs):
        if not isinstance(leg, list) or len(leg) != dim:
            raise ShapeError(f"legs[{k}]: expected {dim} rows")
        mat = np.zeros((dim, dim), dtype=np.complex128)
        for i, row in enumerate(leg):
            if not isinstance(row, list) or len(row) != dim:
                raise ShapeError(f"legs[{k}][{i}]: expected {dim} entries")
            for j, entry in enumerate(row):
                mat[i, j] = _parse_entry(entry, f"legs[{k}][{i}][{j}]")
        parsed.append(mat)
    metadata = obj.get("metadata", {})
    if metadata and not isinstance(metadata, dict):
        raise ShapeError("metadata: expected an object")
    try:
        module = core.PModule(legs=tuple(parsed))
    except ShapeMismatch as exc:
        raise ShapeError(str(exc)) from exc
    report = core.validate(module, tol)
    if not report.passed:
        raise PythagoreanViolation(
            f"legs fail the Pythagorean identity (residual {report.residual:.6e} "
            f"> tol {tol:g})",
            residual=report.residual,
        )
    return module, metadata


def parse_gp_vector(text: str) -> families.GPVector:
    """GP vector JSON: [[ [re,im], [re,im] ], ...], one [a, b] pair per slot."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed GP vector JSON: {exc}") from exc
    if not isinstance(obj, list) or not obj:
        raise ShapeError("GP vector: expected a non-empty list of [a, b] entries")
    entries = []
    for i, item in enumerate(obj):
        if not isinstance(item, list) or len(item) != 2:
            raise ShapeError(f"GP vector entry {i}: expected [a, b]")
        a = _parse_entry(item[0], f"entry {i}.a")
        b = _parse_entry(item[1], f"entry {i}.b")
        entries.append((a, b))
    defect = max(abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) for a, b in entries)
    if defect > 1e-8:
        raise PythagoreanViolation(
            f"GP vector entries leave the unit sphere (defect {defect:.3e})",
            residual=defect,
        )
    return families.GPVector(entries=tuple(entries))


# ---------------------------------------------------------------------------
# Report payloads and rendering.
# ---------------------------------------------------------------------------


def _isometry_payload(v: np.ndarray) -> list:
    return _matrix_payload(np.asarray(v))


def _atomic_payload(s: structure.AtomicSummand) -> dict:
    return {
        "word": s.label.word,
        "phase": _pair(s.label.phase),
        "dimension": s.isometry.shape[1],
        "isometry": _isometry_payload(s.isometry),
    }


def report_payload(report) -> dict:
    """Canonical JSON-able payload for every report type the CLI emits."""
    if isinstance(report, core.PModule):
        return json.loads(serialize_module(report))
    if isinstance(report, core.ValidationReport):
        return {
            "type": "validation",
            "passed": report.passed,
            "residual": _round12(report.residual),
            "tol": _round12(report.tol),
        }
    if isinstance(report, core.DualityReport):
        return {
            "type": "duality",
            "quantum_dim": _round12(report.quantum_dim),
            "ev_factor": _pair(report.ev_factor),
            "zigzag_residual": _round12(report.zigzag_residual),
            "ev_residual": _round12(report.ev_residual),
            "coev_residual": _round12(report.coev_residual),
        }
    if isinstance(report, structure.DecompositionReport):
        return {
            "type": "decomposition",
            "summands": [
                {
                    "dimension": s.dimension,
                    "tag": s.tag,
                    "label": None
                    if s.label is None
                    else {"word": s.label.word, "phase": _pair(s.label.phase)},
                    "isometry": _isometry_payload(s.isometry),
                }
                for s in report.summands
            ],
            "residual_dimension": report.residual_dimension,
            "p_dimension": report.p_dimension,
            "confidence": report.confidence,
            "seed": report.seed,
        }
    if isinstance(report, structure.ClassifyReport):
        return {
            "type": "classification",
            "diffuse_dim": report.diffuse_dim,
            "atomic_dim": report.atomic_dim,
            "residual_dim": report.residual_dim,
            "p_dimension": report.p_dimension,
            "confidence": report.confidence,
            "atomic": [_atomic_payload(s) for s in report.atomic],
        }
    if isinstance(report, structure.EquivalenceResult):
        verdict = "undecided" if report.verdict is None else report.verdict
        payload = {"type": "equivalence", "verdict": verdict, "reason": report.reason}
        if report.witness is not None:
            payload["witness"] = _isometry_payload(report.witness)
        return payload
    if isinstance(report, families.D2FuseReport):
        return {
            "type": "d2-fusion",
            "blocks": [json.loads(serialize_module(b)) for b in report.blocks],
            "scalar_splits": [
                None
                if split is None
                else [{"a": _pair(s.a), "b": _pair(s.b)} for s in split]
                for split in report.scalar_splits
            ],
        }
    if isinstance(report, list):
        if not report or isinstance(report[0], structure.AtomicSummand):
            return {
                "type": "atomic-part",
                "summands": [_atomic_payload(s) for s in report],
            }
        if isinstance(report[0], families.GPVector):
            return {
                "type": "gp-fusion",
                "count": len(report),
                "vectors": [
                    [[_pair(a), _pair(b)] for a, b in y.entries] for y in report
                ],
            }
        if all(isinstance(w, str) for w in report):
            return {"type": "prime-words", "count": len(report), "words": list(report)}
    raise TypeError(f"no renderer for {type(report).__name__}")


def _text_lines(payload: dict, indent: str = "") -> list[str]:
    lines = []
    for key in sorted(payload):
        value = payload[key]
        if isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.extend(_text_lines(value, indent + "  "))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{indent}{key}: ({len(value)})")
            for item in value:
                lines.extend(_text_lines(item, indent + "  "))
                lines.append(f"{indent}  -")
        else:
            lines.append(f"{indent}{key}: {json.dumps(value, sort_keys=True)}")
    return lines


def render_report(report, fmt: str = "text") -> str:
    """Render any report deterministically as stable JSON or readable text."""
    payload = report_payload(report)
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2)
    if fmt == "text":
        return "\n".join(_text_lines(payload))
    raise ValueError(f"unknown format {fmt!r}")


def render_module(m: core.PModule, metadata: dict | None = None, fmt: str = "text") -> str:
    """Render a module (with optional metadata) in either report format."""
    if fmt == "json":
        return serialize_module(m, metadata)
    if fmt == "text":
        return "\n".join(_text_lines(json.loads(serialize_module(m, metadata))))
    raise ValueError(f"unknown format {fmt!r}")
