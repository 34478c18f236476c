"""Equation documents: a small YAML dialect for A, B, C and run parameters.

Example::

    A: {trig: {c0: 0.5, cos: [1.0], sin: [0.0]}}
    B: {poly: {terms: [[0, 1.0], [2, -3.0]]}}
    C: {samples: [[0.0, 0.0], [0.125, 0.3], ...]}

Optional blocks ``design`` (two-orbit designers) and ``perturbation``
(bifurcation from the center) feed the corresponding CLI commands.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

from .coeffs import ZERO, AbelEquation, CoefficientFunction, MonomialPoly, Sampled, TrigPoly

__all__ = [
    "SpecError",
    "SpecDocument",
    "parse_spec",
    "parse_document",
    "serialize",
    "equation_to_dict",
    "coefficient_to_dict",
]

_TOP_KEYS = {"A", "B", "C", "design", "perturbation"}
_DESIGN_KEYS = {"family", "v4", "mu", "lambda", "j", "k"}
_PERTURB_KEYS = {"b1", "a0", "a1", "a2", "b0", "epsilon"}


class SpecError(ValueError):
    """Malformed document; ``field`` and ``line`` (1-based) locate the problem."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if field:
            where.append(f"field {field!r}")
        if line:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.field = field
        self.line = line


@dataclass(frozen=True)
class SpecDocument:
    equation: AbelEquation | None
    design: dict = field(default_factory=dict)
    perturbation: dict = field(default_factory=dict)


def _key_lines(text: str) -> dict[str, int]:
    """Line of each top-level key; rejects duplicates, which YAML would merge."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise SpecError(f"invalid YAML: {getattr(exc, 'problem', exc)}",
                        line=None if mark is None else mark.line + 1) from None
    if node is None:
        return {}
    if not isinstance(node, yaml.MappingNode):
        raise SpecError("document must be a mapping", line=node.start_mark.line + 1)
    lines: dict[str, int] = {}
    for k, _ in node.value:
        key = k.value
        if key in lines:
            raise SpecError("duplicate key", field=key, line=k.start_mark.line + 1)
        lines[key] = k.start_mark.line + 1
    return lines


def _number(v: Any, fld: str, line: int | None) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"expected a number, got {v!r}", fld, line)
    return float(v)


def _numbers(v: Any, fld: str, line: int | None) -> tuple[float, ...]:
    if not isinstance(v, list):
        raise SpecError(f"expected a list of numbers, got {v!r}", fld, line)
    return tuple(_number(x, fld, line) for x in v)


def _coefficient(name: str, value: Any, line: int | None) -> CoefficientFunction:
    if not isinstance(value, dict) or len(value) != 1:
        raise SpecError("expected exactly one of trig, poly, samples", name, line)
    (kind, body), = value.items()
    fld = f"{name}.{kind}"
    if kind == "trig":
        if not isinstance(body, dict):
            raise SpecError("trig needs a mapping", fld, line)
        unknown = set(body) - {"c0", "cos", "sin"}
        if unknown:
            raise SpecError(f"unknown keys {sorted(unknown)}", fld, line)
        return TrigPoly(_number(body.get("c0", 0.0), f"{fld}.c0", line),
                        _numbers(body.get("cos", []), f"{fld}.cos", line),
                        _numbers(body.get("sin", []), f"{fld}.sin", line))
    if kind == "poly":
        if not isinstance(body, dict) or set(body) != {"terms"}:
            raise SpecError("poly needs exactly the key 'terms'", fld, line)
        terms = body["terms"]
        if not isinstance(terms, list):
            raise SpecError("terms must be a list of [exponent, coefficient]", fld, line)
        out = []
        for item in terms:
            if not (isinstance(item, list) and len(item) == 2):
                raise SpecError(f"bad term {item!r}", fld, line)
            e, c = item
            if isinstance(e, bool) or not isinstance(e, int):
                raise SpecError(f"exponent must be an integer, got {e!r}", fld, line)
            out.append((e, _number(c, fld, line)))
        try:
            return MonomialPoly(tuple(out))
        except ValueError as exc:
            raise SpecError(str(exc), fld, line) from None
    if kind == "samples":
        if not isinstance(body, list) or not all(isinstance(r, list) and len(r) == 2 for r in body):
            raise SpecError("samples must be a list of [t, value]", fld, line)
        t = [_number(r[0], fld, line) for r in body]
        v = [_number(r[1], fld, line) for r in body]
        try:
            return Sampled(np.array(t), np.array(v))
        except ValueError as exc:
            raise SpecError(str(exc), fld, line) from None
    raise SpecError(f"unknown coefficient kind {kind!r}", name, line)


def _block(name: str, value: Any, allowed: set[str], line: int | None) -> dict:
    if not isinstance(value, dict):
        raise SpecError("expected a mapping", name, line)
    unknown = set(value) - allowed
    if unknown:
        raise SpecError(f"unknown keys {sorted(unknown)}", name, line)
    out = {}
    for k, v in value.items():
        if k == "family":
            if v not in ("trig", "poly"):
                raise SpecError("family must be 'trig' or 'poly'", f"{name}.family", line)
            out[k] = v
        elif k in ("j", "k"):
            if isinstance(v, bool) or not isinstance(v, int):
                raise SpecError("must be an integer", f"{name}.{k}", line)
            out[k] = v
        else:
            out[k] = _number(v, f"{name}.{k}", line)
    return out


def parse_document(text: str, require_equation: bool = True) -> SpecDocument:
    """Parse a full document; A and B are required unless
    ``require_equation`` is false and a ``design`` or ``perturbation`` block
    supplies the equation instead."""
    lines = _key_lines(text)
    data = yaml.safe_load(text) or {}
    unknown = set(data) - _TOP_KEYS
    if unknown:
        key = sorted(map(str, unknown))[0]
        raise SpecError("unknown key", key, lines.get(key))
    design = _block("design", data["design"], _DESIGN_KEYS, lines.get("design")) \
        if "design" in data else {}
    perturbation = _block("perturbation", data["perturbation"], _PERTURB_KEYS,
                          lines.get("perturbation")) if "perturbation" in data else {}
    has_eq = "A" in data or "B" in data
    if not has_eq and not require_equation and (design or perturbation):
        return SpecDocument(None, design, perturbation)
    for key in ("A", "B"):
        if key not in data:
            raise SpecError("missing required field", key)
    A = _coefficient("A", data["A"], lines.get("A"))
    B = _coefficient("B", data["B"], lines.get("B"))
    C = _coefficient("C", data["C"], lines.get("C")) if "C" in data else ZERO
    return SpecDocument(AbelEquation(A, B, C), design, perturbation)


def parse_spec(text: str) -> AbelEquation:
    """Parse ``A``, ``B`` (required) and ``C`` (optional) into an equation."""
    return parse_document(text).equation


def coefficient_to_dict(f: CoefficientFunction) -> dict:
    if isinstance(f, TrigPoly):
        return {"trig": {"c0": f.c0, "cos": list(f.cos_coeffs), "sin": list(f.sin_coeffs)}}
    if isinstance(f, MonomialPoly):
        return {"poly": {"terms": [[e, c] for e, c in f.terms]}}
    if isinstance(f, Sampled):
        return {"samples": [[float(t), float(v)] for t, v in zip(f.t, f.values)]}
    raise TypeError(f"cannot serialise {type(f).__name__}")


def equation_to_dict(eq: AbelEquation) -> dict:
    out = {"A": coefficient_to_dict(eq.A), "B": coefficient_to_dict(eq.B)}
    if not (isinstance(eq.C, TrigPoly) and eq.C.is_zero):
        out["C"] = coefficient_to_dict(eq.C)
    return out


def serialize(eq: AbelEquation) -> str:
    """Document text for ``eq``; ``parse_spec(serialize(eq)) == eq``."""
    return yaml.safe_dump(equation_to_dict(eq), sort_keys=True, default_flow_style=None)
