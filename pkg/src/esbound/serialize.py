"""Lossless JSON encoding: integers as decimal strings, rationals as "num/den"."""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
from fractions import Fraction

from .certified import CertifiedReal


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(s: str) -> Fraction:
    return Fraction(s)


def _approx(x: Fraction) -> str:
    try:
        return f"{float(x):.12g}"
    except OverflowError:
        # beyond double range: digits of the integer part are enough for a hint
        n = x.numerator // x.denominator
        digits = str(n)
        return f"{digits[0]}.{digits[1:13]}e+{len(digits) - 1}"


def to_jsonable(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, str):
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, CertifiedReal):
        return {
            "lower": fraction_str(obj.lower),
            "upper": fraction_str(obj.upper),
            "approx": _approx(obj.midpoint),
        }
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return str(obj)


def dumps(record: dict) -> str:
    return json.dumps(to_jsonable(record), sort_keys=True, separators=(",", ":"))


def digest(lines: list[str]) -> str:
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode())
        h.update(b"\n")
    return h.hexdigest()
