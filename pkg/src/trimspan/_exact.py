"""Rational helpers: parsing, formatting, and integer scaling for the kernels."""

from fractions import Fraction
from math import lcm
from numbers import Rational

import numpy as np

# Kernel inputs are summed in threes at most; keep well clear of int64 overflow.
_INT64_SAFE = 2**60


def as_fraction(value):
    """Convert ``value`` to an exact :class:`Fraction`.

    Strings may be integers, decimals (``"0.25"``), scientific notation or
    ``"p/q"``.  Floats go through their shortest repr, so ``0.1`` becomes
    ``1/10`` rather than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not distances")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, np.integer):
        return Fraction(int(value))
    if isinstance(value, np.floating):
        return as_fraction(float(value))
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty numeric field")
        return Fraction(text)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def fmt(q):
    """Serialize a rational as ``"p/q"`` (or ``"p"`` when integral)."""
    return str(Fraction(q))


def common_denominator(values):
    den = 1
    for q in values:
        den = lcm(den, q.denominator)
    return den


def to_int_array(rows, den):
    """Scale a nested sequence of Fractions by ``den`` into an integer array.

    Returns int64 when every entry is comfortably in range, otherwise an
    object array of Python ints (exact, used by the numpy backend).
    """
    ints = [[q.numerator * (den // q.denominator) for q in row] for row in rows]
    if not ints:
        return np.zeros((0, 0), dtype=np.int64)
    peak = max((abs(v) for row in ints for v in row), default=0)
    if peak < _INT64_SAFE:
        return np.array(ints, dtype=np.int64).reshape(len(ints), -1)
    out = np.empty((len(ints), len(ints[0]) if ints else 0), dtype=object)
    for i, row in enumerate(ints):
        out[i, :] = row
    return out


def scale_together(*tables):
    """Put several Fraction tables over one common denominator.

    Returns ``(den, arrays)``; every array uses the same dtype so kernels can
    mix them.
    """
    den = 1
    for table in tables:
        for row in table:
            den = lcm(den, common_denominator(row))
    arrays = [to_int_array(t, den) for t in tables]
    if any(a.dtype == object for a in arrays):
        arrays = [a.astype(object) for a in arrays]
    return den, arrays


def from_int(value, den):
    return Fraction(int(value), den)
