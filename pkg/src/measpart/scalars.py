"""Scalar values in exact-rational or floating mode, and exact log-linear forms.

Rational mode uses :class:`fractions.Fraction` throughout; floating mode uses
plain ``float``.  Combining the two promotes to ``float`` and emits a
:class:`MixedModeWarning`.

:class:`LogSum` represents a real number of the form ``sum_p c_p * log(p)``
with rational coefficients over primes ``p``.  Entropies of rational measures
live in this set, so identities between them can be asserted exactly before
any logarithm is evaluated.
"""
from __future__ import annotations

import math
import warnings
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

import sympy

Scalar = Union[Fraction, float]

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

FLOAT_TOL = 1e-12


class MixedModeWarning(UserWarning):
    """Raised when rational and floating scalars are combined."""


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown scalar mode {mode!r}; expected one of {MODES}")
    return mode


def parse_scalar(value, mode: str = RATIONAL) -> Scalar:
    """Parse ``"2/3"``, ``"0.25"``, ints, Fractions or floats into `mode`.

    Decimal strings are read exactly in rational mode (``"0.1"`` is 1/10).
    A Python float given in rational mode is converted through its decimal
    ``repr`` so that ``0.1`` also becomes 1/10.
    """
    check_mode(mode)
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, str):
        text = value.strip()
        try:
            exact = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse scalar {value!r}") from exc
    elif isinstance(value, float):
        if mode == FLOAT:
            return value
        exact = Fraction(repr(value))
    elif isinstance(value, (int, Fraction)):
        exact = Fraction(value)
    else:
        raise TypeError(f"cannot interpret {type(value).__name__} as a scalar")
    return exact if mode == RATIONAL else float(exact)


def to_mode(value: Scalar, mode: str) -> Scalar:
    if mode == RATIONAL:
        if isinstance(value, float):
            warnings.warn("floating value coerced into rational mode", MixedModeWarning, stacklevel=2)
            return Fraction(value)
        return Fraction(value)
    return float(value)


def common_mode(*modes: str) -> str:
    """Mode of a computation over inputs in `modes`; warns when they differ."""
    distinct = set(modes)
    if len(distinct) > 1:
        warnings.warn("mixed rational/float inputs; promoting to float", MixedModeWarning, stacklevel=3)
        return FLOAT
    return distinct.pop() if distinct else RATIONAL


def zero(mode: str) -> Scalar:
    return Fraction(0) if mode == RATIONAL else 0.0


def one(mode: str) -> Scalar:
    return Fraction(1) if mode == RATIONAL else 1.0


def is_zero(value: Scalar) -> bool:
    """Exact zero test for Fractions; for floats, |x| <= 1e-12."""
    if isinstance(value, Fraction):
        return value == 0
    return abs(value) <= FLOAT_TOL


def close(a: Scalar, b: Scalar) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= FLOAT_TOL


def log_scalar(value: Scalar) -> float:
    """Natural log evaluated without underflow for large-denominator Fractions."""
    if isinstance(value, Fraction):
        if value <= 0:
            raise ValueError("log of a non-positive value")
        return math.log(value.numerator) - math.log(value.denominator)
    return math.log(value)


def fmt_exact(value: Scalar) -> str:
    """Fraction string (``"2/3"``, ``"1"``) or float ``repr``."""
    if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        return str(Fraction(value))
    return repr(float(value))


def fmt_decimal(value: Scalar) -> str:
    return repr(float(value))


@lru_cache(maxsize=4096)
def _factor(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(sympy.factorint(n).items()))


class LogSum:
    """Exact value ``sum(coef[p] * log(p))`` over primes ``p``.

    Supports addition, subtraction, multiplication by rationals, exact
    equality and conversion to float (nats).
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, Fraction] | None = None):
        self._terms = {p: Fraction(c) for p, c in (terms or {}).items() if c != 0}

    @classmethod
    def log_of(cls, value: Fraction | int) -> "LogSum":
        value = Fraction(value)
        if value <= 0:
            raise ValueError("log of a non-positive rational")
        terms: dict[int, Fraction] = {}
        for p, e in _factor(value.numerator):
            terms[p] = terms.get(p, Fraction(0)) + e
        for p, e in _factor(value.denominator):
            terms[p] = terms.get(p, Fraction(0)) - e
        return cls(terms)

    @classmethod
    def total(cls, items: Iterable["LogSum"]) -> "LogSum":
        acc: dict[int, Fraction] = {}
        for item in items:
            for p, c in item._terms.items():
                acc[p] = acc.get(p, Fraction(0)) + c
        return cls(acc)

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def __add__(self, other: "LogSum") -> "LogSum":
        return LogSum.total((self, other))

    def __neg__(self) -> "LogSum":
        return LogSum({p: -c for p, c in self._terms.items()})

    def __sub__(self, other: "LogSum") -> "LogSum":
        return self + (-other)

    def __mul__(self, k) -> "LogSum":
        k = Fraction(k)
        return LogSum({p: c * k for p, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, LogSum):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def __float__(self) -> float:
        return math.fsum(float(c) * math.log(p) for p, c in self._terms.items())

    def __repr__(self) -> str:
        return f"LogSum({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"({c})*log({p})" for p, c in sorted(self._terms.items()))
