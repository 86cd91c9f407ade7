"""Factor measure and conditional measures of a finite partition.

Conditionals exist here only for elements of positive measure.  Elements
of measure zero (the continuous case) are reached through the
``phi_mw`` approximants of :mod:`measpart.rokhlin` instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .measures import Measure, TableMeasure
from .partitions import Partition
from .scalars import Scalar, is_zero, log_scalar, zero
from .symbolic import CylinderSet, _hull, normalize, widen


def depth_window(xi: Partition, depth: int) -> tuple[int, int]:
    """Half-open window of the depth algebra: ``[0, depth)`` joined with xi's window."""
    a, b = xi.window
    if b == a:
        return (0, depth)
    return (min(a, 0), max(b, depth))


@dataclass
class ConditionalSystem:
    partition: Partition
    window: tuple[int, int]
    factor: dict[str, Scalar]
    conditionals: dict[str, TableMeasure]
    dropped: list[str] = field(default_factory=list)
    mu: Measure | None = field(default=None, repr=False)

    def conditional_of(self, label: str, E: CylinderSet) -> Scalar:
        return self.conditionals[label].of(E)

    def disintegrate(self, E: CylinderSet) -> Scalar:
        """``sum_C mu_xi(C) * mu_C(E)``."""
        z = zero(self.mu.mode)
        return sum((self.factor[lab] * mu_c.of(E) for lab, mu_c in self.conditionals.items()), z)

    def residual(self, E: CylinderSet) -> Scalar:
        return self.disintegrate(E) - self.mu.of(E)


def condition(mu: Measure, xi: Partition, depth: int) -> ConditionalSystem:
    """Factor weights and per-element conditional tables on the depth algebra."""
    a, b = depth_window(xi, depth)
    weights = mu.window_weights(a, b - a)
    z = zero(mu.mode)
    factor: dict[str, Scalar] = {}
    conditionals: dict[str, TableMeasure] = {}
    dropped: list[str] = []
    for label, cells in zip(xi.labels, xi.blocks(a, b)):
        total = sum((weights.get(w, z) for w in cells), z)
        if is_zero(total):
            dropped.append(label)
            continue
        table = {w: (weights.get(w, z) / total if w in cells else z) for w in mu.system.words(b - a)}
        factor[label] = total
        conditionals[label] = TableMeasure(mu.system, a, b - a, table, mu.mode)
    # a probability measure always charges some element
    assert factor, "every element of the partition is null"
    return ConditionalSystem(xi, (a, b), factor, conditionals, dropped, mu)


class FubiniResult(NamedTuple):
    lhs: Scalar
    rhs: Scalar

    @property
    def residual(self) -> Scalar:
        return self.lhs - self.rhs


def fubini_check(mu: Measure, xi: Partition, f_cells: Sequence[tuple[CylinderSet, Scalar]],
                 depth: int) -> FubiniResult:
    """Both sides of ``int f dmu = int int f dmu_C dmu_xi(C)`` for a simple function.

    `f_cells` lists (set, coefficient) pairs; every set must belong to the
    depth algebra.
    """
    cs = condition(mu, xi, depth)
    a, b = cs.window
    z = zero(mu.mode)
    lhs = z
    rhs = z
    for E, coef in f_cells:
        E = normalize(E)
        if E.length and (E.start < a or E.end > b):
            raise ValueError(f"{E!r} is outside the depth algebra on [{a},{b - 1}]")
        lhs += coef * mu.of(E)
        inner = z
        for label, mu_c in cs.conditionals.items():
            inner += cs.factor[label] * mu_c.of(E)
        rhs += coef * inner
    return FubiniResult(lhs, rhs)


class CondInfo(NamedTuple):
    """Conditional information: exact ratio and its ``-log`` in nats."""

    ratio: Scalar
    nats: float


def enclosing(xi: Partition, cell: CylinderSet) -> tuple[str, CylinderSet]:
    """The element of `xi` that contains `cell`."""
    for label, c in xi:
        a, b = _hull(c, cell)
        if widen(cell, a, b) <= widen(c, a, b):
            return label, c
    raise ValueError(f"{cell!r} is not contained in a single element")


def cond_information(mu: Measure, xi: Partition, eta: Partition, cell: CylinderSet) -> CondInfo:
    """``-log mu_D(C)`` where C, D are the elements of xi, eta around `cell`."""
    if is_zero(mu.of(cell)):
        raise ValueError("conditional information is evaluated on positive-measure cells")
    _, C = enclosing(xi, cell)
    _, D = enclosing(eta, cell)
    denom = mu.of(D)
    if is_zero(denom):
        raise ValueError("enclosing conditioning element is null")
    ratio = mu.of(C & D) / denom
    return CondInfo(ratio, 0.0 - log_scalar(ratio))
