"""Interval and square models of a measure on a symbolic system.

A finite list of generator sets ``A_1, ..., A_n`` codes each point by the
binary word ``w`` with ``w_k = 0`` iff the point lies in ``A_k``.  The cells
``A_w`` are sent, in lexicographic order, to consecutive half-open
subintervals of [0, 1) with lengths equal to their measures.  A second,
fiber family gives the vertical coordinate of the square model.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .measures import Measure
from .scalars import Scalar, is_zero, zero
from .symbolic import CylinderSet, SymbolicSystem, _hull, make_cylinder, widen

Bits = tuple[int, ...]


class NullCellError(ValueError):
    """Conditioning on a cell of measure zero."""


def binary_words(n: int) -> Iterable[Bits]:
    """All 0/1 words of length `n` in lexicographic order."""
    return itertools.product((0, 1), repeat=n)


def bits_label(w: Sequence[int]) -> str:
    return "".join(map(str, w))


def parse_bits(w) -> Bits:
    if isinstance(w, str):
        if any(ch not in "01" for ch in w):
            raise ValueError(f"not a 0/1 word: {w!r}")
        return tuple(int(ch) for ch in w)
    return tuple(int(b) for b in w)


def coordinate_generators(system: SymbolicSystem, coords: Iterable[int]) -> list[CylinderSet]:
    """Binary generators reading the symbols at `coords`.

    Each coordinate contributes ``ceil(log2 |alphabet|)`` sets; set ``j``
    holds the points whose symbol index has bit ``j`` (most significant
    first) equal to 0.  On a two-letter alphabet this is ``[x_k = 0]``.
    """
    q = system.size
    nbits = max(1, math.ceil(math.log2(q))) if q > 1 else 0
    gens = []
    for k in coords:
        for j in range(nbits):
            shift_ = nbits - 1 - j
            cells = [(i,) for i in range(q) if not (i >> shift_) & 1]
            gens.append(make_cylinder(system, k, 1, cells))
    return gens


class GeneratorCoding:
    """Cell masses ``mu(A_w)`` for all prefixes of the generator coding.

    Everything is computed from the cells of the generators' common window,
    together with optional `extra` sets (used for joint masses).
    """

    def __init__(self, mu: Measure, generators: Sequence[CylinderSet],
                 extra: Sequence[CylinderSet] = ()):
        self.mu = mu
        self.generators = list(generators)
        self.extra = list(extra)
        sets = self.generators + self.extra
        if not sets:
            a, b = 0, 0
        else:
            a, b = _hull(*sets)
        self.window = (a, b)
        gen_cells = [widen(g, a, b) for g in self.generators]
        extra_cells = [widen(e, a, b) for e in self.extra]
        weights = mu.window_weights(a, b - a)
        z = zero(mu.mode)
        self.cells = []
        for w in mu.system.words(b - a):
            code = tuple(0 if w in g else 1 for g in gen_cells)
            flags = tuple(w in e for e in extra_cells)
            self.cells.append((w, code, flags, weights.get(w, z)))
        self._masses: dict[int | None, dict[Bits, Scalar]] = {}

    @property
    def n(self) -> int:
        return len(self.generators)

    def _prefix_masses(self, extra_index: int | None) -> dict[Bits, Scalar]:
        if extra_index not in self._masses:
            z = zero(self.mu.mode)
            out: dict[Bits, Scalar] = {}
            for _, code, flags, wt in self.cells:
                if extra_index is not None and not flags[extra_index]:
                    continue
                for k in range(len(code) + 1):
                    key = code[:k]
                    out[key] = out.get(key, z) + wt
            self._masses[extra_index] = out
        return self._masses[extra_index]

    def mass(self, w) -> Scalar:
        """``mu(A_w)``; words longer than the generator list are rejected."""
        w = parse_bits(w)
        if len(w) > self.n:
            raise ValueError(f"word of length {len(w)} exceeds {self.n} generators")
        return self._prefix_masses(None).get(w, zero(self.mu.mode))

    def joint_mass(self, w, extra_index: int = 0) -> Scalar:
        """``mu(E & A_w)`` for the extra set ``E = extra[extra_index]``."""
        w = parse_bits(w)
        return self._prefix_masses(extra_index).get(w, zero(self.mu.mode))

    def lex_offset(self, w) -> Scalar:
        """Mass of the cells preceding ``A_w``, via the one-sum-per-1-bit formula."""
        w = parse_bits(w)
        z = zero(self.mu.mode)
        return sum((self.mass(w[:k] + (0,)) for k in range(len(w)) if w[k] == 1), z)

    def code_of(self, point: Sequence[int], origin: int = 0, n: int | None = None) -> Bits:
        """Generator coding of a concrete point (symbol indices from `origin`)."""
        n = self.n if n is None else n
        return tuple(0 if g.contains_point(point, origin) else 1 for g in self.generators[:n])


@dataclass
class IntervalMap:
    """Cells ``A_w`` and their images ``[left, right)`` in lexicographic order."""

    entries: list[tuple[str, Scalar, Scalar]]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def interval(self, label: str) -> tuple[Scalar, Scalar]:
        for lab, a, b in self.entries:
            if lab == label:
                return a, b
        raise KeyError(label)

    def lengths(self) -> dict[str, Scalar]:
        return {lab: b - a for lab, a, b in self.entries}

    def tiles_unit_interval(self) -> bool:
        """Consecutive, non-overlapping, covering [0, 1) exactly."""
        pos = 0
        for _, a, b in self.entries:
            if a != pos or b < a:
                return False
            pos = b
        return pos == 1


def rho_map(mu: Measure, generators: Sequence[CylinderSet], n: int | None = None,
            coding: GeneratorCoding | None = None) -> IntervalMap:
    """Interval image of every depth-`n` cell of the generator coding."""
    coding = coding or GeneratorCoding(mu, generators)
    n = coding.n if n is None else n
    if n > coding.n:
        raise ValueError(f"depth {n} exceeds the {coding.n} generators given")
    pos = zero(mu.mode)
    entries = []
    for w in binary_words(n):
        m = coding.mass(w)
        entries.append((bits_label(w), pos, pos + m))
        pos = pos + m
    return IntervalMap(entries)


def lex_offset(mu: Measure, generators: Sequence[CylinderSet], w,
               coding: GeneratorCoding | None = None) -> Scalar:
    """``sum over v < w of mu(A_v)`` written as one term per 1-bit of `w`."""
    w = parse_bits(w)
    coding = coding or GeneratorCoding(mu, list(generators)[:len(w)])
    return coding.lex_offset(w)


def point_code(mu: Measure, generators: Sequence[CylinderSet], x: Sequence, n: int,
               origin: int = 0, coding: GeneratorCoding | None = None) -> Scalar:
    """Depth-`n` partial sum of the interval coordinate of the point `x`.

    `x` lists symbols (labels or indices) from coordinate `origin` and must
    cover the windows of the first `n` generators.
    """
    system = mu.system
    point = [s if isinstance(s, int) else system.alphabet.index(s) for s in x]
    coding = coding or GeneratorCoding(mu, list(generators)[:n])
    bits = coding.code_of(point, origin, n)
    return coding.lex_offset(bits)


def phi_mw(mu: Measure, xi_generators: Sequence[CylinderSet], fiber_set: CylinderSet,
           x_prefix, m: int, coding: GeneratorCoding | None = None) -> Scalar:
    """Conditional mass ``mu(B & A_v) / mu(A_v)`` with ``v`` the first `m` bits of `x_prefix`."""
    v = parse_bits(x_prefix)[:m]
    if len(v) < m:
        raise ValueError(f"prefix shorter than m={m}")
    coding = coding or GeneratorCoding(mu, list(xi_generators)[:m], [fiber_set])
    base = coding.mass(v)
    if is_zero(base):
        raise NullCellError(f"cell A_{bits_label(v)} has measure zero")
    return coding.joint_mass(v, 0) / base


@dataclass
class MartingaleReport:
    m: int
    levels: tuple[int, ...]
    worst_residual: Scalar
    checked: int

    @property
    def passed(self) -> bool:
        return is_zero(self.worst_residual)


def martingale_check(mu: Measure, xi_generators: Sequence[CylinderSet], fiber_set: CylinderSet,
                     m: int, extra_levels: int = 1) -> MartingaleReport:
    """Check ``integral over A_v of phi_j dmu = mu(B & A_v)`` for |v| = m and j = m..m+extra_levels.

    Null cells ``A_u`` contribute nothing to the integral.
    """
    levels = tuple(j for j in range(m, m + extra_levels + 1) if j <= len(xi_generators))
    coding = GeneratorCoding(mu, list(xi_generators)[:max(levels)], [fiber_set])
    worst = zero(mu.mode)
    checked = 0
    for v in binary_words(m):
        target = coding.joint_mass(v)
        for j in levels:
            total = zero(mu.mode)
            for tail in binary_words(j - m):
                u = v + tail
                base = coding.mass(u)
                if is_zero(base):
                    continue
                total += (coding.joint_mass(u) / base) * base
            worst = max(worst, abs(total - target))
            checked += 1
    return MartingaleReport(m, levels, worst, checked)


def phi_convergence(mu: Measure, xi_generators: Sequence[CylinderSet], fiber_set: CylinderSet,
                    m_max: int) -> list[tuple[int, float]]:
    """Max over positive prefixes of ``|phi_{m+1} - phi_m|`` for m < m_max (diagnostic only)."""
    coding = GeneratorCoding(mu, list(xi_generators)[:m_max], [fiber_set])
    out = []
    for m in range(m_max):
        worst = 0.0
        for u in binary_words(m + 1):
            base, parent = coding.mass(u), coding.mass(u[:-1])
            if is_zero(base) or is_zero(parent):
                continue
            diff = abs(coding.joint_mass(u) / base - coding.joint_mass(u[:-1]) / parent)
            worst = max(worst, float(diff))
        out.append((m, worst))
    return out


@dataclass
class Rect:
    column: str
    fiber: str
    x0: Scalar
    x1: Scalar
    y0: Scalar
    y1: Scalar

    @property
    def area(self) -> Scalar:
        return (self.x1 - self.x0) * (self.y1 - self.y0)


@dataclass
class SquareChart:
    m: int
    k: int
    rects: list[Rect]
    densities: dict[str, dict[str, Scalar]] = field(default_factory=dict)
    joint: dict[tuple[str, str], Scalar] = field(default_factory=dict)

    def column_areas(self) -> dict[str, Scalar]:
        out: dict[str, Scalar] = {}
        for r in self.rects:
            out[r.column] = out.get(r.column, 0) + r.area
        return out

    def total_area(self) -> Scalar:
        return sum((r.area for r in self.rects), 0)


def square_chart(mu: Measure, xi_generators: Sequence[CylinderSet],
                 fiber_generators: Sequence[CylinderSet], m: int, k: int,
                 null: str = "error") -> SquareChart:
    """Rectangles for the joint cells ``A_v & B_w``, |v| = m, |w| = k.

    The column of ``v`` is its interval image; inside it the fibers ``w`` are
    stacked in lexicographic order with heights ``phi_m^w(v)``.  Null columns
    raise :class:`NullCellError`, or are left out with ``null="skip"``.
    """
    if null not in ("error", "skip"):
        raise ValueError("null must be 'error' or 'skip'")
    xi_generators = list(xi_generators)[:m]
    fiber_generators = list(fiber_generators)[:k]
    if len(xi_generators) < m or len(fiber_generators) < k:
        raise ValueError("not enough generators for the requested depths")
    coding = GeneratorCoding(mu, xi_generators)
    a, b = _hull(*fiber_generators) if fiber_generators else (0, 0)
    every = frozenset(mu.system.words(b - a))
    gen_cells = [widen(gen, a, b) for gen in fiber_generators]
    fiber_sets: list[tuple[str, CylinderSet]] = []
    for w in binary_words(k):
        cells = every
        for bit, gcells in zip(w, gen_cells):
            cells = cells & gcells if bit == 0 else cells - gcells
        fiber_sets.append((bits_label(w), make_cylinder(mu.system, a, b - a, cells)
                           if cells else make_cylinder(mu.system, 0, 0, [])))
    joint_coding = GeneratorCoding(mu, xi_generators, [s for _, s in fiber_sets])
    intervals = rho_map(mu, xi_generators, m, coding=coding)
    rects: list[Rect] = []
    densities: dict[str, dict[str, Scalar]] = {lab: {} for lab, _ in fiber_sets}
    joint: dict[tuple[str, str], Scalar] = {}
    for v, (col, x0, x1) in zip(binary_words(m), intervals):
        base = coding.mass(v)
        if is_zero(base):
            if null == "error":
                raise NullCellError(f"column A_{col or '()'} has measure zero")
            continue
        y = zero(mu.mode)
        for j, (fib, _) in enumerate(fiber_sets):
            jm = joint_coding.joint_mass(v, j)
            phi = jm / base
            densities[fib][col] = phi
            joint[(col, fib)] = jm
            rects.append(Rect(col, fib, x0, x1, y, y + phi))
            y = y + phi
    return SquareChart(m, k, rects, densities, joint)


@dataclass
class PeanoCell:
    index: int
    t0: Fraction
    t1: Fraction
    x0: Fraction
    y0: Fraction
    side: Fraction

    @property
    def area(self) -> Fraction:
        return self.side * self.side


def _hilbert_d2xy(side: int, d: int) -> tuple[int, int]:
    x = y = 0
    s, t = 1, d
    while s < side:
        rx = 1 & (t // 2)
        ry = 1 & (t ^ rx)
        if ry == 0:
            if rx == 1:
                x, y = s - 1 - x, s - 1 - y
            x, y = y, x
        x += s * rx
        y += s * ry
        t //= 4
        s *= 2
    return x, y


def peano_cell(index: int, n: int) -> PeanoCell:
    """Square assigned to the basic interval ``[index/4^n, (index+1)/4^n)``.

    Squares follow the Hilbert ordering; depth n+1 squares nest in depth n.
    """
    side = 2 ** n
    if not 0 <= index < side * side:
        raise ValueError("interval index out of range")
    x, y = _hilbert_d2xy(side, index)
    scale = Fraction(1, side)
    return PeanoCell(index, Fraction(index, side * side), Fraction(index + 1, side * side),
                     x * scale, y * scale, scale)


def peano_point(t, n: int) -> tuple[Fraction, Fraction]:
    """Lower-left corner of the depth-`n` square containing the image of `t`."""
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    cells = 4 ** n
    index = min(math.floor(t * cells), cells - 1)
    cell = peano_cell(index, n)
    return cell.x0, cell.y0


def peano_cells(n: int) -> list[PeanoCell]:
    return [peano_cell(i, n) for i in range(4 ** n)]


@dataclass
class BasisReport:
    n: int
    words: int
    empty_words: list[str]
    null_words: list[str]
    degenerate_words: list[str]
    degenerate_mass: Scalar
    separates: bool
    separates_mod0: bool


def basis_report(mu: Measure, generators: Sequence[CylinderSet], n: int) -> BasisReport:
    """Depth-`n` funnel statistics of a generator family.

    A word is *empty* when ``A_w`` is the empty set, *null* when it has
    measure zero, and *degenerate* when ``A_w`` holds more than one cell of
    the generators' window (so the family does not separate those cells).
    """
    gens = list(generators)[:n]
    coding = GeneratorCoding(mu, gens)
    by_code: dict[Bits, list] = {}
    for w, code, _, wt in coding.cells:
        by_code.setdefault(code, []).append(wt)
    empty, null, degenerate = [], [], []
    degenerate_mass = zero(mu.mode)
    separates_mod0 = True
    for w in binary_words(n):
        members = by_code.get(w, [])
        label = bits_label(w)
        if not members:
            empty.append(label)
        if is_zero(coding.mass(w)):
            null.append(label)
        if len(members) > 1:
            degenerate.append(label)
            degenerate_mass += sum(members, zero(mu.mode))
            if sum(1 for wt in members if not is_zero(wt)) > 1:
                separates_mod0 = False
    return BasisReport(n, 2 ** n, empty, null, degenerate, degenerate_mass,
                       separates=not degenerate, separates_mod0=separates_mod0)
