"""Measures on the cylinder algebra of a symbolic system.

Three kinds are supported: Bernoulli product measures on full shifts,
Markov measures (row-stochastic matrix plus initial vector) on SFTs, and
explicit tables of weights on one coordinate window.  Values are exact
Fractions in rational mode (the default) and floats in float mode.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .scalars import (FLOAT, FLOAT_TOL, RATIONAL, Scalar, check_mode, close, common_mode,
                      is_zero, one, parse_scalar, to_mode, zero)
from .symbolic import (CylinderSet, SymbolicSystem, Word, full_space, make_cylinder,
                       normalize, preimage, widen)


class MeasureError(ValueError):
    """Invalid measure data."""


class AbsoluteContinuityError(ValueError):
    """A cell is null for the reference measure but charged by the other."""

    def __init__(self, cell: str, nu_value: Scalar):
        super().__init__(f"not absolutely continuous: cell [{cell}] has mu = 0 but nu = {nu_value}")
        self.cell = cell


class NonInvariantMeasureWarning(UserWarning):
    pass


class Measure:
    """A finite measure on the cylinder algebra.

    Subclasses provide ``_window_weights(start, length)``, the weight of every
    admissible word on a window.  Results are cached per window.
    """

    kind = "abstract"

    def __init__(self, system: SymbolicSystem, mode: str):
        self.system = system
        self.mode = check_mode(mode)
        self._cache: dict[tuple[int, int], dict[Word, Scalar]] = {}

    @property
    def exact(self) -> bool:
        return self.mode == RATIONAL

    def invariant(self) -> bool | None:
        """Known shift-invariance, or None when it has to be checked."""
        return None

    def window_weights(self, start: int, length: int) -> dict[Word, Scalar]:
        key = (start, length)
        if key not in self._cache:
            self._cache[key] = self._window_weights(start, length)
        return self._cache[key]

    def _window_weights(self, start: int, length: int) -> dict[Word, Scalar]:
        raise NotImplementedError

    def weight(self, word: Sequence[int], start: int = 0) -> Scalar:
        return self.window_weights(start, len(word)).get(tuple(word), zero(self.mode))

    def mass(self) -> Scalar:
        return self.of(full_space(self.system))

    def of(self, cyl: CylinderSet) -> Scalar:
        if cyl.system != self.system:
            raise ValueError("cylinder set belongs to a different system")
        if not cyl.cells:
            return zero(self.mode)
        if cyl.length == 0:
            return self._total()
        weights = self.window_weights(cyl.start, cyl.length)
        z = zero(self.mode)
        return sum((weights.get(c, z) for c in cyl.cells), z)

    def _total(self) -> Scalar:
        return sum(self.window_weights(0, 1).values(), zero(self.mode))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} mode={self.mode} on {self.system.alphabet.symbols}>"


def _parse_vector(values, n: int, mode: str, what: str) -> tuple[Scalar, ...]:
    vals = tuple(parse_scalar(v, mode) for v in values)
    if len(vals) != n:
        raise MeasureError(f"{what} has length {len(vals)}, expected {n}")
    if any(v < 0 for v in vals):
        raise MeasureError(f"{what} has negative entries")
    return vals


def _sums_to_one(values: Iterable[Scalar], mode: str) -> bool:
    total = sum(values, zero(mode))
    if mode == RATIONAL:
        return total == 1
    return abs(total - 1.0) <= FLOAT_TOL


class BernoulliMeasure(Measure):
    kind = "bernoulli"

    def __init__(self, system: SymbolicSystem, weights: Sequence[Scalar], mode: str):
        super().__init__(system, mode)
        self.weights = tuple(weights)

    def invariant(self) -> bool:
        return True

    def _window_weights(self, start, length):
        out: dict[Word, Scalar] = {(): one(self.mode)}
        for _ in range(length):
            out = {w + (s,): v * self.weights[s] for w, v in out.items() for s in range(self.system.size)}
        return out


class MarkovMeasure(Measure):
    """``mu[x_a ... x_b] = q_a(x_a) * prod P(x_i, x_{i+1})`` with ``q_a = p P^a``.

    For invariant measures ``q_a = p`` at every coordinate; non-invariant
    initial vectors are only defined on non-negative coordinates.
    """

    kind = "markov"

    def __init__(self, system: SymbolicSystem, P, p, mode: str):
        super().__init__(system, mode)
        self.P = tuple(tuple(r) for r in P)
        self.p = tuple(p)
        pP = _vec_mat(self.p, self.P, mode)
        self._invariant = all(close(a, b) for a, b in zip(pP, self.p))
        self._marginals: dict[int, tuple[Scalar, ...]] = {0: self.p}

    def invariant(self) -> bool:
        return self._invariant

    def marginal(self, coord: int) -> tuple[Scalar, ...]:
        if self._invariant:
            return self.p
        if coord < 0:
            raise MeasureError("non-invariant Markov measure is undefined on negative coordinates")
        while coord not in self._marginals:
            k = max(self._marginals)
            self._marginals[k + 1] = _vec_mat(self._marginals[k], self.P, self.mode)
        return self._marginals[coord]

    def _window_weights(self, start, length):
        if length == 0:
            return {(): one(self.mode)}
        q = self.marginal(start)
        out: dict[Word, Scalar] = {(i,): q[i] for i in range(self.system.size)}
        for _ in range(length - 1):
            out = {w + (j,): v * self.P[w[-1]][j] for w, v in out.items() for j in self.system.successors[w[-1]]}
        return out


class TableMeasure(Measure):
    """Explicit weights on the admissible words of one window ``[start, start+length)``."""

    kind = "table"

    def __init__(self, system: SymbolicSystem, start: int, length: int,
                 weights: Mapping[Word, Scalar], mode: str):
        super().__init__(system, mode)
        self.start = start
        self.length = length
        z = zero(mode)
        admissible = system.words(length)
        self.table = {w: weights.get(w, z) for w in admissible}
        extra = set(weights) - set(self.table)
        if any(not is_zero(weights[w]) for w in extra):
            raise MeasureError("table charges inadmissible words")

    def _window_weights(self, start, length):
        if length == 0:
            return {(): self._total()}
        if start < self.start or start + length > self.start + self.length:
            raise MeasureError(
                f"window [{start},{start + length - 1}] lies outside the table window "
                f"[{self.start},{self.start + self.length - 1}]")
        lo = start - self.start
        out: dict[Word, Scalar] = {}
        z = zero(self.mode)
        for w, v in self.table.items():
            sub = w[lo:lo + length]
            out[sub] = out.get(sub, z) + v
        return out

    def _total(self):
        return sum(self.table.values(), zero(self.mode))

    def of(self, cyl: CylinderSet) -> Scalar:
        if cyl.system != self.system:
            raise ValueError("cylinder set belongs to a different system")
        if cyl.length and (cyl.start >= self.start and cyl.end <= self.start + self.length):
            return super().of(cyl)
        if not cyl.cells:
            return zero(self.mode)
        if cyl.length == 0:
            return self._total()
        try:
            cells = widen(cyl, self.start, self.start + self.length)
        except ValueError:
            raise MeasureError(f"{cyl!r} is not in the algebra of the table window") from None
        z = zero(self.mode)
        return sum((self.table.get(c, z) for c in cells), z)


def _vec_mat(v, M, mode) -> tuple[Scalar, ...]:
    n = len(v)
    z = zero(mode)
    return tuple(sum((v[i] * M[i][j] for i in range(n)), z) for j in range(n))


def bernoulli(system: SymbolicSystem, weights, mode: str = RATIONAL) -> BernoulliMeasure:
    """Product measure on a full shift; `weights` by alphabet order or a label mapping."""
    check_mode(mode)
    if not system.is_full_shift:
        raise MeasureError("bernoulli measures need a full shift; use markov_measure on a proper SFT")
    if isinstance(weights, Mapping):
        weights = [weights[s] for s in system.alphabet.symbols]
    w = _parse_vector(weights, system.size, mode, "bernoulli weights")
    if not _sums_to_one(w, mode):
        raise MeasureError(f"bernoulli weights sum to {sum(w)}, not 1")
    return BernoulliMeasure(system, w, mode)


def stationary_distribution(P: Sequence[Sequence[Scalar]]) -> tuple[Fraction, ...]:
    """Exact stationary vector of a rational stochastic matrix.

    Raises MeasureError when the stationary vector is not unique.
    """
    n = len(P)
    P = [[Fraction(x) for x in row] for row in P]
    # unknowns pi_0..pi_{n-1}: (P^T - I) pi = 0 and sum(pi) = 1
    rows = [[P[i][j] - (1 if i == j else 0) for i in range(n)] + [Fraction(0)] for j in range(n)]
    rows.append([Fraction(1)] * n + [Fraction(1)])
    pivots = []
    r = 0
    for c in range(n):
        piv = next((k for k in range(r, len(rows)) if rows[k][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
    if len(pivots) < n:
        raise MeasureError("stationary distribution is not unique; pass an initial vector")
    return tuple(rows[i][n] for i in range(n))


def markov_measure(system: SymbolicSystem, P, p=None, mode: str = RATIONAL) -> MarkovMeasure:
    """Markov measure with transition matrix `P` and initial vector `p`.

    With ``p=None`` the (unique) stationary vector is used.
    """
    check_mode(mode)
    n = system.size
    if len(P) != n:
        raise MeasureError(f"P must be {n}x{n}")
    rows = tuple(_parse_vector(r, n, mode, f"row {i} of P") for i, r in enumerate(P))
    for i, r in enumerate(rows):
        if not _sums_to_one(r, mode):
            raise MeasureError(f"row {i} of P sums to {sum(r)}, not 1")
        for j, v in enumerate(r):
            if not is_zero(v) and not system.transition[i][j]:
                a, b = system.alphabet.symbols[i], system.alphabet.symbols[j]
                raise MeasureError(f"P charges the forbidden transition {a}->{b}")
    if p is None:
        if mode == FLOAT:
            exact = stationary_distribution([[Fraction(x) for x in r] for r in rows])
            vec = tuple(float(x) for x in exact)
        else:
            vec = stationary_distribution(rows)
    else:
        vec = _parse_vector(p, n, mode, "initial vector")
        if not _sums_to_one(vec, mode):
            raise MeasureError(f"initial vector sums to {sum(vec)}, not 1")
    return MarkovMeasure(system, rows, vec, mode)


def table_measure(system: SymbolicSystem, weights: Mapping, start: int = 0,
                  mode: str = RATIONAL, probability: bool = True) -> TableMeasure:
    """Measure given by weights of the words on one window.

    `weights` maps words (strings or index tuples) to values; all words must
    have the same length.  With ``probability=False`` the total mass is free.
    """
    check_mode(mode)
    parsed: dict[Word, Scalar] = {}
    for w, v in weights.items():
        key = system.parse_word(w) if isinstance(w, str) else tuple(w)
        parsed[key] = parse_scalar(v, mode)
    lengths = {len(w) for w in parsed}
    if len(lengths) > 1:
        raise MeasureError("table words must share one length")
    length = lengths.pop() if lengths else 0
    if any(v < 0 for v in parsed.values()):
        raise MeasureError("table has negative weights")
    mu = TableMeasure(system, start, length, parsed, mode)
    if probability and not _sums_to_one(mu.table.values(), mode):
        raise MeasureError(f"table weights sum to {mu.mass()}, not 1")
    return mu


def restrict_to_window(mu: Measure, start: int, length: int) -> TableMeasure:
    """The restriction of `mu` to the algebra of one window, as a table."""
    weights = mu.window_weights(start, length)
    return TableMeasure(mu.system, start, length, dict(weights), mu.mode)


def measure_of(mu: Measure, cyl: CylinderSet) -> Scalar:
    return mu.of(cyl)


@dataclass
class InvarianceReport:
    passed: bool
    depth: int
    worst_discrepancy: Scalar
    worst_cell: str | None
    checked: int

    def __bool__(self) -> bool:
        return self.passed


def check_invariance(mu: Measure, depth: int) -> InvarianceReport:
    """Compare ``mu(T^{-1} C)`` with ``mu(C)`` for every word cylinder of length <= depth.

    Word cylinders sit on windows starting at coordinate 0.  Table measures
    are checked only where the preimage stays inside the table window.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    worst: Scalar = zero(mu.mode)
    worst_cell = None
    checked = 0
    max_len = depth
    if isinstance(mu, TableMeasure):
        max_len = min(depth, mu.start + mu.length - 1 - max(mu.start, 0))
    start = max(getattr(mu, "start", 0), 0)
    for length in range(1, max_len + 1):
        for w in mu.system.words(length):
            cyl = make_cylinder(mu.system, start, length, [w])
            gap = abs(mu.of(preimage(cyl)) - mu.of(cyl))
            checked += 1
            if gap > worst:
                worst, worst_cell = gap, mu.system.label(w)
    passed = is_zero(worst)
    return InvarianceReport(passed, max_len, worst, worst_cell, checked)


@dataclass
class DensityTable:
    """Finite-depth derivative ``d(C) = nu(C) / mu(C)`` on cells with ``mu(C) > 0``."""

    depth: int
    values: dict[Word, Scalar]
    nu: Measure = field(repr=False)
    mu: Measure = field(repr=False)

    def __getitem__(self, word) -> Scalar:
        if isinstance(word, str):
            word = self.mu.system.parse_word(word)
        return self.values[tuple(word)]

    def integrate(self, cyl: CylinderSet | None = None) -> Scalar:
        """``sum over cells C inside E of d(C) * mu(C)``; E defaults to the whole space."""
        if cyl is None:
            cells = self.values.keys()
        else:
            cyl = normalize(cyl)
            try:
                cells = widen(cyl, 0, self.depth) if cyl.length else (self.values.keys() if cyl.cells else ())
            except ValueError:
                raise ValueError(f"{cyl!r} is outside the depth-{self.depth} algebra") from None
        weights = self.mu.window_weights(0, self.depth)
        z = zero(self.mu.mode)
        return sum((self.values[c] * weights[c] for c in cells if c in self.values), z)

    def max_density(self) -> Scalar:
        return max(self.values.values())

    def min_density(self) -> Scalar:
        return min(self.values.values())

    def rows(self):
        system = self.mu.system
        for w in sorted(self.values):
            yield system.label(w), self.values[w]


def _pair_mode(nu: Measure, mu: Measure) -> str:
    if nu.system != mu.system:
        raise ValueError("measures live on different systems")
    return common_mode(nu.mode, mu.mode)


def rn_derivative(nu: Measure, mu: Measure, depth: int) -> DensityTable:
    """Radon-Nikodym derivative of `nu` w.r.t. `mu` on the depth-`depth` cell algebra."""
    mode = _pair_mode(nu, mu)
    nw = nu.window_weights(0, depth)
    mw = mu.window_weights(0, depth)
    values: dict[Word, Scalar] = {}
    for w in mu.system.words(depth):
        m = to_mode(mw.get(w, 0), mode)
        n = to_mode(nw.get(w, 0), mode)
        if is_zero(m):
            if not is_zero(n):
                raise AbsoluteContinuityError(mu.system.label(w), n)
            continue
        values[w] = n / m
    return DensityTable(depth, values, nu, mu)


def rn_decompose(nu: Measure, mu: Measure, depth: int) -> tuple[TableMeasure, TableMeasure]:
    """Split ``nu = nu_ac + nu_sing`` on the depth algebra.

    ``nu_sing`` is `nu` restricted to the union of mu-null cells.
    """
    mode = _pair_mode(nu, mu)
    nw = nu.window_weights(0, depth)
    mw = mu.window_weights(0, depth)
    ac: dict[Word, Scalar] = {}
    sing: dict[Word, Scalar] = {}
    z = zero(mode)
    for w in mu.system.words(depth):
        n = to_mode(nw.get(w, 0), mode)
        if is_zero(to_mode(mw.get(w, 0), mode)):
            sing[w], ac[w] = n, z
        else:
            ac[w], sing[w] = n, z
    return (TableMeasure(mu.system, 0, depth, ac, mode),
            TableMeasure(mu.system, 0, depth, sing, mode))


def rn_convergence(nu: Measure, mu: Measure, depths: Iterable[int]) -> list[tuple[int, Scalar, Scalar]]:
    """(depth, min density, max density) per depth; a diagnostic, nothing is asserted."""
    out = []
    for d in depths:
        table = rn_derivative(nu, mu, d)
        out.append((d, table.min_density(), table.max_density()))
    return out


def warn_if_not_invariant(mu: Measure, depth: int = 2) -> bool:
    """True if `mu` is (known or checked) invariant; warns otherwise."""
    inv = mu.invariant()
    if inv is None:
        inv = check_invariance(mu, depth).passed
    if not inv:
        warnings.warn("measure is not shift-invariant; entropy values are not rates of T",
                      NonInvariantMeasureWarning, stacklevel=3)
    return inv
