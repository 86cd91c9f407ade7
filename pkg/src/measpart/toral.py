"""Linear toral automorphisms: exponents, Haar entropy, Ruelle and Pesin checks.

Hyperbolicity is certified exactly.  The unit-circle roots of the
characteristic polynomial ``p`` are roots of ``g = gcd(p, p*)`` with ``p*``
the reciprocal polynomial; ``g`` is self-reciprocal, so ``g(z) = z^m h(z + 1/z)``
and unit-circle roots of ``g`` correspond to real roots of ``h`` in ``[-2, 2]``,
which Sturm sequences count without rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import mpmath
import numpy as np
import sympy

DPS = 50
TOL = 1e-12

_x = sympy.Symbol("x")


class ToralError(ValueError):
    pass


def _reciprocal(p: sympy.Poly) -> sympy.Poly:
    return sympy.Poly(list(reversed(p.all_coeffs())), _x)


def _trace_poly(g: sympy.Poly) -> sympy.Poly:
    """``h`` with ``g(z) = z^m h(z + 1/z)`` for a self-reciprocal ``g`` of degree ``2m``."""
    c = g.all_coeffs()[::-1]  # c[k] is the coefficient of z^k
    m = (len(c) - 1) // 2
    S = [sympy.Poly(2, _x), sympy.Poly(_x, _x)]  # S_k = z^k + z^-k as a polynomial in x = z + 1/z
    while len(S) <= m:
        S.append(S[1] * S[-1] - S[-2])
    h = sympy.Poly(c[m], _x)
    for k in range(1, m + 1):
        h += S[k] * c[m + k]
    return h


def unit_circle_roots(p: sympy.Poly) -> int:
    """Number of roots of `p` on the unit circle (counted in ``gcd(p, p*)``)."""
    count = 0
    for z in (1, -1):
        while p.eval(z) == 0:
            p = sympy.Poly(sympy.quo(p.as_expr(), _x - z, _x), _x)
            count += 1
    g = sympy.gcd(p, _reciprocal(p))
    if g.degree() <= 0:
        return count
    assert _reciprocal(g) in (g, -g), "gcd(p, p*) is self-reciprocal"
    assert g.degree() % 2 == 0, "reciprocal factor without +-1 roots has even degree"
    h = _trace_poly(g)
    # each real root of h in (-2, 2) gives a conjugate pair on the circle
    return count + 2 * h.count_roots(-2, 2)


@dataclass(frozen=True)
class ToralSystem:
    matrix: tuple[tuple[int, ...], ...]
    det: int
    charpoly: tuple[int, ...]
    eigenvalues: tuple[tuple[complex, int], ...]

    @property
    def dim(self) -> int:
        return len(self.matrix)


def _eigenvalues(p: sympy.Poly) -> list[tuple]:
    """``(root, multiplicity)`` for every root, each irreducible factor solved at ``DPS`` digits."""
    out = []
    with mpmath.workdps(DPS):
        for fac, mult in sympy.factor_list(p.as_expr(), _x)[1]:
            coeffs = [int(c) for c in sympy.Poly(fac, _x).all_coeffs()]
            if len(coeffs) == 2:
                roots = [mpmath.mpf(-coeffs[1]) / coeffs[0]]
            else:
                roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=4 * DPS)
            out.extend((mpmath.mpc(r), mult) for r in roots)
    return out


def toral_automorphism(M: Sequence[Sequence[int]]) -> ToralSystem:
    """Validate an integer matrix as a hyperbolic automorphism of the torus."""
    rows = [list(r) for r in M]
    d = len(rows)
    if d == 0 or any(len(r) != d for r in rows):
        raise ToralError("matrix must be square and non-empty")
    for r in rows:
        for v in r:
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ToralError(f"matrix entries must be integers, got {v!r}")
    A = sympy.Matrix(rows)
    det = int(A.det())
    if abs(det) != 1:
        raise ToralError(f"|det| must be 1, got det = {det}")
    p = sympy.Poly(A.charpoly(_x).as_expr(), _x)
    k = unit_circle_roots(p)
    if k:
        raise ToralError(f"not hyperbolic: {k} eigenvalue(s) on the unit circle")
    eig = tuple((complex(r), m) for r, m in _eigenvalues(p))
    return ToralSystem(tuple(tuple(int(v) for v in r) for r in rows), det,
                       tuple(int(c) for c in p.all_coeffs()), eig)


@dataclass(frozen=True)
class ExponentSpectrum:
    """``(chi_i, d_i)`` sorted by increasing exponent."""

    exponents: tuple[tuple[float, int], ...]

    @property
    def dim(self) -> int:
        return sum(d for _, d in self.exponents)

    @property
    def weighted_sum(self) -> float:
        return math.fsum(c * d for c, d in self.exponents)

    @property
    def positive_sum(self) -> float:
        return math.fsum(c * d for c, d in self.exponents if c > 0)


def lyapunov(system: ToralSystem) -> ExponentSpectrum:
    """Log-moduli of the eigenvalues, merged by modulus with summed multiplicities."""
    p = sympy.Poly(list(system.charpoly), _x)
    with mpmath.workdps(DPS):
        logs = sorted((mpmath.log(abs(r)), m) for r, m in _eigenvalues(p))
        groups: list[list] = []
        for chi, m in logs:
            if groups and abs(chi - groups[-1][0]) < mpmath.mpf(10) ** (-DPS // 2):
                groups[-1][1] += m
            else:
                groups.append([chi, m])
        return ExponentSpectrum(tuple((float(c), m) for c, m in groups))


def mahler_log(coeffs: Sequence[int], tol: float = 1e-15, max_log2: int = 22) -> float:
    """``int_0^1 log|p(e^{2 pi i t})| dt`` by the trapezoid rule with doubling.

    By Jensen's formula this is ``sum log max(1, |lambda|)`` over the roots of
    a monic `p`; it is computed here without finding any root.
    """
    c = np.array([float(v) for v in coeffs])
    prev = None
    for k in range(4, max_log2 + 1):
        N = 1 << k
        z = np.exp(2j * np.pi * np.arange(N) / N)
        est = float(np.mean(np.log(np.abs(np.polyval(c, z)))))
        if prev is not None and abs(est - prev) < tol:
            return est
        prev = est
    return prev


class PesinResult(NamedTuple):
    h_haar: float
    positive_sum: float

    @property
    def equal(self) -> bool:
        return abs(self.h_haar - self.positive_sum) <= TOL

    def __bool__(self) -> bool:
        return self.equal


def haar_entropy(system: ToralSystem) -> float:
    """Haar-measure entropy as the log Mahler measure of the characteristic polynomial."""
    return mahler_log(system.charpoly)


def pesin_check(system: ToralSystem) -> PesinResult:
    return PesinResult(haar_entropy(system), lyapunov(system).positive_sum)


class RuelleResult(NamedTuple):
    holds: bool
    strict: bool
    h: float
    bound: float

    def __bool__(self) -> bool:
        return self.holds


def ruelle_check(system: ToralSystem, h_measure: float) -> RuelleResult:
    """``h_measure <= sum of positive exponents`` (with a ``1e-12`` allowance)."""
    h = float(h_measure)
    if h < 0:
        raise ValueError("entropy must be non-negative")
    bound = lyapunov(system).positive_sum
    holds = h <= bound + TOL
    return RuelleResult(holds, holds and h < bound - TOL, h, bound)


def conjugate(M: Sequence[Sequence[int]], U: Sequence[Sequence[int]]) -> list[list[int]]:
    """``U M U^{-1}`` for a unimodular integer `U`."""
    Um = sympy.Matrix(U)
    if abs(Um.det()) != 1:
        raise ToralError("conjugating matrix must be unimodular")
    C = Um * sympy.Matrix(M) * Um.inv()
    return [[int(v) for v in C.row(i)] for i in range(C.rows)]


def random_unimodular(d: int, rng, steps: int = 12) -> list[list[int]]:
    """Product of random elementary matrices ``I + s E_ij`` and sign flips."""
    A = np.eye(d, dtype=np.int64)
    for _ in range(steps):
        i, j = rng.choice(d, size=2, replace=False)
        E = np.eye(d, dtype=np.int64)
        E[i, j] = rng.choice([-1, 1])
        A = A @ E
    if rng.random() < 0.5:
        A[0] = -A[0]
    return A.tolist()
