"""Information, conditional entropy and entropy rates of finite partitions.

Values are in nats.  In rational mode every entropy is also carried as a
:class:`~measpart.scalars.LogSum`, so identities between entropies are
compared exactly before any logarithm is evaluated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple

from .measures import BernoulliMeasure, MarkovMeasure, Measure, MeasureError, warn_if_not_invariant
from .partitions import (Partition, _from_blocks, invariant_hull, past_partition, shift_partition,
                         support_classes)
from .scalars import FLOAT_TOL, RATIONAL, LogSum, is_zero, log_scalar
from .symbolic import _hull

LOG2 = math.log(2)


def to_bits(nats: float) -> float:
    return nats / LOG2


def _h_exact(weights: Iterable[Fraction]) -> LogSum:
    return LogSum.total(LogSum.log_of(w) * (-w) for w in weights if w)


def _h_float(weights: Iterable) -> float:
    return 0.0 - math.fsum(float(w) * log_scalar(w) for w in weights if not is_zero(w))


def element_weights(mu: Measure, xi: Partition) -> list:
    """Measure of every element, read off one window of cells."""
    a, b = xi.window
    z = Fraction(0) if mu.mode == RATIONAL else 0.0
    out = [z for _ in range(len(xi))]
    if b == a:
        out[0] = mu.mass()
        return out
    for w, idx in xi.cell_map(a, b).items():
        out[idx] += mu.window_weights(a, b - a).get(w, z)
    return out


def information_exact(mu: Measure, xi: Partition) -> LogSum:
    """``H_mu(xi)`` as an exact combination of prime logarithms (rational mode only)."""
    if mu.mode != RATIONAL:
        raise ValueError("exact information needs a rational-mode measure")
    return _h_exact(element_weights(mu, xi))


def information(mu: Measure, xi: Partition) -> float:
    """``-sum mu(C) log mu(C)`` with ``0 log 0 = 0``."""
    w = element_weights(mu, xi)
    return float(_h_exact(w)) if mu.mode == RATIONAL else _h_float(w)


def _joint(mu: Measure, xi: Partition, eta: Partition):
    a, b = _hull(*xi.sets, *eta.sets)
    if b == a:
        return {(0, 0): mu.mass()}
    cx, ce = xi.cell_map(a, b), eta.cell_map(a, b)
    out: dict[tuple[int, int], object] = {}
    for w, v in mu.window_weights(a, b - a).items():
        if is_zero(v):
            continue
        key = (cx[w], ce[w])
        out[key] = out.get(key, 0) + v
    return out


def conditional_entropy_exact(mu: Measure, xi: Partition, eta: Partition) -> LogSum:
    """``H(xi | eta)`` exactly, summed over joint cells."""
    if mu.mode != RATIONAL:
        raise ValueError("exact entropy needs a rational-mode measure")
    joint = _joint(mu, xi, eta)
    marg: dict[int, Fraction] = {}
    for (_, j), v in joint.items():
        marg[j] = marg.get(j, Fraction(0)) + v
    return LogSum.total((LogSum.log_of(marg[j]) - LogSum.log_of(v)) * v for (_, j), v in joint.items())


def conditional_entropy(mu: Measure, xi: Partition, eta: Partition) -> float:
    """``sum mu(C & D) * -log mu_D(C)`` over joint cells of xi and eta."""
    if mu.mode == RATIONAL:
        return float(conditional_entropy_exact(mu, xi, eta))
    joint = _joint(mu, xi, eta)
    marg: dict[int, float] = {}
    for (_, j), v in joint.items():
        marg[j] = marg.get(j, 0.0) + v
    return max(0.0, math.fsum(v * (math.log(marg[j]) - math.log(v)) for (_, j), v in joint.items()))


# entropy rates

def block_weights(mu: Measure, xi: Partition, n: int) -> list:
    """Element weights of ``join of T^{-k} xi for k < n``, without building the join."""
    if n < 1:
        return [mu.mass()]
    a, b = xi.window
    L = b - a
    if L == 0:
        return [mu.mass()]
    cm = xi.cell_map(a, b)
    acc: dict[tuple, object] = {}
    for w, v in mu.window_weights(a, L + n - 1).items():
        if is_zero(v):
            continue
        key = tuple(cm[w[k:k + L]] for k in range(n))
        acc[key] = acc.get(key, 0) + v
    return list(acc.values())


@dataclass
class EntropyReport:
    """``H_n`` for ``n = 1..n_max`` with increments ``H_{n+1} - H_n`` and rates ``H_n / n``."""

    n_max: int
    H: list[float]
    exact: list[LogSum] | None
    mode: str
    invariant: bool = True
    stabilized_from: int | None = None
    increments: list[float] = field(init=False)
    rates: list[float] = field(init=False)

    def __post_init__(self):
        if self.exact is not None:
            self.increments = [float(self.exact[i + 1] - self.exact[i]) for i in range(self.n_max - 1)]
        else:
            self.increments = [self.H[i + 1] - self.H[i] for i in range(self.n_max - 1)]
        self.rates = [h / (i + 1) for i, h in enumerate(self.H)]
        self.stabilized_from = self._stabilization()

    def exact_increments(self) -> list[LogSum] | None:
        if self.exact is None:
            return None
        return [self.exact[i + 1] - self.exact[i] for i in range(self.n_max - 1)]

    def _stabilization(self) -> int | None:
        ex = self.exact_increments()
        inc = ex if ex is not None else self.increments
        if not inc:
            return None
        same = (lambda x, y: x == y) if ex is not None else (lambda x, y: abs(x - y) <= FLOAT_TOL)
        n0 = len(inc)
        while n0 > 1 and same(inc[n0 - 2], inc[-1]):
            n0 -= 1
        return n0

    @property
    def stabilized(self) -> bool:
        """Increments are constant over at least two steps at the end of the range."""
        return self.stabilized_from is not None and self.stabilized_from < self.n_max - 1

    @property
    def rate(self) -> float:
        """Best estimate of ``h(T, xi)``: the last increment (or ``H_1`` when ``n_max = 1``)."""
        return self.increments[-1] if self.increments else self.H[0]

    def increments_zero(self) -> bool:
        ex = self.exact_increments()
        if ex is not None:
            return all(x.is_zero() for x in ex)
        return all(abs(x) <= FLOAT_TOL for x in self.increments)

    def rows(self, bits: bool = False):
        """``(n, H_n, increment, rate)``; the last increment is ``None``."""
        k = 1 / LOG2 if bits else 1.0
        for i in range(self.n_max):
            inc = self.increments[i] * k if i < len(self.increments) else None
            yield i + 1, self.H[i] * k, inc, self.rates[i] * k


def entropy_rate(mu: Measure, xi: Partition, n_max: int) -> EntropyReport:
    """Entropy of the n-step join of xi for ``n <= n_max``.

    A non-invariant measure is allowed: the report comes back with
    ``invariant=False`` and a warning is issued.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    inv = warn_if_not_invariant(mu)
    exact = [] if mu.mode == RATIONAL else None
    H = []
    for n in range(1, n_max + 1):
        w = block_weights(mu, xi, n)
        if exact is not None:
            e = _h_exact(w)
            exact.append(e)
            H.append(float(e))
        else:
            H.append(_h_float(w))
    return EntropyReport(n_max, H, exact, mu.mode, inv)


class IdentityCheck(NamedTuple):
    lhs: float
    rhs: float
    lhs_exact: LogSum | None
    rhs_exact: LogSum | None

    @property
    def equal(self) -> bool:
        if self.lhs_exact is not None:
            return self.lhs_exact == self.rhs_exact
        return abs(self.lhs - self.rhs) <= FLOAT_TOL


def entropy_identity_check(mu: Measure, xi: Partition, n: int) -> IdentityCheck:
    """``H_{n+1} - H_n`` against ``H(past_n | T^{-1} past_n)``.

    ``past_n`` joins ``T^{-k} xi`` for ``k = 0..n``.  The two sides agree
    for Markov measures (and xi of one coordinate) once ``n >= 1``.
    """
    past = past_partition(xi, n)
    pre = shift_partition(past, 1)
    if mu.mode == RATIONAL:
        lhs = _h_exact(block_weights(mu, xi, n + 1)) - _h_exact(block_weights(mu, xi, n))
        rhs = conditional_entropy_exact(mu, past, pre)
        return IdentityCheck(float(lhs), float(rhs), lhs, rhs)
    lhs = _h_float(block_weights(mu, xi, n + 1)) - _h_float(block_weights(mu, xi, n))
    return IdentityCheck(lhs, conditional_entropy(mu, past, pre), None, None)


class TailCheck(NamedTuple):
    pi: Partition
    report: EntropyReport

    @property
    def passed(self) -> bool:
        return self.report.increments_zero()

    def __bool__(self) -> bool:
        return self.passed


def tail_zero_entropy_check(mu: Measure, xi: Partition, n_max: int) -> TailCheck:
    """Compute ``Pi(xi)`` and check that its entropy increments all vanish."""
    pi = invariant_hull(xi, mu)
    return TailCheck(pi, entropy_rate(mu, pi, max(n_max, 2)))


# Markov entropy and the Pinsker partition

def _row_entropy(row, mode: str):
    if mode == RATIONAL:
        return _h_exact(row)
    return _h_float(row)


def class_entropies(mu: Measure) -> list[tuple[tuple[int, ...], object]]:
    """Per-step entropy carried by each communicating class of the support.

    Entries are ``(class symbols, sum_i pi_i sum_j P_ij log(1/P_ij))``,
    restricted to ``i`` in the class; exact ``LogSum`` in rational mode.
    """
    if isinstance(mu, BernoulliMeasure):
        alive = tuple(i for i, w in enumerate(mu.weights) if not is_zero(w))
        return [(alive, _row_entropy(mu.weights, mu.mode))]
    if not isinstance(mu, MarkovMeasure):
        raise MeasureError("class entropies are defined for Bernoulli and Markov measures")
    if not mu.invariant():
        raise MeasureError("class entropies need a stationary Markov measure")
    out = []
    for cls in support_classes(mu):
        parts = [_row_entropy(mu.P[i], mu.mode) * mu.p[i] if mu.mode == RATIONAL
                 else mu.p[i] * _row_entropy(mu.P[i], mu.mode) for i in cls]
        total = LogSum.total(parts) if mu.mode == RATIONAL else math.fsum(parts)
        out.append((cls, total))
    return out


def markov_entropy(mu: Measure):
    """``sum_i pi_i sum_j P_ij log(1/P_ij)``; exact in rational mode."""
    parts = [h for _, h in class_entropies(mu)]
    return LogSum.total(parts) if mu.mode == RATIONAL else math.fsum(parts)


def _positive(h) -> bool:
    return not h.is_zero() if isinstance(h, LogSum) else h > FLOAT_TOL


def pinsker_sft(mu: Measure, depth: int = 1) -> Partition:
    """Pinsker partition of a stationary Markov (or Bernoulli) measure at `depth`.

    Each class of positive per-step entropy contributes one element, the
    union of its symbol cylinders.  Each deterministic class contributes
    its depth-`depth` point cells.  Null cells join the first element.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    classes = class_entropies(mu)
    system = mu.system
    owner = {s: k for k, (cls, _) in enumerate(classes) for s in cls}
    weights = mu.window_weights(0, depth)
    groups: dict[object, set] = {}
    labels: dict[object, str] = {}
    order: list = []
    null: set = set()

    def add(key, label, w):
        if key not in groups:
            groups[key] = set()
            labels[key] = label
            order.append(key)
        groups[key].add(w)

    for w in system.words(depth):
        if is_zero(weights.get(w, 0)) or w[0] not in owner:
            null.add(w)
            continue
        k = owner[w[0]]
        cls, h = classes[k]
        if _positive(h):
            add(("class", k), "+".join(f"C{system.alphabet.symbols[s]}" for s in cls), w)
        else:
            add(("word", w), system.label(w), w)
    order.sort(key=lambda key: min(groups[key]))
    if null:
        if order:
            groups[order[0]] |= null
        else:
            add(("null",), "X", next(iter(null)))
            groups[("null",)] |= null
    if len(order) == 1:
        labels[order[0]] = "X"
    return _from_blocks(system, 0, depth, [(labels[k], frozenset(groups[k])) for k in order])
