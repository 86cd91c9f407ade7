"""Shift spaces, subshifts of finite type and cylinder sets.

A cylinder set is stored as the explicit set of admissible words on a
coordinate window ``[start, start + length - 1]``.  Words are tuples of
symbol *indices* into the system's alphabet.  The empty window (length 0)
carries either ``{()}`` (the whole space) or ``set()`` (the empty set).

Set operations widen both operands to their common window hull, so equality
and inclusion are decided exactly on cell sets.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

logger = logging.getLogger(__name__)

ONE_SIDED = "one-sided"
TWO_SIDED = "two-sided"

Word = tuple[int, ...]


class SystemError_(ValueError):
    """Invalid symbolic system specification."""


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        if not self.symbols:
            raise SystemError_("alphabet is empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise SystemError_(f"duplicate symbols in alphabet {self.symbols}")

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def index(self, label) -> int:
        try:
            return self.symbols.index(str(label))
        except ValueError:
            raise KeyError(f"symbol {label!r} not in alphabet {self.symbols}") from None


@dataclass(frozen=True)
class SymbolicSystem:
    """Alphabet, 0/1 transition matrix and sidedness, after pruning.

    Build instances with :func:`make_system`; `pruned` lists symbols removed
    because they cannot occur in any point of the space.
    """

    alphabet: Alphabet
    transition: tuple[tuple[bool, ...], ...]
    sidedness: str
    pruned: tuple[str, ...] = ()
    successors: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    predecessors: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.alphabet)
        succ = tuple(tuple(j for j in range(n) if self.transition[i][j]) for i in range(n))
        pred = tuple(tuple(i for i in range(n) if self.transition[i][j]) for j in range(n))
        object.__setattr__(self, "successors", succ)
        object.__setattr__(self, "predecessors", pred)

    @property
    def two_sided(self) -> bool:
        return self.sidedness == TWO_SIDED

    @property
    def size(self) -> int:
        return len(self.alphabet)

    @property
    def is_full_shift(self) -> bool:
        return all(all(row) for row in self.transition)

    def allowed(self, word: Sequence[int]) -> bool:
        return all(self.transition[a][b] for a, b in zip(word, word[1:]))

    def label(self, word: Sequence[int]) -> str:
        syms = [self.alphabet.symbols[i] for i in word]
        if all(len(s) == 1 for s in syms):
            return "".join(syms)
        return ",".join(syms)

    def parse_word(self, text: str | Sequence) -> Word:
        """Word from a string of one-character symbols, a comma list, or a sequence."""
        if isinstance(text, str):
            parts = text.split(",") if "," in text else list(text)
        else:
            parts = list(text)
        return tuple(self.alphabet.index(p) for p in parts)

    def words(self, length: int) -> tuple[Word, ...]:
        """All admissible words of `length`, in lexicographic index order."""
        return _admissible_words(self, length)


def make_system(alphabet: Iterable, transition: Sequence[Sequence] | None = None,
                sidedness: str = TWO_SIDED) -> SymbolicSystem:
    """Validated SFT; dead symbols are pruned and recorded in ``pruned``.

    Two-sided systems keep only symbols with a successor and a predecessor
    (iterated); one-sided systems keep symbols with a successor.
    """
    symbols = tuple(str(s) for s in alphabet)
    Alphabet(symbols)
    n = len(symbols)
    if sidedness not in (ONE_SIDED, TWO_SIDED):
        raise SystemError_(f"sidedness must be {ONE_SIDED!r} or {TWO_SIDED!r}, got {sidedness!r}")
    if transition is None:
        transition = [[1] * n for _ in range(n)]
    rows = [list(r) for r in transition]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise SystemError_(f"transition matrix must be {n}x{n}")
    for r in rows:
        for v in r:
            if v not in (0, 1, True, False):
                raise SystemError_(f"transition entries must be 0/1, got {v!r}")
    alive = set(range(n))
    while True:
        dead = {i for i in alive if not any(rows[i][j] for j in alive)}
        if sidedness == TWO_SIDED:
            dead |= {j for j in alive if not any(rows[i][j] for i in alive)}
        if not dead:
            break
        alive -= dead
    if not alive:
        raise SystemError_("every symbol is dead: the transition matrix admits no infinite sequence")
    keep = sorted(alive)
    pruned = tuple(symbols[i] for i in range(n) if i not in alive)
    if pruned:
        logger.info("pruned dead symbols %s", pruned)
    return SymbolicSystem(
        alphabet=Alphabet(tuple(symbols[i] for i in keep)),
        transition=tuple(tuple(bool(rows[i][j]) for j in keep) for i in keep),
        sidedness=sidedness,
        pruned=pruned,
    )


def full_shift(k: int | Iterable = 2, sidedness: str = TWO_SIDED) -> SymbolicSystem:
    alphabet = [str(i) for i in range(k)] if isinstance(k, int) else list(k)
    return make_system(alphabet, None, sidedness)


@lru_cache(maxsize=256)
def _admissible_words(system: SymbolicSystem, length: int) -> tuple[Word, ...]:
    if length < 0:
        raise ValueError("negative word length")
    if length == 0:
        return ((),)
    words: list[Word] = [(i,) for i in range(system.size)]
    for _ in range(length - 1):
        words = [w + (j,) for w in words for j in system.successors[w[-1]]]
    return tuple(words)


@dataclass(frozen=True, eq=False)
class CylinderSet:
    """Union of admissible words on the window ``[start, start + length - 1]``.

    Equality is set equality in the shift space (decided on a common window),
    so the class is deliberately unhashable; use :meth:`key` for dict keys of
    normalized sets.
    """

    system: SymbolicSystem
    start: int
    length: int
    cells: frozenset

    __hash__ = None  # type: ignore[assignment]

    @property
    def window(self) -> tuple[int, int]:
        return (self.start, self.start + self.length - 1)

    @property
    def end(self) -> int:
        return self.start + self.length

    def is_empty(self) -> bool:
        return not self.cells

    def is_full(self) -> bool:
        return normalize(self).length == 0 and bool(self.cells)

    def key(self) -> tuple:
        c = normalize(self)
        return (c.start, c.length, tuple(sorted(c.cells)))

    def contains_point(self, point: Mapping[int, int] | Sequence[int], origin: int = 0) -> bool:
        """Membership of a point given by symbol indices from coordinate `origin`."""
        if isinstance(point, Mapping):
            get = point.__getitem__
        else:
            get = lambda i: point[i - origin]  # noqa: E731
        try:
            w = tuple(get(i) for i in range(self.start, self.end))
        except (IndexError, KeyError):
            raise ValueError(f"point does not cover window {self.window}") from None
        return w in self.cells

    def __eq__(self, other) -> bool:
        if not isinstance(other, CylinderSet):
            return NotImplemented
        _same_system(self, other)
        a, b = _hull(self, other)
        return widen(self, a, b) == widen(other, a, b)

    def __le__(self, other: "CylinderSet") -> bool:
        return issubset(self, other)

    def __and__(self, other):
        return intersect(self, other)

    def __or__(self, other):
        return union(self, other)

    def __sub__(self, other):
        return difference(self, other)

    def __invert__(self):
        return complement(self)

    def labels(self) -> list[str]:
        return sorted(self.system.label(w) for w in self.cells)

    def __repr__(self) -> str:
        if self.length == 0:
            return "CylinderSet(X)" if self.cells else "CylinderSet(empty)"
        shown = self.labels()
        if len(shown) > 8:
            shown = shown[:8] + ["..."]
        return f"CylinderSet(window={self.window}, cells={{{', '.join(shown)}}})"


def _same_system(a: CylinderSet, b: CylinderSet):
    if a.system != b.system:
        raise ValueError("cylinder sets belong to different systems")


def _hull(*cyls: CylinderSet) -> tuple[int, int]:
    spans = [(c.start, c.end) for c in cyls if c.length > 0]
    if not spans:
        return (0, 0)
    return (min(s for s, _ in spans), max(e for _, e in spans))


def cylinder(system: SymbolicSystem, words: Iterable | str = (), start: int = 0) -> CylinderSet:
    """Cylinder set from one word (string) or an iterable of words at `start`.

    ``cylinder(S, "01")`` is ``[x0=0, x1=1]``; ``cylinder(S, ["00", "01"])``
    is their union.  The result is normalized.
    """
    if isinstance(words, str):
        words = [words]
    parsed = {system.parse_word(w) for w in words}
    if not parsed:
        raise ValueError("no words given; use empty_set() for the empty set")
    lengths = {len(w) for w in parsed}
    if len(lengths) != 1:
        raise ValueError("all words of a cylinder must have the same length")
    return make_cylinder(system, start, lengths.pop(), parsed)


def coordinate_set(system: SymbolicSystem, coord: int, symbols: Iterable) -> CylinderSet:
    """``{x : x_coord in symbols}``."""
    idx = {system.alphabet.index(s) if not isinstance(s, int) else s for s in symbols}
    return make_cylinder(system, coord, 1, {(i,) for i in idx})


def full_space(system: SymbolicSystem) -> CylinderSet:
    return CylinderSet(system, 0, 0, frozenset({()}))


def empty_set(system: SymbolicSystem) -> CylinderSet:
    return CylinderSet(system, 0, 0, frozenset())


def make_cylinder(system: SymbolicSystem, start: int, length: int, cells: Iterable[Word]) -> CylinderSet:
    if not system.two_sided and start < 0:
        raise ValueError("one-sided systems have no negative coordinates")
    cells = frozenset(tuple(c) for c in cells)
    for c in cells:
        if len(c) != length:
            raise ValueError(f"cell {c} does not match window length {length}")
        if any(not 0 <= s < system.size for s in c):
            raise ValueError(f"cell {c} uses symbols outside the alphabet")
    return normalize(CylinderSet(system, start, length, cells))


def normalize(cyl: CylinderSet) -> CylinderSet:
    """Drop forbidden cells and trim unconstrained coordinates at both ends.

    One-sided systems keep their windows anchored at coordinate 0.
    """
    system = cyl.system
    cells = {c for c in cyl.cells if system.allowed(c)}
    start, length = cyl.start, cyl.length
    if not system.two_sided and length > 0 and start > 0:
        cells = set(_extend_left(system, cells, start))
        length += start
        start = 0
    if not cells:
        return CylinderSet(system, 0, 0, frozenset())
    changed = True
    while changed and length > 0:
        changed = False
        # cells always lie inside the one-step extension of their restriction,
        # so equal cardinality means the end coordinate is unconstrained
        right = {c[:-1] for c in cells}
        if length == 1:
            right_size = system.size
        else:
            right_size = sum(len(system.successors[c[-1]]) for c in right)
        if len(cells) == right_size:
            cells = right
            length -= 1
            changed = True
            continue
        if system.two_sided:
            left = {c[1:] for c in cells}
            if length == 1:
                left_size = system.size
            else:
                left_size = sum(len(system.predecessors[c[0]]) for c in left)
            if len(cells) == left_size:
                cells = left
                start += 1
                length -= 1
                changed = True
    if length == 0:
        start = 0
    return CylinderSet(system, start, length, frozenset(cells))


def _extend_left(system: SymbolicSystem, cells: Iterable[Word], steps: int) -> set[Word]:
    out = set(cells)
    for _ in range(steps):
        out = {(p,) + c for c in out for p in (system.predecessors[c[0]] if c else range(system.size))}
    return out


def _extend_right(system: SymbolicSystem, cells: Iterable[Word], steps: int) -> set[Word]:
    out = set(cells)
    for _ in range(steps):
        out = {c + (s,) for c in out for s in (system.successors[c[-1]] if c else range(system.size))}
    return out


def widen(cyl: CylinderSet, a: int, b_end: int) -> frozenset:
    """Cells of `cyl` on the window ``[a, b_end)``; the window must contain cyl's."""
    system = cyl.system
    if not cyl.cells:
        return frozenset()
    if cyl.length == 0:
        return frozenset(_admissible_words(system, b_end - a))
    if a > cyl.start or b_end < cyl.end:
        raise ValueError(f"window [{a},{b_end}) does not contain {cyl.window}")
    if not system.two_sided and a < 0:
        raise ValueError("one-sided systems have no negative coordinates")
    cells = _extend_right(system, cyl.cells, b_end - cyl.end)
    cells = _extend_left(system, cells, cyl.start - a)
    return frozenset(cells)


def on_window(cyl: CylinderSet, a: int, b_end: int) -> CylinderSet:
    """Unnormalized copy of `cyl` represented on ``[a, b_end)``."""
    return CylinderSet(cyl.system, a, b_end - a, widen(cyl, a, b_end))


def _binary(op, x: CylinderSet, y: CylinderSet) -> CylinderSet:
    _same_system(x, y)
    a, b = _hull(x, y)
    cells = op(widen(x, a, b), widen(y, a, b))
    return normalize(CylinderSet(x.system, a, b - a, frozenset(cells)))


def intersect(x: CylinderSet, y: CylinderSet) -> CylinderSet:
    return _binary(frozenset.__and__, x, y)


def union(x: CylinderSet, y: CylinderSet) -> CylinderSet:
    return _binary(frozenset.__or__, x, y)


def difference(x: CylinderSet, y: CylinderSet) -> CylinderSet:
    return _binary(frozenset.__sub__, x, y)


def symmetric_difference(x: CylinderSet, y: CylinderSet) -> CylinderSet:
    return _binary(frozenset.__xor__, x, y)


def complement(x: CylinderSet) -> CylinderSet:
    return difference(full_space(x.system), x)


def union_all(system: SymbolicSystem, cyls: Iterable[CylinderSet]) -> CylinderSet:
    cyls = list(cyls)
    if not cyls:
        return empty_set(system)
    a, b = _hull(*cyls)
    cells: set = set()
    for c in cyls:
        _same_system(cyls[0], c)
        cells |= widen(c, a, b)
    return normalize(CylinderSet(system, a, b - a, frozenset(cells)))


def issubset(x: CylinderSet, y: CylinderSet) -> bool:
    _same_system(x, y)
    a, b = _hull(x, y)
    return widen(x, a, b) <= widen(y, a, b)


def isdisjoint(x: CylinderSet, y: CylinderSet) -> bool:
    _same_system(x, y)
    a, b = _hull(x, y)
    return widen(x, a, b).isdisjoint(widen(y, a, b))


def shift(cyl: CylinderSet, k: int = 1) -> CylinderSet:
    """``T^{-k}(cyl)``: the window moves by +k.

    Negative `k` (forward images) require a two-sided system.
    """
    system = cyl.system
    if cyl.length == 0:
        return cyl
    if system.two_sided:
        return CylinderSet(system, cyl.start + k, cyl.length, cyl.cells)
    if k < 0:
        raise ValueError("forward images T^k, k > 0, are not defined on one-sided systems")
    return normalize(CylinderSet(system, cyl.start + k, cyl.length, cyl.cells))


def preimage(cyl: CylinderSet) -> CylinderSet:
    """``T^{-1}(cyl)``; in one-sided systems the freed coordinate 0 is unconstrained."""
    return shift(cyl, 1)


def image(cyl: CylinderSet) -> CylinderSet:
    """``T(cyl)`` for two-sided systems."""
    return shift(cyl, -1)


def reachability(system: SymbolicSystem) -> list[list[bool]]:
    """Transitive closure of the transition graph (paths of length >= 1)."""
    n = system.size
    reach = [list(row) for row in system.transition]
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return reach


def strong_classes(n: int, edges: Sequence[Sequence[bool]]) -> list[tuple[int, ...]]:
    """Strongly connected classes of a digraph on ``range(n)``, in order of least member."""
    reach = [list(row) for row in edges]
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                for j in range(n):
                    if reach[k][j]:
                        reach[i][j] = True
    seen: set[int] = set()
    classes = []
    for i in range(n):
        if i in seen:
            continue
        cls = tuple(j for j in range(n) if j == i or (reach[i][j] and reach[j][i]))
        seen.update(cls)
        classes.append(cls)
    return classes


def communicating_classes(system: SymbolicSystem) -> list[frozenset[str]]:
    """Strongly connected classes of the (pruned) transition graph, as symbol sets."""
    return [frozenset(system.alphabet.symbols[i] for i in cls)
            for cls in strong_classes(system.size, system.transition)]


def all_words(system: SymbolicSystem, length: int) -> Iterable[Word]:
    """Every word over the alphabet of `length`, admissible or not."""
    return itertools.product(range(system.size), repeat=length)
