"""Finite partitions of the cylinder algebra and the operations on them.

A :class:`Partition` is a list of labelled, pairwise disjoint, non-empty
cylinder sets covering the space.  All operations work on the cells of the
common window of their operands, so results are exact.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .measures import Measure
from .scalars import Scalar, is_zero
from .symbolic import (CylinderSet, SymbolicSystem, Word, _hull, coordinate_set, cylinder,
                       full_space, make_cylinder, normalize, shift, strong_classes,
                       symmetric_difference, widen)


class PartitionError(ValueError):
    pass


class Partition:
    """Labelled finite partition of a symbolic system."""

    def __init__(self, system: SymbolicSystem, elements: Iterable[tuple[str, CylinderSet]],
                 check: bool = True):
        self.system = system
        elems = [(str(label), normalize(c)) for label, c in elements]
        if not elems:
            raise PartitionError("a partition needs at least one element")
        labels = [label for label, _ in elems]
        if len(set(labels)) != len(labels):
            raise PartitionError(f"duplicate element labels in {labels}")
        self.elements: tuple[tuple[str, CylinderSet], ...] = tuple(elems)
        self._maps: dict[tuple[int, int], dict[Word, int]] = {}
        if check:
            self._validate()

    def _validate(self):
        for label, c in self.elements:
            if c.system != self.system:
                raise PartitionError(f"element {label} belongs to another system")
            if c.is_empty():
                raise PartitionError(f"element {label} is empty")
        a, b = self.window
        seen: set[Word] = set()
        total = 0
        for label, c in self.elements:
            cells = widen(c, a, b)
            total += len(cells)
            seen |= cells
        if total != len(seen):
            raise PartitionError("partition elements overlap")
        if len(seen) != len(self.system.words(b - a)):
            raise PartitionError("partition elements do not cover the space")

    @property
    def window(self) -> tuple[int, int]:
        """Half-open hull ``[a, b)`` of the element windows."""
        return _hull(*(c for _, c in self.elements))

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.elements]

    @property
    def sets(self) -> list[CylinderSet]:
        return [c for _, c in self.elements]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[tuple[str, CylinderSet]]:
        return iter(self.elements)

    def __getitem__(self, label: str) -> CylinderSet:
        for lab, c in self.elements:
            if lab == label:
                return c
        raise KeyError(label)

    def cell_map(self, a: int, b: int) -> dict[Word, int]:
        """Element index of every admissible cell on ``[a, b)``."""
        key = (a, b)
        if key not in self._maps:
            out: dict[Word, int] = {}
            for idx, (_, c) in enumerate(self.elements):
                for w in widen(c, a, b):
                    out[w] = idx
            self._maps[key] = out
        return self._maps[key]

    def blocks(self, a: int, b: int) -> list[frozenset]:
        """Element cell sets on ``[a, b)``, in element order."""
        groups: list[set] = [set() for _ in self.elements]
        for w, idx in self.cell_map(a, b).items():
            groups[idx].add(w)
        return [frozenset(g) for g in groups]

    def weights(self, mu: Measure) -> list[Scalar]:
        return [mu.of(c) for c in self.sets]

    def __eq__(self, other) -> bool:
        """Equality as set partitions; labels and order are ignored."""
        if not isinstance(other, Partition):
            return NotImplemented
        if other.system != self.system:
            return False
        a, b = _hull(*self.sets, *other.sets)
        return set(self.blocks(a, b)) == set(other.blocks(a, b))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        shown = ", ".join(self.labels[:6]) + (", ..." if len(self) > 6 else "")
        return f"Partition({len(self)} elements: {shown})"


def _from_blocks(system: SymbolicSystem, a: int, b: int,
                 labelled_blocks: Iterable[tuple[str, Iterable[Word]]]) -> Partition:
    elems = [(label, make_cylinder(system, a, b - a, cells)) for label, cells in labelled_blocks]
    return Partition(system, elems, check=False)


def trivial_partition(system: SymbolicSystem) -> Partition:
    return Partition(system, [("X", full_space(system))])


def symbol_partition(system: SymbolicSystem, coord: int = 0, prefix: str = "C") -> Partition:
    """One-cylinders ``C_s = {x : x_coord = s}``."""
    return Partition(system, [(f"{prefix}{s}", coordinate_set(system, coord, [s]))
                              for s in system.alphabet.symbols])


def point_partition(system: SymbolicSystem, length: int, start: int = 0) -> Partition:
    """Finite-depth approximation of the point partition: all cells on a window."""
    return _from_blocks(system, start, start + length,
                        [(system.label(w) or "X", [w]) for w in system.words(length)])


def partition_from_words(system: SymbolicSystem, elements: Mapping[str, Sequence], start: int = 0) -> Partition:
    return Partition(system, [(label, cylinder(system, words, start)) for label, words in elements.items()])


def coarsen(xi: Partition, groups: Sequence[Sequence[str]]) -> Partition:
    """Partition whose elements are unions of the named groups of `xi` elements."""
    used = [label for g in groups for label in g]
    if sorted(used) != sorted(xi.labels):
        raise PartitionError("groups must use every element label exactly once")
    a, b = xi.window
    blocks = dict(zip(xi.labels, xi.blocks(a, b)))
    return _from_blocks(xi.system, a, b, [("+".join(g), frozenset().union(*(blocks[x] for x in g)))
                                          for g in groups])


def _check_same(*parts: Partition):
    if len({p.system for p in parts}) != 1:
        raise PartitionError("partitions belong to different systems")


def join(xi: Partition, eta: Partition) -> Partition:
    """Coarsest common refinement: all non-empty intersections ``C & D``."""
    _check_same(xi, eta)
    a, b = _hull(*xi.sets, *eta.sets)
    mx, my = xi.cell_map(a, b), eta.cell_map(a, b)
    groups: dict[tuple[int, int], list[Word]] = {}
    for w in xi.system.words(b - a):
        groups.setdefault((mx[w], my[w]), []).append(w)
    out = []
    for (i, j), cells in sorted(groups.items()):
        out.append((f"{xi.labels[i]}|{eta.labels[j]}", cells))
    return _from_blocks(xi.system, a, b, out)


def join_all(parts: Sequence[Partition]) -> Partition:
    if not parts:
        raise PartitionError("join of no partitions")
    _check_same(*parts)
    a, b = _hull(*(c for p in parts for c in p.sets))
    maps = [p.cell_map(a, b) for p in parts]
    groups: dict[tuple[int, ...], list[Word]] = {}
    for w in parts[0].system.words(b - a):
        groups.setdefault(tuple(m[w] for m in maps), []).append(w)
    out = []
    for key, cells in sorted(groups.items()):
        out.append(("|".join(p.labels[i] for p, i in zip(parts, key)), cells))
    return _from_blocks(parts[0].system, a, b, out)


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx


def meet(xi: Partition, eta: Partition, mu: Measure | None = None) -> Partition:
    """Finest common coarsening, mod zero with respect to `mu`.

    Elements of `xi` and `eta` are linked when their intersection has
    positive measure (any non-empty intersection when ``mu is None``), and
    each connected component contributes the union of its `xi` elements.
    """
    _check_same(xi, eta)
    a, b = _hull(*xi.sets, *eta.sets)
    mx, my = xi.cell_map(a, b), eta.cell_map(a, b)
    weights = mu.window_weights(a, b - a) if mu is not None and b > a else None
    uf = _UnionFind([("x", i) for i in range(len(xi))] + [("y", j) for j in range(len(eta))])
    for w in xi.system.words(b - a):
        if weights is not None and is_zero(weights.get(w, 0)):
            continue
        uf.union(("x", mx[w]), ("y", my[w]))
    comps: dict = {}
    for i in range(len(xi)):
        comps.setdefault(uf.find(("x", i)), []).append(i)
    blocks = xi.blocks(a, b)
    groups = sorted(comps.values())
    return _from_blocks(xi.system, a, b, [("+".join(xi.labels[i] for i in g),
                                           frozenset().union(*(blocks[i] for i in g)))
                                          for g in groups])


def set_meet(xi: Partition, eta: Partition) -> Partition:
    """Purely set-theoretic meet (no measure, no mod-zero identification)."""
    return meet(xi, eta, None)


def refines(xi: Partition, eta: Partition, mu: Measure | None = None) -> bool:
    """True iff every element of `xi` lies inside one element of `eta`.

    With `mu`, containment is mod zero (null cells are ignored).
    """
    _check_same(xi, eta)
    a, b = _hull(*xi.sets, *eta.sets)
    mx, my = xi.cell_map(a, b), eta.cell_map(a, b)
    weights = mu.window_weights(a, b - a) if mu is not None and b > a else None
    target: dict[int, int] = {}
    for w, i in mx.items():
        if weights is not None and is_zero(weights.get(w, 0)):
            continue
        j = my[w]
        if target.setdefault(i, j) != j:
            return False
    return True


def d_mu(A: CylinderSet, B: CylinderSet, mu: Measure) -> Scalar:
    """``mu(A symmetric-difference B)``."""
    return mu.of(symmetric_difference(A, B))


def shift_partition(xi: Partition, k: int = 1) -> Partition:
    """``T^{-k} xi`` (negative `k` gives forward images on two-sided systems)."""
    return Partition(xi.system, [(label, shift(c, k)) for label, c in xi], check=False)


def preimage_partition(xi: Partition) -> Partition:
    return shift_partition(xi, 1)


@dataclass(eq=False)
class SetAlgebra:
    """The finite algebra of all unions of the atoms."""

    atoms: Partition

    def __len__(self) -> int:
        return 2 ** len(self.atoms)

    def members(self) -> Iterator[CylinderSet]:
        system = self.atoms.system
        a, b = self.atoms.window
        blocks = self.atoms.blocks(a, b)
        for mask in range(len(self)):
            cells = frozenset().union(*(blk for k, blk in enumerate(blocks) if mask >> k & 1))
            yield make_cylinder(system, a, b - a, cells)

    def contains(self, E: CylinderSet) -> bool:
        """True iff `E` is a union of atoms."""
        a, b = _hull(E, *self.atoms.sets)
        cells = widen(E, a, b)
        for blk in self.atoms.blocks(a, b):
            inside = blk & cells
            if inside and inside != blk:
                return False
        return True

    def __contains__(self, E: CylinderSet) -> bool:
        return self.contains(E)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetAlgebra):
            return NotImplemented
        return self.atoms == other.atoms


def algebra_of(xi: Partition) -> SetAlgebra:
    return SetAlgebra(xi)


def generated_algebra(system: SymbolicSystem, generators: Sequence[CylinderSet]) -> SetAlgebra:
    """Algebra generated by `generators`; atom labels are membership codes.

    An atom's label has one character per generator: ``0`` inside, ``1``
    outside.
    """
    if not generators:
        return SetAlgebra(trivial_partition(system))
    a, b = _hull(*generators)
    gen_cells = [widen(g, a, b) for g in generators]
    groups: dict[str, list[Word]] = {}
    for w in system.words(b - a):
        code = "".join("0" if w in g else "1" for g in gen_cells)
        groups.setdefault(code, []).append(w)
    return SetAlgebra(_from_blocks(system, a, b, sorted(groups.items())))


def atoms_of(algebra: SetAlgebra | Iterable[CylinderSet], system: SymbolicSystem | None = None) -> Partition:
    """Atoms of an algebra, or of the algebra generated by a family of sets."""
    if isinstance(algebra, SetAlgebra):
        return algebra.atoms
    family = list(algebra)
    if system is None:
        if not family:
            raise PartitionError("system required for an empty family")
        system = family[0].system
    return generated_algebra(system, family).atoms


class DynRefinements(NamedTuple):
    past: Partition
    full: Partition | None
    tail: Partition


def past_partition(xi: Partition, n: int) -> Partition:
    """``join of T^{-k} xi for k = 0..n``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return join_all([shift_partition(xi, k) for k in range(n + 1)])


def tail_partition(xi: Partition, n: int, shift_by: int | None = None) -> Partition:
    """``T^{-N}`` of the depth-`n` past, with ``N = shift_by`` (default `n`)."""
    return shift_partition(past_partition(xi, n), n if shift_by is None else shift_by)


def dyn_refinements(xi: Partition, n: int, full: bool = True) -> DynRefinements:
    """Finite-depth past, two-sided trajectory coding and tail of `xi`."""
    if full and not xi.system.two_sided:
        raise PartitionError("the two-sided coding needs a two-sided system; pass full=False")
    past = past_partition(xi, n)
    whole = join_all([shift_partition(xi, k) for k in range(-n, n + 1)]) if full else None
    return DynRefinements(past, whole, shift_partition(past, n))


def coordinate_symbols(E: CylinderSet) -> frozenset[int] | None:
    """Symbol indices S with ``E = {x : x_0 in S}``, or None if E is not of that form."""
    system = E.system
    a, b = _hull(E, coordinate_set(system, 0, range(system.size)))
    cells = widen(E, a, b)
    syms = frozenset(w[-a] for w in cells)
    if not syms:
        return syms
    if normalize(E) == coordinate_set(system, 0, syms):
        return syms
    return None


def support_classes(mu: Measure) -> list[tuple[int, ...]]:
    """Communicating classes of the graph of positive-mass transitions.

    Only symbols of positive mass take part.
    """
    system = mu.system
    n = system.size
    singles = mu.window_weights(0, 1)
    pairs = mu.window_weights(0, 2)
    alive = [i for i in range(n) if not is_zero(singles.get((i,), 0))]
    edges = [[not is_zero(pairs.get((i, j), 0)) for j in alive] for i in alive]
    return [tuple(alive[k] for k in cls) for cls in strong_classes(len(alive), edges)]


def invariant_hull(xi: Partition, mu: Measure) -> Partition:
    """Finest coarsening of a symbol-respecting `xi` into invariant sets of positive measure.

    Elements are merged along the communicating classes of `mu`'s support.
    Null elements join the first positive group.  For symbol-respecting
    partitions this is also the limit of tails ``Pi(xi)``.
    """
    symbols = []
    for label, c in xi:
        s = coordinate_symbols(c)
        if s is None:
            raise PartitionError(f"element {label} is not a union of coordinate-0 symbol cylinders")
        symbols.append(s)
    owner = {s: k for k, syms in enumerate(symbols) for s in syms}
    uf = _UnionFind(range(len(xi)))
    for cls in support_classes(mu):
        members = [owner[s] for s in cls]
        for m in members[1:]:
            uf.union(members[0], m)
    groups: dict[int, list[int]] = {}
    for k in range(len(xi)):
        groups.setdefault(uf.find(k), []).append(k)
    weighted = [(g, sum((mu.of(xi.sets[k]) for k in g), 0)) for g in sorted(groups.values())]
    positive = [g for g, w in weighted if not is_zero(w)]
    null = [k for g, w in weighted if is_zero(w) for k in g]
    if positive and null:
        positive[0] = sorted(positive[0] + null)
    elif not positive:
        positive = [list(range(len(xi)))]
    return coarsen(xi, [[xi.labels[k] for k in g] for g in positive])


def pi_partition(xi: Partition, mu: Measure) -> Partition:
    """``Pi(xi)`` for symbol-respecting partitions of an SFT (see :func:`invariant_hull`)."""
    return invariant_hull(xi, mu)


def is_invariant_set(E: CylinderSet, mu: Measure | None = None) -> bool:
    """``T^{-1} E = E`` exactly, or mod zero when `mu` is given."""
    pre = shift(E, 1)
    if mu is None:
        return pre == E
    return is_zero(d_mu(pre, E, mu))


def separating_test(xi: Partition, family: Sequence[CylinderSet], mu: Measure) -> bool:
    """True iff every pair of positive-measure elements is separated by a family member.

    ``A`` separates ``C1, C2`` when one lies in ``A`` and the other in its
    complement (mod zero).
    """
    positive = [c for c in xi.sets if not is_zero(mu.of(c))]
    inside = []
    for c in positive:
        row = []
        for A in family:
            if is_zero(mu.of(c - A)):
                row.append(True)
            elif is_zero(mu.of(c & A)):
                row.append(False)
            else:
                row.append(None)
        inside.append(row)
    for i, j in itertools.combinations(range(len(positive)), 2):
        if not any(x is not None and y is not None and x != y for x, y in zip(inside[i], inside[j])):
            return False
    return True
