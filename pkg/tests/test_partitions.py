import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from measpart.measures import bernoulli
from measpart.partitions import (Partition, PartitionError, algebra_of, atoms_of, coarsen, d_mu,
                                 dyn_refinements, generated_algebra, invariant_hull, is_invariant_set,
                                 join, meet, partition_from_words, past_partition, point_partition,
                                 refines, separating_test, set_meet, shift_partition, symbol_partition,
                                 tail_partition, trivial_partition)
from measpart.symbolic import (ONE_SIDED, coordinate_set, cylinder, empty_set, full_shift, full_space,
                               make_cylinder, preimage)

F = Fraction


def test_partition_validation(sigma2):
    a = coordinate_set(sigma2, 0, ["0"])
    with pytest.raises(PartitionError, match="cover"):
        Partition(sigma2, [("A", a)])
    with pytest.raises(PartitionError, match="overlap"):
        Partition(sigma2, [("A", a), ("B", full_space(sigma2))])
    with pytest.raises(PartitionError, match="empty"):
        Partition(sigma2, [("A", full_space(sigma2)), ("B", empty_set(sigma2))])
    with pytest.raises(PartitionError, match="duplicate"):
        Partition(sigma2, [("A", a), ("A", ~a)])


def test_join_examples(sigma2):
    xi = symbol_partition(sigma2)
    j = join(xi, shift_partition(xi))
    assert len(j) == 4 and j == point_partition(sigma2, 2)
    assert join(xi, xi) == xi
    assert join(xi, trivial_partition(sigma2)) == xi


def test_meet_examples(sigma2, fair, block_sys, mixture):
    xi = symbol_partition(sigma2)
    assert meet(xi, xi, fair) == xi
    assert meet(xi, symbol_partition(sigma2, 1), fair) == trivial_partition(sigma2)
    comp = partition_from_words(block_sys, {"A": ["0", "1"], "B": ["2", "3"]})
    left = partition_from_words(block_sys, {"a": ["0"], "b": ["1"], "c": ["2", "3"]})
    right = symbol_partition(block_sys, 1)
    assert meet(left, right, mixture) == comp


def test_meet_mod_zero_differs_on_null_overlaps(sigma2):
    point = bernoulli(sigma2, [1, 0])
    xi = symbol_partition(sigma2)
    eta = symbol_partition(sigma2, 1)
    # [x0=1] is null, so nothing ties the two x0 cells together
    assert len(meet(xi, eta, point)) == 2
    assert set_meet(xi, eta) == trivial_partition(sigma2)


def _random_partition(rng, S, length, k):
    words = S.words(length)
    labels = [rng.randrange(k) for _ in words]
    groups = {}
    for w, lab in zip(words, labels):
        groups.setdefault(lab, []).append(w)
    return Partition(S, [(str(i), make_cylinder(S, 0, length, g)) for i, g in enumerate(groups.values())])


def test_meet_against_brute_force():
    rng = random.Random(11)
    S = full_shift(2)
    for _ in range(150):
        xi = _random_partition(rng, S, 3, rng.randint(1, 5))
        eta = _random_partition(rng, S, 3, rng.randint(1, 5))
        got = meet(xi, eta)
        expect = O.brute_meet(xi.blocks(0, 3), eta.blocks(0, 3))
        assert set(got.blocks(0, 3)) == expect


def test_meet_against_brute_force_mod_zero(golden_sys, golden):
    # golden measure kills the word 11, so brute force runs on positive cells only
    rng = random.Random(12)
    model = O.markov_model(O.GOLDEN_P, O.GOLDEN_PI)
    for _ in range(80):
        xi = _random_partition(rng, golden_sys, 3, rng.randint(1, 5))
        eta = _random_partition(rng, golden_sys, 3, rng.randint(1, 5))
        pos = lambda blocks: [frozenset(w for w in b if O.word_weight(model, w) > 0) for b in blocks]
        xb = pos(xi.blocks(0, 3))
        keep = [i for i, b in enumerate(xb) if b]
        expect = O.brute_meet([xb[i] for i in keep], [b for b in pos(eta.blocks(0, 3)) if b])
        got = {frozenset(w for w in b if O.word_weight(model, w) > 0)
               for b in meet(xi, eta, golden).blocks(0, 3)}
        assert got - {frozenset()} == expect


def test_refines_examples(sigma2):
    xi = symbol_partition(sigma2)
    assert refines(point_partition(sigma2, 2), xi)
    assert refines(xi, trivial_partition(sigma2))
    assert not refines(xi, symbol_partition(sigma2, 1))
    assert not refines(symbol_partition(sigma2, 1), xi)


def test_d_mu_examples(sigma2, fair):
    a, b = coordinate_set(sigma2, 0, ["0"]), coordinate_set(sigma2, 0, ["1"])
    assert d_mu(a, b, fair) == 1
    assert d_mu(a, make_cylinder(sigma2, 0, 2, [(0, 0), (0, 1)]), fair) == 0
    assert d_mu(cylinder(sigma2, "00"), a, fair) == F(1, 4)


@st.composite
def cylinder_sets(draw):
    S = full_shift(2)
    start = draw(st.integers(-1, 1))
    length = draw(st.integers(1, 3))
    cells = draw(st.sets(st.sampled_from(S.words(length))))
    return make_cylinder(S, start, length, cells)


@settings(max_examples=80, deadline=None)
@given(cylinder_sets(), cylinder_sets(), cylinder_sets())
def test_d_mu_pseudo_metric(A, B, C):
    mu = bernoulli(A.system, [F(1, 3), F(2, 3)])
    assert d_mu(A, A, mu) == 0
    assert d_mu(A, B, mu) == d_mu(B, A, mu)
    assert d_mu(A, C, mu) <= d_mu(A, B, mu) + d_mu(B, C, mu)


def test_algebra_examples(sigma2):
    assert len(list(algebra_of(symbol_partition(sigma2)).members())) == 4
    triv = algebra_of(trivial_partition(sigma2))
    assert len(triv) == 2
    assert {m.is_empty() for m in triv.members()} == {True, False}
    assert len(algebra_of(point_partition(sigma2, 2))) == 16


def test_algebra_membership(sigma2):
    alg = algebra_of(point_partition(sigma2, 2))
    assert coordinate_set(sigma2, 0, ["0"]) in alg
    assert cylinder(sigma2, "000") not in alg
    assert all(m in alg for m in alg.members())


def test_atoms_round_trips(sigma2):
    xi = symbol_partition(sigma2)
    assert atoms_of(algebra_of(xi)) == xi
    assert atoms_of(algebra_of(trivial_partition(sigma2))) == trivial_partition(sigma2)
    gens = [coordinate_set(sigma2, 0, ["0"]), coordinate_set(sigma2, 1, ["0"])]
    assert atoms_of(gens) == point_partition(sigma2, 2)
    alg = generated_algebra(sigma2, gens)
    assert algebra_of(atoms_of(alg)) == alg
    assert sorted(alg.atoms.labels) == ["00", "01", "10", "11"]


def test_dyn_refinements_examples(sigma2):
    xi = symbol_partition(sigma2)
    past, full, tail = dyn_refinements(xi, 1)
    assert past == point_partition(sigma2, 2) and past.window == (0, 2)
    assert tail == point_partition(sigma2, 2, start=1)
    past, full, tail = dyn_refinements(xi, 0)
    assert past == full == tail == xi
    for n in range(1, 4):
        assert dyn_refinements(xi, n).full == point_partition(sigma2, 2 * n + 1, start=-n)
    with pytest.raises(PartitionError):
        dyn_refinements(symbol_partition(full_shift(2, ONE_SIDED)), 1)
    assert dyn_refinements(symbol_partition(full_shift(2, ONE_SIDED)), 1, full=False).full is None


def test_ordering_chain(sigma2, fair, mixture, golden):
    for mu in (fair, mixture, golden):
        xi = symbol_partition(mu.system)
        hull = invariant_hull(xi, mu)
        for n in range(0, 4):
            past, full, tail = dyn_refinements(xi, n)
            assert refines(full, past)
            assert refines(past, hull, mu)
            assert refines(tail, hull, mu)


def test_tail_shift_property(sigma2, golden_sys):
    for S in (sigma2, golden_sys):
        xi = symbol_partition(S)
        for n in range(0, 3):
            for N in range(0, 3):
                assert shift_partition(tail_partition(xi, n, N)) == tail_partition(xi, n, N + 1)
        # in general the tail at n does not refine the tail at n + 1
        assert not refines(tail_partition(xi, 1), tail_partition(xi, 2))


def test_invariant_hull_examples(fair, mixture, cycle, sigma2, block_sys, cycle_sys):
    assert invariant_hull(symbol_partition(sigma2), fair) == trivial_partition(sigma2)
    hull = invariant_hull(symbol_partition(block_sys), mixture)
    assert hull == partition_from_words(block_sys, {"A": ["0", "1"], "B": ["2", "3"]})
    assert sorted(hull.labels) == ["C0+C1", "C2+C3"]
    assert invariant_hull(symbol_partition(cycle_sys), cycle) == trivial_partition(cycle_sys)


def test_hull_elements_are_invariant(fair, mixture, cycle, golden):
    for mu in (fair, mixture, cycle, golden):
        xi = symbol_partition(mu.system)
        hull = invariant_hull(xi, mu)
        assert refines(xi, hull)
        for c in hull.sets:
            assert is_invariant_set(c)
            assert preimage(c) == c


def test_invariant_hull_null_symbols(sigma2):
    point = bernoulli(sigma2, [1, 0])
    assert invariant_hull(symbol_partition(sigma2), point) == trivial_partition(sigma2)


def test_invariant_hull_rejects_non_symbol(sigma2, fair):
    with pytest.raises(PartitionError):
        invariant_hull(point_partition(sigma2, 2), fair)


def test_separating_test_examples(sigma2, fair):
    xi = symbol_partition(sigma2)
    assert separating_test(xi, [coordinate_set(sigma2, 0, ["0"])], fair)
    assert not separating_test(xi, [], fair)
    eps2 = point_partition(sigma2, 2)
    gens = [coordinate_set(sigma2, 0, ["0"]), coordinate_set(sigma2, 1, ["0"])]
    assert separating_test(eps2, gens, fair)
    assert not separating_test(eps2, gens[:1], fair)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_lattice_laws(seed):
    rng = random.Random(seed)
    S = full_shift(2)
    mu = bernoulli(S, [F(1, 3), F(2, 3)])
    x, y, z = (_random_partition(rng, S, 2, rng.randint(1, 4)) for _ in range(3))
    assert join(x, y) == join(y, x)
    assert join(join(x, y), z) == join(x, join(y, z))
    assert join(x, x) == x
    assert meet(x, y, mu) == meet(y, x, mu)
    assert meet(meet(x, y, mu), z, mu) == meet(x, meet(y, z, mu), mu)
    assert meet(x, x, mu) == x
    assert refines(join(x, y), x)
    assert refines(x, meet(x, y, mu))


def test_coarsen(sigma2):
    eps = point_partition(sigma2, 2)
    c = coarsen(eps, [["00", "01"], ["10", "11"]])
    assert c == symbol_partition(sigma2)
    with pytest.raises(PartitionError):
        coarsen(eps, [["00"], ["10", "11"]])


def test_past_partition_sizes(golden_sys):
    xi = symbol_partition(golden_sys)
    # golden words of length n + 1 are counted by Fibonacci numbers
    fib = [2, 3, 5, 8, 13]
    for n, f in enumerate(fib):
        assert len(past_partition(xi, n)) == f
