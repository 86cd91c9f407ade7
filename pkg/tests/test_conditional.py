import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from measpart.conditional import cond_information, condition, fubini_check
from measpart.measures import bernoulli, markov_measure
from measpart.partitions import (Partition, partition_from_words, point_partition, symbol_partition,
                                 trivial_partition)
from measpart.symbolic import coordinate_set, cylinder, full_shift, full_space, make_cylinder

F = Fraction


def test_condition_bernoulli(sigma2, fair):
    cs = condition(fair, symbol_partition(sigma2), 3)
    assert cs.factor == {"C0": F(1, 2), "C1": F(1, 2)}
    for label in ("C0", "C1"):
        mu_c = cs.conditionals[label]
        for w in sigma2.words(2):
            # coordinates 1 and 2 stay Bernoulli(1/2) under each conditional
            assert mu_c.of(make_cylinder(sigma2, 1, 2, [w])) == F(1, 4)
        assert mu_c.of(symbol_partition(sigma2)[label]) == 1


def test_condition_trivial(golden):
    cs = condition(golden, trivial_partition(golden.system), 3)
    assert cs.factor == {"X": 1}
    mu_c = cs.conditionals["X"]
    for w in golden.system.words(3):
        c = make_cylinder(golden.system, 0, 3, [w])
        assert mu_c.of(c) == golden.of(c)


def test_condition_mixture(block_sys, mixture):
    comp = partition_from_words(block_sys, {"A": ["0", "1"], "B": ["2", "3"]})
    cs = condition(mixture, comp, 3)
    assert cs.factor == {"A": F(1, 2), "B": F(1, 2)}
    half = bernoulli(full_shift(2), [F(1, 2)] * 2)
    for label, offset in (("A", 0), ("B", 2)):
        for w in full_shift(2).words(3):
            shifted = tuple(s + offset for s in w)
            got = cs.conditional_of(label, make_cylinder(block_sys, 0, 3, [shifted]))
            assert got == half.of(make_cylinder(full_shift(2), 0, 3, [w]))


def test_condition_drops_null(sigma2):
    point = bernoulli(sigma2, [1, 0])
    cs = condition(point, symbol_partition(sigma2), 2)
    assert cs.dropped == ["C1"] and list(cs.factor) == ["C0"]


def test_conditionals_are_probabilities(golden, mixture, cycle):
    for mu in (golden, mixture, cycle):
        for xi in (symbol_partition(mu.system), point_partition(mu.system, 2)):
            cs = condition(mu, xi, 3)
            for label, mu_c in cs.conditionals.items():
                assert mu_c.mass() == 1
                assert mu_c.of(xi[label]) == 1


def test_disintegration_on_every_cell(golden, mixture):
    for mu in (golden, mixture):
        xi = point_partition(mu.system, 2)
        cs = condition(mu, xi, 3)
        a, b = cs.window
        for w in mu.system.words(b - a):
            E = make_cylinder(mu.system, a, b - a, [w])
            assert cs.residual(E) == 0


def test_fubini_examples(golden_sys, golden, fair, sigma2):
    xi = symbol_partition(golden_sys)
    cell = cylinder(golden_sys, "01")
    assert fubini_check(golden, xi, [(cell, 1)], 2) == (F(1, 3), F(1, 3))
    assert fubini_check(golden, xi, [(full_space(golden_sys), 1)], 2) == (1, 1)
    C = xi["C0"]
    assert fubini_check(golden, xi, [(C, 1)], 2) == (F(2, 3), F(2, 3))
    f = [(cylinder(sigma2, "0"), F(3)), (cylinder(sigma2, "11"), F(-1, 2))]
    res = fubini_check(fair, point_partition(sigma2, 2), f, 2)
    assert res.lhs == res.rhs == F(3, 2) - F(1, 8)


def test_fubini_rejects_outside_cells(golden_sys, golden):
    with pytest.raises(ValueError):
        fubini_check(golden, symbol_partition(golden_sys), [(cylinder(golden_sys, "000"), 1)], 2)
    # 010 reduces to 01 on the golden shift, so it does lie in the depth-2 algebra
    res = fubini_check(golden, symbol_partition(golden_sys), [(cylinder(golden_sys, "010"), 1)], 2)
    assert res.lhs == res.rhs == F(1, 3)


def test_cond_information_examples(sigma2, fair, golden_sys, golden):
    eps2 = point_partition(sigma2, 2)
    x0 = symbol_partition(sigma2)
    for w in ("00", "01", "10", "11"):
        info = cond_information(fair, eps2, x0, cylinder(sigma2, w))
        assert info.ratio == F(1, 2) and info.nats == pytest.approx(math.log(2), abs=1e-15)
        assert cond_information(fair, eps2, eps2, cylinder(sigma2, w)) == (1, 0.0)
    info = cond_information(golden, point_partition(golden_sys, 2), symbol_partition(golden_sys),
                            cylinder(golden_sys, "10"))
    assert info.ratio == 1 and info.nats == 0.0
    assert str(info.nats) == "0.0"


def test_cond_information_errors(golden_sys, golden):
    with pytest.raises(ValueError):
        cond_information(golden, point_partition(golden_sys, 2), symbol_partition(golden_sys),
                         cylinder(golden_sys, "11"))


def test_cond_information_non_negative(golden):
    S = golden.system
    xi, eta = point_partition(S, 3), symbol_partition(S, 1)
    for w in S.words(3):
        info = cond_information(golden, xi, eta, make_cylinder(S, 0, 3, [w]))
        assert isinstance(info.ratio, Fraction) and 0 < info.ratio <= 1
        assert info.nats >= 0


def _two_sets(S, rng):
    words = S.words(3)
    pick = lambda: make_cylinder(S, 0, 3, [w for w in words if rng.random() < 0.6])
    return pick(), pick()


def _conditional(mu, A, E, depth=3):
    S = mu.system
    xi = Partition(S, [("A", A), ("Ac", ~A)]) if not (~A).is_empty() else trivial_partition(S)
    label = "A" if len(xi) == 2 else "X"
    cs = condition(mu, xi, depth)
    return cs.conditional_of(label, E)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_proportionality_on_overlaps(seed):
    rng = random.Random(seed)
    S = full_shift(2)
    mu = markov_measure(S, [[F(1, 3), F(2, 3)], [F(1, 4), F(3, 4)]])
    A, B = _two_sets(S, rng)
    if A.is_empty() or B.is_empty() or mu.of(A & B) == 0:
        return
    overlap = A & B
    for w in S.words(3):
        E = overlap & make_cylinder(S, 0, 3, [w])
        if E.is_empty():
            continue
        assert _conditional(mu, A, E) * mu.of(A) == _conditional(mu, B, E) * mu.of(B)


def test_bernoulli_coordinates_independent_of_x0(sigma2):
    mu = bernoulli(sigma2, [F(1, 5), F(4, 5)])
    cs = condition(mu, symbol_partition(sigma2), 2)
    E = coordinate_set(sigma2, 1, ["1"])
    assert all(cs.conditional_of(lab, E) == F(4, 5) for lab in cs.conditionals)
