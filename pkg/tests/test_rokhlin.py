import random
from fractions import Fraction

import pytest

import oracles as O
from measpart.measures import bernoulli, markov_measure
from measpart.rokhlin import (GeneratorCoding, NullCellError, basis_report, coordinate_generators,
                              lex_offset, martingale_check, peano_cell, peano_cells, peano_point,
                              phi_convergence, phi_mw, point_code, rho_map, square_chart)
from measpart.symbolic import full_shift, make_cylinder

F = Fraction


def test_rho_examples(sigma2, fair):
    gens = coordinate_generators(sigma2, range(2))
    imap = rho_map(fair, gens, 2)
    assert [(lab, a, b) for lab, a, b in imap] == [
        ("00", 0, F(1, 4)), ("01", F(1, 4), F(1, 2)), ("10", F(1, 2), F(3, 4)), ("11", F(3, 4), 1)]
    mu = bernoulli(sigma2, [F(1, 3), F(2, 3)])
    assert list(rho_map(mu, gens, 1)) == [("0", 0, F(1, 3)), ("1", F(1, 3), 1)]


def test_rho_null_cells_are_empty(golden_sys, golden):
    gens = coordinate_generators(golden_sys, range(2))
    imap = rho_map(golden, gens, 2)
    a, b = imap.interval("11")
    assert a == b
    assert imap.tiles_unit_interval()


def test_rho_depth_limit(sigma2, fair):
    with pytest.raises(ValueError):
        rho_map(fair, coordinate_generators(sigma2, range(2)), 3)


def test_rho_lengths_match_oracle(golden):
    model = O.markov_model(O.GOLDEN_P, O.GOLDEN_PI)
    gens = coordinate_generators(golden.system, range(8))
    coding = GeneratorCoding(golden, gens)
    for n in range(0, 9):
        imap = rho_map(golden, gens, n, coding=coding)
        assert list(imap.lengths().values()) == O.coordinate_cell_masses(model, n)
        assert imap.tiles_unit_interval()


def test_rho_non_coordinate_generators(sigma2, fair):
    # generators that are not single coordinates still tile [0, 1)
    gens = [make_cylinder(sigma2, 0, 2, [(0, 0), (1, 1)]), make_cylinder(sigma2, 1, 1, [(1,)])]
    imap = rho_map(fair, gens)
    assert imap.tiles_unit_interval()
    assert imap.lengths() == {"00": F(1, 4), "01": F(1, 4), "10": F(1, 4), "11": F(1, 4)}


def test_lex_offset_examples(sigma2, fair):
    gens = coordinate_generators(sigma2, range(4))
    assert lex_offset(fair, gens, "0000") == 0
    assert lex_offset(fair, gens, "11") == F(3, 4)
    assert lex_offset(bernoulli(sigma2, [F(1, 3), F(2, 3)]), gens, "10") == F(1, 3)


def test_lex_offset_matches_naive_sum(golden):
    gens = coordinate_generators(golden.system, range(8))
    coding = GeneratorCoding(golden, gens)
    model = O.markov_model(O.GOLDEN_P, O.GOLDEN_PI)
    for n in range(1, 9):
        brute = O.predecessor_sums(O.coordinate_cell_masses(model, n))
        assert [coding.lex_offset(w) for w in O.all_words(2, n)] == brute


def test_point_code_examples(sigma2, fair, golden):
    gens = coordinate_generators(sigma2, range(8))
    for n in range(0, 9):
        assert point_code(fair, gens, [0] * 8, n) == 0
        assert point_code(golden, coordinate_generators(golden.system, range(8)), [0] * 8, n) == 0
        assert point_code(fair, gens, [1] * 8, n) == 1 - F(1, 2 ** n)
    assert point_code(fair, gens, [1, 0, 1, 0, 1, 0], 4) == F(5, 8)


def test_point_code_monotone_and_left_endpoint(sigma2):
    mu = bernoulli(sigma2, [F(2, 5), F(3, 5)])
    gens = coordinate_generators(sigma2, range(8))
    rng = random.Random(5)
    for _ in range(20):
        x = [rng.randint(0, 1) for _ in range(8)]
        vals = [point_code(mu, gens, x, n) for n in range(9)]
        assert vals == sorted(vals) and vals[-1] <= 1
        for n in range(1, 9):
            left, _ = rho_map(mu, gens, n).interval("".join(map(str, x[:n])))
            assert vals[n] == left


def test_phi_examples(golden_sys, golden):
    gens = coordinate_generators(golden_sys, range(3))
    B = make_cylinder(golden_sys, 1, 1, [(0,)])
    assert phi_mw(golden, gens, B, "1", 1) == 1
    assert phi_mw(golden, gens, B, "0", 1) == F(1, 2)
    assert phi_mw(golden, gens, B, "", 0) == golden.of(B) == F(2, 3)
    with pytest.raises(NullCellError):
        phi_mw(golden, gens, B, "11", 2)
    with pytest.raises(ValueError):
        phi_mw(golden, gens, B, "1", 2)


def test_phi_independent_fiber(sigma2):
    mu = bernoulli(sigma2, [F(1, 3), F(2, 3)])
    gens = coordinate_generators(sigma2, range(0, 10, 2))
    B = make_cylinder(sigma2, 1, 1, [(1,)])
    coding = GeneratorCoding(mu, gens, [B])
    for m in range(0, 6):
        for v in O.all_words(2, m):
            assert phi_mw(mu, gens, B, v, m, coding=coding) == F(2, 3)


def test_martingale_check(golden, mixture):
    for mu in (golden, mixture):
        gens = coordinate_generators(mu.system, range(4))
        B = make_cylinder(mu.system, 2, 1, [(0,)])
        for m in range(0, 4):
            rep = martingale_check(mu, gens, B, m)
            assert rep.passed and rep.worst_residual == 0


def test_phi_convergence_is_reported(golden):
    gens = coordinate_generators(golden.system, range(6))
    B = make_cylinder(golden.system, 3, 1, [(0,)])
    rows = phi_convergence(golden, gens, B, 6)
    assert [m for m, _ in rows] == list(range(6))
    assert all(d >= 0 for _, d in rows)


def test_square_chart_independent(sigma2, fair):
    xi = coordinate_generators(sigma2, [0])
    fib = coordinate_generators(sigma2, [1])
    chart = square_chart(fair, xi, fib, 1, 1)
    assert len(chart.rects) == 4
    for r in chart.rects:
        assert r.x1 - r.x0 == F(1, 2) and r.y1 - r.y0 == F(1, 2)
    assert chart.total_area() == 1


def test_square_chart_without_fibers(golden):
    gens = coordinate_generators(golden.system, range(2))
    chart = square_chart(golden, gens, [], 1, 0)
    imap = rho_map(golden, gens, 1)
    assert [(r.x0, r.x1, r.y0, r.y1) for r in chart.rects] == [(a, b, 0, 1) for _, a, b in imap]


def test_square_chart_golden(golden_sys, golden):
    xi = coordinate_generators(golden_sys, [0])
    fib = coordinate_generators(golden_sys, [1])
    chart = square_chart(golden, xi, fib, 1, 1)
    assert chart.column_areas() == {"0": F(2, 3), "1": F(1, 3)}
    col1 = [r for r in chart.rects if r.column == "1"]
    assert [r.y1 - r.y0 for r in col1] == [1, 0]
    for r in chart.rects:
        assert r.area == chart.joint[(r.column, r.fiber)]
    assert chart.total_area() == 1


def test_square_chart_null_column(golden_sys, golden):
    gens = coordinate_generators(golden_sys, range(3))
    with pytest.raises(NullCellError):
        square_chart(golden, gens, coordinate_generators(golden_sys, [2]), 2, 1)
    chart = square_chart(golden, gens, coordinate_generators(golden_sys, [2]), 2, 1, null="skip")
    assert "11" not in chart.column_areas()
    assert chart.total_area() == 1


def test_square_chart_areas_against_oracle():
    S = full_shift(2)
    mu = markov_measure(S, [[F(1, 3), F(2, 3)], [F(3, 4), F(1, 4)]])
    model = O.markov_model([[F(1, 3), F(2, 3)], [F(3, 4), F(1, 4)]], [F(9, 17), F(8, 17)])
    assert mu.of(make_cylinder(S, 0, 1, [(0,)])) == F(9, 17)
    xi = coordinate_generators(S, range(2))
    fib = coordinate_generators(S, range(2, 4))
    chart = square_chart(mu, xi, fib, 2, 2)
    for r in chart.rects:
        assert r.area == O.word_weight(model, tuple(int(c) for c in r.column + r.fiber))
    imap = rho_map(mu, xi, 2)
    assert chart.column_areas() == imap.lengths()


def test_peano_examples():
    for n in range(0, 6):
        assert peano_point(0, n) == (0, 0)
    quarters = {(c.x0, c.y0) for c in peano_cells(1)}
    assert quarters == {(0, 0), (0, F(1, 2)), (F(1, 2), 0), (F(1, 2), F(1, 2))}
    assert peano_point(1, 2) == (peano_cell(15, 2).x0, peano_cell(15, 2).y0)
    with pytest.raises(ValueError):
        peano_point(F(3, 2), 1)


def test_peano_point_in_its_cell():
    rng = random.Random(3)
    for _ in range(50):
        t = F(rng.randint(0, 1000), 1000)
        x, y = peano_point(t, 3)
        deeper = peano_point(t, 4)
        assert x <= deeper[0] < x + F(1, 8) and y <= deeper[1] < y + F(1, 8)


def test_basis_report_examples(sigma2, fair, block_sys, mixture):
    rep = basis_report(fair, coordinate_generators(sigma2, range(4)), 4)
    assert rep.words == 16 and not rep.empty_words and not rep.null_words and rep.separates
    rep = basis_report(mixture, coordinate_generators(block_sys, range(2)), 4)
    # 4 symbols use two bits per coordinate: 0 -> 00, 1 -> 01, 2 -> 10, 3 -> 11
    assert sorted(rep.empty_words) == sorted(a + b for a in ("00", "01") for b in ("10", "11")) + \
        sorted(a + b for a in ("10", "11") for b in ("00", "01"))
    assert rep.separates
    point = bernoulli(sigma2, [1, 0])
    rep = basis_report(point, coordinate_generators(sigma2, range(3)), 3)
    assert len(rep.null_words) == 7 and "000" not in rep.null_words


def test_basis_report_degenerate(sigma2, fair):
    gens = coordinate_generators(sigma2, [0, 2])
    rep = basis_report(fair, gens, 2)
    assert not rep.separates and rep.degenerate_mass == 1
