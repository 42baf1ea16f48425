"""End-to-end smoke tests for the Python bindings."""

from fractions import Fraction

import pytest

import sqfvar


@pytest.fixture(scope="module")
def table():
    return sqfvar.sieve_mobius(100000)


def test_sieve_basics(table):
    assert table.limit == 100000
    assert table.mu(1) == 1
    assert table.mu(6) == 1
    assert table.mu(12) == 0
    assert table.squarefree(10)
    assert not table.squarefree(9)
    assert table.squarefree_count(100) == 61
    with pytest.raises(IndexError):
        table.mu(0)


def test_arith_helpers():
    assert sqfvar.euler_phi(12) == 4
    assert sqfvar.unit_group(10) == [1, 3, 7, 9]
    assert abs(sqfvar.c_constant(6) - 9 / 3.141592653589793**2) < 1e-12


def test_profile_and_variance(table):
    prof = sqfvar.profile(table, 20, 4)
    assert prof["residues"] == [1, 3]
    assert prof["counts"] == [4, 5]
    assert prof["total"] == 9

    var = sqfvar.variance(table, 10, 3)
    assert var["T"] == 13
    assert var["centered_variance"] == Fraction(1, 2)
    assert isinstance(var["T"], int)

    conv = sqfvar.t_via_convolution(table, 10000, 37)
    direct = sqfvar.variance(table, 10000, 37)["T"]
    assert conv == direct


def test_gamma_rearrangement(table):
    t = sqfvar.variance(table, 10000, 97)["T"]
    tg = sqfvar.t_gamma(table, 10000, 97, gamma="inv")
    v = sqfvar.variance(table, 10000, 97)["V"]
    vg = sqfvar.v_gamma(table, 10000, 97, gamma="inv")
    assert 0 <= t - tg <= 2 * v + 1e-9
    assert abs((t - tg) - (v - vg)) <= 1e-8 * max(1.0, abs(t - tg))
    with pytest.raises(ValueError):
        sqfvar.t_gamma(table, 100, 12, gamma="pow:2")  # not a bijection mod 12


def test_characters(table):
    assert sqfvar.character_orders(8) == [2, 2]
    z = sqfvar.twisted_sum(table, 3, 1, 10)
    assert abs(z - (1 + 0j)) < 1e-12
    spectral = sqfvar.character_variance(table, 97, 10000)
    centered = float(sqfvar.variance(table, 10000, 97)["centered_variance"])
    assert abs(spectral - centered) <= 1e-6 * max(1.0, centered)
    assert sqfvar.orthogonality_selfcheck(40) < 1e-10


def test_lemma_oracles():
    assert sqfvar.count_primitive_solutions((1, 1, 1), (1.0, 1.0, 1.0)) == 6
    assert sqfvar.lemma1_bound((1, 1, 1), (1.0, 1.0, 1.0)) > 41.0
    audit = sqfvar.lemma1_exhaustive_check(4, 3)
    assert audit["violations"] == 0

    cc = sqfvar.congruence_count(5, 5, 3, 1, 1)
    assert cc["N"] == 8
    assert cc["N_star"] == Fraction(8)
    assert sqfvar.m_quantity(2, 1, 1) == Fraction(12)
    avg = sqfvar.lemma3_average(2, 0.5, 0.5)
    assert avg["terms"] == 1
    assert abs(avg["sum"] - 12.0) < 1e-9
    with pytest.raises(ValueError):
        sqfvar.congruence_count(5, 5, 6, 2, 1)


def test_sweep_and_fit(table):
    rows = sqfvar.sweep(table, 100000, [97, 1009, 9973], eps=0.05)
    assert [r["q"] for r in rows] == [97, 1009, 9973]
    for r in rows:
        assert r["V"] >= 0
        assert r["moment1"] ** 2 <= r["phi"] * r["V"] * (1 + 1e-10) + 1e-9
        assert isinstance(r["T"], int)

    synthetic = [
        {"x": 1000, "q": q, "V": 2.0 * q**0.5} for q in (10, 100, 1000, 10000)
    ]
    fit = sqfvar.fit_exponents(synthetic, mode="vary-q")
    assert abs(fit["beta"] - 0.5) < 1e-12
    assert abs(fit["C"] - 2.0) < 1e-12

    grid = sqfvar.default_q_grid(100000)
    assert grid[-1] == 100000
    assert all(b > a for a, b in zip(grid, grid[1:]))


def test_selfcheck():
    lines = sqfvar.run_selfcheck(seed=1)
    assert len(lines) >= 10
    assert all(line["pass"] for line in lines)
