import pytest

from knotsurg.algebra import phi_sigma
from knotsurg.coeff import IDEM1, UAdic
from knotsurg.serieslab import (
    NAMES, NINE, alpha_window, check_factorizations, chiral_cross_check, kappa_numerator,
    series, tile_b, tile_factored, tile_identity_check, total_sum_mod_u_check, unit_in,
    verify_triangle,
)
from oracles import derived_series


@pytest.mark.parametrize("N", [2, 4, 8, 16, 32])
def test_closed_forms_match_division_oracle(N):
    for name, terms in derived_series(N).items():
        assert set(series(name, UAdic(N)).terms) == terms, name


@pytest.mark.parametrize("N", [4, 8, 16, 32])
def test_eleven_identities(N):
    rep = check_factorizations(N)
    assert len(rep.core) == 11
    assert all(c.ok for c in rep.core), [c.name for c in rep.core if not c.ok]


@pytest.mark.parametrize("N", [4, 8, 16])
def test_kappa(N):
    extra = {c.name: c for c in check_factorizations(N).extra}
    assert extra["kappa exists and re-multiplies"].ok
    assert extra["kappa = 1 mod U"].ok
    assert extra["kappa' exists and re-multiplies"].ok


@pytest.mark.parametrize("N", [4, 8, 16])
def test_kappa_prime_vanishes_mod_u(N):
    # the numerator beta' + unit is 0 at U^0, so kappa' is too
    p = UAdic(N)
    num = series("beta'", p) + unit_in(IDEM1, p)
    assert not num.mod_u()
    assert not series("kappa'", p).mod_u()


def test_total_sum_mod_u():
    assert total_sum_mod_u_check(8)


def test_all_names_build():
    p = UAdic(8)
    for nm in NAMES:
        series(nm, p)
    with pytest.raises(KeyError):
        series("gamma", p)


def test_alpha_prime_is_phi_sigma_alpha():
    p = UAdic(8)
    assert series("alpha'", p) == phi_sigma(series("alpha", p))


@pytest.mark.parametrize("n", range(-3, 4))
def test_triangle(n):
    w = verify_triangle(n, 16)
    assert w.ok, w.first_failure()
    assert len(w.lines()) == len(NINE)


@pytest.mark.parametrize("n", [-1, 0, 2])
def test_chiral_cross_check(n):
    rc, rd, iso, W = chiral_cross_check(n)
    assert iso is not None
    assert W == alpha_window(8) == 10


def test_tiles_reading():
    rows = tile_identity_check(8)
    tiles = [r for r in rows if r.reading == "tiles"]
    assert all(r.ok for r in tiles)
    assert all(r.ok for r in rows if r.identity == "b1b1sum")
    expanded = [r for r in rows if r.reading == "expanded"]
    assert not all(r.ok for r in expanded)


@pytest.mark.parametrize("s", range(1, 9))
def test_tile_factorization(s):
    b = tile_b(s, "+" if s % 2 else "-", "tiles")
    assert b == tile_factored(s, 0 if s % 2 else 1)


def test_bad_arguments():
    with pytest.raises(ValueError):
        check_factorizations(1)
    with pytest.raises(ValueError):
        tile_identity_check(0)
    with pytest.raises(ValueError):
        tile_b(2, "+", "other")
    assert kappa_numerator(UAdic(4))
