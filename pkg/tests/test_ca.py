import numpy as np
import pytest
from hypothesis import given, strategies as st

from cadefects import bundled
from cadefects.ca import (Ca1D, apply, apply_grid, check_block_injectivity, from_eca_number, iterate,
                          restriction_action, rule_from_json, verify_weak_invariance)
from cadefects.symbolic import BINARY, CyclicConfig, EpConfig, Grid2D

words = st.text(alphabet="01", min_size=1, max_size=6)


@pytest.mark.parametrize("n", [18, 54, 62, 110, 184])
def test_eca_table_is_wolfram_numbering(n):
    ca = from_eca_number(n)
    for a, b, c in np.ndindex(2, 2, 2):
        assert ca.local((a, b, c)) == (n >> (4 * a + 2 * b + c)) & 1


def test_eca_range():
    with pytest.raises(ValueError):
        from_eca_number(256)


@given(st.integers(0, 255), words, words, words, st.integers(-5, 5), st.integers(1, 4))
def test_ep_evolution_matches_a_large_torus(n, left, center, right, anchor, t):
    ca = from_eca_number(n)
    c = EpConfig.parse(BINARY, left, center, right, anchor)
    lo, hi = -60, 60
    cells = c.cells(lo - 2 * t, hi + 2 * t)
    for _ in range(t):
        cells = ca.image(cells)
    img = iterate(ca, c, t)
    assert np.array_equal(img.cells(lo - t, hi + t), cells)


def test_backgrounds_move_as_shifts():
    c = EpConfig.parse(BINARY, "01", "", "01")
    assert apply(from_eca_number(184), c) == c.shift(1) == c.shift(-1)
    d = EpConfig.parse(BINARY, "110", "", "110")
    assert apply(from_eca_number(62), d) == d.shift(1)
    e = EpConfig.parse(BINARY, "00010011011111", "", "00010011011111")
    assert apply(from_eca_number(110), e) == e.shift(4)


def test_cyclic_image_wraps():
    ca = from_eca_number(184)
    row = CyclicConfig.parse(BINARY, "0101").array()
    assert ca.image_cyclic(row).tolist() == [1, 0, 1, 0]


@pytest.mark.parametrize("sub,rule", [("D62", "eca62"), ("G184", "eca184"), ("B54", "eca54"),
                                      ("E110", "eca110")])
def test_invariant_backgrounds(sub, rule):
    cert = verify_weak_invariance(bundled.rule(rule), bundled.subshift(sub))
    assert cert.invariant
    assert cert.to_json()["invariant"] is True


def test_golden_mean_not_invariant_under_110_with_witness():
    spec = bundled.subshift("golden_mean")
    cert = verify_weak_invariance(bundled.rule("eca110"), spec)
    assert not cert.invariant
    assert cert.witness is not None
    assert "11" in str(cert.image)


def test_block_injectivity_on_shift_backgrounds():
    assert check_block_injectivity(bundled.rule("eca62"), bundled.subshift("D62"), 1)


def test_54_swaps_the_two_components():
    act = restriction_action(bundled.rule("eca54"), bundled.subshift("B54"))
    assert act.perm == (1, 0)
    assert act.orbits == ((0, 1),)


def test_110_rotates_by_four():
    act = restriction_action(bundled.rule("eca110"), bundled.subshift("E110"))
    assert act.perm == (0,)
    assert act.orbit_shift[0] % 14 == 4


def checkerboard(h, w):
    y, x = np.mgrid[0:h, 0:w]
    return Grid2D(BINARY, (x + y) % 2)


def test_antiferro_fixes_checkerboards():
    ca = bundled.rule("antiferro")
    for g in (checkerboard(6, 8), Grid2D(BINARY, 1 - checkerboard(6, 8).cells)):
        assert apply_grid(ca, g) == g


def test_voter_majority_fixes_constants():
    ca = bundled.rule("voter")
    for v in (0, 1):
        g = Grid2D(BINARY, np.full((5, 5), v))
        assert apply_grid(ca, g) == g


def test_voter_flips_isolated_cell():
    ca = bundled.rule("voter")
    a = np.zeros((5, 5), dtype=int)
    a[2, 2] = 1
    assert not apply_grid(ca, Grid2D(BINARY, a)).cells.any()


@pytest.mark.parametrize("name", bundled.names("rules"))
def test_rule_json_roundtrip(name):
    ca = bundled.rule(name)
    again = rule_from_json(ca.to_json())
    if isinstance(ca, Ca1D):
        assert np.array_equal(again.table, ca.table)
    else:
        g = checkerboard(6, 6)
        a = np.array(g.cells)
        a[0, 0] ^= 1
        g = Grid2D(BINARY, a)
        assert apply_grid(again, g) == apply_grid(ca, g)


def test_table_size_checked():
    with pytest.raises(ValueError):
        Ca1D(BINARY, 1, [0] * 7)
