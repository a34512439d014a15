from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from cadefects import bundled
from cadefects.defect import component_word
from cadefects.spectral import (DisplacementGroup, RootOfUnity, displacement_group, eval_eigenfunction,
                                eval_marker_eigenfunction, hermite_normal_form, lattice_model,
                                rational_spectrum, spectral_model)
from cadefects.symbolic import BINARY, Word


@given(st.integers(-50, 50), st.integers(1, 12), st.integers(-50, 50), st.integers(1, 12))
def test_roots_of_unity_multiply_as_fractions(a, n, b, m):
    x, y = RootOfUnity(a, n), RootOfUnity(b, m)
    assert (x * y).frac == (Fraction(a, n) + Fraction(b, m)) % 1
    assert (x / y) * y == x
    assert x ** n == RootOfUnity(0)


def test_exponent_needs_divisible_order():
    assert RootOfUnity(1, 3).exponent(6) == 2
    with pytest.raises(ValueError):
        RootOfUnity(1, 4).exponent(6)


vec = st.tuples(st.integers(-9, 9), st.integers(-9, 9))


@given(st.lists(vec, min_size=2, max_size=4))
def test_hnf_spans_the_same_lattice(gens):
    det = 0
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            det = gcd(det, gens[i][0] * gens[j][1] - gens[i][1] * gens[j][0])
    if det == 0:
        with pytest.raises(ValueError):
            hermite_normal_form(gens, 2)
        return
    basis = hermite_normal_form(gens, 2)
    assert basis[0][0] * basis[1][1] == det
    assert basis[1][0] == 0 and 0 <= basis[0][1] < basis[1][1]
    g = DisplacementGroup.lattice(gens)
    for v in gens:
        assert g.element(v).is_identity


@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30))
def test_spacetime_group_laws(a, b, c, d):
    g = DisplacementGroup.spacetime(2, 2, 4)
    x, y = g.element(a, b), g.element(c, d)
    assert x + y == y + x
    assert (x - y) + y == x
    assert (x + (-x)).is_identity


def test_54_kernel():
    g = DisplacementGroup.spacetime(2, 2, 4)
    assert g.basis == ((2, 2), (0, 4))
    assert g.order == 8
    assert g.element(1, 3) == g.element(-1, 1)
    assert g.element(2, 2).is_identity


@pytest.mark.parametrize("sub,rule,P,rot", [("D62", "eca62", 3, 1), ("E110", "eca110", 14, 4)])
def test_single_component_spectra(sub, rule, P, rot):
    (ps,) = rational_spectrum(bundled.subshift(sub), bundled.rule(rule))
    assert ps.period == P and ps.rotation == rot
    assert len(ps.spectrum()) == P
    assert ps.tau(ps.lam) == ps.lam ** rot


def test_184_components():
    pss = rational_spectrum(bundled.subshift("G184"), bundled.rule("eca184"))
    assert sorted(ps.period for ps in pss) == [1, 1, 2]
    assert all(ps.image == ps.component for ps in pss)


def test_full_shift_has_trivial_spectrum():
    (ps,) = rational_spectrum(bundled.subshift("full"))
    assert ps.period == 1


@pytest.mark.parametrize("sub", ["D62", "E110", "B54"])
def test_eigenfunction_advances_by_lambda(sub):
    spec = bundled.subshift(sub)
    model = spectral_model(spec)
    for ps in model.phase_structures:
        gen = component_word(spec, ps.component)
        rad = model.structure.radius
        word = Word.parse(BINARY, (gen * 40)[: 4 * rad + 2 * ps.period + 2])
        w = len(word)
        vals = [eval_eigenfunction(ps, word, 0, z) for z in range(rad, w - rad)]
        for u, v in zip(vals, vals[1:]):
            assert v == u * ps.lam


def test_eigenfunction_rejects_bad_window():
    spec = bundled.subshift("D62")
    (ps,) = rational_spectrum(spec)
    with pytest.raises(ValueError):
        eval_eigenfunction(ps, Word.parse(BINARY, "000"), 0)


def test_marker_eigenfunction():
    spec = bundled.subshift("S18")
    f0 = eval_marker_eigenfunction(spec, Word.parse(BINARY, "0001000"), 0)
    f1 = eval_marker_eigenfunction(spec, Word.parse(BINARY, "0001000"), 1)
    assert f0 is not None and f1 == f0 * RootOfUnity(1, 2)
    assert eval_marker_eigenfunction(spec, Word.parse(BINARY, "000"), 0) is None


def test_groups_by_component():
    assert displacement_group(bundled.subshift("D62"), bundled.rule("eca62")).label == "Z/3"
    assert displacement_group(bundled.subshift("B54"), bundled.rule("eca54")).label == "Z^2/K"


def test_checkerboard_lattice():
    lm = lattice_model(bundled.subshift("checkerboard"))
    assert len(lm.components) == 1
    g = lm.components[0].group
    assert g.basis == ((1, 1), (0, 2))
    assert g.element(1, -1).is_identity
    assert g.element(1, 0) == g.element(0, 1)
    assert not g.element(1, 0).is_identity


def test_monochromatic_lattice_two_components():
    lm = lattice_model(bundled.subshift("monochromatic"))
    assert len(lm.components) == 2
    assert all(c.group.order == 1 for c in lm.components)
