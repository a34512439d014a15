import numpy as np
import pytest
from hypothesis import given, strategies as st

from cadefects import bundled
from cadefects.ca import apply
from cadefects.defect import (INF, DefectField, InadmissibleTails, classify, component_word, defect_field,
                              defect_set, domain_components, is_point_admissible, is_removable, phase_gap,
                              tails_admissible)
from cadefects.spectral import rational_spectrum, spectral_model
from cadefects.subshift import is_admissible, state_structure
from cadefects.symbolic import BINARY, CyclicConfig, EpConfig, Grid2D, Word

words = st.text(alphabet="01", min_size=1, max_size=6)


def brute_field(c, spec, zs, limit=40):
    """F(z) straight from the definition: the largest admissible centered window."""
    out = []
    for z in zs:
        r = -1
        while r < limit and is_admissible(spec, c.window(z - r - 1, z + r + 1)):
            r += 1
        out.append(r)
    return out


def test_full_shift_field_is_infinite():
    spec = bundled.subshift("full")
    f = defect_field(EpConfig.parse(BINARY, "0", "1101", "01"), spec)
    assert np.all(f.values == INF)
    assert defect_set(f) == []


def test_golden_mean_field_is_distance_to_violation():
    spec = bundled.subshift("golden_mean")
    c = bundled.config("golden_mean_11")
    zs = range(-15, 17)
    f = defect_field(c, spec, (-15, 16))
    # X = cells whose radius-1 window holds the "11"; the radius-0 blocks are all admissible
    X = [0, 1]
    r = 1
    want = [(r - 1) + min(abs(z - x) for x in X) for z in zs]
    assert f.values.tolist() == want
    assert f.values.tolist() == brute_field(c, spec, zs)
    assert defect_set(f) == X


def test_s_field_distance_to_far_end():
    spec = bundled.subshift("S18")
    f = defect_field(bundled.config("eca18_s"), spec, (-10, 27))
    zs = range(-10, 28)
    assert f.values.tolist() == [max(z, 17 - z) for z in zs]
    assert defect_set(f) == [8, 9]


@pytest.mark.parametrize("sub", ["golden_mean", "D62", "B54", "S18"])
@given(left=words, center=st.text(alphabet="01", max_size=8), right=words)
def test_field_matches_definition(sub, left, center, right):
    spec = bundled.subshift(sub)
    c = EpConfig.parse(BINARY, left, center, right)
    if not tails_admissible(c, spec) or is_point_admissible(c, spec):
        return
    zs = range(-12, 20)
    f = defect_field(c, spec, (-12, 19))
    assert f.values.tolist() == brute_field(c, spec, zs)


def test_tails_must_be_admissible():
    spec = bundled.subshift("D62")
    with pytest.raises(InadmissibleTails):
        defect_field(EpConfig.parse(BINARY, "11", "", "110"), spec)
    with pytest.raises(InadmissibleTails):
        classify(EpConfig.parse(BINARY, "110", "", "0"), spec)


def test_cyclic_field_is_capped():
    spec = bundled.subshift("D62")
    f = defect_field(CyclicConfig.parse(BINARY, "110" * 5), spec)
    assert np.all(f.capped) and np.all(f.values == 7)
    assert defect_set(f) == []
    assert f.to_json()["values"][0] == ">=7"


def test_defect_set_plateaus():
    f = DefectField(0, np.array([3, 2, 2, 3, 1, 1, 1, 4]), np.zeros(8, bool))
    assert defect_set(f) == [1, 2, 4, 5, 6]


def test_periodic_point_one_projective_domain():
    spec = bundled.subshift("D62")
    dec = domain_components(EpConfig.parse(BINARY, "110", "", "110"), spec)
    assert len(dec) == 1 and dec.domains[0].projective


def test_alpha_plus_two_projective_domains():
    dec = domain_components(bundled.config("eca184_alpha_plus"), bundled.subshift("G184"))
    assert [d.projective for d in dec.domains] == [True, True]
    assert dec.domains[0].lo is None and dec.domains[1].hi is None


def test_radius_too_small():
    with pytest.raises(ValueError):
        domain_components(bundled.config("eca62_gamma"), bundled.subshift("D62"), r=1)


def fig2b_grid(n=16):
    y, x = np.mgrid[0:n, 0:n]
    a = (x + y) % 2
    a[n // 2:] ^= 1
    return Grid2D(BINARY, a)


def test_checkerboard_grid_has_north_and_south_domains():
    dec = domain_components(fig2b_grid(), bundled.subshift("checkerboard"))
    assert len(dec) == 2
    north, south = dec.domains
    assert min(y for _, y in north.cells) > max(y for _, y in south.cells)
    assert north.projective and south.projective


def test_grid_classification_coset():
    rep = classify(fig2b_grid(), bundled.subshift("checkerboard"))
    assert rep.kind == "dislocation"
    g = rep.group
    assert rep.displacement == g.element(1, 0)
    assert not rep.displacement.is_identity


def test_constant_grid_over_checkerboard_is_all_defect():
    f = defect_field(Grid2D(BINARY, np.zeros((6, 6), int)), bundled.subshift("checkerboard"))
    assert f.values.max() == 0


@pytest.mark.parametrize("name", ["eca62_alpha", "eca62_beta", "eca62_gamma", "eca184_gamma_plus",
                                  "eca184_beta", "eca54_gamma_plus", "eca110_A", "eca18_s"])
def test_bundled_cases(cases, name):
    case = cases[name]
    spec, ca, c = case.load()
    got = classify(c, spec, ca).to_json()
    for k, v in case.expected.items():
        if k == "signature":
            assert [s["word"] for s in got["signature"]] == v
        elif k == "displacement" and isinstance(v, list):
            g = classify(c, spec, ca).group
            assert g.element(got[k]) == g.element(v)
        else:
            assert got[k] == v, k


def test_report_json_field_order():
    rep = classify(bundled.config("eca62_gamma"), bundled.subshift("D62"), bundled.rule("eca62"))
    keys = list(rep.to_json())
    assert keys == ["classification", "defect_set", "decomposition", "group", "matrix",
                    "displacement", "essential", "removable"]


def test_admissible_config_is_not_a_defect():
    rep = classify(EpConfig.parse(BINARY, "110", "110", "110", 4), bundled.subshift("D62"))
    assert rep.kind == "none" and not rep.essential and rep.removable


def test_interface_without_ca_uses_components():
    rep = classify(bundled.config("eca184_beta"), bundled.subshift("G184"))
    assert rep.kind == "interface"


def state_at(spec, c, z):
    st_ = state_structure(spec)
    return int(st_.states_at(c.cells(z - st_.radius, z + st_.radius))[0])


@pytest.mark.parametrize("name,want", [("eca62_alpha", 0), ("eca62_beta", 2), ("eca62_gamma", 1)])
def test_phase_gap_table(name, want):
    spec = bundled.subshift("D62")
    (ps,) = rational_spectrum(spec)
    c = bundled.config(name)
    y, z = -10, c.end + 10
    d = phase_gap(state_at(spec, c, y), state_at(spec, c, z), z - y - 1, ps)
    assert d.rep == (want,)


def test_phase_gap_seamless_is_zero():
    spec = bundled.subshift("D62")
    (ps,) = rational_spectrum(spec)
    # along ...110110... the block 110 is followed by 101
    assert phase_gap("110", "101", 0, ps).is_identity
    assert phase_gap("110", "110", 2, ps).is_identity
    assert phase_gap("110", "011", 0, ps).rep == (2,)


@pytest.mark.parametrize("sub,comp", [("D62", 0), ("G184", 1), ("E110", 0)])
def test_phase_gap_agrees_with_classify(sub, comp):
    spec = bundled.subshift(sub)
    ps = rational_spectrum(spec)[comp]
    w = component_word(spec, comp)
    rots = [w[i:] + w[:i] for i in range(len(w))]
    rng = np.random.default_rng(comp + len(w))
    seen = 0
    while seen < 334:
        left, right = (rots[i] for i in rng.integers(len(rots), size=2))
        center = "".join(rng.choice(["0", "1"], rng.integers(0, 9)))
        c = EpConfig.parse(BINARY, left, center, right)
        rep = classify(c, spec)
        if rep.displacement is None:
            continue
        y, z = c.anchor - 3 * len(w) - 8, c.end + 3 * len(w) + 8
        d = phase_gap(state_at(spec, c, y), state_at(spec, c, z), z - y - 1, ps)
        assert d == rep.displacement, str(c)
        seen += 1


def test_phase_gap_rejects_other_component():
    spec = bundled.subshift("G184")
    ps = rational_spectrum(spec)[1]
    with pytest.raises(ValueError):
        phase_gap("000", "010", 3, ps)


@pytest.mark.parametrize("name,want", [("eca62_alpha", True), ("eca62_beta", False),
                                       ("eca62_gamma", False), ("golden_mean_11", True),
                                       ("eca184_beta", False)])
def test_removability(cases, name, want):
    spec, _, c = cases[name].load()
    assert is_removable(c, spec) is want


@given(left=words, center=st.text(alphabet="01", max_size=10), right=words)
def test_full_shift_defects_removable(left, center, right):
    assert is_removable(EpConfig.parse(BINARY, left, center, right), bundled.subshift("full"))


def test_abc_junction_needs_parity():
    spec = bundled.subshift("abc")
    ab = spec.alphabet
    # b sits at odd cells on the left; "bb" puts it at even cells on the right
    odd = EpConfig(Word.parse(ab, "ab"), Word.parse(ab, ""), Word.parse(ab, "ba"))
    # "cc" and "ca" are forbidden but b stays on odd cells
    even = EpConfig(Word.parse(ab, "ab"), Word.parse(ab, "cc"), Word.parse(ab, "ab"))
    assert not is_removable(odd, spec)
    assert is_removable(even, spec)


def test_marker_dislocation_of_s_survives_evolution():
    spec, ca, c = bundled.subshift("S18"), bundled.rule("eca18"), bundled.config("eca18_s")
    for _ in range(5):
        c = apply(ca, c)
    rep = classify(c, spec, ca)
    assert rep.kind == "marker_dislocation" and rep.displacement.rep == (1,)


def test_model_frames():
    model = spectral_model(bundled.subshift("B54"), bundled.rule("eca54"))
    assert len(model.frames) == 1 and model.frames[0].K == 2
