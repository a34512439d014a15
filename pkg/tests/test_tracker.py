import numpy as np
import pytest

from cadefects import bundled
from cadefects.ca import from_eca_number, identity_ca
from cadefects.symbolic import BINARY, CyclicConfig
from cadefects.tracker import (NoCondensation, cyclic_intervals, defective_mask, detect_collisions,
                               extract_particles, forbidden_cover, max_speed, random_config, render_field_pgm,
                               render_overlay_pgm, render_pgm, simulate, total_displacement,
                               verify_conservation)


def run(name, T=200):
    case = next(c for c in bundled.tori() if c.name == name)
    spec, ca, init = case.load()
    st = simulate(ca, init, T)
    res = extract_particles(st, spec, burn_in=0)
    events = detect_collisions(res)
    return res, events, verify_conservation(events, res.tracks)


def test_constant_rule():
    st = simulate(from_eca_number(0), CyclicConfig.parse(BINARY, "0110100"), 5)
    assert st.T == 5 and st.rows[0].tolist() == [0, 1, 1, 0, 1, 0, 0]
    assert not st.rows[1:].any()


def test_rows_are_read_only():
    st = simulate(from_eca_number(0), CyclicConfig.parse(BINARY, "01"), 2)
    with pytest.raises(ValueError):
        st.rows[0, 0] = 1


@pytest.mark.parametrize("rule,word,shift", [(184, "01" * 8, 1), (62, "110" * 4, 1)])
def test_shift_backgrounds(rule, word, shift):
    st = simulate(from_eca_number(rule), CyclicConfig.parse(BINARY, word), 6)
    for t in range(1, 6):
        assert st.rows[t].tolist() == np.roll(st.rows[t - 1], -shift).tolist()


def test_simulate_needs_a_step():
    with pytest.raises(ValueError):
        simulate(from_eca_number(0), CyclicConfig.parse(BINARY, "01"), 0)


def test_random_config_is_seeded():
    a = random_config(BINARY, 64, 3).array()
    assert a.tolist() == random_config(BINARY, 64, 3).array().tolist()
    assert a.tolist() != random_config(BINARY, 64, 4).array().tolist()


def test_cyclic_intervals_wrap():
    mask = np.array([1, 1, 0, 0, 1, 0, 1], dtype=bool)
    assert cyclic_intervals(mask) == [(4, 1), (6, 3)]
    assert cyclic_intervals(np.zeros(4, bool)) == []
    assert cyclic_intervals(np.ones(4, bool)) == [(0, 4)]


def test_defective_mask_golden_mean():
    spec = bundled.subshift("golden_mean")
    row = np.array([0, 0, 0, 1, 1, 0, 0, 0, 0, 0])
    assert np.nonzero(defective_mask(row, spec, 1))[0].tolist() == [3, 4]
    assert np.nonzero(defective_mask(row, spec, 2))[0].tolist() == [2, 3, 4, 5]


def test_forbidden_cover_even_run():
    spec = bundled.subshift("S18")
    row = np.array([1, 0, 0, 1] + [0] * 3 + [1] + [0] * 3)
    assert np.nonzero(forbidden_cover(row, spec, 32))[0].tolist() == [0, 1, 2, 3]


def test_admissible_torus_has_no_particles():
    st = simulate(from_eca_number(62), CyclicConfig.parse(BINARY, "110" * 20), 40)
    res = extract_particles(st, bundled.subshift("D62"), burn_in=0)
    assert res.tracks == [] and detect_collisions(res) == []
    assert verify_conservation([], []).ok


def test_lone_dislocation_never_collides():
    st = simulate(from_eca_number(62), CyclicConfig.parse(BINARY, "110" * 20 + "0"), 80)
    res = extract_particles(st, bundled.subshift("D62"), burn_in=0)
    assert len(res.tracks) == 1 and detect_collisions(res) == []
    assert res.tracks[0].label.displacement.rep == (1,)


def test_184_pair_annihilates():
    res, events, rep = run("torus_eca184_gamma_pair")
    labels = sorted(str(t.label) for t in res.tracks if t.lifetime >= 4)
    assert labels == ["1 in Z/2", "1 in Z/2"]
    (ev,) = events
    assert len(ev.incoming) == 2 and ev.outgoing == [] and ev.verdict == "PASS"


def test_62_gamma_beta_to_alpha():
    res, events, rep = run("torus_eca62_gamma_beta")
    (ev,) = events
    assert sorted(res.tracks[i].label.displacement.rep[0] for i in ev.incoming) == [1, 2]
    assert [res.tracks[i].label.displacement.rep[0] for i in ev.outgoing] in ([], [0])
    assert rep.ok and rep.passed == 1


def test_54_two_events():
    res, events, rep = run("torus_eca54_gamma_beta", 120)
    assert len(events) == 2 and rep.passed == 2


def test_speed_bound_and_totals():
    res, events, rep = run("torus_eca54_gamma_beta", 120)
    assert max_speed(res) <= 1
    totals = {x for x in total_displacement(res) if x is not None}
    assert len(totals) == 1


def test_no_condensation_raises():
    # under the identity nothing condenses
    st = simulate(identity_ca(BINARY), random_config(BINARY, 128, 0), 60)
    with pytest.raises(NoCondensation):
        extract_particles(st, bundled.subshift("D62"), burn_in=10)


def test_determinism():
    ca, spec = bundled.rule("eca62"), bundled.subshift("D62")
    outs = []
    for _ in range(2):
        st = simulate(ca, random_config(BINARY, 128, 11), 150)
        res = extract_particles(st, spec)
        ev = detect_collisions(res)
        verify_conservation(ev, res.tracks)
        outs.append(([t.to_json() for t in res.tracks], [e.to_json() for e in ev]))
    assert outs[0] == outs[1]


def test_pgm_formats():
    rows = np.array([[0, 1], [1, 0]])
    assert render_pgm(rows, 2) == "P2\n2 2\n255\n0 255\n255 0\n"
    ov = render_overlay_pgm(rows, np.array([[True, False]]), 2, 1)
    assert ov.splitlines()[-1] == "128 0"
    assert render_field_pgm(np.array([3, 400])).splitlines()[-1] == "3 255"
