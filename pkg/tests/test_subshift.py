import itertools
import re

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cadefects import bundled
from cadefects.subshift import (MarkovSpec, SftSpec, SubshiftError, WangSpec, admissible_words,
                                is_admissible, language, presentation, reachable_in_time,
                                recode_to_markov, spec_from_json, spec_to_json, state_structure,
                                transitive_decomposition, wang_patch_admissible, wang_periodic_points)
from cadefects.symbolic import BINARY, Alphabet, Word


def fib(n):
    a, b = 2, 3
    for _ in range(n - 1):
        a, b = b, a + b
    return a


@pytest.mark.parametrize("name,radius", [("D62", 1), ("G184", 1), ("B54", 2), ("E110", 3)])
def test_orbit_sfts_pick_least_radius(name, radius):
    assert bundled.subshift(name).radius == radius


def test_orbit_sft_points_are_exactly_the_orbits():
    spec = bundled.subshift("E110")
    g = presentation(spec)
    assert g.n == 14 and len(g.edges) == 14


@pytest.mark.parametrize("n", range(1, 12))
def test_golden_mean_word_counts(n):
    assert len(admissible_words(bundled.subshift("golden_mean"), n)) == fib(n)


def _odd_runs_oracle(w):
    # interior zero runs (bounded by 1 on both sides) must be odd
    return all(len(m) % 2 == 1 for m in re.findall(r"(?<=1)0*(?=1)", w))


@pytest.mark.parametrize("n", range(1, 13))
def test_sofic_language_matches_run_oracle(n):
    spec = bundled.subshift("S18")
    got = {"".join(map(str, w)) for w in admissible_words(spec, n)}
    want = {"".join(w) for w in itertools.product("01", repeat=n) if _odd_runs_oracle("".join(w))}
    assert got == want


def test_sofic_rejects_adjacent_ones():
    spec = bundled.subshift("S18")
    assert not is_admissible(spec, Word.parse(BINARY, "11"))
    assert is_admissible(spec, Word.parse(BINARY, "10001"))
    assert not is_admissible(spec, Word.parse(BINARY, "1001"))


def test_decomposition_of_184_background():
    st_ = state_structure(bundled.subshift("G184"))
    assert sorted(st_.periods) == [1, 1, 2]


def test_decomposition_full_shift_one_aperiodic_component():
    st_ = state_structure(bundled.subshift("full"))
    assert st_.periods == (1,)


def test_abc_period_two():
    st_ = state_structure(bundled.subshift("abc"))
    assert st_.periods == (2,)
    phases = st_.phase_of_state
    assert phases[0] == phases[2] != phases[1]


def test_recode_transitions_overlap():
    spec = bundled.subshift("D62")
    m, code = recode_to_markov(spec)
    assert m.alphabet.size == 3 and len(m.transitions) == 3
    w = Word.parse(BINARY, "110110")
    states = code.encode(w)
    assert None not in states
    assert code.decode(states) == w


def test_transient_states_excluded():
    m = MarkovSpec.from_labels(Alphabet.of("abc"), ["ab", "bb", "bc", "cc"])
    dec = transitive_decomposition(m)
    assert len(dec) == 2
    assert dec.transient == (0,) or 0 in dec.transient


markov = st.sets(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=16)


@given(markov, st.integers(0, 3), st.integers(0, 3), st.integers(0, 9))
def test_reachable_in_time_matches_path_enumeration(trans, a, c, t):
    m = MarkovSpec(Alphabet.of("abcd"), frozenset(trans))
    frontier = {a}
    for _ in range(t):
        frontier = {y for x in frontier for (u, y) in trans if u == x}
    assert reachable_in_time(m, a, c, t) == (c in frontier)


def test_reachable_rejects_unknown_state():
    with pytest.raises(SubshiftError):
        reachable_in_time(bundled.subshift("golden_mean"), "2", "0", 1)


def test_checkerboard_periodic_points():
    spec = bundled.subshift("checkerboard")
    pts = wang_periodic_points(spec, 2)
    assert all(p.shape == (2, 2) for p in pts)
    assert len(pts) == 2


def test_checkerboard_patch_admissible():
    spec = bundled.subshift("checkerboard")
    assert wang_patch_admissible(spec, np.array([[0, 1], [1, 0]]))
    assert not wang_patch_admissible(spec, np.array([[0, 0], [1, 0]]))


def test_sft_block_length_checked():
    with pytest.raises(SubshiftError):
        SftSpec.from_words(BINARY, 1, ["00"])


@pytest.mark.parametrize("name", bundled.names("subshifts"))
def test_json_roundtrip(name):
    spec = bundled.subshift(name)
    again = spec_from_json(spec_to_json(spec))
    if isinstance(spec, WangSpec):
        assert (again.horizontal, again.vertical) == (spec.horizontal, spec.vertical)
    else:
        for n in range(1, 9):
            assert admissible_words(again, n) == admissible_words(spec, n)


def test_unknown_type():
    with pytest.raises(SubshiftError):
        spec_from_json({"type": "nope"})


def test_language_accepts_empty_word():
    assert language(bundled.subshift("D62")).accepts([])
