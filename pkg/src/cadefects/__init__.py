"""Defects in subshifts and cellular automata.

Spectral classification of domain boundaries (interfaces and rational
dislocations) in one- and two-dimensional subshifts, together with a
spacetime tracker that checks the coalescence law for defect particles.
"""

__version__ = "0.1.0"

from .symbolic import BINARY, Alphabet, CyclicConfig, EpConfig, Grid2D, Word, config_from_json
from .subshift import MarkovSpec, SftSpec, SoficSpec, WangSpec, spec_from_json, spec_to_json
from .ca import Ca1D, Ca2D, from_eca_number, rule_from_json, verify_weak_invariance
from .spectral import DisplacementGroup, Displacement, rational_spectrum, spectral_model
from .defect import classify, defect_field, defect_set, domain_components, is_removable, phase_gap
from .tracker import detect_collisions, extract_particles, simulate, verify_conservation

__all__ = [
    "BINARY", "Alphabet", "CyclicConfig", "EpConfig", "Grid2D", "Word", "config_from_json",
    "MarkovSpec", "SftSpec", "SoficSpec", "WangSpec", "spec_from_json", "spec_to_json",
    "Ca1D", "Ca2D", "from_eca_number", "rule_from_json", "verify_weak_invariance",
    "DisplacementGroup", "Displacement", "rational_spectrum", "spectral_model",
    "classify", "defect_field", "defect_set", "domain_components", "is_removable", "phase_gap",
    "detect_collisions", "extract_particles", "simulate", "verify_conservation",
]
