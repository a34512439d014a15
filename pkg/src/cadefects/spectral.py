"""Rational spectra, eigenfunctions and displacement groups.

Conventions
-----------
Each transitive component of period ``P`` carries the eigenfunction
``f(a) = lam^phase(block of a at 0)`` with ``lam = exp(2 pi i / P)``, so
``f(sigma a) = lam f(a)``.

A *domain* (a region of a configuration agreeing with some point ``y`` of
the background) gets the coordinate of ``y`` relative to a reference point
``x0``: ``(t, z)`` with ``y = Phi^-t sigma^-z x0``. For a block at cell ``z``
with phase ``p`` in component ``C_i`` (the ``i``-th component along the CA
orbit) this is ``(-i, z - p + R_i)``, where ``R_i`` is the phase at 0 of
``Phi^i x0``. Coordinates live in ``Z^2 / K`` with
``K = Z(K, -S) + Z(0, P)`` when ``Phi^K`` acts as ``sigma^S``; when ``K = 1``
this group is identified with ``Z/P`` by ``(t, z) -> z + S t``.

The displacement between domains ``n`` and ``m`` is the difference of their
coordinates. For a single defect it is the right domain's coordinate minus
the left domain's, which gives a defect inserting ``d`` extra cells the
displacement ``d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd
from typing import Sequence

import numpy as np

from .ca import Ca1D, Ca2D, NotInvariant, component_image
from .subshift import (
    SoficSpec,
    UnsupportedStructure,
    WangSpec,
    check_alphabet,
    language,
    state_structure,
    torus_stabilizer,
    wang_periodic_points,
)
from .symbolic import Word


# --------------------------------------------------------------------------
# roots of unity


@dataclass(frozen=True, order=True)
class RootOfUnity:
    """``exp(2 pi i q / P)`` stored as the reduced fraction ``q/P`` in ``[0, 1)``."""

    frac: Fraction

    def __init__(self, q: int, order: int = 1):
        if order < 1:
            raise ValueError("order must be positive")
        object.__setattr__(self, "frac", Fraction(q % order, order))

    @property
    def q(self) -> int:
        return self.frac.numerator

    @property
    def order(self) -> int:
        return self.frac.denominator

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        s = self.frac + other.frac
        return RootOfUnity(s.numerator, s.denominator)

    def __truediv__(self, other: "RootOfUnity") -> "RootOfUnity":
        return self * other.inverse()

    def __pow__(self, n: int) -> "RootOfUnity":
        s = self.frac * n
        return RootOfUnity(s.numerator, s.denominator)

    def inverse(self) -> "RootOfUnity":
        return RootOfUnity(-self.q, self.order)

    def exponent(self, period: int) -> int:
        """``e`` with ``self = exp(2 pi i e / period)``; needs ``order | period``."""
        if period % self.order:
            raise ValueError(f"order {self.order} does not divide {period}")
        return self.q * (period // self.order)

    @property
    def value(self) -> complex:
        return complex(np.exp(2j * np.pi * float(self.frac)))

    def __str__(self) -> str:
        return "1" if self.q == 0 else f"exp(2pi i {self.q}/{self.order})"

    def to_json(self) -> dict:
        return {"q": self.q, "order": self.order}


# --------------------------------------------------------------------------
# displacement groups


def hermite_normal_form(rows: Sequence[Sequence[int]], dim: int) -> tuple:
    """Upper triangular basis with positive diagonal of a full-rank lattice.

    Entries above the diagonal are reduced into ``[0, diagonal)``.
    """
    work = [list(map(int, r)) for r in rows if any(r)]
    out = []
    for col in range(dim):
        while True:
            nz = [r for r in work if r[col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for j in range(dim):
                    r[j] -= q * piv[j]
            work = [r for r in work if any(r)]
        nz = [r for r in work if r[col] != 0]
        if not nz:
            raise ValueError("lattice is not of full rank")
        piv = nz[0]
        work.remove(piv)
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
    for i in range(dim):
        for j in range(i):
            q = out[j][i] // out[i][i]
            out[j] = [a - q * b for a, b in zip(out[j], out[i])]
    return tuple(tuple(r) for r in out)


@dataclass(frozen=True)
class DisplacementGroup:
    """Finite quotient ``Z^D / L`` with ``L`` given by its Hermite basis.

    ``kind`` is ``"cyclic"`` (``Z/P``), ``"spacetime"`` (``Z^2/K`` in
    ``(t, z)`` coordinates) or ``"lattice"`` (``Z^D / P``, spatial).
    """

    kind: str
    basis: tuple

    @classmethod
    def cyclic(cls, p: int) -> "DisplacementGroup":
        return cls("cyclic", ((int(p),),))

    @classmethod
    def spacetime(cls, k: int, s: int, p: int) -> "DisplacementGroup":
        """Kernel ``Z(k, -s) + Z(0, p)`` of ``(t, z) -> delta_(t;z)``."""
        return cls("spacetime", hermite_normal_form([(k, -s), (0, p)], 2))

    @classmethod
    def lattice(cls, generators: Sequence[Sequence[int]], dim: int = 2) -> "DisplacementGroup":
        return cls("lattice", hermite_normal_form(generators, dim))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def order(self) -> int:
        out = 1
        for i, r in enumerate(self.basis):
            out *= r[i]
        return out

    def reduce(self, v) -> tuple:
        v = [int(x) for x in (v if isinstance(v, (tuple, list)) else (v,))]
        if len(v) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(v)}")
        for i, row in enumerate(self.basis):
            q = v[i] // row[i]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return tuple(v)

    def element(self, *v) -> "Displacement":
        if len(v) == 1 and isinstance(v[0], (tuple, list)):
            v = tuple(v[0])
        return Displacement(self, self.reduce(v))

    @property
    def zero(self) -> "Displacement":
        return Displacement(self, (0,) * self.dim)

    def elements(self) -> list["Displacement"]:
        import itertools
        ranges = [range(r[i]) for i, r in enumerate(self.basis)]
        return [Displacement(self, tuple(v)) for v in itertools.product(*ranges)]

    @property
    def label(self) -> str:
        if self.kind == "cyclic":
            return f"Z/{self.basis[0][0]}"
        name = "K" if self.kind == "spacetime" else "P"
        return f"Z^{self.dim}/{name}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "label": self.label,
                "kernel_basis": [list(r) for r in self.basis], "order": self.order}


@dataclass(frozen=True)
class Displacement:
    """An element of a :class:`DisplacementGroup` (canonical representative)."""

    group: DisplacementGroup
    rep: tuple

    def _check(self, other: "Displacement") -> None:
        if self.group != other.group:
            raise ValueError("displacements from different groups")

    def __add__(self, other: "Displacement") -> "Displacement":
        self._check(other)
        return self.group.element(tuple(a + b for a, b in zip(self.rep, other.rep)))

    def __neg__(self) -> "Displacement":
        return self.group.element(tuple(-a for a in self.rep))

    def __sub__(self, other: "Displacement") -> "Displacement":
        return self + (-other)

    @property
    def is_identity(self) -> bool:
        return not any(self.rep)

    def to_json(self):
        return self.rep[0] if self.group.dim == 1 else list(self.rep)

    def __str__(self) -> str:
        if self.group.dim == 1:
            return f"{self.rep[0]} in {self.group.label}"
        return f"{tuple(self.rep)} + {self.group.label[self.group.label.index('/') + 1:]}"


# --------------------------------------------------------------------------
# phase structures


@dataclass(frozen=True, eq=False)
class PhaseStructure:
    """Rational spectrum data of one transitive component.

    ``rotation`` is ``r`` with ``f o Phi = lam^r f`` (the CA advances phases
    by ``r``), so ``tau(lam^q) = lam^(r q)``; ``None`` without a CA.
    """

    spec: object
    component: int
    period: int
    phases: dict
    rotation: int | None
    image: int | None
    radius: int

    @property
    def lam(self) -> RootOfUnity:
        return RootOfUnity(1, self.period)

    def spectrum(self) -> list[RootOfUnity]:
        return [RootOfUnity(q, self.period) for q in range(self.period)]

    def tau(self, x: RootOfUnity) -> RootOfUnity:
        if self.rotation is None:
            raise ValueError("no CA attached")
        return x ** self.rotation

    def to_json(self) -> dict:
        out = {"component": self.component, "P": self.period,
               "phases": {str(k): v for k, v in self.phases.items()}}
        if self.rotation is not None:
            out["rotation"] = self.rotation
            out["image"] = self.image
            out["tau"] = f"lam^q -> lam^{self.rotation}q"
        return out


def rational_spectrum(spec, ca: Ca1D | None = None) -> list[PhaseStructure]:
    """Phase structure of each transitive component of a 1D SFT/Markov shift."""
    st = state_structure(spec)
    names = st.markov.alphabet.symbols
    out = []
    for comp in st.decomposition:
        p = st.periods[comp.id]
        phases = {names[s]: int(st.phase_of_state[s]) for s in comp.states}
        rot = img = None
        if ca is not None:
            check_alphabet(spec, ca.alphabet)
            img, rot = component_image(ca, spec, comp.id)
            if st.periods[img] != p:
                raise NotInvariant("CA maps a component onto one of another period")
            rot %= p
        out.append(PhaseStructure(spec, comp.id, p, phases, rot, img, st.radius))
    return out


def eval_eigenfunction(ps: PhaseStructure, w: Word, start: int, z: int | None = None) -> RootOfUnity:
    """``f_z(a) = f(sigma^z a)`` from a window of ``a`` covering ``[start, start+len)``.

    ``z`` defaults to the window's middle cell.
    """
    st = state_structure(ps.spec)
    n = len(w)
    if z is None:
        z = start + n // 2
    i = z - start
    if i - st.radius < 0 or i + st.radius >= n:
        raise ValueError("window too short to identify the block at z")
    if not language(ps.spec).accepts(w.cells):
        raise ValueError("window is not admissible")
    s = int(st.states_at(np.array(w.cells[i - st.radius: i + st.radius + 1]))[0])
    if s < 0 or st.comp_of_state[s] != ps.component:
        raise ValueError("window not admissible in this component")
    return RootOfUnity(int(st.phase_of_state[s]), ps.period)


# --------------------------------------------------------------------------
# marker eigenfunction


@dataclass(frozen=True)
class MarkerTable:
    """Phase-revealing local patterns: ``(pattern, phase)`` pairs modulo ``period``."""

    period: int
    markers: tuple

    def coordinate(self, cells: Sequence[int], start: int) -> int | None:
        """Coordinate ``p - phase`` of the markers in the window, None if none occurs."""
        found = None
        cells = tuple(cells)
        for pat, ph in self.markers:
            m = len(pat)
            for i in range(len(cells) - m + 1):
                if cells[i:i + m] == pat:
                    c = (start + i - ph) % self.period
                    if found is not None and c != found:
                        raise ValueError("markers disagree on the phase")
                    found = c
        return found

    def eval(self, cells: Sequence[int], start: int) -> RootOfUnity | None:
        c = self.coordinate(cells, start)
        return None if c is None else RootOfUnity(-c, self.period)


def marker_table(spec) -> MarkerTable:
    if not isinstance(spec, SoficSpec) or not spec.markers:
        raise UnsupportedStructure("no marker table attached to this subshift")
    return MarkerTable(spec.marker_period, spec.markers)


def eval_marker_eigenfunction(spec: SoficSpec, w: Word, start: int) -> RootOfUnity | None:
    """Marker eigenfunction on a window covering ``[start, start+len)``.

    Returns None when no marker occurs (the window cannot decide the phase).
    """
    check_alphabet(spec, w.alphabet)
    if not language(spec).accepts(w.cells):
        raise ValueError("window is not admissible")
    return marker_table(spec).eval(w.cells, start)


# --------------------------------------------------------------------------
# domain coordinates


@dataclass(frozen=True)
class DomainFrame:
    """Coordinates of the domains belonging to one ``(Phi, sigma)``-orbit."""

    index: int
    components: tuple
    period: int
    offsets: tuple
    K: int
    S: int
    group: DisplacementGroup

    def coordinate(self, comp: int, phase: int, z: int) -> "Displacement":
        i = self.components.index(comp)
        if self.K == 1:
            return self.group.element(z - phase + self.offsets[i])
        return self.group.element(-i, z - phase + self.offsets[i])

    def to_json(self) -> dict:
        return {"components": list(self.components), "P": self.period, "K": self.K,
                "S": self.S, "group": self.group.to_json()}


@dataclass(frozen=True, eq=False)
class SpectralModel:
    """Background structure used to label domains of 1D configurations."""

    spec: object
    ca: Ca1D | None
    phase_structures: tuple
    frames: tuple
    frame_of: tuple
    markers: MarkerTable | None = None

    @property
    def is_marker(self) -> bool:
        return self.markers is not None

    @cached_property
    def structure(self):
        return state_structure(self.spec)

    def frame_for(self, comp: int) -> DomainFrame:
        return self.frames[self.frame_of[comp]]

    def to_json(self) -> dict:
        out: dict = {"subshift": getattr(self.spec, "name", "")}
        if self.markers is not None:
            out["marker"] = {"period": self.markers.period}
        out["components"] = [ps.to_json() for ps in self.phase_structures]
        out["frames"] = [f.to_json() for f in self.frames]
        return out


def _frames_from_images(periods, images, rotations) -> tuple[tuple, tuple]:
    n = len(periods)
    if sorted(images) != list(range(n)):
        raise NotInvariant("CA does not permute the transitive components")
    frames, frame_of = [], [0] * n
    seen: set = set()
    for c0 in range(n):
        if c0 in seen:
            continue
        orb, offs = [c0], [0]
        seen.add(c0)
        p = periods[c0]
        while images[orb[-1]] != c0:
            nxt = images[orb[-1]]
            offs.append((offs[-1] + rotations[orb[-1]]) % p)
            orb.append(nxt)
            seen.add(nxt)
        s = (offs[-1] + rotations[orb[-1]]) % p
        k = len(orb)
        group = DisplacementGroup.cyclic(p) if k == 1 else DisplacementGroup.spacetime(k, s, p)
        idx = len(frames)
        frames.append(DomainFrame(idx, tuple(orb), p, tuple(offs), k, s, group))
        for c in orb:
            frame_of[c] = idx
    return tuple(frames), tuple(frame_of)


@lru_cache(maxsize=None)
def spectral_model(spec, ca: Ca1D | None = None) -> SpectralModel:
    """Build the domain-labelling model of a 1D subshift (optionally with a CA)."""
    if isinstance(spec, SoficSpec):
        table = marker_table(spec)
        frame = DomainFrame(0, (0,), table.period, (0,), 1, 0, DisplacementGroup.cyclic(table.period))
        return SpectralModel(spec, ca, (), (frame,), (0,), table)
    if isinstance(spec, WangSpec):
        raise UnsupportedStructure("use lattice_model for 2D subshifts")
    pss = rational_spectrum(spec, ca)
    periods = [ps.period for ps in pss]
    if ca is None:
        images = list(range(len(pss)))
        rots = [0] * len(pss)
    else:
        images = [ps.image for ps in pss]
        rots = [ps.rotation for ps in pss]
    frames, frame_of = _frames_from_images(periods, images, rots)
    return SpectralModel(spec, ca, tuple(pss), frames, frame_of)


def displacement_group(spec, ca: Ca1D | Ca2D | None = None, component: int = 0) -> DisplacementGroup:
    """Displacement group of the orbit containing ``component``."""
    if isinstance(spec, WangSpec):
        return lattice_model(spec).components[component].group
    model = spectral_model(spec, ca)
    return model.frame_for(component).group


# --------------------------------------------------------------------------
# 2D periodic components


@dataclass(frozen=True, eq=False)
class LatticeComponent:
    """A finite sigma-orbit of a fully periodic 2D point."""

    id: int
    reference: np.ndarray = field(repr=False)
    group: DisplacementGroup

    def coordinate(self, patch: np.ndarray, x: int, y: int, rho: int) -> Displacement | None:
        """Coordinate ``z - p`` of a ``(2 rho + 1)``-square patch centered at ``(x, y)``.

        ``p`` is a position of the reference point showing the same patch.
        """
        ref = self.reference
        q, p = ref.shape
        for py in range(q):
            for px in range(p):
                ys = np.arange(py - rho, py + rho + 1) % q
                xs = np.arange(px - rho, px + rho + 1) % p
                if np.array_equal(ref[np.ix_(ys, xs)], patch):
                    return self.group.element(x - px, y - py)
        return None


@dataclass(frozen=True, eq=False)
class LatticeModel:
    spec: WangSpec
    components: tuple
    rho: int = 1

    def locate(self, patch: np.ndarray, x: int, y: int) -> tuple[int, Displacement] | None:
        for comp in self.components:
            c = comp.coordinate(patch, x, y, self.rho)
            if c is not None:
                return comp.id, c
        return None

    def to_json(self) -> dict:
        return {"subshift": self.spec.name,
                "components": [{"id": c.id, "reference": c.reference.tolist(),
                                "group": c.group.to_json()} for c in self.components]}


@lru_cache(maxsize=None)
def lattice_model(spec: WangSpec, max_period: int = 4) -> LatticeModel:
    """Components of a 2D edge-matching SFT found among small-period points."""
    pts = wang_periodic_points(spec, max_period)
    comps: list = []
    for arr in pts:
        if any(_is_translate(arr, c) for c in comps):
            continue
        comps.append(arr)
    out = []
    for i, ref in enumerate(comps):
        group = DisplacementGroup.lattice(torus_stabilizer(ref), 2)
        out.append(LatticeComponent(i, ref, group))
    return LatticeModel(spec, tuple(out))


def _is_translate(a: np.ndarray, b: np.ndarray) -> bool:
    q = a.shape[0] * b.shape[0] // gcd(a.shape[0], b.shape[0])
    p = a.shape[1] * b.shape[1] // gcd(a.shape[1], b.shape[1])
    ta = np.tile(a, (q // a.shape[0], p // a.shape[1]))
    tb = np.tile(b, (q // b.shape[0], p // b.shape[1]))
    return any(np.array_equal(np.roll(ta, (dy, dx), axis=(0, 1)), tb)
               for dy in range(q) for dx in range(p))
