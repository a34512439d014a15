"""Cellular automata: rules, application, and finite certificates.

A 1D rule of radius ``R`` is a lookup table indexed by the base-``k`` code of
the neighbourhood ``(a[z-R], ..., a[z+R])`` with the leftmost cell most
significant. For elementary rules this is Wolfram numbering: the output on
``(a, b, c)`` is bit ``4a + 2b + c`` of the rule number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .subshift import (
    SftSpec,
    MarkovSpec,
    Spec1D,
    SubshiftError,
    UnsupportedStructure,
    check_alphabet,
    language,
    spec_radius,
    state_structure,
)
from .symbolic import BINARY, Alphabet, AlphabetError, CyclicConfig, EpConfig, Grid2D, Word


class NotInvariant(SubshiftError):
    """The CA does not map the subshift (or a component of it) into itself."""


@dataclass(frozen=True, eq=False)
class Ca1D:
    """1D cellular automaton with a total local rule table."""

    alphabet: Alphabet
    radius: int
    table: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self):
        t = np.array(self.table, dtype=np.int64).ravel()
        k = self.alphabet.size
        if self.radius < 0:
            raise ValueError("radius must be >= 0")
        if t.size != k ** (2 * self.radius + 1):
            raise ValueError(f"rule table needs {k ** (2 * self.radius + 1)} entries, got {t.size}")
        if t.size and (t.min() < 0 or t.max() >= k):
            raise AlphabetError("rule output outside the alphabet")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def width(self) -> int:
        return 2 * self.radius + 1

    def local(self, neigh: Sequence[int]) -> int:
        code = 0
        for x in neigh:
            code = code * self.alphabet.size + int(x)
        return int(self.table[code])

    def image(self, cells: np.ndarray) -> np.ndarray:
        """Block map: ``n`` cells to the ``n - 2R`` cells they determine."""
        cells = np.asarray(cells, dtype=np.int64)
        k, m = self.alphabet.size, self.width
        n = len(cells) - m + 1
        if n <= 0:
            return np.zeros(0, dtype=np.int64)
        code = np.zeros(n, dtype=np.int64)
        for j in range(m):
            code = code * k + cells[j:j + n]
        return self.table[code]

    def image_cyclic(self, cells: np.ndarray) -> np.ndarray:
        cells = np.asarray(cells, dtype=np.int64)
        n, r = len(cells), self.radius
        return self.image(cells[np.arange(-r, n + r) % n])

    def to_json(self) -> dict:
        if self.name.startswith("eca") and self.name[3:].isdigit():
            return {"type": "eca", "number": int(self.name[3:])}
        return {"type": "table1d", "alphabet": list(self.alphabet.symbols),
                "radius": self.radius, "table": self.table.tolist()}


def from_eca_number(n: int) -> Ca1D:
    """Elementary CA with Wolfram numbering."""
    if not 0 <= n <= 255:
        raise ValueError(f"ECA number {n} out of range 0..255")
    return Ca1D(BINARY, 1, [(n >> i) & 1 for i in range(8)], f"eca{n}")


def identity_ca(alphabet: Alphabet) -> Ca1D:
    return Ca1D(alphabet, 0, list(range(alphabet.size)), "identity")


def apply(ca: Ca1D, c: EpConfig) -> EpConfig:
    """Exact image of an eventually periodic configuration."""
    if ca.alphabet != c.alphabet:
        raise AlphabetError("alphabet mismatch between rule and configuration")
    r = ca.radius
    pl, pr = len(c.left), len(c.right)
    a, e = c.anchor, c.end
    lo = a - r - pl
    hi = e + r + pr - 1
    img = ca.image(c.cells(lo - r, hi + r))
    # img[i] is the image cell at coordinate lo + i
    left = img[:pl]
    center = img[pl: pl + (e + r) - (a - r)]
    right = img[pl + (e + r) - (a - r):]
    k = c.alphabet
    out = EpConfig(Word(k, tuple(left.tolist())), Word(k, tuple(center.tolist())),
                   Word(k, tuple(right.tolist())), a - r)
    return out.normalized()


def apply_cyclic(ca: Ca1D, c: CyclicConfig) -> CyclicConfig:
    if ca.alphabet != c.alphabet:
        raise AlphabetError("alphabet mismatch between rule and configuration")
    return CyclicConfig.from_array(c.alphabet, ca.image_cyclic(c.array()))


def iterate(ca: Ca1D, c: EpConfig, t: int) -> EpConfig:
    for _ in range(t):
        c = apply(ca, c)
    return c


# --------------------------------------------------------------------------
# 2D rules

MOORE = tuple((dx, dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1))


@dataclass(frozen=True, eq=False)
class Ca2D:
    """2D CA on a finite neighbourhood of ``(dx, dy)`` offsets (y upward).

    ``kind`` is ``"table"`` (``table`` maps neighbourhood tuples in
    ``neighborhood`` order to outputs), ``"voter"`` or ``"antiferro"``. The
    named rules use ``black`` and ``white`` symbol indices.
    """

    alphabet: Alphabet
    neighborhood: tuple
    kind: str
    theta: Fraction = Fraction(1, 2)
    table: dict = field(default_factory=dict, repr=False)
    black: int = 0
    white: int = 1
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "neighborhood", tuple((int(dx), int(dy)) for dx, dy in self.neighborhood))
        object.__setattr__(self, "theta", Fraction(self.theta).limit_denominator(10 ** 9))
        if self.kind not in ("table", "voter", "antiferro"):
            raise ValueError(f"unknown 2D rule kind {self.kind!r}")
        if self.kind == "table":
            k, n = self.alphabet.size, len(self.neighborhood)
            if len(self.table) != k ** n:
                raise ValueError("2D rule table is not total")

    @property
    def radius(self) -> int:
        return max(max(abs(dx), abs(dy)) for dx, dy in self.neighborhood)

    def _shifted(self, arr: np.ndarray, dx: int, dy: int) -> np.ndarray:
        # value at (x+dx, y+dy) placed at (x, y)
        return np.roll(arr, (-dy, -dx), axis=(0, 1))

    def image(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.int64)
        nb = [self._shifted(arr, dx, dy) for dx, dy in self.neighborhood]
        if self.kind == "table":
            k = self.alphabet.size
            out = np.empty_like(arr)
            code = np.zeros_like(arr)
            for v in nb:
                code = code * k + v
            lut = np.zeros(k ** len(nb), dtype=np.int64)
            for key, val in self.table.items():
                c = 0
                for x in key:
                    c = c * k + x
                lut[c] = val
            out[...] = lut[code]
            return out
        if self.kind == "voter":
            count = sum((v == self.white).astype(np.int64) for v in nb)
            # N < theta  <=>  count * den < num * |H|
            low = count * self.theta.denominator < self.theta.numerator * len(nb)
            return np.where(low, self.black, self.white)
        n0 = np.zeros_like(arr)
        n1 = np.zeros_like(arr)
        for (dx, dy), v in zip(self.neighborhood, nb):
            w = (v == self.white).astype(np.int64)
            if (dx + dy) % 2 == 0:
                n0 += w
            else:
                n1 += w
        return np.where(n0 - n1 < 0, self.black, self.white)

    def to_json(self) -> dict:
        out = {"type": self.kind, "alphabet": list(self.alphabet.symbols),
               "neighborhood": [list(h) for h in self.neighborhood]}
        if self.kind == "voter":
            out["theta"] = str(self.theta)
        if self.kind == "table":
            out["table"] = [[list(k), v] for k, v in sorted(self.table.items())]
        return out


def apply_grid(ca: Ca2D, g: Grid2D, boundary: str = "periodic") -> Grid2D:
    """One step on a torus. Only periodic boundaries are supported."""
    if ca.alphabet != g.alphabet:
        raise AlphabetError("alphabet mismatch between rule and grid")
    if boundary != "periodic":
        raise ValueError("apply_grid supports periodic boundaries only")
    return Grid2D(g.alphabet, ca.image(g.cells))


# --------------------------------------------------------------------------
# finite certificates


@dataclass(frozen=True)
class InvarianceCertificate:
    invariant: bool
    r: int
    checked: int
    witness: Word | None = None
    image: Word | None = None

    def to_json(self) -> dict:
        out = {"invariant": self.invariant, "r": self.r, "blocks_checked": self.checked}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
            out["witness_image"] = self.image.to_json()
        return out

    def __bool__(self) -> bool:
        return self.invariant


def _check_1d(ca: Ca1D, spec: Spec1D) -> None:
    if not isinstance(spec, (SftSpec, MarkovSpec)) and not hasattr(spec, "edges"):
        raise UnsupportedStructure("1D subshift required")
    check_alphabet(spec, ca.alphabet)


def verify_weak_invariance(ca: Ca1D, spec: Spec1D, r: int | None = None) -> InvarianceCertificate:
    """Check ``Phi(A_(r+R))`` is inside ``A_(r)`` by enumerating blocks."""
    _check_1d(ca, spec)
    r = spec_radius(spec) if r is None else r
    if r < spec_radius(spec):
        raise ValueError("r must be at least the subshift radius")
    lang = language(spec)
    words = lang.words(2 * (r + ca.radius) + 1)
    for w in words:
        img = ca.image(np.array(w))
        if not lang.accepts(img.tolist()):
            return InvarianceCertificate(False, r, len(words), Word(ca.alphabet, w),
                                         Word(ca.alphabet, tuple(img.tolist())))
    return InvarianceCertificate(True, r, len(words))


def check_block_injectivity(ca: Ca1D, spec: Spec1D, r: int) -> bool:
    """True iff the block map ``A_(r+R) -> A_(r)`` is injective."""
    _check_1d(ca, spec)
    seen: dict = {}
    for w in language(spec).words(2 * (r + ca.radius) + 1):
        key = tuple(ca.image(np.array(w)).tolist())
        if key in seen:
            return False
        seen[key] = w
    return True


@dataclass(frozen=True)
class RestrictionAction:
    """How a CA acts on the transitive components of an invariant subshift.

    ``perm[i]`` is the image component of component ``i``. ``step_shift[i]``
    is ``s`` with ``Phi(x_i) = sigma^s(x_perm[i])`` for the reference point
    ``x_i`` of each component (least state at coordinate 0). ``orbits`` lists
    the cycles of ``perm``; ``orbit_shift[i]`` is ``S`` with
    ``Phi^K = sigma^S`` on component ``i`` (``K`` its orbit length).
    """

    perm: tuple
    step_shift: tuple
    periods: tuple
    orbits: tuple
    orbit_shift: tuple

    def to_json(self) -> dict:
        return {"perm": list(self.perm), "step_shift": list(self.step_shift),
                "orbits": [list(o) for o in self.orbits], "orbit_shift": list(self.orbit_shift)}


def _cycle_of(comp) -> list[int] | None:
    """The component's states in cycle order if it is a single simple cycle."""
    succ: dict = {}
    for a, b in comp.edges:
        if a in succ:
            return None
        succ[a] = b
    if len(succ) != len(comp.states):
        return None
    cyc = [comp.states[0]]
    while True:
        nxt = succ[cyc[-1]]
        if nxt == cyc[0]:
            break
        cyc.append(nxt)
    return cyc if len(cyc) == len(comp.states) else None


def _some_cycle(comp) -> list[int]:
    """A shortest cycle through the least state of a component."""
    adj: dict = {s: [] for s in comp.states}
    for a, b in comp.edges:
        adj[a].append(b)
    root = comp.states[0]
    prev = {root: None}
    queue = [root]
    for u in queue:
        for v in adj[u]:
            if v == root:
                path = [u]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            if v not in prev:
                prev[v] = u
                queue.append(v)
    raise SubshiftError("component has no cycle")


def component_image(ca: Ca1D, spec: Spec1D, comp_id: int) -> tuple[int, int]:
    """Image component and phase rotation of ``Phi`` on one component.

    Evaluated on a periodic point through the component's least state placed
    at coordinate 0 (so its phase there is 0).
    """
    st = state_structure(spec)
    comp = st.decomposition[comp_id]
    cyc = _some_cycle(comp)
    cells = np.array([st.center_symbol(s) for s in cyc], dtype=np.int64)
    n = len(cells)
    img = ca.image_cyclic(cells)
    rad = st.radius
    ext = img[np.arange(-rad, n + rad) % n]
    states = st.states_at(ext)
    comps = st.comp_of_state[states] if np.all(states >= 0) else None
    if comps is None or np.any(comps < 0) or len(set(comps.tolist())) != 1:
        raise NotInvariant(f"image of component {comp_id} is not inside one component")
    target = int(comps[0])
    return target, int(st.phase_of_state[states[0]])


def restriction_action(ca: Ca1D, spec: Spec1D) -> RestrictionAction:
    """Component permutation and shift exponents, for finite-orbit components."""
    check_alphabet(spec, ca.alphabet)
    st = state_structure(spec)
    comps = st.decomposition.components
    for c in comps:
        if _cycle_of(c) is None:
            raise UnsupportedStructure(f"component {c.id} is not a finite sigma-orbit")
    perm, shifts = [], []
    for c in comps:
        target, s = component_image(ca, spec, c.id)
        if st.periods[target] != st.periods[c.id]:
            raise NotInvariant("component periods differ under the CA")
        perm.append(target)
        shifts.append(s)
    if sorted(perm) != list(range(len(comps))):
        raise NotInvariant("CA does not permute the components")
    orbits, orbit_shift = _orbits(perm, shifts, st.periods)
    return RestrictionAction(tuple(perm), tuple(shifts), st.periods, orbits, orbit_shift)


def _orbits(perm, shifts, periods):
    seen: set = set()
    orbits = []
    total = [0] * len(perm)
    for i in range(len(perm)):
        if i in seen:
            continue
        orb = [i]
        seen.add(i)
        while perm[orb[-1]] != i:
            orb.append(perm[orb[-1]])
            seen.add(orb[-1])
        orbits.append(tuple(orb))
        s = sum(shifts[j] for j in orb) % periods[i]
        for j in orb:
            total[j] = s
    return tuple(orbits), tuple(total)


# --------------------------------------------------------------------------
# JSON


def rule_from_json(obj: dict) -> Ca1D | Ca2D:
    kind = obj.get("type")
    if kind == "eca":
        return from_eca_number(int(obj["number"]))
    alphabet = Alphabet.of(obj.get("alphabet", ("0", "1")))
    if kind == "table1d":
        return Ca1D(alphabet, int(obj["radius"]), obj["table"], str(obj.get("name", "")))
    if kind == "identity":
        return identity_ca(alphabet)
    if kind in ("voter", "antiferro", "table2d"):
        nb = tuple(tuple(h) for h in obj.get("neighborhood", MOORE))
        black = alphabet.index(obj.get("black", alphabet.symbols[0]))
        white = alphabet.index(obj.get("white", alphabet.symbols[-1]))
        if kind == "table2d":
            table = {tuple(k): int(v) for k, v in obj["table"]}
            return Ca2D(alphabet, nb, "table", table=table, name=str(obj.get("name", "")))
        theta = Fraction(str(obj.get("theta", "1/2")))
        return Ca2D(alphabet, nb, kind, theta=theta, black=black, white=white,
                    name=str(obj.get("name", kind)))
    raise ValueError(f"unknown rule type {kind!r}")
