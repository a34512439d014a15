"""Defect fields, domain decompositions and defect classification.

The defect field is ``F(z) = max{r : a[z-r .. z+r] is admissible}``
(``-1`` when even ``a[z]`` is forbidden). Its local minima form the defect
set, and the connected components of ``X_r = {z : F(z) >= r}`` are the
domains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ca import Ca1D, Ca2D
from .spectral import (
    Displacement,
    DisplacementGroup,
    PhaseStructure,
    RootOfUnity,
    eval_eigenfunction,
    lattice_model,
    spectral_model,
)
from .subshift import (
    SubshiftError,
    UnsupportedStructure,
    WangSpec,
    block_checker,
    check_alphabet,
    language,
    presentation,
    spec_radius,
    state_structure,
    wang_bond_violations,
    wang_patch_admissible,
)
from .symbolic import CyclicConfig, EpConfig, Grid2D, Word

INF = np.iinfo(np.int64).max
"""Sentinel for an infinite defect field value."""


class InadmissibleTails(SubshiftError):
    """A tail of an eventually periodic configuration is not a point of the subshift."""


# --------------------------------------------------------------------------
# admissibility of eventually periodic points


def periodic_point_admissible(spec, word: Sequence[int]) -> bool:
    """True iff the periodic point ``word^inf`` lies in the subshift."""
    lang = language(spec)
    mask = lang.full
    while True:
        nxt = lang.run(word, mask)
        if nxt == mask or not nxt:
            return bool(nxt)
        mask = nxt


def tails_admissible(c: EpConfig, spec) -> bool:
    return periodic_point_admissible(spec, c.left.cells) and periodic_point_admissible(spec, c.right.cells)


def left_context(c: EpConfig, spec) -> int:
    """Presentation vertices where a left-infinite path reading the left tail can end."""
    lang = language(spec)
    mask = lang.full
    while True:
        nxt = lang.run(c.left.cells, mask) & mask
        if nxt == mask:
            return mask
        mask = nxt


def right_context(c: EpConfig, spec) -> int:
    """Presentation vertices from which a right-infinite path reads the right tail."""
    lang = language(spec)
    mask = lang.full
    rev = c.right.cells[::-1]
    while True:
        nxt = mask
        m = mask
        for sym in rev:
            m = lang.back(m, sym)
            if not m:
                break
        nxt = m & mask
        if nxt == mask:
            return mask
        mask = nxt


def is_point_admissible(c: EpConfig, spec) -> bool:
    """Exact membership of an eventually periodic configuration."""
    check_alphabet(spec, c.alphabet)
    lang = language(spec)
    mask = left_context(c, spec)
    if not mask:
        return False
    mask = lang.run(c.center.cells, mask)
    seen = set()
    while mask and mask not in seen:
        seen.add(mask)
        mask = lang.run(c.right.cells, mask)
    return bool(mask)


# --------------------------------------------------------------------------
# defect field


@dataclass(frozen=True, eq=False)
class DefectField:
    """Defect field values on a window.

    1D: ``values[i]`` is ``F(lo + i)``. 2D: ``values[y, x]``. ``INF`` marks
    certified infinite values; ``capped`` marks values limited by the finite
    window or torus (the true value is at least the stored one).
    """

    lo: int
    values: np.ndarray = field(repr=False)
    capped: np.ndarray = field(repr=False)
    periodic: bool = False

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    def __getitem__(self, z: int) -> int:
        return int(self.values[z - self.lo])

    def coords(self) -> np.ndarray:
        return np.arange(self.lo, self.lo + len(self.values))

    def finite_values(self) -> np.ndarray:
        return self.values[self.values != INF]

    def to_json(self) -> dict:
        vals = [("inf" if v == INF else (f">={v}" if cap else int(v)))
                for v, cap in zip(self.values.ravel().tolist(), self.capped.ravel().tolist())]
        if self.ndim == 2:
            w = self.values.shape[1]
            vals = [vals[i:i + w] for i in range(0, len(vals), w)]
        return {"lo": self.lo, "values": vals}


class _Window1D:
    """Growable cell buffer with an admissibility oracle for windows."""

    def __init__(self, reader, spec, lo: int, hi: int, cyclic_n: int | None = None):
        self.reader = reader
        self.spec = spec
        self.lang = language(spec)
        self.checker = block_checker(spec)
        self.cyclic_n = cyclic_n
        self._load(lo, hi)

    def _load(self, lo: int, hi: int) -> None:
        self.lo, self.hi = lo, hi
        self.cells = self.reader(lo, hi)
        if self.checker is not None:
            bad = self.checker.bad_starts(self.cells).astype(np.int64)
            self.bad_prefix = np.concatenate([[0], np.cumsum(bad)])

    def ensure(self, lo: int, hi: int) -> None:
        if lo < self.lo or hi > self.hi:
            span = max(self.hi - self.lo, hi - lo, 16)
            self._load(min(lo, self.lo) - span, max(hi, self.hi) + span)

    def admissible(self, a: int, b: int) -> bool:
        """Is the word on ``[a, b]`` admissible."""
        self.ensure(a, b)
        i, j = a - self.lo, b - self.lo
        m = self.checker.m if self.checker is not None else None
        if m is not None and j - i + 1 >= m:
            return self.bad_prefix[j - m + 2] - self.bad_prefix[i] == 0
        return self.lang.accepts(self.cells[i:j + 1].tolist())


def _field_scan(win: _Window1D, zs: Sequence[int], cap: int | None) -> tuple[np.ndarray, np.ndarray]:
    vals = np.empty(len(zs), dtype=np.int64)
    capped = np.zeros(len(zs), dtype=bool)
    prev = None
    for idx, z in enumerate(zs):
        if prev is None:
            r = -1
            while (cap is None or r + 1 <= cap) and win.admissible(z - r - 1, z + r + 1):
                r += 1
        else:
            # Lipschitz: F(z) >= F(z-1) - 1
            r = max(prev - 1, -1)
            while (cap is None or r + 1 <= cap) and win.admissible(z - r - 1, z + r + 1):
                r += 1
        vals[idx] = r
        capped[idx] = cap is not None and r >= cap
        prev = r
    return vals, capped


def defect_field(c, spec, window: tuple[int, int] | None = None, r_max: int | None = None,
                 boundary: str = "open") -> DefectField:
    """Defect field of a configuration on a window.

    EpConfig values are exact: ``INF`` everywhere when the configuration is
    admissible, otherwise finite values computed without a radius bound
    (``r_max`` caps them if given). CyclicConfig values are capped at
    ``(N-1)//2``; Grid2D values at the distance to the edge (``"open"``) or
    half the torus size (``"periodic"``).
    """
    if isinstance(c, Grid2D):
        return _grid_field(c, spec, boundary, r_max)
    check_alphabet(spec, c.alphabet)
    if isinstance(c, EpConfig):
        lo, hi = window if window is not None else _default_window(c, spec)
        if lo > hi:
            raise ValueError("window needs lo <= hi")
        n = hi - lo + 1
        if not tails_admissible(c, spec):
            raise InadmissibleTails("configuration tails are not admissible")
        if is_point_admissible(c, spec):
            return DefectField(lo, np.full(n, INF, dtype=np.int64), np.zeros(n, dtype=bool))
        win = _Window1D(c.cells, spec, lo - 16, hi + 16)
        vals, capped = _field_scan(win, range(lo, hi + 1), r_max)
        return DefectField(lo, vals, capped)
    if isinstance(c, CyclicConfig):
        n = c.length
        cap = (n - 1) // 2 if r_max is None else min(r_max, (n - 1) // 2)
        win = _Window1D(c.cells, spec, -n, 2 * n)
        vals, capped = _field_scan(win, range(n), cap)
        return DefectField(0, vals, capped, periodic=True)
    raise TypeError(f"unsupported configuration type {type(c).__name__}")


def _default_window(c: EpConfig, spec) -> tuple[int, int]:
    pad = 2 * max(len(c.left), len(c.right)) + 2 * spec_radius(spec) + 6
    return c.anchor - pad, c.end + pad - 1


def _grid_field(g: Grid2D, spec: WangSpec, boundary: str, r_max: int | None) -> DefectField:
    if not isinstance(spec, WangSpec):
        raise UnsupportedStructure("2D configurations need a Wang subshift")
    check_alphabet(spec, g.alphabet)
    periodic = boundary == "periodic"
    h, w = g.height, g.width
    cells = g.cells
    hbad, vbad = wang_bond_violations(spec, cells, periodic)
    if periodic:
        big = np.tile(cells, (3, 3))
        hb = np.tile(hbad, (3, 3))
        vb = np.tile(vbad, (3, 3))
        off_y, off_x = h, w
    else:
        big, hb, vb = cells, hbad, vbad
        off_y = off_x = 0
    hp = np.pad(np.cumsum(np.cumsum(hb, 0), 1), ((1, 0), (1, 0)))
    vp = np.pad(np.cumsum(np.cumsum(vb, 0), 1), ((1, 0), (1, 0)))

    def rect(p, y0, y1, x0, x1):
        if y1 < y0 or x1 < x0:
            return 0
        return p[y1 + 1, x1 + 1] - p[y0, x1 + 1] - p[y1 + 1, x0] + p[y0, x0]

    cache: dict = {}

    def ok(y, x, r):
        Y, X = y + off_y, x + off_x
        if rect(hp, Y - r, Y + r, X - r, X + r - 1) or rect(vp, Y - r, Y + r - 1, X - r, X + r):
            return False
        patch = big[Y - r:Y + r + 1, X - r:X + r + 1]
        key = (r, patch.tobytes())
        res = cache.get(key)
        if res is None:
            res = cache[key] = wang_patch_admissible(spec, patch)
        return res

    vals = np.zeros((h, w), dtype=np.int64)
    capped = np.zeros((h, w), dtype=bool)
    for y in range(h):
        prev = None
        for x in range(w):
            if periodic:
                cap = (min(h, w) - 1) // 2
            else:
                cap = min(x, y, w - 1 - x, h - 1 - y)
            if r_max is not None:
                cap = min(cap, r_max)
            r = -1 if prev is None else min(max(prev - 1, -1), cap)
            while r + 1 <= cap and ok(y, x, r + 1):
                r += 1
            vals[y, x] = r
            capped[y, x] = r >= cap
            prev = r
    return DefectField(0, vals, capped, periodic=periodic)


def defect_set(f: DefectField) -> list:
    """Local minima of the field (plateaus included), ignoring infinite and capped cells."""
    v = f.values
    live = (v != INF) & ~f.capped
    if f.ndim == 1:
        n = len(v)
        out = []
        for i in range(n):
            if not live[i]:
                continue
            nbrs = []
            for j in (i - 1, i + 1):
                if f.periodic:
                    nbrs.append(v[j % n])
                elif 0 <= j < n:
                    nbrs.append(v[j])
            if all(v[i] <= x for x in nbrs):
                out.append(f.lo + i)
        return out
    h, w = v.shape
    out = []
    for y in range(h):
        for x in range(w):
            if not live[y, x]:
                continue
            good = True
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                xx, yy = x + dx, y + dy
                if f.periodic:
                    xx, yy = xx % w, yy % h
                elif not (0 <= xx < w and 0 <= yy < h):
                    continue
                if v[yy, xx] < v[y, x]:
                    good = False
                    break
            if good:
                out.append((x, y))
    return out


# --------------------------------------------------------------------------
# domains


@dataclass
class Domain:
    """One connected component of ``X_r``.

    1D extents are ``[lo, hi]`` with ``None`` for an unbounded side. 2D
    domains list their cells.
    """

    index: int
    lo: int | None = None
    hi: int | None = None
    cells: list | None = None
    projective: bool = False
    heuristic: bool = False
    component: int | None = None
    frame: int | None = None
    coordinate: Displacement | None = None
    base: int | tuple | None = None

    def to_json(self) -> dict:
        out: dict = {"index": self.index}
        if self.cells is None:
            out["lo"] = "-inf" if self.lo is None else self.lo
            out["hi"] = "inf" if self.hi is None else self.hi
        else:
            out["size"] = len(self.cells)
        out["projective"] = self.projective
        if self.heuristic:
            out["projective_heuristic"] = True
        out["component"] = self.component
        out["coordinate"] = None if self.coordinate is None else self.coordinate.to_json()
        return out


@dataclass
class DomainDecomposition:
    r: int
    domains: list
    field: DefectField

    @property
    def projective(self) -> list:
        return [d for d in self.domains if d.projective]

    def __len__(self) -> int:
        return len(self.domains)

    def to_json(self) -> dict:
        return {"r": self.r, "domains": [d.to_json() for d in self.domains]}


def _check_r(spec, r: int | None) -> int:
    r0 = spec_radius(spec) + 1
    if r is None:
        return r0
    if r < r0:
        raise ValueError(f"r must be at least the subshift radius + 1 = {r0}")
    return r


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    out = []
    i, n = 0, len(mask)
    while i < n:
        if mask[i]:
            j = i
            while j + 1 < n and mask[j + 1]:
                j += 1
            out.append((i, j))
            i = j + 1
        else:
            i += 1
    return out


def domain_components(c, spec, r: int | None = None, boundary: str = "open",
                      pad: int | None = None) -> DomainDecomposition:
    """Connected components of ``X_r`` with projectivity flags."""
    r = _check_r(spec, r)
    if isinstance(c, Grid2D):
        return _grid_components(c, spec, r, boundary)
    if isinstance(c, CyclicConfig):
        f = defect_field(c, spec)
        mask = f.values >= r
        n = len(mask)
        if mask.all():
            return _whole_torus_decomposition(r, f)
        # rotate so a defective cell comes first, then runs do not wrap
        start = int(np.argmin(mask))
        rolled = np.roll(mask, -start)
        doms = []
        for i, j in _runs(rolled):
            lo = start + i
            hi = start + j
            big = f.values[np.arange(lo, hi + 1) % n]
            proj = bool(np.any(big >= 2 * r) or np.any(f.capped[np.arange(lo, hi + 1) % n]))
            doms.append(Domain(len(doms), lo, hi, projective=proj, heuristic=True))
        return DomainDecomposition(r, doms, f)
    if not isinstance(c, EpConfig):
        raise TypeError(f"unsupported configuration type {type(c).__name__}")
    if not tails_admissible(c, spec):
        raise InadmissibleTails("configuration tails are not admissible")
    extra = pad if pad is not None else 2 * max(len(c.left), len(c.right)) + 4 * spec_radius(spec) + 8
    lo = c.anchor - r - 1 - extra
    hi = c.end + r + extra
    f = defect_field(c, spec, (lo, hi))
    mask = f.values >= r
    doms = []
    runs = _runs(mask)
    for i, j in runs:
        a = None if i == 0 else lo + i
        b = None if j == len(mask) - 1 else lo + j
        doms.append(Domain(len(doms), a, b, projective=(a is None or b is None)))
    return DomainDecomposition(r, doms, f)


def _whole_torus_decomposition(r: int, f: DefectField) -> DomainDecomposition:
    return DomainDecomposition(r, [Domain(0, None, None, projective=True)], f)


def _grid_components(g: Grid2D, spec, r: int, boundary: str) -> DomainDecomposition:
    f = defect_field(g, spec, boundary=boundary)
    mask = f.values >= r
    h, w = mask.shape
    label = -np.ones((h, w), dtype=np.int64)
    doms = []
    periodic = boundary == "periodic"
    for y0 in range(h):
        for x0 in range(w):
            if not mask[y0, x0] or label[y0, x0] >= 0:
                continue
            idx = len(doms)
            stack = [(x0, y0)]
            label[y0, x0] = idx
            cells = []
            while stack:
                x, y = stack.pop()
                cells.append((x, y))
                for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    xx, yy = x + dx, y + dy
                    if periodic:
                        xx, yy = xx % w, yy % h
                    elif not (0 <= xx < w and 0 <= yy < h):
                        continue
                    if mask[yy, xx] and label[yy, xx] < 0:
                        label[yy, xx] = idx
                        stack.append((xx, yy))
            cells.sort(key=lambda p: (p[1], p[0]))
            proj = any(f.capped[y, x] or f.values[y, x] >= 2 * r for x, y in cells)
            if periodic:
                # a band winding around the torus counts as unbounded
                proj = proj or len({x for x, _ in cells}) == w or len({y for _, y in cells}) == h
            doms.append(Domain(idx, cells=cells, projective=proj, heuristic=True))
    # order north to south, then west to east
    doms.sort(key=lambda d: (-max(y for _, y in d.cells), min(x for x, _ in d.cells)))
    for i, d in enumerate(doms):
        d.index = i
    return DomainDecomposition(r, doms, f)


# --------------------------------------------------------------------------
# classification


@dataclass
class DefectReport:
    kind: str
    defect_set: list
    decomposition: DomainDecomposition
    signature: list | None = None
    group: DisplacementGroup | None = None
    matrix: list | None = None
    displacement: Displacement | None = None
    essential: bool = False
    removable: bool | None = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        out: dict = {"classification": self.kind,
                     "defect_set": [list(p) if isinstance(p, tuple) else p for p in self.defect_set],
                     "decomposition": self.decomposition.to_json()}
        if self.signature is not None:
            out["signature"] = self.signature
        if self.group is not None:
            out["group"] = self.group.to_json()
        if self.matrix is not None:
            out["matrix"] = [[None if x is None else x.to_json() for x in row] for row in self.matrix]
        if self.displacement is not None:
            out["displacement"] = self.displacement.to_json()
        out["essential"] = self.essential
        out["removable"] = self.removable
        if self.notes:
            out["notes"] = self.notes
        return out


def component_word(spec, comp: int) -> str:
    """A periodic word generating a point of the component (for reports)."""
    st = state_structure(spec)
    from .ca import _some_cycle
    cyc = _some_cycle(st.decomposition[comp])
    return str(Word(spec.alphabet, tuple(st.center_symbol(s) for s in cyc)))


def _label_domain_1d(model, c: EpConfig, dom: Domain, f: DefectField, margin: int,
                     search: int = 64) -> None:
    """Assign component, frame and coordinate to a 1D domain."""
    if model.is_marker:
        table = model.markers
        lo = dom.lo if dom.lo is not None else (dom.hi - search if dom.hi is not None else c.anchor - search)
        hi = dom.hi if dom.hi is not None else (dom.lo + search if dom.lo is not None else c.end + search)
        if dom.lo is None:
            lo = min(lo, c.anchor - search)
        if dom.hi is None:
            hi = max(hi, c.end + search)
        coord = table.coordinate(c.cells(lo, hi).tolist(), lo)
        if coord is not None:
            dom.component = 0
            dom.frame = 0
            dom.coordinate = model.frames[0].group.element(coord)
        return
    st = model.structure
    rad = st.radius
    reach = max(st.periods, default=1) + 1
    if dom.lo is None:
        start = (dom.hi if dom.hi is not None else c.anchor) - margin - 2 * rad
        zs = [start - i for i in range(reach)]
    elif dom.hi is None:
        start = dom.lo + margin + 2 * rad
        zs = [start + i for i in range(reach)]
    else:
        zs = list(range(dom.lo, dom.hi + 1))
    for z in zs:
        s = int(st.states_at(c.cells(z - rad, z + rad))[0])
        if s >= 0 and st.comp_of_state[s] >= 0:
            comp = int(st.comp_of_state[s])
            frame = model.frame_for(comp)
            dom.component = comp
            dom.frame = frame.index
            dom.coordinate = frame.coordinate(comp, int(st.phase_of_state[s]), z)
            dom.base = z
            return


def base_point(model, c: EpConfig, dom: Domain, margin: int) -> int:
    """A cell deep inside a 1D domain, at least ``margin`` from its ends."""
    if dom.lo is None and dom.hi is None:
        return c.anchor
    if dom.lo is None:
        return dom.hi - margin
    if dom.hi is None:
        return dom.lo + margin
    return (dom.lo + dom.hi) // 2


def gamma(ps: PhaseStructure, c: EpConfig, y: int, z: int) -> RootOfUnity:
    """``lam^(y-z) f_z(a) / f_y(a)`` evaluated from windows around ``y`` and ``z``."""
    rad = state_structure(ps.spec).radius
    fy = eval_eigenfunction(ps, c.window(y - rad, y + rad), y - rad, y)
    fz = eval_eigenfunction(ps, c.window(z - rad, z + rad), z - rad, z)
    return ps.lam ** (y - z) * fz / fy


def classify(c, spec, ca: Ca1D | Ca2D | None = None, r: int | None = None,
             boundary: str = "open") -> DefectReport:
    """Classify the defects of a configuration.

    1D: ``c`` must be an EpConfig with admissible tails. The two projective
    domains decide the class: different ``(Phi, sigma)``-orbits (or
    transitive components without a CA) give an interface; the same orbit
    gives a dislocation whose displacement is the right domain's coordinate
    minus the left one's.
    """
    if isinstance(c, Grid2D):
        return _classify_grid(c, spec, r, boundary)
    if not isinstance(c, EpConfig):
        raise TypeError("classify needs an EpConfig or Grid2D")
    check_alphabet(spec, c.alphabet)
    if not tails_admissible(c, spec):
        raise InadmissibleTails("configuration tails are not admissible")
    r = _check_r(spec, r)
    model = spectral_model(spec, ca if isinstance(ca, Ca1D) else None)
    if is_point_admissible(c, spec):
        lo, hi = _default_window(c, spec)
        n = hi - lo + 1
        f = DefectField(lo, np.full(n, INF, dtype=np.int64), np.zeros(n, dtype=bool))
        dec = DomainDecomposition(r, [Domain(0, None, None, projective=True)], f)
        _label_domain_1d(model, c, dec.domains[0], f, 0)
        return DefectReport("none", [], dec, essential=False, removable=True)
    margin = 2 * (spec_radius(spec) + (0 if model.is_marker else model.structure.radius)) + 2
    pad = 2 * max(len(c.left), len(c.right)) + 2 * margin + 8
    dec = domain_components(c, spec, r, pad=pad)
    f = dec.field
    if len(dec.domains) < 2:
        # sofic defects can be invisible at small radius; use the least radius that separates
        r = int(f.finite_values().min()) + 1
        dec = domain_components(c, spec, r, pad=pad + r)
        f = dec.field
    for d in dec.domains:
        _label_domain_1d(model, c, d, f, margin)
    dset = defect_set(f)
    removable = is_removable(c, spec)
    proj = dec.projective
    left, right = proj[0], proj[-1]
    report = DefectReport("unclassified", dset, dec, removable=removable)
    if left.frame is None or right.frame is None:
        report.notes.append("a projective domain could not be labelled")
        return report
    if left.frame != right.frame:
        report.kind = "interface"
        report.signature = [_component_json(model, spec, d.component) for d in (left, right)]
        report.essential = True
        return report
    frame = model.frames[left.frame]
    group = frame.group
    labelled = [d for d in dec.domains if d.frame == left.frame and d.coordinate is not None]
    matrix = []
    for dn in labelled:
        row = []
        for dm in labelled:
            row.append(dn.coordinate - dm.coordinate)
        matrix.append(row)
    if model.is_marker:
        delta = right.coordinate - left.coordinate
        report.kind = "marker_dislocation"
    else:
        if frame.K == 1:
            # literal evaluation of lam^(y-z) f_z / f_y at deep base points
            ps = model.phase_structures[left.component]
            y = base_point(model, c, right, margin)
            z = base_point(model, c, left, margin)
            g = gamma(ps, c, y, z)
            delta = group.element(g.exponent(ps.period))
            if delta != right.coordinate - left.coordinate:
                raise AssertionError("eigenfunction and coordinate displacements disagree")
        else:
            delta = right.coordinate - left.coordinate
        report.kind = "dislocation"
    report.group = group
    report.matrix = matrix
    report.displacement = delta
    report.essential = not delta.is_identity
    return report


def _component_json(model, spec, comp: int) -> dict:
    if model.is_marker:
        return {"component": comp}
    return {"component": comp, "word": component_word(spec, comp)}


def _classify_grid(g: Grid2D, spec: WangSpec, r: int | None, boundary: str) -> DefectReport:
    r = _check_r(spec, r)
    dec = domain_components(g, spec, r, boundary)
    model = lattice_model(spec)
    f = dec.field
    h, w = g.height, g.width
    rho = model.rho
    for d in dec.domains:
        # use the deepest cell of the domain
        x, y = max(d.cells, key=lambda p: (f.values[p[1], p[0]], -p[1], -p[0]))
        ys = np.arange(y - rho, y + rho + 1) % h
        xs = np.arange(x - rho, x + rho + 1) % w
        loc = model.locate(g.cells[np.ix_(ys, xs)], x, y)
        if loc is not None:
            d.component, d.coordinate = loc
            d.frame = loc[0]
            d.base = (x, y)
    dset = defect_set(f)
    proj = dec.projective
    report = DefectReport("none" if len(dec.domains) <= 1 else "unclassified", dset, dec)
    if len(proj) < 2:
        report.essential = False
        return report
    if any(d.component is None for d in proj):
        report.notes.append("a projective domain could not be labelled")
        return report
    if len({d.component for d in proj}) > 1:
        report.kind = "interface"
        report.signature = [{"component": d.component} for d in proj]
        report.essential = True
        return report
    group = model.components[proj[0].component].group
    report.kind = "dislocation"
    report.group = group
    report.matrix = [[dn.coordinate - dm.coordinate for dm in proj] for dn in proj]
    report.displacement = proj[-1].coordinate - proj[0].coordinate
    report.essential = any(not x.is_identity for row in report.matrix for x in row)
    return report


# --------------------------------------------------------------------------
# phase gaps and removability


def phase_gap(left_state, right_state, gap_length: int, ps: PhaseStructure) -> Displacement:
    """Displacement of a junction between two blocks of one component.

    ``left_state`` sits at cell ``z`` and ``right_state`` at ``z + gap_length
    + 1``; a seamless continuation has ``phase(right) = phase(left) + gap + 1``.
    The result is ``phase(left) + gap + 1 - phase(right)`` in ``Z/P``.
    """
    phases = ps.phases
    st = state_structure(ps.spec)
    lab = st.markov.alphabet.symbols

    def phase_of(s):
        key = lab[s] if isinstance(s, (int, np.integer)) else str(s)
        if key not in phases:
            raise ValueError(f"state {s!r} is not in component {ps.component}")
        return phases[key]

    n, m = phase_of(left_state), phase_of(right_state)
    return DisplacementGroup.cyclic(ps.period).element(n + gap_length + 1 - m)


def is_removable(c: EpConfig, spec) -> bool:
    """Can the defect be erased by changing finitely many cells.

    Decided on the presentation graph: some left-infinite path reading the
    left tail must connect, in exactly ``|center| + i*|left| + j*|right|``
    steps (``i, j >= 0``), to a right-infinite path reading the right tail.
    """
    check_alphabet(spec, c.alphabet)
    if not tails_admissible(c, spec):
        raise InadmissibleTails("not a finite defect: tails are not admissible")
    g = presentation(spec)
    n = g.n
    src = left_context(c, spec)
    dst = right_context(c, spec)
    if not src or not dst:
        return False
    adj = np.zeros((n, n), dtype=np.int64)
    for u, v, _ in g.edges:
        adj[u, v] = 1
    vec = np.array([(src >> i) & 1 for i in range(n)], dtype=np.int64)
    target = np.array([(dst >> i) & 1 for i in range(n)], dtype=bool)
    pl, pr = len(c.left), len(c.right)
    t0 = len(c.center)
    bound = t0 + pl * pr + 2 * n * n + 2 * n * max(pl, pr) + 32
    reach_ok = _semigroup(pl, pr, bound - t0)
    for t in range(bound + 1):
        if t >= t0 and reach_ok[t - t0] and np.any(vec.astype(bool) & target):
            return True
        vec = (vec @ adj > 0).astype(np.int64)
        if not vec.any():
            return False
    return False


def _semigroup(a: int, b: int, n: int) -> np.ndarray:
    """Membership of ``0..n`` in ``{i a + j b : i, j >= 0}``."""
    ok = np.zeros(n + 1, dtype=bool)
    ok[0] = True
    for t in range(1, n + 1):
        ok[t] = (t >= a and ok[t - a]) or (t >= b and ok[t - b])
    return ok
