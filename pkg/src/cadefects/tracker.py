"""Defect particles in spacetime diagrams on a torus.

Rows are filtered through the unflawed set ``X_r``; the defective cells of
each row are grouped into cyclic intervals, linked from row to row and
labelled by the displacement between their flanking domains. Collisions are
checked against the coalescence law: incoming displacements add up to the
outgoing ones.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .ca import Ca1D
from .spectral import Displacement, spectral_model
from .subshift import (
    SoficSpec,
    SubshiftError,
    admissible_words,
    check_alphabet,
    language,
    spec_radius,
    state_structure,
)
from .symbolic import CyclicConfig


class NoCondensation(SubshiftError):
    """The background never settles into the invariant subshift."""


@dataclass(frozen=True, eq=False)
class Spacetime:
    """Rows ``0 .. T-1`` of the evolution of a cyclic configuration (time runs downward)."""

    ca: Ca1D
    initial: CyclicConfig
    rows: np.ndarray = field(repr=False)

    @property
    def T(self) -> int:
        return self.rows.shape[0]

    @property
    def N(self) -> int:
        return self.rows.shape[1]

    def row(self, t: int) -> CyclicConfig:
        return CyclicConfig.from_array(self.initial.alphabet, self.rows[t])


def simulate(ca: Ca1D, init: CyclicConfig, T: int) -> Spacetime:
    """Exact evolution; row 0 is ``init``."""
    if T < 1:
        raise ValueError("T must be at least 1")
    if ca.alphabet != init.alphabet:
        raise ValueError("alphabet mismatch between rule and configuration")
    rows = np.empty((T, init.length), dtype=np.int64)
    rows[0] = init.array()
    for t in range(1, T):
        rows[t] = ca.image_cyclic(rows[t - 1])
    rows.setflags(write=False)
    return Spacetime(ca, init, rows)


def random_config(alphabet, n: int, seed: int) -> CyclicConfig:
    """Uniform random torus from a seeded PCG64 generator."""
    rng = np.random.default_rng(seed)
    return CyclicConfig.from_array(alphabet, rng.integers(0, alphabet.size, n))


# --------------------------------------------------------------------------
# filtering


@lru_cache(maxsize=None)
def _window_table(spec, r: int) -> np.ndarray:
    k = spec.alphabet.size
    m = 2 * r + 1
    ok = np.zeros(k ** m, dtype=bool)
    for w in admissible_words(spec, m):
        c = 0
        for x in w:
            c = c * k + x
        ok[c] = True
    ok.setflags(write=False)
    return ok


def defective_mask(row: np.ndarray, spec, r: int) -> np.ndarray:
    """Cells ``z`` of a torus row with ``F(z) < r``."""
    k = spec.alphabet.size
    m = 2 * r + 1
    n = len(row)
    ext = np.asarray(row)[np.arange(-r, n + r) % n]
    code = np.zeros(n, dtype=np.int64)
    for j in range(m):
        code = code * k + ext[j:j + n]
    return ~_window_table(spec, r)[code]


@lru_cache(maxsize=None)
def _subset_table(spec) -> tuple[np.ndarray, int]:
    """Deterministic subset automaton of the language: (transition table, start index); state 0 is empty."""
    lang = language(spec)
    k = spec.alphabet.size
    masks = [0, lang.full]
    index = {0: 0, lang.full: 1}
    rows = []
    i = 0
    while i < len(masks):
        row = []
        for sym in range(k):
            m = lang.step(masks[i], sym) if masks[i] else 0
            if m not in index:
                index[m] = len(masks)
                masks.append(m)
            row.append(index[m])
        rows.append(row)
        i += 1
    table = np.array(rows, dtype=np.int64)
    table.setflags(write=False)
    return table, 1


def forbidden_cover(row: np.ndarray, spec, max_len: int) -> np.ndarray:
    """Cells of a torus row lying in a minimal forbidden word of length at most ``max_len``."""
    table, start = _subset_table(spec)
    row = np.asarray(row)
    n = len(row)
    cur = np.full(n, start, dtype=np.int64)
    end = np.full(n, -1, dtype=np.int64)  # first j with row[i..i+j] forbidden
    for d in range(min(max_len, n)):
        cur = table[cur, row[(np.arange(n) + d) % n]]
        hit = (cur == 0) & (end < 0)
        end[hit] = d
    mask = np.zeros(n, dtype=bool)
    for i in np.nonzero(end >= 0)[0]:
        e = end[i]
        nxt = end[(i + 1) % n]
        # minimal iff dropping the first cell makes it admissible
        if nxt < 0 or nxt + 1 > e:
            mask[np.arange(i, i + e + 1) % n] = True
    return mask


def cyclic_intervals(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of True on a torus as ``(start, length)`` with ``0 <= start < N``."""
    n = len(mask)
    if not mask.any():
        return []
    if mask.all():
        return [(0, n)]
    start = int(np.argmin(mask))  # a good cell: no run wraps past it
    rolled = np.roll(mask, -start)
    out = []
    i = 0
    while i < n:
        if rolled[i]:
            j = i
            while j + 1 < n and rolled[j + 1]:
                j += 1
            out.append(((start + i) % n, j - i + 1))
            i = j + 1
        else:
            i += 1
    out.sort()
    return out


# --------------------------------------------------------------------------
# labels


@dataclass(frozen=True)
class Label:
    """What a defect separates: the frames on either side and, if equal, the displacement."""

    left: int
    right: int
    displacement: Displacement | None = None

    @property
    def interface(self) -> bool:
        return self.left != self.right

    def to_json(self):
        if self.displacement is not None:
            return self.displacement.to_json()
        return {"interface": [self.left, self.right]}

    def __str__(self) -> str:
        if self.displacement is not None:
            return str(self.displacement)
        return f"interface {self.left}|{self.right}"


class _Labeller:
    """Coordinates of the domains flanking a defective interval."""

    def __init__(self, spec, ca: Ca1D | None, search: int):
        self.model = spectral_model(spec, ca)
        self.search = search
        if not self.model.is_marker:
            self.st = state_structure(spec)

    def coordinate(self, row: np.ndarray, lo: int, hi: int, z: int, side: int):
        """(frame, coordinate) of the domain occupying ``[lo, hi]`` (unwrapped), probed at ``z``."""
        n = len(row)
        if self.model.is_marker:
            # the cells bounding a domain still carry its phase
            if side < 0:
                a, b = max(lo - 1, z - self.search), z + 1
            else:
                a, b = z - 1, min(hi + 1, z + self.search)
            cells = row[np.arange(a, b + 1) % n].tolist()
            try:
                c = self.model.markers.coordinate(cells, a)
            except ValueError:
                return None
            if c is None:
                return None
            return 0, self.model.frames[0].group.element(c)
        rad = self.st.radius
        s = int(self.st.states_at(row[np.arange(z - rad, z + rad + 1) % n])[0])
        if s < 0 or self.st.comp_of_state[s] < 0:
            return None
        comp = int(self.st.comp_of_state[s])
        frame = self.model.frame_for(comp)
        return frame.index, frame.coordinate(comp, int(self.st.phase_of_state[s]), z)

    def winding(self, row: np.ndarray) -> Displacement | None:
        n = len(row)
        a = self.coordinate(row, 0, n - 1, 0, +1)
        b = self.coordinate(row, n, 2 * n - 1, n, +1)
        if a is None or b is None or a[0] != b[0]:
            return None
        return b[1] - a[1]

    def label(self, row: np.ndarray, intervals: list, idx: int) -> Label | None:
        n = len(row)
        start, length = intervals[idx]
        m = len(intervals)
        prev_start, prev_len = intervals[(idx - 1) % m]
        nxt_start, _ = intervals[(idx + 1) % m]
        # unwrapped extents of the neighbouring domains
        left_hi = start - 1
        left_lo = prev_start + prev_len
        if left_lo > left_hi:
            left_lo -= n
        right_lo = start + length
        right_hi = nxt_start - 1
        while right_hi < right_lo:
            right_hi += n
        a = self.coordinate(row, left_lo, left_hi, left_hi, -1)
        b = self.coordinate(row, right_lo, right_hi, right_lo, +1)
        if a is None or b is None:
            return None
        if a[0] != b[0]:
            return Label(a[0], b[0])
        return Label(a[0], b[0], b[1] - a[1])


# --------------------------------------------------------------------------
# tracks and events


@dataclass
class ParticleTrack:
    """One defect particle: its intervals ``(t, start, length)`` and links to events."""

    id: int
    intervals: list = field(default_factory=list)
    labels: list = field(default_factory=list)
    parent_event: int | None = None
    child_event: int | None = None

    @property
    def birth(self) -> int:
        return self.intervals[0][0]

    @property
    def death(self) -> int:
        return self.intervals[-1][0]

    @property
    def lifetime(self) -> int:
        return self.death - self.birth + 1

    @property
    def label(self) -> Label | None:
        """The most frequent per-row label (earliest wins ties)."""
        got = [x for x in self.labels if x is not None]
        if not got:
            return None
        counts = Counter(got)
        best = max(counts.values())
        for x in got:
            if counts[x] == best:
                return x
        return None

    def center(self, t: int, n: int) -> float | None:
        for tt, s, ln in self.intervals:
            if tt == t:
                return (s + (ln - 1) / 2) % n
        return None

    def to_json(self) -> dict:
        lab = self.label
        return {"id": self.id, "birth": self.birth, "death": self.death,
                "label": None if lab is None else lab.to_json(),
                "parent_event": self.parent_event, "child_event": self.child_event,
                "intervals": [list(iv) for iv in self.intervals]}


@dataclass
class CollisionEvent:
    time: int
    incoming: list
    outgoing: list
    verdict: str = "SKIP"
    incoming_total: str | None = None
    outgoing_total: str | None = None

    def to_json(self) -> dict:
        return {"time": self.time, "incoming": self.incoming, "outgoing": self.outgoing,
                "verdict": self.verdict, "incoming_total": self.incoming_total,
                "outgoing_total": self.outgoing_total}


@dataclass
class TrackResult:
    """Tracks and events of one spacetime diagram."""

    N: int
    T: int
    r: int
    burn_in: int
    tracks: list
    events: list
    masks: np.ndarray = field(repr=False)
    row_labels: list = field(repr=False, default_factory=list)
    winding: list = field(repr=False, default_factory=list)

    def track(self, tid: int) -> ParticleTrack:
        return self.tracks[tid]


def _cyc_gap(a: tuple, b: tuple, n: int) -> int:
    """Number of cells strictly between two cyclic intervals (0 if touching or overlapping)."""
    (s1, l1), (s2, l2) = a, b
    best = n
    for d in ((s2 - (s1 + l1)) % n, (s1 - (s2 + l2)) % n):
        best = min(best, d)
    # overlap shows up as a wrap-around distance close to n
    if (s2 - s1) % n < l1 or (s1 - s2) % n < l2:
        return 0
    return best


def _cyc_dist(a: float, b: float, n: int) -> float:
    d = abs(a - b) % n
    return min(d, n - d)


def extract_particles(st: Spacetime, spec, r: int | None = None, burn_in: int = 50,
                      ca: Ca1D | None = None, search: int = 64,
                      max_defective: float = 0.5) -> TrackResult:
    """Filter, link and label defect particles.

    Intervals in consecutive rows are linked when at most ``R`` cells apart
    (``R`` the CA radius). Contacts that pair rows one-to-one are kept as
    separate particles (nearest match, leftmost tie-break); any other contact
    pattern starts a collision event.
    """
    check_alphabet(spec, st.initial.alphabet)
    if r is None:
        r = spec_radius(spec) + 1
    if burn_in >= st.T:
        raise ValueError("burn-in leaves no rows to track")
    ca = ca if ca is not None else st.ca
    R = ca.radius
    n = st.N
    labeller = _Labeller(spec, ca, search)
    if isinstance(spec, SoficSpec):
        # long forbidden words hide from F < r; mark them whole instead
        masks = np.array([forbidden_cover(st.rows[t], spec, search) for t in range(burn_in, st.T)])
    else:
        masks = np.array([defective_mask(st.rows[t], spec, r) for t in range(burn_in, st.T)])
    if masks.mean() > max_defective:
        raise NoCondensation(f"defective fraction {masks.mean():.3f} exceeds {max_defective}")
    tracks: list[ParticleTrack] = []
    events: list[CollisionEvent] = []
    row_labels = []
    winding = []
    active: list[int] = []  # track ids aligned with the previous row's intervals
    prev_iv: list = []

    def new_track(t, iv, lab):
        tr = ParticleTrack(len(tracks))
        tr.intervals.append((t, iv[0], iv[1]))
        tr.labels.append(lab)
        tracks.append(tr)
        return tr.id

    for t in range(burn_in, st.T):
        row = st.rows[t]
        ivs = cyclic_intervals(masks[t - burn_in])
        if len(ivs) == 1 and ivs[0][1] == n:
            raise NoCondensation(f"row {t} has no unflawed cell")
        labs = [labeller.label(row, ivs, i) for i in range(len(ivs))]
        row_labels.append(labs)
        winding.append(labeller.winding(row) if not ivs else None)
        if t == burn_in:
            active = [new_track(t, iv, lab) for iv, lab in zip(ivs, labs)]
            prev_iv = ivs
            continue
        # contact graph between previous and current intervals
        np_, nc = len(prev_iv), len(ivs)
        adj_p = [[j for j in range(nc) if _cyc_gap(prev_iv[i], ivs[j], n) <= R] for i in range(np_)]
        adj_c = [[i for i in range(np_) if j in adj_p[i]] for j in range(nc)]
        seen_p, seen_c = set(), set()
        vanished: list = []
        cur_ids: list = [None] * nc
        for i0 in range(np_):
            if i0 in seen_p:
                continue
            comp_p, comp_c = {i0}, set()
            stack = [("p", i0)]
            while stack:
                kind, x = stack.pop()
                nbrs = adj_p[x] if kind == "p" else adj_c[x]
                for y in nbrs:
                    if kind == "p" and y not in comp_c:
                        comp_c.add(y)
                        stack.append(("c", y))
                    elif kind == "c" and y not in comp_p:
                        comp_p.add(y)
                        stack.append(("p", y))
            seen_p |= comp_p
            seen_c |= comp_c
            ps, cs = sorted(comp_p), sorted(comp_c)
            pairs = _match(ps, cs, prev_iv, ivs, n)
            if pairs is not None:
                for i, j in pairs:
                    tid = active[i]
                    tracks[tid].intervals.append((t, ivs[j][0], ivs[j][1]))
                    tracks[tid].labels.append(labs[j])
                    cur_ids[j] = tid
                continue
            if not cs:
                vanished.append(ps[0])
                continue
            ev = CollisionEvent(t, [active[i] for i in ps], [])
            for i in ps:
                tracks[active[i]].child_event = len(events)
            for j in cs:
                tid = new_track(t, ivs[j], labs[j])
                tracks[tid].parent_event = len(events)
                cur_ids[j] = tid
                ev.outgoing.append(tid)
            events.append(ev)
        # neighbouring particles that vanish together annihilate together
        for group in _adjacent_groups(sorted(vanished), np_):
            for i in group:
                tracks[active[i]].child_event = len(events)
            events.append(CollisionEvent(t, [active[i] for i in group], []))
        born = [j for j in range(nc) if j not in seen_c]
        for j in born:
            cur_ids[j] = new_track(t, ivs[j], labs[j])
        for group in _adjacent_groups(born, nc):
            if len(group) > 1:
                for j in group:
                    tracks[cur_ids[j]].parent_event = len(events)
                events.append(CollisionEvent(t, [], [cur_ids[j] for j in group]))
        active = cur_ids
        prev_iv = ivs
    return TrackResult(n, st.T, r, burn_in, tracks, events, masks, row_labels, winding)


def _adjacent_groups(idx: list, m: int) -> list[list]:
    """Split sorted indices into runs of cyclically consecutive values modulo ``m``."""
    if not idx:
        return []
    groups = [[idx[0]]]
    for i in idx[1:]:
        if i == groups[-1][-1] + 1:
            groups[-1].append(i)
        else:
            groups.append([i])
    if len(groups) > 1 and groups[0][0] == 0 and groups[-1][-1] == m - 1:
        groups[0] = groups.pop() + groups[0]
    return groups


def _match(ps, cs, prev_iv, ivs, n):
    """One-to-one continuation of a contact component, or None for a collision."""
    if len(ps) != len(cs):
        return None
    if len(ps) == 1:
        return [(ps[0], cs[0])]
    # an interval touching two on the other row means a merge or a split
    for j in cs:
        if sum(_cyc_gap(prev_iv[i], ivs[j], n) == 0 for i in ps) > 1:
            return None
    for i in ps:
        if sum(_cyc_gap(prev_iv[i], ivs[j], n) == 0 for j in cs) > 1:
            return None
    # near miss: every current interval picks its nearest previous one
    def mid(iv):
        return iv[0] + (iv[1] - 1) / 2
    used = set()
    pairs = []
    for j in cs:
        best = min(ps, key=lambda i: (_cyc_dist(mid(prev_iv[i]), mid(ivs[j]), n), prev_iv[i][0]))
        if best in used:
            return None
        used.add(best)
        pairs.append((best, j))
    return pairs


def _compose(labels: list):
    """Chain labels left to right: (left frame, right frame, displacement or None)."""
    if not labels:
        return None
    if any(x is None for x in labels):
        raise LookupError
    for a, b in zip(labels, labels[1:]):
        if a.right != b.left:
            return "broken"
    disp = None
    if all(x.displacement is not None for x in labels):
        disp = labels[0].displacement
        for x in labels[1:]:
            disp = disp + x.displacement
    return labels[0].left, labels[-1].right, disp


def collapse_events(res: TrackResult, min_life: int = 4) -> None:
    """Fold short-lived intermediate tracks into the events around them."""
    changed = True
    while changed:
        changed = False
        for tr in res.tracks:
            if tr.parent_event is None or tr.child_event is None or tr.lifetime >= min_life:
                continue
            i1 = tr.parent_event
            e1, e2 = res.events[i1], res.events[tr.child_event]
            if e1 is e2:
                continue
            # fold e2 into e1; tracks both produced and consumed become internal
            for tid in e2.incoming + e2.outgoing:
                t2 = res.tracks[tid]
                if t2.child_event is not None and res.events[t2.child_event] is e2:
                    t2.child_event = i1
                if t2.parent_event is not None and res.events[t2.parent_event] is e2:
                    t2.parent_event = i1
            inc = e1.incoming + e2.incoming
            out = e1.outgoing + e2.outgoing
            internal = set(inc) & set(out)
            e1.incoming = [x for x in inc if x not in internal]
            e1.outgoing = [x for x in out if x not in internal]
            for tid in internal:
                res.tracks[tid].parent_event = res.tracks[tid].child_event = None
            e2.incoming, e2.outgoing = [], []
            changed = True
    _reindex(res, [e for e in res.events if e.incoming or e.outgoing])


def _reindex(res: TrackResult, keep: list) -> None:
    remap = {id(e): i for i, e in enumerate(keep)}
    for tr in res.tracks:
        if tr.parent_event is not None:
            tr.parent_event = remap.get(id(res.events[tr.parent_event]))
        if tr.child_event is not None:
            tr.child_event = remap.get(id(res.events[tr.child_event]))
    res.events = keep


def detect_collisions(res: TrackResult, min_life: int = 4) -> list[CollisionEvent]:
    """Collision events with incoming and outgoing ids ordered left to right."""
    collapse_events(res, min_life)
    keep = []
    for ev in res.events:
        parts = ev.incoming + ev.outgoing
        if len(parts) == 1:
            lab = res.tracks[parts[0]].label
            if lab is None or (lab.displacement is not None and lab.displacement.is_identity):
                # a lone transient appearing or healing is not a collision
                tr = res.tracks[parts[0]]
                if tr.child_event is not None and res.events[tr.child_event] is ev:
                    tr.child_event = None
                if tr.parent_event is not None and res.events[tr.parent_event] is ev:
                    tr.parent_event = None
                continue
        keep.append(ev)
    _reindex(res, keep)
    n = res.N
    for ev in res.events:
        anchor = None
        for tid in ev.outgoing:
            c = res.tracks[tid].center(res.tracks[tid].birth, n)
            anchor = c if anchor is None else anchor
        if anchor is None:
            tr = res.tracks[ev.incoming[0]]
            anchor = tr.center(tr.death, n)

        def key(tid, when):
            tr = res.tracks[tid]
            c = tr.center(when(tr), n)
            return ((c - anchor + n / 2) % n, tid)

        ev.incoming.sort(key=lambda tid: key(tid, lambda tr: tr.death))
        ev.outgoing.sort(key=lambda tid: key(tid, lambda tr: tr.birth))
    return res.events


@dataclass
class ConservationReport:
    verdicts: list
    passed: int
    failed: int
    skipped: int

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        return {"pass": self.passed, "fail": self.failed, "skip": self.skipped,
                "verdicts": self.verdicts}


def verify_conservation(events: list[CollisionEvent], tracks: list[ParticleTrack]) -> ConservationReport:
    """Check the coalescence law at every event.

    Dislocations must satisfy ``sum(incoming) == sum(outgoing)`` in the
    displacement group (empty sum = identity). Chains involving interfaces
    must keep their outer frames. Unlabelled participants give SKIP.
    """
    verdicts = []
    for ev in events:
        try:
            a = _compose([tracks[t].label for t in ev.incoming])
            b = _compose([tracks[t].label for t in ev.outgoing])
        except LookupError:
            ev.verdict = "SKIP"
            verdicts.append(ev.verdict)
            continue
        ev.verdict = "PASS" if _same_total(a, b) else "FAIL"
        ev.incoming_total = _total_str(a)
        ev.outgoing_total = _total_str(b)
        verdicts.append(ev.verdict)
    return ConservationReport(verdicts, verdicts.count("PASS"), verdicts.count("FAIL"),
                              verdicts.count("SKIP"))


def _same_total(a, b) -> bool:
    if a == "broken" or b == "broken":
        return False
    if a is None and b is None:
        return True
    if a is None or b is None:
        x = a if a is not None else b
        return x[0] == x[1] and (x[2] is None or x[2].is_identity)
    if (a[0], a[1]) != (b[0], b[1]):
        return False
    if a[2] is None or b[2] is None:
        # interfaces compose along the line: only the outer frames are checked
        return True
    return a[2] == b[2]


def _total_str(x) -> str | None:
    if x is None:
        return "0"
    if x == "broken":
        return "broken"
    return str(x[2]) if x[2] is not None else f"interface {x[0]}|{x[1]}"


def total_displacement(res: TrackResult) -> list:
    """Per tracked row, the sum of all particle displacements (None if not computable).

    A row without particles contributes the winding of its single domain,
    ``c(N) - c(0)``, which is what the sum equals whenever particles exist.
    """
    out = []
    for labs, empty in zip(res.row_labels, res.winding):
        if not labs:
            out.append(empty)
            continue
        if any(x is None or x.displacement is None for x in labs):
            out.append(None)
            continue
        tot = labs[0].displacement
        for x in labs[1:]:
            tot = tot + x.displacement
        out.append(tot)
    return out


def max_speed(res: TrackResult) -> int:
    """Largest distance from a newly defective cell to the track's previous interval.

    ``F`` drops by at most ``R`` per step, so this never exceeds the CA radius.
    Shrinking (healing) can be arbitrarily fast and is not counted.
    """
    n = res.N
    best = 0
    for tr in res.tracks:
        for (_, s0, l0), (_, s1, l1) in zip(tr.intervals, tr.intervals[1:]):
            lead = (s0 - s1) % n
            lead = lead if lead < n // 2 else 0
            trail = ((s1 + l1) - (s0 + l0)) % n
            trail = trail if trail < n // 2 else 0
            best = max(best, lead, trail)
    return best


# --------------------------------------------------------------------------
# rendering


def render_pgm(rows: np.ndarray, k: int) -> str:
    """ASCII PGM (P2): symbol index ``i`` becomes gray ``255 * i / (k-1)``."""
    rows = np.asarray(rows)
    h, w = rows.shape
    scale = 255 // max(k - 1, 1)
    lines = ["P2", f"{w} {h}", "255"]
    for row in rows:
        lines.append(" ".join(str(int(v) * scale) for v in row))
    return "\n".join(lines) + "\n"


def render_overlay_pgm(rows: np.ndarray, masks: np.ndarray, k: int, burn_in: int) -> str:
    """Spacetime PGM with defective cells drawn mid-gray (rows before burn-in unmarked)."""
    rows = np.asarray(rows)
    scale = 255 // max(k - 1, 1)
    img = rows.astype(np.int64) * scale
    marked = np.zeros_like(img, dtype=bool)
    marked[burn_in:] = masks
    img[marked] = 128
    h, w = img.shape
    lines = ["P2", f"{w} {h}", "255"]
    for row in img:
        lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def render_field_pgm(values: np.ndarray) -> str:
    """Defect-field heat map, value ``min(F, 255)``; rows of a 2D field are written top first."""
    v = np.asarray(values)
    if v.ndim == 1:
        v = v[None, :]
    else:
        v = v[::-1]
    v = np.clip(v, 0, 255)
    h, w = v.shape
    lines = ["P2", f"{w} {h}", "255"]
    for row in v:
        lines.append(" ".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"
