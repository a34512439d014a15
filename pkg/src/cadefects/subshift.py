"""Subshift specifications and their combinatorics.

Four kinds of specification are supported:

* :class:`SftSpec` -- 1D shift of finite type given by its allowed
  ``(2r+1)``-blocks.
* :class:`MarkovSpec` -- 1D Markov shift given by allowed transitions.
* :class:`SoficSpec` -- 1D sofic shift given by an edge-labelled digraph.
* :class:`WangSpec` -- 2D nearest-neighbour edge-matching SFT.

Every 1D spec is converted to a trimmed edge-labelled graph (its
*presentation*) whose bi-infinite label sequences are exactly the points of
the subshift. Admissibility of a word is then a subset-propagation question
on that graph.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .symbolic import Alphabet, AlphabetError, Word, minimal_period


class SubshiftError(ValueError):
    """Malformed subshift specification."""


class UnsupportedStructure(SubshiftError):
    """The requested computation is outside the supported class of subshifts."""


# --------------------------------------------------------------------------
# specifications


@dataclass(frozen=True)
class SftSpec:
    """1D SFT: the points whose every ``(2r+1)``-block is in ``blocks``."""

    alphabet: Alphabet
    radius: int
    blocks: frozenset
    name: str = ""

    def __post_init__(self):
        if self.radius < 1:
            raise SubshiftError("SFT radius must be >= 1")
        blocks = frozenset(tuple(int(c) for c in b) for b in self.blocks)
        m = 2 * self.radius + 1
        k = self.alphabet.size
        for b in blocks:
            if len(b) != m:
                raise SubshiftError(f"block {b} has length {len(b)}, expected {m}")
            if any(not 0 <= c < k for c in b):
                raise AlphabetError(f"block {b} uses symbols outside the alphabet")
        object.__setattr__(self, "blocks", blocks)

    @property
    def block_length(self) -> int:
        return 2 * self.radius + 1

    @classmethod
    def from_words(cls, alphabet: Alphabet, radius: int, words: Iterable, name: str = "") -> "SftSpec":
        return cls(alphabet, radius, frozenset(alphabet.parse(w) for w in words), name)

    @classmethod
    def from_orbits(cls, alphabet: Alphabet, generators: Sequence, radius: int | None = None,
                    name: str = "") -> "SftSpec":
        """SFT equal to the union of the sigma-orbits of the given periodic words.

        With ``radius=None`` the least radius that cuts out exactly these
        orbits is chosen.
        """
        gens = [alphabet.parse(g) for g in generators]
        gens = [g[: minimal_period(g)] for g in gens]

        def blocks_for(r):
            m = 2 * r + 1
            out = set()
            for g in gens:
                n = len(g)
                for i in range(n):
                    out.add(tuple(g[(i + j) % n] for j in range(m)))
            return frozenset(out)

        if radius is not None:
            return cls(alphabet, radius, blocks_for(radius), name)
        target = sum(len(g) for g in gens)
        for r in range(1, max(len(g) for g in gens) + 2):
            spec = cls(alphabet, r, blocks_for(r), name)
            g = presentation(spec)
            outdeg = np.bincount([u for u, _, _ in g.edges], minlength=g.n)
            # exactly the orbits: the trimmed graph is a union of simple cycles
            if g.n == target and len(g.edges) == target and np.all(outdeg == 1):
                return spec
        raise SubshiftError("orbits are not cut out by any SFT radius tried")


@dataclass(frozen=True)
class MarkovSpec:
    """Markov shift: sequences whose consecutive pairs lie in ``transitions``."""

    alphabet: Alphabet
    transitions: frozenset
    name: str = ""

    def __post_init__(self):
        trans = frozenset((int(a), int(b)) for a, b in self.transitions)
        k = self.alphabet.size
        for a, b in trans:
            if not (0 <= a < k and 0 <= b < k):
                raise AlphabetError(f"transition {(a, b)} outside the alphabet")
        object.__setattr__(self, "transitions", trans)

    @classmethod
    def from_labels(cls, alphabet: Alphabet, pairs: Iterable, name: str = "") -> "MarkovSpec":
        return cls(alphabet, frozenset((alphabet.index(a), alphabet.index(b)) for a, b in pairs), name)

    @classmethod
    def full_shift(cls, alphabet: Alphabet, name: str = "full") -> "MarkovSpec":
        k = alphabet.size
        return cls(alphabet, frozenset(itertools.product(range(k), repeat=2)), name)


@dataclass(frozen=True)
class SoficSpec:
    """Sofic shift presented by an edge-labelled digraph ``(src, dst, label)``.

    ``markers`` optionally attaches a marker table for an almost-everywhere
    continuous eigenfunction: pairs ``(pattern, phase)`` meaning an occurrence
    of ``pattern`` starting at ``p`` puts the local phase origin at
    ``p - phase`` modulo ``marker_period``.
    """

    alphabet: Alphabet
    states: tuple
    edges: frozenset
    name: str = ""
    markers: tuple = ()
    marker_period: int = 0

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        object.__setattr__(self, "states", states)
        n, k = len(states), self.alphabet.size
        edges = frozenset((int(u), int(v), int(c)) for u, v, c in self.edges)
        if not n or not edges:
            raise SubshiftError("sofic graph must be nonempty")
        for u, v, c in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise SubshiftError(f"edge {(u, v)} references an unknown state")
            if not 0 <= c < k:
                raise AlphabetError(f"edge label {c} outside the alphabet")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_vertex_labelled(cls, alphabet: Alphabet, labels: Sequence, arcs: Iterable,
                             names: Sequence | None = None, name: str = "", **kw) -> "SoficSpec":
        """Convert a vertex-labelled digraph: each edge takes its target's label."""
        labs = [alphabet.index(x) for x in labels]
        names = tuple(names) if names is not None else tuple(f"q{i}" for i in range(len(labs)))
        return cls(alphabet, names, frozenset((u, v, labs[v]) for u, v in arcs), name, **kw)


@dataclass(frozen=True)
class WangSpec:
    """2D edge-matching SFT.

    ``horizontal`` holds the allowed pairs ``(a, b)`` with ``b`` immediately
    right of ``a``; ``vertical`` the pairs with ``b`` immediately above ``a``.
    """

    alphabet: Alphabet
    horizontal: frozenset
    vertical: frozenset
    name: str = ""

    def __post_init__(self):
        for attr in ("horizontal", "vertical"):
            pairs = frozenset((int(a), int(b)) for a, b in getattr(self, attr))
            object.__setattr__(self, attr, pairs)

    @property
    def radius(self) -> int:
        return 1


Spec1D = SftSpec | MarkovSpec | SoficSpec
Spec = SftSpec | MarkovSpec | SoficSpec | WangSpec


def spec_radius(spec: Spec) -> int:
    """Radius ``r'`` of the local rule defining the subshift (1 for Markov/sofic)."""
    return spec.radius if isinstance(spec, (SftSpec, WangSpec)) else 1


def block_length(spec: Spec1D) -> int | None:
    """Length of the blocks that decide admissibility locally (None if sofic)."""
    if isinstance(spec, SftSpec):
        return spec.block_length
    if isinstance(spec, MarkovSpec):
        return 2
    return None


def check_alphabet(spec: Spec, alphabet: Alphabet) -> None:
    if spec.alphabet != alphabet:
        raise AlphabetError(f"alphabet mismatch: {spec.alphabet.symbols} vs {alphabet.symbols}")


# --------------------------------------------------------------------------
# presentations and the factor language


@dataclass(frozen=True)
class LabelledGraph:
    """Edge-labelled digraph on vertices ``0..n-1``."""

    alphabet: Alphabet
    n: int
    edges: tuple
    names: tuple

    def trimmed(self) -> "LabelledGraph":
        """Restrict to essential vertices (on some bi-infinite path)."""
        alive = set(range(self.n))
        edges = list(self.edges)
        while True:
            has_in = {v for u, v, _ in edges}
            has_out = {u for u, v, _ in edges}
            keep = alive & has_in & has_out
            if keep == alive:
                break
            alive = keep
            edges = [e for e in edges if e[0] in alive and e[1] in alive]
        order = sorted(alive)
        new = {v: i for i, v in enumerate(order)}
        return LabelledGraph(self.alphabet, len(order),
                             tuple(sorted((new[u], new[v], c) for u, v, c in edges)),
                             tuple(self.names[v] for v in order))


def _block_label(alphabet: Alphabet, cells: Sequence[int]) -> str:
    labs = [alphabet.symbols[c] for c in cells]
    return "".join(labs) if alphabet.single_char else "|".join(labs)


@lru_cache(maxsize=None)
def presentation(spec: Spec1D) -> LabelledGraph:
    """Trimmed edge-labelled graph presenting the subshift.

    SFT: vertices are ``2r``-words, an allowed block ``b`` is an edge from
    ``b[:-1]`` to ``b[1:]`` labelled ``b[-1]``. Markov: vertices are symbols
    and ``a -> b`` is labelled ``b``. Sofic: the given graph.
    """
    k = spec.alphabet
    if isinstance(spec, SftSpec):
        verts = sorted({b[:-1] for b in spec.blocks} | {b[1:] for b in spec.blocks})
        idx = {v: i for i, v in enumerate(verts)}
        edges = tuple(sorted((idx[b[:-1]], idx[b[1:]], b[-1]) for b in spec.blocks))
        g = LabelledGraph(k, len(verts), edges, tuple(_block_label(k, v) for v in verts))
    elif isinstance(spec, MarkovSpec):
        edges = tuple(sorted((a, b, b) for a, b in spec.transitions))
        g = LabelledGraph(k, k.size, edges, k.symbols)
    elif isinstance(spec, SoficSpec):
        g = LabelledGraph(k, len(spec.states), tuple(sorted(spec.edges)), spec.states)
    else:
        raise UnsupportedStructure(f"no 1D presentation for {type(spec).__name__}")
    return g.trimmed()


class Language:
    """Factor language of a 1D subshift via subset propagation."""

    def __init__(self, graph: LabelledGraph):
        self.graph = graph
        k = graph.alphabet.size
        self._succ = [[0] * graph.n for _ in range(k)]
        self._pred = [[0] * graph.n for _ in range(k)]
        for u, v, c in graph.edges:
            self._succ[c][u] |= 1 << v
            self._pred[c][v] |= 1 << u
        self.full = (1 << graph.n) - 1
        self._cache: dict = {}
        self._bcache: dict = {}

    def step(self, mask: int, sym: int) -> int:
        key = (mask, sym)
        out = self._cache.get(key)
        if out is None:
            out = 0
            succ = self._succ[sym]
            m, v = mask, 0
            while m:
                if m & 1:
                    out |= succ[v]
                m >>= 1
                v += 1
            self._cache[key] = out
        return out

    def back(self, mask: int, sym: int) -> int:
        """Vertices with a ``sym``-edge into ``mask``."""
        key = (mask, sym)
        out = self._bcache.get(key)
        if out is None:
            out = 0
            pred = self._pred[sym]
            m, v = mask, 0
            while m:
                if m & 1:
                    out |= pred[v]
                m >>= 1
                v += 1
            self._bcache[key] = out
        return out

    def run(self, cells: Iterable[int], mask: int | None = None) -> int:
        m = self.full if mask is None else mask
        for c in cells:
            m = self.step(m, c)
            if not m:
                return 0
        return m

    def accepts(self, cells: Iterable[int]) -> bool:
        return self.graph.n > 0 and self.run(cells) != 0

    def words(self, n: int) -> list[tuple[int, ...]]:
        """All admissible words of length ``n`` in lexicographic order."""
        out: list = []
        k = self.graph.alphabet.size

        def rec(prefix, mask):
            if len(prefix) == n:
                out.append(tuple(prefix))
                return
            for c in range(k):
                m2 = self.step(mask, c)
                if m2:
                    prefix.append(c)
                    rec(prefix, m2)
                    prefix.pop()

        if self.graph.n:
            rec([], self.full)
        return out


@lru_cache(maxsize=None)
def language(spec: Spec1D) -> Language:
    return Language(presentation(spec))


@dataclass(frozen=True)
class BlockChecker:
    """Vectorized local check for SFT and Markov specs.

    A word of length at least ``m`` is admissible iff each of its ``m``-blocks
    is an edge of the trimmed presentation.
    """

    alphabet: Alphabet
    m: int
    ok: np.ndarray = field(repr=False)

    def codes(self, cells: np.ndarray) -> np.ndarray:
        """Base-k codes of the blocks starting at each position (length n-m+1)."""
        k = self.alphabet.size
        cells = np.asarray(cells, dtype=np.int64)
        n = len(cells) - self.m + 1
        if n <= 0:
            return np.zeros(0, dtype=np.int64)
        code = np.zeros(n, dtype=np.int64)
        for j in range(self.m):
            code = code * k + cells[j:j + n]
        return code

    def bad_starts(self, cells: np.ndarray) -> np.ndarray:
        return ~self.ok[self.codes(cells)]

    def bad_starts_cyclic(self, cells: np.ndarray) -> np.ndarray:
        """Bad block starts on a torus (block at i covers i..i+m-1 mod N)."""
        cells = np.asarray(cells, dtype=np.int64)
        n = len(cells)
        ext = cells[np.arange(n + self.m - 1) % n]
        return self.bad_starts(ext)


@lru_cache(maxsize=None)
def block_checker(spec: Spec1D) -> BlockChecker | None:
    m = block_length(spec)
    if m is None:
        return None
    k = spec.alphabet.size
    g = presentation(spec)
    ok = np.zeros(k ** m, dtype=bool)
    if isinstance(spec, SftSpec):
        # rebuild block codes from trimmed edges: vertex name + label
        for u, v, c in g.edges:
            pre = spec.alphabet.parse(g.names[u]) if spec.alphabet.single_char else \
                tuple(spec.alphabet.index(s) for s in g.names[u].split("|"))
            code = 0
            for x in pre + (c,):
                code = code * k + x
            ok[code] = True
    else:
        for u, v, c in g.edges:
            ok[u * k + v] = True
    ok.setflags(write=False)
    return BlockChecker(spec.alphabet, m, ok)


def is_admissible(spec: Spec1D, w: Word) -> bool:
    """True iff ``w`` occurs in some point of the subshift."""
    check_alphabet(spec, w.alphabet)
    return language(spec).accepts(w.cells)


def admissible_words(spec: Spec1D, n: int) -> list[tuple[int, ...]]:
    return language(spec).words(n)


# --------------------------------------------------------------------------
# higher-block recoding


@dataclass(frozen=True)
class BlockCode:
    """Bijection between configurations and block configurations."""

    alphabet: Alphabet
    radius: int
    blocks: tuple

    @cached_property
    def index(self) -> dict:
        return {b: i for i, b in enumerate(self.blocks)}

    def encode(self, w: Word) -> list[int | None]:
        """Block index at each position of ``w`` that has a full block (None if forbidden)."""
        m = 2 * self.radius + 1
        c = w.cells
        return [self.index.get(tuple(c[i:i + m])) for i in range(len(c) - m + 1)]

    def decode(self, states: Sequence[int]) -> Word:
        """Inverse of :meth:`encode` on a consistent state path."""
        if not states:
            return Word(self.alphabet, ())
        first = self.blocks[states[0]]
        return Word(self.alphabet, tuple(first) + tuple(self.blocks[s][-1] for s in states[1:]))


def recode_to_markov(spec: SftSpec) -> tuple[MarkovSpec, BlockCode]:
    """Markov shift on the allowed ``(2r+1)``-blocks with overlap transitions."""
    if not isinstance(spec, SftSpec):
        raise UnsupportedStructure("recoding needs a 1D SFT")
    if not spec.blocks:
        raise SubshiftError("SFT has no allowed blocks")
    blocks = tuple(sorted(spec.blocks))
    alph = Alphabet(tuple(_block_label(spec.alphabet, b) for b in blocks))
    by_prefix: dict = {}
    for j, b in enumerate(blocks):
        by_prefix.setdefault(b[:-1], []).append(j)
    trans = frozenset((i, j) for i, b in enumerate(blocks) for j in by_prefix.get(b[1:], ()))
    return MarkovSpec(alph, trans, spec.name), BlockCode(spec.alphabet, spec.radius, blocks)


# --------------------------------------------------------------------------
# transitive decomposition and periods


@dataclass(frozen=True)
class TransitiveComponent:
    """Recurrent strongly connected component of a Markov digraph."""

    id: int
    states: tuple
    symbols: tuple
    edges: tuple

    def __contains__(self, state: int) -> bool:
        return state in self.states


@dataclass(frozen=True)
class Decomposition:
    components: tuple
    transient: tuple
    markov: MarkovSpec

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i) -> TransitiveComponent:
        return self.components[i]

    @cached_property
    def component_of(self) -> dict:
        return {s: c.id for c in self.components for s in c.states}


def _sccs(n: int, adj: Sequence[Sequence[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative."""
    index = [-1] * n
    low = [0] * n
    on = [False] * n
    stack: list = []
    out: list = []
    counter = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on[root] = True
        while work:
            v, i = work[-1]
            if i < len(adj[v]):
                work[-1] = (v, i + 1)
                w = adj[v][i]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on[w] = True
                    work.append((w, 0))
                elif on[w]:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on[w] = False
                        comp.append(w)
                        if w == v:
                            break
                    out.append(sorted(comp))
    return out


def transitive_decomposition(m: MarkovSpec) -> Decomposition:
    """Recurrent SCCs ordered by least member state; the rest are transient."""
    n = m.alphabet.size
    adj = [[] for _ in range(n)]
    for a, b in sorted(m.transitions):
        adj[a].append(b)
    comps = []
    for scc in _sccs(n, adj):
        members = set(scc)
        edges = tuple(sorted((a, b) for a, b in m.transitions if a in members and b in members))
        if edges:
            comps.append((scc, edges))
    comps.sort(key=lambda c: c[0][0])
    covered = {s for scc, _ in comps for s in scc}
    out = tuple(TransitiveComponent(i, tuple(scc), tuple(m.alphabet.symbols[s] for s in scc), edges)
                for i, (scc, edges) in enumerate(comps))
    return Decomposition(out, tuple(s for s in range(n) if s not in covered), m)


def period_and_phases(c: TransitiveComponent) -> tuple[int, dict]:
    """Period ``P`` and phase map normalized so the least state has phase 0."""
    adj: dict = {s: [] for s in c.states}
    for a, b in c.edges:
        adj[a].append(b)
    root = c.states[0]
    level = {root: 0}
    queue = [root]
    for u in queue:
        for v in adj[u]:
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    g = 0
    for a, b in c.edges:
        g = gcd(g, level[a] + 1 - level[b])
    p = abs(g) or 1
    return p, {s: level[s] % p for s in c.states}


def _state_index(m: MarkovSpec, s) -> int:
    if isinstance(s, (int, np.integer)):
        if not 0 <= s < m.alphabet.size:
            raise SubshiftError(f"unknown state {s}")
        return int(s)
    try:
        return m.alphabet.index(s)
    except AlphabetError:
        raise SubshiftError(f"unknown state {s!r}") from None


def reachable_in_time(m: MarkovSpec, a, c, t: int) -> bool:
    """True iff a path of exactly ``t`` steps leads from ``a`` to ``c``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    ia, ic = _state_index(m, a), _state_index(m, c)
    n = m.alphabet.size
    mat = np.zeros((n, n), dtype=bool)
    for x, y in m.transitions:
        mat[x, y] = True
    vec = np.zeros(n, dtype=bool)
    vec[ia] = True
    # vector times matrix power by repeated squaring
    while t:
        if t & 1:
            vec = (vec.astype(np.int64) @ mat.astype(np.int64)) > 0
        mat = (mat.astype(np.int64) @ mat.astype(np.int64)) > 0
        t >>= 1
    return bool(vec[ic])


@dataclass(frozen=True, eq=False)
class StateStructure:
    """Locally readable Markov structure of a 1D SFT or Markov shift.

    The state at cell ``z`` is the block ``a[z-radius .. z+radius]`` (SFT,
    through its higher-block recoding) or the symbol ``a[z]`` (Markov).
    """

    spec: object
    markov: MarkovSpec
    decomposition: Decomposition
    radius: int
    code_to_state: np.ndarray = field(repr=False)
    periods: tuple
    phase_of_state: np.ndarray = field(repr=False)
    comp_of_state: np.ndarray = field(repr=False)

    def states_at(self, cells: np.ndarray) -> np.ndarray:
        """State index at positions ``radius .. n-1-radius`` of ``cells`` (-1 if none)."""
        cells = np.asarray(cells, dtype=np.int64)
        k = self.spec.alphabet.size
        m = 2 * self.radius + 1
        n = len(cells) - m + 1
        if n <= 0:
            return np.zeros(0, dtype=np.int64)
        code = np.zeros(n, dtype=np.int64)
        for j in range(m):
            code = code * k + cells[j:j + n]
        return self.code_to_state[code]

    def state_cells(self, state: int) -> tuple:
        """Symbols of the block a state stands for."""
        if isinstance(self.spec, SftSpec):
            return self._blocks[state]
        return (state,)

    @cached_property
    def _blocks(self) -> tuple:
        return tuple(sorted(self.spec.blocks))

    def center_symbol(self, state: int) -> int:
        return self.state_cells(state)[self.radius]


@lru_cache(maxsize=None)
def state_structure(spec: Spec1D) -> StateStructure:
    """Decomposition, periods and phases of a 1D SFT or Markov spec."""
    if isinstance(spec, SftSpec):
        markov, code = recode_to_markov(spec)
        radius = spec.radius
        k = spec.alphabet.size
        table = np.full(k ** spec.block_length, -1, dtype=np.int64)
        for i, b in enumerate(code.blocks):
            c = 0
            for x in b:
                c = c * k + x
            table[c] = i
    elif isinstance(spec, MarkovSpec):
        markov = spec
        radius = 0
        table = np.arange(spec.alphabet.size, dtype=np.int64)
    else:
        raise UnsupportedStructure("phase structure needs an SFT or Markov presentation")
    dec = transitive_decomposition(markov)
    n = markov.alphabet.size
    phase = np.full(n, -1, dtype=np.int64)
    comp = np.full(n, -1, dtype=np.int64)
    periods = []
    for c in dec.components:
        p, ph = period_and_phases(c)
        periods.append(p)
        for s, v in ph.items():
            phase[s] = v
            comp[s] = c.id
    for arr in (table, phase, comp):
        arr.setflags(write=False)
    return StateStructure(spec, markov, dec, radius, table, tuple(periods), phase, comp)


# --------------------------------------------------------------------------
# 2D edge-matching SFTs


def wang_bond_violations(spec: WangSpec, cells: np.ndarray, periodic: bool):
    """Boolean arrays of forbidden horizontal and vertical bonds.

    ``hbad[y, x]`` concerns the bond between ``(x, y)`` and ``(x+1, y)``;
    ``vbad[y, x]`` the bond between ``(x, y)`` and ``(x, y+1)``. Without
    periodic wrap the last column/row of bonds is reported as fine.
    """
    k = spec.alphabet.size
    hok = np.zeros((k, k), dtype=bool)
    vok = np.zeros((k, k), dtype=bool)
    for a, b in spec.horizontal:
        hok[a, b] = True
    for a, b in spec.vertical:
        vok[a, b] = True
    right = np.roll(cells, -1, axis=1)
    up = np.roll(cells, -1, axis=0)
    hbad = ~hok[cells, right]
    vbad = ~vok[cells, up]
    if not periodic:
        hbad[:, -1] = False
        vbad[-1, :] = False
    return hbad, vbad


def wang_patch_admissible(spec: WangSpec, patch: np.ndarray, sweeps: int | None = None) -> bool:
    """Local constraints plus one ring of existential extension.

    The ring cells get full candidate sets which are pruned by arc consistency
    against the patch and each other, for at most ``W*H*k`` sweeps.
    """
    patch = np.asarray(patch, dtype=np.int64)
    h, w = patch.shape
    hbad, vbad = wang_bond_violations(spec, patch, periodic=False)
    if hbad.any() or vbad.any():
        return False
    k = spec.alphabet.size
    H, W = h + 2, w + 2
    dom = np.ones((H, W, k), dtype=bool)
    dom[1:-1, 1:-1, :] = False
    for y in range(h):
        for x in range(w):
            dom[y + 1, x + 1, patch[y, x]] = True
    # corners of the ring do not touch the patch and impose nothing new
    hok = np.zeros((k, k), dtype=bool)
    vok = np.zeros((k, k), dtype=bool)
    for a, b in spec.horizontal:
        hok[a, b] = True
    for a, b in spec.vertical:
        vok[a, b] = True
    limit = sweeps if sweeps is not None else w * h * k
    for _ in range(max(limit, 1)):
        changed = False
        # horizontal bonds
        left, right = dom[:, :-1, :], dom[:, 1:, :]
        new_left = left & ((right.astype(np.int64) @ hok.T.astype(np.int64)) > 0)
        new_right = right & ((left.astype(np.int64) @ hok.astype(np.int64)) > 0)
        if not (np.array_equal(new_left, left) and np.array_equal(new_right, right)):
            changed = True
        dom[:, :-1, :] = new_left
        dom[:, 1:, :] &= new_right
        low, high = dom[:-1, :, :], dom[1:, :, :]
        new_low = low & ((high.astype(np.int64) @ vok.T.astype(np.int64)) > 0)
        new_high = high & ((low.astype(np.int64) @ vok.astype(np.int64)) > 0)
        if not (np.array_equal(new_low, low) and np.array_equal(new_high, high)):
            changed = True
        dom[:-1, :, :] = new_low
        dom[1:, :, :] &= new_high
        if not dom.any(axis=2).all():
            return False
        if not changed:
            break
    return bool(dom.any(axis=2).all())


def wang_periodic_points(spec: WangSpec, max_period: int = 4) -> list[np.ndarray]:
    """Valid tori of size ``q x p`` (``p, q <= max_period``), as arrays ``[y, x]``.

    Each torus is returned once in its smallest size; translates are kept.
    """
    k = spec.alphabet.size
    hok = {(a, b) for a, b in spec.horizontal}
    vok = {(a, b) for a, b in spec.vertical}
    seen: set = set()
    out: list = []
    for q in range(1, max_period + 1):
        for p in range(1, max_period + 1):
            cells = [0] * (p * q)

            def rec(i):
                if i == p * q:
                    yield np.array(cells, dtype=np.int64).reshape(q, p)
                    return
                y, x = divmod(i, p)
                for s in range(k):
                    if x > 0 and (cells[i - 1], s) not in hok:
                        continue
                    if x == p - 1 and (s, s if p == 1 else cells[y * p]) not in hok:
                        continue
                    if y > 0 and (cells[i - p], s) not in vok:
                        continue
                    if y == q - 1 and (s, s if q == 1 else cells[x]) not in vok:
                        continue
                    cells[i] = s
                    yield from rec(i + 1)

            for arr in rec(0):
                key = _torus_key(arr, max_period)
                if key not in seen:
                    seen.add(key)
                    out.append(arr)
    return out


def _torus_key(arr: np.ndarray, size: int) -> bytes:
    reps = (size // arr.shape[0] + 1, size // arr.shape[1] + 1)
    big = np.tile(arr, (reps[0] * arr.shape[0], reps[1] * arr.shape[1]))
    return big[: 2 * size, : 2 * size].tobytes()


def torus_stabilizer(arr: np.ndarray) -> list[tuple[int, int]]:
    """Generators ``(dx, dy)`` of the periodicity lattice of a torus pattern."""
    q, p = arr.shape
    gens = []
    for dy in range(q):
        for dx in range(p):
            if (dx or dy) and np.array_equal(np.roll(arr, (-dy, -dx), axis=(0, 1)), arr):
                gens.append((dx, dy))
    gens += [(p, 0), (0, q)]
    return gens


# --------------------------------------------------------------------------
# JSON


def spec_from_json(obj: dict) -> Spec:
    """Parse a subshift specification from its JSON form."""
    kind = obj.get("type")
    alphabet = Alphabet.of(obj.get("alphabet", ("0", "1")))
    name = str(obj.get("name", ""))
    if kind == "sft":
        if "orbits" in obj:
            return SftSpec.from_orbits(alphabet, obj["orbits"], obj.get("radius"), name)
        return SftSpec.from_words(alphabet, int(obj["radius"]), obj["blocks"], name)
    if kind == "markov":
        if obj.get("full"):
            return MarkovSpec.full_shift(alphabet, name or "full")
        return MarkovSpec.from_labels(alphabet, obj["transitions"], name)
    if kind == "sofic":
        kw = {}
        if "markers" in obj:
            kw = {"markers": tuple((alphabet.parse(m["pattern"]), int(m["phase"]))
                                   for m in obj["markers"]["patterns"]),
                  "marker_period": int(obj["markers"]["period"])}
        if "vertex_labels" in obj:
            return SoficSpec.from_vertex_labelled(alphabet, obj["vertex_labels"], obj["arcs"],
                                                  obj.get("states"), name, **kw)
        states = tuple(obj["states"])
        sidx = {s: i for i, s in enumerate(states)}
        edges = frozenset((sidx[u], sidx[v], alphabet.index(c)) for u, v, c in obj["edges"])
        return SoficSpec(alphabet, states, edges, name, **kw)
    if kind == "wang":
        h = frozenset((alphabet.index(a), alphabet.index(b)) for a, b in obj["horizontal"])
        v = frozenset((alphabet.index(a), alphabet.index(b)) for a, b in obj["vertical"])
        return WangSpec(alphabet, h, v, name)
    raise SubshiftError(f"unknown subshift type {kind!r}")


def spec_to_json(spec: Spec) -> dict:
    a = spec.alphabet
    base = {"name": spec.name, "alphabet": list(a.symbols)}
    if isinstance(spec, SftSpec):
        return {"type": "sft", **base, "radius": spec.radius,
                "blocks": [a.render(b) for b in sorted(spec.blocks)]}
    if isinstance(spec, MarkovSpec):
        return {"type": "markov", **base,
                "transitions": [[a.label(x), a.label(y)] for x, y in sorted(spec.transitions)]}
    if isinstance(spec, SoficSpec):
        out = {"type": "sofic", **base, "states": list(spec.states),
               "edges": [[spec.states[u], spec.states[v], a.label(c)] for u, v, c in sorted(spec.edges)]}
        if spec.markers:
            out["markers"] = {"period": spec.marker_period,
                              "patterns": [{"pattern": a.render(p), "phase": ph} for p, ph in spec.markers]}
        return out
    return {"type": "wang", **base,
            "horizontal": [[a.label(x), a.label(y)] for x, y in sorted(spec.horizontal)],
            "vertical": [[a.label(x), a.label(y)] for x, y in sorted(spec.vertical)]}
