"""Alphabets, words and configurations with exact cell access.

Three configuration types are provided:

* :class:`EpConfig` -- an eventually periodic bi-infinite sequence
  ``...LLLL C RRRR...``.
* :class:`CyclicConfig` -- a word read modulo its length (a 1D torus).
* :class:`Grid2D` -- a finite 2D array. Coordinates are ``(x, y)`` with ``x``
  increasing to the right and ``y`` increasing upward. Cells are stored
  row-major with row ``y = 0`` first.

All values are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

import numpy as np


class AlphabetError(ValueError):
    """Raised when a word or configuration mixes alphabets or unknown labels."""


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct printable symbol labels."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        syms = tuple(str(s) for s in self.symbols)
        object.__setattr__(self, "symbols", syms)
        if not syms:
            raise AlphabetError("alphabet must be nonempty")
        if len(set(syms)) != len(syms):
            raise AlphabetError(f"duplicate labels in {syms}")

    @classmethod
    def of(cls, symbols: Iterable) -> "Alphabet":
        return cls(tuple(symbols))

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def size(self) -> int:
        return len(self.symbols)

    @property
    def single_char(self) -> bool:
        return all(len(s) == 1 for s in self.symbols)

    def index(self, label) -> int:
        try:
            return self.symbols.index(str(label))
        except ValueError:
            raise AlphabetError(f"unknown symbol {label!r}") from None

    def label(self, i: int) -> str:
        return self.symbols[i]

    def parse(self, text) -> tuple[int, ...]:
        """Parse a string (single-character labels) or a list of labels."""
        if isinstance(text, str):
            if not self.single_char:
                raise AlphabetError("multi-character labels need list form")
            return tuple(self.index(ch) for ch in text)
        return tuple(self.index(s) for s in text)

    def render(self, cells: Iterable[int]):
        """Inverse of :meth:`parse`: a string if possible, else a list."""
        labels = [self.symbols[i] for i in cells]
        return "".join(labels) if self.single_char else labels


BINARY = Alphabet(("0", "1"))


@dataclass(frozen=True)
class Word:
    """A finite block of symbol indices over an alphabet."""

    alphabet: Alphabet
    cells: tuple[int, ...]

    def __post_init__(self):
        cells = tuple(int(c) for c in self.cells)
        object.__setattr__(self, "cells", cells)
        k = self.alphabet.size
        for c in cells:
            if not 0 <= c < k:
                raise AlphabetError(f"symbol index {c} out of range for k={k}")

    @classmethod
    def parse(cls, alphabet: Alphabet, text) -> "Word":
        return cls(alphabet, alphabet.parse(text))

    def __len__(self) -> int:
        return len(self.cells)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Word(self.alphabet, self.cells[i])
        return self.cells[i]

    def __iter__(self):
        return iter(self.cells)

    def __add__(self, other: "Word") -> "Word":
        _same_alphabet(self.alphabet, other.alphabet)
        return Word(self.alphabet, self.cells + other.cells)

    def __str__(self) -> str:
        r = self.alphabet.render(self.cells)
        return r if isinstance(r, str) else " ".join(r)

    def to_json(self):
        return self.alphabet.render(self.cells)

    def array(self) -> np.ndarray:
        return np.asarray(self.cells, dtype=np.int64)


def _same_alphabet(a: Alphabet, b: Alphabet) -> None:
    if a != b:
        raise AlphabetError(f"alphabet mismatch: {a.symbols} vs {b.symbols}")


def minimal_period(cells: Sequence[int]) -> int:
    """Smallest p dividing len(cells) such that cells is p-periodic cyclically."""
    n = len(cells)
    for p in range(1, n + 1):
        if n % p == 0 and all(cells[i] == cells[(i + p) % n] for i in range(n)):
            return p
    return n


def least_rotation(cells: Sequence[int]) -> tuple[int, ...]:
    n = len(cells)
    return min(tuple(cells[i:]) + tuple(cells[:i]) for i in range(n))


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True, eq=False)
class EpConfig:
    """Eventually periodic configuration ``...left left center right right...``.

    The first center cell sits at coordinate ``anchor`` (or the first right
    tail cell when the center is empty). Tail alignment: the cell at
    ``anchor + len(center) + j`` reads ``right[j % len(right)]`` and the cell
    at ``anchor - j`` (``j >= 1``) reads ``left[-j % len(left)]``.

    Equality is read-equality, so different presentations of the same
    configuration compare equal.
    """

    left: Word
    center: Word
    right: Word
    anchor: int = 0

    def __post_init__(self):
        if len(self.left) == 0 or len(self.right) == 0:
            raise ValueError("EpConfig tails must be nonempty")
        _same_alphabet(self.left.alphabet, self.center.alphabet)
        _same_alphabet(self.left.alphabet, self.right.alphabet)
        object.__setattr__(self, "anchor", int(self.anchor))

    @classmethod
    def parse(cls, alphabet: Alphabet, left, center, right, anchor: int = 0) -> "EpConfig":
        return cls(Word.parse(alphabet, left), Word.parse(alphabet, center),
                   Word.parse(alphabet, right), anchor)

    @classmethod
    def periodic(cls, word: Word, phase: int = 0) -> "EpConfig":
        """The periodic point ``word^inf`` with ``word[0]`` at coordinate ``phase``."""
        return cls(word, Word(word.alphabet, ()), word, phase)

    @property
    def alphabet(self) -> Alphabet:
        return self.left.alphabet

    @property
    def end(self) -> int:
        """First coordinate of the right tail."""
        return self.anchor + len(self.center)

    def read(self, z: int) -> int:
        """Symbol index at coordinate ``z``."""
        a, n = self.anchor, len(self.center)
        if z < a:
            return self.left.cells[(z - a) % len(self.left)]
        if z < a + n:
            return self.center.cells[z - a]
        return self.right.cells[(z - a - n) % len(self.right)]

    def cells(self, lo: int, hi: int) -> np.ndarray:
        """Symbol indices on ``[lo, hi]`` as an int array."""
        z = np.arange(lo, hi + 1, dtype=np.int64)
        a, n = self.anchor, len(self.center)
        out = np.empty(z.shape, dtype=np.int64)
        lm = z < a
        rm = z >= a + n
        cm = ~(lm | rm)
        out[lm] = self.left.array()[(z[lm] - a) % len(self.left)]
        out[rm] = self.right.array()[(z[rm] - a - n) % len(self.right)]
        if n:
            out[cm] = self.center.array()[z[cm] - a]
        return out

    def window(self, lo: int, hi: int) -> Word:
        if lo > hi:
            raise ValueError("window needs lo <= hi")
        return Word(self.alphabet, tuple(self.cells(lo, hi).tolist()))

    def shift(self, v: int) -> "EpConfig":
        """``sigma^v``: the result reads ``self.read(z + v)`` at ``z``."""
        return EpConfig(self.left, self.center, self.right, self.anchor - v)

    def normalized(self) -> "EpConfig":
        """Minimal tail periods, with center cells absorbed into the tails."""
        k = self.alphabet
        # the left tail is read backward from the anchor, so keep its last cells
        left = list(self.left.cells[-minimal_period(self.left.cells):])
        right = list(self.right.cells[: minimal_period(self.right.cells)])
        center = list(self.center.cells)
        anchor = self.anchor
        while center and center[0] == left[0]:
            center.pop(0)
            left = left[1:] + left[:1]
            anchor += 1
        while center and center[-1] == right[-1]:
            center.pop()
            right = right[-1:] + right[:-1]
        return EpConfig(Word(k, tuple(left)), Word(k, tuple(center)),
                        Word(k, tuple(right)), anchor)

    def span(self, other: "EpConfig | None" = None) -> tuple[int, int]:
        """A window outside of which reads are determined by tail periodicity."""
        cs = [self] if other is None else [self, other]
        pl = pr = 1
        for c in cs:
            pl = _lcm(pl, len(c.left))
            pr = _lcm(pr, len(c.right))
        lo = min(c.anchor for c in cs) - pl
        hi = max(c.end for c in cs) + pr - 1
        return lo, hi

    def __eq__(self, other) -> bool:
        if not isinstance(other, EpConfig):
            return NotImplemented
        if self.alphabet != other.alphabet:
            return False
        lo, hi = self.span(other)
        return bool(np.array_equal(self.cells(lo, hi), other.cells(lo, hi)))

    def __hash__(self) -> int:
        n = self.normalized()
        return hash((least_rotation(n.left.cells), least_rotation(n.right.cells)))

    def to_json(self) -> dict:
        return {"type": "ep", "alphabet": list(self.alphabet.symbols),
                "left": self.left.to_json(), "center": self.center.to_json(),
                "right": self.right.to_json(), "anchor": self.anchor}

    def __str__(self) -> str:
        return f"...({self.left})[{self.center}]@{self.anchor}({self.right})..."


@dataclass(frozen=True)
class CyclicConfig:
    """A word read cyclically: cell ``z`` is ``word[z mod N]``."""

    word: Word

    def __post_init__(self):
        if len(self.word) == 0:
            raise ValueError("CyclicConfig needs N >= 1")

    @classmethod
    def parse(cls, alphabet: Alphabet, text) -> "CyclicConfig":
        return cls(Word.parse(alphabet, text))

    @classmethod
    def from_array(cls, alphabet: Alphabet, arr) -> "CyclicConfig":
        return cls(Word(alphabet, tuple(np.asarray(arr).tolist())))

    @property
    def alphabet(self) -> Alphabet:
        return self.word.alphabet

    @property
    def length(self) -> int:
        return len(self.word)

    def read(self, z: int) -> int:
        return self.word.cells[z % len(self.word)]

    def cells(self, lo: int, hi: int) -> np.ndarray:
        return self.word.array()[np.arange(lo, hi + 1) % len(self.word)]

    def window(self, lo: int, hi: int) -> Word:
        if lo > hi:
            raise ValueError("window needs lo <= hi")
        return Word(self.alphabet, tuple(self.cells(lo, hi).tolist()))

    def array(self) -> np.ndarray:
        return self.word.array()

    def to_json(self) -> dict:
        return {"type": "cyclic", "alphabet": list(self.alphabet.symbols),
                "word": self.word.to_json()}


@dataclass(frozen=True, eq=False)
class Grid2D:
    """Finite 2D configuration; ``cells[y, x]`` with y increasing upward."""

    alphabet: Alphabet
    cells: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.cells, dtype=np.int64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("Grid2D needs a nonempty 2D array")
        if arr.min() < 0 or arr.max() >= self.alphabet.size:
            raise AlphabetError("grid symbol index out of range")
        arr.setflags(write=False)
        object.__setattr__(self, "cells", arr)

    @classmethod
    def from_rows(cls, alphabet: Alphabet, rows: Sequence) -> "Grid2D":
        """Build from picture rows listed top (largest y) to bottom."""
        parsed = [alphabet.parse(r) for r in rows]
        if len({len(r) for r in parsed}) != 1:
            raise ValueError("ragged grid rows")
        return cls(alphabet, np.array(parsed[::-1], dtype=np.int64))

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    def read(self, x: int, y: int, periodic: bool = True) -> int:
        if periodic:
            return int(self.cells[y % self.height, x % self.width])
        return int(self.cells[y, x])

    def rows(self) -> list:
        """Picture rows, top first."""
        return [self.alphabet.render(r) for r in self.cells[::-1].tolist()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid2D):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.cells, other.cells)

    def __hash__(self) -> int:
        return hash((self.alphabet, self.cells.tobytes(), self.cells.shape))

    def to_json(self) -> dict:
        return {"type": "grid", "alphabet": list(self.alphabet.symbols), "rows": self.rows()}


Config = EpConfig | CyclicConfig | Grid2D


def config_from_json(obj: dict) -> Config:
    """Parse a configuration from its JSON form."""
    alphabet = Alphabet.of(obj.get("alphabet", ("0", "1")))
    kind = obj.get("type", "ep")
    if kind == "ep":
        return EpConfig.parse(alphabet, obj["left"], obj.get("center", ""),
                              obj["right"], int(obj.get("anchor", 0)))
    if kind == "cyclic":
        return CyclicConfig.parse(alphabet, obj["word"])
    if kind == "grid":
        return Grid2D.from_rows(alphabet, obj["rows"])
    raise ValueError(f"unknown configuration type {kind!r}")
