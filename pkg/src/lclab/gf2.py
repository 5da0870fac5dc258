"""Dense GF(2) matrices with rows packed into Python integers."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Gf2Matrix:
    """rows[i] holds row i; bit j of rows[i] is entry (i, j)."""

    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.nrows < 1 or self.ncols < 1:
            raise ValueError("matrix dimensions must be positive")
        if len(self.rows) != self.nrows:
            raise ValueError("row count mismatch")
        limit = 1 << self.ncols
        if any(r < 0 or r >= limit for r in self.rows):
            raise ValueError("row has entries beyond ncols")

    @classmethod
    def from_columns(cls, nrows: int, columns) -> "Gf2Matrix":
        """Build from column bitmasks (bit i of a column = entry in row i)."""
        columns = list(columns)
        rows = [0] * nrows
        for j, col in enumerate(columns):
            i = 0
            while col:
                if col & 1:
                    rows[i] |= 1 << j
                col >>= 1
                i += 1
        return cls(nrows, len(columns), tuple(rows))

    @classmethod
    def from_lists(cls, entries) -> "Gf2Matrix":
        entries = [list(r) for r in entries]
        rows = tuple(sum((v & 1) << j for j, v in enumerate(r)) for r in entries)
        return cls(len(entries), len(entries[0]) if entries else 0, rows)

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [[self.entry(i, j) for j in range(self.ncols)] for i in range(self.nrows)]

    def columns(self) -> list[int]:
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            j = 0
            while r:
                if r & 1:
                    cols[j] |= 1 << i
                r >>= 1
                j += 1
        return cols

    def matvec(self, v) -> tuple[int, ...]:
        """Multiply by a 0/1 vector given as a sequence (entry j = v[j])."""
        if len(v) != self.ncols:
            raise ValueError("vector length does not match ncols")
        x = sum((b & 1) << j for j, b in enumerate(v))
        return tuple(bin(r & x).count("1") & 1 for r in self.rows)

    def rank(self) -> int:
        return rank(self.rows)


def rank(vectors) -> int:
    """Rank of a family of bit vectors."""
    pivots: dict[int, int] = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top in pivots:
                v ^= pivots[top]
            else:
                pivots[top] = v
                break
    return len(pivots)


class XorBasis:
    """Echelon basis that remembers how each vector was formed.

    Each inserted column gets a tag bit; reducing a vector yields the
    combination of tags that produces it.
    """

    def __init__(self):
        self._pivots: dict[int, tuple[int, int]] = {}

    def __len__(self):
        return len(self._pivots)

    def reduce(self, v: int, tag: int = 0) -> tuple[int, int]:
        while v:
            top = v.bit_length() - 1
            hit = self._pivots.get(top)
            if hit is None:
                break
            v ^= hit[0]
            tag ^= hit[1]
        return v, tag

    def insert(self, v: int, tag: int) -> tuple[int, int]:
        """Insert v; return (0, tag-combination) if v was dependent."""
        v, tag = self.reduce(v, tag)
        if v:
            self._pivots[v.bit_length() - 1] = (v, tag)
        return v, tag


class ColumnSolver:
    """Solve M u = v for a fixed matrix given by its columns."""

    def __init__(self, columns):
        self.columns = list(columns)
        self.basis = XorBasis()
        self.kernel: list[int] = []
        for j, c in enumerate(self.columns):
            rest, tag = self.basis.insert(c, 1 << j)
            if not rest:
                self.kernel.append(tag)

    @property
    def injective(self) -> bool:
        return not self.kernel

    def solve(self, v: int) -> int | None:
        """One preimage (as a bitmask over columns) or None."""
        rest, tag = self.basis.reduce(v, 0)
        if rest:
            return None
        return tag


def image_intersection(cols_a, cols_b) -> list[int]:
    """Basis of span(cols_a) ∩ span(cols_b)."""
    basis = XorBasis()
    for c in cols_a:
        basis.insert(c, 0)
    cols_b = list(cols_b)
    found = XorBasis()
    out = []
    for j, c in enumerate(cols_b):
        rest, tag = basis.insert(c, 1 << j)
        if rest or not tag:
            continue
        vec = 0
        t, i = tag, 0
        while t:
            if t & 1:
                vec ^= cols_b[i]
            t >>= 1
            i += 1
        # dependent columns of cols_b can produce zero or repeated vectors
        if vec and found.insert(vec, 0)[0]:
            out.append(vec)
    return out


def span(basis) -> list[int]:
    """Every vector in the span of an independent family."""
    vecs = [0]
    for b in basis:
        vecs += [v ^ b for v in vecs]
    return vecs
