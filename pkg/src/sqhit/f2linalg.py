"""Exact linear algebra over GF(2) with int-packed bit rows.

Vectors are rows and maps act on the right: a matrix M sends v to v*M,
so composition reads left to right.  Bit j of a packed int is coordinate j.
All operations are pure; inputs are never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence


@dataclass(frozen=True)
class BitVector:
    """A vector in F_2^length with coordinates packed into an int."""

    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("negative length")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits set outside declared length")

    @classmethod
    def from_coords(cls, coords: Iterable[int]) -> "BitVector":
        coords = list(coords)
        bits = 0
        for j, c in enumerate(coords):
            if c & 1:
                bits |= 1 << j
        return cls(len(coords), bits)

    def coords(self) -> List[int]:
        return [(self.bits >> j) & 1 for j in range(self.length)]

    def __add__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return BitVector(self.length, self.bits ^ other.bits)

    def __getitem__(self, j: int) -> int:
        return (self.bits >> j) & 1

    def is_zero(self) -> bool:
        return self.bits == 0


@dataclass(frozen=True)
class BitMatrix:
    """Row-major GF(2) matrix; data[i] is the packed i-th row."""

    rows: int
    cols: int
    data: tuple

    def __post_init__(self):
        if len(self.data) != self.rows:
            raise ValueError("row count mismatch")
        for r in self.data:
            if r < 0 or r >> self.cols:
                raise ValueError("row has bits outside column range")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "BitMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        packed = tuple(BitVector.from_coords(r).bits for r in rows)
        return cls(len(rows), cols, packed)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    def apply(self, v: BitVector) -> BitVector:
        """Right action v*M; v indexes the rows of M."""
        if v.length != self.rows:
            raise ValueError("vector length must equal row count")
        out = 0
        bits = v.bits
        i = 0
        while bits:
            if bits & 1:
                out ^= self.data[i]
            bits >>= 1
            i += 1
        return BitVector(self.cols, out)

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.data[i])


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_2^ambient_dim given by a reduced row-echelon basis."""

    ambient_dim: int
    basis: tuple

    def __post_init__(self):
        prev = -1
        for r in self.basis:
            if r == 0:
                raise ValueError("zero basis row")
            p = _lowest_bit(r)
            if p <= prev:
                raise ValueError("pivots not strictly increasing")
            prev = p

    @property
    def dim(self) -> int:
        return len(self.basis)

    def pivots(self) -> List[int]:
        return [_lowest_bit(r) for r in self.basis]

    def reduce(self, bits: int) -> int:
        """Reduce a packed vector against the basis; zero iff contained."""
        for row in self.basis:
            p = _lowest_bit(row)
            if (bits >> p) & 1:
                bits ^= row
        return bits

    def vectors(self):
        """Iterate all 2^dim member vectors (small subspaces only)."""
        n = self.dim
        for mask in range(1 << n):
            bits = 0
            for i in range(n):
                if (mask >> i) & 1:
                    bits ^= self.basis[i]
            yield BitVector(self.ambient_dim, bits)


def _lowest_bit(x: int) -> int:
    return (x & -x).bit_length() - 1


def _rref_rows(rows: List[int]) -> List[int]:
    """In-place style Gauss-Jordan on packed rows; returns sorted RREF rows."""
    work = list(rows)
    pivots: List[int] = []  # (pivot col, row) pairs kept implicitly via echelon list
    echelon: List[int] = []
    for r in work:
        for e in echelon:
            p = _lowest_bit(e)
            if (r >> p) & 1:
                r ^= e
        if r == 0:
            continue
        p = _lowest_bit(r)
        for i, e in enumerate(echelon):
            if (e >> p) & 1:
                echelon[i] = e ^ r
        echelon.append(r)
    echelon.sort(key=_lowest_bit)
    return echelon


def rref(m: BitMatrix) -> BitMatrix:
    """Reduced row-echelon form with zero rows pruned; row space preserved."""
    rows = _rref_rows(list(m.data))
    return BitMatrix(len(rows), m.cols, tuple(rows))


def rank(m: BitMatrix) -> int:
    return len(_rref_rows(list(m.data)))


def subspace_from_rows(ambient_dim: int, rows: Iterable[int]) -> Subspace:
    return Subspace(ambient_dim, tuple(_rref_rows(list(rows))))


def image_basis(m: BitMatrix) -> Subspace:
    """Row space of m: the image of the right-action map v -> v*m."""
    return subspace_from_rows(m.cols, m.data)


def kernel_basis(m: BitMatrix) -> Subspace:
    """Left kernel: all v with v*m = 0.  dim = rows - rank."""
    n = m.rows
    # Track row combinations through elimination: pairs (value, combo).
    echelon: List[tuple] = []
    kernel_rows: List[int] = []
    for i in range(n):
        val, combo = m.data[i], 1 << i
        for ev, ec in echelon:
            p = _lowest_bit(ev)
            if (val >> p) & 1:
                val ^= ev
                combo ^= ec
        if val == 0:
            kernel_rows.append(combo)
        else:
            echelon.append((val, combo))
    return subspace_from_rows(n, kernel_rows)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the Zassenhaus trick on stacked (x|x) and (y|0) rows."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    n = a.ambient_dim
    # Low bits hold the actual coordinates (eliminated first by the
    # lowest-bit pivoting); high bits carry a copy tracking a-combinations.
    stacked = [r | (r << n) for r in a.basis] + [r for r in b.basis]
    mask = (1 << n) - 1
    result = [row >> n for row in _rref_rows(stacked) if row & mask == 0]
    return subspace_from_rows(n, result)


def contains(s: Subspace, v: BitVector) -> bool:
    if s.ambient_dim != v.length:
        raise ValueError("length mismatch")
    return s.reduce(v.bits) == 0


def contains_subspace(outer: Subspace, inner: Subspace) -> bool:
    return all(outer.reduce(r) == 0 for r in inner.basis)


def solve(m: BitMatrix, b: BitVector) -> Optional[BitVector]:
    """Some v with v*m = b, or None.  Free coordinates are fixed to 0."""
    if b.length != m.cols:
        raise ValueError("target length must equal column count")
    echelon: List[tuple] = []
    for i in range(m.rows):
        val, combo = m.data[i], 1 << i
        for ev, ec in echelon:
            p = _lowest_bit(ev)
            if (val >> p) & 1:
                val ^= ev
                combo ^= ec
        if val:
            echelon.append((val, combo))
    residue, combo = b.bits, 0
    for ev, ec in echelon:
        p = _lowest_bit(ev)
        if (residue >> p) & 1:
            residue ^= ev
            combo ^= ec
    if residue:
        return None
    return BitVector(m.rows, combo)


def full_space(n: int) -> Subspace:
    return Subspace(n, tuple(1 << i for i in range(n)))


def zero_space(n: int) -> Subspace:
    return Subspace(n, ())
