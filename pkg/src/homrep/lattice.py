"""Exact integer linear algebra on small dense matrices.

Everything works with Python ints (lists of lists, row convention), so
there is no overflow and no floating point anywhere.  Sizes in this
package are tiny (a few dozen columns at most), which is why a plain
row-style Hermite normal form is enough for membership, solving,
inverses, kernels and intersections.
"""
from __future__ import annotations

from typing import Sequence

Row = list[int]


def _axpy(dst: Row, q: int, src: Row) -> Row:
    # dst - q*src
    return [d - q * s for d, s in zip(dst, src)]


def hnf(rows: Sequence[Sequence[int]], ncols: int | None = None):
    """Row Hermite normal form of ``rows``.

    Only the first ``ncols`` columns are used for pivoting; any further
    columns ride along, which is how transformation matrices are tracked.
    Returns ``(basis, pivots, null_rows)``: the echelon rows with a nonzero
    leading part, their pivot columns, and the rows whose leading part
    vanished (useful for left kernels).
    """
    A = [list(r) for r in rows]
    if not A:
        return [], [], []
    if ncols is None:
        ncols = len(A[0])
    m = len(A)
    r = 0
    pivots = []
    for col in range(ncols):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][col] != 0]
            if not nz:
                break
            best = min(nz, key=lambda i: abs(A[i][col]))
            if best != r:
                A[r], A[best] = A[best], A[r]
            if len(nz) == 1:
                break
            p = A[r][col]
            for i in range(r + 1, m):
                if A[i][col] != 0:
                    A[i] = _axpy(A[i], A[i][col] // p, A[r])
        if all(A[i][col] == 0 for i in range(r, m)):
            continue
        if A[r][col] < 0:
            A[r] = [-x for x in A[r]]
        p = A[r][col]
        for i in range(r):
            if A[i][col] < 0 or A[i][col] >= p:
                A[i] = _axpy(A[i], A[i][col] // p, A[r])
        pivots.append(col)
        r += 1
    return A[:r], pivots, A[r:]


class Lattice:
    """A sublattice of Z^n given by generators, stored in Hermite form."""

    __slots__ = ("dim", "basis", "pivots")

    def __init__(self, gens: Sequence[Sequence[int]], dim: int):
        self.dim = dim
        if gens:
            self.basis, self.pivots, _ = hnf(gens, dim)
        else:
            self.basis, self.pivots = [], []

    @property
    def rank(self) -> int:
        return len(self.basis)

    def coords(self, v: Sequence[int]) -> list[int] | None:
        """Coefficients of ``v`` in the Hermite basis, or None if v is not in the lattice."""
        v = list(v)
        out = []
        for row, pc in zip(self.basis, self.pivots):
            # entries left of the pivot must already be zero
            for j in range(pc):
                if v[j] != 0:
                    return None
            q, rem = divmod(v[pc], row[pc])
            if rem:
                return None
            out.append(q)
            if q:
                v = _axpy(v, q, row)
        if any(v):
            return None
        return out

    def contains(self, v: Sequence[int]) -> bool:
        return self.coords(v) is not None

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(b) for b in other.basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        # the reduced Hermite form is canonical
        return self.dim == other.dim and self.basis == other.basis

    def __hash__(self):
        return hash(tuple(map(tuple, self.basis)))

    def __repr__(self):
        return f"Lattice(rank={self.rank}, dim={self.dim})"


def solve(gens: Sequence[Sequence[int]], v: Sequence[int]) -> list[int] | None:
    """Integer coefficients c with sum c_i gens_i == v, or None."""
    n = len(gens)
    if n == 0:
        return [] if not any(v) else None
    dim = len(gens[0])
    aug = [list(g) + [1 if j == i else 0 for j in range(n)] for i, g in enumerate(gens)]
    basis, pivots, _ = hnf(aug, dim)
    L = Lattice.__new__(Lattice)
    L.dim = dim
    L.basis = [b[:dim] for b in basis]
    L.pivots = pivots
    c = L.coords(v)
    if c is None:
        return None
    out = [0] * n
    for ci, b in zip(c, basis):
        if ci:
            for j in range(n):
                out[j] += ci * b[dim + j]
    return out


def left_kernel(rows: Sequence[Sequence[int]]) -> list[Row]:
    """Basis of integer vectors k with k * rows == 0."""
    m = len(rows)
    if m == 0:
        return []
    dim = len(rows[0])
    aug = [list(r) + [1 if j == i else 0 for j in range(m)] for i, r in enumerate(rows)]
    _, _, null = hnf(aug, dim)
    return [r[dim:] for r in null]


def intersect(A: Lattice, B: Lattice) -> Lattice:
    if A.rank == 0 or B.rank == 0:
        return Lattice([], A.dim)
    ker = left_kernel(A.basis + B.basis)
    gens = []
    for k in ker:
        alpha = k[:A.rank]
        gens.append([sum(a * row[j] for a, row in zip(alpha, A.basis)) for j in range(A.dim)])
    return Lattice(gens, A.dim)


def det(M: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            Ai = A[i]
            Ak = A[k]
            for j in range(k + 1, n):
                Ai[j] = (Ai[j] * akk - aik * Ak[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def inverse(M: Sequence[Sequence[int]]) -> list[Row] | None:
    """Integer inverse of a square matrix, or None if it is not unimodular."""
    n = len(M)
    aug = [list(r) + [1 if j == i else 0 for j in range(n)] for i, r in enumerate(M)]
    basis, pivots, _ = hnf(aug, n)
    if pivots != list(range(n)):
        return None
    for i, b in enumerate(basis):
        if b[i] != 1:
            return None
    return [b[n:] for b in basis]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[Row]:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def identity(n: int) -> list[Row]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]
