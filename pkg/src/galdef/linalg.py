"""Dense exact linear algebra over F_l and Z/l^K.

Matrices are plain ``numpy`` int64 arrays whose entries are residues in
``[0, modulus)``.  Every routine copies its input, so callers can treat
arrays as immutable values.  Moduli are assumed small enough that a product
of two residues fits in 63 bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sympy import isprime

from .errors import DimensionMismatch, InvalidParameters, NotAUnit

__all__ = [
    "Zmod",
    "RowReduction",
    "EchelonBasis",
    "as_matrix",
    "invert_unit",
    "row_reduce",
    "rank",
    "kernel",
    "solve_linear",
    "matmul",
]


def invert_unit(value: int, modulus: int) -> int:
    """Inverse of ``value`` in Z/modulus, raising :class:`NotAUnit` otherwise."""
    value %= modulus
    try:
        return pow(value, -1, modulus)
    except ValueError:
        raise NotAUnit(f"{value} is not a unit modulo {modulus}") from None


@dataclass(frozen=True)
class Zmod:
    """A residue in Z/l^K, kept with its prime ``ell`` and precision ``K``."""

    value: int
    ell: int
    K: int = 1

    def __post_init__(self):
        if not isprime(self.ell):
            raise InvalidParameters(f"modulus base {self.ell} is not prime")
        if self.K < 1:
            raise InvalidParameters("precision K must be >= 1")
        object.__setattr__(self, "value", self.value % self.modulus)

    @property
    def modulus(self) -> int:
        return self.ell**self.K

    def is_unit(self) -> bool:
        return self.value % self.ell != 0

    def _coerce(self, other):
        if isinstance(other, Zmod):
            if (other.ell, other.K) != (self.ell, self.K):
                raise DimensionMismatch("residues live in different rings")
            return other.value
        return int(other)

    def __add__(self, other):
        return Zmod(self.value + self._coerce(other), self.ell, self.K)

    __radd__ = __add__

    def __sub__(self, other):
        return Zmod(self.value - self._coerce(other), self.ell, self.K)

    def __rsub__(self, other):
        return Zmod(self._coerce(other) - self.value, self.ell, self.K)

    def __mul__(self, other):
        return Zmod(self.value * self._coerce(other), self.ell, self.K)

    __rmul__ = __mul__

    def __neg__(self):
        return Zmod(-self.value, self.ell, self.K)

    def __eq__(self, other):
        if isinstance(other, Zmod):
            return (self.value, self.ell, self.K) == (other.value, other.ell, other.K)
        if isinstance(other, int):
            return self.value == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.ell, self.K))

    def __int__(self):
        return self.value

    def inverse(self) -> "Zmod":
        return Zmod(invert_unit(self.value, self.modulus), self.ell, self.K)


def as_matrix(m, p: int) -> np.ndarray:
    a = np.array(m, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {a.shape}")
    return a % p


def matmul(a, b, p: int) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


@dataclass(frozen=True, eq=False)
class RowReduction:
    """Reduced row echelon form of a matrix over F_p."""

    p: int
    cols: int
    rref: np.ndarray  # nonzero rows only
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def kernel_basis(self) -> np.ndarray:
        """Rows spanning ``{v : m v = 0}``, one per free column."""
        pivset = set(self.pivots)
        free = [c for c in range(self.cols) if c not in pivset]
        basis = np.zeros((len(free), self.cols), dtype=np.int64)
        for k, f in enumerate(free):
            basis[k, f] = 1
            for r, c in enumerate(self.pivots):
                basis[k, c] = -self.rref[r, f] % self.p
        return basis


def _eliminate(a: np.ndarray, p: int, stop_col: int | None = None):
    """In-place Gauss-Jordan elimination; returns (rank, pivots)."""
    rows, cols = a.shape
    last = cols if stop_col is None else stop_col
    pivots = []
    r = 0
    for c in range(last):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r, c:] = a[r, c:] * inv % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit, c:] = (a[hit, c:] - np.outer(col[hit], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return r, pivots


def row_reduce(m, p: int) -> RowReduction:
    """Row reduce ``m`` over F_p.

    The result carries the rank, the pivot columns and a kernel basis with
    ``rank + len(kernel_basis) == cols``.
    """
    a = as_matrix(m, p)
    r, pivots = _eliminate(a, p)
    return RowReduction(p=p, cols=a.shape[1], rref=a[:r].copy(), pivots=tuple(pivots))


def rank(m, p: int) -> int:
    return row_reduce(m, p).rank


def kernel(m, p: int) -> np.ndarray:
    return row_reduce(m, p).kernel_basis


def solve_linear(a, b, p: int) -> np.ndarray | None:
    """Return some ``v`` with ``a @ v == b`` over F_p, or ``None`` if ``b`` is not in the column span."""
    a = as_matrix(a, p)
    b = np.asarray(b, dtype=np.int64).reshape(-1) % p
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"matrix has {a.shape[0]} rows but rhs has length {b.shape[0]}")
    aug = np.concatenate([a, b[:, None]], axis=1)
    r, pivots = _eliminate(aug, p, stop_col=a.shape[1])
    if np.any(aug[r:, -1]):
        return None
    v = np.zeros(a.shape[1], dtype=np.int64)
    for row, c in enumerate(pivots):
        v[c] = aug[row, -1]
    return v


class EchelonBasis:
    """Growing subspace of F_p^n kept in reduced echelon form.

    Used when a span is built up incrementally (module generators, orbit
    closures) and membership tests are interleaved with insertions.
    """

    def __init__(self, n: int, p: int):
        self.n = n
        self.p = p
        self.rows = np.zeros((0, n), dtype=np.int64)
        self.pivots: list[int] = []

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def reduce(self, vecs) -> np.ndarray:
        """Residues of ``vecs`` (one per row) modulo the current span."""
        v = np.array(vecs, dtype=np.int64).reshape(-1, self.n) % self.p
        for row, c in zip(self.rows, self.pivots):
            coef = v[:, c].copy()
            hit = np.flatnonzero(coef)
            if hit.size:
                v[hit] = (v[hit] - np.outer(coef[hit], row)) % self.p
        return v

    def contains(self, vec) -> bool:
        return not self.reduce(vec).any()

    def extend(self, vecs) -> int:
        """Add ``vecs`` to the span; returns the increase in dimension."""
        res = self.reduce(vecs)
        res = res[res.any(axis=1)]
        if res.size == 0:
            return 0
        red = row_reduce(res, self.p)
        before = self.dim
        rows = np.concatenate([self.rows, red.rref])
        pivots = self.pivots + list(red.pivots)
        # clear the new pivot columns out of the old rows
        for r_new, c in zip(red.rref, red.pivots):
            coef = rows[: len(self.pivots), c].copy()
            hit = np.flatnonzero(coef)
            if hit.size:
                rows[hit] = (rows[hit] - np.outer(coef[hit], r_new)) % self.p
        order = np.argsort(pivots, kind="stable")
        self.rows = rows[order]
        self.pivots = [pivots[i] for i in order]
        return self.dim - before
