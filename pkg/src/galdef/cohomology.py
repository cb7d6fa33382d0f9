"""Group cohomology of a finite group with F_l-module coefficients.

Cochains are inhomogeneous bar cochains stored densely: a degree-n cochain
is an array of shape ``(|G|,)*n + (dim,)``.  Coboundaries follow the usual
convention::

    (d0 m)(g)       = g m - m
    (d1 b)(g, h)    = g b(h) - b(gh) + b(g)
    (d2 u)(g, h, k) = g u(h, k) - u(gh, k) + u(g, hk) - u(g, h)

Two facts keep the linear algebra small.  A cochain ``x`` with
``(d x)(s, ...) = 0`` for every generator ``s`` is already a cocycle, since
the set of ``g`` with ``(d x)(g, ...) = 0`` is closed under products.  So
cocycle spaces are kernels of the generator rows of the coboundary matrix
only.  And ``d1 x = c`` can be solved by propagating ``x`` along a spanning
tree of the Cayley graph from the values on generators, leaving a tiny
system for the remaining edges.

For groups too large for the dense bar complex, dimensions come from a free
resolution over F_l[G] built by linear algebra (``method="resolution"``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidParameters, NotACocycle
from .linalg import EchelonBasis, rank, row_reduce, solve_linear
from .modules import GaloisModule, coords_to_matrix, mu_module

__all__ = [
    "Cochain",
    "coboundary",
    "coboundary_matrix",
    "cocycle_failure",
    "is_cocycle",
    "cohomology_dim",
    "is_coboundary",
    "cup_trace",
    "solve_dual_class",
    "FreeResolution",
    "cohomology_table",
]

# Largest cochain space handled by dense elimination in cohomology_dim.
BAR_LIMIT = 2500
# Largest degree-3 table materialised by coboundary().
DEGREE3_LIMIT = 5_000_000


@dataclass(frozen=True, eq=False)
class Cochain:
    degree: int
    module: GaloisModule
    values: np.ndarray

    def __post_init__(self):
        n, d = self.module.group.order, self.module.dim
        shape = (n,) * self.degree + (d,)
        if self.values.shape != shape:
            raise DimensionMismatch(f"degree-{self.degree} cochain needs shape {shape}, got {self.values.shape}")
        vals = self.values % self.module.ell
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def zero(cls, module: GaloisModule, degree: int) -> "Cochain":
        n, d = module.group.order, module.dim
        return cls(degree, module, np.zeros((n,) * degree + (d,), dtype=np.int64))

    @classmethod
    def random(cls, module: GaloisModule, degree: int, rng) -> "Cochain":
        n, d = module.group.order, module.dim
        return cls(degree, module, rng.integers(0, module.ell, size=(n,) * degree + (d,)))

    def _same(self, other):
        if not self.module.same_as(other.module) or other.degree != self.degree:
            raise DimensionMismatch("cochains live on different modules or degrees")

    def __add__(self, other):
        self._same(other)
        return Cochain(self.degree, self.module, self.values + other.values)

    def __sub__(self, other):
        self._same(other)
        return Cochain(self.degree, self.module, self.values - other.values)

    def __neg__(self):
        return Cochain(self.degree, self.module, -self.values)

    def scale(self, lam: int) -> "Cochain":
        return Cochain(self.degree, self.module, self.values * int(lam))

    def is_zero(self) -> bool:
        return not self.values.any()

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return (
            self.module.same_as(other.module)
            and other.degree == self.degree
            and np.array_equal(other.values, self.values)
        )

    __hash__ = None


def coboundary(c: Cochain) -> Cochain:
    mod = c.module
    A, T, p = mod.matrices, mod.group.table, mod.ell
    x = c.values
    if c.degree == 0:
        out = np.einsum("gij,j->gi", A, x) - x
    elif c.degree == 1:
        out = np.einsum("gij,hj->ghi", A, x) - x[T] + x[:, None, :]
    elif c.degree == 2:
        n = mod.group.order
        if n**3 * mod.dim > DEGREE3_LIMIT:
            raise InvalidParameters("degree-3 table too large; use cocycle_failure instead")
        out = np.empty((n, n, n, mod.dim), dtype=np.int64)
        for g in range(n):
            out[g] = _d2_slice(A, T, x, g)
    else:
        raise InvalidParameters(f"coboundary of a degree-{c.degree} cochain is not supported")
    return Cochain(c.degree + 1, mod, out % p)


def _d2_slice(A, T, u, g):
    """``(d2 u)(g, h, k)`` for fixed g and all h, k."""
    return np.einsum("ij,hkj->hki", A[g], u) - u[T[g]] + u[g][T] - u[g][:, None, :]


def cocycle_failure(c: Cochain, first=None, sample: int | None = None, rng=None):
    """First tuple where the cocycle identity fails, or ``None``.

    ``first`` restricts the leading group argument (e.g. to generators);
    ``sample`` checks that many uniformly random tuples instead of all.
    """
    mod = c.module
    A, T, p, n = mod.matrices, mod.group.table, mod.ell, mod.group.order
    x = c.values
    if c.degree == 0:
        bad = np.flatnonzero((np.einsum("gij,j->gi", A, x) - x).any(axis=-1) % p)
        return (int(bad[0]),) if bad.size else None
    if c.degree == 1:
        d = (np.einsum("gij,hj->ghi", A, x) - x[T] + x[:, None, :]) % p
        bad = np.argwhere(d.any(axis=-1))
        return tuple(int(v) for v in bad[0]) if bad.size else None
    if c.degree != 2:
        raise InvalidParameters("cocycle check supports degrees 0..2")
    if sample is not None:
        rng = np.random.default_rng(0) if rng is None else rng
        g, h, k = rng.integers(0, n, size=(3, sample))
        d = (np.einsum("sij,sj->si", A[g], x[h, k]) - x[T[g, h], k] + x[g, T[h, k]] - x[g, h]) % p
        bad = np.flatnonzero(d.any(axis=-1))
        return (int(g[bad[0]]), int(h[bad[0]]), int(k[bad[0]])) if bad.size else None
    rows = range(n) if first is None else first
    for g in rows:
        d = _d2_slice(A, T, x, g) % p
        bad = np.argwhere(d.any(axis=-1))
        if bad.size:
            return (int(g), int(bad[0][0]), int(bad[0][1]))
    return None


def is_cocycle(c: Cochain) -> bool:
    """Exact cocycle test using only generator rows (see module docstring)."""
    return cocycle_failure(c, first=c.module.group.generators) is None


def coboundary_matrix(mod: GaloisModule, n: int, rows: str = "all") -> np.ndarray:
    """Matrix of ``d^n : C^n -> C^(n+1)`` in the dense cochain bases.

    With ``rows="generators"`` only the rows whose first group argument is a
    generator are kept; their kernel is still exactly ``Z^n``.
    """
    G = mod.group
    A, T, N, d = mod.matrices, G.table, G.order, mod.dim
    firsts = np.arange(N) if rows == "all" else np.array(G.generators, dtype=np.int64)
    r = len(firsts)
    eye = np.eye(d, dtype=np.int64)
    if n == 0:
        M = (A[firsts] - eye).reshape(r * d, d)
        return M % mod.ell
    if n == 1:
        M = np.zeros((r, N, d, N, d), dtype=np.int64)
        gi, h = np.meshgrid(np.arange(r), np.arange(N), indexing="ij")
        g = firsts[gi]
        M[gi, h, :, h, :] += A[g]
        for i in range(d):
            np.add.at(M, (gi, h, i, T[g, h], i), -1)
            np.add.at(M, (gi, h, i, g, i), 1)
        return M.reshape(r * N * d, N * d) % mod.ell
    if n == 2:
        if (r * N * N * d) * (N * N * d) > 5e7:
            raise InvalidParameters("d2 matrix too large for dense elimination")
        M = np.zeros((r, N, N, d, N, N, d), dtype=np.int64)
        gi, h, k = np.meshgrid(np.arange(r), np.arange(N), np.arange(N), indexing="ij")
        g = firsts[gi]
        M[gi, h, k, :, h, k, :] += A[g]
        for i in range(d):
            np.add.at(M, (gi, h, k, i, T[g, h], k, i), -1)
            np.add.at(M, (gi, h, k, i, g, T[h, k], i), 1)
            np.add.at(M, (gi, h, k, i, g, h, i), -1)
        return M.reshape(r * N * N * d, N * N * d) % mod.ell
    raise InvalidParameters(f"no coboundary matrix in degree {n}")


def _zdim_bar(mod: GaloisModule, n: int) -> int:
    N, d = mod.group.order, mod.dim
    return N**n * d - rank(coboundary_matrix(mod, n, rows="generators"), mod.ell)


def cohomology_dim(mod: GaloisModule, n: int, method: str = "auto") -> int:
    """dim H^n(G, M) for n in {0, 1, 2}.

    ``method="bar"`` ranks the dense coboundary matrices, ``"resolution"``
    uses a free F_l[G]-resolution; ``"auto"`` picks bar when ``C^n`` is small.
    """
    if n not in (0, 1, 2):
        raise InvalidParameters("only degrees 0, 1, 2 are supported")
    N, d = mod.group.order, mod.dim
    if method == "auto":
        method = "bar" if N**n * d <= BAR_LIMIT else "resolution"
    if method == "resolution":
        return FreeResolution(mod.group, mod.ell, n + 1).cohomology_dim(mod, n)
    if method != "bar":
        raise InvalidParameters(f"unknown method {method!r}")
    z = _zdim_bar(mod, n)
    b = 0 if n == 0 else N ** (n - 1) * d - _zdim_bar(mod, n - 1)
    return z - b


def _solve_d0(c: Cochain):
    mod = c.module
    M = coboundary_matrix(mod, 0)
    v = solve_linear(M, c.values.reshape(-1), mod.ell)
    return None if v is None else Cochain(0, mod, v)


def _solve_d1(c: Cochain):
    """Some ``x`` with ``d1 x = c`` on generator rows, by spanning-tree propagation."""
    mod = c.module
    G, A, T, p, d = mod.group, mod.matrices, mod.group.table, mod.ell, mod.dim
    N = G.order
    gens = [s for s in dict.fromkeys(G.generators) if s != G.identity]
    e = G.identity
    if not gens:
        return Cochain(1, mod, np.zeros((N, d), dtype=np.int64)) if not c.values.any() else None
    nunk = len(gens) * d
    # x(g) = coef[g] @ z + const[g]
    coef = np.zeros((N, d, nunk), dtype=np.int64)
    const = np.zeros((N, d), dtype=np.int64)
    known = np.zeros(N, dtype=bool)
    s0 = gens[0]
    const[e] = A[G.inverse[s0]] @ c.values[s0, e] % p
    known[e] = True
    for k, s in enumerate(gens):
        coef[s, :, k * d:(k + 1) * d] = np.eye(d, dtype=np.int64)
        known[s] = True
    rows, rhs = [], []
    queue = [e] + gens
    pos = 0
    while pos < len(queue):
        h = queue[pos]
        pos += 1
        for s in gens:
            g = int(T[s, h])
            cc = (A[s] @ coef[h] + coef[s]) % p
            ck = (A[s] @ const[h] + const[s] - c.values[s, h]) % p
            if not known[g]:
                coef[g], const[g], known[g] = cc, ck, True
                queue.append(g)
            else:
                rows.append(cc - coef[g])
                rhs.append(const[g] - ck)
    z = solve_linear(np.concatenate(rows), np.concatenate(rhs), p)
    if z is None:
        return None
    return Cochain(1, mod, np.einsum("gik,k->gi", coef, z) + const)


def is_coboundary(c: Cochain) -> Cochain | None:
    """A preimage ``x`` with ``coboundary(x) == c``, or ``None`` if ``c`` is not a coboundary.

    ``c`` must be a cocycle of degree 1 or 2.
    """
    if c.degree not in (1, 2):
        raise InvalidParameters("is_coboundary expects a degree 1 or 2 cochain")
    if not is_cocycle(c):
        raise NotACocycle("input is not a cocycle")
    x = _solve_d0(c) if c.degree == 1 else _solve_d1(c)
    if x is None or coboundary(x) != c:
        return None
    return x


def _trace_vector(m0: Cochain) -> np.ndarray:
    mod = m0.module
    if not mod.basis:
        raise InvalidParameters("cup_trace needs matrix-valued modules")
    M0 = coords_to_matrix(m0.values, mod.basis, mod.ell)
    return np.array([np.trace(M0 @ b) for b in mod.basis], dtype=np.int64) % mod.ell


def _check_pairing(m0: Cochain, umod: GaloisModule):
    mod = m0.module
    if m0.degree != 0:
        raise InvalidParameters("m0 must be a 0-cochain")
    if not mod.twisted or mod.frob is None:
        raise InvalidParameters("m0 must live in a cyclotomic twist of an adjoint module")
    if cocycle_failure(m0) is not None:
        raise InvalidParameters("m0 is not invariant")
    if umod.twisted or umod.frob != mod.frob or len(umod.basis) != len(mod.basis):
        raise InvalidParameters("u must live in the untwisted adjoint module paired with m0")


def cup_trace(m0: Cochain, u: Cochain) -> Cochain:
    """``(g, h) -> tr(M0 U(g, h))`` as a mu_l-valued 2-cochain."""
    _check_pairing(m0, u.module)
    t = _trace_vector(m0)
    vals = np.tensordot(u.values, t, axes=([-1], [0]))[..., None]
    return Cochain(u.degree, mu_module(m0.module.tame), vals)


def solve_dual_class(m0: Cochain, target: Cochain, umod: GaloisModule | None = None) -> Cochain | None:
    """A 2-cocycle ``u`` in the untwisted adjoint with ``cup_trace(m0, u)`` cohomologous to ``target``.

    First looks for a vector ``v`` spanning a copy of mu_l inside the adjoint
    with ``tr(M0 v) = 1``; then ``u = target * v``.  Without such a vector the
    full linear system over Z^2 x C^1 is solved densely (small groups only).
    """
    umod = m0.module.untwisted() if umod is None else umod
    _check_pairing(m0, umod)
    if target.degree != 2 or target.module.dim != 1:
        raise InvalidParameters("target must be a mu_l-valued 2-cochain")
    p, d = umod.ell, umod.dim
    t = _trace_vector(m0)
    eps = target.module.matrices[:, 0, 0]
    blocks = [umod.matrices[s] - eps[s] * np.eye(d, dtype=np.int64) for s in umod.group.generators]
    system = np.concatenate(blocks + [t[None, :]])
    rhs = np.zeros(system.shape[0], dtype=np.int64)
    rhs[-1] = 1
    v = solve_linear(system, rhs, p)
    if v is not None:
        u = Cochain(2, umod, target.values * v[None, None, :])
        return u if _verify_dual(m0, u, target) else None
    return _solve_dual_dense(m0, target, umod, t)


def _verify_dual(m0, u, target) -> bool:
    diff = cup_trace(m0, u).values - target.values
    return is_coboundary(Cochain(2, target.module, diff)) is not None


def _solve_dual_dense(m0, target, umod, t):
    N, d, p = umod.group.order, umod.dim, umod.ell
    if N * N * d > BAR_LIMIT:
        raise InvalidParameters("no equivariant section and group too large for the dense solve")
    Z = row_reduce(coboundary_matrix(umod, 2, rows="generators"), p).kernel_basis  # rows
    trace_map = np.kron(np.eye(N * N, dtype=np.int64), t[None, :])  # (N^2, N^2 d)
    D1 = coboundary_matrix(target.module, 1)
    system = np.concatenate([(trace_map @ Z.T) % p, -D1 % p], axis=1)
    sol = solve_linear(system, target.values.reshape(-1), p)
    if sol is None:
        return None
    u = Cochain(2, umod, (sol[: Z.shape[0]] @ Z).reshape(N, N, d))
    return u if _verify_dual(m0, u, target) else None


class FreeResolution:
    """A free resolution ``P_k = F_l[G]^(r_k)`` of the trivial module, built greedily.

    ``images[k]`` (k >= 1) has shape ``(r_k, r_(k-1), |G|)``: the image of the
    j-th basis vector of ``P_k`` as an element of ``P_(k-1)``.
    """

    def __init__(self, group, p: int, length: int):
        self.group = group
        self.p = p
        N = group.order
        # orbit_index[g, x] = g^-1 x: (g.v)[:, x] = v[:, g^-1 x]
        self._orbit_index = group.table[group.inverse]
        aug_kernel = np.zeros((N - 1, N), dtype=np.int64)
        others = [g for g in range(N) if g != group.identity]
        aug_kernel[np.arange(N - 1), others] = 1
        aug_kernel[:, group.identity] = p - 1
        self.ranks = [1]
        self.images = [None]
        kern = aug_kernel  # vectors in P_0 = A^1, flattened
        for k in range(1, length + 1):
            gens = self._module_generators(kern, self.ranks[-1])
            self.ranks.append(len(gens))
            stacked = np.stack(gens) if gens else np.zeros((0, self.ranks[-2] * N), dtype=np.int64)
            self.images.append(stacked.reshape(len(gens), self.ranks[-2], N))
            kern = row_reduce(self._matrix(k), p).kernel_basis

    def _orbit(self, v):
        """All translates ``g.v`` of ``v`` (shape (s, N)) flattened to rows."""
        s, N = v.shape
        return np.transpose(v[:, self._orbit_index], (1, 0, 2)).reshape(N, s * N)

    def _module_generators(self, kern, s):
        N = self.group.order
        span = EchelonBasis(s * N, self.p)
        gens = []
        target = kern.shape[0]
        while span.dim < target:
            res = span.reduce(kern)
            i = int(np.flatnonzero(res.any(axis=1))[0])
            gens.append(kern[i])
            span.extend(self._orbit(kern[i].reshape(s, N)))
        return gens

    def _matrix(self, k):
        """F_l-matrix of ``P_k -> P_(k-1)``; column (j, g) is ``g . image_j``."""
        imgs = self.images[k]
        r, s, N = imgs.shape
        cols = [self._orbit(imgs[j]) for j in range(r)]  # each (N, s*N)
        return np.concatenate(cols).T % self.p

    def cochain_matrix(self, mod: GaloisModule, k: int) -> np.ndarray:
        """``Hom(P_k, M) -> Hom(P_(k+1), M)`` as a matrix on ``M^(r_k)``."""
        imgs = self.images[k + 1]
        r1, r0, _ = imgs.shape
        d = mod.dim
        blocks = np.einsum("jth,hab->jatb", imgs, mod.matrices) % self.p
        return blocks.reshape(r1 * d, r0 * d)

    def cohomology_dim(self, mod: GaloisModule, n: int) -> int:
        if mod.group is not self.group and not np.array_equal(mod.group.table, self.group.table):
            raise InvalidParameters("module lives on a different group")
        d = mod.dim
        z = self.ranks[n] * d - rank(self.cochain_matrix(mod, n), self.p)
        b = 0 if n == 0 else rank(self.cochain_matrix(mod, n - 1), self.p)
        return z - b


def cohomology_table(mod: GaloisModule, method: str = "auto") -> dict[int, int]:
    return {n: cohomology_dim(mod, n, method) for n in (0, 1, 2)}
