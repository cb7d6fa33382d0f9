"""Finite Galois modules over F_l for the tame quotient.

A :class:`GaloisModule` stores one action matrix per group element, built
from generator matrices by walking the Cayley graph and checked against
every generator edge, so ``action(gh) = action(g) action(h)`` holds
exactly for anything that constructs successfully.

The residual representation is the unramified diagonal one:
``rho(F) = diag(alpha, beta)`` and ``rho(tau) = 1``.  The cyclotomic
character is ``F -> q``, ``tau -> 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from sympy import Matrix

from .errors import InvalidParameters
from .linalg import invert_unit, kernel
from .tame import FiniteGroup, TameElement, TameGroup, make_group

__all__ = [
    "GaloisModule",
    "ResidualFrobenius",
    "AD_BASIS",
    "AD0_BASIS",
    "build_adjoint",
    "adjoint_action",
    "adjoint_module",
    "mu_module",
    "trivial_module",
    "fixed_space",
    "lattice_act",
    "matrix_to_coords",
    "coords_to_matrix",
]

_I = np.array([[1, 0], [0, 1]], dtype=np.int64)
_E1 = np.array([[1, 0], [0, -1]], dtype=np.int64)
_E2 = np.array([[0, 1], [0, 0]], dtype=np.int64)
_E3 = np.array([[0, 0], [1, 0]], dtype=np.int64)

AD0_BASIS = (_E1, _E2, _E3)
AD_BASIS = (_I, _E1, _E2, _E3)


def _mat_pow(a: np.ndarray, e: int, p: int) -> np.ndarray:
    """``a^e`` mod p for ``e >= 0`` by binary powering."""
    out = np.eye(a.shape[0], dtype=np.int64)
    base = a % p
    while e:
        if e & 1:
            out = out @ base % p
        base = base @ base % p
        e >>= 1
    return out


def _check_relators(relations, gens, p: int) -> None:
    dim = gens[0].shape[0]
    eye = np.eye(dim, dtype=np.int64)
    inverses = {}
    for k, a in enumerate(gens):
        try:
            inv = Matrix(a.tolist()).inv_mod(p)
        except ValueError:
            raise InvalidParameters("generator matrix is not invertible") from None
        inverses[k] = np.array(inv.tolist(), dtype=np.int64) % p
    for word in relations:
        acc = eye
        for k, e in word:
            base = gens[k] if e >= 0 else inverses[k]
            acc = acc @ _mat_pow(base, abs(e), p) % p
        if not np.array_equal(acc, eye):
            raise InvalidParameters("generator matrices violate the group relations")


def coords_to_matrix(x, basis, p: int) -> np.ndarray:
    """Matrix ``sum x_j basis_j`` for coordinate arrays of shape ``(..., len(basis))``."""
    x = np.asarray(x, dtype=np.int64)
    return np.tensordot(x, np.stack(basis), axes=([-1], [0])) % p


def matrix_to_coords(mat, basis, p: int) -> np.ndarray:
    """Inverse of :func:`coords_to_matrix` for the adjoint bases (l odd).

    Accepts arrays of shape ``(..., 2, 2)``.
    """
    mat = np.asarray(mat, dtype=np.int64)
    a, b, c, d = mat[..., 0, 0], mat[..., 0, 1], mat[..., 1, 0], mat[..., 1, 1]
    half = invert_unit(2, p)
    if len(basis) == 4:
        return np.stack([(a + d) * half, (a - d) * half, b, c], axis=-1) % p
    if np.any((a + d) % p):
        raise InvalidParameters("matrix is not trace zero")
    return np.stack([a, b, c], axis=-1) % p


@dataclass(frozen=True)
class ResidualFrobenius:
    """Frobenius eigenvalues ``alpha, beta`` of the residual representation at q."""

    ell: int
    q: int
    alpha: int
    beta: int

    def __post_init__(self):
        if self.alpha % self.ell == 0 or self.beta % self.ell == 0:
            raise InvalidParameters("Frobenius eigenvalues must be nonzero mod ell")

    @property
    def ratio(self) -> int:
        return self.alpha * invert_unit(self.beta, self.ell) % self.ell

    def is_level_raising(self) -> bool:
        return self.ratio == self.q % self.ell

    @cached_property
    def group(self) -> TameGroup:
        return make_group(self.ell, self.q)

    def matrix(self) -> np.ndarray:
        return np.diag([self.alpha % self.ell, self.beta % self.ell]).astype(np.int64)


class GaloisModule:
    """A finite group acting linearly on ``F_l^dim``.

    Built from one matrix per generator.  The table of all action matrices
    (``matrices``, shape ``(|G|, dim, dim)``) is computed on first use, so
    invariants of very large groups only ever touch the generators.
    """

    def __init__(self, group: FiniteGroup, ell: int, matrices=None, *, gen_matrices=None,
                 label: str = "", basis: tuple = (), frob: "ResidualFrobenius | None" = None,
                 twisted: bool = False, tame: TameGroup | None = None):
        if matrices is None and gen_matrices is None:
            raise InvalidParameters("a module needs its action matrices or generator matrices")
        self.group = group
        self.ell = ell
        self.label = label
        self.basis = basis
        self.frob = frob
        self.twisted = twisted
        self.tame = tame
        if matrices is not None:
            matrices = np.asarray(matrices, dtype=np.int64) % ell
            matrices.flags.writeable = False
            self.__dict__["matrices"] = matrices
            gen_matrices = [matrices[s] for s in group.generators]
        self.gen_matrices = tuple(np.asarray(a, dtype=np.int64) % ell for a in gen_matrices)
        for a in self.gen_matrices:
            a.flags.writeable = False

    def __repr__(self):
        return f"GaloisModule({self.label!r}, dim={self.dim}, group={self.group.name!r})"

    @property
    def dim(self) -> int:
        return self.gen_matrices[0].shape[0]

    @cached_property
    def matrices(self) -> np.ndarray:
        group, ell = self.group, self.ell
        mats = np.zeros((group.order, self.dim, self.dim), dtype=np.int64)
        mats[group.identity] = np.eye(self.dim, dtype=np.int64)
        gen_of = dict(zip(group.generators, self.gen_matrices))
        for g, s, h in group.bfs_words():
            mats[g] = gen_of[s] @ mats[h] % ell
        for s, a in gen_of.items():
            lhs = mats[group.table[s]]
            rhs = np.einsum("ij,hjk->hik", a, mats) % ell
            if not np.array_equal(lhs, rhs):
                raise InvalidParameters("generator matrices violate the group relations")
        mats.flags.writeable = False
        return mats

    def action(self, g) -> np.ndarray:
        if isinstance(g, TameElement):
            g = g.index
        return self.matrices[g]

    @classmethod
    def from_generators(cls, group: FiniteGroup, gen_matrices, ell: int, **kw) -> "GaloisModule":
        """Extend generator matrices to the whole group.

        Raises :class:`InvalidParameters` if the matrices do not satisfy the
        group's relations.  Groups carrying a presentation are checked on
        their relators right away; otherwise the check happens when the full
        table of matrices is first built.
        """
        gen_matrices = [np.asarray(a, dtype=np.int64) % ell for a in gen_matrices]
        if len(gen_matrices) != len(group.generators):
            raise InvalidParameters("one matrix per generator is required")
        if group.relations:
            _check_relators(group.relations, gen_matrices, ell)
        return cls(group, ell, gen_matrices=gen_matrices, **kw)

    def same_as(self, other: "GaloisModule") -> bool:
        if self is other:
            return True
        same_group = self.group is other.group or (
            self.group.order == other.group.order
            and self.group.generators == other.group.generators
            and np.array_equal(self.group.table, other.group.table)
        )
        return (
            same_group
            and self.ell == other.ell
            and all(np.array_equal(a, b) for a, b in zip(self.gen_matrices, other.gen_matrices))
        )

    def restrict(self, subgroup: FiniteGroup, embedding) -> "GaloisModule":
        return GaloisModule(
            subgroup,
            self.ell,
            self.matrices[np.asarray(embedding)].copy(),
            label=f"{self.label}|{subgroup.name}",
            basis=self.basis,
        )

    def untwisted(self) -> "GaloisModule":
        """Same adjoint module without the cyclotomic twist."""
        if self.frob is None or self.tame is None:
            raise InvalidParameters("module is not an adjoint module")
        return build_adjoint(self.frob, trace_zero=len(self.basis) == 3, twist_by_cyclotomic=False)


def adjoint_action(rho, basis, p: int, scale: int = 1) -> np.ndarray:
    """Matrix of ``X -> scale * rho X rho^-1`` on the span of ``basis`` (columns = images)."""
    rho = np.asarray(rho, dtype=np.int64) % p
    det = int(rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0])
    inv_det = invert_unit(det, p)
    rho_inv = np.array([[rho[1, 1], -rho[0, 1]], [-rho[1, 0], rho[0, 0]]], dtype=np.int64) * inv_det % p
    images = np.stack([scale * (rho @ b @ rho_inv) % p for b in basis])
    return matrix_to_coords(images, basis, p).T


def adjoint_module(G: TameGroup, rho_F, rho_tau, trace_zero: bool = True, twist_by_cyclotomic: bool = False,
                   label: str = "", frob: ResidualFrobenius | None = None) -> GaloisModule:
    """``ad`` or ``ad^0`` of the representation ``F -> rho_F``, ``tau -> rho_tau`` of ``Gamma(l, q)``."""
    ell = G.ell
    basis = AD0_BASIS if trace_zero else AD_BASIS
    scale = G.q % ell if twist_by_cyclotomic else 1
    a_F = adjoint_action(rho_F, basis, ell, scale)
    a_tau = adjoint_action(rho_tau, basis, ell)
    return GaloisModule.from_generators(
        G.finite, [a_F, a_tau], ell, label=label, basis=basis, frob=frob,
        twisted=twist_by_cyclotomic, tame=G,
    )


@lru_cache(maxsize=None)
def build_adjoint(frob: ResidualFrobenius, trace_zero: bool = True, twist_by_cyclotomic: bool = False) -> GaloisModule:
    """The adjoint module (``ad`` or ``ad^0``) of the diagonal residual representation.

    Bases are ``(e1, e2, e3)`` for the trace-zero part and ``(1, e1, e2, e3)``
    for the full adjoint.  The Frobenius matrix is obtained by conjugating
    each basis matrix, times ``q`` when twisted; inertia acts trivially.
    """
    name = ("eps x " if twist_by_cyclotomic else "") + ("ad0" if trace_zero else "ad")
    return adjoint_module(
        frob.group, frob.matrix(), np.eye(2, dtype=np.int64), trace_zero, twist_by_cyclotomic,
        label=f"{name}(alpha={frob.alpha},beta={frob.beta})", frob=frob,
    )


@lru_cache(maxsize=None)
def mu_module(G: TameGroup) -> GaloisModule:
    """mu_l = F_l(1): Frobenius acts by q, inertia trivially."""
    return GaloisModule.from_generators(
        G.finite, [[[G.q]], [[1]]], G.ell, label="mu", twisted=True, tame=G
    )


def trivial_module(group: FiniteGroup, ell: int, dim: int = 1) -> GaloisModule:
    eye = np.eye(dim, dtype=np.int64)
    return GaloisModule.from_generators(group, [eye] * len(group.generators), ell, label=f"F_{ell}^{dim}")


def fixed_space(mod: GaloisModule) -> np.ndarray:
    """Basis (rows) of the invariants H^0 = common kernel of ``action(s) - 1`` over generators."""
    eye = np.eye(mod.dim, dtype=np.int64)
    stacked = np.concatenate([a - eye for a in mod.gen_matrices])
    return kernel(stacked, mod.ell)


def lattice_act(g: TameElement, x: tuple[int, int]) -> tuple[int, int]:
    """Action on the monomial lattice ``q^(a/l) zeta^c <-> (a, c)``.

    ``tau`` multiplies ``q^(1/l)`` by ``zeta``; ``F`` fixes ``q^(1/l)`` and
    raises ``zeta`` to the q-th power.
    """
    G = g.group
    a, c = x
    return a, pow(G.q, g.i, G.ell) * (c + g.ip * a) % G.ell
