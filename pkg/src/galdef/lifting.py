"""Lifts of the residual representation to dual numbers and to Z/l^2.

Tangent directions: ``rho_eps(g) = (I + eps b(g)) rho(g)`` over
``F_l[eps]/(eps^2)`` is a homomorphism exactly when ``b`` is a 1-cocycle in
``ad``.  :func:`is_homomorphism` checks this by multiplying dual-number
matrices directly, independently of the cochain calculus.

Small extension ``Z/l^2 -> F_l``: for a set-theoretic lift ``r`` we use

    r(gh) r(h)^-1 r(g)^-1 = 1 + l d(g, h)

with ``d`` read in ``ad``.  With ``r = (1 + l x) T`` for a homomorphic lift
``T`` one gets ``d = -d1 x``, a cocycle for the left conjugation action.  If
``d1 p = d`` then ``(1 + l p) r`` is a homomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .cohomology import Cochain, cocycle_failure, coboundary, is_coboundary
from .errors import InvalidParameters, NotAUnit
from .modules import GaloisModule, ResidualFrobenius, build_adjoint, coords_to_matrix, matrix_to_coords
from .tame import TameGroup

__all__ = [
    "ResidualRep",
    "DualNumberRep",
    "SetLift",
    "Obstructed",
    "residual_rep",
    "is_homomorphism",
    "homomorphism_defects",
    "conjugate_dual",
    "teichmuller",
    "teichmuller_lift",
    "random_section",
    "obstruction_cocycle",
    "adjust_lift",
    "lift_defects",
    "tangent_coboundary",
]


def teichmuller(a: int, ell: int) -> int:
    """Teichmueller representative of ``a`` modulo ``l^2``."""
    if a % ell == 0:
        raise NotAUnit(f"{a} is not a unit mod {ell}")
    return pow(a, ell, ell * ell)


@dataclass(frozen=True, eq=False)
class ResidualRep:
    """``rho(F^i tau^i') = diag(alpha^i, beta^i)`` tabulated over the tame quotient."""

    frob: ResidualFrobenius
    matrices: np.ndarray  # (|G|, 2, 2) over F_l

    @property
    def group(self) -> TameGroup:
        return self.frob.group

    @property
    def ell(self) -> int:
        return self.frob.ell

    @cached_property
    def adjoint(self) -> GaloisModule:
        return build_adjoint(self.frob, trace_zero=False, twist_by_cyclotomic=False)


def residual_rep(frob: ResidualFrobenius) -> ResidualRep:
    G, ell = frob.group, frob.ell
    if pow(frob.alpha, G.m, ell) != 1 or pow(frob.beta, G.m, ell) != 1:
        raise InvalidParameters("alpha^m and beta^m must be 1 so that F^m = 1 is respected")
    i, _ = G.exponents
    mats = np.zeros((G.order, 2, 2), dtype=np.int64)
    mats[:, 0, 0] = [pow(frob.alpha, int(k), ell) for k in i]
    mats[:, 1, 1] = [pow(frob.beta, int(k), ell) for k in i]
    return ResidualRep(frob=frob, matrices=mats)


def _inverse_2x2(m: np.ndarray, modulus: int) -> np.ndarray:
    """Batched inverse of 2x2 matrices over Z/modulus."""
    det = (m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]) % modulus
    flat = det.reshape(-1)
    try:
        inv_det = np.array([pow(int(v), -1, modulus) for v in flat], dtype=np.int64).reshape(det.shape)
    except ValueError:
        raise NotAUnit("a section value is not invertible") from None
    adj = np.empty_like(m)
    adj[..., 0, 0] = m[..., 1, 1]
    adj[..., 1, 1] = m[..., 0, 0]
    adj[..., 0, 1] = -m[..., 0, 1]
    adj[..., 1, 0] = -m[..., 1, 0]
    return adj * inv_det[..., None, None] % modulus


def _check_base(rho: ResidualRep):
    T, A, p = rho.group.finite.table, rho.matrices, rho.ell
    prod = np.einsum("gij,hjk->ghik", A, A) % p
    if not np.array_equal(prod, A[T]):
        raise InvalidParameters("the residual representation is not a homomorphism")


@dataclass(frozen=True, eq=False)
class DualNumberRep:
    """``g -> (I + eps b(g)) rho(g)`` with ``b`` a 1-cochain in ``ad``."""

    base: ResidualRep
    b: Cochain

    def __post_init__(self):
        if self.b.degree != 1 or not self.b.module.same_as(self.base.adjoint):
            raise InvalidParameters("b must be a 1-cochain in ad of the base representation")

    def value(self) -> tuple[np.ndarray, np.ndarray]:
        """``(rho(g), B(g) rho(g))``: constant and eps parts for every g."""
        R = self.base.matrices
        B = coords_to_matrix(self.b.values, self.b.module.basis, self.base.ell)
        return R, np.einsum("gij,gjk->gik", B, R) % self.base.ell


def homomorphism_defects(rep: DualNumberRep) -> np.ndarray:
    """Boolean table over pairs: ``rho_eps(g) rho_eps(h) != rho_eps(gh)``."""
    _check_base(rep.base)
    p = rep.base.ell
    T = rep.base.group.finite.table
    R, E = rep.value()
    eps_part = (np.einsum("gij,hjk->ghik", E, R) + np.einsum("gij,hjk->ghik", R, E)) % p
    return (eps_part != E[T]).any(axis=(-1, -2))


def is_homomorphism(rep: DualNumberRep) -> tuple[bool, tuple[int, int] | None]:
    """Whether ``rho_eps`` is multiplicative, with the first failing pair if not."""
    bad = np.argwhere(homomorphism_defects(rep))
    if bad.size == 0:
        return True, None
    return False, (int(bad[0][0]), int(bad[0][1]))


def conjugate_dual(rep: DualNumberRep, X) -> DualNumberRep:
    """Strict conjugate ``(I + eps X) rho_eps (I - eps X)``.

    Computed by multiplying dual-number matrices; the new perturbation is
    read off the eps part.
    """
    p = rep.base.ell
    Xm = coords_to_matrix(X, rep.b.module.basis, p)
    R, E = rep.value()
    eps_part = (E + Xm @ R - R @ Xm) % p
    R_inv = _inverse_2x2(R, p)
    new_b = matrix_to_coords(np.einsum("gij,gjk->gik", eps_part, R_inv) % p, rep.b.module.basis, p)
    return DualNumberRep(rep.base, Cochain(1, rep.b.module, new_b))


@dataclass(frozen=True, eq=False)
class SetLift:
    """A set-theoretic lift of ``rho`` to ``GL_2(Z/l^2)``, one matrix per group element."""

    base: ResidualRep
    section: np.ndarray  # (|G|, 2, 2) over Z/l^2

    def __post_init__(self):
        p = self.base.ell
        sec = np.asarray(self.section, dtype=np.int64) % (p * p)
        if sec.shape != self.base.matrices.shape:
            raise InvalidParameters("section must give one 2x2 matrix per group element")
        if not np.array_equal(sec % p, self.base.matrices):
            raise InvalidParameters("section does not reduce to the residual representation")
        if not np.array_equal(sec[self.base.group.finite.identity], np.eye(2, dtype=np.int64)):
            raise InvalidParameters("section must send the identity to the identity matrix")
        sec.flags.writeable = False
        object.__setattr__(self, "section", sec)

    @property
    def modulus(self) -> int:
        return self.base.ell**2


def teichmuller_lift(rho: ResidualRep) -> SetLift:
    """The diagonal homomorphic lift ``F -> diag(w(alpha), w(beta))``, ``tau -> I``."""
    ell, G = rho.ell, rho.group
    mod = ell * ell
    wa, wb = teichmuller(rho.frob.alpha, ell), teichmuller(rho.frob.beta, ell)
    i, _ = G.exponents
    sec = np.zeros((G.order, 2, 2), dtype=np.int64)
    sec[:, 0, 0] = [pow(wa, int(k), mod) for k in i]
    sec[:, 1, 1] = [pow(wb, int(k), mod) for k in i]
    return SetLift(rho, sec)


def random_section(rho: ResidualRep, rng) -> SetLift:
    """``(I + l X(g)) T(g)`` for the Teichmueller lift T and random X with ``X(1) = 0``."""
    ell, G = rho.ell, rho.group
    T = teichmuller_lift(rho).section
    X = rng.integers(0, ell, size=(G.order, 2, 2))
    X[G.finite.identity] = 0
    sec = np.einsum("gij,gjk->gik", np.eye(2, dtype=np.int64) + ell * X, T) % (ell * ell)
    return SetLift(rho, sec)


def lift_defects(lift: SetLift) -> np.ndarray:
    """Boolean table over pairs: ``r(g) r(h) != r(gh)`` mod ``l^2``."""
    S, T = lift.section, lift.base.group.finite.table
    prod = np.einsum("gij,hjk->ghik", S, S) % lift.modulus
    return (prod != S[T]).any(axis=(-1, -2))


def obstruction_cocycle(lift: SetLift) -> Cochain:
    """``d`` with ``r(gh) r(h)^-1 r(g)^-1 = 1 + l d(g, h)``, as a 2-cochain in ``ad``."""
    ell, mod = lift.base.ell, lift.modulus
    S, T = lift.section, lift.base.group.finite.table
    S_inv = _inverse_2x2(S, mod)
    c = np.einsum("ghij,hjk,gkl->ghil", S[T], S_inv, S_inv, optimize=True) % mod
    delta = (c - np.eye(2, dtype=np.int64)) % mod
    if np.any(delta % ell):
        raise InvalidParameters("section does not reduce to a homomorphism")
    ad = lift.base.adjoint
    return Cochain(2, ad, matrix_to_coords(delta // ell, ad.basis, ell))


@dataclass(frozen=True, eq=False)
class Obstructed:
    """A lift that cannot be corrected: the obstruction cocycle is not a coboundary."""

    cocycle: Cochain


def adjust_lift(lift: SetLift, cocycle: Cochain | None = None) -> SetLift | Obstructed:
    """Correct ``lift`` to a homomorphism mod ``l^2`` or report the obstruction.

    ``cocycle`` defaults to :func:`obstruction_cocycle`; passing another
    2-cocycle lets the obstructed branch be exercised on synthetic input.
    The corrected section is verified on every pair before it is returned.
    """
    if not lift_defects(lift).any() and cocycle is None:
        return lift
    d = obstruction_cocycle(lift) if cocycle is None else cocycle
    if cocycle_failure(d, first=d.module.group.generators) is not None:
        raise InvalidParameters("obstruction cochain is not a cocycle")
    pre = is_coboundary(d)
    if pre is None:
        return Obstructed(d)
    ell = lift.base.ell
    P = coords_to_matrix(pre.values, pre.module.basis, ell)
    fix = np.eye(2, dtype=np.int64) + ell * P
    fixed = SetLift(lift.base, np.einsum("gij,gjk->gik", fix, lift.section) % lift.modulus)
    if lift_defects(fixed).any():
        raise AssertionError("corrected section failed the homomorphism check")
    return fixed


def tangent_coboundary(rho: ResidualRep, X) -> Cochain:
    """``d0 X`` in ``ad``: the perturbation produced by strict conjugation."""
    ad = rho.adjoint
    return coboundary(Cochain(0, ad, np.asarray(X, dtype=np.int64)))
