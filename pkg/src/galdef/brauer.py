"""The Brauer-class cocycle on the tame quotient, built stage by stage.

fractional class   ``f1(F^i tau^i') = <i>/l`` in ``(1/l)Z/Z``.
connecting map     an integral 2-cocycle
                   ``w(i, j) = (<i+j> - <i> - <j>) / l`` in ``{0, -1}``.
exponentiation     ``C1 = q^w``; in the monomial lattice ``q^(a/l) zeta^c <-> (a, c)``
                   this is ``C = (l w, 0)``.
division           ``gamma(F^i tau^i') = (<i>, 0)``, i.e. ``(q^(1/l))^<i>``, and
                   ``B = C - delta gamma`` where ``delta`` has the same orientation
                   as the connecting map:
                   ``(delta gamma)(s1, s2) = gamma(s1 s2) - s1 gamma(s2) - gamma(s1)``.
                   ``B`` has ``a = 0`` everywhere, so it takes values in ``mu_l``.
read-off           the ``c``-coordinate of ``B`` is the exponent table.

The closed form is ``b(F^i tau^i', F^j tau^j') = i' j q^i`` mod l.  The
opposite orientation of ``delta`` would leave ``a = 2 l w`` behind, so it
does not produce a ``mu_l``-valued cocycle.  :func:`compare_recipe_to_formula`
still measures the scalar relating recipe and formula rather than assuming
it is 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cohomology import Cochain, cocycle_failure, is_coboundary
from .errors import InvalidParameters
from .modules import mu_module
from .tame import TameElement, TameGroup, make_group

__all__ = [
    "RecipeTrace",
    "RecipeComparison",
    "check_q_condition",
    "step2_connecting",
    "run_recipe",
    "explicit_b",
    "explicit_b_cochain",
    "explicit_b_table",
    "twisted_cocycle_failure",
    "lattice_action_table",
    "compare_recipe_to_formula",
]


def check_q_condition(ell: int, q: int) -> None:
    if q % ell == 0:
        raise InvalidParameters(f"q = {q} is divisible by ell = {ell}")
    if (q * q - 1) % ell == 0:
        raise InvalidParameters(f"q^2 = {q * q} is congruent to 1 mod {ell}; need q^2 != 1 mod ell")


def step2_connecting(i: int, j: int, ell: int) -> int:
    """``{(i+j)/l} - {i/l} - {j/l}``, always 0 or -1."""
    def frac(x: Fraction) -> Fraction:
        return x - (x.numerator // x.denominator)

    val = frac(Fraction(i + j, ell)) - frac(Fraction(i, ell)) - frac(Fraction(j, ell))
    assert val.denominator == 1
    return int(val)


def explicit_b(g1: TameElement, g2: TameElement) -> int:
    """``i1' * i2 * q^i1`` mod l."""
    if g1.group != g2.group:
        raise InvalidParameters("elements belong to different tame groups")
    G = g1.group
    return g1.ip * g2.i * pow(G.q, g1.i, G.ell) % G.ell


def _pair_grids(G: TameGroup):
    i, ip = G.exponents
    return i[:, None], ip[:, None], i[None, :], ip[None, :]


def _qpow(G: TameGroup) -> np.ndarray:
    i, _ = G.exponents
    table = np.array([pow(G.q, k, G.ell) for k in range(G.m)], dtype=np.int64)
    return table[i]


def explicit_b_table(G: TameGroup) -> np.ndarray:
    i1, ip1, i2, _ = _pair_grids(G)
    return ip1 * (i2 % G.ell) * _qpow(G)[:, None] % G.ell


def explicit_b_cochain(G: TameGroup) -> Cochain:
    """The closed-form cocycle as a ``mu_l``-valued 2-cochain."""
    return Cochain(2, mu_module(G), explicit_b_table(G)[..., None])


def lattice_action_table(G: TameGroup, a: np.ndarray, c: np.ndarray, g_i: np.ndarray, g_ip: np.ndarray):
    """Vectorised lattice action: ``F^i tau^i'`` sends ``(a, c)`` to ``(a, q^i (c + i' a))``."""
    qp = np.array([pow(G.q, k, G.ell) for k in range(G.m)], dtype=np.int64)[g_i]
    return a, qp * (c + g_ip * a) % G.ell


@dataclass(frozen=True, eq=False)
class RecipeTrace:
    group: TameGroup
    f1: list  # Fraction per element
    w: np.ndarray  # integral 2-cocycle on pairs
    C1_a: np.ndarray  # lattice a-coordinate of C (c-coordinate is 0)
    gamma_a: np.ndarray  # lattice a-coordinate of gamma per element
    dgamma: tuple[np.ndarray, np.ndarray]
    B: tuple[np.ndarray, np.ndarray]

    @property
    def exponent(self) -> np.ndarray:
        return self.B[1]

    def as_cochain(self) -> Cochain:
        return Cochain(2, mu_module(self.group), self.exponent[..., None])

    def to_dict(self, tables: bool = True) -> dict:
        G = self.group
        out = {
            "ell": G.ell,
            "q": G.q,
            "m": G.m,
            "order": G.order,
            "element_order": "index = i*ell + ip",
            "B_a_identically_zero": bool(not self.B[0].any()),
        }
        if tables:
            out.update(
                {
                    "f1": [[f.numerator, f.denominator] for f in self.f1],
                    "w": self.w.tolist(),
                    "C1_a": self.C1_a.tolist(),
                    "gamma_a": self.gamma_a.tolist(),
                    "dgamma_a": self.dgamma[0].tolist(),
                    "dgamma_c": self.dgamma[1].tolist(),
                    "B_a": self.B[0].tolist(),
                    "exponent": self.exponent.tolist(),
                }
            )
        return out


def run_recipe(ell: int, q: int) -> RecipeTrace:
    """Run every stage of the construction over all pairs of ``Gamma(l, q)``."""
    check_q_condition(ell, q)
    G = make_group(ell, q)
    i, ip = G.exponents
    T = G.finite.table
    r = i % ell  # <i>
    f1 = [Fraction(int(k), ell) for k in r]
    # connecting map: (<i1+i2> - <i1> - <i2>) / l
    C_a = (r[T] - r[:, None] - r[None, :])
    w = C_a // ell
    # division: gamma(s) = (<i>, 0).  The coboundary uses the orientation of the
    # connecting map, (delta gamma)(s1, s2) = gamma(s1 s2) - s1 gamma(s2) - gamma(s1).
    a2 = np.broadcast_to(r[None, :], T.shape)
    act_a, act_c = lattice_action_table(G, a2, np.zeros_like(a2), i[:, None], ip[:, None])
    dg_a = r[T] - act_a - r[:, None]
    dg_c = -act_c % ell
    B_a = C_a - dg_a
    B_c = (0 - dg_c) % ell
    if B_a.any():
        raise AssertionError("B has a nonzero lattice a-coordinate")
    return RecipeTrace(
        group=G, f1=f1, w=w, C1_a=C_a, gamma_a=r.copy(), dgamma=(dg_a, dg_c), B=(B_a, B_c)
    )


@dataclass(frozen=True)
class RecipeComparison:
    ell: int
    q: int
    lam: int | None
    all_pairs_agree: bool
    mismatch: tuple[int, int] | None
    difference_is_coboundary: bool | None
    B_a_identically_zero: bool

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "q": self.q,
            "lambda": self.lam,
            "lambda_signed": None if self.lam is None else (self.lam if 2 * self.lam < self.ell else self.lam - self.ell),
            "all_pairs_agree": self.all_pairs_agree,
            "mismatch": None if self.mismatch is None else list(self.mismatch),
            "difference_is_coboundary": self.difference_is_coboundary,
            "B_a_identically_zero": self.B_a_identically_zero,
        }


def compare_recipe_to_formula(ell: int, q: int) -> RecipeComparison:
    """Find ``lam`` with recipe exponent = ``lam * b`` on all pairs, or the first mismatch."""
    trace = run_recipe(ell, q)
    G = trace.group
    b = explicit_b_table(G)
    e = trace.exponent
    nz = np.argwhere(b)
    lam = None
    if nz.size:
        g, h = nz[0]
        lam = int(e[g, h]) * pow(int(b[g, h]), -1, ell) % ell
    elif e.any():
        g, h = np.argwhere(e)[0]
        return RecipeComparison(ell, G.q, None, False, (int(g), int(h)), None, True)
    bad = np.argwhere((e - (lam or 0) * b) % ell)
    if bad.size:
        return RecipeComparison(ell, G.q, lam, False, (int(bad[0][0]), int(bad[0][1])), None, True)
    diff = trace.as_cochain() - explicit_b_cochain(G).scale(lam)
    return RecipeComparison(ell, G.q, lam, True, None, is_coboundary(diff) is not None, True)


def twisted_cocycle_failure(G: TameGroup, sample: int | None = None, rng=None):
    """First triple where ``explicit_b`` fails the twisted cocycle identity, or ``None``."""
    return cocycle_failure(explicit_b_cochain(G), sample=sample, rng=rng)

