"""Local invariant criteria and the obstruction classification.

The global objects (H^2 of the global Galois group, Sha^1) are not computed.
They enter only through the exact sequence

    0 -> prod_p H^0(G_p, eps x ad) -> H^2(G_S, ad)^* -> Sha^1(G_S, eps x ad) -> 0

which turns local invariant dimensions and a caller-supplied Sha^1 verdict
into a lower bound for ``dim H^2``.  Local terms come either from an actual
fixed-space computation on a tame quotient (level raising at q, Steinberg)
or from the residue-arithmetic predicates for supercuspidal, principal
series and ``p = l`` places.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from sympy import isprime, primefactors

from .brauer import check_q_condition
from .errors import InvalidParameters
from .modules import ResidualFrobenius, adjoint_module, build_adjoint, fixed_space
from .tame import make_group

__all__ = [
    "LocalKind",
    "LocalType",
    "ProblemInstance",
    "ObstructionReport",
    "Tri",
    "check_standing",
    "levelraise_h0",
    "steinberg_h0",
    "supercuspidal_vanishes",
    "principal_series_nonzero",
    "ell_invariant_vanishes",
    "local_h0",
    "classify",
    "LEVEL_RAISE_RING",
]

LEVEL_RAISE_RING = "Z_ell[[T1,T2,T3,T]]/(T*(ell - Phi))"
AD0_NAMES = ("e1", "e2", "e3")


class Tri(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class LocalKind(str, Enum):
    STEINBERG = "Steinberg"
    SUPERCUSPIDAL = "Supercuspidal"
    PRINCIPAL_SERIES = "PrincipalSeries"
    AT_ELL = "AtEll"
    LEVEL_RAISE_Q = "LevelRaiseQ"


def _require_prime(ell: int, what: str = "ell"):
    if not isprime(ell):
        raise InvalidParameters(f"{what} = {ell} is not prime")


def check_standing(N: int, ell: int) -> list[str]:
    """Violations of the standing hypotheses for level N and prime l (empty when all hold)."""
    if N < 1:
        raise InvalidParameters("N must be a positive integer")
    _require_prime(ell)
    out = []
    if ell == 2:
        out.append("ell = 2")
    if N % ell == 0:
        out.append(f"ell divides N (ell = {ell})")
    for p in primefactors(N):
        if p == 2:
            out.append("p = 2 divides N")
        elif p % ell == 1:
            out.append(f"p = 1 mod ell at p = {p}")
    return out


def _coordinate_tags(basis_rows: np.ndarray, names) -> list[str]:
    """Names of coordinate vectors spanning the same space as ``basis_rows``, if it is one."""
    support = [names[j] for j in range(basis_rows.shape[1]) if basis_rows[:, j].any()]
    if len(support) == basis_rows.shape[0]:
        return support
    return ["(" + " ".join(str(int(v)) for v in row) + ")" for row in basis_rows]


def levelraise_h0(ell: int, q: int, alpha: int, beta: int, full_adjoint: bool = False) -> tuple[int, str]:
    """``dim H^0(Gamma(l, q), eps x ad^0)`` and a tag naming the invariant line(s).

    Requires the level-raising condition ``alpha/beta = q`` mod l.  The tag is
    ``"e3"`` in the generic case ``q^2 != 1``.
    """
    frob = ResidualFrobenius(ell, q, alpha, beta)
    if not frob.is_level_raising():
        raise InvalidParameters(f"alpha/beta = {frob.ratio} is not congruent to q = {q % ell} mod {ell}")
    mod = build_adjoint(frob, trace_zero=not full_adjoint, twist_by_cyclotomic=True)
    rows = fixed_space(mod)
    names = AD0_NAMES if not full_adjoint else ("1",) + AD0_NAMES
    return rows.shape[0], ",".join(_coordinate_tags(rows, names)) if rows.size else ""


def steinberg_h0(p: int, ell: int, trace_zero: bool = False) -> int:
    """``dim H^0(Gamma(l, p), eps x ad)`` for ``F -> [[p, 0], [0, 1]]``, ``tau -> [[1, 1], [0, 1]]``.

    This is the residual Steinberg shape (cyclotomic over trivial, ramified
    extension class) on the tame quotient at p.
    """
    _require_prime(p, "p")
    G = make_group(ell, p)
    mod = adjoint_module(G, [[p, 0], [0, 1]], [[1, 1], [0, 1]], trace_zero=trace_zero,
                         twist_by_cyclotomic=True, label="eps x ad (Steinberg)")
    return fixed_space(mod).shape[0]


def _check_local_prime(p: int, ell: int):
    _require_prime(p, "p")
    _require_prime(ell)
    if p < 5:
        raise InvalidParameters(f"p = {p} < 5: the criterion assumes p >= 5")


def supercuspidal_vanishes(p: int, ell: int) -> bool:
    """True when the local invariants vanish for a supercuspidal place: ``p != 1 mod l``."""
    _check_local_prime(p, ell)
    return p % ell != 1


def principal_series_nonzero(p: int, ell: int) -> bool:
    """True when the local invariants are nonzero for a principal series place: ``p^4 = 1 mod l``."""
    _check_local_prime(p, ell)
    return pow(p, 4, ell) == 1


def ell_invariant_vanishes(a_ell: int, m_deg: int, ell: int, is_congruence_prime: bool) -> str:
    """``"vanishes"`` when all hypotheses at ``p = l`` hold, else ``"inapplicable"``."""
    _require_prime(ell)
    if is_congruence_prime and m_deg % ell != 0 and a_ell % ell != 0:
        return "vanishes"
    return "inapplicable"


@dataclass(frozen=True)
class LocalType:
    kind: LocalKind
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {"kind": self.kind.value, "params": dict(self.params)}


@dataclass(frozen=True)
class ProblemInstance:
    N: int
    ell: int
    places: tuple  # "inf" and primes
    local_types: dict  # prime -> LocalType
    assume_h2_vanishing: bool = False

    def __post_init__(self):
        if self.N < 1:
            raise InvalidParameters("N must be a positive integer")
        _require_prime(self.ell)
        required = {"inf", *primefactors(self.N * self.ell)}
        missing = required - set(self.places)
        if missing:
            raise InvalidParameters(f"S must contain inf and all primes dividing N*ell; missing {sorted(map(str, missing))}")
        for p, lt in self.local_types.items():
            if p not in self.places:
                raise InvalidParameters(f"local type given at {p}, which is not in S")
            if not isinstance(lt, LocalType):
                raise InvalidParameters(f"local type at {p} is malformed")

    @classmethod
    def build(cls, N: int, ell: int, local_types: dict, extra_places=(), assume_h2_vanishing: bool = False):
        places = {"inf", *primefactors(N * ell), *extra_places, *local_types}
        ordered = tuple(["inf"] + sorted(p for p in places if p != "inf"))
        return cls(N, ell, ordered, dict(local_types), assume_h2_vanishing)

    def to_dict(self):
        return {
            "N": self.N,
            "ell": self.ell,
            "S": [str(p) for p in self.places],
            "local_types": {str(p): lt.to_dict() for p, lt in sorted(self.local_types.items())},
            "assume_h2_vanishing": self.assume_h2_vanishing,
        }


@dataclass(frozen=True)
class LocalTerm:
    """One local invariant term: ``dim`` is exact, ``at_least`` a lower bound, both None if unknown."""

    dim: int | None
    at_least: int
    source: str
    generator: str = ""

    def to_dict(self):
        return {"dim": self.dim, "at_least": self.at_least, "source": self.source, "generator": self.generator}


def local_h0(p, lt: LocalType | None, ell: int) -> LocalTerm:
    if p == "inf":
        # the Tate-modified H^0 of a group of order 2 with l-torsion coefficients, l odd
        return LocalTerm(0 if ell != 2 else None, 0, "archimedean")
    if lt is None:
        return LocalTerm(None, 0, "no local type supplied")
    kw = lt.params
    if lt.kind is LocalKind.LEVEL_RAISE_Q:
        dim, tag = levelraise_h0(ell, p, kw["alpha"], kw["beta"])
        return LocalTerm(dim, dim, "fixed space of eps x ad0 on Gamma(ell,q)", tag)
    if lt.kind is LocalKind.STEINBERG:
        dim = steinberg_h0(p, ell)
        return LocalTerm(dim, dim, "fixed space of eps x ad on Gamma(ell,p), Steinberg shape")
    if lt.kind is LocalKind.SUPERCUSPIDAL:
        if supercuspidal_vanishes(p, ell):
            return LocalTerm(0, 0, "supercuspidal criterion")
        return LocalTerm(None, 0, "supercuspidal criterion inapplicable (p = 1 mod ell)")
    if lt.kind is LocalKind.PRINCIPAL_SERIES:
        if principal_series_nonzero(p, ell):
            return LocalTerm(None, 1, "principal series criterion: nonzero")
        return LocalTerm(0, 0, "principal series criterion: zero")
    if lt.kind is LocalKind.AT_ELL:
        verdict = ell_invariant_vanishes(kw["a_ell"], kw["m_deg"], ell, kw["is_congruence_prime"])
        if verdict == "vanishes":
            return LocalTerm(0, 0, "criterion at p = ell")
        return LocalTerm(None, 0, "criterion at p = ell inapplicable")
    raise InvalidParameters(f"unknown local type {lt.kind}")


@dataclass(frozen=True)
class ObstructionReport:
    standing_violations: list
    local_h0: dict  # place -> LocalTerm
    sha1_nonzero: Tri
    classification: str
    obstructed_at: list
    hom_h2_dim_lower_bound: int
    ring_descriptor: str | None
    generator_tag: str = ""
    notes: list = field(default_factory=list)

    @property
    def standing_ok(self) -> bool:
        return not self.standing_violations

    def to_dict(self):
        return {
            "standing_ok": self.standing_ok,
            "standing_violations": list(self.standing_violations),
            "local_h0": {str(p): t.to_dict() for p, t in self.local_h0.items()},
            "sha1_nonzero": self.sha1_nonzero.value,
            "classification": self.classification,
            "obstructed_at": [str(p) for p in self.obstructed_at],
            "hom_h2_dim_lower_bound": self.hom_h2_dim_lower_bound,
            "ring_descriptor": self.ring_descriptor,
            "generator_tag": self.generator_tag,
            "notes": list(self.notes),
        }


def classify(instance: ProblemInstance, sha1_nonzero: Tri | str = Tri.UNKNOWN) -> ObstructionReport:
    """Combine local invariant terms and the Sha^1 verdict into a classification.

    ``sha1_nonzero`` is supplied by the caller (for instance from a strict
    congruence prime under the Selmer hypotheses it presupposes).
    """
    sha = Tri(sha1_nonzero)
    ell = instance.ell
    violations = check_standing(instance.N, ell)
    terms = {p: local_h0(p, instance.local_types.get(p), ell) for p in instance.places}
    notes = []

    raise_q = [p for p, lt in instance.local_types.items() if lt.kind is LocalKind.LEVEL_RAISE_Q]
    if instance.assume_h2_vanishing and len(raise_q) == 1:
        q = raise_q[0]
        check_q_condition(ell, q)
        term = terms[q]
        notes.append("H^2 over S assumed to vanish; the only local term is at q")
        return ObstructionReport(
            standing_violations=violations,
            local_h0=terms,
            sha1_nonzero=sha,
            classification="LocallyObstructed",
            obstructed_at=[q],
            hom_h2_dim_lower_bound=term.dim,
            ring_descriptor=LEVEL_RAISE_RING,
            generator_tag=term.generator,
            notes=notes,
        )

    positive = [p for p, t in terms.items() if t.at_least > 0]
    known_sum = sum(t.at_least for t in terms.values())
    bound = known_sum + (1 if sha is Tri.YES else 0)
    all_zero = all(t.dim == 0 for t in terms.values())
    if positive:
        cls = "LocallyObstructed"
    elif all_zero and sha is Tri.YES:
        cls = "GloballyObstructed"
    elif all_zero and sha is Tri.NO:
        cls = "Unobstructed"
    else:
        cls = "Unknown"
    ring = None
    steinberg = [p for p, lt in instance.local_types.items() if lt.kind is LocalKind.STEINBERG]
    if cls == "GloballyObstructed" and steinberg and (instance.N // steinberg[0]) % steinberg[0]:
        p = steinberg[0]
        ring = f"Z_ell[[T1,T2,T3,T4]]/(T1*T2 - T2 - {p}*T3*T4 + T4)"
        notes.append("Steinberg one-relation presentation quoted, not computed; see the defring command")
    if violations:
        notes.append("standing hypotheses fail; the criteria above may not apply")
    return ObstructionReport(
        standing_violations=violations,
        local_h0=terms,
        sha1_nonzero=sha,
        classification=cls,
        obstructed_at=positive,
        hom_h2_dim_lower_bound=bound,
        ring_descriptor=ring,
        notes=notes,
    )
