"""Truncated power series over Z/l^K and tame-relation defects.

A :class:`TruncPoly` is a polynomial in ``T1..Tn`` with coefficients mod
``l^K`` in which every monomial of total degree above ``D`` is dropped, so
it models ``Z_l[[T1..Tn]] / (l^K, (T)^(D+1))``.  Imposing
``F tau F^-1 = tau^p`` on a pair of 2x2 matrices over this ring leaves the
entries of ``F tau F^-1 tau^-p - 1`` as defining relations.

:func:`steinberg_match` compares such relations with
``T1 T2 - T2 - p T3 T4 + T4`` exactly and up to a unit, and
:func:`search_family` runs the comparison over a declared family of
parametrisations, reporting every candidate rather than assuming a match.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import DimensionMismatch, InvalidParameters, NotAUnit
from .linalg import invert_unit

__all__ = [
    "TruncPoly",
    "MatrixOverTrunc",
    "MatchReport",
    "tame_relation_ideal",
    "steinberg_target",
    "steinberg_match",
    "divide_by_unit_multiple",
    "compare_with_target",
    "search_family",
    "FAMILY_SLOTS",
]

MAX_VARS = 6


@dataclass(frozen=True)
class TruncPoly:
    nvars: int
    ell: int
    K: int
    D: int
    terms: tuple = ()  # sorted ((exponents, coeff), ...) with coeff != 0

    def __post_init__(self):
        if not 1 <= self.nvars <= MAX_VARS:
            raise InvalidParameters(f"between 1 and {MAX_VARS} variables are supported")
        if self.K < 1 or self.D < 0:
            raise InvalidParameters("need K >= 1 and D >= 0")
        mod = self.modulus
        clean = {}
        for exps, c in (self.terms.items() if isinstance(self.terms, dict) else self.terms):
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars:
                raise DimensionMismatch("exponent vector has the wrong length")
            if sum(exps) > self.D:
                continue
            clean[exps] = (clean.get(exps, 0) + int(c)) % mod
        object.__setattr__(self, "terms", tuple(sorted((e, c) for e, c in clean.items() if c)))

    @property
    def modulus(self) -> int:
        return self.ell**self.K

    # constructors

    def _like(self, terms) -> "TruncPoly":
        return TruncPoly(self.nvars, self.ell, self.K, self.D, terms)

    @classmethod
    def const(cls, c: int, nvars: int, ell: int, K: int, D: int) -> "TruncPoly":
        return cls(nvars, ell, K, D, {(0,) * nvars: c})

    @classmethod
    def var(cls, i: int, nvars: int, ell: int, K: int, D: int) -> "TruncPoly":
        """The variable ``T_(i+1)`` (0-based index)."""
        exps = [0] * nvars
        exps[i] = 1
        return cls(nvars, ell, K, D, {tuple(exps): 1})

    # arithmetic

    def _check(self, other):
        if not isinstance(other, TruncPoly):
            return self._like({(0,) * self.nvars: int(other)})
        if (other.nvars, other.ell, other.K, other.D) != (self.nvars, self.ell, self.K, self.D):
            raise DimensionMismatch("truncated polynomials live in different rings")
        return other

    @property
    def coeffs(self) -> dict:
        return dict(self.terms)

    def __add__(self, other):
        other = self._check(other)
        out = self.coeffs
        for e, c in other.terms:
            out[e] = out.get(e, 0) + c
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -c for e, c in self.terms})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        out = {}
        D = self.D
        for e1, c1 in self.terms:
            d1 = sum(e1)
            for e2, c2 in other.terms:
                if d1 + sum(e2) > D:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return self._like(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.invert_unit() ** (-n)
        result, base = self._like({(0,) * self.nvars: 1}), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self._like({(0,) * self.nvars: other})
        if not isinstance(other, TruncPoly):
            return NotImplemented
        return (self.nvars, self.ell, self.K, self.D, self.terms) == (
            other.nvars, other.ell, other.K, other.D, other.terms)

    def __hash__(self):
        return hash((self.nvars, self.ell, self.K, self.D, self.terms))

    @property
    def constant(self) -> int:
        return self.coeffs.get((0,) * self.nvars, 0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_unit(self) -> bool:
        return self.constant % self.ell != 0

    def invert_unit(self) -> "TruncPoly":
        """Inverse in the truncated ring: ``c^-1 sum_k (-x)^k`` with ``self = c (1 + x)``."""
        c = self.constant
        if c % self.ell == 0:
            raise NotAUnit("constant term is not a unit")
        c_inv = invert_unit(c, self.modulus)
        x = self * c_inv - 1  # no constant term, so x^(D+1) = 0
        total, power = self._like({(0,) * self.nvars: 1}), self._like({(0,) * self.nvars: 1})
        for _ in range(self.D):
            power = power * (-x)
            total = total + power
        return total * c_inv

    def homogeneous(self, d: int) -> "TruncPoly":
        return self._like({e: c for e, c in self.terms if sum(e) == d})

    def min_degree(self) -> int | None:
        return min((sum(e) for e, _ in self.terms), default=None)

    def relabel(self, perm) -> "TruncPoly":
        """Rename ``T_(i+1)`` to ``T_(perm[i]+1)``."""
        if sorted(perm) != list(range(self.nvars)):
            raise InvalidParameters("relabeling must be a permutation of the variables")
        out = {}
        for e, c in self.terms:
            new = [0] * self.nvars
            for i, k in enumerate(e):
                new[perm[i]] += k
            out[tuple(new)] = c
        return self._like(out)

    def substitute(self, i: int, value: "TruncPoly") -> "TruncPoly":
        """Replace ``T_(i+1)`` by ``value``."""
        out = self._like({})
        for e, c in self.terms:
            rest = list(e)
            k = rest[i]
            rest[i] = 0
            out = out + self._like({tuple(rest): c}) * value**k
        return out

    def to_dict(self) -> dict:
        """Monomial -> coefficient with monomials written like ``T1^2*T3`` (``1`` for the constant)."""
        def name(e):
            parts = [f"T{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k]
            return "*".join(parts) or "1"

        return {name(e): c for e, c in sorted(self.terms, key=lambda t: (sum(t[0]), [-x for x in t[0]]))}

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{m}" if m != "1" else str(c) for m, c in self.to_dict().items())


@dataclass(frozen=True)
class MatrixOverTrunc:
    a: TruncPoly
    b: TruncPoly
    c: TruncPoly
    d: TruncPoly

    @classmethod
    def from_rows(cls, rows) -> "MatrixOverTrunc":
        (a, b), (c, d) = rows
        ring = next(x for x in (a, b, c, d) if isinstance(x, TruncPoly))
        conv = [x if isinstance(x, TruncPoly) else ring._like({(0,) * ring.nvars: int(x)}) for x in (a, b, c, d)]
        return cls(*conv)

    @classmethod
    def identity_like(cls, p: TruncPoly) -> "MatrixOverTrunc":
        one, zero = p._like({(0,) * p.nvars: 1}), p._like({})
        return cls(one, zero, zero, one)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __mul__(self, o: "MatrixOverTrunc") -> "MatrixOverTrunc":
        return MatrixOverTrunc(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __sub__(self, o: "MatrixOverTrunc") -> "MatrixOverTrunc":
        return MatrixOverTrunc(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def det(self) -> TruncPoly:
        return self.a * self.d - self.b * self.c

    def is_invertible(self) -> bool:
        return self.det().is_unit()

    def inverse(self) -> "MatrixOverTrunc":
        inv = self.det().invert_unit()
        return MatrixOverTrunc(self.d * inv, -self.b * inv, -self.c * inv, self.a * inv)

    def __pow__(self, n: int) -> "MatrixOverTrunc":
        if n < 0:
            return self.inverse() ** (-n)
        result, base = MatrixOverTrunc.identity_like(self.a), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def residual(self):
        """Entries reduced modulo the maximal ideal ``(l, T1..Tn)``."""
        return [[self.a.constant % self.a.ell, self.b.constant % self.a.ell],
                [self.c.constant % self.a.ell, self.d.constant % self.a.ell]]

    def __eq__(self, other):
        if not isinstance(other, MatrixOverTrunc):
            return NotImplemented
        return self.entries() == other.entries()

    def __hash__(self):
        return hash(self.entries())

    def to_dict(self):
        return [[self.a.to_dict(), self.b.to_dict()], [self.c.to_dict(), self.d.to_dict()]]


def tame_relation_ideal(rhoF: MatrixOverTrunc, rhoTau: MatrixOverTrunc, p: int, steinberg: bool = False):
    """Nonzero entries of ``rhoF rhoTau rhoF^-1 (rhoTau^p)^-1 - 1`` as ``[(position, poly), ...]``.

    With ``steinberg=True`` the residual matrices must have the shape
    ``[[p, *], [0, 1]]`` and ``[[1, *], [0, 1]]``.
    """
    ell = rhoF.a.ell
    if p % ell == 0:
        raise InvalidParameters(f"p = {p} must be prime to ell = {ell}")
    if not rhoF.is_invertible():
        raise NotAUnit("rho(F) is not invertible")
    if steinberg:
        rf, rt = rhoF.residual(), rhoTau.residual()
        if rf[0][0] != p % ell or rf[1][0] != 0 or rf[1][1] != 1 or rt[0][0] != 1 or rt[1][0] != 0 or rt[1][1] != 1:
            raise InvalidParameters("residual matrices do not have the Steinberg shape")
    lhs = rhoF * rhoTau * rhoF.inverse()
    E = lhs * (rhoTau**p).inverse() - MatrixOverTrunc.identity_like(rhoF.a)
    names = ("11", "12", "21", "22")
    return [(n, e) for n, e in zip(names, E.entries()) if not e.is_zero()]


def steinberg_target(p: int, ell: int, K: int, D: int) -> TruncPoly:
    """``T1 T2 - T2 - p T3 T4 + T4`` in four variables."""
    T = [TruncPoly.var(i, 4, ell, K, D) for i in range(4)]
    return T[0] * T[1] - T[1] - T[2] * T[3] * p + T[3]


def divide_by_unit_multiple(g: TruncPoly, t: TruncPoly) -> TruncPoly | None:
    """A unit ``u`` with ``g = u t`` in the truncated ring, or None.

    Needs the linear part of ``t`` to have a unit coefficient; ``u`` is
    solved degree by degree by exact division by that linear form.  Only
    the part of ``u`` below degree ``D`` matters and is returned.
    """
    L = t.homogeneous(1)
    if t.constant % t.modulus or L.is_zero():
        raise InvalidParameters("unit comparison needs a target with zero constant and nonzero linear part")
    pivot = next((e.index(1) for e, c in L.terms if c % t.ell), None)
    if pivot is None:
        raise InvalidParameters("linear part of the target has no unit coefficient")
    c_piv = L.coeffs[tuple(int(i == pivot) for i in range(t.nvars))]
    c_inv = invert_unit(c_piv, t.modulus)
    rest = L - L._like({tuple(int(i == pivot) for i in range(t.nvars)): c_piv})
    if g.constant % g.modulus:
        return None
    u = g._like({})
    for d in range(1, g.D + 1):
        rhs = g.homogeneous(d) - (u * t).homogeneous(d)
        q = rhs._like({})
        r = rhs
        # r = T_piv * A + B  ->  r = L * (A / c) + (B - rest * A / c)
        while True:
            A = r._like({tuple(k - (i == pivot) for i, k in enumerate(e)): c for e, c in r.terms if e[pivot] > 0})
            if A.is_zero():
                break
            B = r._like({e: c for e, c in r.terms if e[pivot] == 0})
            q = q + A * c_inv
            r = B - rest * A * c_inv
        if not r.is_zero():
            return None
        u = u + q
    return u if u.is_unit() else None


@dataclass(frozen=True)
class MatchReport:
    candidate: dict
    generators: list  # [(position, poly), ...]
    matched: bool
    match_kind: str | None  # "exact", "unit" or None
    relabeling: tuple
    any_generator_matches: bool = False
    unit: TruncPoly | None = field(default=None, compare=False)
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "candidate": self.candidate,
            "generators": [{"entry": pos, "poly": g.to_dict()} for pos, g in self.generators],
            "matched": self.matched,
            "match_kind": self.match_kind,
            "relabeling": [f"T{i + 1}->T{j + 1}" for i, j in enumerate(self.relabeling)],
            "any_generator_matches": self.any_generator_matches,
            "unit": None if self.unit is None else self.unit.to_dict(),
            "note": self.note,
        }


def compare_with_target(g: TruncPoly, target: TruncPoly):
    """``("exact", 1)``, ``("unit", u)`` with ``g = u target``, or ``(None, None)``."""
    if g == target:
        return "exact", g._like({(0,) * g.nvars: 1})
    u = divide_by_unit_multiple(g, target)
    if u is not None:
        return "unit", u
    return None, None


def steinberg_match(rhoF: MatrixOverTrunc, rhoTau: MatrixOverTrunc, p: int, relabeling=None,
                    candidate: dict | None = None) -> MatchReport:
    """Compare the tame-relation generators with ``T1 T2 - T2 - p T3 T4 + T4``.

    ``relabeling`` is a permutation applied to the generator's variables
    before comparison (identity by default).  The match is reported only if
    exactly one generator is nonzero and it equals the target, on the nose or
    up to a unit, modulo degree > D.
    """
    ring = rhoF.a
    if ring.nvars != 4:
        raise InvalidParameters("the Steinberg comparison uses exactly four variables")
    perm = tuple(range(4)) if relabeling is None else tuple(relabeling)
    gens = tame_relation_ideal(rhoF, rhoTau, p)
    target = steinberg_target(p, ring.ell, ring.K, ring.D)
    kinds = [compare_with_target(g.relabel(perm), target) for _, g in gens]
    any_match = any(k for k, _ in kinds)
    matched = len(gens) == 1 and kinds[0][0] is not None
    kind, unit = kinds[0] if matched else (None, None)
    if not gens:
        note = "relation holds identically; the ideal is zero"
    elif matched:
        note = f"single generator equals the target ({kind}) modulo degree > {ring.D}"
    else:
        note = "generators recorded verbatim; no single-generator match"
    return MatchReport(
        candidate=candidate or {},
        generators=gens,
        matched=matched,
        match_kind=kind,
        relabeling=perm,
        any_generator_matches=any_match,
        unit=unit,
        note=note,
    )


# Slots of the declared family: F = [[p (1 + Ta), Tb], [0, 1 + Tc]], tau = [[1 + Te, Td], [0, 1 + Tf]].
FAMILY_SLOTS = ("F11", "F12", "F22", "tau11", "tau12", "tau22")


def _family_matrices(assign: dict, p: int, ell: int, K: int, D: int):
    def slot(name):
        i = assign.get(name)
        return None if i is None else TruncPoly.var(i, 4, ell, K, D)

    one = TruncPoly.const(1, 4, ell, K, D)
    zero = TruncPoly.const(0, 4, ell, K, D)
    f11 = (one + slot("F11")) * p if "F11" in assign else one * p
    f12 = slot("F12") if "F12" in assign else zero
    f22 = one + slot("F22") if "F22" in assign else one
    t11 = one + slot("tau11") if "tau11" in assign else one
    t12 = slot("tau12") if "tau12" in assign else one
    t22 = one + slot("tau22") if "tau22" in assign else one
    return MatrixOverTrunc(f11, f12, zero, f22), MatrixOverTrunc(t11, t12, zero, t22)


def search_family(p: int, ell: int, K: int = 2, D: int = 2, slots=FAMILY_SLOTS, max_vars: int = 4):
    """Run :func:`steinberg_match` on every way of placing distinct ``T1..T4`` in the family slots.

    Unfilled diagonal slots are 1 (times p for ``F11``), an unfilled ``F12``
    is 0 and an unfilled ``tau12`` is 1, so every candidate reduces to the
    residual Steinberg shape.  Candidates are enumerated in a fixed order.
    """
    reports = []
    for k in range(0, min(max_vars, len(slots)) + 1):
        for chosen in itertools.combinations(slots, k):
            for labels in itertools.permutations(range(4), k):
                assign = dict(zip(chosen, labels))
                rhoF, rhoTau = _family_matrices(assign, p, ell, K, D)
                cand = {s: f"T{assign[s] + 1}" for s in chosen}
                reports.append(steinberg_match(rhoF, rhoTau, p, candidate=cand))
    return reports
