"""Newform coefficient data and congruence primes.

Two forms are compared mod l on every ``n <= B`` with ``gcd(n, N l) = 1``,
where ``N`` is the lcm of the levels and ``B`` the Sturm bound
``floor(k [SL2(Z) : Gamma0(N)] / 12)`` (at least 1).  A strict congruence
prime for ``f`` is one witnessed by a form at the same level as ``f``.

Data files are JSON::

    {"forms": [{"label": "11a", "level": 11, "weight": 2, "orbit_id": "11a",
                "an_int": [1, -2, -1, ...], "an_mod": {"7": [...]},
                "modular_degree": 1}]}

Coefficient lists start at ``a_1``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import jsonschema
from sympy import isprime, primefactors, primerange

from .errors import InsufficientCoefficients, InvalidParameters, NotComparable, SchemaError

__all__ = [
    "Newform",
    "CongruenceResult",
    "CongruenceFinding",
    "CoefficientWarning",
    "NEWFORM_SCHEMA",
    "sturm_bound",
    "gamma0_index",
    "parse_newforms",
    "load_newforms",
    "congruent_mod",
    "congruence_primes",
    "strict_congruence_primes",
    "ars_congruence_primes",
]

NEWFORM_SCHEMA = {
    "type": "object",
    "required": ["forms"],
    "additionalProperties": False,
    "properties": {
        "forms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "level", "weight", "orbit_id"],
                "additionalProperties": False,
                "properties": {
                    "label": {"type": "string", "minLength": 1},
                    "level": {"type": "integer", "minimum": 1},
                    "weight": {"type": "integer", "minimum": 1},
                    "orbit_id": {"type": "string", "minLength": 1},
                    "an_int": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
                    "an_mod": {
                        "type": "object",
                        "patternProperties": {
                            "^[0-9]+$": {"type": "array", "items": {"type": "integer"}, "minItems": 1}
                        },
                        "additionalProperties": False,
                    },
                    "modular_degree": {"type": "integer", "minimum": 1},
                    "note": {"type": "string"},
                },
                "anyOf": [{"required": ["an_int"]}, {"required": ["an_mod"]}],
            },
        }
    },
}


class CoefficientWarning(UserWarning):
    """A form carries fewer coefficients than the Sturm bound of its level."""


def gamma0_index(N: int) -> int:
    """``[SL2(Z) : Gamma0(N)] = N prod_{p | N} (1 + 1/p)``."""
    if N < 1:
        raise InvalidParameters("level must be positive")
    idx = Fraction(N)
    for p in primefactors(N):
        idx *= Fraction(p + 1, p)
    assert idx.denominator == 1
    return int(idx)


def sturm_bound(N: int, k: int) -> int:
    if N < 1 or k < 2 or k % 2:
        raise InvalidParameters(f"Sturm bound needs N >= 1 and even k >= 2, got ({N}, {k})")
    return max(1, k * gamma0_index(N) // 12)


@dataclass(frozen=True)
class Newform:
    label: str
    level: int
    weight: int
    orbit_id: str
    an_int: tuple | None = None
    an_mod: dict = field(default_factory=dict)  # ell -> tuple of residues
    modular_degree: int | None = None

    def __post_init__(self):
        if self.an_int is None and not self.an_mod:
            raise InvalidParameters(f"{self.label}: no coefficient data")

    def residues(self, ell: int) -> tuple | None:
        """``a_n mod l`` for ``n = 1, 2, ...``, or None if no data covers l."""
        if ell in self.an_mod:
            return tuple(a % ell for a in self.an_mod[ell])
        if self.an_int is not None:
            return tuple(a % ell for a in self.an_int)
        return None

    def n_coefficients(self, ell: int | None = None) -> int:
        if ell is not None and ell in self.an_mod:
            return len(self.an_mod[ell])
        if self.an_int is not None:
            return len(self.an_int)
        return min(len(v) for v in self.an_mod.values())

    @property
    def sufficient(self) -> bool:
        return self.n_coefficients() >= sturm_bound(self.level, self.weight)

    def to_dict(self) -> dict:
        out = {"label": self.label, "level": self.level, "weight": self.weight, "orbit_id": self.orbit_id}
        if self.an_int is not None:
            out["an_int"] = list(self.an_int)
        if self.an_mod:
            out["an_mod"] = {str(k): list(v) for k, v in sorted(self.an_mod.items())}
        if self.modular_degree is not None:
            out["modular_degree"] = self.modular_degree
        return out


def _path(err) -> str:
    return "/".join(str(p) for p in err.absolute_path)


def parse_newforms(data) -> list[Newform]:
    """Validate a decoded data file and return its forms ordered by (level, label)."""
    validator = jsonschema.Draft7Validator(NEWFORM_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        raise SchemaError(err.message, _path(err) or "<root>")
    forms = []
    for i, rec in enumerate(data["forms"]):
        where = f"forms/{i}"
        an_mod = {}
        for key, col in rec.get("an_mod", {}).items():
            ell = int(key)
            if not isprime(ell):
                raise SchemaError(f"{rec['label']}: an_mod key {key} is not prime", f"{where}/an_mod/{key}")
            if col[0] % ell != 1:
                raise SchemaError(f"{rec['label']}: a_1 is not 1 mod {ell}", f"{where}/an_mod/{key}/0")
            an_mod[ell] = tuple(int(a) % ell for a in col)
        an_int = rec.get("an_int")
        if an_int is not None and an_int[0] != 1:
            raise SchemaError(f"{rec['label']}: a_1 = {an_int[0]}, expected 1", f"{where}/an_int/0")
        if rec["weight"] % 2:
            raise SchemaError(f"{rec['label']}: odd weight {rec['weight']}", f"{where}/weight")
        form = Newform(
            label=rec["label"],
            level=rec["level"],
            weight=rec["weight"],
            orbit_id=rec["orbit_id"],
            an_int=None if an_int is None else tuple(an_int),
            an_mod=an_mod,
            modular_degree=rec.get("modular_degree"),
        )
        if not form.sufficient:
            warnings.warn(
                f"{form.label}: {form.n_coefficients()} coefficients, below the Sturm bound "
                f"{sturm_bound(form.level, form.weight)} at level {form.level}",
                CoefficientWarning,
                stacklevel=2,
            )
        forms.append(form)
    labels = [f.label for f in forms]
    if len(set(labels)) != len(labels):
        raise SchemaError("duplicate form labels", "forms")
    return sorted(forms, key=lambda f: (f.level, f.label))


def load_newforms(path) -> list[Newform]:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} (line {exc.lineno})", "<root>") from None
    return parse_newforms(data)


@dataclass(frozen=True)
class CongruenceResult:
    congruent: bool
    witness: int | None
    bound: int
    compared: tuple


def congruent_mod(f: Newform, g: Newform, ell: int) -> CongruenceResult:
    """Compare ``a_n(f)`` and ``a_n(g)`` mod l up to the Sturm bound of the lcm level."""
    if f.orbit_id == g.orbit_id:
        raise NotComparable(f"{f.label} and {g.label} lie in the same Galois orbit ({f.orbit_id})")
    if f.weight != g.weight:
        raise NotComparable(f"weights differ: {f.weight} vs {g.weight}")
    if not isprime(ell):
        raise InvalidParameters(f"ell = {ell} is not prime")
    N = math.lcm(f.level, g.level)
    B = sturm_bound(N, f.weight)
    rf, rg = f.residues(ell), g.residues(ell)
    for form, res in ((f, rf), (g, rg)):
        if res is None or len(res) < B:
            have = 0 if res is None else len(res)
            raise InsufficientCoefficients(f"{form.label}: {have} coefficients mod {ell}, need {B}")
    ns = tuple(n for n in range(1, B + 1) if math.gcd(n, N * ell) == 1)
    for n in ns:
        if rf[n - 1] != rg[n - 1]:
            return CongruenceResult(False, n, B, ns)
    return CongruenceResult(True, None, B, ns)


@dataclass(frozen=True)
class CongruenceFinding:
    f_label: str
    g_label: str
    ell: int
    strict: bool
    checked_up_to: int

    def to_dict(self) -> dict:
        return {
            "f_label": self.f_label,
            "g_label": self.g_label,
            "ell": self.ell,
            "strict": self.strict,
            "checked_up_to": self.checked_up_to,
        }


def congruence_primes(f: Newform, pool, ell_max: int, require_standing: bool = False) -> list[CongruenceFinding]:
    """All findings against forms of level ``d | N``; strict when ``d = N``.

    Primes for which a partner carries no coefficient data are skipped.
    """
    from .engine import check_standing

    out = []
    for g in pool:
        if g.orbit_id == f.orbit_id or f.level % g.level or g.weight != f.weight:
            continue
        for ell in primerange(2, ell_max + 1):
            if require_standing and check_standing(f.level, ell):
                continue
            if f.residues(ell) is None or g.residues(ell) is None:
                continue
            res = congruent_mod(f, g, ell)
            if res.congruent:
                out.append(CongruenceFinding(f.label, g.label, ell, g.level == f.level, res.bound))
    return sorted(out, key=lambda c: (c.ell, c.g_label))


def strict_congruence_primes(f: Newform, pool, ell_max: int, require_standing: bool = False) -> list[CongruenceFinding]:
    return [c for c in congruence_primes(f, pool, ell_max, require_standing) if c.strict]


def ars_congruence_primes(N: int, m_deg: int) -> tuple[list[int], list[int]]:
    """Prime divisors of ``N * m_deg`` and, separately, those of ``m_deg``."""
    if N < 1:
        raise InvalidParameters("N must be positive")
    if m_deg < 1:
        raise InvalidParameters("modular degree must be positive")
    return sorted(primefactors(N * m_deg)), sorted(primefactors(m_deg))
