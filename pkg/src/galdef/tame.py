"""The finite tame quotient <F, tau | tau^l = F^m = 1, F tau F^-1 = tau^q>.

Elements are kept in the normal form ``F^i tau^ip`` with ``0 <= i < m`` and
``0 <= ip < l``.  Moving ``tau`` past ``F^j`` costs a factor ``q^-j`` in the
inertia exponent::

    (F^i1 tau^a) (F^i2 tau^b) = F^(i1+i2) tau^(a q^-i2 + b)

``m`` is ``l * ord_l(q)`` so that the relation and ``F^m = 1`` are
compatible and functions of ``i mod l`` descend to the quotient.

:class:`FiniteGroup` is the index-based view (multiplication table plus
generator indices) consumed by the cochain machinery; subgroups of a tame
group, such as the inertia subgroup ``<tau>``, are ``FiniteGroup`` values too.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from sympy import isprime, n_order

from .errors import InvalidParameters

__all__ = ["FiniteGroup", "TameGroup", "TameElement", "make_group"]


class FiniteGroup:
    """A finite group given by its multiplication table on indices ``0..n-1``.

    ``table[g, h]`` is the index of ``g*h``; ``generators`` generate the group
    and drive the spanning-tree algorithms in :mod:`galdef.cohomology`.

    The table may be supplied lazily through ``builder`` (returning
    ``(table, labels)``) together with ``order``, so that large groups can be
    used for generator-only computations without materialising ``n^2``
    entries.  ``relations`` optionally lists defining relators as words
    ``[(generator_position, exponent), ...]``; when present they form a
    presentation and module constructors check them instead of the table.
    """

    def __init__(self, table=None, generators=(), labels=(), identity=0, name="",
                 *, order=None, builder=None, relations=()):
        if table is None and builder is None:
            raise InvalidParameters("a group needs a table or a table builder")
        if table is not None:
            table = np.asarray(table, dtype=np.int64)
            table.flags.writeable = False
            self.__dict__["table"] = table
            self.__dict__["labels"] = tuple(labels)
            order = table.shape[0]
        self._builder = builder
        self._order = int(order)
        self.generators = tuple(int(g) for g in generators)
        self.identity = int(identity)
        self.name = name
        self.relations = tuple(tuple(w) for w in relations)

    def _build(self):
        table, labels = self._builder()
        table = np.asarray(table, dtype=np.int64)
        table.flags.writeable = False
        if table.shape != (self._order, self._order):
            raise InvalidParameters("table builder returned the wrong shape")
        self.__dict__["table"] = table
        self.__dict__["labels"] = tuple(labels)

    @cached_property
    def table(self) -> np.ndarray:
        self._build()
        return self.__dict__["table"]

    @cached_property
    def labels(self) -> tuple:
        self._build()
        return self.__dict__["labels"]

    @property
    def order(self) -> int:
        return self._order

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FiniteGroup(name={self.name!r}, order={self.order})"

    @cached_property
    def inverse(self) -> np.ndarray:
        rows, cols = np.nonzero(self.table == self.identity)
        inv = np.empty(self.order, dtype=np.int64)
        inv[rows] = cols
        return inv

    def bfs_words(self):
        """Yield ``(g, s, h)`` with ``g = s*h`` along a BFS tree from the identity.

        Every element other than the identity appears exactly once as ``g``.
        """
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            h = queue.popleft()
            for s in self.generators:
                g = int(self.table[s, h])
                if g not in seen:
                    seen.add(g)
                    queue.append(g)
                    yield g, s, h
        if len(seen) != self.order:
            raise InvalidParameters("generators do not generate the group")

    def subgroup(self, generators, name: str = "") -> tuple["FiniteGroup", np.ndarray]:
        """Subgroup generated by ``generators`` with its embedding into ``self``.

        Elements are listed in BFS order from the identity; the embedding maps
        subgroup index to parent index.
        """
        members = [self.identity]
        seen = {self.identity}
        i = 0
        while i < len(members):
            h = members[i]
            for s in generators:
                g = int(self.table[s, h])
                if g not in seen:
                    seen.add(g)
                    members.append(g)
            i += 1
        emb = np.array(members, dtype=np.int64)
        pos = {g: k for k, g in enumerate(members)}
        sub = np.vectorize(pos.__getitem__, otypes=[np.int64])(self.table[np.ix_(emb, emb)])
        labels = tuple(self.labels[g] for g in members) if self.labels else ()
        gens = tuple(pos[int(s)] for s in generators)
        return FiniteGroup(table=sub, generators=gens, labels=labels, identity=0, name=name), emb


@dataclass(frozen=True)
class TameGroup:
    ell: int
    q: int
    m: int
    q_inv: int

    def __post_init__(self):
        ell, q = self.ell, self.q
        if not isprime(ell) or ell <= 3:
            raise InvalidParameters(f"ell must be a prime > 3, got {ell}")
        if q % ell == 0:
            raise InvalidParameters(f"q = {q} is divisible by ell = {ell}")
        if self.m % ell or pow(q, self.m, ell) != 1:
            raise InvalidParameters(f"m = {self.m} is incompatible with (ell, q) = ({ell}, {q})")
        if (q * self.q_inv) % ell != 1:
            raise InvalidParameters("q_inv is not the inverse of q")

    @classmethod
    def make(cls, ell: int, q: int) -> "TameGroup":
        if not isprime(ell) or ell <= 3:
            raise InvalidParameters(f"ell must be a prime > 3, got {ell}")
        if q % ell == 0:
            raise InvalidParameters(f"q = {q} is divisible by ell = {ell}")
        q %= ell
        return cls(ell=ell, q=q, m=ell * int(n_order(q, ell)), q_inv=pow(q, -1, ell))

    @property
    def order(self) -> int:
        return self.m * self.ell

    @property
    def is_abelian(self) -> bool:
        return self.q == 1

    def element(self, i: int, ip: int) -> "TameElement":
        return TameElement(i % self.m, ip % self.ell, self)

    @property
    def one(self) -> "TameElement":
        return self.element(0, 0)

    @property
    def F(self) -> "TameElement":
        return self.element(1, 0)

    @property
    def tau(self) -> "TameElement":
        return self.element(0, 1)

    def mul(self, g: "TameElement", h: "TameElement") -> "TameElement":
        if g.group != self or h.group != self:
            raise InvalidParameters("elements belong to different tame groups")
        ip = g.ip * pow(self.q_inv, h.i, self.ell) + h.ip
        return self.element(g.i + h.i, ip)

    def enumerate(self) -> list["TameElement"]:
        """All elements, ordered by Frobenius exponent then inertia exponent."""
        return [self.element(i, ip) for i in range(self.m) for ip in range(self.ell)]

    def index(self, g: "TameElement") -> int:
        return g.i * self.ell + g.ip

    @cached_property
    def exponents(self) -> tuple[np.ndarray, np.ndarray]:
        """Arrays ``(i, ip)`` indexed by element position in :meth:`enumerate`."""
        idx = np.arange(self.order, dtype=np.int64)
        return idx // self.ell, idx % self.ell

    def _table(self):
        i, ip = self.exponents
        qinv_pow = np.array([pow(self.q_inv, k, self.ell) for k in range(self.m)], dtype=np.int64)
        prod_i = (i[:, None] + i[None, :]) % self.m
        prod_ip = (ip[:, None] * qinv_pow[i][None, :] + ip[None, :]) % self.ell
        labels = tuple((int(a), int(b)) for a, b in zip(i, ip))
        return prod_i * self.ell + prod_ip, labels

    @cached_property
    def finite(self) -> FiniteGroup:
        """Index view; the multiplication table is built on first use."""
        return FiniteGroup(
            generators=(self.index(self.F), self.index(self.tau)),
            name=f"Gamma({self.ell},{self.q})",
            order=self.order,
            builder=self._table,
            # tau^l = 1, F^m = 1, F tau F^-1 tau^-q = 1
            relations=([(1, self.ell)], [(0, self.m)], [(0, 1), (1, 1), (0, -1), (1, -self.q)]),
        )

    def inertia_subgroup(self) -> tuple[FiniteGroup, np.ndarray]:
        """The cyclic subgroup ``<tau>`` of order l."""
        return self.finite.subgroup([self.index(self.tau)], name=f"<tau> in Gamma({self.ell},{self.q})")


def make_group(ell: int, q: int) -> TameGroup:
    return TameGroup.make(ell, q)


@dataclass(frozen=True)
class TameElement:
    i: int
    ip: int
    group: TameGroup = field(repr=False)

    def __mul__(self, other: "TameElement") -> "TameElement":
        return self.group.mul(self, other)

    def inverse(self) -> "TameElement":
        # (F^i tau^a)^-1 = tau^-a F^-i = F^-i tau^(-a q^i)
        g = self.group
        return g.element(-self.i, -self.ip * pow(g.q, self.i, g.ell))

    def __pow__(self, n: int) -> "TameElement":
        base = self if n >= 0 else self.inverse()
        out = self.group.one
        for _ in range(abs(n)):
            out = out * base
        return out

    @property
    def index(self) -> int:
        return self.group.index(self)
