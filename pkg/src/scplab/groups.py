"""Concrete group structures: finite tables, lattices, tori, semidirect
products with an integer step, and two-sided shift spaces over a finite
symbol group.

Conventions fixed here and relied on everywhere else:
  * semidirect product law  (b, n) * (c, m) = (b * alpha^n(c), n + m),
    so conjugation by the step element (e, 1) acts as alpha on the base;
  * torus points are coordinate tuples mod 1 (Fractions for exact work,
    mpmath floats for high-precision irrational atoms);
  * characters of the d-torus are integer vectors chi with
    chi(x) = exp(2 pi i <chi, x>), and the dual of an automorphism matrix
    is its transpose;
  * shift profiles map index i to a per-coordinate value, with a left
    default for i <= 0 and a right default for i > 0 plus finitely many
    overrides (the split at 0 makes the representation canonical).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Union

from mpmath import mp

from . import spectral
from .exactalg import (
    Matrix,
    Poly,
    hnf_rows,
    identity_matrix,
    lattice_contains,
    lattice_index,
    mat_det,
    mat_inverse_int,
    mat_mul,
    mat_pow,
    mat_transpose,
    mat_vec,
    smith_normal_form,
)

EXHAUSTIVE_AXIOM_ORDER = 64


# ---------------------------------------------------------------------------
# finite groups


@dataclass(frozen=True)
class FiniteGroup:
    """Finite group as an explicit multiplication table on indices 0..n-1."""

    table: tuple[tuple[int, ...], ...]
    name: str = "finite"
    inverse: tuple[int, ...] = field(init=False, compare=False, repr=False)
    identity: int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        n = len(self.table)
        if any(len(row) != n for row in self.table):
            raise ValueError("multiplication table must be square")
        if any(not (0 <= x < n) for row in self.table for x in row):
            raise ValueError("table entries out of range")
        ident = next(
            (e for e in range(n)
             if all(self.table[e][g] == g and self.table[g][e] == g
                    for g in range(n))),
            None,
        )
        if ident is None:
            raise ValueError("no identity element")
        inv = []
        for g in range(n):
            gi = next((h for h in range(n)
                       if self.table[g][h] == ident and self.table[h][g] == ident),
                      None)
            if gi is None:
                raise ValueError(f"element {g} has no inverse")
            inv.append(gi)
        if n <= EXHAUSTIVE_AXIOM_ORDER:
            for a in range(n):
                for b in range(n):
                    tab_ab = self.table[a][b]
                    for c in range(n):
                        if self.table[tab_ab][c] != self.table[a][self.table[b][c]]:
                            raise ValueError(
                                f"associativity fails at ({a}, {b}, {c})"
                            )
        object.__setattr__(self, "identity", ident)
        object.__setattr__(self, "inverse", tuple(inv))

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def conj(self, g: int, a: int) -> int:
        return self.mul(self.mul(g, a), self.inv(g))

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def subgroup_generated(self, gens: Iterable[int]) -> frozenset[int]:
        seen = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            nxt = []
            for g in frontier:
                for s in gens:
                    h = self.mul(g, s)
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
            frontier = nxt
        return frozenset(seen)

    def is_subgroup(self, members: frozenset[int]) -> bool:
        if self.identity not in members:
            return False
        return all(self.mul(a, b) in members for a in members for b in members)

    def left_cosets(self, sub: frozenset[int]) -> list[frozenset[int]]:
        remaining = set(self.elements())
        cosets = []
        while remaining:
            g = min(remaining)
            coset = frozenset(self.mul(g, h) for h in sub)
            cosets.append(coset)
            remaining -= coset
        return cosets

    # -- constructors ------------------------------------------------------

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
        return cls(table, name=f"Z{n}")

    @classmethod
    def direct_product(cls, g: "FiniteGroup", h: "FiniteGroup") -> "FiniteGroup":
        n, m = g.order, h.order
        table = tuple(
            tuple(g.mul(a // m, b // m) * m + h.mul(a % m, b % m)
                  for b in range(n * m))
            for a in range(n * m)
        )
        return cls(table, name=f"{g.name}x{h.name}")

    @classmethod
    def dihedral(cls, n: int) -> "FiniteGroup":
        # element j*n + i represents r^i s^j with s r s = r^-1
        def mul(a: int, b: int) -> int:
            i1, j1 = a % n, a // n
            i2, j2 = b % n, b // n
            i = (i1 + i2) % n if j1 == 0 else (i1 - i2) % n
            return ((j1 + j2) % 2) * n + i

        table = tuple(tuple(mul(a, b) for b in range(2 * n)) for a in range(2 * n))
        return cls(table, name=f"D{n}")

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        perms = sorted(itertools.permutations(range(n)))
        index = {p: i for i, p in enumerate(perms)}
        table = tuple(
            tuple(index[tuple(p[q[i]] for i in range(n))] for q in perms)
            for p in perms
        )
        return cls(table, name=f"S{n}")

    @classmethod
    def quaternion(cls) -> "FiniteGroup":
        # elements 0..7 = +1, -1, +i, -i, +j, -j, +k, -k
        base = {"1": 0, "i": 1, "j": 2, "k": 3}
        rules = {
            ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"),
            ("1", "k"): (1, "k"), ("i", "1"): (1, "i"), ("j", "1"): (1, "j"),
            ("k", "1"): (1, "k"), ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"),
            ("k", "k"): (-1, "1"), ("i", "j"): (1, "k"), ("j", "i"): (-1, "k"),
            ("j", "k"): (1, "i"), ("k", "j"): (-1, "i"), ("k", "i"): (1, "j"),
            ("i", "k"): (-1, "j"),
        }
        names = ["1", "i", "j", "k"]

        def mul(a: int, b: int) -> int:
            sa, ea = (1 if a % 2 == 0 else -1), names[a // 2]
            sb, eb = (1 if b % 2 == 0 else -1), names[b // 2]
            sign, e = rules[(ea, eb)]
            sign *= sa * sb
            return base[e] * 2 + (0 if sign == 1 else 1)

        table = tuple(tuple(mul(a, b) for b in range(8)) for a in range(8))
        return cls(table, name="Q8")


@dataclass(frozen=True)
class FinitePermAutomorphism:
    """Automorphism of a finite group as an element permutation."""

    group: FiniteGroup
    perm: tuple[int, ...]

    def __post_init__(self) -> None:
        g = self.group
        if sorted(self.perm) != list(g.elements()):
            raise ValueError("not a permutation")
        for a in g.elements():
            for b in g.elements():
                if self.perm[g.mul(a, b)] != g.mul(self.perm[a], self.perm[b]):
                    raise ValueError("permutation is not a homomorphism")

    def apply(self, a: int) -> int:
        return self.perm[a]

    def inverse(self) -> "FinitePermAutomorphism":
        inv = [0] * len(self.perm)
        for i, p in enumerate(self.perm):
            inv[p] = i
        return FinitePermAutomorphism(self.group, tuple(inv))


# ---------------------------------------------------------------------------
# lattices and tori


@dataclass(frozen=True)
class LatticeGroup:
    """The free abelian group Z^dim with componentwise addition."""

    dim: int

    def add(self, a: tuple, b: tuple) -> tuple:
        return tuple(x + y for x, y in zip(a, b))

    def neg(self, a: tuple) -> tuple:
        return tuple(-x for x in a)

    @property
    def zero(self) -> tuple:
        return (0,) * self.dim


@dataclass(frozen=True)
class Torus:
    """The dim-torus; characters are integer vectors of the same dimension."""

    dim: int

    @property
    def zero(self) -> tuple:
        return (Fraction(0),) * self.dim

    def reduce_point(self, x: tuple) -> tuple:
        out = []
        for c in x:
            if isinstance(c, Fraction) or isinstance(c, int):
                out.append(Fraction(c) % 1)
            else:
                out.append(c - mp.floor(c))
        return tuple(out)

    def add(self, a: tuple, b: tuple) -> tuple:
        return self.reduce_point(tuple(x + y for x, y in zip(a, b)))

    def neg(self, a: tuple) -> tuple:
        return self.reduce_point(tuple(-x for x in a))

    def window(self, radius: int) -> list[tuple[int, ...]]:
        return [tuple(v) for v in
                itertools.product(range(-radius, radius + 1), repeat=self.dim)]


@dataclass(frozen=True)
class IntAutomorphism:
    """Automorphism of the d-torus (and of Z^d): integer matrix, det +/-1."""

    matrix: Matrix
    char_polynomial: Poly = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if any(len(row) != len(m) for row in m):
            raise ValueError("matrix must be square")
        det = mat_det(m)
        if det not in (1, -1):
            raise ValueError(f"matrix must have determinant +/-1, got {det}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "char_polynomial", spectral.char_poly(m))

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def dual(self) -> "IntAutomorphism":
        """Action on characters: chi(alpha x) = (dual alpha chi)(x)."""
        return IntAutomorphism(mat_transpose(self.matrix))

    def inverse(self) -> "IntAutomorphism":
        return IntAutomorphism(mat_inverse_int(self.matrix))

    def power(self, n: int) -> "IntAutomorphism":
        return IntAutomorphism(mat_pow(self.matrix, n))

    def apply_vector(self, v: tuple) -> tuple:
        return mat_vec(self.matrix, v)

    def apply_point(self, x: tuple, torus: Torus) -> tuple:
        return torus.reduce_point(mat_vec(self.matrix, x))

    def compose(self, other: "IntAutomorphism") -> "IntAutomorphism":
        return IntAutomorphism(mat_mul(self.matrix, other.matrix))


def dual_automorphism(a: IntAutomorphism) -> IntAutomorphism:
    return a.dual()


# ---------------------------------------------------------------------------
# shift spaces


@dataclass(frozen=True)
class ShiftGroup:
    """Two-sided product of a finite symbol group, acted on by the shift.

    Group elements are profiles with finitely many non-identity coordinates,
    stored as sorted (index, symbol) pairs.
    """

    symbol_group: FiniteGroup

    @property
    def identity(self) -> tuple:
        return ()

    def element(self, entries: Mapping[int, int]) -> tuple:
        g = self.symbol_group
        return tuple(sorted((i, s) for i, s in entries.items()
                            if s != g.identity))

    def mul(self, a: tuple, b: tuple) -> tuple:
        g = self.symbol_group
        combined = dict(a)
        for i, s in b:
            combined[i] = g.mul(combined.get(i, g.identity), s)
        return self.element(combined)

    def inv(self, a: tuple) -> tuple:
        g = self.symbol_group
        return tuple((i, g.inv(s)) for i, s in a)

    def shift(self, a: tuple, k: int = 1) -> tuple:
        """Pushforward by tau^k where tau((g_i)) = (g_{i+1})."""
        return tuple(sorted((i - k, s) for i, s in a))


def shift_apply(obj, k: int = 1):
    """Index-translate a profile-represented object by tau^k (exact).

    Works on shift-group elements (sorted (index, symbol) tuples), profile
    subgroup descriptors, and profile measures alike.
    """
    if isinstance(obj, tuple):
        return tuple(sorted((i - k, s) for i, s in obj))
    return obj.shift(k)


# ---------------------------------------------------------------------------
# subgroup descriptors


@dataclass(frozen=True)
class FiniteSubgroup:
    group: FiniteGroup
    members: frozenset[int]

    def __post_init__(self) -> None:
        if not self.group.is_subgroup(self.members):
            raise ValueError("member set is not closed under the group law")

    @property
    def order(self) -> int:
        return len(self.members)

    def contains(self, g: int) -> bool:
        return g in self.members

    def conjugate(self, g: int) -> "FiniteSubgroup":
        grp = self.group
        return FiniteSubgroup(grp, frozenset(grp.conj(g, a) for a in self.members))


@dataclass(frozen=True)
class TorusSubgroup:
    """Closed subgroup of the d-torus cut out by an annihilator lattice.

    K = {x : <chi, x> integral for all chi in the lattice}; the lattice is
    stored in canonical Hermite form, so equal subgroups compare equal.
    """

    dim: int
    annihilator: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        canon = hnf_rows(self.annihilator)
        if any(len(row) != self.dim for row in canon):
            raise ValueError("annihilator vectors have wrong dimension")
        object.__setattr__(self, "annihilator", canon)

    @classmethod
    def full_torus(cls, dim: int) -> "TorusSubgroup":
        return cls(dim, ())

    @classmethod
    def trivial(cls, dim: int) -> "TorusSubgroup":
        return cls(dim, identity_matrix(dim))

    def contains_char(self, chi: tuple[int, ...]) -> bool:
        return lattice_contains(self.annihilator, chi)

    def contains_point(self, x: tuple) -> bool:
        for row in self.annihilator:
            s = sum(Fraction(m) * Fraction(c) for m, c in zip(row, x))
            if s.denominator != 1:
                return False
        return True

    @property
    def order(self):
        """Number of points, or None when the subgroup has positive dimension."""
        return lattice_index(self.annihilator, self.dim)

    def points(self) -> list[tuple[Fraction, ...]]:
        """Enumerate all points (finite subgroups only).

        The subgroup is isomorphic to Z^d modulo the annihilator, so every
        point is q-torsion for q = index; sweep that finite box.
        """
        n = self.order
        if n is None:
            raise ValueError("subgroup has positive dimension")
        pts = []
        for combo in itertools.product(range(n), repeat=self.dim):
            x = tuple(Fraction(c, n) for c in combo)
            if self.contains_point(x):
                pts.append(x)
        if len(pts) != n:
            raise AssertionError("point enumeration disagrees with lattice index")
        return pts

    def transform_chars(self, dual_matrix: Matrix) -> "TorusSubgroup":
        """Image subgroup data under a dual (character-side) matrix action."""
        rows = [mat_vec(dual_matrix, chi) for chi in self.annihilator]
        return TorusSubgroup(self.dim, hnf_rows(rows))

    def is_invariant_under(self, alpha: IntAutomorphism) -> bool:
        dual = mat_transpose(alpha.matrix)
        return self.transform_chars(dual) == self

    def image_under(self, alpha: IntAutomorphism) -> "TorusSubgroup":
        """alpha(K) as a descriptor: its annihilator is (alpha^T)^-1 applied."""
        dual_inv = mat_inverse_int(mat_transpose(alpha.matrix))
        return self.transform_chars(dual_inv)


@dataclass(frozen=True)
class ProfileSubgroup:
    """Per-coordinate subgroup of a shift group with tail defaults.

    Coordinate i carries `left` for i <= 0 and `right` for i > 0 unless an
    override is present; overrides equal to the applicable default are
    dropped, which makes equality structural.
    """

    symbol_group: FiniteGroup
    left: frozenset[int]
    right: frozenset[int]
    overrides: tuple[tuple[int, frozenset[int]], ...] = ()

    def __post_init__(self) -> None:
        g = self.symbol_group
        for s in (self.left, self.right, *(o for _, o in self.overrides)):
            if not g.is_subgroup(s):
                raise ValueError("coordinate set is not a subgroup")
        cleaned = tuple(sorted(
            (i, s) for i, s in self.overrides if s != self._default(i)
        ))
        object.__setattr__(self, "overrides", cleaned)

    def _default(self, i: int) -> frozenset[int]:
        return self.left if i <= 0 else self.right

    def at(self, i: int) -> frozenset[int]:
        for j, s in self.overrides:
            if j == i:
                return s
        return self._default(i)

    def contains(self, element: tuple) -> bool:
        # coordinates not mentioned carry the identity, always a member
        return all(s in self.at(i) for i, s in element)

    def shift(self, k: int = 1) -> "ProfileSubgroup":
        """Descriptor of tau^k(K): coordinate i of the image is K at i + k."""
        lo = min([i for i, _ in self.overrides], default=0)
        hi = max([i for i, _ in self.overrides], default=0)
        span = range(min(lo - abs(k) - 1, -abs(k) - 1),
                     max(hi + abs(k) + 2, abs(k) + 2))
        entries = tuple((i, self.at(i + k)) for i in span)
        return ProfileSubgroup(self.symbol_group, self.left, self.right, entries)

    def is_subset_of(self, other: "ProfileSubgroup") -> bool:
        indices = {i for i, _ in self.overrides} | {i for i, _ in other.overrides}
        indices |= {0, 1}
        if not self.left <= other.left or not self.right <= other.right:
            return False
        return all(self.at(i) <= other.at(i) for i in indices)


@dataclass(frozen=True)
class TrivialLatticeSubgroup:
    """The only compact subgroup of Z^dim."""

    dim: int

    def contains(self, v: tuple) -> bool:
        return all(x == 0 for x in v)


SubgroupDescriptor = Union[FiniteSubgroup, TorusSubgroup, ProfileSubgroup,
                           TrivialLatticeSubgroup]


def smith_annihilator(lattice_basis: Iterable, dim: int) -> TorusSubgroup:
    """Canonical torus subgroup annihilated by the given character vectors."""
    rows = []
    for v in lattice_basis:
        row = tuple(v)
        if any(not isinstance(x, int) and (not isinstance(x, Fraction)
                                           or x.denominator != 1)
               for x in row):
            raise ValueError("annihilator vectors must be integral")
        rows.append(tuple(int(x) for x in row))
    return TorusSubgroup(dim, hnf_rows(rows))


# ---------------------------------------------------------------------------
# semidirect products  Z x| B


BaseAutomorphism = Union[IntAutomorphism, FinitePermAutomorphism, int]


@dataclass(frozen=True)
class SemidirectGroup:
    """Z x|_alpha B with product (b, n)(c, m) = (b alpha^n(c), n + m).

    The base is a Torus (alpha an integer matrix automorphism), a FiniteGroup
    (alpha a permutation automorphism), or a ShiftGroup (alpha the shift by
    one). Conjugation by the step element z = (e, 1) is exactly alpha.
    """

    base: Union[Torus, FiniteGroup, ShiftGroup]
    alpha: BaseAutomorphism

    def __post_init__(self) -> None:
        if isinstance(self.base, Torus):
            if not isinstance(self.alpha, IntAutomorphism) \
                    or self.alpha.dim != self.base.dim:
                raise ValueError("torus base needs an IntAutomorphism of equal dim")
        elif isinstance(self.base, FiniteGroup):
            if not isinstance(self.alpha, FinitePermAutomorphism) \
                    or self.alpha.group != self.base:
                raise ValueError("finite base needs a permutation automorphism")
        elif isinstance(self.base, ShiftGroup):
            if self.alpha != 1:
                raise ValueError("shift base uses the unit shift as alpha")
        else:
            raise ValueError("unsupported base group")

    def base_identity(self):
        if isinstance(self.base, Torus):
            return self.base.zero
        if isinstance(self.base, FiniteGroup):
            return self.base.identity
        return self.base.identity

    def base_mul(self, a, b):
        if isinstance(self.base, Torus):
            return self.base.add(a, b)
        if isinstance(self.base, FiniteGroup):
            return self.base.mul(a, b)
        return self.base.mul(a, b)

    def base_inv(self, a):
        if isinstance(self.base, Torus):
            return self.base.neg(a)
        if isinstance(self.base, FiniteGroup):
            return self.base.inv(a)
        return self.base.inv(a)

    def alpha_apply(self, n: int, b):
        """alpha^n applied to a base element."""
        if isinstance(self.base, Torus):
            return self.alpha.power(n).apply_point(b, self.base)
        if isinstance(self.base, FiniteGroup):
            auto = self.alpha if n >= 0 else self.alpha.inverse()
            x = b
            for _ in range(abs(n)):
                x = auto.apply(x)
            return x
        return self.base.shift(b, n)

    @property
    def identity(self) -> tuple:
        return (self.base_identity(), 0)

    def mul(self, x: tuple, y: tuple) -> tuple:
        (b, n), (c, m) = x, y
        return (self.base_mul(b, self.alpha_apply(n, c)), n + m)

    def inv(self, x: tuple) -> tuple:
        b, n = x
        return (self.alpha_apply(-n, self.base_inv(b)), -n)

    def power(self, x: tuple, k: int) -> tuple:
        if k < 0:
            return self.power(self.inv(x), -k)
        acc = self.identity
        for _ in range(k):
            acc = self.mul(acc, x)
        return acc

    def conj_by_step(self, b):
        """z b z^-1 for z = (e, 1): the defining alpha action on the base."""
        return self.alpha_apply(1, b)


def semidirect_multiply(x: tuple, y: tuple, spec: SemidirectGroup) -> tuple:
    return spec.mul(x, y)
