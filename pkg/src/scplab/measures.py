"""Probability measures on the concrete groups and their convolution algebra.

Three representations cover every scenario family:

  * AtomicMeasure  -- finite support with exact rational (or float) weights,
    on finite groups, lattices, tori, or single fibers of a semidirect group;
  * SpectralMeasure -- a lazy Fourier-coefficient oracle on a torus, cached
    on a finite character window; pushforward by an invertible dual matrix
    composes oracles, so nothing is ever lost off-window;
  * ProductProfileMeasure -- a coordinatewise measure on a two-sided shift
    space with tail defaults, making shift arithmetic exact.

Haar measures are carried structurally by their subgroup descriptor.
Fourier convention: mu_hat(chi) = integral of exp(2 pi i <chi, x>) d mu.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Optional, Union

from mpmath import mp

from .exactalg import hnf_rows, mat_transpose, mat_vec
from .groups import (
    FiniteGroup,
    FiniteSubgroup,
    IntAutomorphism,
    LatticeGroup,
    ProfileSubgroup,
    ShiftGroup,
    SubgroupDescriptor,
    Torus,
    TorusSubgroup,
    TrivialLatticeSubgroup,
)

WEIGHT_SUM_TOL = 1e-12
DEFAULT_IDEMPOTENT_TOL = 1e-6

Weight = Union[Fraction, float]


class GroupMismatchError(ValueError):
    pass


def _check_same_group(a, b) -> None:
    if a.group != b.group:
        raise GroupMismatchError(f"measures live on different groups: "
                                 f"{a.group!r} vs {b.group!r}")


# ---------------------------------------------------------------------------
# atomic measures


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely supported probability measure; exact when weights are Fractions."""

    group: Union[FiniteGroup, LatticeGroup, Torus, ShiftGroup]
    atoms: tuple[tuple[object, Weight], ...]

    @classmethod
    def of(cls, group, weights: Mapping) -> "AtomicMeasure":
        items = [(e, w) for e, w in weights.items() if w != 0]
        return cls(group, tuple(sorted(items, key=lambda t: repr(t[0]))))

    def __post_init__(self) -> None:
        elems = [e for e, _ in self.atoms]
        if len(set(map(repr, elems))) != len(elems):
            raise ValueError("support elements must be distinct")
        if any(w < 0 for _, w in self.atoms):
            raise ValueError("weights must be nonnegative")
        total = sum(w for _, w in self.atoms)
        if self.exact:
            if total != 1:
                raise ValueError(f"weights must sum to 1 exactly, got {total}")
        elif abs(float(total) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1 within {WEIGHT_SUM_TOL}")

    @property
    def exact(self) -> bool:
        return all(isinstance(w, Fraction) for _, w in self.atoms)

    def weight_of(self, element) -> Weight:
        for e, w in self.atoms:
            if e == element:
                return w
        return Fraction(0) if self.exact else 0.0

    @property
    def support(self) -> tuple:
        return tuple(e for e, _ in self.atoms)

    def map_elements(self, f: Callable) -> "AtomicMeasure":
        out: dict = {}
        for e, w in self.atoms:
            img = f(e)
            out[img] = out.get(img, Fraction(0)) + w
        return AtomicMeasure.of(self.group, out)

    def total_variation(self, other: "AtomicMeasure") -> Weight:
        _check_same_group(self, other)
        keys = {e: None for e, _ in self.atoms}
        for e, _ in other.atoms:
            keys[e] = None
        acc = Fraction(0)
        for e in keys:
            acc += abs(self.weight_of(e) - other.weight_of(e))
        return acc / 2


def _group_mul(group, a, b):
    if isinstance(group, FiniteGroup):
        return group.mul(a, b)
    if isinstance(group, LatticeGroup):
        return group.add(a, b)
    if isinstance(group, Torus):
        return group.add(a, b)
    if isinstance(group, ShiftGroup):
        return group.mul(a, b)
    raise GroupMismatchError(f"unsupported group {group!r}")


def _group_inv(group, a):
    if isinstance(group, FiniteGroup):
        return group.inv(a)
    if isinstance(group, (LatticeGroup, Torus)):
        return group.neg(a)
    if isinstance(group, ShiftGroup):
        return group.inv(a)
    raise GroupMismatchError(f"unsupported group {group!r}")


def _group_identity(group):
    if isinstance(group, FiniteGroup):
        return group.identity
    if isinstance(group, (LatticeGroup, Torus)):
        return group.zero
    if isinstance(group, ShiftGroup):
        return group.identity
    raise GroupMismatchError(f"unsupported group {group!r}")


def dirac(group, element) -> AtomicMeasure:
    return AtomicMeasure.of(group, {element: Fraction(1)})


def uniform_on(group: FiniteGroup, members) -> AtomicMeasure:
    members = sorted(members)
    w = Fraction(1, len(members))
    return AtomicMeasure.of(group, {m: w for m in members})


# ---------------------------------------------------------------------------
# spectral measures


@dataclass(frozen=True)
class SpectralMeasure:
    """Lazy character-coefficient oracle on a torus.

    The oracle is total on Z^d; the window dict caches evaluations. Provenance
    is one of "exact-from-atoms", "closed-form", "limit-of-products".
    """

    group: Torus
    coeff_fn: Callable[[tuple[int, ...]], complex]
    provenance: str = "closed-form"
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def coeff(self, chi: tuple[int, ...]) -> complex:
        if chi not in self._cache:
            self._cache[chi] = complex(self.coeff_fn(chi))
        return self._cache[chi]

    def window_values(self, radius: int) -> dict[tuple[int, ...], complex]:
        return {chi: self.coeff(chi) for chi in self.group.window(radius)}

    def validate_window(self, radius: int, tol: float = 1e-9) -> None:
        zero = (0,) * self.group.dim
        c0 = self.coeff(zero)
        if abs(c0 - 1.0) > tol:
            raise ValueError(f"total mass coefficient is {c0}, expected 1")
        for chi in self.group.window(radius):
            c = self.coeff(chi)
            if abs(c) > 1.0 + tol:
                raise ValueError(f"coefficient at {chi} exceeds modulus 1: {c}")
            neg = tuple(-m for m in chi)
            if abs(c - self.coeff(neg).conjugate()) > tol:
                raise ValueError(f"Hermitian symmetry fails at {chi}")


def _phase_exact(t: Fraction) -> complex:
    t = t % 1
    return cmath.exp(2j * cmath.pi * float(t))


def _char_value(chi: tuple[int, ...], point: tuple) -> complex:
    """exp(2 pi i <chi, x>) with the mod-1 reduction done before rounding."""
    if all(isinstance(c, (Fraction, int)) for c in point):
        t = sum(Fraction(m) * Fraction(c) for m, c in zip(chi, point))
        return _phase_exact(t)
    with mp.workprec(max(mp.prec, 400)):
        t = mp.mpf(0)
        for m, c in zip(chi, point):
            t += m * (c if isinstance(c, mp.mpf) else mp.mpf(c))
        t -= mp.floor(t)
        return complex(mp.cos(2 * mp.pi * t), mp.sin(2 * mp.pi * t))


def spectral_of_atoms(m: AtomicMeasure) -> SpectralMeasure:
    if not isinstance(m.group, Torus):
        raise GroupMismatchError("spectral form requires a torus measure")
    atoms = m.atoms

    def coeff(chi: tuple[int, ...]) -> complex:
        return sum(float(w) * _char_value(chi, e) for e, w in atoms)

    return SpectralMeasure(m.group, coeff, provenance="exact-from-atoms")


# ---------------------------------------------------------------------------
# product-profile measures


@dataclass(frozen=True)
class ProductProfileMeasure:
    """Coordinatewise product measure on a shift space.

    Coordinate i carries `left` for i <= 0 and `right` for i > 0 unless
    overridden; overrides equal to the applicable default are dropped so
    equality is structural. Coordinate measures are exact AtomicMeasures on
    the symbol group.
    """

    group: ShiftGroup
    left: AtomicMeasure
    right: AtomicMeasure
    overrides: tuple[tuple[int, AtomicMeasure], ...] = ()

    def __post_init__(self) -> None:
        sym = self.group.symbol_group
        for m in (self.left, self.right, *(m for _, m in self.overrides)):
            if m.group != sym:
                raise GroupMismatchError("coordinate measure on wrong group")
            if not m.exact:
                raise ValueError("profile coordinates must be exact")
        cleaned = tuple(sorted(
            ((i, m) for i, m in self.overrides if m != self._default(i)),
            key=lambda t: t[0],
        ))
        object.__setattr__(self, "overrides", cleaned)

    def _default(self, i: int) -> AtomicMeasure:
        return self.left if i <= 0 else self.right

    def at(self, i: int) -> AtomicMeasure:
        for j, m in self.overrides:
            if j == i:
                return m
        return self._default(i)

    def shift(self, k: int = 1) -> "ProductProfileMeasure":
        """Pushforward under tau^k: coordinate i of the image is input at i+k."""
        lo = min([i for i, _ in self.overrides], default=0)
        hi = max([i for i, _ in self.overrides], default=0)
        span = range(min(lo - abs(k) - 1, -abs(k) - 1),
                     max(hi + abs(k) + 2, abs(k) + 2))
        entries = tuple((i, self.at(i + k)) for i in span)
        return ProductProfileMeasure(self.group, self.left, self.right, entries)


# ---------------------------------------------------------------------------
# Haar measures


@dataclass(frozen=True)
class HaarMeasure:
    """Normalized Haar measure of a compact subgroup, held structurally."""

    group: Union[FiniteGroup, Torus, ShiftGroup]
    subgroup: SubgroupDescriptor

    def as_atomic(self) -> AtomicMeasure:
        if isinstance(self.subgroup, FiniteSubgroup):
            return uniform_on(self.group, self.subgroup.members)
        if isinstance(self.subgroup, TorusSubgroup):
            pts = self.subgroup.points()
            w = Fraction(1, len(pts))
            return AtomicMeasure.of(self.group, {p: w for p in pts})
        raise ValueError("profile Haar measures have no atomic form")

    def as_spectral(self) -> SpectralMeasure:
        if not isinstance(self.subgroup, TorusSubgroup):
            raise GroupMismatchError("spectral form requires a torus subgroup")
        sub = self.subgroup

        def coeff(chi: tuple[int, ...]) -> complex:
            return 1.0 + 0.0j if sub.contains_char(chi) else 0.0j

        return SpectralMeasure(self.group, coeff, provenance="closed-form")

    def as_profile(self) -> ProductProfileMeasure:
        if not isinstance(self.subgroup, ProfileSubgroup):
            raise GroupMismatchError("profile form requires a profile subgroup")
        sub = self.subgroup
        sym = sub.symbol_group
        group = ShiftGroup(sym)

        def haar_at(members: frozenset) -> AtomicMeasure:
            return uniform_on(sym, members)

        return ProductProfileMeasure(
            group,
            haar_at(sub.left),
            haar_at(sub.right),
            tuple((i, haar_at(s)) for i, s in sub.overrides),
        )


Measure = Union[AtomicMeasure, SpectralMeasure, ProductProfileMeasure, HaarMeasure]


def haar_of(group, sub: SubgroupDescriptor) -> HaarMeasure:
    return HaarMeasure(group, sub)


# ---------------------------------------------------------------------------
# core operations


def convolve(a: Measure, b: Measure) -> Measure:
    """Convolution; representations must be compatible on a shared group."""
    if isinstance(a, HaarMeasure) or isinstance(b, HaarMeasure):
        return _convolve_with_haar(a, b)
    if isinstance(a, AtomicMeasure) and isinstance(b, AtomicMeasure):
        _check_same_group(a, b)
        out: dict = {}
        for e1, w1 in a.atoms:
            for e2, w2 in b.atoms:
                e = _group_mul(a.group, e1, e2)
                out[e] = out.get(e, Fraction(0)) + w1 * w2
        return AtomicMeasure.of(a.group, out)
    if isinstance(a, SpectralMeasure) and isinstance(b, SpectralMeasure):
        _check_same_group(a, b)

        def coeff(chi):
            return a.coeff(chi) * b.coeff(chi)

        return SpectralMeasure(a.group, coeff, provenance="limit-of-products")
    if isinstance(a, ProductProfileMeasure) and isinstance(b, ProductProfileMeasure):
        _check_same_group(a, b)
        indices = {i for i, _ in a.overrides} | {i for i, _ in b.overrides} | {0, 1}
        entries = tuple((i, _convolve_atomic_cached(a.at(i), b.at(i)))
                        for i in sorted(indices))
        return ProductProfileMeasure(
            a.group,
            _convolve_atomic_cached(a.left, b.left),
            _convolve_atomic_cached(a.right, b.right),
            entries,
        )
    if isinstance(a, AtomicMeasure) and isinstance(a.group, ShiftGroup) \
            and isinstance(b, ProductProfileMeasure):
        return _convolve_atoms_into_profile(a, b, atoms_on_left=True)
    if isinstance(b, AtomicMeasure) and isinstance(b.group, ShiftGroup) \
            and isinstance(a, ProductProfileMeasure):
        return _convolve_atoms_into_profile(b, a, atoms_on_left=False)
    raise GroupMismatchError(
        f"incompatible representations: {type(a).__name__} * {type(b).__name__}"
    )


def _convolve_atoms_into_profile(atoms: AtomicMeasure,
                                 profile: ProductProfileMeasure,
                                 atoms_on_left: bool) -> ProductProfileMeasure:
    """Mixture of coordinate translates of a product measure, kept exact.

    The result is again a product measure only when the mixture factorizes
    over the touched coordinates; that is verified on every cylinder over the
    touched coordinates, and a failure raises rather than approximating.
    """
    if atoms.group.symbol_group != profile.group.symbol_group:
        raise GroupMismatchError("measures live on different shift spaces")
    sym = profile.group.symbol_group
    active = sorted({i for g, _ in atoms.atoms for i, _ in g})
    if not active:
        return profile
    if sym.order ** len(active) > 4096:
        raise GroupMismatchError(
            "mixture factorization check too large for this support"
        )

    def translate(coord_measure: AtomicMeasure, s: int) -> AtomicMeasure:
        if atoms_on_left:
            return coord_measure.map_elements(lambda e: sym.mul(s, e))
        return coord_measure.map_elements(lambda e: sym.mul(e, s))

    per_atom = []
    for g, w in atoms.atoms:
        entries = dict(g)
        per_atom.append((w, {
            i: translate(profile.at(i), entries.get(i, sym.identity))
            for i in active
        }))
    marginals = {}
    for i in active:
        mix: dict = {}
        for w, coords in per_atom:
            for e, cw in coords[i].atoms:
                mix[e] = mix.get(e, Fraction(0)) + w * cw
        marginals[i] = AtomicMeasure.of(sym, mix)
    import itertools as _it

    for combo in _it.product(sym.elements(), repeat=len(active)):
        mixture_prob = Fraction(0)
        for w, coords in per_atom:
            term = w
            for i, x in zip(active, combo):
                term *= coords[i].weight_of(x)
            mixture_prob += term
        product_prob = Fraction(1)
        for i, x in zip(active, combo):
            product_prob *= marginals[i].weight_of(x)
        if mixture_prob != product_prob:
            raise GroupMismatchError(
                "translate mixture does not factorize as a product measure"
            )
    overrides = dict(profile.overrides)
    overrides.update(marginals)
    return ProductProfileMeasure(profile.group, profile.left, profile.right,
                                 tuple(sorted(overrides.items())))


@lru_cache(maxsize=4096)
def _convolve_atomic_cached(a: AtomicMeasure, b: AtomicMeasure) -> AtomicMeasure:
    """Coordinate measures of shift profiles repeat endlessly; memoize."""
    return convolve(a, b)


def _convolve_with_haar(a: Measure, b: Measure) -> Measure:
    if isinstance(a, HaarMeasure) and isinstance(b, HaarMeasure) \
            and a.subgroup == b.subgroup:
        return a  # idempotence, exact
    ca = _haar_concrete(a) if isinstance(a, HaarMeasure) else a
    cb = _haar_concrete(b) if isinstance(b, HaarMeasure) else b
    if isinstance(ca, SpectralMeasure) and isinstance(cb, AtomicMeasure) \
            and isinstance(cb.group, Torus):
        cb = spectral_of_atoms(cb)
    if isinstance(cb, SpectralMeasure) and isinstance(ca, AtomicMeasure) \
            and isinstance(ca.group, Torus):
        ca = spectral_of_atoms(ca)
    return convolve(ca, cb)


def reflect(m: Measure) -> Measure:
    """The image of the measure under inversion."""
    if isinstance(m, AtomicMeasure):
        return m.map_elements(lambda e: _group_inv(m.group, e))
    if isinstance(m, SpectralMeasure):
        return SpectralMeasure(m.group, lambda chi: m.coeff(chi).conjugate(),
                               provenance=m.provenance)
    if isinstance(m, ProductProfileMeasure):
        sym_inv = m.group.symbol_group.inv
        indices = [i for i, _ in m.overrides]
        return ProductProfileMeasure(
            m.group,
            m.left.map_elements(sym_inv),
            m.right.map_elements(sym_inv),
            tuple((i, m.at(i).map_elements(sym_inv)) for i in indices),
        )
    if isinstance(m, HaarMeasure):
        return m  # subgroups are closed under inversion
    raise GroupMismatchError(f"unsupported measure {type(m).__name__}")


def pushforward_automorphism(m: Measure, alpha: IntAutomorphism) -> Measure:
    """Image under a torus automorphism: atoms map, or oracles re-index."""
    if isinstance(m, AtomicMeasure) and isinstance(m.group, Torus):
        return m.map_elements(lambda x: alpha.apply_point(x, m.group))
    if isinstance(m, SpectralMeasure):
        dual = mat_transpose(alpha.matrix)
        return SpectralMeasure(
            m.group, lambda chi: m.coeff(mat_vec(dual, chi)),
            provenance=m.provenance,
        )
    if isinstance(m, HaarMeasure) and isinstance(m.subgroup, TorusSubgroup):
        return HaarMeasure(m.group, m.subgroup.image_under(alpha))
    raise GroupMismatchError("automorphism pushforward needs a torus measure")


def pushforward_shift(m: Measure, k: int = 1) -> Measure:
    if isinstance(m, ProductProfileMeasure):
        return m.shift(k)
    if isinstance(m, AtomicMeasure) and isinstance(m.group, ShiftGroup):
        return m.map_elements(lambda e: m.group.shift(e, k))
    if isinstance(m, HaarMeasure) and isinstance(m.subgroup, ProfileSubgroup):
        return HaarMeasure(m.group, m.subgroup.shift(k))
    raise GroupMismatchError("shift pushforward needs a profile-space measure")


def pushforward_quotient(m: Measure, ann: TorusSubgroup) -> Measure:
    """Quotient by the finite subgroup with annihilator lattice `ann`.

    The quotient torus is identified with the standard torus through the
    annihilator basis B (full rank): the quotient measure's coefficient at
    chi' is the coefficient upstairs at B^T chi'.
    """
    basis = ann.annihilator
    d = ann.dim
    if len(basis) != d:
        raise ValueError("quotient subgroup must be finite (full-rank annihilator)")
    bt = mat_transpose(basis)

    if isinstance(m, HaarMeasure) and isinstance(m.subgroup, TorusSubgroup):
        m = m.as_spectral()
    if isinstance(m, AtomicMeasure) and isinstance(m.group, Torus):
        m = spectral_of_atoms(m)
    if not isinstance(m, SpectralMeasure):
        raise GroupMismatchError("quotient pushforward needs a torus measure")

    def coeff(chi):
        return m.coeff(mat_vec(bt, chi))

    return SpectralMeasure(Torus(d), coeff, provenance=m.provenance)


def pushforward_embedding(m: AtomicMeasure, target: FiniteGroup,
                          mapping: Mapping[int, int]) -> AtomicMeasure:
    """Image under an injective homomorphism of finite groups."""
    values = set(mapping.values())
    if len(values) != len(mapping):
        raise ValueError("mapping is not injective")
    return AtomicMeasure.of(target, {mapping[e]: w for e, w in m.atoms})


# ---------------------------------------------------------------------------
# idempotents and distances


def _finite_idempotent(m: AtomicMeasure, tol: float) -> Optional[FiniteSubgroup]:
    group = m.group
    weights = dict(m.atoms)
    if not weights:
        return None
    max_w = max(weights.values())
    members = frozenset(e for e, w in weights.items() if 2 * w >= max_w)
    if not group.is_subgroup(members):
        return None
    target = uniform_on(group, members)
    if m.total_variation(target) > tol:
        return None
    return FiniteSubgroup(group, members)


def _spectral_idempotent(m: SpectralMeasure, tol: float,
                         radius: int) -> Optional[TorusSubgroup]:
    near_one = []
    for chi, c in m.window_values(radius).items():
        if abs(c - 1.0) <= tol:
            near_one.append(chi)
        elif abs(c) > tol:
            return None
    near = set(near_one)
    for chi in near_one:
        neg = tuple(-x for x in chi)
        if neg not in near:
            return None
        for other in near_one:
            s = tuple(a + b for a, b in zip(chi, other))
            if all(abs(x) <= radius for x in s) and s not in near:
                return None
    return TorusSubgroup(m.group.dim, hnf_rows(near_one))


def _profile_idempotent(m: ProductProfileMeasure) -> Optional[ProfileSubgroup]:
    sym = m.group.symbol_group

    def coordinate_subgroup(am: AtomicMeasure) -> Optional[frozenset]:
        members = frozenset(e for e, _ in am.atoms)
        if not sym.is_subgroup(members):
            return None
        return members if am == uniform_on(sym, members) else None

    left = coordinate_subgroup(m.left)
    right = coordinate_subgroup(m.right)
    if left is None or right is None:
        return None
    entries = []
    for i, cm in m.overrides:
        s = coordinate_subgroup(cm)
        if s is None:
            return None
        entries.append((i, s))
    return ProfileSubgroup(sym, left, right, tuple(entries))


def is_idempotent(m: Measure, tol: float = DEFAULT_IDEMPOTENT_TOL,
                  window_radius: int = 8) -> Optional[SubgroupDescriptor]:
    """Detect a Haar measure, returning its subgroup descriptor.

    Atomic and profile paths are exact up to the stated TV tolerance; the
    spectral path requires window coefficients within tol of {0, 1} and the
    near-1 set closed under negation and in-window addition.
    """
    if isinstance(m, HaarMeasure):
        return m.subgroup
    if isinstance(m, AtomicMeasure) and isinstance(m.group, FiniteGroup):
        return _finite_idempotent(m, tol)
    if isinstance(m, AtomicMeasure) and isinstance(m.group, LatticeGroup):
        if len(m.atoms) == 1 and m.atoms[0][0] == m.group.zero:
            return TrivialLatticeSubgroup(m.group.dim)
        return None
    if isinstance(m, SpectralMeasure):
        return _spectral_idempotent(m, tol, window_radius)
    if isinstance(m, ProductProfileMeasure):
        return _profile_idempotent(m)
    if isinstance(m, AtomicMeasure) and isinstance(m.group, Torus):
        return is_idempotent(spectral_of_atoms(m), tol, window_radius)
    raise GroupMismatchError(f"unsupported measure {type(m).__name__}")


def distance(a: Measure, b: Measure, window_radius: int = 8) -> float:
    """Total variation on discrete groups; max coefficient gap on a window."""
    if isinstance(a, HaarMeasure) and isinstance(b, HaarMeasure) \
            and a.subgroup == b.subgroup:
        return 0.0
    if isinstance(a, HaarMeasure):
        a = _haar_concrete(a)
    if isinstance(b, HaarMeasure):
        b = _haar_concrete(b)
    if isinstance(a, AtomicMeasure) and isinstance(b, AtomicMeasure) \
            and not isinstance(a.group, Torus):
        _check_same_group(a, b)
        return float(a.total_variation(b))
    if isinstance(a, AtomicMeasure) and isinstance(a.group, Torus):
        a = spectral_of_atoms(a)
    if isinstance(b, AtomicMeasure) and isinstance(b.group, Torus):
        b = spectral_of_atoms(b)
    if isinstance(a, SpectralMeasure) and isinstance(b, SpectralMeasure):
        _check_same_group(a, b)
        return max(abs(a.coeff(chi) - b.coeff(chi))
                   for chi in a.group.window(window_radius))
    if isinstance(a, ProductProfileMeasure) and isinstance(b, ProductProfileMeasure):
        _check_same_group(a, b)
        indices = {i for i, _ in a.overrides} | {i for i, _ in b.overrides} | {0, 1}
        if a.left != b.left or a.right != b.right:
            tails = 1.0
        else:
            tails = 0.0
        per_coord = sum(float(a.at(i).total_variation(b.at(i))) for i in indices)
        return min(1.0, tails + per_coord)
    raise GroupMismatchError(
        f"cannot compare {type(a).__name__} with {type(b).__name__}"
    )


def _haar_concrete(h: HaarMeasure):
    if isinstance(h.subgroup, FiniteSubgroup):
        return h.as_atomic()
    if isinstance(h.subgroup, TorusSubgroup):
        return h.as_spectral()
    return h.as_profile()


# ---------------------------------------------------------------------------
# serialization helpers (structured-text reports)


def weight_str(w: Weight) -> str:
    if isinstance(w, Fraction):
        return f"{w.numerator}/{w.denominator}"
    return repr(float(w))


def element_str(e) -> str:
    if isinstance(e, tuple):
        return "(" + ", ".join(element_str(x) for x in e) + ")"
    if isinstance(e, Fraction):
        return f"{e.numerator}/{e.denominator}"
    return str(e)


def measure_report(m: Measure, window_radius: int = 8) -> dict:
    if isinstance(m, AtomicMeasure):
        return {
            "type": "atomic",
            "atoms": [[element_str(e), weight_str(w)] for e, w in m.atoms],
        }
    if isinstance(m, SpectralMeasure):
        vals = m.window_values(window_radius)
        return {
            "type": "spectral",
            "provenance": m.provenance,
            "coefficients": [
                [list(chi), c.real, c.imag] for chi, c in sorted(vals.items())
            ],
        }
    if isinstance(m, ProductProfileMeasure):
        return {
            "type": "product-profile",
            "left": measure_report(m.left),
            "right": measure_report(m.right),
            "overrides": [[i, measure_report(cm)] for i, cm in m.overrides],
        }
    if isinstance(m, HaarMeasure):
        return {"type": "haar", "subgroup": subgroup_report(m.subgroup)}
    raise GroupMismatchError(f"unsupported measure {type(m).__name__}")


def subgroup_report(sub: SubgroupDescriptor) -> dict:
    if isinstance(sub, FiniteSubgroup):
        return {"kind": "finite", "members": sorted(sub.members)}
    if isinstance(sub, TorusSubgroup):
        return {"kind": "torus-annihilator",
                "lattice_rows": [list(r) for r in sub.annihilator]}
    if isinstance(sub, ProfileSubgroup):
        return {
            "kind": "profile",
            "left": sorted(sub.left),
            "right": sorted(sub.right),
            "overrides": [[i, sorted(s)] for i, s in sub.overrides],
        }
    if isinstance(sub, TrivialLatticeSubgroup):
        return {"kind": "lattice-trivial", "dim": sub.dim}
    raise ValueError(f"unsupported subgroup {type(sub).__name__}")
