"""Exact harmonic-function analysis on finite groups.

Solves f(g) = sum_h f(g h) mu(h) by exact rational elimination and compares
the solution space against functions constant on left cosets of the subgroup
generated by the support.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactalg import nullspace_fraction
from .groups import FiniteGroup
from .measures import AtomicMeasure


@dataclass(frozen=True)
class HarmonicSpace:
    group: FiniteGroup
    mu: AtomicMeasure
    basis: tuple[tuple[Fraction, ...], ...]
    cosets: tuple[frozenset[int], ...]
    generated_subgroup: frozenset[int]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def coset_count(self) -> int:
        return len(self.cosets)


def transition_matrix(group: FiniteGroup, mu: AtomicMeasure) -> list[list[Fraction]]:
    """Right-convolution operator: (P f)(g) = sum_h mu(h) f(g h)."""
    n = group.order
    p = [[Fraction(0)] * n for _ in range(n)]
    for h, w in mu.atoms:
        for g in range(n):
            p[g][group.mul(g, h)] += w
    return p


def harmonic_space(group: FiniteGroup, mu: AtomicMeasure) -> HarmonicSpace:
    """Exact kernel of (I - P) plus the coset partition it should match."""
    if mu.group != group:
        raise ValueError("measure lives on a different group")
    if not mu.exact:
        raise ValueError("harmonic analysis requires exact rational weights")
    n = group.order
    p = transition_matrix(group, mu)
    system = [
        [Fraction(int(i == j)) - p[i][j] for j in range(n)] for i in range(n)
    ]
    basis = tuple(nullspace_fraction(system))
    for f in basis:
        for g in range(n):
            acc = sum(p[g][j] * f[j] for j in range(n))
            if acc != f[g]:
                raise AssertionError("kernel vector fails the harmonic equation")
    support = [e for e, _ in mu.atoms]
    g_mu = group.subgroup_generated(support)
    cosets = tuple(group.left_cosets(g_mu))
    return HarmonicSpace(group, mu, basis, cosets, g_mu)


def coset_constants_are_harmonic(space: HarmonicSpace) -> bool:
    """Indicator functions of left cosets of G_mu satisfy f = P f exactly."""
    p = transition_matrix(space.group, space.mu)
    n = space.group.order
    for coset in space.cosets:
        f = [Fraction(int(g in coset)) for g in range(n)]
        for g in range(n):
            if sum(p[g][j] * f[j] for j in range(n)) != f[g]:
                return False
    return True


def is_choquet_deny(group: FiniteGroup, mu: AtomicMeasure) -> bool:
    """True iff bounded harmonic functions are exactly the coset-constants."""
    space = harmonic_space(group, mu)
    return space.dimension == space.coset_count and \
        coset_constants_are_harmonic(space)
