import random
from fractions import Fraction

import pytest

from scplab.groups import FiniteGroup
from scplab.harmonic import (
    coset_constants_are_harmonic,
    harmonic_space,
    is_choquet_deny,
    transition_matrix,
)
from scplab.measures import AtomicMeasure, dirac, uniform_on

ZOO = [
    FiniteGroup.cyclic(3),
    FiniteGroup.cyclic(4),
    FiniteGroup.cyclic(5),
    FiniteGroup.direct_product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2)),
    FiniteGroup.symmetric(3),
    FiniteGroup.dihedral(4),
    FiniteGroup.quaternion(),
    FiniteGroup.symmetric(4),
]


def test_uniform_on_cyclic_three_gives_constants():
    z3 = FiniteGroup.cyclic(3)
    space = harmonic_space(z3, uniform_on(z3, [0, 1, 2]))
    assert space.dimension == 1
    assert space.coset_count == 1


def test_translation_on_cyclic_four():
    z4 = FiniteGroup.cyclic(4)
    space = harmonic_space(z4, dirac(z4, 1))
    assert space.dimension == 1
    assert space.coset_count == 1


def test_klein_pair_has_two_cosets():
    klein = FiniteGroup.direct_product(FiniteGroup.cyclic(2),
                                       FiniteGroup.cyclic(2))
    # uniform on {(0,0), (1,0)} = indices 0 and 2
    mu = uniform_on(klein, [0, 2])
    space = harmonic_space(klein, mu)
    assert space.generated_subgroup == frozenset({0, 2})
    assert space.dimension == 2
    assert space.coset_count == 2
    # oracle: the kernel is spanned by the two coset indicators exactly
    p = transition_matrix(klein, mu)
    for coset in space.cosets:
        f = [Fraction(int(g in coset)) for g in range(4)]
        assert all(sum(p[g][j] * f[j] for j in range(4)) == f[g]
                   for g in range(4))


def test_dirac_identity_makes_everything_harmonic():
    for group in (FiniteGroup.cyclic(5), FiniteGroup.symmetric(3)):
        mu = dirac(group, group.identity)
        space = harmonic_space(group, mu)
        assert space.dimension == group.order
        assert space.coset_count == group.order
        assert is_choquet_deny(group, mu)


def test_coset_constants_always_harmonic():
    rng = random.Random(41)
    for group in ZOO:
        for _ in range(3):
            size = rng.randint(1, min(4, group.order))
            support = rng.sample(range(group.order), size)
            raw = [rng.randint(1, 7) for _ in support]
            total = sum(raw)
            mu = AtomicMeasure.of(group, {s: Fraction(w, total)
                                          for s, w in zip(support, raw)})
            space = harmonic_space(group, mu)
            assert coset_constants_are_harmonic(space)
            assert space.dimension >= space.coset_count


def test_inexact_weights_rejected():
    z2 = FiniteGroup.cyclic(2)
    with pytest.raises(ValueError):
        harmonic_space(z2, AtomicMeasure.of(z2, {0: 0.5, 1: 0.5}))


def test_basis_functions_satisfy_equation_exactly():
    s3 = FiniteGroup.symmetric(3)
    mu = AtomicMeasure.of(s3, {1: Fraction(1, 3), 3: Fraction(2, 3)})
    space = harmonic_space(s3, mu)
    p = transition_matrix(s3, mu)
    for f in space.basis:
        for g in range(s3.order):
            assert sum(p[g][j] * f[j] for j in range(s3.order)) == f[g]
