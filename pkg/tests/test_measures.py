import cmath
import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scplab.groups import (
    FiniteGroup,
    FiniteSubgroup,
    IntAutomorphism,
    LatticeGroup,
    ProfileSubgroup,
    ShiftGroup,
    Torus,
    TorusSubgroup,
    TrivialLatticeSubgroup,
    smith_annihilator,
)
from scplab.measures import (
    AtomicMeasure,
    GroupMismatchError,
    convolve,
    dirac,
    distance,
    haar_of,
    is_idempotent,
    pushforward_automorphism,
    pushforward_embedding,
    pushforward_quotient,
    pushforward_shift,
    reflect,
    spectral_of_atoms,
    uniform_on,
)

TORUS2 = Torus(2)


def random_torus_atoms(rng, n_atoms, denominator=12, dim=2):
    torus = Torus(dim)
    pts = set()
    while len(pts) < n_atoms:
        pts.add(tuple(Fraction(rng.randint(0, denominator - 1), denominator)
                      for _ in range(dim)))
    raw = [rng.randint(1, 8) for _ in pts]
    total = sum(raw)
    return AtomicMeasure.of(
        torus, {p: Fraction(w, total) for p, w in zip(sorted(pts), raw)}
    )


class TestConvolve:
    def test_haar_idempotent_exact(self):
        z2 = FiniteGroup.cyclic(2)
        u = uniform_on(z2, [0, 1])
        assert convolve(u, u) == u

    def test_binomial_on_lattice(self):
        line = LatticeGroup(1)
        mu = AtomicMeasure.of(line, {(0,): Fraction(1, 2),
                                     (1,): Fraction(1, 2)})
        out = convolve(mu, mu)
        assert dict(out.atoms) == {
            (0,): Fraction(1, 4), (1,): Fraction(1, 2), (2,): Fraction(1, 4)
        }

    def test_spectral_product_matches_atomic_oracle(self):
        # oracle: convolve atoms exactly, then evaluate characters directly
        rng = random.Random(17)
        for dim in (1, 2, 3):
            for _ in range(6):
                a = random_torus_atoms(rng, rng.randint(1, 8), dim=dim)
                b = random_torus_atoms(rng, rng.randint(1, 8), dim=dim)
                direct = spectral_of_atoms(convolve(a, b))
                product = convolve(spectral_of_atoms(a), spectral_of_atoms(b))
                for chi in Torus(dim).window(3):
                    assert abs(direct.coeff(chi) - product.coeff(chi)) <= 1e-10

    def test_group_mismatch_rejected(self):
        z2 = FiniteGroup.cyclic(2)
        z3 = FiniteGroup.cyclic(3)
        with pytest.raises(GroupMismatchError):
            convolve(uniform_on(z2, [0, 1]), uniform_on(z3, [0, 1, 2]))

    def test_mass_conserved_along_chains(self):
        rng = random.Random(23)
        m = random_torus_atoms(rng, 4)
        s = spectral_of_atoms(m)
        chain = convolve(convolve(s, s), reflect(s))
        assert abs(chain.coeff((0, 0)) - 1.0) <= 3e-12

    def test_hermitian_symmetry_preserved(self):
        rng = random.Random(29)
        m = random_torus_atoms(rng, 5)
        s = convolve(spectral_of_atoms(m), spectral_of_atoms(m))
        for chi in TORUS2.window(3):
            neg = tuple(-c for c in chi)
            assert abs(s.coeff(chi) - s.coeff(neg).conjugate()) <= 1e-11


class TestReflect:
    def test_dirac(self):
        z5 = FiniteGroup.cyclic(5)
        assert reflect(dirac(z5, 2)) == dirac(z5, 3)

    def test_haar_fixed(self):
        sub = smith_annihilator([(2, 0), (0, 2)], 2)
        h = haar_of(TORUS2, sub)
        assert reflect(h) is h

    def test_spectral_conjugation_matches_atoms(self):
        rng = random.Random(31)
        m = random_torus_atoms(rng, 6)
        refl = spectral_of_atoms(reflect(m))
        spec = reflect(spectral_of_atoms(m))
        for chi in TORUS2.window(3):
            assert abs(refl.coeff(chi) - spec.coeff(chi)) <= 1e-12


class TestPushforward:
    def test_identity(self):
        rng = random.Random(37)
        m = random_torus_atoms(rng, 4)
        ident = IntAutomorphism(((1, 0), (0, 1)))
        assert pushforward_automorphism(m, ident) == m

    def test_dual_composition_matches_atomic_oracle(self):
        # shear pushforward: coefficient at (m, n) is the original at
        # (m, k m + n); oracle = move atoms, then evaluate characters
        shear = IntAutomorphism(((1, 1), (0, 1)))
        rng = random.Random(41)
        m = random_torus_atoms(rng, 5)
        spec = spectral_of_atoms(m)
        pushed_spec = spec
        pushed_atoms = m
        for k in range(1, 4):
            pushed_spec = pushforward_automorphism(pushed_spec, shear)
            pushed_atoms = pushforward_automorphism(pushed_atoms, shear)
            oracle = spectral_of_atoms(pushed_atoms)
            for chi in TORUS2.window(3):
                assert abs(pushed_spec.coeff(chi) - oracle.coeff(chi)) <= 1e-10
                expected = spec.coeff((chi[0], k * chi[0] + chi[1]))
                assert abs(pushed_spec.coeff(chi) - expected) <= 1e-10

    def test_quotient_restricts_coefficients(self):
        # modulo {0, 1/2}: odd frequencies drop, even ones survive at half index
        line = Torus(1)
        mu = AtomicMeasure.of(line, {(Fraction(0),): Fraction(1, 2),
                                     (Fraction(1, 4),): Fraction(1, 2)})
        sub = smith_annihilator([(2,)], 1)
        down = pushforward_quotient(mu, sub)
        spec = spectral_of_atoms(mu)
        for m in range(-4, 5):
            assert abs(down.coeff((m,)) - spec.coeff((2 * m,))) <= 1e-12

    def test_shift_pushforward(self):
        sym = FiniteGroup.cyclic(2)
        shift_group = ShiftGroup(sym)
        m_sub = ProfileSubgroup(sym, frozenset({0, 1}), frozenset({0}))
        w = haar_of(shift_group, m_sub).as_profile()
        shifted = pushforward_shift(w, 1)
        assert shifted.at(0) == dirac(sym, 0)
        assert shifted.at(-1) == uniform_on(sym, [0, 1])
        assert pushforward_shift(shifted, -1) == w

    def test_embedding(self):
        z3 = FiniteGroup.cyclic(3)
        z6 = FiniteGroup.cyclic(6)
        mu = uniform_on(z3, [1, 2])
        out = pushforward_embedding(mu, z6, {0: 0, 1: 2, 2: 4})
        assert dict(out.atoms) == {2: Fraction(1, 2), 4: Fraction(1, 2)}


class TestHaarOf:
    def test_half_lattice_coefficients(self):
        sub = smith_annihilator([(2,)], 1)
        h = haar_of(Torus(1), sub).as_spectral()
        for m in range(-6, 7):
            expected = 1.0 if m % 2 == 0 else 0.0
            assert h.coeff((m,)) == expected

    def test_trivial_subgroup_is_dirac(self):
        sub = TorusSubgroup.trivial(2)
        h = haar_of(TORUS2, sub).as_spectral()
        assert all(h.coeff(chi) == 1.0 for chi in TORUS2.window(2))

    def test_full_torus_indicator_at_zero(self):
        sub = TorusSubgroup.full_torus(2)
        h = haar_of(TORUS2, sub).as_spectral()
        assert h.coeff((0, 0)) == 1.0
        assert h.coeff((1, 0)) == 0.0

    def test_fixed_point_properties(self):
        sub = smith_annihilator([(2, 0), (0, 2)], 2)
        h = haar_of(TORUS2, sub)
        conv = convolve(h, h)
        assert distance(conv, h, window_radius=6) == 0.0
        shear = IntAutomorphism(((1, 1), (0, 1)))
        assert pushforward_automorphism(h, shear).subgroup == sub


class TestIsIdempotent:
    def test_haar_detection(self):
        sub = smith_annihilator([(2,)], 1)
        h = haar_of(Torus(1), sub)
        assert is_idempotent(h.as_spectral()) == sub

    def test_third_point_pair_is_not(self):
        line = Torus(1)
        mu = AtomicMeasure.of(line, {(Fraction(0),): Fraction(1, 2),
                                     (Fraction(1, 3),): Fraction(1, 2)})
        spec = spectral_of_atoms(mu)
        assert abs(abs(spec.coeff((1,))) - 0.5) <= 1e-12
        assert is_idempotent(spec) is None

    def test_dirac_identity(self):
        z6 = FiniteGroup.cyclic(6)
        sub = is_idempotent(dirac(z6, 0))
        assert isinstance(sub, FiniteSubgroup)
        assert sub.members == frozenset({0})

    def test_lattice_dirac_at_zero(self):
        z2 = LatticeGroup(2)
        assert is_idempotent(dirac(z2, (0, 0))) == TrivialLatticeSubgroup(2)
        assert is_idempotent(dirac(z2, (1, 0))) is None

    def test_profile_haar(self):
        sym = FiniteGroup.cyclic(2)
        m_sub = ProfileSubgroup(sym, frozenset({0, 1}), frozenset({0}))
        w = haar_of(ShiftGroup(sym), m_sub).as_profile()
        assert is_idempotent(w) == m_sub

    def test_recovers_all_small_torus_subgroups(self):
        # every finite subgroup of T^d, d <= 2, exponent <= 6, is recovered
        # structurally from its Haar coefficients on a window of radius
        # >= 2 * exponent
        checked = 0
        for d in (1, 2):
            for sub, exponent in _subgroups_with_exponent(d, 6):
                h = haar_of(Torus(d), sub).as_spectral()
                got = is_idempotent(h, window_radius=2 * exponent)
                assert got == sub, f"failed for {sub}"
                checked += 1
        assert checked >= 20


def _subgroups_with_exponent(d, max_exponent):
    seen = set()
    out = []
    if d == 1:
        candidates = [[(q,)] for q in range(1, max_exponent + 1)]
    else:
        candidates = []
        for a in range(1, max_exponent + 1):
            for dd in range(1, max_exponent + 1):
                for b in range(dd):
                    candidates.append([(a, b), (0, dd)])
    for rows in candidates:
        sub = smith_annihilator(rows, d)
        if sub in seen:
            continue
        pts = sub.points()
        exponent = 1
        for p in pts:
            for c in p:
                exponent = (exponent * c.denominator) // \
                    __import__("math").gcd(exponent, c.denominator)
        if exponent <= max_exponent:
            seen.add(sub)
            out.append((sub, exponent))
    return out


class TestDistance:
    def test_zero_on_equal(self):
        z4 = FiniteGroup.cyclic(4)
        u = uniform_on(z4, [0, 2])
        assert distance(u, u) == 0.0

    def test_half_point_dirac_gap(self):
        line = Torus(1)
        a = spectral_of_atoms(dirac(line, (Fraction(0),)))
        b = spectral_of_atoms(dirac(line, (Fraction(1, 2),)))
        assert distance(a, b, window_radius=1) == pytest.approx(2.0)

    def test_total_variation(self):
        z2 = FiniteGroup.cyclic(2)
        assert distance(uniform_on(z2, [0, 1]), dirac(z2, 0)) == \
            pytest.approx(0.5)

    def test_profile_distance(self):
        sym = FiniteGroup.cyclic(2)
        m_sub = ProfileSubgroup(sym, frozenset({0, 1}), frozenset({0}))
        w = haar_of(ShiftGroup(sym), m_sub).as_profile()
        assert distance(w, w) == 0.0
        assert distance(w, pushforward_shift(w, 1)) == pytest.approx(0.5)


class TestAtomicValidation:
    def test_weights_must_sum_to_one(self):
        z2 = FiniteGroup.cyclic(2)
        with pytest.raises(ValueError):
            AtomicMeasure.of(z2, {0: Fraction(1, 2), 1: Fraction(1, 3)})

    def test_negative_weight_rejected(self):
        z2 = FiniteGroup.cyclic(2)
        with pytest.raises(ValueError):
            AtomicMeasure.of(z2, {0: Fraction(3, 2), 1: Fraction(-1, 2)})

    def test_float_weights_within_tolerance(self):
        z2 = FiniteGroup.cyclic(2)
        m = AtomicMeasure.of(z2, {0: 0.5, 1: 0.5 + 1e-13})
        assert not m.exact


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 12), st.integers(0, 10 ** 6))
def test_symmetrized_weight_is_real_nonnegative(order, seed):
    # mu * reflect(mu) has real nonnegative coefficients on cyclic groups
    rng = random.Random(seed)
    z = FiniteGroup.cyclic(order)
    support = rng.sample(range(order), rng.randint(1, min(4, order)))
    raw = [rng.randint(1, 6) for _ in support]
    total = sum(raw)
    mu = AtomicMeasure.of(z, {s: Fraction(w, total)
                              for s, w in zip(support, raw)})
    sym = convolve(mu, reflect(mu))
    for m in range(order):
        coeff = sum(
            float(w) * cmath.exp(2j * cmath.pi * m * e / order)
            for e, w in sym.atoms
        )
        assert coeff.imag == pytest.approx(0.0, abs=1e-9)
        assert coeff.real >= -1e-9
