import cmath
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scplab.exactalg import identity_matrix, mat_pow, mat_transpose
from scplab.groups import (
    FiniteGroup,
    FinitePermAutomorphism,
    IntAutomorphism,
    LatticeGroup,
    ProfileSubgroup,
    SemidirectGroup,
    ShiftGroup,
    Torus,
    TorusSubgroup,
    dual_automorphism,
    semidirect_multiply,
    shift_apply,
    smith_annihilator,
)

GROUP_ZOO = [
    FiniteGroup.cyclic(1),
    FiniteGroup.cyclic(2),
    FiniteGroup.cyclic(5),
    FiniteGroup.cyclic(24),
    FiniteGroup.direct_product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2)),
    FiniteGroup.direct_product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(4)),
    FiniteGroup.dihedral(4),
    FiniteGroup.dihedral(6),
    FiniteGroup.symmetric(3),
    FiniteGroup.symmetric(4),
    FiniteGroup.quaternion(),
]


class TestFiniteGroups:
    def test_axioms_checked_exhaustively(self):
        # construction validates identity/inverses/associativity up to 64
        for g in GROUP_ZOO:
            assert g.order <= 64
            assert g.mul(g.identity, 3 % g.order) == 3 % g.order
            for a in g.elements():
                assert g.mul(a, g.inv(a)) == g.identity

    def test_bad_table_rejected(self):
        with pytest.raises(ValueError):
            FiniteGroup(((0, 1), (0, 1)))  # no inverse row/col structure
        with pytest.raises(ValueError):
            FiniteGroup(((0, 1), (1, 1)))

    def test_subgroup_generated(self):
        s3 = FiniteGroup.symmetric(3)
        rotations = s3.subgroup_generated([3])
        assert rotations == frozenset({0, 3, 4})
        assert s3.subgroup_generated([1, 2]) == frozenset(s3.elements())

    def test_left_cosets_partition(self):
        g = FiniteGroup.dihedral(4)
        sub = g.subgroup_generated([1])
        cosets = g.left_cosets(sub)
        assert sum(len(c) for c in cosets) == g.order
        assert len({e for c in cosets for e in c}) == g.order

    def test_quaternion_structure(self):
        q8 = FiniteGroup.quaternion()
        i, j, k = 2, 4, 6
        minus_one = 1
        assert q8.mul(i, i) == minus_one
        assert q8.mul(i, j) == k
        assert q8.mul(j, i) == q8.mul(minus_one, k)


class TestDualAutomorphism:
    def test_shear_dual_formula(self):
        # alpha(x, y) = (x + y, y); the dual sends (m, n) to (m, m + n)
        a = IntAutomorphism(((1, 1), (0, 1)))
        d = dual_automorphism(a)
        for m in range(-3, 4):
            for n in range(-3, 4):
                assert d.apply_vector((m, n)) == (m, m + n)

    def test_identity_and_symmetric(self):
        ident = IntAutomorphism(identity_matrix(2))
        assert dual_automorphism(ident).matrix == ident.matrix
        sym = IntAutomorphism(((2, 1), (1, 1)))
        assert dual_automorphism(sym).matrix == sym.matrix

    def test_duality_pairing(self):
        # chi(alpha x) = (dual alpha chi)(x) at sampled rational points
        a = IntAutomorphism(((2, 1), (1, 1)))
        torus = Torus(2)
        rng = random.Random(2)
        for _ in range(25):
            x = (Fraction(rng.randint(0, 11), 12),
                 Fraction(rng.randint(0, 11), 12))
            chi = (rng.randint(-4, 4), rng.randint(-4, 4))
            lhs = sum(Fraction(c) * v
                      for c, v in zip(chi, a.apply_point(x, torus))) % 1
            rhs = sum(Fraction(c) * v
                      for c, v in zip(dual_automorphism(a).apply_vector(chi),
                                      x)) % 1
            assert lhs == rhs

    def test_dual_of_powers(self):
        for m in (((2, 1), (1, 1)), ((1, 1), (0, 1)), ((0, -1), (1, 0))):
            a = IntAutomorphism(m)
            for n in range(1, 9):
                assert dual_automorphism(a.power(n)).matrix == \
                    mat_pow(mat_transpose(m), n)

    def test_non_unimodular_rejected(self):
        with pytest.raises(ValueError):
            IntAutomorphism(((2, 0), (0, 1)))


class TestSemidirect:
    def setup_method(self):
        self.torus = Torus(2)
        self.alpha = IntAutomorphism(((1, 1), (0, 1)))
        self.group = SemidirectGroup(self.torus, self.alpha)

    def test_conjugation_by_step_is_alpha(self):
        g = self.group
        z = (g.base_identity(), 1)
        for x in [(Fraction(1, 3), Fraction(1, 4)),
                  (Fraction(0), Fraction(1, 2))]:
            conj = g.mul(g.mul(z, (x, 0)), g.inv(z))
            assert conj == (self.alpha.apply_point(x, self.torus), 0)

    def test_base_embeds(self):
        g = self.group
        x = (Fraction(1, 5), Fraction(0))
        y = (Fraction(0), Fraction(2, 5))
        assert g.mul((x, 0), (y, 0)) == (self.torus.add(x, y), 0)

    def test_power_formula_matches_repeated_multiplication(self):
        g = self.group
        b = (Fraction(1, 7), Fraction(2, 7))
        x = (b, 1)
        acc = g.identity
        for n in range(1, 8):
            acc = g.mul(acc, x)
            assert g.power(x, n) == acc
        # closed form: (b, 1)^n = (b alpha(b) ... alpha^(n-1)(b), n)
        expected = self.torus.zero
        cur = b
        for _ in range(7):
            expected = self.torus.add(expected, cur)
            cur = self.alpha.apply_point(cur, self.torus)
        assert g.power(x, 7) == (expected, 7)

    def test_inverse(self):
        g = self.group
        x = ((Fraction(1, 3), Fraction(1, 6)), 2)
        assert g.mul(x, g.inv(x)) == g.identity
        assert g.mul(g.inv(x), x) == g.identity

    def test_module_level_multiply(self):
        g = self.group
        x = ((Fraction(1, 2), Fraction(0)), 1)
        y = ((Fraction(1, 4), Fraction(1, 4)), -1)
        assert semidirect_multiply(x, y, g) == g.mul(x, y)

    def test_finite_base(self):
        z4 = FiniteGroup.cyclic(4)
        neg = FinitePermAutomorphism(z4, (0, 3, 2, 1))
        g = SemidirectGroup(z4, neg)
        z = (z4.identity, 1)
        assert g.mul(g.mul(z, (1, 0)), g.inv(z)) == (3, 0)

    def test_finite_base_associativity_sampled(self):
        z4 = FiniteGroup.cyclic(4)
        neg = FinitePermAutomorphism(z4, (0, 3, 2, 1))
        g = SemidirectGroup(z4, neg)
        rng = random.Random(4)
        for _ in range(40):
            xs = [(rng.randrange(4), rng.randint(-3, 3)) for _ in range(3)]
            a, b, c = xs
            assert g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c))


class TestSmithAnnihilator:
    def test_half_point_on_circle(self):
        sub = smith_annihilator([(2,)], 1)
        assert sub.points() == [(Fraction(0),), (Fraction(1, 2),)]
        # characters exp(2 pi i 2m t) are exactly 1 on half-integers
        for p in sub.points():
            assert cmath.isclose(
                cmath.exp(2j * cmath.pi * 2 * float(p[0])), 1.0)

    def test_full_lattice_gives_trivial_subgroup(self):
        sub = smith_annihilator(identity_matrix(3), 3)
        assert sub.order == 1
        assert sub.points() == [(Fraction(0),) * 3]

    def test_empty_basis_gives_full_torus(self):
        sub = smith_annihilator([], 2)
        assert sub.order is None
        assert sub.contains_point((Fraction(1, 7), Fraction(3, 5)))

    def test_non_integral_rejected(self):
        with pytest.raises(ValueError):
            smith_annihilator([(Fraction(1, 2), 0)], 2)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 10 ** 6))
    def test_canonical_under_unimodular_change(self, d, seed):
        rng = random.Random(seed)
        base = [tuple(rng.randint(-4, 4) for _ in range(d)) for _ in range(d)]
        sub = smith_annihilator(base, d)
        if d == 1:
            u = ((rng.choice([1, -1]),),)
        else:
            u = [list(r) for r in identity_matrix(d)]
            for _ in range(10):
                i, j = rng.sample(range(d), 2)
                c = rng.randint(-2, 2)
                for k in range(d):
                    u[i][k] += c * u[j][k]
        mixed = [
            tuple(sum(u[i][k] * base[k][j] for k in range(d))
                  for j in range(d))
            for i in range(d)
        ]
        assert smith_annihilator(mixed, d) == sub

    def test_invariance_and_image(self):
        sub = smith_annihilator([(2, 0), (0, 2)], 2)
        shear = IntAutomorphism(((1, 1), (0, 1)))
        assert sub.is_invariant_under(shear)
        assert sub.image_under(shear) == sub
        wide = smith_annihilator([(2, 2), (0, 4)], 2)
        a = IntAutomorphism(((1, 2), (0, 1)))
        assert wide.is_invariant_under(a)


class TestShiftSpace:
    def setup_method(self):
        self.sym = FiniteGroup.cyclic(2)
        self.shift = ShiftGroup(self.sym)
        self.m_sub = ProfileSubgroup(self.sym, frozenset({0, 1}),
                                     frozenset({0}))

    def test_group_law(self):
        a = self.shift.element({0: 1, 3: 1})
        b = self.shift.element({0: 1})
        assert self.shift.mul(a, b) == self.shift.element({3: 1})
        assert self.shift.inv(a) == a

    def test_shift_apply_on_elements(self):
        a = self.shift.element({0: 1})
        assert shift_apply(a, 1) == self.shift.element({-1: 1})
        assert shift_apply(a, 0) == a
        assert shift_apply(self.shift.identity, 5) == self.shift.identity

    def test_tail_subgroup_shift_is_strictly_smaller(self):
        shifted = self.m_sub.shift(1)
        assert shifted != self.m_sub
        assert shifted.is_subset_of(self.m_sub)
        assert not self.m_sub.is_subset_of(shifted)
        # witness: symbol at coordinate 0 is allowed in M but not in tau(M)
        w = self.shift.element({0: 1})
        assert self.m_sub.contains(w)
        assert not shifted.contains(w)

    def test_shift_roundtrip(self):
        assert self.m_sub.shift(1).shift(-1) == self.m_sub
        assert self.m_sub.shift(3) == self.m_sub.shift(1).shift(2)

    def test_membership(self):
        inside = self.shift.element({-4: 1, 0: 1})
        outside = self.shift.element({2: 1})
        assert self.m_sub.contains(inside)
        assert not self.m_sub.contains(outside)


class TestTorusSubgroupPoints:
    def test_order_eight_subgroup(self):
        sub = TorusSubgroup(2, ((2, 2), (0, 4)))
        assert sub.order == 8
        pts = sub.points()
        assert len(pts) == 8
        for p in pts:
            assert sub.contains_point(p)

    def test_char_membership(self):
        sub = TorusSubgroup(2, ((2, 0), (0, 2)))
        assert sub.contains_char((2, 0))
        assert sub.contains_char((4, -2))
        assert not sub.contains_char((1, 0))


def test_lattice_group_ops():
    z2 = LatticeGroup(2)
    assert z2.add((1, 2), (3, -5)) == (4, -3)
    assert z2.neg((1, -2)) == (-1, 2)
    assert z2.zero == (0, 0)
