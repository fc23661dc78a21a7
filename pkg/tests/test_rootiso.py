from fractions import Fraction

import pytest

from scplab.exactalg import Poly
from scplab.rootiso import (
    all_moduli_in_unit_band,
    enclose_roots,
    modulus_intervals,
    polyroots_leading_first,
)


def test_enclosures_cover_known_roots():
    encl = enclose_roots(Poly.of([1, -3, 1]))
    centers = sorted(e.center.real for e in encl)
    golden = (3 - 5 ** 0.5) / 2
    assert abs(centers[0] - golden) < 1e-12
    assert abs(centers[1] - (3 + 5 ** 0.5) / 2) < 1e-12
    assert all(e.radius < 1e-12 for e in encl)


def test_multiplicities_via_squarefree_split():
    f = Poly.of([-1, 1]) * Poly.of([-1, 1]) * Poly.of([-2, 1])
    encl = enclose_roots(f)
    by_mult = sorted((e.multiplicity, round(e.center.real)) for e in encl)
    assert by_mult == [(1, 2), (2, 1)]


def test_modulus_intervals_meet_target_width():
    for lo, hi, _ in modulus_intervals(Poly.of([1, -3, 1]), target_width=1e-9):
        assert hi - lo <= 1e-9


def test_unit_band_judgments():
    assert all_moduli_in_unit_band(Poly.of([1, -1, 1]))
    assert not all_moduli_in_unit_band(Poly.of([1, -3, 1]))
    # mixed: one cyclotomic factor, one off-circle pair
    assert not all_moduli_in_unit_band(Poly.of([1, 1]) * Poly.of([1, -3, 1]))
    # Salem-type: two roots exactly on the circle, two off; decisively "not all"
    assert not all_moduli_in_unit_band(Poly.of([1, -1, -1, -1, 1]))


def test_rational_coefficients():
    ivs = modulus_intervals(Poly.of([1, Fraction(-5, 2), 1]))
    moduli = sorted((lo + hi) / 2 for lo, hi, _ in ivs)
    assert abs(moduli[0] - 0.5) < 1e-9
    assert abs(moduli[1] - 2.0) < 1e-9


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        enclose_roots(Poly.zero())


def test_second_approximation_path_agrees():
    # polyroots wrapper vs enclosure centers on a non-trivial quartic
    f = Poly.of([2, 0, -1, 0, 1])
    approx = sorted(complex(r).real ** 2 + complex(r).imag ** 2
                    for r in polyroots_leading_first(
                        [1, 0, -1, 0, 2], dps=40))
    centers = sorted(abs(e.center) ** 2 for e in enclose_roots(f))
    for a, b in zip(approx, centers):
        assert abs(a - b) < 1e-9
