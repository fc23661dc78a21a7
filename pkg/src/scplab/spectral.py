"""Exact eigenvalue criteria for integer and rational matrices.

The unit-circle question for monic integer polynomials is decided by
cyclotomic divisibility, never by comparing floating moduli to 1; certified
numeric enclosures only quantify witnesses once the algebraic test has
decided.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from mpmath import mp

from . import rootiso
from .exactalg import (
    Matrix,
    Poly,
    char_poly,
    euler_phi,
    is_prime,
    lcm_all,
    mat_vec,
    nullspace_fraction,
    padic_valuation,
    prime_factors,
)


class IndeterminateSplitError(Exception):
    """Eigenvalue modulus could not be certified on either side of 1."""


@lru_cache(maxsize=None)
def cyclotomic(m: int) -> Poly:
    """The m-th cyclotomic polynomial, exact integer coefficients."""
    if m < 1:
        raise ValueError("m must be positive")
    f = Poly.x_power_minus_one(m)
    for d in range(1, m):
        if m % d == 0:
            f = f.exact_div(cyclotomic(d))
    return f


@lru_cache(maxsize=None)
def cyclotomic_orders_up_to_degree(deg: int) -> tuple[int, ...]:
    """All m with euler_phi(m) <= deg; phi(m) >= sqrt(m/2) bounds the search."""
    if deg < 1:
        return ()
    cap = 2 * deg * deg + 2
    return tuple(m for m in range(1, cap + 1) if euler_phi(m) <= deg)


def cyclotomic_split(f: Poly) -> tuple[list[tuple[int, int]], Poly]:
    """Factor out every cyclotomic divisor: returns ([(m, multiplicity)], rest)."""
    rest = f.monic()
    found: list[tuple[int, int]] = []
    for m in cyclotomic_orders_up_to_degree(f.degree):
        phi_m = cyclotomic(m)
        if phi_m.degree > rest.degree:
            continue
        count = 0
        while phi_m.divides(rest):
            rest = rest.exact_div(phi_m)
            count += 1
        if count:
            found.append((m, count))
    return found, rest


def kronecker_all_roots_unit_modulus(f: Poly) -> bool:
    """Exact test: all roots of the monic integer polynomial lie on |z| = 1.

    Equivalent to f being a product of cyclotomic polynomials; decided by
    repeated exact division, no tolerances anywhere.
    """
    if f.is_zero or not f.is_monic:
        raise ValueError("polynomial must be monic and nonzero")
    if not f.is_integral:
        raise ValueError("polynomial must have integer coefficients")
    if f.constant == 0:
        raise ValueError("zero constant term: 0 is a root")
    _, rest = cyclotomic_split(f)
    return rest.degree == 0


def has_root_of_unity_factor(f: Poly) -> bool:
    """Exact test for a shared root with some x^N - 1."""
    if f.is_zero:
        raise ValueError("zero polynomial")
    g = f.monic()
    for m in cyclotomic_orders_up_to_degree(g.degree):
        phi_m = cyclotomic(m)
        if phi_m.degree <= g.degree and phi_m.divides(g):
            return True
    return False


def root_of_unity_order_bound(deg: int) -> int:
    """lcm of all orders a degree <= deg algebraic root of unity can have."""
    return lcm_all(cyclotomic_orders_up_to_degree(deg))


# ---------------------------------------------------------------------------
# distality / ergodicity verdicts


@dataclass(frozen=True)
class Distal:
    char_polynomial: Poly

    @property
    def is_distal(self) -> bool:
        return True


@dataclass(frozen=True)
class NonDistal:
    char_polynomial: Poly
    witness_factor: Poly
    witness_modulus: tuple[float, float]

    @property
    def is_distal(self) -> bool:
        return False


DistalityVerdict = Union[Distal, NonDistal]


def distality_verdict_poly(f: Poly) -> DistalityVerdict:
    if kronecker_all_roots_unit_modulus(f):
        return Distal(f)
    _, rest = cyclotomic_split(f)
    intervals = rootiso.modulus_intervals(rest, target_width=1e-9)
    off = [iv for iv in intervals if iv[1] < 1.0 or iv[0] > 1.0]
    if not off:
        raise IndeterminateSplitError(
            f"no certified off-circle root for non-cyclotomic part {rest}"
        )
    witness = max(off, key=lambda iv: abs((iv[0] + iv[1]) / 2 - 1.0))
    return NonDistal(f, rest, (witness[0], witness[1]))


def ergodicity_verdict_poly(f: Poly) -> bool:
    return not has_root_of_unity_factor(f)


# ---------------------------------------------------------------------------
# Newton polygons and the integrality trichotomy


@dataclass(frozen=True)
class NewtonPolygon:
    prime: int
    vertices: tuple[tuple[int, Fraction], ...]
    root_valuations: tuple[Fraction, ...]  # one entry per root; = -(hull slope)


def newton_polygon(f: Poly, p: int) -> NewtonPolygon:
    """Lower convex hull of (i, v_p(a_i)); root valuation = -(segment slope)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if f.is_zero or f.constant == 0:
        raise ValueError("polynomial must have a nonzero constant term")
    pts = [(i, Fraction(padic_valuation(c, p)))
           for i, c in enumerate(f.coeffs) if c != 0]
    # lower hull, left to right (monotone chain)
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    vals: list[Fraction] = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y2 - y1, x2 - x1)
        vals.extend([-slope] * (x2 - x1))
    return NewtonPolygon(p, tuple(hull), tuple(vals))


@dataclass(frozen=True)
class NonIntegerCoefficient:
    prime: int
    slope: Fraction  # a nonzero root valuation at that prime
    polygon: NewtonPolygon


@dataclass(frozen=True)
class IntegerRootsOfUnity:
    pass


@dataclass(frozen=True)
class IntegerOffUnitCircle:
    modulus_interval: tuple[float, float]


TrichotomyResult = Union[NonIntegerCoefficient, IntegerRootsOfUnity,
                         IntegerOffUnitCircle]


def integrality_trichotomy(f: Poly) -> TrichotomyResult:
    """Three-way split for a monic rational polynomial.

    Either some coefficient is non-integral (then some prime sees a nonzero
    Newton-polygon slope, i.e. a root with p-adic modulus != 1), or the
    polynomial is integral and the exact unit-circle dichotomy applies.
    """
    if not f.is_monic:
        raise ValueError("polynomial must be monic")
    if not f.is_integral:
        primes = sorted({p for c in f.coeffs for p in prime_factors(c.denominator)
                         if c.denominator != 1})
        for p in primes:
            poly = newton_polygon(f, p)
            nonzero = [v for v in poly.root_valuations if v != 0]
            if nonzero:
                slope = max(nonzero, key=lambda v: (abs(v), v))
                return NonIntegerCoefficient(p, slope, poly)
        raise AssertionError("non-integral coefficients force a nonzero slope")
    if kronecker_all_roots_unit_modulus(f):
        return IntegerRootsOfUnity()
    verdict = distality_verdict_poly(f)
    assert isinstance(verdict, NonDistal)
    return IntegerOffUnitCircle(verdict.witness_modulus)


# ---------------------------------------------------------------------------
# contraction splits


@dataclass(frozen=True)
class ContractionSplit:
    matrix: Matrix
    contracting: tuple[tuple[float, ...], ...]
    neutral: tuple[tuple[float, ...], ...]
    expanding: tuple[tuple[float, ...], ...]
    contracting_intervals: tuple[tuple[float, float, int], ...]
    expanding_intervals: tuple[tuple[float, float, int], ...]
    max_invariance_residual: float

    @property
    def contracting_dim(self) -> int:
        return len(self.contracting)

    @property
    def neutral_dim(self) -> int:
        return len(self.neutral)

    @property
    def expanding_dim(self) -> int:
        return len(self.expanding)


def _exact_kernel_basis(matrix: Matrix, poly: Poly) -> list[tuple[Fraction, ...]]:
    """Exact kernel of poly(M) over the rationals."""
    d = len(matrix)
    rows = [[Fraction(x) for x in row] for row in matrix]
    # evaluate poly at the matrix exactly
    acc = [[Fraction(0)] * d for _ in range(d)]
    power = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    for c in poly.coeffs:
        if c != 0:
            for i in range(d):
                for j in range(d):
                    acc[i][j] += c * power[i][j]
        power = [
            [sum(power[i][k] * rows[k][j] for k in range(d)) for j in range(d)]
            for i in range(d)
        ]
    return nullspace_fraction(acc)


def _numeric_kernel_basis(matrix: Matrix, roots: list[tuple[complex, int]],
                          poly: Poly, dps: int = 60) -> list[tuple[float, ...]]:
    """Kernel of prod (M - r)^mult over the reals at high precision.

    Root centers arrive at double precision and are Newton-refined against
    the given polynomial at the working precision, so the shifted matrices
    are singular at that scale. The root set is closed under conjugation, so
    the product matrix is real.
    """
    d = len(matrix)
    deriv = poly.derivative()
    with mp.workdps(dps):
        m = mp.matrix([[mp.mpf(int(x)) if isinstance(x, int)
                        else mp.mpf(x.numerator) / mp.mpf(x.denominator)
                        for x in row] for row in matrix])
        prod = mp.eye(d)
        for r, mult in roots:
            z = mp.mpc(r)
            for _ in range(1 + dps // 8):
                dz = deriv.evaluate(z)
                if dz == 0:
                    break
                z = z - poly.evaluate(z) / dz
            shift = m - z * mp.eye(d)
            for _ in range(mult):
                prod = prod * shift
        real = mp.matrix(d, d)
        for i in range(d):
            for j in range(d):
                real[i, j] = mp.re(prod[i, j])
        # row-reduce with partial pivoting; threshold far above the dps noise
        rows = [[real[i, j] for j in range(d)] for i in range(d)]
        tol = mp.mpf(10) ** (-dps // 2)
        pivots = []
        r = 0
        for c in range(d):
            pivot = max(range(r, d), key=lambda i: abs(rows[i][c]))
            if abs(rows[pivot][c]) <= tol:
                continue
            rows[r], rows[pivot] = rows[pivot], rows[r]
            inv = 1 / rows[r][c]
            rows[r] = [x * inv for x in rows[r]]
            for i in range(d):
                if i != r:
                    f = rows[i][c]
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
        free = [c for c in range(d) if c not in pivots]
        basis = []
        for fc in free:
            vec = [mp.mpf(0)] * d
            vec[fc] = mp.mpf(1)
            for ri, pc in enumerate(pivots):
                vec[pc] = -rows[ri][fc]
            norm = mp.sqrt(sum(x * x for x in vec))
            basis.append(tuple(float(x / norm) for x in vec))
        return basis


def _invariance_residual(matrix: Matrix, basis: list[tuple[float, ...]]) -> float:
    """How far M maps span(basis) out of itself (float Gram projection)."""
    if not basis:
        return 0.0
    d = len(matrix)
    fm = [[float(x) for x in row] for row in matrix]

    def dot(u, v):
        return sum(a * b for a, b in zip(u, v))

    # orthonormalize the basis first
    ortho: list[list[float]] = []
    for v in basis:
        w = list(map(float, v))
        for u in ortho:
            c = dot(w, u)
            w = [a - c * b for a, b in zip(w, u)]
        n = dot(w, w) ** 0.5
        if n > 1e-14:
            ortho.append([x / n for x in w])
    worst = 0.0
    for v in ortho:
        img = [sum(fm[i][j] * v[j] for j in range(d)) for i in range(d)]
        proj = list(img)
        for u in ortho:
            c = dot(img, u)
            proj = [a - c * b for a, b in zip(proj, u)]
        n_img = max(dot(img, img) ** 0.5, 1e-30)
        worst = max(worst, dot(proj, proj) ** 0.5 / n_img)
    return worst


def contraction_split(matrix: Matrix, dps: int = 60) -> ContractionSplit:
    """Generalized-eigenspace split by certified eigenvalue modulus.

    Cyclotomic factors of the characteristic polynomial certify the neutral
    block exactly; every remaining root must be certified off the unit circle
    by enclosure refinement, otherwise IndeterminateSplitError is raised.
    """
    f = char_poly(matrix)
    if f.constant == 0:
        raise ValueError("matrix is singular")
    cyc, rest = cyclotomic_split(f)
    neutral_poly = Poly.one()
    for m, mult in cyc:
        for _ in range(mult):
            neutral_poly = neutral_poly * cyclotomic(m)
    contracting_roots: list[tuple[complex, int]] = []
    expanding_roots: list[tuple[complex, int]] = []
    contracting_iv: list[tuple[float, float, int]] = []
    expanding_iv: list[tuple[float, float, int]] = []
    if rest.degree >= 1:
        try:
            enclosures = rootiso.enclose_roots(rest, target_radius=5e-10)
        except rootiso.CertificationError as exc:
            raise IndeterminateSplitError(str(exc)) from exc
        for e in enclosures:
            lo, hi = e.modulus_interval
            if hi < 1.0:
                contracting_roots.append((e.center, e.multiplicity))
                contracting_iv.append((lo, hi, e.multiplicity))
            elif lo > 1.0:
                expanding_roots.append((e.center, e.multiplicity))
                expanding_iv.append((lo, hi, e.multiplicity))
            else:
                raise IndeterminateSplitError(
                    f"root near {e.center} of {rest} cannot be certified off "
                    f"the unit circle (interval [{lo}, {hi}])"
                )
    neutral = tuple(
        tuple(float(x) for x in vec)
        for vec in _exact_kernel_basis(matrix, neutral_poly)
    ) if neutral_poly.degree >= 1 else ()
    squarefree_rest = Poly.one()
    for factor, _ in rest.squarefree_decomposition():
        squarefree_rest = squarefree_rest * factor
    contracting = tuple(_numeric_kernel_basis(matrix, contracting_roots,
                                              squarefree_rest, dps)) \
        if contracting_roots else ()
    expanding = tuple(_numeric_kernel_basis(matrix, expanding_roots,
                                            squarefree_rest, dps)) \
        if expanding_roots else ()
    dims = len(contracting) + len(neutral) + len(expanding)
    if dims != len(matrix):
        raise IndeterminateSplitError(
            f"subspace dimensions {dims} do not cover dimension {len(matrix)}"
        )
    residual = max(
        _invariance_residual(matrix, list(contracting)),
        _invariance_residual(matrix, list(neutral)),
        _invariance_residual(matrix, list(expanding)),
    )
    if residual > 1e-9:
        raise IndeterminateSplitError(f"invariance residual {residual} too large")
    return ContractionSplit(
        matrix=tuple(tuple(row) for row in matrix),
        contracting=contracting,
        neutral=neutral,
        expanding=expanding,
        contracting_intervals=tuple(contracting_iv),
        expanding_intervals=tuple(expanding_iv),
        max_invariance_residual=residual,
    )
