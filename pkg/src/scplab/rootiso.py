"""Certified complex-root enclosures for exact polynomials.

High-precision Durand-Kerner approximations are turned into sound enclosures
with the monic-product bound: for monic g of degree k, every point z lies
within |g(z)|^(1/k) of some root. When the k disks around the k approximate
roots are pairwise disjoint, each contains exactly one root, so the disk
radii bound every root modulus from both sides. Precision is raised until the
requested question is decided; an undecidable question raises rather than
guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from mpmath import mp, mpf

from .exactalg import Poly

_DPS_LADDER = (30, 60, 120, 240)


class CertificationError(Exception):
    """Raised when enclosures cannot decide a question at maximum precision."""


@dataclass(frozen=True)
class RootEnclosure:
    center: complex
    radius: float
    multiplicity: int

    @property
    def modulus_interval(self) -> tuple[float, float]:
        m = abs(self.center)
        return (max(m - self.radius, 0.0), m + self.radius)


def _enclose_squarefree(g: Poly, dps: int) -> list[tuple[complex, float]] | None:
    """Disjoint disks around the roots of a squarefree monic polynomial."""
    k = g.degree
    if k < 1:
        return []
    with mp.workdps(dps):
        coeffs = [mp.mpf(c.numerator) / mp.mpf(c.denominator)
                  for c in reversed(g.coeffs)]
        try:
            roots = mp.polyroots(coeffs, maxsteps=200, extraprec=2 * mp.prec)
        except mp.NoConvergence:
            return None
        disks = []
        with mp.workdps(2 * dps):
            for z in roots:
                residual = abs(g.evaluate(mp.mpc(z)))
                rho = mp.power(residual, mp.mpf(1) / k) * mpf("1.01") + mpf(10) ** (-2 * dps + 4)
                disks.append((complex(z), float(rho)))
        for i in range(len(disks)):
            for j in range(i + 1, len(disks)):
                zi, ri = disks[i]
                zj, rj = disks[j]
                if abs(zi - zj) <= ri + rj:
                    return None
        return disks


def enclose_roots(f: Poly, target_radius: float | None = None) -> list[RootEnclosure]:
    """Certified enclosures for all roots of f, with multiplicities.

    The squarefree factors are isolated separately, so clustered roots of the
    input never defeat the disk certification.
    """
    if f.is_zero:
        raise ValueError("zero polynomial")
    f = f.monic()
    if f.degree < 1:
        return []
    out: list[RootEnclosure] = []
    for factor, mult in f.squarefree_decomposition():
        disks = None
        for dps in _DPS_LADDER:
            disks = _enclose_squarefree(factor, dps)
            if disks is None:
                continue
            if target_radius is None or all(r <= target_radius for _, r in disks):
                break
            disks = None
        if disks is None:
            raise CertificationError(
                f"could not isolate roots of {factor} at dps {_DPS_LADDER[-1]}"
            )
        out.extend(RootEnclosure(z, r, mult) for z, r in disks)
    return out


def modulus_intervals(f: Poly, target_width: float = 1e-9) -> list[tuple[float, float, int]]:
    """(lo, hi, multiplicity) certified modulus intervals for all roots of f."""
    encl = enclose_roots(f, target_radius=target_width / 2)
    return [(e.modulus_interval[0], e.modulus_interval[1], e.multiplicity) for e in encl]


def all_moduli_in_unit_band(f: Poly, band: float = 1e-9) -> bool:
    """True iff every root modulus lies in [1-band, 1+band], decided by enclosures.

    Independent of any algebraic unit-circle test: the verdict comes purely
    from refined numeric enclosures. Raises CertificationError when some
    enclosure straddles the band boundary at maximal precision.
    """
    for dps in _DPS_LADDER:
        undecided = False
        answer = True
        for factor, _ in f.monic().squarefree_decomposition():
            disks = _enclose_squarefree(factor, dps)
            if disks is None:
                undecided = True
                break
            for z, r in disks:
                lo, hi = abs(z) - r, abs(z) + r
                if lo > 1.0 + band or hi < 1.0 - band:
                    answer = False
                elif not (lo >= 1.0 - band and hi <= 1.0 + band):
                    undecided = True
                    break
            if undecided or not answer:
                break
        if not undecided:
            return answer
    raise CertificationError(f"unit-band membership undecided for {f}")


def classify_moduli(f: Poly) -> tuple[list[tuple[float, float, int]],
                                      list[tuple[float, float, int]],
                                      list[tuple[float, float, int]]]:
    """Split certified root modulus intervals into (<1, straddling-1, >1).

    Intervals that contain 1 after maximal refinement land in the middle
    bucket; callers needing an exact on-circle certificate must supply one
    algebraically.
    """
    below: list[tuple[float, float, int]] = []
    on: list[tuple[float, float, int]] = []
    above: list[tuple[float, float, int]] = []
    for lo, hi, mult in modulus_intervals(f):
        if hi < 1.0:
            below.append((lo, hi, mult))
        elif lo > 1.0:
            above.append((lo, hi, mult))
        else:
            on.append((lo, hi, mult))
    return below, on, above


def polyroots_leading_first(coeffs: Sequence, dps: int = 30):
    """Thin wrapper used by tests as a second, unrelated approximation path."""
    with mp.workdps(dps):
        return mp.polyroots([mp.mpmathify(c) for c in coeffs], maxsteps=200,
                            extraprec=mp.prec)
