"""Iteration engines: convolution powers, shifted and symmetrized sequences,
orbit products over an automorphism, concentration functions, and windowed
convergence detection.

Measures on a semidirect group Z x| B that sit on a single integer fiber are
tracked as (base measure, fiber) pairs; the shifted sequence then reduces to
the exact product identity
    mu^n x^-n = (lam * alpha^k0(lam) * ... * alpha^(n-1)k0(lam)) . delta(-b_n)
so nothing is ever represented on the non-compact total group.
"""

from __future__ import annotations

import contextlib
import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from mpmath import mp

from . import measures as ms
from .groups import (
    FiniteGroup,
    IntAutomorphism,
    LatticeGroup,
    SemidirectGroup,
    ShiftGroup,
    Torus,
)

FREEZE_FACTOR_TOL = 1e-15
FREEZE_CONSECUTIVE = 3
HIGH_PRECISION_DPS = 140


@dataclass(frozen=True)
class EngineParams:
    """Knobs echoed into every report so windowed verdicts are reproducible."""

    window: int = 8
    eps: float = 1e-8
    horizon: int = 20
    n_max: int = 512
    idempotent_tol: float = 1e-6
    atom_scale: float = 0.1
    schedule: str = "auto"  # "linear" | "doubling" | "auto"
    early_stop: bool = True

    def as_dict(self) -> dict:
        return {
            "window": self.window,
            "eps": self.eps,
            "horizon": self.horizon,
            "n_max": self.n_max,
            "idempotent_tol": self.idempotent_tol,
            "atom_scale": self.atom_scale,
            "schedule": self.schedule,
            "early_stop": self.early_stop,
        }


@dataclass
class Trajectory:
    """Snapshots of a measure sequence plus step-to-step distances."""

    steps: list[int] = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    distances: list[float] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def append(self, step: int, snapshot, window_radius: int) -> None:
        if self.snapshots:
            d = ms.distance(self.snapshots[-1], snapshot, window_radius)
        else:
            d = math.nan
        self.steps.append(step)
        self.snapshots.append(snapshot)
        self.distances.append(float(d))

    @property
    def final(self):
        return self.snapshots[-1]

    def tracked_coefficient(self, snapshot) -> complex:
        chi = self.meta.get("tracked_char")
        if chi is not None and isinstance(snapshot, ms.SpectralMeasure):
            return snapshot.coeff(tuple(chi))
        if isinstance(snapshot, ms.AtomicMeasure):
            ident = snapshot.group.zero if hasattr(snapshot.group, "zero") \
                else snapshot.group.identity
            return complex(float(snapshot.weight_of(ident)), 0.0)
        return complex(math.nan, math.nan)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "distance", "coeff_re", "coeff_im"])
            for step, snap, dist in zip(self.steps, self.snapshots, self.distances):
                c = self.tracked_coefficient(snap)
                writer.writerow([step, repr(dist), repr(c.real), repr(c.imag)])


@dataclass(frozen=True)
class ConvergenceCall:
    status: str  # "converged" | "diverged" | "undecided"
    limit: object = None
    evidence: dict = field(default_factory=dict)
    eps: float = 0.0
    horizon: int = 0


def detect_convergence(traj: Trajectory, eps: float, horizon: int) -> ConvergenceCall:
    """Converged when the last `horizon` recorded distances stay within eps;
    Diverged needs a certificate (an escaping atom); otherwise Undecided."""
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    if eps <= 0:
        raise ValueError("eps must be positive")
    dists = [d for d in traj.distances[1:]]
    if len(dists) >= horizon and all(d <= eps for d in dists[-horizon:]):
        return ConvergenceCall("converged", traj.final,
                               {"tail_max_distance": max(dists[-horizon:],
                                                         default=0.0)},
                               eps, horizon)
    escape = _escaping_support(traj, horizon)
    if escape is not None:
        return ConvergenceCall("diverged", None, escape, eps, horizon)
    return ConvergenceCall("undecided", None,
                           {"recorded_steps": len(traj.steps)}, eps, horizon)


def _escaping_support(traj: Trajectory, horizon: int) -> Optional[dict]:
    """Certificate: min support norm strictly increasing past the window."""
    tail = traj.snapshots[-horizon:]
    if len(tail) < horizon:
        return None
    norms = []
    for snap in tail:
        if not isinstance(snap, ms.AtomicMeasure) \
                or not isinstance(snap.group, LatticeGroup):
            return None
        norms.append(min(max(abs(int(c)) for c in e) if e else 0
                         for e in snap.support))
    window = traj.meta.get("window", 8)
    increasing = all(b > a for a, b in zip(norms, norms[1:]))
    if increasing and norms[-1] > window:
        return {"escaping_min_norms": norms}
    return None


def _resolve_schedule(params: EngineParams, exact_finite: bool) -> str:
    if params.schedule != "auto":
        return params.schedule
    return "doubling" if exact_finite and params.n_max > 64 else "linear"


def _doubling_steps(n_max: int, tail: int = 0) -> list[int]:
    """Powers of two up to n_max - tail, then a linear tail so convergence
    detection sees true consecutive distances at the far end of the run."""
    top = max(1, n_max - tail)
    steps, n = [], 1
    while n <= top:
        steps.append(n)
        n *= 2
    last = steps[-1]
    for k in range(1, tail + 1):
        if last + k > n_max:
            break
        steps.append(last + k)
    return steps


# ---------------------------------------------------------------------------
# plain convolution powers


def convolution_powers(mu: ms.Measure, params: EngineParams) -> Trajectory:
    """Trajectory of mu, mu^2, ...; the doubling schedule squares exactly."""
    exact = isinstance(mu, ms.AtomicMeasure) and mu.exact
    schedule = _resolve_schedule(params, exact)
    traj = Trajectory(meta={"kind": "convolution-powers",
                            "window": params.window,
                            "resolved_schedule": schedule,
                            **params.as_dict()})
    power = mu
    traj.append(1, power, params.window)
    if schedule == "doubling":
        prev = 1
        for step in _doubling_steps(params.n_max, params.horizon + 2)[1:]:
            power = ms.convolve(power, power) if step == 2 * prev \
                else ms.convolve(power, mu)
            prev = step
            traj.append(step, power, params.window)
    else:
        for step in range(2, params.n_max + 1):
            power = ms.convolve(power, mu)
            traj.append(step, power, params.window)
            if _early_stop(traj, params):
                break
    return traj


# ---------------------------------------------------------------------------
# fibered measures on Z x| B


@dataclass(frozen=True)
class FiberedMeasure:
    """Measure on Z x|_alpha B supported on finitely many integer fibers.

    Each fiber carries its probability weight and the normalized conditional
    measure on the base (None is allowed off the single-fiber path, where
    only the integer marginal matters).
    """

    group: SemidirectGroup
    fibers: tuple[tuple[int, Fraction, Optional[ms.Measure]], ...]

    @classmethod
    def single(cls, group: SemidirectGroup, fiber: int,
               base_measure: ms.Measure) -> "FiberedMeasure":
        return cls(group, ((fiber, Fraction(1), base_measure),))

    @classmethod
    def of(cls, group: SemidirectGroup, fibers: dict) -> "FiberedMeasure":
        if all(not isinstance(v, tuple) for v in fibers.values()):
            if len(fibers) == 1:
                (n, m), = fibers.items()
                return cls.single(group, n, m)
            raise ValueError("multi-fiber measures need (weight, measure) pairs")
        entries = tuple(sorted(
            (n, Fraction(w), m) for n, (w, m) in fibers.items()
        ))
        total = sum((w for _, w, _ in entries), Fraction(0))
        if total != 1:
            raise ValueError("fiber weights must sum to 1")
        return cls(group, entries)

    @property
    def single_fiber(self) -> Optional[tuple[int, ms.Measure]]:
        if len(self.fibers) == 1:
            n, _, m = self.fibers[0]
            return (n, m)
        return None

    def z_marginal(self) -> ms.AtomicMeasure:
        return ms.AtomicMeasure.of(
            LatticeGroup(1), {(n,): w for n, w, _ in self.fibers}
        )

    def z_marginal_atoms(self) -> list[int]:
        return [n for n, _, _ in self.fibers]


def base_support_candidates(fm: FiberedMeasure) -> list:
    """Shift candidates: support points of mu, as (base element, fiber) pairs.

    Haar base factors on an abelian base contribute one representative, since
    every support point of the factor acts identically on subgroups by
    conjugation (the base is abelian); the representative records that.
    """
    single = fm.single_fiber
    if single is None:
        raise ValueError("candidate search requires a single-fiber measure")
    k0, base = single
    group = fm.group
    if isinstance(base, ms.HaarMeasure):
        return [(group.base_identity(), k0)]
    if isinstance(base, ms.AtomicMeasure):
        return [(e, k0) for e in base.support]
    if isinstance(base, ms.SpectralMeasure):
        return [(group.base_identity(), k0)]
    if isinstance(base, ms.ProductProfileMeasure):
        return [(group.base_identity(), k0)]
    raise ValueError(f"unsupported base measure {type(base).__name__}")


def _alpha_pushforward(group: SemidirectGroup, m: ms.Measure, n: int) -> ms.Measure:
    if n == 0:
        return m
    if isinstance(group.base, Torus):
        return ms.pushforward_automorphism(m, group.alpha.power(n))
    if isinstance(group.base, ShiftGroup):
        return ms.pushforward_shift(m, n)
    if isinstance(group.base, FiniteGroup):
        auto = group.alpha if n > 0 else group.alpha.inverse()
        out = m
        for _ in range(abs(n)):
            out = out.map_elements(auto.apply)
        return out
    raise ValueError("unsupported base group")


def shifted_sequence(fm: FiberedMeasure, candidate, params: EngineParams,
                     warn_sink: Optional[list] = None) -> Trajectory:
    """Trajectory of mu^n x^-n on the base group, for x = (b, k0).

    Requires x to sit on the measure's fiber; candidates typically come from
    base_support_candidates. A non-support candidate is allowed but recorded
    as a warning, since the limit is only guaranteed for support points.
    """
    single = fm.single_fiber
    if single is None:
        raise ValueError("shifted sequence requires a single-fiber measure")
    k0, lam = single
    b, kx = candidate
    if kx != k0:
        raise ValueError("shift candidate must sit on the measure's fiber")
    group = fm.group
    if warn_sink is not None and isinstance(lam, ms.AtomicMeasure) \
            and b not in lam.support and b != group.base_identity():
        warn_sink.append(f"candidate {b!r} not in the support of the base factor")
    traj = Trajectory(meta={"kind": "shifted-sequence",
                            "candidate": repr(candidate),
                            "window": params.window,
                            **params.as_dict()})
    if isinstance(group.base, Torus):
        traj.meta["tracked_char"] = _default_tracked_char(group.base.dim)
        _run_torus_fiber(traj, group, lam, k0, params, shift_point=b)
        return traj
    # exact measure-level loop (profile and finite bases are cheap per step):
    # lam_n = lam * alpha^k0(lam) * ... ; translate by b_n^-1 each step
    lam_n = lam
    alpha_power_lam = lam
    b_n = b
    beta = b
    traj.append(1, _translate(group, lam_n, b_n), params.window)
    for step in range(2, params.n_max + 1):
        alpha_power_lam = _alpha_pushforward(group, alpha_power_lam, k0)
        lam_n = ms.convolve(lam_n, alpha_power_lam)
        beta = group.alpha_apply(k0, beta)
        b_n = group.base_mul(b_n, beta)
        traj.append(step, _translate(group, lam_n, b_n), params.window)
        if _early_stop(traj, params):
            break
    return traj


def _run_torus_fiber(traj: Trajectory, group: SemidirectGroup, lam, k0: int,
                     params: EngineParams, shift_point=None,
                     symmetrize: bool = False) -> None:
    """Windowed per-character products for torus-base fibered sequences.

    State per window character chi: the dual-orbit vector (A^T)^(n k0) chi
    and the running product lam_hat over the orbit; the shifted snapshot
    multiplies in the phase of the accumulated translate b_n, the symmetrized
    snapshot takes the squared modulus. Characters freeze once their factors
    reach 1 at machine threshold, bounding dual-orbit growth.
    """
    torus = group.base
    lam_hat = _as_spectral(lam)
    alpha_step = group.alpha.power(k0)
    dual_step = alpha_step.dual()
    window = torus.window(params.window)
    vec = {chi: chi for chi in window}
    prod = {chi: complex(1.0, 0.0) for chi in window}
    calm = {chi: 0 for chi in window}
    frozen = {chi: False for chi in window}
    b_n = shift_point
    beta = shift_point
    translate = shift_point is not None and shift_point != torus.zero
    needs_precision = translate and any(
        not isinstance(c, (Fraction, int)) for c in shift_point
    )
    precision_ctx = mp.workdps(HIGH_PRECISION_DPS) if needs_precision \
        else contextlib.nullcontext()
    with precision_ctx:
        for step in range(1, params.n_max + 1):
            for chi in window:
                if frozen[chi]:
                    continue
                factor = lam_hat.coeff(vec[chi])
                prod[chi] *= factor
                vec[chi] = dual_step.apply_vector(vec[chi])
                if abs(factor - 1.0) < FREEZE_FACTOR_TOL:
                    calm[chi] += 1
                    if calm[chi] >= FREEZE_CONSECUTIVE:
                        frozen[chi] = True
                else:
                    calm[chi] = 0
            if symmetrize:
                values = {chi: complex(abs(p) ** 2, 0.0)
                          for chi, p in prod.items()}
            elif translate:
                negb = torus.neg(b_n)
                values = {
                    chi: p * ms._char_value(chi, negb)
                    for chi, p in prod.items()
                }
            else:
                values = dict(prod)
            traj.append(step, _window_snapshot(torus, values), params.window)
            if translate and step < params.n_max:
                beta = alpha_step.apply_point(beta, torus)
                b_n = group.base_mul(b_n, beta)
            if all(frozen.values()) and (not translate
                                         or _translate_settled(traj)):
                traj.meta["all_frozen_at"] = step
                break
            if _early_stop(traj, params):
                break


def _translate_settled(traj: Trajectory) -> bool:
    tail = traj.distances[-FREEZE_CONSECUTIVE:]
    return len(tail) == FREEZE_CONSECUTIVE and all(d <= FREEZE_FACTOR_TOL
                                                   for d in tail)


def _as_spectral(lam) -> ms.SpectralMeasure:
    if isinstance(lam, ms.SpectralMeasure):
        return lam
    if isinstance(lam, ms.AtomicMeasure) and isinstance(lam.group, Torus):
        return ms.spectral_of_atoms(lam)
    if isinstance(lam, ms.HaarMeasure):
        return lam.as_spectral()
    raise ValueError("expected a torus measure")


def _translate(group: SemidirectGroup, m: ms.Measure, b) -> ms.Measure:
    """Right-translate the base measure by b^-1 (exact on each representation)."""
    if b == group.base_identity():
        return m
    binv = group.base_inv(b)
    if isinstance(m, ms.AtomicMeasure):
        return m.map_elements(lambda e: group.base_mul(e, binv))
    if isinstance(m, ms.SpectralMeasure):
        point = binv

        def coeff(chi, inner=m, x=point):
            return inner.coeff(chi) * ms._char_value(chi, x)

        return ms.SpectralMeasure(m.group, coeff, provenance=m.provenance)
    if isinstance(m, ms.HaarMeasure):
        if isinstance(m.subgroup, ms.TorusSubgroup) \
                and m.subgroup.contains_point(binv):
            return m
        if isinstance(m.subgroup, ms.ProfileSubgroup) \
                and m.subgroup.contains(binv):
            return m
        return _translate(group, ms._haar_concrete(m), b)
    if isinstance(m, ms.ProductProfileMeasure):
        return ms.convolve(m, ms.dirac(m.group, binv))
    raise ValueError(f"unsupported measure {type(m).__name__}")


def symmetrized_sequence(mu, params: EngineParams) -> Trajectory:
    """Trajectory of mu^n * reflect(mu)^n.

    On a single fiber of Z x| B this equals lam_n * reflect(lam_n) on the
    base, which is what gets tracked; on plain groups the powers are tracked
    directly (doubling schedule for exact finite measures).
    """
    if isinstance(mu, FiberedMeasure):
        single = mu.single_fiber
        if single is None:
            raise ValueError("symmetrized sequence requires a single fiber")
        k0, lam = single
        group = mu.group
        traj = Trajectory(meta={"kind": "symmetrized-sequence",
                                "window": params.window, **params.as_dict()})
        if isinstance(group.base, Torus):
            traj.meta["tracked_char"] = _default_tracked_char(group.base.dim)
            _run_torus_fiber(traj, group, lam, k0, params, symmetrize=True)
            return traj
        lam_n = lam
        alpha_power_lam = lam
        traj.append(1, ms.convolve(lam_n, ms.reflect(lam_n)), params.window)
        for step in range(2, params.n_max + 1):
            alpha_power_lam = _alpha_pushforward(group, alpha_power_lam, k0)
            lam_n = ms.convolve(lam_n, alpha_power_lam)
            traj.append(step, ms.convolve(lam_n, ms.reflect(lam_n)),
                        params.window)
            if _early_stop(traj, params):
                break
        return traj
    if isinstance(mu, ms.SpectralMeasure) or (
            isinstance(mu, ms.AtomicMeasure) and isinstance(mu.group, Torus)):
        # abelian: the symmetrized coefficient is |mu_hat(chi)|^(2n)
        mu_hat = _as_spectral(mu)
        torus = mu_hat.group
        window = torus.window(params.window)
        base = {chi: abs(mu_hat.coeff(chi)) ** 2 for chi in window}
        traj = Trajectory(meta={"kind": "symmetrized-sequence",
                                "window": params.window,
                                "tracked_char": _default_tracked_char(torus.dim),
                                **params.as_dict()})
        running = dict(base)
        traj.append(1, _window_snapshot(
            torus, {c: complex(v, 0.0) for c, v in running.items()}),
            params.window)
        for step in range(2, params.n_max + 1):
            running = {c: running[c] * base[c] for c in window}
            traj.append(step, _window_snapshot(
                torus, {c: complex(v, 0.0) for c, v in running.items()}),
                params.window)
            if _early_stop(traj, params):
                break
        return traj
    exact = isinstance(mu, ms.AtomicMeasure) and mu.exact
    schedule = _resolve_schedule(params, exact)
    traj = Trajectory(meta={"kind": "symmetrized-sequence",
                            "window": params.window,
                            "resolved_schedule": schedule, **params.as_dict()})
    power = mu
    traj.append(1, ms.convolve(power, ms.reflect(power)), params.window)
    if schedule == "doubling":
        prev = 1
        for step in _doubling_steps(params.n_max, params.horizon + 2)[1:]:
            power = ms.convolve(power, power) if step == 2 * prev \
                else ms.convolve(power, mu)
            prev = step
            traj.append(step, ms.convolve(power, ms.reflect(power)),
                        params.window)
    else:
        for step in range(2, params.n_max + 1):
            power = ms.convolve(power, mu)
            traj.append(step, ms.convolve(power, ms.reflect(power)),
                        params.window)
            if _early_stop(traj, params):
                break
    return traj


def _early_stop(traj: Trajectory, params: EngineParams) -> bool:
    if not params.early_stop:
        return False
    dists = traj.distances[1:]
    if len(dists) < params.horizon:
        return False
    return all(d <= params.eps * 1e-3 for d in dists[-params.horizon:])


def _default_tracked_char(dim: int) -> tuple[int, ...]:
    return (1,) + (0,) * (dim - 1)


# ---------------------------------------------------------------------------
# orbit products


def orbit_product(lam: ms.Measure, alpha, params: EngineParams,
                  group=None) -> Trajectory:
    """Partial products lam * alpha(lam) * ... * alpha^n(lam).

    Spectral path: per-character running products with the character vector
    advanced through the dual matrix; a character freezes once its factors
    sit at 1 within machine threshold for a few consecutive steps, which
    bounds the dual-orbit growth.
    """
    if isinstance(alpha, IntAutomorphism):
        return _orbit_product_spectral(lam, alpha, params)
    if isinstance(lam, (ms.ProductProfileMeasure, ms.HaarMeasure)) \
            or (isinstance(lam, ms.AtomicMeasure)
                and isinstance(lam.group, ShiftGroup)):
        return _orbit_product_profile(lam, params)
    raise ValueError("unsupported orbit product configuration")


def _orbit_product_spectral(lam: ms.Measure, alpha: IntAutomorphism,
                            params: EngineParams) -> Trajectory:
    if isinstance(lam, ms.AtomicMeasure):
        lam_hat = ms.spectral_of_atoms(lam)
    elif isinstance(lam, ms.HaarMeasure):
        lam_hat = lam.as_spectral()
    elif isinstance(lam, ms.SpectralMeasure):
        lam_hat = lam
    else:
        raise ValueError("orbit product needs a torus measure")
    torus = lam_hat.group
    dual = alpha.dual()
    window = torus.window(params.window)
    vec = {chi: chi for chi in window}
    prod = {chi: complex(1.0, 0.0) for chi in window}
    calm = {chi: 0 for chi in window}
    frozen = {chi: False for chi in window}
    traj = Trajectory(meta={"kind": "orbit-product",
                            "window": params.window,
                            "tracked_char": _default_tracked_char(torus.dim),
                            **params.as_dict()})
    for step in range(0, params.n_max + 1):
        for chi in window:
            if frozen[chi]:
                continue
            factor = lam_hat.coeff(vec[chi])
            prod[chi] *= factor
            vec[chi] = dual.apply_vector(vec[chi])
            if abs(factor - 1.0) < FREEZE_FACTOR_TOL:
                calm[chi] += 1
                if calm[chi] >= FREEZE_CONSECUTIVE:
                    frozen[chi] = True
            else:
                calm[chi] = 0
        traj.append(step, _window_snapshot(torus, prod), params.window)
        if all(frozen.values()):
            traj.meta["all_frozen_at"] = step
            break
        if _early_stop(traj, params):
            break
    return traj


def _window_snapshot(torus: Torus, values: dict) -> ms.SpectralMeasure:
    frozen_values = dict(values)

    def coeff(chi, _v=frozen_values):
        try:
            return _v[chi]
        except KeyError:
            raise ms.GroupMismatchError(
                "coefficient requested off the recorded window"
            ) from None

    return ms.SpectralMeasure(torus, coeff, provenance="limit-of-products")


def _orbit_product_profile(lam: ms.Measure, params: EngineParams) -> Trajectory:
    traj = Trajectory(meta={"kind": "orbit-product", "window": params.window,
                            **params.as_dict()})
    if isinstance(lam, ms.HaarMeasure):
        lam = lam.as_profile()
    partial = lam
    shifted = lam
    traj.append(0, partial, params.window)
    for step in range(1, params.n_max + 1):
        shifted = ms.pushforward_shift(shifted, 1)
        partial = ms.convolve(partial, shifted)
        traj.append(step, partial, params.window)
        if _early_stop(traj, params):
            break
    return traj


# ---------------------------------------------------------------------------
# concentration functions


def concentration_function(mu: ms.AtomicMeasure, compact_set: Sequence,
                           n_max: int) -> list[Fraction]:
    """Exact concentration values c_n = sup_g mu^n(K g) for n = 1..n_max.

    Finitely many translates can be nonzero, so the sup is a max over
    g = k^-1 s with k in K and s in the support of mu^n.
    """
    group = mu.group
    if not isinstance(group, (LatticeGroup, FiniteGroup)):
        raise ValueError("concentration functions need a discrete group")
    compact = list(compact_set)
    out: list[Fraction] = []
    power = mu
    for _ in range(n_max):
        weights = dict(power.atoms)
        candidates = set()
        for k in compact:
            for s in weights:
                candidates.add(_group_div(group, k, s))
        best = Fraction(0)
        for g in candidates:
            total = sum(
                (weights.get(_group_mul_elems(group, k, g), Fraction(0))
                 for k in compact),
                Fraction(0),
            )
            best = max(best, total)
        out.append(best)
        power = ms.convolve(power, mu)
    return out


def _group_mul_elems(group, a, b):
    if isinstance(group, FiniteGroup):
        return group.mul(a, b)
    return group.add(a, b)


def _group_div(group, k, s):
    """g with k*g = s."""
    if isinstance(group, FiniteGroup):
        return group.mul(group.inv(k), s)
    return tuple(x - y for y, x in zip(k, s))


def dissipation_evidence(marginal: ms.AtomicMeasure, radii=(1, 2, 4, 8),
                         n_max: int = 64) -> dict:
    """Concentration exhaustion over centered intervals of a 1-d marginal.

    A non-degenerate marginal walk dissipates; the decreasing values over the
    canonical exhaustion are attached to reports as numeric evidence.
    """
    group = marginal.group
    if not isinstance(group, LatticeGroup) or group.dim != 1:
        raise ValueError("dissipation evidence expects a 1-d lattice marginal")
    out = {}
    for r in radii:
        box = [(i,) for i in range(-r, r + 1)]
        values = concentration_function(marginal, box, n_max)
        out[f"interval_radius_{r}"] = {
            "first": float(values[0]),
            "last": float(values[-1]),
            "monotone": all(b <= a for a, b in zip(values, values[1:])),
        }
    return out


def separating_marginal(mu: ms.AtomicMeasure) -> ms.AtomicMeasure:
    """Project a multi-atom lattice measure onto a coordinate separating two
    atoms; dissipation of the marginal forces dissipation upstairs."""
    group = mu.group
    if not isinstance(group, LatticeGroup):
        raise ValueError("expected a lattice measure")
    support = mu.support
    coord = None
    for j in range(group.dim):
        if len({e[j] for e in support}) > 1:
            coord = j
            break
    if coord is None:
        raise ValueError("measure has no separating coordinate")
    line = LatticeGroup(1)
    out: dict = {}
    for e, w in mu.atoms:
        key = (e[coord],)
        out[key] = out.get(key, Fraction(0)) + w
    return ms.AtomicMeasure.of(line, out)
