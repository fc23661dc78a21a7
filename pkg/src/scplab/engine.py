"""SCP verdict engine: screens for dissipation, iterates the shifted and
symmetrized sequences, detects idempotent limits, checks the exact
normalization of the limit subgroup by the shift, and cross-checks the
outcome against the spectral distality prediction.

A Violation verdict is evidence, not a proof: every disagreement between the
simulated verdict and the spectral prediction is flagged for audit with full
trajectories, never silently reconciled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from mpmath import mp

from . import dynamics as dy
from . import measures as ms
from . import spectral
from .groups import (
    FiniteGroup,
    FiniteSubgroup,
    IntAutomorphism,
    LatticeGroup,
    ProfileSubgroup,
    SemidirectGroup,
    ShiftGroup,
    SubgroupDescriptor,
    Torus,
    TorusSubgroup,
    TrivialLatticeSubgroup,
)

GroupSpec = Union[FiniteGroup, LatticeGroup, Torus, SemidirectGroup, ShiftGroup]


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Dissipating:
    evidence: dict = field(default_factory=dict)

    kind = "dissipating"


@dataclass(frozen=True)
class ShiftedHaar:
    shift: object
    subgroup: SubgroupDescriptor
    residual: float
    normalization_ok: bool = True

    kind = "shifted_haar"

    def __post_init__(self) -> None:
        if not self.normalization_ok:
            raise ValueError("ShiftedHaar requires the exact normalization")


@dataclass(frozen=True)
class Violation:
    reason: str  # "non_idempotent_limit" | "limit_not_normalized_by_shift"
    evidence: dict = field(default_factory=dict)

    kind = "violation"


@dataclass(frozen=True)
class Inconclusive:
    budget: dict = field(default_factory=dict)

    kind = "inconclusive"


SCPVerdict = Union[Dissipating, ShiftedHaar, Violation, Inconclusive]


@dataclass(frozen=True)
class DistalityPrediction:
    group_kind: str
    point_wise_distal: bool
    generator_verdicts: tuple = ()
    reason: str = ""


@dataclass
class ClassifyResult:
    verdict: SCPVerdict
    trajectories: dict
    warnings: list
    params: dy.EngineParams


# ---------------------------------------------------------------------------
# distality predictions


def predict_point_wise_distal(group: GroupSpec) -> DistalityPrediction:
    """Spectral-side prediction, decided exactly per group family."""
    if isinstance(group, FiniteGroup):
        return DistalityPrediction("finite", True,
                                   reason="finite groups are compact, hence distal")
    if isinstance(group, LatticeGroup):
        return DistalityPrediction("lattice", True,
                                   reason="discrete abelian groups are distal")
    if isinstance(group, Torus):
        return DistalityPrediction("torus", True,
                                   reason="compact abelian groups are distal")
    if isinstance(group, ShiftGroup):
        return DistalityPrediction("shift-space", True,
                                   reason="compact groups are distal")
    if isinstance(group, SemidirectGroup):
        if isinstance(group.base, Torus):
            verdict = spectral.distality_verdict_poly(
                group.alpha.char_polynomial
            )
            return DistalityPrediction(
                "semidirect-torus",
                verdict.is_distal,
                generator_verdicts=(verdict,),
                reason="conjugation by the step element acts as the matrix; "
                       "distal iff the characteristic polynomial is a product "
                       "of cyclotomics",
            )
        if isinstance(group.base, FiniteGroup):
            return DistalityPrediction(
                "semidirect-finite", True,
                reason="discrete total group, conjugation orbits are finite",
            )
        if isinstance(group.base, ShiftGroup):
            nontrivial = group.base.symbol_group.order > 1
            return DistalityPrediction(
                "semidirect-shift",
                not nontrivial,
                reason="the shift on a nontrivial two-sided product admits a "
                       "strictly decreasing invariant subgroup chain",
            )
    raise ValueError(f"unsupported group family {type(group).__name__}")


# ---------------------------------------------------------------------------
# normalization checks


def _normalization_check(group, candidate, sub: SubgroupDescriptor):
    """Exact structural test that x K x^-1 = K; returns (ok, witness dict)."""
    if isinstance(sub, (TrivialLatticeSubgroup,)):
        return True, None
    if isinstance(group, (FiniteGroup,)):
        conj = sub.conjugate(candidate)
        if conj == sub:
            return True, None
        moved = next(iter(conj.members - sub.members), None)
        return False, {"witness_element": moved,
                       "reason": "conjugated subgroup differs"}
    if isinstance(group, (LatticeGroup, Torus)):
        return True, None  # abelian: conjugation is trivial
    if isinstance(group, SemidirectGroup):
        b, n = candidate
        if isinstance(sub, TorusSubgroup):
            image = sub.image_under(group.alpha.power(n))
            if image == sub:
                return True, None
            witness = _torus_witness(sub, image)
            return False, witness
        if isinstance(sub, ProfileSubgroup):
            image = sub.shift(n)
            if image == sub:
                return True, None
            witness = _profile_witness(group.base, sub, image, n)
            return False, witness
        if isinstance(sub, FiniteSubgroup):
            conj = FiniteSubgroup(
                sub.group,
                frozenset(group.alpha_apply(n, a) for a in sub.members),
            )
            if conj == sub:
                return True, None
            moved = next(iter(conj.members - sub.members), None)
            return False, {"witness_element": moved,
                           "reason": "conjugated subgroup differs"}
    raise ValueError("unsupported normalization check")


def _torus_witness(sub: TorusSubgroup, image: TorusSubgroup) -> dict:
    if sub.order is not None:
        for p in sub.points():
            if not image.contains_point(p):
                return {"witness_element": [str(c) for c in p],
                        "reason": "subgroup point not fixed by conjugation"}
    for chi in image.annihilator:
        if not sub.contains_char(chi):
            return {"witness_character": list(chi),
                    "reason": "annihilator moved by the dual action"}
    for chi in sub.annihilator:
        if not image.contains_char(chi):
            return {"witness_character": list(chi),
                    "reason": "annihilator moved by the dual action"}
    return {"reason": "subgroup moved by conjugation"}


def _profile_witness(base: ShiftGroup, sub: ProfileSubgroup,
                     image: ProfileSubgroup, n: int) -> dict:
    sym = sub.symbol_group
    probe_indices = sorted(
        {i for i, _ in sub.overrides} | {i for i, _ in image.overrides}
        | {0, 1, -n, n, n + 1, 1 - n}
    )
    for i in probe_indices:
        extra = sub.at(i) - image.at(i)
        if extra:
            s = next(iter(extra - {sym.identity}), None)
            if s is not None:
                element = base.element({i: s})
                return {
                    "witness_element": list(element),
                    "reason": f"in the subgroup but not in its conjugate "
                              f"(coordinate {i})",
                }
    return {"reason": "subgroup moved by conjugation"}


# ---------------------------------------------------------------------------
# classification pipeline


def classify_measure(group: GroupSpec, mu, params: dy.EngineParams
                     ) -> ClassifyResult:
    """Full SCP pipeline for one measure on one group.

    1. dissipation screen (non-degenerate integer marginal, concentration
       exhaustion evidence);
    2. symmetrized sequence to the candidate limit, shifted sequence per
       support candidate;
    3. idempotent detection on the limits;
    4. exact normalization of the limit subgroup by the shift.
    """
    warnings: list[str] = []
    trajectories: dict[str, dy.Trajectory] = {}

    if isinstance(group, SemidirectGroup):
        if not isinstance(mu, dy.FiberedMeasure):
            raise ValueError("semidirect measures must be fiber-decomposed")
        if len(mu.fibers) > 1:
            marginal = mu.z_marginal()
            evidence = dy.dissipation_evidence(marginal, n_max=48)
            return ClassifyResult(
                Dissipating({"rule": "non-degenerate integer marginal",
                             "marginal_support": mu.z_marginal_atoms(),
                             "concentration": evidence}),
                trajectories, warnings, params,
            )
        return _classify_single_fiber(group, mu, params, trajectories, warnings)

    if isinstance(group, LatticeGroup):
        return _classify_lattice(group, mu, params, trajectories, warnings)

    if isinstance(group, FiniteGroup):
        return _classify_compact(group, mu, params, trajectories, warnings)

    if isinstance(group, Torus):
        return _classify_compact(group, mu, params, trajectories, warnings)

    raise ValueError(f"unsupported group family {type(group).__name__}")


def _classify_lattice(group, mu, params, trajectories, warnings):
    if not isinstance(mu, ms.AtomicMeasure):
        raise ValueError("lattice measures must be atomic")
    if len(mu.atoms) >= 2:
        marginal = dy.separating_marginal(mu)
        evidence = dy.dissipation_evidence(marginal, n_max=48)
        return ClassifyResult(
            Dissipating({"rule": "non-degenerate lattice walk",
                         "concentration": evidence}),
            trajectories, warnings, params,
        )
    atom = mu.atoms[0][0]
    # mu^n x^-n with x the single atom is constantly the Dirac at zero
    traj = dy.Trajectory(meta={"kind": "shifted-sequence",
                               "candidate": repr(atom), **params.as_dict()})
    zero = ms.dirac(group, group.zero)
    for step in range(1, min(params.n_max, params.horizon + 2) + 1):
        traj.append(step, zero, params.window)
    trajectories["shifted-0"] = traj
    verdict = ShiftedHaar(shift=atom,
                          subgroup=TrivialLatticeSubgroup(group.dim),
                          residual=0.0)
    return ClassifyResult(verdict, trajectories, warnings, params)


def _effective_horizon(traj: dy.Trajectory, params: dy.EngineParams) -> int:
    """Recorded-step horizon, capped by how many steps were recorded (the
    doubling schedule ends in a linear tail of at least horizon steps)."""
    return max(2, min(params.horizon, len(traj.steps) - 1))


def _classify_compact(group, mu, params, trajectories, warnings):
    """Finite groups and tori: never dissipating; shift candidates from the
    support (identity included via the symmetrized route)."""
    sym = dy.symmetrized_sequence(mu, params)
    trajectories["symmetrized"] = sym
    call = dy.detect_convergence(sym, params.eps,
                                 _effective_horizon(sym, params))
    if call.status != "converged":
        return ClassifyResult(
            Inconclusive({"stage": "symmetrized", "status": call.status,
                          **call.evidence}),
            trajectories, warnings, params,
        )
    rho = call.limit
    sub = ms.is_idempotent(rho, params.idempotent_tol, params.window)
    if sub is None:
        return ClassifyResult(
            Violation("non_idempotent_limit",
                      {"stage": "symmetrized",
                       "limit": ms.measure_report(rho, params.window)}),
            trajectories, warnings, params,
        )
    if isinstance(group, FiniteGroup) and isinstance(mu, ms.AtomicMeasure):
        for x in mu.support:
            ok, witness = _normalization_check(group, x, sub)
            if not ok:
                return ClassifyResult(
                    Violation("limit_not_normalized_by_shift",
                              {"candidate": x, **(witness or {})}),
                    trajectories, warnings, params,
                )
        shift_elem = mu.support[0]
        shifted = _finite_shifted_trajectory(group, mu, shift_elem, params)
        trajectories["shifted-0"] = shifted
        call2 = dy.detect_convergence(shifted, params.eps,
                                      min(params.horizon,
                                          len(shifted.steps) - 1))
        if call2.status != "converged":
            return ClassifyResult(
                Inconclusive({"stage": "shifted", "status": call2.status,
                              **call2.evidence}),
                trajectories, warnings, params,
            )
        shifted_sub = ms.is_idempotent(call2.limit, params.idempotent_tol,
                                       params.window)
        if shifted_sub is None:
            return ClassifyResult(
                Violation("non_idempotent_limit",
                          {"stage": "shifted",
                           "limit": ms.measure_report(call2.limit,
                                                      params.window)}),
                trajectories, warnings, params,
            )
        residual = _residual_to_haar(call2.limit, group, shifted_sub, params)
        return ClassifyResult(
            ShiftedHaar(shift_elem, shifted_sub, residual),
            trajectories, warnings, params,
        )
    # torus case: abelian, normalization is automatic; the shift is trivial
    residual = _residual_to_haar(rho, group, sub, params)
    return ClassifyResult(
        ShiftedHaar(_identity_of(group), sub, residual),
        trajectories, warnings, params,
    )


def _finite_shifted_trajectory(group, mu, x, params) -> dy.Trajectory:
    traj = dy.Trajectory(meta={"kind": "shifted-sequence",
                               "candidate": repr(x), **params.as_dict()})
    power = mu
    xn = x
    traj.append(1, power.map_elements(lambda e: group.mul(e, group.inv(xn))),
                params.window)
    for step in range(2, params.n_max + 1):
        power = ms.convolve(power, mu)
        xn = group.mul(xn, x)
        shifted = power.map_elements(
            lambda e, g=xn: group.mul(e, group.inv(g))
        )
        traj.append(step, shifted, params.window)
        if dy._early_stop(traj, params):
            break
    return traj


def _classify_single_fiber(group, fm, params, trajectories, warnings):
    k0, base = fm.single_fiber
    if k0 == 0:
        raise ValueError("fiber 0 measures live on the base; classify there")
    sym = dy.symmetrized_sequence(fm, params)
    trajectories["symmetrized"] = sym
    call = dy.detect_convergence(sym, params.eps,
                                 _effective_horizon(sym, params))
    if call.status != "converged":
        return ClassifyResult(
            Inconclusive({"stage": "symmetrized", "status": call.status,
                          **call.evidence}),
            trajectories, warnings, params,
        )
    rho = call.limit
    rho_sub = ms.is_idempotent(rho, params.idempotent_tol, params.window)

    candidates = dy.base_support_candidates(fm)
    shifted_results = []
    for idx, candidate in enumerate(candidates):
        label = f"shifted-{idx}"
        traj = dy.shifted_sequence(fm, candidate, params, warn_sink=warnings)
        trajectories[label] = traj
        call_x = dy.detect_convergence(traj, params.eps,
                                       _effective_horizon(traj, params))
        shifted_results.append((candidate, traj, call_x))

    undecided = [c for c, _, call_x in shifted_results
                 if call_x.status != "converged"]
    if undecided and rho_sub is None:
        return ClassifyResult(
            Inconclusive({"stage": "shifted", "undecided": len(undecided)}),
            trajectories, warnings, params,
        )

    if rho_sub is None:
        # the symmetrized limit is not Haar: SCP fails with a non-idempotent
        # limit; attach the shifted limit for audit
        candidate, traj, _ = shifted_results[0]
        return ClassifyResult(
            Violation("non_idempotent_limit",
                      {"candidate": repr(candidate),
                       "limit": ms.measure_report(traj.final, params.window),
                       "symmetrized_limit": ms.measure_report(
                           rho, params.window)}),
            trajectories, warnings, params,
        )

    for candidate, traj, call_x in shifted_results:
        if call_x.status != "converged":
            return ClassifyResult(
                Inconclusive({"stage": "shifted",
                              "candidate": repr(candidate),
                              "status": call_x.status}),
                trajectories, warnings, params,
            )
        limit_sub = ms.is_idempotent(call_x.limit, params.idempotent_tol,
                                     params.window)
        if limit_sub is None:
            return ClassifyResult(
                Violation("non_idempotent_limit",
                          {"candidate": repr(candidate),
                           "limit": ms.measure_report(call_x.limit,
                                                      params.window)}),
                trajectories, warnings, params,
            )
        ok, witness = _normalization_check(group, (candidate[0], k0),
                                           limit_sub)
        if not ok:
            return ClassifyResult(
                Violation("limit_not_normalized_by_shift",
                          {"candidate": repr(candidate), **(witness or {})}),
                trajectories, warnings, params,
            )

    candidate, traj, call_x = shifted_results[0]
    limit_sub = ms.is_idempotent(call_x.limit, params.idempotent_tol,
                                 params.window)
    residual = _residual_to_haar(call_x.limit, group, limit_sub, params)
    return ClassifyResult(
        ShiftedHaar(candidate, limit_sub, residual),
        trajectories, warnings, params,
    )


def _identity_of(group):
    if isinstance(group, FiniteGroup):
        return group.identity
    if isinstance(group, (LatticeGroup, Torus)):
        return group.zero
    if isinstance(group, ShiftGroup):
        return group.identity
    if isinstance(group, SemidirectGroup):
        return group.identity
    raise ValueError("unsupported group")


def _residual_to_haar(limit, group, sub, params) -> float:
    base = group.base if isinstance(group, SemidirectGroup) else group
    if isinstance(sub, TorusSubgroup):
        target = ms.haar_of(base, sub)
    elif isinstance(sub, FiniteSubgroup):
        target = ms.haar_of(base, sub)
    elif isinstance(sub, ProfileSubgroup):
        target = ms.haar_of(base, sub)
    else:
        return 0.0
    return float(ms.distance(limit, target, params.window))


# ---------------------------------------------------------------------------
# counterexample construction


class NoContractingDirectionError(ValueError):
    pass


RATIONAL_GUARD_DENOMINATOR = 16


def construct_counterexample(alpha: IntAutomorphism,
                             atom_scale: float = 0.1,
                             dps: int = 120) -> tuple[ms.AtomicMeasure, dict]:
    """Two-atom measure on the contracting line of a non-distal automorphism.

    Returns (measure, info). The atoms are 0 and the projection of
    atom_scale * v with v a certified contracting direction, held at dps
    decimal digits so huge dual characters keep full phase accuracy. If only
    the inverse contracts (impossible for determinant +/-1 input, kept for
    robustness), the inverse is used and recorded.
    """
    if not 1e-6 < atom_scale < 0.5:
        raise ValueError(
            "atom_scale must lie in (1e-6, 0.5): smaller scales degenerate "
            "toward the identity atom, larger ones wrap around the torus"
        )
    verdict = spectral.distality_verdict_poly(alpha.char_polynomial)
    if verdict.is_distal:
        raise NoContractingDirectionError(
            "automorphism is distal: no contracting direction exists"
        )
    info: dict = {"switched_to_inverse": False}
    split = spectral.contraction_split(alpha.matrix)
    if split.contracting_dim == 0:
        alpha = alpha.inverse()
        split = spectral.contraction_split(alpha.matrix)
        info["switched_to_inverse"] = True
        if split.contracting_dim == 0:
            raise NoContractingDirectionError(
                "neither the automorphism nor its inverse contracts"
            )
    direction = _high_precision_contracting_vector(alpha, dps)
    scale = atom_scale
    torus = Torus(alpha.dim)
    with mp.workdps(dps):
        for _ in range(64):
            point = tuple(mp.mpf(scale) * c for c in direction)
            point = torus.reduce_point(point)
            if not _near_small_rational(point, RATIONAL_GUARD_DENOMINATOR):
                break
            scale *= 1.0 + 1.0 / 64.0
        else:
            raise NoContractingDirectionError(
                "could not avoid small rational points on the contracting line"
            )
    info["atom_scale_used"] = scale
    info["witness_modulus"] = verdict.witness_modulus
    info["contracting_intervals"] = split.contracting_intervals
    info["precision_dps"] = dps
    lam = ms.AtomicMeasure.of(torus, {
        torus.zero: Fraction(1, 2),
        point: Fraction(1, 2),
    })
    return lam, info


def _high_precision_contracting_vector(alpha: IntAutomorphism, dps: int):
    """Unit vector spanning (part of) the contracting subspace at high dps.

    Power iteration with the inverse matrix amplifies the smallest-modulus
    eigendirections; the iterate is normalized each round and certified by a
    decreasing image norm under the forward matrix.
    """
    d = alpha.dim
    inv = alpha.inverse().matrix
    with mp.workdps(dps):
        v = [mp.mpf(1) / mp.sqrt(d + j + 1) for j in range(d)]
        for _ in range(max(8 * dps, 400)):
            w = [sum(mp.mpf(inv[i][j]) * v[j] for j in range(d))
                 for i in range(d)]
            norm = mp.sqrt(sum(x * x for x in w))
            v = [x / norm for x in w]
        fwd = [sum(mp.mpf(alpha.matrix[i][j]) * v[j] for j in range(d))
               for i in range(d)]
        contraction = mp.sqrt(sum(x * x for x in fwd))
        if contraction >= 1:
            raise NoContractingDirectionError(
                f"power iteration failed to certify contraction "
                f"(image norm {contraction})"
            )
        return tuple(v)


def _near_small_rational(point, max_denominator: int) -> bool:
    for c in point:
        frac = Fraction(float(c)).limit_denominator(max_denominator)
        if abs(float(c) - float(frac)) < 1e-9:
            return True
    return False


# ---------------------------------------------------------------------------
# cross-checks


@dataclass
class ExperimentReport:
    scenario_id: str
    prediction: DistalityPrediction
    verdict: SCPVerdict
    agreement: bool
    failure: bool
    params: dy.EngineParams
    warnings: list
    trajectories: dict
    expected: Optional[str] = None

    def to_json_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "prediction": {
                "group_kind": self.prediction.group_kind,
                "point_wise_distal": self.prediction.point_wise_distal,
                "reason": self.prediction.reason,
            },
            "verdict": verdict_report(self.verdict),
            "agreement": self.agreement,
            "failure": self.failure,
            "expected": self.expected,
            "parameters": self.params.as_dict(),
            "warnings": list(self.warnings),
        }


def verdict_report(v: SCPVerdict) -> dict:
    if isinstance(v, Dissipating):
        return {"kind": v.kind, "evidence": v.evidence}
    if isinstance(v, ShiftedHaar):
        return {
            "kind": v.kind,
            "shift": ms.element_str(v.shift),
            "subgroup": ms.subgroup_report(v.subgroup),
            "residual": v.residual,
            "normalization_ok": v.normalization_ok,
        }
    if isinstance(v, Violation):
        return {"kind": v.kind, "reason": v.reason, "evidence": v.evidence}
    if isinstance(v, Inconclusive):
        return {"kind": v.kind, "budget": v.budget}
    raise ValueError("unknown verdict")


def cross_check_dichotomy(scenario_id: str, group: GroupSpec, mu,
                          params: dy.EngineParams,
                          expected: Optional[str] = None) -> ExperimentReport:
    """Run the pipeline and compare against the exact spectral prediction.

    Distal prediction tolerates {Dissipating, ShiftedHaar}; Inconclusive is
    never counted as agreement. A non-distal prediction is exercised through
    the scenario's counterexample measure and must produce a Violation.
    """
    prediction = predict_point_wise_distal(group)
    result = classify_measure(group, mu, params)
    verdict = result.verdict
    if isinstance(verdict, Inconclusive):
        agreement = False
        failure = False
    elif prediction.point_wise_distal:
        agreement = isinstance(verdict, (Dissipating, ShiftedHaar))
        failure = not agreement
    else:
        agreement = isinstance(verdict, Violation)
        failure = not agreement
    report = ExperimentReport(
        scenario_id=scenario_id,
        prediction=prediction,
        verdict=verdict,
        agreement=agreement,
        failure=failure,
        params=params,
        warnings=result.warnings,
        trajectories=result.trajectories,
        expected=expected,
    )
    return report


# ---------------------------------------------------------------------------
# quotient / injection stability


def quotient_scenario(group: SemidirectGroup, fm: dy.FiberedMeasure,
                      quotient_sub: TorusSubgroup
                      ) -> tuple[SemidirectGroup, dy.FiberedMeasure]:
    """Project a semidirect-over-torus scenario modulo a finite invariant
    subgroup; the quotient torus is re-coordinatized through the annihilator
    basis, under which the automorphism descends exactly."""
    if not isinstance(group.base, Torus):
        raise ValueError("quotient scenarios need a torus base")
    alpha = group.alpha
    if not quotient_sub.is_invariant_under(alpha):
        raise ValueError("subgroup is not invariant under the automorphism")
    basis = quotient_sub.annihilator
    d = quotient_sub.dim
    if len(basis) != d:
        raise ValueError("quotient subgroup must be finite")
    from .exactalg import mat_inverse, mat_mul, mat_transpose

    b = tuple(tuple(int(x) for x in row) for row in basis)
    # chars downstairs map up through B^T (columns of B^T generate the
    # annihilator), so the dual action in quotient coordinates is
    # (B^T)^-1 A^T B^T
    at = mat_transpose(alpha.matrix)
    bt = mat_transpose(b)
    btinv = mat_inverse(bt)
    dual_down = mat_mul(mat_mul(btinv, at), bt)
    if any(Fraction(x).denominator != 1 for row in dual_down for x in row):
        raise AssertionError("invariant sublattice produced a non-integer action")
    dual_down_int = tuple(tuple(int(x) for x in row) for row in dual_down)
    alpha_down = IntAutomorphism(mat_transpose(dual_down_int))
    group_down = SemidirectGroup(Torus(d), alpha_down)

    k0, base_measure = fm.single_fiber
    projected = ms.pushforward_quotient(_as_torus_measure(base_measure),
                                        quotient_sub)
    fm_down = dy.FiberedMeasure.of(group_down, {k0: projected})
    return group_down, fm_down


def _as_torus_measure(m):
    if isinstance(m, ms.HaarMeasure) and isinstance(m.subgroup, TorusSubgroup):
        return m.as_spectral()
    if isinstance(m, ms.AtomicMeasure) and isinstance(m.group, Torus):
        return ms.spectral_of_atoms(m)
    if isinstance(m, ms.SpectralMeasure):
        return m
    raise ValueError("expected a torus measure")


def project_subgroup(sub: TorusSubgroup, quotient_sub: TorusSubgroup
                     ) -> TorusSubgroup:
    """Image of a torus subgroup in the quotient coordinates.

    A quotient character chi' annihilates the image iff B chi' annihilates
    the subgroup upstairs, i.e. B chi' lies in both annihilators.
    """
    from .exactalg import mat_transpose, preimage_lattice

    basis = quotient_sub.annihilator
    d = quotient_sub.dim
    bt = mat_transpose(basis)
    rows = preimage_lattice(bt, sub.annihilator, d)
    return TorusSubgroup(d, rows)


def quotient_injection_stability(scenario_id: str, group: SemidirectGroup,
                                 fm: dy.FiberedMeasure,
                                 quotient_sub: TorusSubgroup,
                                 params: dy.EngineParams) -> dict:
    """Verdict consistency between a scenario and its finite quotient."""
    up = classify_measure(group, fm, params)
    group_down, fm_down = quotient_scenario(group, fm, quotient_sub)
    down = classify_measure(group_down, fm_down, params)
    consistent = type(up.verdict) is type(down.verdict)
    detail: dict = {
        "scenario_id": scenario_id,
        "upstairs": verdict_report(up.verdict),
        "downstairs": verdict_report(down.verdict),
        "consistent": consistent,
    }
    if isinstance(up.verdict, ShiftedHaar) and isinstance(down.verdict,
                                                          ShiftedHaar):
        expected = project_subgroup(up.verdict.subgroup, quotient_sub)
        detail["image_subgroup_matches"] = expected == down.verdict.subgroup
        detail["consistent"] = consistent and detail["image_subgroup_matches"]
    return detail


def embedding_stability(scenario_id: str, sub_group: FiniteGroup,
                        ambient: FiniteGroup, mapping: dict,
                        mu: ms.AtomicMeasure,
                        params: dy.EngineParams) -> dict:
    """Verdict consistency between a finite group and an ambient embedding."""
    inner = classify_measure(sub_group, mu, params)
    pushed = ms.pushforward_embedding(mu, ambient, mapping)
    outer = classify_measure(ambient, pushed, params)
    consistent = type(inner.verdict) is type(outer.verdict)
    detail = {
        "scenario_id": scenario_id,
        "inner": verdict_report(inner.verdict),
        "outer": verdict_report(outer.verdict),
        "consistent": consistent,
    }
    if isinstance(inner.verdict, ShiftedHaar) and isinstance(outer.verdict,
                                                             ShiftedHaar):
        image = frozenset(mapping[g] for g in inner.verdict.subgroup.members)
        detail["image_subgroup_matches"] = \
            image == outer.verdict.subgroup.members
        detail["consistent"] = consistent and detail["image_subgroup_matches"]
    return detail


# ---------------------------------------------------------------------------
# orbit-collapse demo (distal automorphism whose measure orbit reaches Haar)


def orbit_collapse_demo(mu: ms.SpectralMeasure, alpha: IntAutomorphism,
                        k_max: int, window: int = 8,
                        invariance_tol: float = 1e-9) -> dict:
    """Push an invariant-under-the-second-circle measure through powers of a
    unipotent automorphism and record the exact windowed collapse to full
    Haar, alongside the Distal spectral verdict.

    The input must have coefficients supported on the characters (m, 0);
    the pushforward by alpha^k then vanishes at (m, n) unless n + k m = 0,
    so past k = window the distance to full Haar is exactly zero while the
    automorphism itself is distal.
    """
    torus = mu.group
    if torus.dim != 2:
        raise ValueError("demo runs on the 2-torus")
    for chi in torus.window(window):
        if chi[1] != 0 and abs(mu.coeff(chi)) > invariance_tol:
            raise ValueError(
                f"measure is not invariant under the second circle: "
                f"coefficient at {chi} is {mu.coeff(chi)}"
            )
    verdict = spectral.distality_verdict_poly(alpha.char_polynomial)
    dual = alpha.dual()
    distances = []
    first_zero = None
    for k in range(0, k_max + 1):
        dual_k = dual.power(k)
        worst = 0.0
        for chi in torus.window(window):
            if all(c == 0 for c in chi):
                continue
            value = mu.coeff(tuple(dual_k.apply_vector(chi)))
            worst = max(worst, abs(value))
        distances.append(worst)
        if worst == 0.0 and first_zero is None:
            first_zero = k
    stays_zero = all(d == 0.0 for d in distances[window + 1:])
    return {
        "distal": verdict.is_distal,
        "window": window,
        "k_max": k_max,
        "distances": distances,
        "first_zero_k": first_zero,
        "zero_for_all_k_beyond_window": stays_zero,
        "distal_but_orbit_reaches_haar": verdict.is_distal and stays_zero,
    }
