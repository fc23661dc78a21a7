import math
import random
from fractions import Fraction

import pytest
from mpmath import mp

from scplab import engine as eng
from scplab.dynamics import (
    EngineParams,
    FiberedMeasure,
    Trajectory,
    base_support_candidates,
    concentration_function,
    convolution_powers,
    detect_convergence,
    dissipation_evidence,
    orbit_product,
    separating_marginal,
    shifted_sequence,
    symmetrized_sequence,
)
from scplab.groups import (
    FiniteGroup,
    IntAutomorphism,
    LatticeGroup,
    ProfileSubgroup,
    SemidirectGroup,
    ShiftGroup,
    Torus,
)
from scplab.measures import (
    AtomicMeasure,
    convolve,
    dirac,
    distance,
    haar_of,
    is_idempotent,
    reflect,
    spectral_of_atoms,
    uniform_on,
)

LINE = LatticeGroup(1)
TORUS2 = Torus(2)
CAT = IntAutomorphism(((2, 1), (1, 1)))
SHEAR = IntAutomorphism(((1, 1), (0, 1)))


def binomial_measure():
    return AtomicMeasure.of(LINE, {(0,): Fraction(1, 2),
                                   (1,): Fraction(1, 2)})


class TestConvolutionPowers:
    def test_dirac_constant(self):
        z5 = FiniteGroup.cyclic(5)
        traj = convolution_powers(dirac(z5, 0), EngineParams(n_max=8))
        assert all(s == dirac(z5, 0) for s in traj.snapshots)

    def test_uniform_idempotent(self):
        z2 = FiniteGroup.cyclic(2)
        u = uniform_on(z2, [0, 1])
        traj = convolution_powers(u, EngineParams(n_max=3))
        assert all(s == u for s in traj.snapshots)

    def test_binomial_weights(self):
        traj = convolution_powers(binomial_measure(),
                                  EngineParams(n_max=4, schedule="linear"))
        final = traj.snapshots[-1]
        assert dict(final.atoms) == {
            (0,): Fraction(1, 16), (1,): Fraction(4, 16),
            (2,): Fraction(6, 16), (3,): Fraction(4, 16),
            (4,): Fraction(1, 16),
        }

    def test_doubling_schedule_matches_linear(self):
        z6 = FiniteGroup.cyclic(6)
        mu = AtomicMeasure.of(z6, {1: Fraction(1, 3), 2: Fraction(2, 3)})
        lin = convolution_powers(mu, EngineParams(n_max=128,
                                                  schedule="linear",
                                                  early_stop=False))
        dbl = convolution_powers(mu, EngineParams(n_max=128,
                                                  schedule="doubling"))
        assert dbl.snapshots[-1] == lin.snapshots[-1]
        assert dbl.steps[-1] == lin.steps[-1] == 128


class TestShiftedSequence:
    def test_step_dirac_is_constant_identity(self):
        group = SemidirectGroup(TORUS2, SHEAR)
        fm = FiberedMeasure.single(group, 1, dirac(TORUS2, TORUS2.zero))
        traj = shifted_sequence(fm, (TORUS2.zero, 1), EngineParams(n_max=40))
        final = traj.snapshots[-1]
        assert all(final.coeff(chi) == pytest.approx(1.0)
                   for chi in TORUS2.window(4))

    def test_invariant_haar_factor_is_constant(self):
        from scplab.groups import smith_annihilator

        group = SemidirectGroup(TORUS2, SHEAR)
        sub = smith_annihilator([(2, 0), (0, 2)], 2)
        fm = FiberedMeasure.single(group, 1, haar_of(TORUS2, sub))
        traj = shifted_sequence(fm, (TORUS2.zero, 1), EngineParams(n_max=64))
        for snap in traj.snapshots:
            for chi in TORUS2.window(4):
                expected = 1.0 if sub.contains_char(chi) else 0.0
                assert snap.coeff(chi) == expected

    def test_tail_haar_profile_constant(self):
        sym = FiniteGroup.cyclic(2)
        base = ShiftGroup(sym)
        group = SemidirectGroup(base, 1)
        m_sub = ProfileSubgroup(sym, frozenset({0, 1}), frozenset({0}))
        w = haar_of(base, m_sub).as_profile()
        fm = FiberedMeasure.single(group, 1, w)
        traj = shifted_sequence(fm, (base.identity, 1),
                                EngineParams(n_max=128, early_stop=False))
        assert all(s == w for s in traj.snapshots)
        assert len(traj.steps) == 128

    def test_wrong_fiber_candidate_rejected(self):
        group = SemidirectGroup(TORUS2, SHEAR)
        fm = FiberedMeasure.single(group, 1, dirac(TORUS2, TORUS2.zero))
        with pytest.raises(ValueError):
            shifted_sequence(fm, (TORUS2.zero, 2), EngineParams())

    def test_non_support_candidate_warns(self):
        group = SemidirectGroup(TORUS2, SHEAR)
        lam = AtomicMeasure.of(TORUS2, {
            (Fraction(0), Fraction(0)): Fraction(1, 2),
            (Fraction(0), Fraction(1, 2)): Fraction(1, 2),
        })
        fm = FiberedMeasure.single(group, 1, lam)
        warnings: list = []
        shifted_sequence(fm, ((Fraction(1, 4), Fraction(0)), 1),
                         EngineParams(n_max=16), warn_sink=warnings)
        assert warnings


class TestSymmetrized:
    def test_dirac_gives_identity(self):
        z6 = FiniteGroup.cyclic(6)
        traj = symmetrized_sequence(dirac(z6, 2), EngineParams(n_max=16))
        assert all(s == dirac(z6, 0) for s in traj.snapshots)

    def test_finite_measures_reach_idempotent(self):
        # power-iteration oracle at n = 512 via exact doubling
        rng = random.Random(99)
        zoo = [FiniteGroup.cyclic(6), FiniteGroup.symmetric(3),
               FiniteGroup.dihedral(4)]
        for group in zoo:
            support = rng.sample(range(group.order),
                                 rng.randint(1, min(3, group.order)))
            raw = [rng.randint(1, 5) for _ in support]
            total = sum(raw)
            mu = AtomicMeasure.of(group, {s: Fraction(w, total)
                                          for s, w in zip(support, raw)})
            traj = symmetrized_sequence(mu, EngineParams(n_max=512))
            final = traj.snapshots[-1]
            sub = is_idempotent(final, tol=1e-10)
            assert sub is not None
            # limit is normalized by every support point
            for x in mu.support:
                assert sub.conjugate(x) == sub
            # residual equation: mu rho reflect(mu) = rho at the limit
            rho = haar_of(group, sub).as_atomic()
            lhs = convolve(convolve(mu, rho), reflect(mu))
            assert float(lhs.total_variation(rho)) <= 1e-10

    def test_shift_scenario_limit(self):
        sym = FiniteGroup.cyclic(2)
        base = ShiftGroup(sym)
        group = SemidirectGroup(base, 1)
        m_sub = ProfileSubgroup(sym, frozenset({0, 1}), frozenset({0}))
        w = haar_of(base, m_sub)
        fm = FiberedMeasure.single(group, 1, w)
        traj = symmetrized_sequence(fm, EngineParams(n_max=64))
        assert traj.snapshots[-1] == w.as_profile()


class TestOrbitProduct:
    def test_dirac_identity_constant(self):
        traj = orbit_product(dirac(TORUS2, TORUS2.zero), CAT,
                             EngineParams(n_max=32))
        final = traj.snapshots[-1]
        assert all(final.coeff(chi) == pytest.approx(1.0, abs=1e-12)
                   for chi in TORUS2.window(4))

    def test_invariant_haar_constant(self):
        from scplab.groups import smith_annihilator

        sub = smith_annihilator([(2, 0), (0, 2)], 2)
        traj = orbit_product(haar_of(TORUS2, sub), SHEAR,
                             EngineParams(n_max=32))
        for snap in traj.snapshots:
            for chi in TORUS2.window(4):
                assert snap.coeff(chi) == (1.0 if sub.contains_char(chi)
                                           else 0.0)

    def test_contracting_pair_converges_to_non_idempotent(self):
        lam, _ = eng.construct_counterexample(CAT, atom_scale=0.1)
        params = EngineParams(n_max=200)
        traj = orbit_product(lam, CAT, params)
        call = detect_convergence(traj, params.eps, params.horizon)
        assert call.status == "converged"
        final = traj.snapshots[-1]
        moduli = [abs(final.coeff(chi)) for chi in TORUS2.window(8)
                  if any(chi)]
        assert any(0.01 <= m <= 0.99 for m in moduli)
        assert is_idempotent(final) is None

    def test_geometric_factor_convergence_rate(self):
        # windowed factors approach 1 at the contracting modulus rate
        lam, info = eng.construct_counterexample(CAT, atom_scale=0.1)
        (lo, hi, _), = info["contracting_intervals"]
        rate = hi + 1e-6
        traj = orbit_product(lam, CAT, EngineParams(n_max=80))
        dists = traj.distances[1:]
        start = 10
        for k in range(start, min(len(dists) - 1, 40)):
            if dists[k] > 1e-14 and dists[k - 1] > 1e-13:
                assert dists[k] <= dists[k - 1] * rate * 1.5

    def test_remark_fixed_point_profile(self):
        # lam' = nu * omega_tau(M) with nu lopsided at coordinate 0 is a
        # fixed point of the shift orbit product, yet not Haar
        sym = FiniteGroup.cyclic(2)
        base = ShiftGroup(sym)
        m_sub = ProfileSubgroup(sym, frozenset({0, 1}), frozenset({0}))
        w_tau = haar_of(base, m_sub.shift(1)).as_profile()
        nu = AtomicMeasure.of(base, {
            base.identity: Fraction(3, 4),
            base.element({0: 1}): Fraction(1, 4),
        })
        lam_prime = convolve(nu, w_tau)
        assert is_idempotent(lam_prime) is None
        traj = orbit_product(lam_prime, None,
                             EngineParams(n_max=48, early_stop=False))
        assert all(s == lam_prime for s in traj.snapshots)

    def test_agrees_with_shifted_sequence(self):
        # with mu = lam . delta_z the shifted sequence is the orbit product
        lam = AtomicMeasure.of(TORUS2, {
            (Fraction(0), Fraction(0)): Fraction(1, 2),
            (Fraction(0), Fraction(1, 2)): Fraction(1, 2),
        })
        group = SemidirectGroup(TORUS2, SHEAR)
        fm = FiberedMeasure.single(group, 1, lam)
        params = EngineParams(n_max=48, early_stop=False)
        shifted = shifted_sequence(fm, (TORUS2.zero, 1), params)
        orbit = orbit_product(lam, SHEAR, params)
        # mu^n x^-n is the product of the first n orbit factors, i.e. the
        # orbit-product partial with top index n - 1
        for step, snap in zip(shifted.steps, shifted.snapshots):
            other = orbit.snapshots[orbit.steps.index(step - 1)]
            for chi in TORUS2.window(6):
                assert abs(snap.coeff(chi) - other.coeff(chi)) <= 1e-12


class TestConcentration:
    def test_binomial_central_value(self):
        c = concentration_function(binomial_measure(), [(0,)], 4)
        assert c[3] == Fraction(6, 16)

    def test_dirac_track(self):
        mu = dirac(LINE, (1,))
        c = concentration_function(mu, [(0,)], 6)
        assert all(v == 1 for v in c)

    def test_whole_group_gives_one(self):
        z4 = FiniteGroup.cyclic(4)
        mu = AtomicMeasure.of(z4, {1: Fraction(1, 2), 2: Fraction(1, 2)})
        c = concentration_function(mu, list(z4.elements()), 5)
        assert all(v == 1 for v in c)

    def test_monotone_nonincreasing(self):
        rng = random.Random(7)
        for _ in range(6):
            n_atoms = rng.randint(2, 4)
            pts = rng.sample(range(-2, 5), n_atoms)
            raw = [rng.randint(1, 5) for _ in pts]
            total = sum(raw)
            mu = AtomicMeasure.of(LINE, {(p,): Fraction(w, total)
                                         for p, w in zip(pts, raw)})
            for radius in (0, 1, 3):
                box = [(i,) for i in range(-radius, radius + 1)]
                values = concentration_function(mu, box, 24)
                assert all(b <= a for a, b in zip(values, values[1:]))

    def test_nondegenerate_walks_dissipate(self):
        rng = random.Random(15)
        for _ in range(4):
            n_atoms = rng.randint(2, 4)
            pts = rng.sample(range(0, 5), n_atoms)
            raw = [rng.randint(1, 5) for _ in pts]
            total = sum(raw)
            mu = AtomicMeasure.of(LINE, {(p,): Fraction(w, total)
                                         for p, w in zip(pts, raw)})
            values = concentration_function(mu, [(0,)], 256)
            assert values[-1] < Fraction(1, 10)

    def test_separating_marginal(self):
        plane = LatticeGroup(2)
        mu = AtomicMeasure.of(plane, {(0, 3): Fraction(1, 2),
                                      (0, 4): Fraction(1, 2)})
        marg = separating_marginal(mu)
        assert dict(marg.atoms) == {(3,): Fraction(1, 2),
                                    (4,): Fraction(1, 2)}

    def test_dissipation_evidence_monotone(self):
        out = dissipation_evidence(binomial_measure(), n_max=32)
        for payload in out.values():
            assert payload["monotone"]
            assert payload["last"] <= payload["first"]


class TestDetectConvergence:
    def test_constant_trajectory_converges(self):
        z2 = FiniteGroup.cyclic(2)
        traj = Trajectory(meta={"window": 8})
        for step in range(1, 30):
            traj.append(step, uniform_on(z2, [0, 1]), 8)
        call = detect_convergence(traj, 1e-8, 20)
        assert call.status == "converged"

    def test_drifting_atom_diverges(self):
        traj = Trajectory(meta={"window": 8})
        for step in range(1, 40):
            traj.append(step, dirac(LINE, (step,)), 8)
        call = detect_convergence(traj, 1e-8, 20)
        assert call.status == "diverged"
        assert "escaping_min_norms" in call.evidence

    def test_cat_orbit_product_converges_within_sixty(self):
        lam, _ = eng.construct_counterexample(CAT, atom_scale=0.1)
        params = EngineParams(n_max=60, early_stop=False)
        traj = orbit_product(lam, CAT, params)
        call = detect_convergence(traj, 1e-8, 20)
        assert call.status == "converged"

    def test_undecided_without_certificate(self):
        # slowly oscillating coefficients: neither converged nor escaping
        traj = Trajectory(meta={"window": 2})
        line = Torus(1)
        for step in range(1, 12):
            point = (Fraction(step % 3, 3),)
            traj.append(step, spectral_of_atoms(dirac(line, point)), 2)
        call = detect_convergence(traj, 1e-8, 5)
        assert call.status == "undecided"

    def test_parameter_validation(self):
        traj = Trajectory(meta={})
        with pytest.raises(ValueError):
            detect_convergence(traj, -1.0, 5)
        with pytest.raises(ValueError):
            detect_convergence(traj, 1e-8, 1)


class TestSupportCandidates:
    def test_atomic_candidates(self):
        lam = AtomicMeasure.of(TORUS2, {
            (Fraction(0), Fraction(0)): Fraction(1, 2),
            (Fraction(0), Fraction(1, 2)): Fraction(1, 2),
        })
        group = SemidirectGroup(TORUS2, SHEAR)
        fm = FiberedMeasure.single(group, 1, lam)
        cands = base_support_candidates(fm)
        assert len(cands) == 2
        assert all(k == 1 for _, k in cands)

    def test_haar_candidate_is_representative(self):
        from scplab.groups import smith_annihilator

        sub = smith_annihilator([(2, 0), (0, 2)], 2)
        group = SemidirectGroup(TORUS2, SHEAR)
        fm = FiberedMeasure.single(group, 1, haar_of(TORUS2, sub))
        cands = base_support_candidates(fm)
        assert cands == [(TORUS2.zero, 1)]


def test_high_precision_oracle_matches_engine_limit():
    # independent direct-product oracle; the dual orbit grows like the
    # expanding eigenvalue to the 200th power, so the phase reduction needs
    # well over 90 digits to stay meaningful
    lam, info = eng.construct_counterexample(CAT, atom_scale=0.1)
    params = EngineParams(n_max=200)
    traj = orbit_product(lam, CAT, params)
    final = traj.snapshots[-1]
    atom = [e for e, _ in lam.atoms if e != TORUS2.zero][0]
    with mp.workdps(150):
        at = ((2, 1), (1, 1))  # transpose of the cat matrix (symmetric)
        for chi in [(1, 0), (0, 1), (2, -1), (5, 3)]:
            vec = chi
            prod = mp.mpc(1, 0)
            for _ in range(200):
                phase = 2 * mp.pi * (vec[0] * atom[0] + vec[1] * atom[1])
                prod *= (1 + mp.cos(phase) + 1j * mp.sin(phase)) / 2
                vec = (at[0][0] * vec[0] + at[0][1] * vec[1],
                       at[1][0] * vec[0] + at[1][1] * vec[1])
            got = final.coeff(chi)
            assert abs(got - complex(prod)) <= 1e-6
