"""Scenario files: a JSON schema describing a group, a measure, engine
parameters, and an expected outcome tag, plus the runner that turns one
scenario into a report dictionary and CSV trajectory rows.

Schema (all keys of an object in one scenario file):

  id        unique string
  tags      list of strings, matched by the catalog --filter option
  group     {"type": "finite", "construction": "cyclic|dihedral|symmetric|
                 quaternion|product-cyclic|table", ...}
            {"type": "lattice", "dim": d}
            {"type": "torus", "dim": d}
            {"type": "semidirect-torus", "matrix": [[...]]}
            {"type": "semidirect-shift", "symbol": {"construction": ..., ...}}
  measure   {"type": "atomic", "atoms": [[element, "p/q"], ...]}
            {"type": "uniform", "members": [...]}
            {"type": "haar-torus", "annihilator": [[...], ...]}
            {"type": "haar-profile"}            (left tail Haar, right identity)
            {"type": "base-step", "step": k, "base": {...}}
            {"type": "contracting-pair", "atom_scale": t}
  params    overrides for the engine defaults (window, eps, horizon, n_max,
            idempotent_tol, atom_scale)
  expect    "shifted_haar" | "dissipating" |
            "violation:non_idempotent_limit" |
            "violation:limit_not_normalized_by_shift"
  stability optional: {"quotients": [annihilator-rows, ...],
                       "embeddings": [{"ambient": group, "mapping": [...]}]}

Elements: integers index finite groups; lattice points are integer lists;
torus points are lists of "p/q" strings; weights are "p/q" strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import dynamics as dy
from . import engine as eng
from . import measures as ms
from .groups import (
    FiniteGroup,
    IntAutomorphism,
    LatticeGroup,
    ProfileSubgroup,
    SemidirectGroup,
    ShiftGroup,
    Torus,
    TorusSubgroup,
    smith_annihilator,
)


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    id: str
    tags: list
    group: object
    measure: object
    params: dy.EngineParams
    expect: Optional[str]
    stability: dict
    counterexample_info: Optional[dict] = None


def parse_fraction(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(str(s))


def build_finite_group(spec: dict) -> FiniteGroup:
    kind = spec.get("construction", "cyclic")
    if kind == "cyclic":
        return FiniteGroup.cyclic(int(spec["n"]))
    if kind == "dihedral":
        return FiniteGroup.dihedral(int(spec["n"]))
    if kind == "symmetric":
        return FiniteGroup.symmetric(int(spec["n"]))
    if kind == "quaternion":
        return FiniteGroup.quaternion()
    if kind == "product-cyclic":
        factors = [FiniteGroup.cyclic(int(n)) for n in spec["orders"]]
        group = factors[0]
        for f in factors[1:]:
            group = FiniteGroup.direct_product(group, f)
        return group
    if kind == "table":
        return FiniteGroup(tuple(tuple(int(x) for x in row)
                                 for row in spec["table"]))
    raise ScenarioError(f"unknown finite construction {kind!r}")


def build_group(spec: dict):
    gtype = spec["type"]
    if gtype == "finite":
        return build_finite_group(spec)
    if gtype == "lattice":
        return LatticeGroup(int(spec["dim"]))
    if gtype == "torus":
        return Torus(int(spec["dim"]))
    if gtype == "semidirect-torus":
        matrix = tuple(tuple(int(x) for x in row) for row in spec["matrix"])
        return SemidirectGroup(Torus(len(matrix)), IntAutomorphism(matrix))
    if gtype == "semidirect-shift":
        symbol = build_finite_group(spec["symbol"])
        return SemidirectGroup(ShiftGroup(symbol), 1)
    raise ScenarioError(f"unknown group type {gtype!r}")


def _parse_element(group, raw):
    if isinstance(group, FiniteGroup):
        return int(raw)
    if isinstance(group, LatticeGroup):
        return tuple(int(x) for x in raw)
    if isinstance(group, Torus):
        return tuple(parse_fraction(x) % 1 for x in raw)
    raise ScenarioError(f"cannot parse elements of {type(group).__name__}")


def build_measure(spec: dict, group, scenario: dict):
    mtype = spec["type"]
    if mtype == "atomic":
        atoms = {
            _parse_element(group, e): parse_fraction(w)
            for e, w in spec["atoms"]
        }
        return ms.AtomicMeasure.of(group, atoms)
    if mtype == "uniform":
        if not isinstance(group, FiniteGroup):
            raise ScenarioError("uniform measures need a finite group")
        return ms.uniform_on(group, [int(x) for x in spec["members"]])
    if mtype == "haar-torus":
        if not isinstance(group, Torus):
            raise ScenarioError("haar-torus needs a torus")
        sub = smith_annihilator(
            [tuple(int(x) for x in row) for row in spec["annihilator"]],
            group.dim,
        )
        return ms.haar_of(group, sub)
    if mtype == "haar-profile":
        if not isinstance(group, ShiftGroup):
            raise ScenarioError("haar-profile needs a shift space")
        sym = group.symbol_group
        sub = ProfileSubgroup(sym, frozenset(sym.elements()),
                              frozenset({sym.identity}))
        return ms.haar_of(group, sub)
    if mtype == "base-step":
        if not isinstance(group, SemidirectGroup):
            raise ScenarioError("base-step measures need a semidirect group")
        base_measure = build_measure(spec["base"], group.base, scenario)
        return dy.FiberedMeasure.single(group, int(spec.get("step", 1)),
                                        base_measure)
    if mtype == "contracting-pair":
        if not isinstance(group, SemidirectGroup) \
                or not isinstance(group.base, Torus):
            raise ScenarioError("contracting-pair needs a toral semidirect group")
        lam, info = eng.construct_counterexample(
            group.alpha, atom_scale=float(spec.get("atom_scale", 0.1))
        )
        scenario["_counterexample_info"] = info
        return dy.FiberedMeasure.single(group, int(spec.get("step", 1)), lam)
    raise ScenarioError(f"unknown measure type {mtype!r}")


def parse_scenario(data: dict) -> Scenario:
    if "id" not in data:
        raise ScenarioError("scenario is missing an id")
    group = build_group(data["group"])
    params_spec = dict(data.get("params", {}))
    params = dy.EngineParams(**params_spec)
    if params.window < 2 or params.window > 64:
        raise ScenarioError("window must lie in [2, 64]")
    if params.n_max > 10 ** 6:
        raise ScenarioError("n_max must not exceed 10^6")
    holder = dict(data)
    measure = build_measure(data["measure"], group, holder)
    return Scenario(
        id=str(data["id"]),
        tags=list(data.get("tags", [])),
        group=group,
        measure=measure,
        params=params,
        expect=data.get("expect"),
        stability=data.get("stability", {}),
        counterexample_info=holder.get("_counterexample_info"),
    )


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        return parse_scenario(json.load(fh))


def expectation_met(verdict, expect: Optional[str]) -> bool:
    if expect is None:
        return not isinstance(verdict, eng.Inconclusive)
    kind, _, reason = expect.partition(":")
    if verdict.kind != kind:
        return False
    if reason and getattr(verdict, "reason", None) != reason:
        return False
    return True


def trajectory_rows(traj: dy.Trajectory) -> list[list]:
    rows = [["step", "distance", "coeff_re", "coeff_im"]]
    for step, snap, dist in zip(traj.steps, traj.snapshots, traj.distances):
        c = traj.tracked_coefficient(snap)
        rows.append([step, repr(float(dist)), repr(c.real), repr(c.imag)])
    return rows


def run_scenario(scenario: Scenario) -> dict:
    """Execute one scenario: dichotomy cross-check plus declared stability
    companions; returns a JSON-ready report and CSV rows per trajectory."""
    report = eng.cross_check_dichotomy(
        scenario.id, scenario.group, scenario.measure, scenario.params,
        expected=scenario.expect,
    )
    met = expectation_met(report.verdict, scenario.expect)
    payload = report.to_json_dict()
    payload["tags"] = scenario.tags
    payload["expectation_met"] = met
    if scenario.counterexample_info is not None:
        info = dict(scenario.counterexample_info)
        info.pop("contracting_intervals", None)
        payload["counterexample"] = {
            k: (list(v) if isinstance(v, tuple) else v) for k, v in info.items()
        }
    stability_out = []
    for rows in scenario.stability.get("quotients", []):
        sub = smith_annihilator([tuple(int(x) for x in r) for r in rows],
                                scenario.group.base.dim)
        detail = eng.quotient_injection_stability(
            scenario.id, scenario.group, scenario.measure, sub,
            scenario.params,
        )
        stability_out.append({"kind": "quotient", **detail})
    for emb in scenario.stability.get("embeddings", []):
        ambient = build_group(emb["ambient"])
        mapping = {int(k): int(v) for k, v in enumerate(emb["mapping"])}
        detail = eng.embedding_stability(
            scenario.id, scenario.group, ambient, mapping, scenario.measure,
            scenario.params,
        )
        stability_out.append({"kind": "embedding", **detail})
    if stability_out:
        payload["stability"] = stability_out
        payload["stability_consistent"] = all(s["consistent"]
                                              for s in stability_out)
    csvs = {
        "".join(c if c.isalnum() or c in "-_" else "_" for c in name):
        trajectory_rows(traj)
        for name, traj in report.trajectories.items()
    }
    return {"report": payload, "csvs": csvs,
            "ok": met and not report.failure}


def catalog_dir() -> Path:
    """Directory holding the shipped scenario catalog."""
    return Path(__file__).resolve().parent / "catalog"
