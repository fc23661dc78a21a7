"""Command-line runner.

Subcommands:
  classify <matrix>                 spectral verdicts for one integer matrix
  scp <scenario-file>               run one scenario, print the JSON report
  catalog <dir> [--filter TAG] [--jobs N] [--out DIR]
                                    run every scenario in a directory
  harmonic <group-file> <measure-file>
                                    exact harmonic-space analysis
  demo-7-2 [--kmax N] [--window W]  orbit-collapse demonstration

Reports are JSON with sorted keys; trajectories land as CSV files next to
the reports. No environment is consulted; randomness only enters through
--seed, which is echoed into reports.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import dynamics as dy
from . import engine as eng
from . import harmonic as hm
from . import measures as ms
from . import scenarios as sc
from . import spectral
from .groups import IntAutomorphism, Torus


def _json_print(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def parse_matrix(text: str) -> tuple[tuple[int, ...], ...]:
    rows = []
    for row in text.strip().split(";"):
        rows.append(tuple(int(x) for x in row.split(",")))
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("matrix must be square, rows separated by ';'")
    return tuple(rows)


def cmd_classify(args) -> int:
    try:
        matrix = parse_matrix(args.matrix)
        auto = IntAutomorphism(matrix)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    poly = auto.char_polynomial
    verdict = spectral.distality_verdict_poly(poly)
    payload = {
        "matrix": [list(r) for r in matrix],
        "charpoly": [int(c) for c in poly.to_int_coeffs()],
        "distal": verdict.is_distal,
        "ergodic": spectral.ergodicity_verdict_poly(poly),
    }
    if not verdict.is_distal:
        payload["witness_factor"] = [
            str(c) for c in verdict.witness_factor.coeffs
        ]
        payload["witness_modulus_interval"] = list(verdict.witness_modulus)
    try:
        split = spectral.contraction_split(matrix)
        payload["contraction"] = {
            "contracting_dim": split.contracting_dim,
            "neutral_dim": split.neutral_dim,
            "expanding_dim": split.expanding_dim,
            "invariance_residual": split.max_invariance_residual,
        }
    except spectral.IndeterminateSplitError as exc:
        payload["contraction"] = {"indeterminate": str(exc)}
    _json_print(payload)
    return 0


def _write_outputs(result: dict, scenario_id: str, out_dir: Path) -> list[str]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, rows in result["csvs"].items():
        path = out_dir / f"{scenario_id}.{name}.csv"
        with open(path, "w") as fh:
            for row in rows:
                fh.write(",".join(str(x) for x in row) + "\n")
        paths.append(str(path))
    result["report"]["evidence_paths"] = sorted(paths)
    report_path = out_dir / f"{scenario_id}.json"
    with open(report_path, "w") as fh:
        json.dump(result["report"], fh, sort_keys=True, indent=2)
        fh.write("\n")
    return paths


def cmd_scp(args) -> int:
    try:
        scenario = sc.load_scenario(args.scenario)
    except (OSError, json.JSONDecodeError, sc.ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    result = sc.run_scenario(scenario)
    if args.out:
        _write_outputs(result, scenario.id, Path(args.out))
    _json_print(result["report"])
    return 0 if result["ok"] else 1


def _run_scenario_file(path: str) -> dict:
    scenario = sc.load_scenario(path)
    result = sc.run_scenario(scenario)
    result["scenario_id"] = scenario.id
    return result


def cmd_catalog(args) -> int:
    directory = Path(args.directory)
    files = sorted(directory.glob("*.json"))
    if args.filter:
        kept = []
        for path in files:
            try:
                data = json.loads(path.read_text())
            except json.JSONDecodeError:
                kept.append(path)  # surfaces as a parse error below
                continue
            hay = [str(data.get("id", ""))] + [str(t) for t in
                                               data.get("tags", [])]
            if any(args.filter in h for h in hay):
                kept.append(path)
        files = kept
    if not files:
        print("warning: no scenarios matched", file=sys.stderr)
        return 0
    out_dir = Path(args.out) if args.out else directory / "reports"
    results: dict[str, dict] = {}
    errors: dict[str, str] = {}
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = {str(p): pool.submit(_run_scenario_file, str(p))
                       for p in files}
            for path, fut in futures.items():
                try:
                    results[path] = fut.result()
                except Exception as exc:  # parse or run failure, keep going
                    errors[path] = str(exc)
    else:
        for p in files:
            try:
                results[str(p)] = _run_scenario_file(str(p))
            except Exception as exc:
                errors[str(p)] = str(exc)
    all_ok = not errors
    for path in sorted(results):
        result = results[path]
        _write_outputs(result, result["scenario_id"], out_dir)
        status = "ok" if result["ok"] else "MISMATCH"
        if not result["ok"]:
            all_ok = False
        print(f"{result['scenario_id']}: {status} "
              f"(verdict {result['report']['verdict']['kind']})")
    for path, message in sorted(errors.items()):
        print(f"{path}: parse/run error: {message}", file=sys.stderr)
    print(f"{len(results)} scenario(s), {len(errors)} error(s), "
          f"reports in {out_dir}")
    return 0 if all_ok else 1


def cmd_harmonic(args) -> int:
    try:
        with open(args.group_file) as fh:
            group = sc.build_group(json.load(fh))
        with open(args.measure_file) as fh:
            mu = sc.build_measure(json.load(fh), group, {})
    except (OSError, json.JSONDecodeError, sc.ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    space = hm.harmonic_space(group, mu)
    payload = {
        "group_order": group.order,
        "dimension": space.dimension,
        "coset_count": space.coset_count,
        "generated_subgroup": sorted(space.generated_subgroup),
        "choquet_deny": hm.is_choquet_deny(group, mu),
        "basis": [[f"{c.numerator}/{c.denominator}" for c in f]
                  for f in space.basis],
    }
    _json_print(payload)
    return 0


def _demo_measure(torus: Torus, which: str) -> ms.SpectralMeasure:
    if which == "even-pair":
        def coeff(chi):
            m, n = chi
            if n != 0:
                return 0j
            return complex(0.5 * (1 + (-1) ** m), 0.0)
    elif which == "haar-line":
        def coeff(chi):
            return complex(1.0 if chi[1] == 0 else 0.0, 0.0)
    else:
        raise ValueError(f"unknown demo measure {which!r}")
    return ms.SpectralMeasure(torus, coeff, provenance="closed-form")


def cmd_demo(args) -> int:
    torus = Torus(2)
    auto = IntAutomorphism(((1, 1), (0, 1)))
    payload = {}
    for which in ("even-pair", "haar-line"):
        mu = _demo_measure(torus, which)
        payload[which] = eng.orbit_collapse_demo(
            mu, auto, k_max=args.kmax, window=args.window
        )
    _json_print(payload)
    ok = all(v["distal_but_orbit_reaches_haar"] for v in payload.values())
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scplab",
        description="convolution dynamics and spectral distality verdicts "
                    "on concrete groups",
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="seed echoed into reports (reserved for "
                             "generator-based scenarios)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="spectral verdicts for one matrix")
    p.add_argument("matrix", help="row-major integer matrix, e.g. '2,1;1,1'")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("scp", help="run a single scenario file")
    p.add_argument("scenario")
    p.add_argument("--out", default=None, help="directory for reports/CSVs")
    p.set_defaults(func=cmd_scp)

    p = sub.add_parser("catalog", help="run every scenario in a directory")
    p.add_argument("directory")
    p.add_argument("--filter", default=None,
                   help="substring matched against scenario ids and tags")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("harmonic", help="exact harmonic-space analysis")
    p.add_argument("group_file")
    p.add_argument("measure_file")
    p.set_defaults(func=cmd_harmonic)

    p = sub.add_parser("demo-7-2",
                       help="distal automorphism whose measure orbit "
                            "collapses to full Haar")
    p.add_argument("--kmax", type=int, default=24)
    p.add_argument("--window", type=int, default=8)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
