"""Command-line entry point: ``stefan-kinetic run | verify | oracle | laminate | sweep``.

Exit codes: 0 success, 1 a check failed or the laminate spec is
incompatible, 2 configuration or input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, laminate, oracle
from .config import build_run_config, load_flat, load_laminate, parse_value
from .core import Grid1D, InterfaceTrajectory
from .errors import ConfigError, IncompatibleSpec, MissingArtifacts, NoBracket, NumericFailure, StefanError
from .results import load_result, read_trajectory, write_csv, write_result
from .scenarios import get_scenario
from .solver import run as run_solver

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
THREADS_ENV = "STEFAN_KINETIC_THREADS"


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _simulate(flat: dict, base_dir, out_dir, stride=None) -> dict:
    if stride is not None:
        flat = dict(flat, **{"output.stride": int(stride)})
    rc = build_run_config(flat, base_dir)
    res = run_solver(rc.initial_field(), rc.u0, rc.params, rc.law, rc.solver)
    write_result(res, out_dir, rc.output.formats)
    return {"t_star": None if res.exit is None else res.exit.t_star, "exit_side": None if res.exit is None else res.exit.side}


def cmd_run(config, out=None, stride=None) -> int:
    try:
        flat = load_flat(config)
        target = out or flat.get("output.directory") or "out"
        info = _simulate(flat, Path(config).parent, target, stride)
    except ConfigError as err:
        _err(f"{config}: {err}")
        return EXIT_CONFIG
    except NumericFailure as err:
        _err(str(err))
        return EXIT_NUMERIC
    except StefanError as err:
        _err(f"{config}: {type(err).__name__}: {err}")
        return EXIT_CONFIG
    print(f"wrote {target} (t_star={info['t_star']})")
    return EXIT_OK


def cmd_verify(directory) -> int:
    try:
        result = load_result(directory)
    except (MissingArtifacts, ConfigError, ValueError, KeyError) as err:
        _err(f"{directory}: {type(err).__name__}: {err}")
        return EXIT_CONFIG
    reports = analysis.run_all_checks(result)
    _dump_json(Path(directory) / "verify.json", {"reports": [r.to_dict() for r in reports]})
    for r in reports:
        print(f"{r.theorem:16s} {r.verdict:20s} {r.detail}")
    return EXIT_FAIL if any(r.failed for r in reports) else EXIT_OK


def _nan(x):
    return float("nan") if x is None else x


def cmd_oracle(scenario_id, out=None) -> int:
    try:
        scenario = get_scenario(scenario_id)
    except ConfigError as err:
        _err(str(err))
        return EXIT_CONFIG
    out_dir = Path(out or f"oracle-{scenario_id}")
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {"scenario": scenario.name}

    try:
        _, table = oracle.fine_grid_reference(scenario, scenario.levels, check=False)
    except NumericFailure as err:
        _err(str(err))
        return EXIT_NUMERIC
    rows = list(table.rows())
    write_csv(
        out_dir / "convergence.csv",
        ["n_cells", "t_star", "l2_final", "gap", "ratio"],
        [[r[c] if c == "n_cells" else _nan(r[c]) for r in rows] for c in ("n_cells", "t_star", "l2_final", "gap", "ratio")],
    )
    summary["richardson_t_star"] = table.richardson_t_star
    summary["t_star"] = table.t_star

    rc = scenario.config()
    try:
        sol = oracle.solve_neumann(rc.params, rc.u0)
    except NoBracket as err:
        summary["neumann"] = f"unavailable: {err}"
    else:
        ks = scenario.k_values or ((rc.law.k,) if rc.law.kind == "linear" else ())
        horizon = float(scenario.flat.get("scenario.horizon", sol.validity_horizon(rc.params.L)))
        cols = {c: [] for c in ("k", "t", "u_sim", "u_neumann", "gap")}
        sup = []
        for k in ks:
            cmp_ = oracle.neumann_comparison(scenario.run_with_k(k), sol, horizon)
            cols["k"].append(np.full(len(cmp_["t"]), k))
            for c in ("t", "u_sim", "u_neumann", "gap"):
                cols[c].append(cmp_[c])
            sup.append(cmp_["sup_gap"])
        if ks:
            write_csv(out_dir / "neumann.csv", list(cols), [np.concatenate(v) for v in cols.values()])
            write_csv(out_dir / "neumann_gaps.csv", ["k", "sup_gap"], [np.asarray(ks), np.asarray(sup)])
        summary["neumann"] = {"lambda": sol.lam, "horizon": horizon, "k": list(ks), "sup_gap": sup}
    _dump_json(out_dir / "oracle.json", summary)
    print(f"wrote {out_dir}")
    return EXIT_OK


def _random_trials(n: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    worst_roundtrip, mm_failures = 0.0, 0
    traj = None
    for _ in range(n):
        spec, planted = laminate.random_compatible_spec(rng)
        worst_roundtrip = max(worst_roundtrip, float(np.max(np.abs(np.outer(spec.a, spec.n) - planted))))
        if traj is None:
            t = np.linspace(0.0, 1.0, 65)
            traj = InterfaceTrajectory.from_arrays(t, 0.2 + 0.5 * t**2)
        if not laminate.moving_mask_audit(traj, spec).all_pass:
            mm_failures += 1
    return {"trials": n, "seed": seed, "max_roundtrip_error": worst_roundtrip, "mm_failures": mm_failures}


def cmd_laminate(spec_path, trajectory_path, out=None, trials=0, seed=0, length=1.0, alpha=1.0) -> int:
    try:
        spec = load_laminate(spec_path)
        traj = read_trajectory(trajectory_path)
    except IncompatibleSpec as err:
        _err(f"{spec_path}: {err}")
        return EXIT_FAIL
    except (ConfigError, MissingArtifacts, StefanError) as err:
        _err(f"{type(err).__name__}: {err}")
        return EXIT_CONFIG
    out_dir = Path(out or "laminate-out")
    out_dir.mkdir(parents=True, exist_ok=True)

    snaps = laminate.reconstruct_deformation(traj, spec)
    c1 = np.array([s.c1 for s in snaps]).reshape(-1, 3)
    c2 = np.array([s.c2 for s in snaps]).reshape(-1, 3)
    write_csv(
        out_dir / "deformation.csv",
        ["t", "u", "c1_x", "c1_y", "c1_z", "c2_x", "c2_y", "c2_z"],
        [traj.t, traj.u, *c1.T, *c2.T],
    )
    report = laminate.moving_mask_audit(traj, spec, L=length)
    grid = Grid1D(1024, length)
    res = laminate.entropy_source_identity(traj, lambda s: np.cos(np.pi * s / length), grid, alpha)
    write_csv(out_dir / "entropy_residual.csv", ["t", "residual"], [np.asarray(traj.t[:-1]), res])
    payload = report.to_dict()
    payload.update(a=spec.a.tolist(), n=spec.n.tolist(), sigma2=spec.sigma2, degenerate=spec.degenerate)
    if trials:
        payload["random_trials"] = _random_trials(trials, seed)
    _dump_json(out_dir / "mm_report.json", payload)
    print(f"MM1-MM4 {'all pass' if report.all_pass else 'FAILED'}; wrote {out_dir}")
    return EXIT_OK if report.all_pass else EXIT_FAIL


def _sweep_job(args):
    flat, base_dir, out_dir, stride = args
    try:
        return _simulate(flat, base_dir, out_dir, stride)
    except StefanError as err:
        return {"error": f"{type(err).__name__}: {err}"}


def sweep_workers(n_jobs: int) -> int:
    cap = os.environ.get(THREADS_ENV)
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(n_jobs, limit))


def cmd_sweep(config, param, values, out=None, stride=None) -> int:
    try:
        flat = load_flat(config)
        if param not in flat and not param.startswith(("params.", "law.", "solver.", "initial.", "grid.")):
            raise ConfigError(f"cannot sweep over {param!r}")
        parsed = [parse_value(v) for v in values.split(",") if v.strip()]
        build_run_config(dict(flat, **{param: parsed[0]}), Path(config).parent)
    except ConfigError as err:
        _err(str(err))
        return EXIT_CONFIG
    out_dir = Path(out or "sweep")
    jobs = [(dict(flat, **{param: v}), Path(config).parent, out_dir / f"{param}={v}", stride) for v in parsed]
    workers = sweep_workers(len(jobs))
    if workers == 1:
        results = [_sweep_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_job, jobs))
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = [{"value": v, **r} for v, r in zip(parsed, results)]
    _dump_json(out_dir / "sweep.json", {"param": param, "runs": summary})
    write_csv(out_dir / "sweep.csv", ["value", "t_star"], [np.asarray(parsed, dtype=float), np.array([_nan(r.get("t_star")) for r in results])])
    failed = [r for r in results if "error" in r]
    for r in failed:
        _err(r["error"])
    print(f"wrote {out_dir} ({len(results) - len(failed)}/{len(results)} runs ok)")
    return EXIT_NUMERIC if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stefan-kinetic", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate a config file")
    r.add_argument("--config", required=True)
    r.add_argument("--out")
    r.add_argument("--stride", type=int)

    v = sub.add_parser("verify", help="audit a run directory")
    v.add_argument("directory")

    o = sub.add_parser("oracle", help="convergence and Neumann comparison for a catalog scenario")
    o.add_argument("scenario")
    o.add_argument("--out")

    lam = sub.add_parser("laminate", help="laminate geometry along a trajectory")
    lam.add_argument("--config", required=True, help="laminate spec file")
    lam.add_argument("--trajectory", required=True, help="trajectory.csv from a run")
    lam.add_argument("--out")
    lam.add_argument("--trials", type=int, default=0, help="extra randomized compatibility trials")
    lam.add_argument("--seed", type=int, default=0)
    lam.add_argument("--length", type=float, default=1.0)
    lam.add_argument("--alpha", type=float, default=1.0)

    s = sub.add_parser("sweep", help="repeat a run over values of one key")
    s.add_argument("--config", required=True)
    s.add_argument("--param", required=True, help="dotted key, e.g. law.k")
    s.add_argument("--values", required=True, help="comma-separated values")
    s.add_argument("--out")
    s.add_argument("--stride", type=int)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config, args.out, args.stride)
    if args.command == "verify":
        return cmd_verify(args.directory)
    if args.command == "oracle":
        return cmd_oracle(args.scenario, args.out)
    if args.command == "laminate":
        return cmd_laminate(args.config, args.trajectory, args.out, args.trials, args.seed, args.length, args.alpha)
    return cmd_sweep(args.config, args.param, args.values, args.out, args.stride)


if __name__ == "__main__":
    sys.exit(main())
