"""Writing and re-reading run artifacts (CSV tables plus a JSON manifest).

CSV files have a header row, LF line endings and every float written with 17
significant digits, so identical runs give byte-identical files and values
round-trip exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import Grid1D, InterfaceTrajectory, make_params
from .errors import MissingArtifacts
from .solver import EnergyLedger, ExitRecord, SimulationResult, SolverConfig
from .velocity import LinearLaw, SaturatedLaw, TableLaw

THEOREMS = ("max_principle", "monotonicity", "speed_bound", "finite_exit", "l2_decay", "energy_balance")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_csv(path, header, columns) -> None:
    columns = [np.asarray(c) for c in columns]
    n = len(columns[0]) if columns else 0
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(fmt(c[i]) for c in columns))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path) -> dict[str, np.ndarray]:
    path = Path(path)
    if not path.is_file():
        raise MissingArtifacts(f"missing file: {path}")
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if any(len(r) != len(header) for r in rows):
        raise MissingArtifacts(f"{path}: ragged rows (truncated file?)")
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def law_to_dict(law) -> dict:
    if law.kind == "linear":
        return {"kind": "linear", "k": law.k, "theta_T": law.theta_T}
    if law.kind == "saturated":
        return {"kind": "saturated", "v_max": law.v_max, "scale": law.scale, "theta_T": law.theta_T}
    return {"kind": "table", "theta": law.theta.tolist(), "v": law.v.tolist(), "theta_T": law.theta_T}


def law_from_dict(d: dict):
    if d["kind"] == "linear":
        return LinearLaw(d["k"], d["theta_T"])
    if d["kind"] == "saturated":
        return SaturatedLaw(d["v_max"], d["scale"], d["theta_T"])
    return TableLaw(d["theta"], d["v"], d["theta_T"])


def _config_dict(cfg: SolverConfig) -> dict:
    return {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}


def write_trajectory(path, trajectory: InterfaceTrajectory) -> None:
    a = trajectory.arrays()
    write_csv(path, ["t", "u", "theta_at_u", "v", "gate"], [a["t"], a["u"], a["theta_at_u"], a["v"], a["gate"]])


def read_trajectory(path) -> InterfaceTrajectory:
    d = read_csv(path)
    for col in ("t", "u"):
        if col not in d:
            raise MissingArtifacts(f"{path}: missing column {col!r}")
    return InterfaceTrajectory.from_arrays(d["t"], d["u"], d.get("theta_at_u"), d.get("v"), d.get("gate"))


def write_result(result: SimulationResult, out_dir, formats=("csv", "json"), extra: dict | None = None) -> Path:
    """Write trajectory, field snapshots, energy ledger and ``summary.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ledger = result.energy.arrays()
    names = [f"field_{i:04d}.csv" for i in range(len(result.snapshot_times))]
    if "csv" in formats:
        write_trajectory(out / "trajectory.csv", result.trajectory)
        s = result.grid.nodes
        for name, values in zip(names, result.snapshots):
            write_csv(out / name, ["s", "theta_bar"], [s, values])
        write_csv(
            out / "energy.csv",
            ["t", "stored", "flux_cum", "latent_cum", "residual"],
            [ledger["t"], ledger["stored"], ledger["flux_cum"], ledger["latent_cum"], ledger["residual"]],
        )
    if "json" in formats:
        bundle = {
            "trajectory": {k: v.tolist() for k, v in result.trajectory.arrays().items()},
            "energy": {k: v.tolist() for k, v in ledger.items()},
            "snapshot_times": result.snapshot_times.tolist(),
            "snapshots": result.snapshots.tolist(),
        }
        (out / "data.json").write_text(json.dumps(bundle))
    summary = {
        "t_star": None if result.exit is None else result.exit.t_star,
        "exit_side": None if result.exit is None else result.exit.side,
        "params": result.params.as_dict(),
        "theta_c": result.params.theta_c,
        "n_cells": result.grid.n_cells,
        "solver": _config_dict(result.config),
        "law": law_to_dict(result.law),
        "formats": list(formats),
        "n_trajectory": len(result.trajectory),
        "n_energy": len(ledger["t"]),
        "snapshots": [{"file": n, "t": float(t)} for n, t in zip(names, result.snapshot_times)],
        "min_physical_temperature": result.min_physical_temperature,
        "physical_temperature_positive": bool(result.min_physical_temperature > 0),
        "verdicts": {name: None for name in THEOREMS},
    }
    if extra:
        summary.update(extra)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return out


def load_result(out_dir) -> SimulationResult:
    """Rebuild a :class:`SimulationResult` from a run directory."""
    out = Path(out_dir)
    summary_path = out / "summary.json"
    if not summary_path.is_file():
        raise MissingArtifacts(f"missing {summary_path}")
    summary = json.loads(summary_path.read_text())
    params = make_params(summary["params"])
    grid = Grid1D(int(summary["n_cells"]), params.L)
    config = SolverConfig(**summary["solver"])
    law = law_from_dict(summary["law"])

    if "csv" in summary.get("formats", ["csv"]):
        traj = read_trajectory(out / "trajectory.csv")
        ledger_d = read_csv(out / "energy.csv")
        times, snaps = [], []
        for entry in summary["snapshots"]:
            d = read_csv(out / entry["file"])
            if len(d["theta_bar"]) != grid.n_nodes:
                raise MissingArtifacts(f"{entry['file']}: expected {grid.n_nodes} rows")
            times.append(entry["t"])
            snaps.append(d["theta_bar"])
    else:
        path = out / "data.json"
        if not path.is_file():
            raise MissingArtifacts(f"missing {path}")
        bundle = json.loads(path.read_text())
        tr = bundle["trajectory"]
        traj = InterfaceTrajectory.from_arrays(tr["t"], tr["u"], tr["theta_at_u"], tr["v"], tr["gate"])
        ledger_d = {k: np.asarray(v, dtype=float) for k, v in bundle["energy"].items()}
        times, snaps = bundle["snapshot_times"], bundle["snapshots"]

    if len(traj) != summary["n_trajectory"]:
        raise MissingArtifacts(f"trajectory has {len(traj)} rows, manifest says {summary['n_trajectory']}")
    if len(ledger_d["t"]) != summary["n_energy"]:
        raise MissingArtifacts(f"energy ledger has {len(ledger_d['t'])} rows, manifest says {summary['n_energy']}")
    ledger = EnergyLedger()
    for k in ("t", "stored", "flux_cum", "latent_cum", "residual"):
        setattr(ledger, k, list(ledger_d[k]))
    snaps = np.asarray(snaps, dtype=float)
    exit_rec = None if summary["t_star"] is None else ExitRecord(summary["t_star"], summary["exit_side"])
    return SimulationResult(
        grid=grid,
        params=params,
        config=config,
        snapshot_times=np.asarray(times, dtype=float),
        snapshots=snaps,
        trajectory=traj,
        exit=exit_rec,
        energy=ledger,
        initial_field=snaps[0],
        min_physical_temperature=summary.get("min_physical_temperature", float(np.min(snaps) + params.theta_B)),
        law=law,
    )
