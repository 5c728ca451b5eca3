"""Writers for time series, summaries, sweep tables and plots.

Plots are a view of the numbers already computed; nothing here feeds back
into a simulation.
"""

from __future__ import annotations

import io
import json
import math
from pathlib import Path

import numpy as np

from . import _kernels as K
from .controller import Mode
from .path_geometry import TargetPath, reconstruct_arrays
from .scenario import Scenario, to_dict
from .simulation import DIVERGED, Metric, RunResult, SweepResult

TIMESERIES_COLUMNS = (
    "t", "s_r", "z", "theta", "beta", "psi_dot", "delta", "z_M", "theta_M",
    "u", "u_M", "u_c", "kappa", "kappa_r", "xi", "eta", "theta_o",
)
PATH_COLUMNS = ("s", "xi_r", "eta_r", "theta_r", "kappa_r")
SWEEP_COLUMNS = ("C", "C_over_CM", "conventional_max_error", "proposed_max_error")

CONVENTIONAL_COLOR = "tab:red"
PROPOSED_COLOR = "tab:blue"


def _csv_block(header: tuple[str, ...], data: np.ndarray) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    if data.size:
        np.savetxt(buf, data, fmt="%.16e", delimiter=",", newline="\n")
    return buf.getvalue()


def timeseries_csv(result: RunResult, decimate: int = 1) -> str:
    idx = [K.COLUMNS.index(c) for c in TIMESERIES_COLUMNS]
    rows = result.samples[::decimate, idx]
    return _csv_block(TIMESERIES_COLUMNS, rows)


def _metric_json(m: Metric):
    return m if m is None or isinstance(m, str) else float(m)


def summary(result: RunResult, scenario: Scenario) -> dict:
    return {
        "status": result.status.value,
        "max_error": _metric_json(result.max_error),
        "max_error_raw": result.max_error_raw,
        "final_s_r": result.final_s_r,
        "samples": len(result),
        "wall_clock_s": result.wall_time,
        "config": to_dict(scenario),
    }


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_run(result: RunResult, scenario: Scenario, out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "timeseries.csv", out / "summary.json"]
    _write(written[0], timeseries_csv(result, scenario.output.decimate))
    _write(written[1], json.dumps(summary(result, scenario), indent=2) + "\n")
    if scenario.output.svg:
        written += plot_run(result, out)
    return written


def _fmt_metric(m: Metric) -> str:
    if m is None:
        return "NA"
    return DIVERGED if isinstance(m, str) else repr(float(m))


def sweep_csv(res: SweepResult) -> str:
    lines = [",".join(SWEEP_COLUMNS)]
    for r in res.rows:
        lines.append(",".join((repr(r.C), repr(r.ratio), _fmt_metric(r.conventional),
                               _fmt_metric(r.proposed))))
    return "\n".join(lines) + "\n"


def _md_metric(m: Metric) -> str:
    if m is None:
        return "n/a"
    if isinstance(m, str):
        return m
    return f"{m:.3g}" if m >= 0.01 else f"{m:.2g}"


def sweep_markdown(res: SweepResult, title: str = "Maximum following error under parameter mismatch") -> str:
    conv = {Mode.FEEDFORWARD: "feedforward", Mode.DIRECT: "direct"}.get(res.conventional_mode, "")
    lines = [
        f"### {title}",
        "",
        f"| C | C/C_M | Conventional ({conv}) [m] | Proposed (MEC) [m] |",
        "|---:|---:|---:|---:|",
    ]
    for r in res.rows:
        lines.append(f"| {r.C:g} | {r.ratio:.2f} | {_md_metric(r.conventional)} | "
                     f"{_md_metric(r.proposed)} |")
    return "\n".join(lines) + "\n"


def write_sweep(res: SweepResult, out: Path, title: str | None = None, svg: bool = False) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "sweep.csv", out / "sweep.md"]
    _write(written[0], sweep_csv(res))
    _write(written[1], sweep_markdown(res, title) if title else sweep_markdown(res))
    if svg:
        written.append(plot_sweep(res, out / "sweep.svg"))
    return written


def path_table(path: TargetPath, ds: float) -> np.ndarray:
    s, xi, eta, theta = reconstruct_arrays(path, ds)
    starts, kinds, cs, omegas, phis = path.arrays
    kappa = np.array([K.path_curvature(starts, kinds, cs, omegas, phis, v) for v in s])
    return np.column_stack((s, xi, eta, theta, kappa))


def write_path(path: TargetPath, ds: float, out: Path, svg: bool = False) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    table = path_table(path, ds)
    written = [out / "path.csv"]
    _write(written[0], _csv_block(PATH_COLUMNS, table))
    if svg:
        fig, ax = _figure()
        ax.plot(table[:, 1], table[:, 2], "k--", lw=1.2, label=f"target ({path.name})")
        _finish_xy(ax)
        written.append(_save(fig, out / "path.svg"))
    return written


# plotting -------------------------------------------------------------------

def _figure():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.hashsalt"] = "mecpath"  # stable element ids
    return plt.subplots(figsize=(6.4, 4.8))


def _save(fig, path: Path) -> Path:
    import matplotlib.pyplot as plt
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def _finish_xy(ax) -> None:
    ax.set_xlabel("xi [m]")
    ax.set_ylabel("eta [m]")
    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(True, lw=0.3)
    ax.legend(loc="best", fontsize=8)


def _mode_color(mode: Mode) -> str:
    return PROPOSED_COLOR if mode is Mode.MEC else CONVENTIONAL_COLOR


def plot_run(result: RunResult, out: Path) -> list[Path]:
    cfg = result.config
    mode = cfg.controller.mode
    color = _mode_color(mode)
    s, xi, eta, _ = reconstruct_arrays(cfg.path, 0.05)

    fig, ax = _figure()
    ax.plot(xi, eta, "k--", lw=1.0, label="target path")
    ax.plot(result["xi"], result["eta"], "-", color=color, lw=1.2, label=f"vehicle ({mode.value})")
    _finish_xy(ax)
    traj = _save(fig, out / "trajectory.svg")

    fig, ax = _figure()
    ax.plot(result["s_r"], np.abs(result["z"]), "-", color=color, lw=1.2, label=mode.value)
    ax.axvline(cfg.skip_arclength, color="0.6", lw=0.8, ls=":", label="metric onset")
    ax.set_xlabel("s_r [m]")
    ax.set_ylabel("|z| [m]")
    ax.grid(True, lw=0.3)
    ax.legend(loc="best", fontsize=8)
    err = _save(fig, out / "error.svg")
    return [traj, err]


def plot_sweep(res: SweepResult, path: Path) -> Path:
    fig, ax = _figure()
    for attr, color, label in (("conventional", CONVENTIONAL_COLOR, "conventional"),
                               ("proposed", PROPOSED_COLOR, "proposed (MEC)")):
        pts = [(r.ratio, getattr(r, attr)) for r in res.rows if is_number(getattr(r, attr))]
        if pts:
            x, y = zip(*pts)
            ax.plot(x, y, "o-", color=color, label=label)
    ax.set_xlabel("C / C_M")
    ax.set_ylabel("max following error [m]")
    ax.set_yscale("log")
    ax.grid(True, which="both", lw=0.3)
    ax.legend(loc="best", fontsize=8)
    return _save(fig, path)


def is_number(m: Metric) -> bool:
    return isinstance(m, float) and math.isfinite(m)
