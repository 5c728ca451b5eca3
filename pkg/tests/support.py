"""Shared cached runs and geometric helpers for the test-suite."""

from __future__ import annotations

import functools
from dataclasses import replace

import numpy as np

import mecpath as m
from mecpath.path_geometry import reconstruct_arrays

# (label, passed, detail) lines reported at the end of the session
ACCEPTANCE: list[tuple[str, bool, str]] = []


def scenario(path: int = 1, c: float = 200.0, mode: str = "mec", dt: float | None = None,
             **controller) -> m.ScenarioConfig:
    cfg = m.ScenarioConfig(path=m.builtin_path(path)).with_resistance(c).with_mode(m.Mode(mode))
    if controller:
        cfg = replace(cfg, controller=replace(cfg.controller, **controller))
    if dt is not None:
        cfg = replace(cfg, dt=dt)
    return cfg


@functools.lru_cache(maxsize=None)
def cached_run(path: int = 1, c: float = 200.0, mode: str = "mec", dt: float | None = None):
    return m.run(scenario(path, c, mode, dt))


@functools.lru_cache(maxsize=None)
def polyline(path: int, ds: float = 0.01):
    return reconstruct_arrays(m.builtin_path(path), ds)


def polyline_distance(path: int, result, window: float = 0.5, chunk: int = 8192):
    """Distance and side of every sample's (xi, eta) to the reconstructed path.

    Only polyline segments within +-``window`` metres of arc length around the
    sample's s_r are searched; returns (distance, signed side) arrays.
    """
    ds = 0.01
    s, xr, yr, _ = polyline(path, ds)
    n_seg = len(s) - 1
    half = int(round(window / ds))
    offsets = np.arange(-half, half + 1)
    px, py, sr = result["xi"], result["eta"], result["s_r"]
    dist = np.empty(len(px))
    side = np.empty(len(px))
    for lo in range(0, len(px), chunk):
        hi = min(lo + chunk, len(px))
        base = np.clip(np.rint(sr[lo:hi] / ds).astype(int), 0, n_seg - 1)
        idx = np.clip(base[:, None] + offsets[None, :], 0, n_seg - 1)
        ax, ay = xr[idx], yr[idx]
        bx, by = xr[idx + 1], yr[idx + 1]
        qx, qy = px[lo:hi, None], py[lo:hi, None]
        ex, ey = bx - ax, by - ay
        t = np.clip(((qx - ax) * ex + (qy - ay) * ey) / (ex * ex + ey * ey), 0.0, 1.0)
        cx, cy = ax + t * ex, ay + t * ey
        d2 = (qx - cx) ** 2 + (qy - cy) ** 2
        k = np.argmin(d2, axis=1)
        rows = np.arange(hi - lo)
        dist[lo:hi] = np.sqrt(d2[rows, k])
        # left of the local tangent is positive z
        cross = ex[rows, k] * (qy[:, 0] - ay[rows, k]) - ey[rows, k] * (qx[:, 0] - ax[rows, k])
        side[lo:hi] = np.sign(cross)
    return dist, side
