"""Target paths described by their curvature profile kappa_r(s).

A path is a list of analytic curvature segments tiling [0, L], anchored in the
inertial frame by the pose of its first point. Positions and headings are
recovered by integrating the curvature, so the curvature profile is the only
geometric input the controller ever needs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels as K


class PathDomainError(ValueError):
    """Raised when a path is queried outside its arc-length range."""

    def __init__(self, s: float, length: float):
        super().__init__(f"arc length s={s!r} is outside the path domain [0, {length!r}]")
        self.s = s
        self.length = length


class SegmentKind(enum.Enum):
    ZERO = K.ZERO
    RAISED_COSINE = K.RAISED_COSINE
    SINE = K.SINE
    CONSTANT = K.CONSTANT

    @classmethod
    def parse(cls, name: str) -> SegmentKind:
        key = name.strip().lower().replace("-", "_")
        aliases = {
            "zero": cls.ZERO,
            "raised_cosine": cls.RAISED_COSINE,
            "raisedcosine": cls.RAISED_COSINE,
            "sine": cls.SINE,
            "constant": cls.CONSTANT,
        }
        if key not in aliases:
            raise ValueError(f"unknown segment kind {name!r}; expected one of "
                             "zero, raised_cosine, sine, constant")
        return aliases[key]

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class CurvatureSegment:
    """One analytic piece of the curvature profile.

    ``RAISED_COSINE`` evaluates ``c * (1 - cos(omega*s + phi))``, ``SINE``
    evaluates ``c * sin(omega*s + phi)``, ``CONSTANT`` is ``c`` and ``ZERO``
    ignores all coefficients. ``s`` is the absolute arc length, not the
    offset from ``s_start``.
    """

    s_start: float
    s_end: float
    kind: SegmentKind = SegmentKind.ZERO
    c: float = 0.0
    omega: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        for name in ("s_start", "s_end", "c", "omega", "phi"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"segment field {name} must be finite")
        if not self.s_start < self.s_end:
            raise ValueError(f"segment needs s_start < s_end, got [{self.s_start}, {self.s_end}]")

    def value(self, s: float) -> float:
        return K.segment_value(self.kind.value, self.c, self.omega, self.phi, s)

    def slope(self, s: float) -> float:
        return K.segment_slope(self.kind.value, self.c, self.omega, self.phi, s)


@dataclass(frozen=True)
class PathPoint:
    s: float
    xi_r: float
    eta_r: float
    theta_r: float


@dataclass(frozen=True)
class TargetPath:
    segments: tuple[CurvatureSegment, ...]
    origin: PathPoint = field(default_factory=lambda: PathPoint(0.0, 0.0, -3.0, 0.0))
    name: str = "custom"

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValueError("a path needs at least one segment")
        if segs[0].s_start != 0.0:
            raise ValueError("the first segment must start at s=0")
        for prev, nxt in zip(segs, segs[1:]):
            if nxt.s_start != prev.s_end:
                raise ValueError(
                    f"segments must tile the path: gap or overlap between "
                    f"{prev.s_end} and {nxt.s_start}")
        if self.origin.s != 0.0:
            raise ValueError("the path origin must sit at s=0")

    @property
    def length(self) -> float:
        return self.segments[-1].s_end

    @cached_property
    def arrays(self) -> tuple[np.ndarray, ...]:
        """Column arrays (starts, kinds, c, omega, phi) for the compiled kernels."""
        return (
            np.array([g.s_start for g in self.segments], dtype=np.float64),
            np.array([g.kind.value for g in self.segments], dtype=np.int64),
            np.array([g.c for g in self.segments], dtype=np.float64),
            np.array([g.omega for g in self.segments], dtype=np.float64),
            np.array([g.phi for g in self.segments], dtype=np.float64),
        )

    def _check(self, s: float) -> None:
        if not (0.0 <= s <= self.length):
            raise PathDomainError(s, self.length)

    def segment_at(self, s: float) -> CurvatureSegment:
        self._check(s)
        return self.segments[K.segment_index(self.arrays[0], float(s))]

    def to_records(self) -> list[dict]:
        return [
            {"s_start": g.s_start, "s_end": g.s_end, "kind": g.kind.label,
             "c": g.c, "omega": g.omega, "phi": g.phi}
            for g in self.segments
        ]


def curvature(path: TargetPath, s: float) -> float:
    """Path curvature at arc length ``s``; the right segment wins at a breakpoint."""
    return path.segment_at(s).value(float(s))


def curvature_rate(path: TargetPath, s: float) -> float:
    """Right-derivative d(kappa_r)/ds. Jumps in kappa_r itself contribute nothing."""
    return path.segment_at(s).slope(float(s))


def _heading_rate(path: TargetPath, s: np.ndarray) -> np.ndarray:
    starts, kinds, cs, omegas, phis = path.arrays
    idx = np.searchsorted(starts, s, side="right") - 1
    idx = np.clip(idx, 0, len(starts) - 1)
    kind, c, w, p = kinds[idx], cs[idx], omegas[idx], phis[idx]
    arg = w * s + p
    return np.select(
        [kind == K.RAISED_COSINE, kind == K.SINE, kind == K.CONSTANT],
        [c * (1.0 - np.cos(arg)), c * np.sin(arg), c],
        default=0.0,
    )


def reconstruct(path: TargetPath, ds: float = 0.01) -> list[PathPoint]:
    """Sample the path at s = 0, ds, 2ds, ..., L in the inertial frame."""
    s, xi, eta, theta = reconstruct_arrays(path, ds)
    return [PathPoint(*row) for row in zip(s.tolist(), xi.tolist(), eta.tolist(), theta.tolist())]


def reconstruct_arrays(path: TargetPath, ds: float = 0.01):
    """Array form of :func:`reconstruct`: returns (s, xi_r, eta_r, theta_r).

    Heading and position are integrated together with classical RK4 in arc
    length. A final shorter step lands exactly on ``L`` when ``ds`` does not
    divide it.
    """
    if not ds > 0:
        raise ValueError(f"ds must be positive, got {ds!r}")
    length = path.length
    n = int(math.floor(length / ds + 1e-9))
    s = np.arange(n + 1, dtype=np.float64) * ds
    if length - s[-1] > 1e-9 * max(1.0, length):
        s = np.append(s, length)
    else:
        s[-1] = min(s[-1], length)
    h = np.diff(s)

    # RK4 on (theta, xi, eta) with d/ds = (kappa, cos theta, sin theta); the
    # curvature does not depend on the state, so the stages can be vectorised
    # over the kappa samples while positions are accumulated sequentially.
    k_left = _heading_rate(path, s[:-1])
    k_mid = _heading_rate(path, s[:-1] + 0.5 * h)
    # a segment's right end uses its own formula, not the next segment's
    k_right = _heading_rate(path, np.nextafter(s[1:], -np.inf))
    k_right[-1] = _heading_rate(path, np.array([length]))[0]

    theta = np.empty_like(s)
    xi = np.empty_like(s)
    eta = np.empty_like(s)
    theta[0], xi[0], eta[0] = path.origin.theta_r, path.origin.xi_r, path.origin.eta_r
    d_theta = h / 6.0 * (k_left + 4.0 * k_mid + k_right)
    theta[1:] = theta[0] + np.cumsum(d_theta)
    th0 = theta[:-1]
    th_mid = th0 + 0.5 * h * k_left
    th_mid2 = th0 + 0.5 * h * k_mid
    th_end = th0 + h * k_mid
    # stages 2 and 3 share the same abscissa but see different heading predictions
    dxi = h / 6.0 * (np.cos(th0) + 2.0 * np.cos(th_mid) + 2.0 * np.cos(th_mid2) + np.cos(th_end))
    deta = h / 6.0 * (np.sin(th0) + 2.0 * np.sin(th_mid) + 2.0 * np.sin(th_mid2) + np.sin(th_end))
    xi[1:] = xi[0] + np.cumsum(dxi)
    eta[1:] = eta[0] + np.cumsum(deta)
    return s, xi, eta, theta


class BuiltinPath(enum.Enum):
    PATH1 = 1
    PATH2 = 2


def builtin_path(which: BuiltinPath | int | str) -> TargetPath:
    """The two evaluation paths: a square-like loop (1) and a meander (2)."""
    if isinstance(which, str):
        which = which.strip().lower().removeprefix("path")
        if not which.isdigit():
            raise ValueError(f"unknown builtin path {which!r}")
        which = int(which)
    try:
        which = BuiltinPath(which)
    except ValueError:
        raise ValueError(f"unknown builtin path {which!r}; expected 1 or 2") from None
    if which is BuiltinPath.PATH1:
        segs = (
            CurvatureSegment(0.0, 12.0),
            CurvatureSegment(12.0, 150.0, SegmentKind.RAISED_COSINE, 0.037, 0.15, -1.8),
        )
    else:
        segs = (
            CurvatureSegment(0.0, 10.0),
            CurvatureSegment(10.0, 207.0, SegmentKind.SINE, 0.1, 0.06, -0.2),
        )
    return TargetPath(segs, name=f"path{which.value}")
