"""Fixed-step simulation of the plant, the nominal model and their Frenet errors.

The coupled state has 15 components: plant (beta, psi_dot, delta), plant
Frenet (theta, s_r, z), plant pose (xi, eta, theta_o), model (beta, psi_dot,
delta) and model Frenet (theta, s_r, z). Inputs are recomputed at every RK4
stage, so the controller behaves as a continuous-time law.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Union

import numpy as np

from . import _kernels as K
from .controller import ControllerConfig, Mode
from .frenet import FrenetState, GlobalPose, SingularityError
from .path_geometry import TargetPath, builtin_path, curvature
from .vehicle_model import VehicleParams, VehicleState

DEFAULT_DT = 5e-4
DEFAULT_SKIP = 15.0
HORIZON_FACTOR = 2.0  # t_max = HORIZON_FACTOR * L / v unless set
DIVERGED = "Diverged"

Metric = Union[float, str, None]  # None: the run never reached the metric onset


class Status(enum.Enum):
    COMPLETED = "Completed"
    DIVERGED = "Diverged"
    SINGULAR = "Singular"
    TIMED_OUT = "TimedOut"

    @property
    def failed(self) -> bool:
        return self in (Status.DIVERGED, Status.SINGULAR)


_STATUS_FROM_CODE = {
    K.STATUS_COMPLETED: Status.COMPLETED,
    K.STATUS_DIVERGED: Status.DIVERGED,
    K.STATUS_SINGULAR: Status.SINGULAR,
    K.STATUS_TIMED_OUT: Status.TIMED_OUT,
}


@dataclass(frozen=True)
class Guards:
    z_max: float = 50.0
    d_min: float = 1e-3
    theta_max: float = math.radians(85.0)

    def __post_init__(self):
        if not (self.z_max > 0 and self.d_min > 0 and 0 < self.theta_max < math.pi / 2):
            raise ValueError("guards need z_max > 0, d_min > 0 and 0 < theta_max < pi/2")


@dataclass(frozen=True)
class InitialState:
    beta: float = 0.0
    psi_dot: float = 0.0
    delta: float = 0.0
    theta: float = 0.0
    z: float = 3.0
    s_r: float = 0.0
    xi: float = 0.0
    eta: float = 0.0
    theta_o: float = 0.0

    def vector(self) -> np.ndarray:
        x = np.zeros(K.N_STATE)
        x[K.BETA], x[K.PSI_DOT], x[K.DELTA] = self.beta, self.psi_dot, self.delta
        x[K.THETA], x[K.S_R], x[K.Z] = self.theta, self.s_r, self.z
        x[K.XI], x[K.ETA], x[K.THETA_O] = self.xi, self.eta, self.theta_o
        # the nominal model starts from the plant's initial condition
        x[K.BETA_M], x[K.PSI_DOT_M], x[K.DELTA_M] = self.beta, self.psi_dot, self.delta
        x[K.THETA_M], x[K.S_R_M], x[K.Z_M] = self.theta, self.s_r, self.z
        return x


@dataclass(frozen=True)
class ScenarioConfig:
    path: TargetPath = field(default_factory=lambda: builtin_path(1))
    plant: VehicleParams = field(default_factory=VehicleParams)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    initial: InitialState = field(default_factory=InitialState)
    dt: float = DEFAULT_DT
    t_max: float | None = None
    guards: Guards = field(default_factory=Guards)
    skip_arclength: float = DEFAULT_SKIP

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if self.t_max is not None and not (math.isfinite(self.t_max) and self.t_max > 0):
            raise ValueError(f"t_max must be positive, got {self.t_max!r}")
        if not (math.isfinite(self.skip_arclength) and self.skip_arclength >= 0):
            raise ValueError(f"skip_arclength must be >= 0, got {self.skip_arclength!r}")
        ini = self.initial
        for name, value in vars(ini).items():
            if not math.isfinite(value):
                raise ValueError(f"initial.{name} must be finite")
        if not abs(ini.z) < self.guards.z_max:
            raise ValueError(f"guards.z_max={self.guards.z_max} must exceed |initial z|={abs(ini.z)}")
        if not 0 <= ini.s_r < self.path.length:
            raise ValueError(f"initial s_r={ini.s_r} must lie in [0, {self.path.length})")
        if not abs(ini.theta) < self.guards.theta_max:
            raise ValueError("initial |theta| must be below guards.theta_max")
        if not 1.0 - curvature(self.path, ini.s_r) * ini.z > self.guards.d_min:
            raise ValueError("initial state violates 1 - kappa_r*z > d_min")

    @property
    def horizon(self) -> float:
        if self.t_max is not None:
            return self.t_max
        return HORIZON_FACTOR * self.path.length / self.plant.v

    @property
    def nominal(self) -> VehicleParams:
        return self.plant.with_resistance(self.controller.c_nominal)

    def with_mode(self, mode: Mode) -> ScenarioConfig:
        return replace(self, controller=replace(self.controller, mode=mode))

    def with_resistance(self, c: float) -> ScenarioConfig:
        return replace(self, plant=self.plant.with_resistance(c))


@dataclass(frozen=True)
class SimSample:
    t: float
    plant: VehicleState
    frenet: FrenetState
    pose: GlobalPose
    model: VehicleState
    model_frenet: FrenetState
    u: float
    u_M: float
    u_c: float
    kappa: float
    kappa_r: float


@dataclass
class RunResult:
    status: Status
    samples: np.ndarray  # shape (n, len(COLUMNS))
    max_error: Metric
    max_error_raw: float
    config: ScenarioConfig
    wall_time: float = 0.0

    def __len__(self) -> int:
        return self.samples.shape[0]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.samples[:, K.COLUMNS.index(name)]

    @property
    def final_s_r(self) -> float:
        return float(self["s_r"][-1]) if len(self) else self.config.initial.s_r

    def sample(self, i: int) -> SimSample:
        r = dict(zip(K.COLUMNS, self.samples[i].tolist()))
        return SimSample(
            t=r["t"],
            plant=VehicleState(r["beta"], r["psi_dot"], r["delta"]),
            frenet=FrenetState(r["theta"], r["s_r"], r["z"]),
            pose=GlobalPose(r["xi"], r["eta"], r["theta_o"]),
            model=VehicleState(r["beta_M"], r["psi_dot_M"], r["delta_M"]),
            model_frenet=FrenetState(r["theta_M"], r["s_r_M"], r["z_M"]),
            u=r["u"], u_M=r["u_M"], u_c=r["u_c"], kappa=r["kappa"], kappa_r=r["kappa_r"],
        )

    def iter_samples(self) -> Iterable[SimSample]:
        return (self.sample(i) for i in range(len(self)))


@dataclass(frozen=True)
class _Context:
    starts: np.ndarray
    kinds: np.ndarray
    cs: np.ndarray
    omegas: np.ndarray
    phis: np.ndarray
    vp: np.ndarray
    cp: np.ndarray
    gains: np.ndarray
    mode: int
    shared: bool
    guards: Guards


def context(cfg: ScenarioConfig) -> _Context:
    """Flatten a scenario into the arrays the compiled kernels take."""
    ctl = cfg.controller
    return _Context(
        *cfg.path.arrays,
        vp=np.array(cfg.plant.kernel_args, dtype=np.float64),
        cp=np.array([cfg.plant.C, ctl.c_nominal], dtype=np.float64),
        gains=np.array(ctl.gains.kernel_args, dtype=np.float64),
        mode=ctl.mode.code,
        shared=ctl.shared_curvature,
        guards=cfg.guards,
    )


def step(ctx: _Context, x: np.ndarray, dt: float) -> np.ndarray:
    """Advance the 15-component state by one RK4 step.

    Raises:
        SingularityError: a guard tripped at one of the four stages.
    """
    out = np.array(x, dtype=np.float64, copy=True)
    scratch = [np.empty(K.N_STATE) for _ in range(5)]
    g = ctx.guards
    code = K.rk4_step(out, dt, *scratch, ctx.starts, ctx.kinds, ctx.cs, ctx.omegas, ctx.phis,
                      ctx.vp, ctx.cp, ctx.gains, ctx.mode, ctx.shared, g.theta_max, g.d_min)
    if code == K.GUARD_HEADING:
        raise SingularityError("|theta| reached theta_max during the step")
    if code == K.GUARD_EXISTENCE:
        raise SingularityError("1 - kappa_r*z fell to d_min during the step")
    return out


def max_following_error(result: RunResult, skip_arclength: float | None = None) -> Metric:
    """Largest |z| once the plant reference point has passed ``skip_arclength``.

    Failed runs (Diverged or Singular) yield the ``DIVERGED`` token instead of
    a number.
    """
    if result.status.failed:
        return DIVERGED
    skip = result.config.skip_arclength if skip_arclength is None else skip_arclength
    mask = result["s_r"] >= skip
    if not mask.any():
        raise ValueError(f"no sample reaches s_r >= {skip}; use a smaller skip_arclength")
    return float(np.max(np.abs(result["z"][mask])))


def run(cfg: ScenarioConfig) -> RunResult:
    ctx = context(cfg)
    horizon = cfg.horizon
    rows = int(math.ceil(horizon / cfg.dt)) + 2
    samples = np.empty((rows, K.N_COLUMNS))
    g = cfg.guards
    t0 = time.perf_counter()
    code, n = K.integrate(cfg.initial.vector(), ctx.starts, ctx.kinds, ctx.cs, ctx.omegas,
                          ctx.phis, cfg.path.length, ctx.vp, ctx.cp, ctx.gains, ctx.mode,
                          ctx.shared, cfg.dt, horizon, g.z_max, g.theta_max, g.d_min, samples)
    wall = time.perf_counter() - t0
    samples = samples[:n].copy()
    status = _STATUS_FROM_CODE[code]
    raw = float(np.max(np.abs(samples[:, K.COLUMNS.index("z")]))) if n else abs(cfg.initial.z)
    result = RunResult(status, samples, DIVERGED, raw, cfg, wall)
    if not status.failed:
        try:
            result.max_error = max_following_error(result)
        except ValueError:
            # stopped before the metric onset (a short t_max); no metric exists
            result.max_error = None
    return result


@dataclass(frozen=True)
class SweepRow:
    C: float
    ratio: float
    conventional: Metric
    proposed: Metric
    conventional_status: Status
    proposed_status: Status
    note: str = ""


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    conventional_mode: Mode

    def row(self, c: float) -> SweepRow:
        for r in self.rows:
            if r.C == c:
                return r
        raise KeyError(c)


def _metric(cfg: ScenarioConfig) -> tuple[Metric, Status, str]:
    try:
        res = run(cfg)
    except (ValueError, ArithmeticError) as exc:
        return DIVERGED, Status.SINGULAR, str(exc)
    return res.max_error, res.status, ""


def sweep(base: ScenarioConfig, c_values: Iterable[float],
          conventional: Mode | None = None) -> SweepResult:
    """Run the uncompensated and the compensated controller for every plant C.

    The uncompensated mode defaults to ``base.controller.conventional``.
    Errors in one row are stored in that row and never stop the sweep.
    """
    values = sorted({float(c) for c in c_values})
    if not values:
        raise ValueError("c_values must not be empty")
    conv = conventional or base.controller.conventional
    rows = []
    for c in values:
        try:
            cfg = base.with_resistance(c)
        except ValueError as exc:
            rows.append(SweepRow(c, c / base.controller.c_nominal if base.controller.c_nominal else math.inf,
                                 DIVERGED, DIVERGED, Status.SINGULAR, Status.SINGULAR, str(exc)))
            continue
        m_conv, s_conv, n1 = _metric(cfg.with_mode(conv))
        m_prop, s_prop, n2 = _metric(cfg.with_mode(Mode.MEC))
        ratio = c / base.controller.c_nominal if base.controller.c_nominal else math.inf
        rows.append(SweepRow(c, ratio, m_conv, m_prop, s_conv, s_prop, "; ".join(filter(None, (n1, n2)))))
    return SweepResult(tuple(rows), conv)
