"""Feedback-linearizing path-following law and the model error compensator.

The law drives the cross-track error z along z''' + a1 z'' + a2 z' + a3 z = 0.
The compensator runs the same law on a nominal copy of the vehicle (resistance
C_M) and feeds the plant-vs-model mismatch of (z''/cos, z'/cos, z/cos) back
through gains k1..k3.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from . import _kernels as K
from .frenet import FrenetState, SingularityError
from .vehicle_model import VehicleParams, VehicleState

DEFAULT_ALPHA = (400.0, 500.0, 240.0)
GAIN_RATIO = 5.0
DEFAULT_C_NOMINAL = 200.0
THETA_GUARD = math.radians(85.0)
D_GUARD = 1e-3


class Mode(enum.Enum):
    FEEDFORWARD = "feedforward"   # u = u_M (compensator switched off)
    MEC = "mec"                   # u = u_M + u_c
    DIRECT = "direct"             # nominal law evaluated on plant states

    @property
    def code(self) -> int:
        return {Mode.FEEDFORWARD: K.MODE_FEEDFORWARD, Mode.MEC: K.MODE_MEC,
                Mode.DIRECT: K.MODE_DIRECT}[self]


@dataclass(frozen=True)
class ControllerGains:
    alpha1: float = DEFAULT_ALPHA[0]
    alpha2: float = DEFAULT_ALPHA[1]
    alpha3: float = DEFAULT_ALPHA[2]
    k1: float = GAIN_RATIO * DEFAULT_ALPHA[0]
    k2: float = GAIN_RATIO * DEFAULT_ALPHA[1]
    k3: float = GAIN_RATIO * DEFAULT_ALPHA[2]

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "alpha3", "k1", "k2", "k3"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"gain {name} must be finite")
        if not is_hurwitz(self.alpha1, self.alpha2, self.alpha3):
            raise ValueError(
                "s^3 + alpha1 s^2 + alpha2 s + alpha3 is not Hurwitz "
                f"(alpha = {self.alpha1}, {self.alpha2}, {self.alpha3})")

    @classmethod
    def scaled(cls, alpha1: float, alpha2: float, alpha3: float,
               ratio: float = GAIN_RATIO) -> ControllerGains:
        """Compensator gains as a fixed multiple of the Hurwitz coefficients."""
        return cls(alpha1, alpha2, alpha3, ratio * alpha1, ratio * alpha2, ratio * alpha3)

    @property
    def kernel_args(self) -> tuple[float, ...]:
        return (self.alpha1, self.alpha2, self.alpha3, self.k1, self.k2, self.k3)


def is_hurwitz(a1: float, a2: float, a3: float) -> bool:
    """Routh test for a monic cubic."""
    return a1 > 0 and a3 > 0 and a1 * a2 > a3


@dataclass(frozen=True)
class ControllerConfig:
    """Controller settings.

    ``conventional`` is the mode a sweep uses for its uncompensated column.
    With ``shared_curvature`` the nominal model reads the path curvature at
    the plant's reference point instead of at its own.
    """

    gains: ControllerGains = field(default_factory=ControllerGains)
    c_nominal: float = DEFAULT_C_NOMINAL
    mode: Mode = Mode.MEC
    conventional: Mode = Mode.DIRECT
    shared_curvature: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.c_nominal) and self.c_nominal >= 0):
            raise ValueError(f"c_nominal must be a finite value >= 0, got {self.c_nominal}")
        if self.conventional is Mode.MEC:
            raise ValueError("conventional must be feedforward or direct, not mec")


@dataclass(frozen=True)
class ControlSnapshot:
    """Everything the law reads at one instant, for one system (plant or model)."""

    beta: float
    psi_dot: float
    delta: float
    theta: float
    s_r: float
    z: float
    kappa_r: float
    kappa_r_dot: float
    beta_dot: float
    psi_ddot: float


def snapshot(p_nominal: VehicleParams, x: VehicleState, f: FrenetState,
             kappa_r: float, dkappa_ds: float) -> ControlSnapshot:
    """Build a snapshot, deriving beta', psi'' and kappa_r' from the state.

    ``dkappa_ds`` is the path slope at ``f.s_r``; it is converted to a time
    rate with the reference-point speed v*cos(theta)/(1 - kappa_r*z).
    """
    d = 1.0 - kappa_r * f.z
    if d <= 0:
        raise SingularityError(f"1 - kappa_r*z = {d:.6g} is not positive")
    s_dot = p_nominal.v * math.cos(f.theta) / d
    bd, pdd, _ = K.plant_rates(p_nominal.a11, p_nominal.a12, p_nominal.a13,
                               p_nominal.a21, p_nominal.a22, p_nominal.a23,
                               p_nominal.v, p_nominal.C, x.beta, x.psi_dot, x.delta, 0.0)
    return ControlSnapshot(x.beta, x.psi_dot, x.delta, f.theta, f.s_r, f.z,
                           kappa_r, dkappa_ds * s_dot, bd, pdd)


def _guard(s: ControlSnapshot) -> None:
    if abs(s.theta) >= THETA_GUARD:
        raise SingularityError(f"|theta| = {abs(s.theta):.4f} rad reaches the 85 deg guard")
    d = 1.0 - s.kappa_r * s.z
    if d <= D_GUARD:
        raise SingularityError(f"1 - kappa_r*z = {d:.6g} is below {D_GUARD}")


def u_zero(g: ControllerGains, p: VehicleParams, s: ControlSnapshot) -> float:
    """Steering-rate command for a resistance-free steering axis."""
    _guard(s)
    return K.u_zero(p.a11, p.a12, p.a13, p.v, g.alpha1, g.alpha2, g.alpha3,
                    s.beta, s.psi_dot, s.delta, s.theta, s.z, s.kappa_r, s.kappa_r_dot,
                    s.beta_dot, s.psi_ddot)


def u_ideal(g: ControllerGains, p: VehicleParams, s: ControlSnapshot, c: float) -> float:
    """u_zero plus the resistance cancellation c*v*delta."""
    return u_zero(g, p, s) + c * p.v * s.delta


def u_compensation(g: ControllerGains, p: VehicleParams,
                   model: ControlSnapshot, plant: ControlSnapshot) -> float:
    """Compensation input from the model-vs-plant mismatch.

    Each system's bracket uses the curvature stored in its own snapshot.
    All three terms act as -(k/a13)*(plant - model), the same sign pattern the
    nominal law uses on its own state.
    """
    _guard(model)
    _guard(plant)
    return K.u_compensation(p.a11, p.a12, p.a13, p.v, g.k1, g.k2, g.k3,
                            model.beta, model.psi_dot, model.delta, model.theta, model.z,
                            model.kappa_r,
                            plant.beta, plant.psi_dot, plant.delta, plant.theta, plant.z,
                            plant.kappa_r)


def model_loop_input(g: ControllerGains, p_nominal: VehicleParams,
                     model: ControlSnapshot) -> float:
    """Input driving the nominal model; ``p_nominal.C`` is C_M."""
    return u_ideal(g, p_nominal, model, p_nominal.C)


def total_input(u_m: float, u_c: float, mode: Mode, *, u_direct: float | None = None) -> float:
    """Combine the loop inputs according to ``mode``.

    DIRECT ignores u_M and u_c and needs ``u_direct``, the nominal law
    evaluated on plant states (``u_ideal(..., plant_snapshot, C_M)``).
    """
    if mode is Mode.MEC:
        return u_m + u_c
    if mode is Mode.FEEDFORWARD:
        return u_m
    if u_direct is None:
        raise ValueError("DIRECT mode needs u_direct")
    return u_direct
