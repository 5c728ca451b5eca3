"""Three-state lateral vehicle model with first-order steering resistance.

States are sideslip angle beta, yaw rate psi_dot and steering angle delta.
The input u is a steering *rate* command; the road opposes it with C*v*delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import _kernels as K

# a11 = -2(Kf+Kr)/m is negative for any physical vehicle. With +79.5 the zero
# dynamics (beta, psi_dot with z held at 0) have an eigenvalue near +1.95/s and
# no run can complete; see README, "Model coefficients".
DEFAULT_COEFFICIENTS = {
    "a11": -79.5, "a12": 12.4, "a13": 30.1,
    "a21": 8.48, "a22": -88.4, "a23": 29.4,
}
DEFAULT_SPEED = 3.0
DEFAULT_RESISTANCE = 200.0
DEFAULT_WHEELBASE = 2.55


@dataclass(frozen=True)
class VehicleParams:
    a11: float = DEFAULT_COEFFICIENTS["a11"]
    a12: float = DEFAULT_COEFFICIENTS["a12"]
    a13: float = DEFAULT_COEFFICIENTS["a13"]
    a21: float = DEFAULT_COEFFICIENTS["a21"]
    a22: float = DEFAULT_COEFFICIENTS["a22"]
    a23: float = DEFAULT_COEFFICIENTS["a23"]
    v: float = DEFAULT_SPEED
    C: float = DEFAULT_RESISTANCE
    wheelbase: float = DEFAULT_WHEELBASE  # metadata only

    def __post_init__(self):
        for name in ("a11", "a12", "a13", "a21", "a22", "a23", "v", "C", "wheelbase"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"vehicle parameter {name} must be finite")
        if not self.v > 0:
            raise ValueError(f"speed v must be positive, got {self.v}")
        if self.a13 == 0:
            raise ValueError("a13 must be non-zero (the control law divides by it)")
        if self.C < 0:
            raise ValueError(f"resistance coefficient C must be >= 0, got {self.C}")

    def with_resistance(self, c: float) -> VehicleParams:
        return replace(self, C=c)

    @property
    def kernel_args(self) -> tuple[float, ...]:
        return (self.a11, self.a12, self.a13, self.a21, self.a22, self.a23, self.v)


@dataclass(frozen=True)
class VehicleState:
    beta: float = 0.0
    psi_dot: float = 0.0
    delta: float = 0.0

    def __iter__(self):
        return iter((self.beta, self.psi_dot, self.delta))

    def scaled(self, factor: float) -> VehicleState:
        return VehicleState(self.beta * factor, self.psi_dot * factor, self.delta * factor)

    def is_finite(self) -> bool:
        return all(math.isfinite(x) for x in self)


def plant_derivative(p: VehicleParams, x: VehicleState, u: float) -> VehicleState:
    """Return (beta', psi'', delta') for input ``u``.

    Non-finite inputs propagate to non-finite outputs; the simulation guard
    is what turns them into a Diverged status.
    """
    return VehicleState(*K.plant_rates(
        p.a11, p.a12, p.a13, p.a21, p.a22, p.a23, p.v, p.C,
        x.beta, x.psi_dot, x.delta, u))


def trajectory_curvature(p: VehicleParams, x: VehicleState) -> float:
    """Curvature of the path traced by the centre of mass, (beta' + psi')/v."""
    return K.trajectory_curvature(p.a11, p.a12, p.a13, p.v, x.beta, x.psi_dot, x.delta)
