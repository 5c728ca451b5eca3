"""Reference-point error dynamics and inertial pose kinematics.

``FrenetState`` tracks the heading error theta, the reference-point arc length
s_r and the signed distance z (positive when the vehicle is on the left of the
path tangent). Integrating these keeps the vehicle-to-path vector orthogonal
to the tangent, so no explicit projection is ever performed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels as K

DEFAULT_EXISTENCE_EPS = 1e-3


class SingularityError(ArithmeticError):
    """The reference point is about to stop existing, or cos(theta) vanishes."""


@dataclass(frozen=True)
class FrenetState:
    theta: float = 0.0
    s_r: float = 0.0
    z: float = 0.0

    def __iter__(self):
        return iter((self.theta, self.s_r, self.z))


@dataclass(frozen=True)
class GlobalPose:
    xi: float = 0.0
    eta: float = 0.0
    theta_o: float = 0.0

    def __iter__(self):
        return iter((self.xi, self.eta, self.theta_o))


def check_existence(kappa_r: float, z: float, eps: float = DEFAULT_EXISTENCE_EPS) -> bool:
    """True iff 1 - kappa_r*z > eps, i.e. the reference point stays well defined."""
    return 1.0 - kappa_r * z > eps


def frenet_derivative(kappa: float, kappa_r: float, v: float, f: FrenetState,
                      eps: float = DEFAULT_EXISTENCE_EPS) -> FrenetState:
    """Time derivative of (theta, s_r, z) for vehicle curvature ``kappa``.

    Raises:
        SingularityError: if 1 - kappa_r*z <= eps.
    """
    if not check_existence(kappa_r, f.z, eps):
        raise SingularityError(
            f"existence condition violated: 1 - kappa_r*z = {1.0 - kappa_r * f.z:.6g}")
    return FrenetState(*K.frenet_rates(kappa, kappa_r, v, f.theta, f.z))


def pose_derivative(v: float, kappa: float, g: GlobalPose) -> GlobalPose:
    return GlobalPose(*K.pose_rates(v, kappa, g.theta_o))


def side_sign(xi: float, eta: float, point_xi: float, point_eta: float, theta_r: float) -> float:
    """sgn(q' . e2') for the vector q' from a path point to (xi, eta)."""
    dot = -(xi - point_xi) * math.sin(theta_r) + (eta - point_eta) * math.cos(theta_r)
    return math.copysign(1.0, dot) if dot != 0 else 0.0
