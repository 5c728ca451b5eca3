"""Compiled scalar kernels shared by the public API and the integrator.

Every formula lives here exactly once. The dataclass-level functions in the
other modules unpack their arguments and call these; the RK4 loop calls them
directly so a run never leaves compiled code.
"""

import math

import numpy as np
from numba import njit

ZERO = 0
RAISED_COSINE = 1
SINE = 2
CONSTANT = 3

MODE_FEEDFORWARD = 0
MODE_MEC = 1
MODE_DIRECT = 2

STATUS_COMPLETED = 0
STATUS_DIVERGED = 1
STATUS_SINGULAR = 2
STATUS_TIMED_OUT = 3

# Coupled state layout.
BETA, PSI_DOT, DELTA, THETA, S_R, Z, XI, ETA, THETA_O = range(9)
BETA_M, PSI_DOT_M, DELTA_M, THETA_M, S_R_M, Z_M = range(9, 15)
N_STATE = 15

# Recorded sample layout.
COLUMNS = (
    "t", "s_r", "z", "theta", "beta", "psi_dot", "delta",
    "z_M", "theta_M", "u", "u_M", "u_c", "kappa", "kappa_r",
    "xi", "eta", "theta_o", "beta_M", "psi_dot_M", "delta_M", "s_r_M",
)
N_COLUMNS = len(COLUMNS)


@njit(cache=True)
def segment_index(starts, s):
    # right-continuous: a breakpoint belongs to the segment that starts there
    idx = 0
    for i in range(starts.shape[0]):
        if s >= starts[i]:
            idx = i
    return idx


@njit(cache=True)
def segment_value(kind, c, omega, phi, s):
    if kind == RAISED_COSINE:
        return c * (1.0 - math.cos(omega * s + phi))
    if kind == SINE:
        return c * math.sin(omega * s + phi)
    if kind == CONSTANT:
        return c
    return 0.0


@njit(cache=True)
def segment_slope(kind, c, omega, phi, s):
    if kind == RAISED_COSINE:
        return c * omega * math.sin(omega * s + phi)
    if kind == SINE:
        return c * omega * math.cos(omega * s + phi)
    return 0.0


@njit(cache=True)
def path_curvature(starts, kinds, cs, omegas, phis, s):
    i = segment_index(starts, s)
    return segment_value(kinds[i], cs[i], omegas[i], phis[i], s)


@njit(cache=True)
def path_curvature_rate(starts, kinds, cs, omegas, phis, s):
    i = segment_index(starts, s)
    return segment_slope(kinds[i], cs[i], omegas[i], phis[i], s)


@njit(cache=True)
def plant_rates(a11, a12, a13, a21, a22, a23, v, c, beta, psi_dot, delta, u):
    beta_dot = a11 / v * beta + (-1.0 + a12 / (v * v)) * psi_dot + a13 / v * delta
    psi_ddot = a21 * beta + a22 / v * psi_dot + a23 * delta
    delta_dot = u - c * v * delta
    return beta_dot, psi_ddot, delta_dot


@njit(cache=True)
def lateral_term(a11, a12, a13, v, beta, psi_dot, delta):
    """v**2 times the trajectory curvature; the recurring bracket of the law."""
    return a11 * beta + a12 / v * psi_dot + a13 * delta


@njit(cache=True)
def trajectory_curvature(a11, a12, a13, v, beta, psi_dot, delta):
    return a11 / (v * v) * beta + a12 / (v ** 3) * psi_dot + a13 / (v * v) * delta


@njit(cache=True)
def frenet_rates(kappa, kappa_r, v, theta, z):
    d = 1.0 - kappa_r * z
    s_dot = v * math.cos(theta) / d
    return kappa * v - kappa_r * s_dot, s_dot, v * math.sin(theta)


@njit(cache=True)
def pose_rates(v, kappa, theta_o):
    return v * math.cos(theta_o), v * math.sin(theta_o), kappa * v


GUARD_OK = 0
GUARD_HEADING = 1    # |theta| reached theta_max
GUARD_EXISTENCE = 2  # 1 - kappa_r*z fell to d_min


@njit(cache=True)
def guards_ok(theta, kappa_r, z, theta_max, d_min):
    return abs(theta) < theta_max and 1.0 - kappa_r * z > d_min


@njit(cache=True)
def guard_code(theta, kappa_r, z, theta_max, d_min):
    if not abs(theta) < theta_max:
        return GUARD_HEADING
    if not 1.0 - kappa_r * z > d_min:
        return GUARD_EXISTENCE
    return GUARD_OK


@njit(cache=True)
def u_zero(a11, a12, a13, v, alpha1, alpha2, alpha3,
           beta, psi_dot, delta, theta, z, kappa_r, kappa_r_dot,
           beta_dot, psi_ddot):
    """Input that makes z''' + a1 z'' + a2 z' + a3 z = 0 when delta' = u."""
    a = lateral_term(a11, a12, a13, v, beta, psi_dot, delta)
    d = 1.0 - kappa_r * z
    c = math.cos(theta)
    s = math.sin(theta)
    t = s / c
    vv = v * v
    u = -alpha1 / a13 * (a - kappa_r * vv * c / d)
    u -= alpha2 * v * t / a13
    u -= alpha3 * z / (a13 * c)
    u -= (a11 * beta_dot + a12 / v * psi_ddot) / a13
    u += t / (a13 * v) * a * a
    u -= 3.0 * kappa_r * v * s / (a13 * d) * a
    u += kappa_r_dot * vv * c / (a13 * d)
    u += kappa_r * vv * c * (kappa_r_dot * z + 3.0 * kappa_r * v * s) / (a13 * d * d)
    return u


@njit(cache=True)
def u_compensation(a11, a12, a13, v, k1, k2, k3,
                   beta_m, psi_dot_m, delta_m, theta_m, z_m, kappa_r_m,
                   beta, psi_dot, delta, theta, z, kappa_r):
    vv = v * v
    cm = math.cos(theta_m)
    cp = math.cos(theta)
    acc_m = lateral_term(a11, a12, a13, v, beta_m, psi_dot_m, delta_m) \
        - kappa_r_m * vv * cm / (1.0 - kappa_r_m * z_m)
    acc_p = lateral_term(a11, a12, a13, v, beta, psi_dot, delta) \
        - kappa_r * vv * cp / (1.0 - kappa_r * z)
    u = k1 * (acc_m - acc_p)
    u += k2 * (v * math.tan(theta_m) - v * math.tan(theta))
    u += k3 * (z_m / cm - z / cp)
    return u / a13


@njit(cache=True)
def coupled_rhs(x, out, starts, kinds, cs, omegas, phis, vp, cp, gains,
                mode, shared_curvature, theta_max, d_min):
    """Time derivative of the 15-component coupled state.

    ``vp`` = (a11, a12, a13, a21, a22, a23, v); ``cp`` = (C_plant, C_M);
    ``gains`` = (alpha1, alpha2, alpha3, k1, k2, k3).
    Returns (guard, u, u_M, u_c, kappa, kappa_r). ``guard`` is GUARD_OK or
    the first guard that tripped, in which case ``out`` is left unspecified.
    """
    a11, a12, a13, a21, a22, a23, v = vp[0], vp[1], vp[2], vp[3], vp[4], vp[5], vp[6]
    c_plant = cp[0]
    c_nom = cp[1]

    s_r = x[S_R]
    kr = path_curvature(starts, kinds, cs, omegas, phis, s_r)
    dkr = path_curvature_rate(starts, kinds, cs, omegas, phis, s_r)
    if shared_curvature:
        kr_m = kr
        dkr_m = dkr
    else:
        kr_m = path_curvature(starts, kinds, cs, omegas, phis, x[S_R_M])
        dkr_m = path_curvature_rate(starts, kinds, cs, omegas, phis, x[S_R_M])

    g = guard_code(x[THETA], kr, x[Z], theta_max, d_min)
    if g == GUARD_OK:
        g = guard_code(x[THETA_M], kr_m, x[Z_M], theta_max, d_min)
    if g != GUARD_OK:
        return g, 0.0, 0.0, 0.0, 0.0, kr

    # plant geometry
    kappa = trajectory_curvature(a11, a12, a13, v, x[BETA], x[PSI_DOT], x[DELTA])
    th_dot, s_dot, z_dot = frenet_rates(kappa, kr, v, x[THETA], x[Z])

    # nominal model geometry
    kappa_m = trajectory_curvature(a11, a12, a13, v, x[BETA_M], x[PSI_DOT_M], x[DELTA_M])
    th_dot_m, s_dot_m, z_dot_m = frenet_rates(kappa_m, kr_m, v, x[THETA_M], x[Z_M])
    if shared_curvature:
        # the model sees kappa_r(s_r(t)) as a time signal
        krd_m = dkr_m * s_dot
    else:
        krd_m = dkr_m * s_dot_m

    bd_m, pdd_m, _ = plant_rates(a11, a12, a13, a21, a22, a23, v, c_nom,
                                 x[BETA_M], x[PSI_DOT_M], x[DELTA_M], 0.0)
    u_m = u_zero(a11, a12, a13, v, gains[0], gains[1], gains[2],
                 x[BETA_M], x[PSI_DOT_M], x[DELTA_M], x[THETA_M], x[Z_M],
                 kr_m, krd_m, bd_m, pdd_m) + c_nom * v * x[DELTA_M]

    u_c = 0.0
    if mode == MODE_MEC:
        u_c = u_compensation(a11, a12, a13, v, gains[3], gains[4], gains[5],
                             x[BETA_M], x[PSI_DOT_M], x[DELTA_M], x[THETA_M], x[Z_M], kr_m,
                             x[BETA], x[PSI_DOT], x[DELTA], x[THETA], x[Z], kr)
        u = u_m + u_c
    elif mode == MODE_DIRECT:
        bd, pdd, _ = plant_rates(a11, a12, a13, a21, a22, a23, v, c_nom,
                                 x[BETA], x[PSI_DOT], x[DELTA], 0.0)
        u = u_zero(a11, a12, a13, v, gains[0], gains[1], gains[2],
                   x[BETA], x[PSI_DOT], x[DELTA], x[THETA], x[Z],
                   kr, dkr * s_dot, bd, pdd) + c_nom * v * x[DELTA]
    else:
        u = u_m

    bd, pdd, dd = plant_rates(a11, a12, a13, a21, a22, a23, v, c_plant,
                              x[BETA], x[PSI_DOT], x[DELTA], u)
    out[BETA] = bd
    out[PSI_DOT] = pdd
    out[DELTA] = dd
    out[THETA] = th_dot
    out[S_R] = s_dot
    out[Z] = z_dot
    xi_dot, eta_dot, tho_dot = pose_rates(v, kappa, x[THETA_O])
    out[XI] = xi_dot
    out[ETA] = eta_dot
    out[THETA_O] = tho_dot

    bd_m, pdd_m, dd_m = plant_rates(a11, a12, a13, a21, a22, a23, v, c_nom,
                                    x[BETA_M], x[PSI_DOT_M], x[DELTA_M], u_m)
    out[BETA_M] = bd_m
    out[PSI_DOT_M] = pdd_m
    out[DELTA_M] = dd_m
    out[THETA_M] = th_dot_m
    out[S_R_M] = s_dot_m
    out[Z_M] = z_dot_m
    return GUARD_OK, u, u_m, u_c, kappa, kr


@njit(cache=True)
def _record(samples, row, t, x, u, u_m, u_c, kappa, kr):
    samples[row, 0] = t
    samples[row, 1] = x[S_R]
    samples[row, 2] = x[Z]
    samples[row, 3] = x[THETA]
    samples[row, 4] = x[BETA]
    samples[row, 5] = x[PSI_DOT]
    samples[row, 6] = x[DELTA]
    samples[row, 7] = x[Z_M]
    samples[row, 8] = x[THETA_M]
    samples[row, 9] = u
    samples[row, 10] = u_m
    samples[row, 11] = u_c
    samples[row, 12] = kappa
    samples[row, 13] = kr
    samples[row, 14] = x[XI]
    samples[row, 15] = x[ETA]
    samples[row, 16] = x[THETA_O]
    samples[row, 17] = x[BETA_M]
    samples[row, 18] = x[PSI_DOT_M]
    samples[row, 19] = x[DELTA_M]
    samples[row, 20] = x[S_R_M]


@njit(cache=True)
def rk4_step(x, dt, k1, k2, k3, k4, tmp, starts, kinds, cs, omegas, phis,
             vp, cp, gains, mode, shared, theta_max, d_min):
    """One classical RK4 step in place. Returns the first tripped guard, or GUARD_OK."""
    n = x.shape[0]
    g = coupled_rhs(x, k1, starts, kinds, cs, omegas, phis, vp, cp, gains,
                    mode, shared, theta_max, d_min)[0]
    if g != GUARD_OK:
        return g
    for i in range(n):
        tmp[i] = x[i] + 0.5 * dt * k1[i]
    g = coupled_rhs(tmp, k2, starts, kinds, cs, omegas, phis, vp, cp, gains,
                    mode, shared, theta_max, d_min)[0]
    if g != GUARD_OK:
        return g
    for i in range(n):
        tmp[i] = x[i] + 0.5 * dt * k2[i]
    g = coupled_rhs(tmp, k3, starts, kinds, cs, omegas, phis, vp, cp, gains,
                    mode, shared, theta_max, d_min)[0]
    if g != GUARD_OK:
        return g
    for i in range(n):
        tmp[i] = x[i] + dt * k3[i]
    g = coupled_rhs(tmp, k4, starts, kinds, cs, omegas, phis, vp, cp, gains,
                    mode, shared, theta_max, d_min)[0]
    if g != GUARD_OK:
        return g
    for i in range(n):
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return GUARD_OK


@njit(cache=True)
def _guard_status(g):
    # a runaway heading is divergence; losing the reference point is a singularity
    if g == GUARD_HEADING:
        return STATUS_DIVERGED
    return STATUS_SINGULAR


@njit(cache=True)
def integrate(x0, starts, kinds, cs, omegas, phis, length, vp, cp, gains,
              mode, shared, dt, t_max, z_max, theta_max, d_min, samples):
    """Run the coupled system until completion, a guard trip or the horizon.

    Returns (status, number of recorded rows).
    """
    x = x0.copy()
    n = x.shape[0]
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    probe = np.empty(n)
    max_rows = samples.shape[0]

    res = coupled_rhs(x, probe, starts, kinds, cs, omegas, phis, vp, cp, gains,
                      mode, shared, theta_max, d_min)
    if res[0] != GUARD_OK:
        return _guard_status(res[0]), 0
    _record(samples, 0, 0.0, x, res[1], res[2], res[3], res[4], res[5])
    row = 1
    step = 0
    while True:
        g = rk4_step(x, dt, k1, k2, k3, k4, tmp, starts, kinds, cs, omegas, phis,
                     vp, cp, gains, mode, shared, theta_max, d_min)
        if g != GUARD_OK:
            return _guard_status(g), row
        step += 1
        t = step * dt
        for i in range(n):
            if not math.isfinite(x[i]):
                return STATUS_DIVERGED, row
        if abs(x[Z]) > z_max or abs(x[THETA]) >= theta_max:
            return STATUS_DIVERGED, row
        res = coupled_rhs(x, probe, starts, kinds, cs, omegas, phis, vp, cp, gains,
                          mode, shared, theta_max, d_min)
        if res[0] != GUARD_OK:
            return _guard_status(res[0]), row
        if row < max_rows:
            _record(samples, row, t, x, res[1], res[2], res[3], res[4], res[5])
            row += 1
        if x[S_R] >= length:
            return STATUS_COMPLETED, row
        if t >= t_max - 0.5 * dt:
            return STATUS_TIMED_OUT, row
