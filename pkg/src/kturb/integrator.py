"""Explicit time marching with CFL control and positivity guards.

Classical four-stage Runge-Kutta on the stacked spectral state
(v1, v2, v3, omega, b).  Steps that drive omega or b to the positivity
floor abort with PositivityViolation rather than clipping; clipped
fields would silently invalidate every envelope comparison downstream.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import ops
from .dynamics import ModelParams, State, TendencyKernel, hat_to_state, state_to_hat
from .errors import BlowUp, NonPositiveOmega, PositivityViolation
from .fields import ScalarField, VectorField


@dataclass
class StepControl:
    """Step-size policy and guard thresholds."""

    dt_max: float
    cfl_adv: float = 0.4
    cfl_diff: float = 0.25
    dt_fixed: Optional[float] = None
    eps_pos: float = 1e-10

    def __post_init__(self):
        for name in ("dt_max", "cfl_adv", "cfl_diff", "eps_pos"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.dt_fixed is not None and self.dt_fixed <= 0:
            raise ValueError("dt_fixed must be positive")


def _dt_from_arrays(grid, params, control, vmax, mumax):
    if control.dt_fixed is not None:
        return control.dt_fixed
    h = grid.min_spacing
    dt_adv = control.cfl_adv * h / max(vmax, 1e-12)
    dt_diff = control.cfl_diff * h * h / (params.c_diff * mumax)
    return min(control.dt_max, dt_adv, dt_diff)


def compute_dt(state: State, params: ModelParams, control: StepControl) -> float:
    """dt = min(dt_max, cfl_adv h/|v|_inf, cfl_diff h^2/(c_diff max mu))."""
    vmax = float(np.max(np.abs(state.v.values)))
    mumax = float(np.max(state.b.values / state.omega.values))
    return _dt_from_arrays(state.grid, params, control, vmax, mumax)


class _Marcher:
    """Owns the spectral state between steps so fields are transformed
    once per step, not once per call."""

    def __init__(self, grid, params, control, forcing=None):
        self.grid = grid
        self.params = params
        self.control = control
        self.forcing = forcing
        self.kernel = TendencyKernel(grid, params, eps_pos=control.eps_pos)

    def step_hat(self, y_hat, t, dt):
        k = self.kernel
        f = self.forcing
        try:
            k1 = k(y_hat, t, f)
            k2 = k(y_hat + 0.5 * dt * k1, t + 0.5 * dt, f)
            k3 = k(y_hat + 0.5 * dt * k2, t + 0.5 * dt, f)
            k4 = k(y_hat + dt * k3, t + dt, f)
        except NonPositiveOmega as exc:
            raise PositivityViolation(
                f"stage evaluation failed during step from t = {t:.6g}: {exc}",
                t=t) from exc
        y_new = y_hat + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ops.leray_hat(self.grid, y_new[:3])
        return y_new

    def guard(self, phys, t):
        """Check the physical fields of an accepted step; return the
        quantities the next CFL selection needs."""
        if not np.all(np.isfinite(phys)):
            raise BlowUp(f"non-finite field values at t = {t:.6g}", t=t)
        om_min = float(np.min(phys[3]))
        b_min = float(np.min(phys[4]))
        if om_min <= self.control.eps_pos or b_min <= self.control.eps_pos:
            raise PositivityViolation(
                f"min(omega) = {om_min:.3e}, min(b) = {b_min:.3e} "
                f"at or below floor {self.control.eps_pos:.1e} at t = {t:.6g}",
                t=t)
        vmax = float(np.max(np.abs(phys[:3])))
        mumax = float(np.max(phys[4] / phys[3]))
        return vmax, mumax


def _is_uniform(y_hat):
    """True when v vanishes and both scalars carry only the k=0 mode."""
    if np.any(y_hat[:3]):
        return False
    for row in (y_hat[3], y_hat[4]):
        n = np.count_nonzero(row)
        if n > 1 or (n == 1 and row[0, 0, 0] == 0):
            return False
    return True


def rk4_step(state: State, dt: float, params: ModelParams, forcing=None,
             control: Optional[StepControl] = None) -> State:
    """One classical RK4 step of length dt with guards applied."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if control is None:
        control = StepControl(dt_max=dt)
    m = _Marcher(state.grid, params, control, forcing)
    y_new = m.step_hat(state_to_hat(state), state.t, dt)
    new = hat_to_state(state.grid, y_new, state.t + dt)
    phys = np.concatenate([new.v.values,
                           new.omega.values[None],
                           new.b.values[None]])
    m.guard(phys, new.t)
    return new


def advance(state: State, t_end: float, params: ModelParams,
            control: StepControl, callbacks=None, forcing=None) -> State:
    """March from state.t to exactly t_end.

    callbacks: iterable of callables or (cadence, callable) pairs; each
    callable receives the freshly accepted State and is invoked on steps
    1, 1+cadence, 1+2*cadence, ...
    """
    if t_end < state.t:
        raise ValueError("t_end must not precede state.t")
    if t_end == state.t:
        return state
    cbs = []
    for cb in callbacks or ():
        if callable(cb):
            cbs.append((1, cb))
        else:
            every, fn = cb
            cbs.append((int(every), fn))

    g = state.grid
    m = _Marcher(g, params, control, forcing)
    y = state_to_hat(state)
    t = state.t
    vmax = float(np.max(np.abs(state.v.values)))
    mumax = float(np.max(state.b.values / state.omega.values))
    nstep = 0
    while t < t_end:
        dt = _dt_from_arrays(g, params, control, vmax, mumax)
        # clip the final step to land on t_end exactly; the rounding slack
        # keeps accumulated float error from spawning a degenerate step
        last = t + dt >= t_end - 1e-12 * dt
        if last:
            dt = t_end - t
        y = m.step_hat(y, t, dt)
        t = t_end if last else t + dt
        nstep += 1
        cb_due = any((nstep - 1) % every == 0 for every, _ in cbs)
        phys = None
        if cb_due or not _is_uniform(y):
            phys = g.irfft(y)
            vmax, mumax = m.guard(phys, t)
        else:
            # uniform state: extrema are the k = 0 coefficients
            om = float(y[3, 0, 0, 0].real) / g.npoints
            bm = float(y[4, 0, 0, 0].real) / g.npoints
            if not (math.isfinite(om) and math.isfinite(bm)):
                raise BlowUp(f"non-finite field values at t = {t:.6g}", t=t)
            if om <= control.eps_pos or bm <= control.eps_pos:
                raise PositivityViolation(
                    f"min(omega) = {om:.3e}, min(b) = {bm:.3e} at or below "
                    f"floor {control.eps_pos:.1e} at t = {t:.6g}", t=t)
            vmax, mumax = 0.0, bm / om
        if cbs:
            snap = None
            for every, fn in cbs:
                if (nstep - 1) % every == 0:
                    if snap is None:
                        snap = State(v=VectorField(g, phys[:3].copy()),
                                     omega=ScalarField(g, phys[3].copy()),
                                     b=ScalarField(g, phys[4].copy()),
                                     t=t)
                    fn(snap)
    return hat_to_state(g, y, t)
