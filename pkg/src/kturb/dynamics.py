"""Semi-discrete right-hand sides of the two-equation closure model.

The evolved unknowns are the mean velocity v (divergence-free, zero
mean), the dissipation rate omega and the turbulent energy measure b,
coupled through the eddy viscosity mu = b/omega:

    v_t   = P[ -div(v x v) + c_v div(mu D(v)) + F_v ]
    om_t  = -div(om v) + k1 div(mu grad om) - k2 om^2 + F_om
    b_t   = -div(b v)  + k3 div(mu grad b)  - b om + k4 mu |D(v)|^2 + F_b

with P the Leray projector and D(v) the rate-of-strain tensor.  All
quadratic products are dealiased; mu is formed pointwise and never
floored (positivity of omega is a hard precondition).
"""

from dataclasses import dataclass, field

import numpy as np

from . import ops
from .errors import NonPositiveOmega
from .fields import ScalarField, VectorField
from .grid import TorusGrid


@dataclass
class ModelParams:
    """Physical constants of the model.

    The canonical momentum diffusion uses coefficient c_v =
    momentum_diffusion_coeff * nu0 on div(mu D(v)).  The default
    momentum_diffusion_coeff = 1 matches the weak-form normalization in
    which the velocity dissipation and the b production balance exactly;
    set it to 2 to recover the literal strong-form momentum equation.
    """

    nu0: float = 1.0
    kappa1: float = 1.0
    kappa2: float = 1.0
    kappa3: float = 1.0
    kappa4: float = 1.0
    momentum_diffusion_coeff: float = 1.0

    def __post_init__(self):
        for name in ("nu0", "kappa1", "kappa2", "kappa3", "kappa4",
                     "momentum_diffusion_coeff"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def c_v(self):
        return self.momentum_diffusion_coeff * self.nu0

    @property
    def c_diff(self):
        return max(self.c_v, self.kappa1, self.kappa3)


@dataclass
class State:
    """Solution triple (v, omega, b) at time t."""

    v: VectorField
    omega: ScalarField
    b: ScalarField
    t: float = 0.0

    @property
    def grid(self):
        return self.omega.grid

    def validate(self, div_tol=1e-12, eps_pos=0.0):
        g = self.grid
        if not (self.v.grid == g == self.b.grid):
            raise ValueError("state fields must share one grid")
        vhat = g.rfft(self.v.values)
        vnorm = np.sqrt(sum(ops.l2sq_hat(g, vhat[i]) for i in range(3)))
        div = ops.div_hat(g, vhat)
        if np.max(np.abs(div)) > div_tol * max(vnorm, 1e-300) * g.npoints:
            raise ValueError("velocity is not divergence-free")
        for i in range(3):
            if abs(vhat[i][0, 0, 0]) > div_tol * g.npoints:
                raise ValueError("velocity has nonzero mean")
        if np.min(self.omega.values) <= eps_pos:
            raise ValueError("omega must be strictly positive")
        if np.min(self.b.values) <= eps_pos:
            raise ValueError("b must be strictly positive")
        return self


@dataclass
class Tendency:
    dv: VectorField
    domega: ScalarField
    db: ScalarField


class Forcing:
    """Optional prescribed sources (F_v, F_omega, F_b).

    Either fixed arrays or a callback ``func(t) -> (fv, fom, fb)``
    returning raw arrays (each entry may be None).  F_v need not be
    divergence-free: it is injected before the Leray projection.
    """

    def __init__(self, f_v=None, f_omega=None, f_b=None, func=None):
        self._static = (f_v, f_omega, f_b)
        self._func = func

    def __call__(self, t):
        if self._func is not None:
            return self._func(t)
        return self._static


def state_to_hat(state):
    """Pack a State into the stacked spectral vector (v1, v2, v3, om, b)."""
    g = state.grid
    phys = np.concatenate([state.v.values,
                           state.omega.values[None],
                           state.b.values[None]])
    return g.rfft(phys)


def hat_to_state(grid, y_hat, t):
    phys = grid.irfft(y_hat)
    return State(
        v=VectorField(grid, phys[:3].copy()),
        omega=ScalarField(grid, phys[3].copy()),
        b=ScalarField(grid, phys[4].copy()),
        t=t,
    )


class TendencyKernel:
    """Fused evaluator of all three right-hand sides in spectral form.

    Terms whose inputs are identically zero in spectrum (zero velocity,
    spatially uniform scalars) are skipped; the skipped transforms would
    produce exact zeros, so results are bitwise identical to the full
    path.
    """

    def __init__(self, grid: TorusGrid, params: ModelParams, eps_pos=1e-10):
        self.grid = grid
        self.params = params
        self.eps_pos = eps_pos

    def _has_nonmean(self, fhat):
        n = np.count_nonzero(fhat)
        if n == 0:
            return False
        if n == 1 and fhat[0, 0, 0] != 0:
            return False
        return True

    def __call__(self, y_hat, t=0.0, forcing=None):
        g = self.grid
        p = self.params
        vhat, what, bhat = y_hat[:3], y_hat[3], y_hat[4]
        v_active = bool(np.any(vhat))
        w_var = self._has_nonmean(what)
        b_var = self._has_nonmean(bhat)

        if not (v_active or w_var or b_var) and forcing is None:
            # spatially uniform state: the reaction ODEs are the whole
            # dynamics, and the FFT of a constant field is exact, so the
            # transform-free evaluation matches the generic path bitwise
            om = float(what[0, 0, 0].real) / g.npoints
            if not np.isfinite(om) or om <= self.eps_pos:
                raise NonPositiveOmega(
                    f"min(omega) = {om:.3e} at t = {t:.6g}; cannot form b/omega")
            bm = float(bhat[0, 0, 0].real) / g.npoints
            out = np.zeros((5,) + g.spectral_shape, dtype=complex)
            out[3, 0, 0, 0] = -p.kappa2 * om * om * g.npoints
            out[4, 0, 0, 0] = -bm * om * g.npoints
            return out

        # one batched inverse transform for every needed physical field
        stack = [what, bhat]
        sl_gw = sl_gb = sl_d = None
        if w_var:
            sl_gw = slice(len(stack), len(stack) + 3)
            stack.extend(ops.grad_hat(g, what))
        if b_var:
            sl_gb = slice(len(stack), len(stack) + 3)
            stack.extend(ops.grad_hat(g, bhat))
        if v_active:
            sl_v = slice(len(stack), len(stack) + 3)
            stack.extend(vhat)
            sl_d = slice(len(stack), len(stack) + 6)
            stack.extend(ops.sym_grad_hat(g, vhat))
        phys = g.irfft(np.stack(stack))
        omega, b = phys[0], phys[1]

        om_min = float(np.min(omega))
        if not np.isfinite(om_min) or om_min <= self.eps_pos:
            raise NonPositiveOmega(
                f"min(omega) = {om_min:.3e} at t = {t:.6g}; cannot form b/omega")
        mu = b / omega

        f_v = f_om = f_b = None
        if forcing is not None:
            f_v, f_om, f_b = forcing(t)

        # fused physical products -> one batched forward transform
        s_om = -p.kappa2 * omega * omega
        if f_om is not None:
            s_om = s_om + f_om
        s_b = -b * omega
        if f_b is not None:
            s_b = s_b + f_b

        fstack = [s_om]
        fl_gw = fl_gb = fl_t = fl_fv = None
        if v_active:
            v = phys[sl_v]
            D = phys[sl_d]
            dd = (D[0] ** 2 + D[1] ** 2 + D[2] ** 2
                  + 2.0 * (D[3] ** 2 + D[4] ** 2 + D[5] ** 2))
            s_b = s_b + p.kappa4 * mu * dd
        fstack.append(s_b)

        if v_active or w_var:
            G = np.zeros((3,) + g.resolution)
            if v_active:
                G -= omega * v
            if w_var:
                G += p.kappa1 * mu * phys[sl_gw]
            fl_gw = slice(len(fstack), len(fstack) + 3)
            fstack.extend(G)
        if v_active or b_var:
            G = np.zeros((3,) + g.resolution)
            if v_active:
                G -= b * v
            if b_var:
                G += p.kappa3 * mu * phys[sl_gb]
            fl_gb = slice(len(fstack), len(fstack) + 3)
            fstack.extend(G)
        if v_active:
            cv = p.c_v
            T = np.empty((6,) + g.resolution)
            T[0] = cv * mu * D[0] - v[0] * v[0]
            T[1] = cv * mu * D[1] - v[1] * v[1]
            T[2] = cv * mu * D[2] - v[2] * v[2]
            T[3] = cv * mu * D[3] - v[0] * v[1]
            T[4] = cv * mu * D[4] - v[0] * v[2]
            T[5] = cv * mu * D[5] - v[1] * v[2]
            fl_t = slice(len(fstack), len(fstack) + 6)
            fstack.extend(T)
        if f_v is not None:
            fl_fv = slice(len(fstack), len(fstack) + 3)
            fstack.extend(np.asarray(f_v))

        spec = g.rfft(np.stack(fstack))
        spec *= g.dealias_mask

        out = np.zeros((5,) + g.spectral_shape, dtype=complex)
        ik1, ik2, ik3 = (1j * g.k[0], 1j * g.k[1], 1j * g.k[2])
        out[3] = spec[0]
        out[4] = spec[1]
        if fl_gw is not None:
            Gw = spec[fl_gw]
            out[3] += ik1 * Gw[0] + ik2 * Gw[1] + ik3 * Gw[2]
        if fl_gb is not None:
            Gb = spec[fl_gb]
            out[4] += ik1 * Gb[0] + ik2 * Gb[1] + ik3 * Gb[2]
        if fl_t is not None:
            T = spec[fl_t]
            out[0] = ik1 * T[0] + ik2 * T[3] + ik3 * T[4]
            out[1] = ik1 * T[3] + ik2 * T[1] + ik3 * T[5]
            out[2] = ik1 * T[4] + ik2 * T[5] + ik3 * T[2]
        if fl_fv is not None:
            out[:3] += spec[fl_fv]
        if fl_t is not None or fl_fv is not None:
            ops.leray_hat(g, out[:3])
        return out


def eddy_viscosity(state: State, eps_pos=0.0) -> ScalarField:
    """Pointwise eddy viscosity mu = b/omega."""
    om_min = float(np.min(state.omega.values))
    if om_min <= eps_pos:
        raise NonPositiveOmega(f"min(omega) = {om_min:.3e}")
    return ScalarField(state.grid, state.b.values / state.omega.values)


def _tendency_hat(state, params, forcing=None):
    kernel = TendencyKernel(state.grid, params)
    return kernel(state_to_hat(state), state.t, forcing)


def evaluate_tendency(state: State, params: ModelParams, forcing=None) -> Tendency:
    """All three right-hand sides at once (shares transforms)."""
    g = state.grid
    phys = g.irfft(_tendency_hat(state, params, forcing))
    return Tendency(
        dv=VectorField(g, phys[:3].copy()),
        domega=ScalarField(g, phys[3].copy()),
        db=ScalarField(g, phys[4].copy()),
    )


def rhs_velocity(state, params, forcing=None) -> VectorField:
    return evaluate_tendency(state, params, forcing).dv


def rhs_omega(state, params, forcing=None) -> ScalarField:
    return evaluate_tendency(state, params, forcing).domega


def rhs_b(state, params, forcing=None) -> ScalarField:
    return evaluate_tendency(state, params, forcing).db


def energy_flux(state: State, params: ModelParams):
    """Instantaneous integral rates (dE_kin, dB_mass, coupling):

    dE_kin  = -c_v (mu D(v), D(v))          [d/dt of kinetic energy]
    dB_mass = -(b om, 1) + k4 (mu|D(v)|^2, 1)  [d/dt of the b integral]
    coupling = -(b om, 1)

    With c_v = kappa4 the production term cancels the viscous loss and
    dE_kin + dB_mass = coupling.
    """
    g = state.grid
    mu = eddy_viscosity(state).values
    D = ops.sym_gradient(state.v)
    dd = np.einsum("ij...,ij...->...", D, D)
    visc = ops.integral(g, mu * dd)
    bw = ops.integral(g, state.b.values * state.omega.values)
    return (-params.c_v * visc, -bw + params.kappa4 * visc, -bw)
