"""Initial-data generation and reduction to envelope inputs."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .. import ops
from ..dynamics import ModelParams, State
from ..envelopes import DataBounds
from ..errors import ConfigError
from ..fields import ScalarField, VectorField
from ..grid import TorusGrid

KINDS = ("uniform", "random_band", "from_file")


@dataclass
class InitialDataSpec:
    """Recipe for admissible initial data.

    Scalars are a mean plus a band-limited perturbation rescaled to the
    requested pointwise amplitude, so b0 >= b_mean - b_amp > 0 and
    omega0 stays inside [omega_mean - omega_amp, omega_mean + omega_amp].
    The velocity is a random band-limited field, Leray-projected, then
    rescaled to |v0|_inf = v_amp.
    """

    kind: str = "random_band"
    seed: int = 0
    b_mean: float = 2.0
    b_amp: float = 0.1
    omega_mean: float = 1.0
    omega_amp: float = 0.1
    v_amp: float = 1e-3
    band: int = 5
    path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown initial data kind '{self.kind}'")
        if self.b_amp < 0 or self.omega_amp < 0 or self.v_amp < 0:
            raise ConfigError("perturbation amplitudes must be nonnegative")
        if self.b_mean - self.b_amp <= 0:
            raise ConfigError("need b_mean - b_amp > 0 for admissible data")
        if self.omega_mean - self.omega_amp <= 0:
            raise ConfigError("need omega_mean - omega_amp > 0")
        if self.band < 1:
            raise ConfigError("band must be >= 1")
        if self.kind == "from_file" and not self.path:
            raise ConfigError("kind=from_file requires a path")


def _band_mask(grid, band):
    m1, m2, m3 = grid.modes
    return (np.abs(m1) <= band) & (np.abs(m2) <= band) & (np.abs(m3) <= band)


def _band_limited(grid, rng, band, shape=()):
    """Random real band-limited zero-mean field(s)."""
    noise = rng.standard_normal(shape + grid.resolution)
    fhat = grid.rfft(noise)
    fhat *= _band_mask(grid, band)
    fhat[..., 0, 0, 0] = 0.0
    return grid.irfft(fhat)


def _rescaled(pert, amp):
    peak = float(np.max(np.abs(pert)))
    if amp == 0.0 or peak == 0.0:
        return np.zeros_like(pert)
    return pert * (amp / peak)


def generate_initial(spec: InitialDataSpec, grid: TorusGrid) -> State:
    """Build an admissible State; deterministic in spec.seed."""
    if spec.kind == "from_file":
        from .snapshot import read_snapshot
        state, _ = read_snapshot(spec.path)
        if state.grid != grid:
            raise ConfigError("snapshot grid does not match configured grid")
        return state
    if spec.kind == "uniform":
        return State(
            v=VectorField.zero(grid),
            omega=ScalarField.constant(grid, spec.omega_mean),
            b=ScalarField.constant(grid, spec.b_mean),
            t=0.0,
        )
    if 3 * spec.band > min(grid.resolution):
        raise ConfigError("band exceeds the dealiased range N/3")
    rng = np.random.default_rng(spec.seed)
    b0 = spec.b_mean + _rescaled(_band_limited(grid, rng, spec.band), spec.b_amp)
    om0 = spec.omega_mean + _rescaled(
        _band_limited(grid, rng, spec.band), spec.omega_amp)
    vraw = _band_limited(grid, rng, spec.band, shape=(3,))
    vhat = grid.rfft(vraw)
    ops.leray_hat(grid, vhat)
    v0 = _rescaled(grid.irfft(vhat), spec.v_amp)
    return State(
        v=VectorField(grid, v0),
        omega=ScalarField(grid, om0),
        b=ScalarField(grid, b0),
        t=0.0,
    )


def extract_bounds(state: State, params: ModelParams,
                   c_p_override: Optional[float] = None) -> DataBounds:
    """Reduce an initial State to the scalar statistics the envelopes
    consume.  c_p defaults to the sharp Poincare constant max L_i/(2 pi)."""
    g = state.grid
    c_p = c_p_override if c_p_override is not None else max(g.lengths) / (2.0 * math.pi)
    v0_l2sq = ops.norm(state.v, 2) ** 2
    lap_sum = (ops.seminorm(state.v, 2) ** 2
               + ops.seminorm(state.omega, 2) ** 2
               + ops.seminorm(state.b, 2) ** 2)
    return DataBounds(
        b_min=float(np.min(state.b.values)),
        omega_min=float(np.min(state.omega.values)),
        omega_max=float(np.max(state.omega.values)),
        b0_l1=ops.norm(state.b, 1),
        v0_l2sq=v0_l2sq,
        lap_sum=lap_sum,
        kappa2=params.kappa2,
        c_p=c_p,
    )
