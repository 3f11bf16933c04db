"""Closed-form decay envelopes for the model unknowns.

Every function here depends only on a handful of scalar statistics of
the initial data (DataBounds) and evaluates an explicit formula; no
simulation is involved.  Throughout, s(t) = 1 + kappa2 * omega_max * t
is the common clock set by the upper omega envelope.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import Kappa2TooSmall


@dataclass
class DataBounds:
    """Scalar statistics of the initial data feeding the envelopes.

    b_min, omega_min, omega_max bound the initial scalars pointwise;
    b0_l1 and v0_l2sq are the initial L1 mass of b and squared L2 norm
    of v; lap_sum = |lap v0|_2^2 + |lap om0|_2^2 + |lap b0|_2^2; c_p is
    the Poincare constant of the box used in the velocity decay rate.
    """

    b_min: float
    omega_min: float
    omega_max: float
    b0_l1: float
    v0_l2sq: float
    lap_sum: float
    kappa2: float
    c_p: float
    v0_l2: Optional[float] = None

    def __post_init__(self):
        if not (0.0 < self.omega_min <= self.omega_max):
            raise ValueError("need 0 < omega_min <= omega_max")
        if self.b_min <= 0:
            raise ValueError("b_min must be positive")
        if self.b0_l1 < 0 or self.v0_l2sq < 0 or self.lap_sum < 0:
            raise ValueError("norm statistics must be nonnegative")
        if self.c_p <= 0:
            raise ValueError("c_p must be positive")
        if self.kappa2 <= 0:
            raise ValueError("kappa2 must be positive")
        if self.v0_l2 is None:
            self.v0_l2 = math.sqrt(self.v0_l2sq)


def geometric_times(horizon, delta=0.01):
    """Geometric sample grid t_j = (1+delta)^j - 1 covering [0, horizon],
    with the horizon appended as the final sample."""
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    if horizon == 0:
        return np.zeros(1)
    jmax = int(math.ceil(math.log1p(horizon) / math.log1p(delta)))
    t = np.expm1(np.arange(jmax + 1) * math.log1p(delta))
    t[t > horizon] = horizon
    if t[-1] < horizon:
        t = np.append(t, horizon)
    return np.unique(t)


class EnvelopeSet:
    """Bundle of the envelope functions for one DataBounds.

    All methods accept scalars or arrays of times t >= 0 and broadcast.
    """

    def __init__(self, bounds: DataBounds):
        self.bounds = bounds

    # -- helpers ----------------------------------------------------------

    def _t(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("envelope functions require t >= 0")
        return t

    def _s(self, t):
        b = self.bounds
        return 1.0 + b.kappa2 * b.omega_max * t

    def _require_large_kappa2(self):
        if self.bounds.kappa2 <= 0.5:
            raise Kappa2TooSmall(
                f"kappa2 = {self.bounds.kappa2} but the decay envelopes "
                "require kappa2 > 1/2")

    def _decay_exponent(self, t):
        """The bracket (1/c_p^2)(b_min/(omega_max^2 (2 kappa2 - 1)))
        (s^{2 - 1/kappa2} - 1) driving the v and Y2 decay."""
        b = self.bounds
        rate = b.b_min / (b.omega_max**2 * (2.0 * b.kappa2 - 1.0)) / b.c_p**2
        return rate * (self._s(t) ** (2.0 - 1.0 / b.kappa2) - 1.0)

    # -- pointwise scalar envelopes ---------------------------------------

    def omega_lower(self, t):
        b = self.bounds
        t = self._t(t)
        return b.omega_min / (1.0 + b.kappa2 * b.omega_min * t)

    def omega_upper(self, t):
        b = self.bounds
        return b.omega_max / self._s(self._t(t))

    def b_lower(self, t):
        b = self.bounds
        return b.b_min / self._s(self._t(t)) ** (1.0 / b.kappa2)

    def b_l1_upper(self, t, omega_choice="max"):
        """Decay bound on the L1 mass of b.

        omega_choice picks the rate constant in the denominator
        (1 + kappa2 * omega_choice * t)^{1/kappa2}; "max" is the faster
        (tighter) variant used inside the existence criterion, "min" the
        slower one that the a-priori estimate guarantees for measured
        norms.  Both are provided deliberately; see README.
        """
        b = self.bounds
        t = self._t(t)
        if omega_choice == "max":
            om = b.omega_max
        elif omega_choice == "min":
            om = b.omega_min
        else:
            raise ValueError("omega_choice must be 'min' or 'max'")
        num = b.b0_l1 + 0.5 * b.v0_l2sq
        return num / (1.0 + b.kappa2 * om * t) ** (1.0 / b.kappa2)

    def mu_min(self, t):
        """Lower envelope of the eddy viscosity, b_lower/omega_upper."""
        b = self.bounds
        t = self._t(t)
        return (b.b_min / b.omega_max) * self._s(t) ** (1.0 - 1.0 / b.kappa2)

    # -- energy-norm envelopes (need kappa2 > 1/2) ------------------------

    def v_l2_envelope(self, t):
        self._require_large_kappa2()
        return self.bounds.v0_l2 * np.exp(-self._decay_exponent(self._t(t)))

    def y2(self, t):
        """Envelope of the summed squared-laplacian energy."""
        self._require_large_kappa2()
        b = self.bounds
        return b.lap_sum * np.exp(-b.kappa2 * self._decay_exponent(self._t(t)))

    # -- coefficient functions and the criterion aggregate ----------------

    def coeff_A(self, t):
        bmax = self.b_l1_upper(t, "max")
        return (self.bounds.v0_l2sq + bmax**2) ** 0.25

    def coeff_B(self, t):
        bmax = self.b_l1_upper(t, "max")
        w = self.omega_lower(t)
        return 1.0 + 1.0 / w + bmax / w + bmax / w**2

    def coeff_C(self, t):
        bmax = self.b_l1_upper(t, "max")
        w = self.omega_lower(t)
        return 1.0 / w + 1.0 / w**2 + bmax / w**2 + bmax / w**3

    def coeff_D(self, t):
        w = self.omega_lower(t)
        return 1.0 / w**2 + 1.0 / w**3

    def z0(self, t):
        """b_l1_upper(max) + A Y2^{1/4} + B Y2^{1/2} + C Y2 + D Y2^{3/2}."""
        self._require_large_kappa2()
        t = self._t(t)
        y = self.y2(t)
        q = y**0.25
        return (self.b_l1_upper(t, "max")
                + self.coeff_A(t) * q
                + self.coeff_B(t) * q**2
                + self.coeff_C(t) * y
                + self.coeff_D(t) * y**1.5)
