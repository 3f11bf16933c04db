"""Global-existence criterion built on the closed-form envelopes.

The central object is the margin

    margin(t) = mu_min(t) - C * Z0(t)

for a user-supplied constant C > 0; the solution is certified global on
[0, T) when the margin stays positive there.  Two closed-form sufficient
conditions (z1, z2) and the auxiliary supremum a0 are also evaluated.

Infinite horizons are handled analytically: in the rescaled clock
s = 1 + kappa2*omega_max*t every Z0 term is dominated by an expression
c * s^p * exp(-q*beta*s^r) with r = 2 - 1/kappa2 > 0, each of which is
monotone decreasing beyond an explicit peak s* = (p/(q*beta*r))^{1/r}.
Once the summed dominations drop below mu_min at some finite s, the
margin is provably positive for all later times and only the finite
range needs grid sampling.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .envelopes import DataBounds, EnvelopeSet, geometric_times
from .errors import InconclusiveTail, Kappa2TooSmall


@dataclass
class CriterionConfig:
    """Knobs of the criterion evaluation.

    c_omega_kappa is the undetermined positive constant multiplying Z0;
    every report echoes the value used, since any verdict is conditional
    on it.  horizon may be math.inf.  delta sets the geometric sampling
    grid t_j = (1+delta)^j - 1; sup_horizon caps the finite range used
    when locating suprema before switching to the analytic tail.
    """

    c_omega_kappa: float = 1.0
    horizon: float = math.inf
    delta: float = 0.01
    sup_horizon: float = 1.0e4

    def __post_init__(self):
        if self.c_omega_kappa <= 0:
            raise ValueError("c_omega_kappa must be positive")
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if self.delta <= 0 or self.sup_horizon <= 0:
            raise ValueError("delta and sup_horizon must be positive")


@dataclass
class CriterionReport:
    holds: bool
    first_violation_t: Optional[float]
    margin_samples: List[Tuple[float, float]]
    c_omega_kappa: float
    horizon: float
    a0: Optional[float] = None
    z1_holds: Optional[bool] = None
    z2_holds: Optional[bool] = None


def _require_kappa2(bounds):
    if bounds.kappa2 <= 0.5:
        raise Kappa2TooSmall(
            f"kappa2 = {bounds.kappa2}; the criterion requires kappa2 > 1/2")


def margin(t, bounds: DataBounds, config: CriterionConfig):
    """mu_min(t) - c_omega_kappa * Z0(t); positive margin certifies
    existence up to t."""
    _require_kappa2(bounds)
    env = EnvelopeSet(bounds)
    return env.mu_min(t) - config.c_omega_kappa * env.z0(t)


class _TailModel:
    """Per-term dominations of C*Z0 in the clock s = 1 + k2*om_max*t.

    Each term is c * s^p * exp(-q*beta*(s^r - 1)) evaluated in log space,
    valid for s >= 1, together with its peak location s*.
    """

    def __init__(self, bounds, c_omega_kappa):
        b = bounds
        k2 = b.kappa2
        self.k2 = k2
        self.r = 2.0 - 1.0 / k2
        self.beta = k2 * b.b_min / (b.c_p**2 * b.omega_max**2 * (2.0 * k2 - 1.0))
        self.m0 = b.b_min / b.omega_max
        rho = b.omega_min / b.omega_max
        M = b.b0_l1 + 0.5 * b.v0_l2sq
        Cc = c_omega_kappa
        w = b.omega_min
        Y0 = b.lap_sum
        # (log c, p, q) triples for C*Z0 <= sum of c * s^p * e^{-q beta (s^r-1)}
        self.terms = []
        if M > 0:
            self.terms.append((math.log(Cc * M) - math.log(rho) / k2, -1.0 / k2, 0.0))
        if Y0 > 0:
            # crude s >= 1 majorants of the coefficient functions
            B0 = 1.0 + 1.0 / w + M / w + M / w**2
            C0 = 1.0 / w + 1.0 / w**2 + M / w**2 + M / w**3
            D0 = 1.0 / w**2 + 1.0 / w**3
            A0 = (b.v0_l2sq + M * M) ** 0.25
            self.terms.append((math.log(Cc * A0) + 0.25 * math.log(Y0), 0.0, 0.25))
            self.terms.append((math.log(Cc * B0) + 0.5 * math.log(Y0), 2.0, 0.5))
            self.terms.append((math.log(Cc * C0) + math.log(Y0), 3.0, 1.0))
            self.terms.append((math.log(Cc * D0) + 1.5 * math.log(Y0), 3.0, 1.5))

    def log_term(self, logc, p, q, s):
        val = logc + p * math.log(s)
        if q > 0.0:
            val -= q * self.beta * (s**self.r - 1.0)
        return val

    def log_mu_min(self, s):
        return math.log(self.m0) + (self.r - 1.0) * math.log(s)

    def ratio_peak_s(self, logc, p, q):
        """Peak of (term / mu_min)(s); the ratio decreases beyond it."""
        pr = p - (self.r - 1.0)
        if q == 0.0:
            # power-only ratio; decreasing everywhere iff pr <= 0
            return 1.0 if pr <= 0.0 else math.inf
        if pr <= 0.0:
            return 1.0
        return (pr / (q * self.beta * self.r)) ** (1.0 / self.r)

    def ratio_sum(self, s):
        lm = self.log_mu_min(s)
        tot = 0.0
        for logc, p, q in self.terms:
            tot += math.exp(min(self.log_term(logc, p, q, s) - lm, 700.0))
        return tot

    def certified_from(self, s_start):
        """Smallest sampled s >= s_start beyond which margin > 0 is
        guaranteed, or raise InconclusiveTail."""
        s = max(s_start, 1.0)
        for logc, p, q in self.terms:
            peak = self.ratio_peak_s(logc, p, q)
            if not math.isfinite(peak):
                raise InconclusiveTail(
                    "a Z0 term does not decay relative to mu_min")
            s = max(s, peak)
        for _ in range(2000):
            if self.ratio_sum(s) < 1.0:
                return s
            if s > 1e200:
                raise InconclusiveTail(
                    "tail domination not achieved within the searchable range")
            s *= 2.0
        raise InconclusiveTail("tail domination search did not converge")


def _first_root(ts, vals, f):
    """First t with f <= 0 given grid samples; bisect the bracketing
    interval when the sign change is interior."""
    bad = np.nonzero(vals <= 0.0)[0]
    if bad.size == 0:
        return None
    j = int(bad[0])
    if j == 0:
        return float(ts[0])
    a, b = float(ts[j - 1]), float(ts[j])
    if vals[j] == 0.0:
        return b
    return float(brentq(f, a, b, rtol=1e-10))


def check_glob_add(bounds: DataBounds, config: CriterionConfig) -> CriterionReport:
    """Sample the margin over [0, horizon) and report the verdict.

    With horizon = inf the finite sampling range is chosen so that the
    analytic tail model certifies positivity beyond it.
    """
    _require_kappa2(bounds)
    env = EnvelopeSet(bounds)
    C = config.c_omega_kappa

    def f(t):
        return float(env.mu_min(t) - C * env.z0(t))

    if math.isinf(config.horizon):
        tail = _TailModel(bounds, C)
        s_cert = tail.certified_from(
            1.0 + bounds.kappa2 * bounds.omega_max * config.sup_horizon)
        t_cert = (s_cert - 1.0) / (bounds.kappa2 * bounds.omega_max)
        ts = geometric_times(t_cert, config.delta)
    else:
        ts = geometric_times(config.horizon, config.delta)

    vals = env.mu_min(ts) - C * env.z0(ts)
    root = _first_root(ts, vals, f)
    samples = list(zip(ts.tolist(), np.asarray(vals).tolist()))
    return CriterionReport(
        holds=root is None,
        first_violation_t=root,
        margin_samples=samples,
        c_omega_kappa=C,
        horizon=config.horizon,
    )


def compute_a0(bounds: DataBounds, config: CriterionConfig) -> float:
    """sup over t >= 0 of

        2 C s^{1/kappa2 - 1} (A + B Y2^{1/4} + C Y2^{3/4} + D Y2^{5/4})

    For 1/2 < kappa2 < 1 with nonzero initial velocity the integrand
    grows without bound and the supremum is infinite; math.inf is
    returned rather than a truncated value.
    """
    _require_kappa2(bounds)
    b = bounds
    k2 = b.kappa2
    Cc = config.c_omega_kappa
    if k2 < 1.0 and b.v0_l2sq > 0.0:
        return math.inf
    env = EnvelopeSet(bounds)

    def a_of_t(t):
        s = 1.0 + k2 * b.omega_max * np.asarray(t, dtype=float)
        y = env.y2(t)
        q = y**0.25
        inner = (env.coeff_A(t) + env.coeff_B(t) * q
                 + env.coeff_C(t) * q**3 + env.coeff_D(t) * q**5)
        return 2.0 * Cc * s ** (1.0 / k2 - 1.0) * inner

    # finite sampling range, stretched to cover every bound-term peak
    tail = _TailModel(bounds, Cc)
    horizon = config.sup_horizon
    if b.lap_sum > 0:
        beta, r = tail.beta, tail.r
        for p, q in ((1.0 / k2 + 1.0, 0.25), (1.0 / k2 + 2.0, 0.75),
                     (1.0 / k2 + 2.0, 1.25)):
            s_star = (p / (q * beta * r)) ** (1.0 / r)
            horizon = max(horizon, (s_star - 1.0) / (k2 * b.omega_max))
    ts = geometric_times(horizon, config.delta)
    vals = np.asarray(a_of_t(ts))
    j = int(np.argmax(vals))
    best = float(vals[j])
    lo = float(ts[max(j - 1, 0)])
    hi = float(ts[min(j + 1, ts.size - 1)])
    if hi > lo:
        res = minimize_scalar(lambda t: -a_of_t(t), bounds=(lo, hi),
                              method="bounded",
                              options={"xatol": 1e-12 * max(hi, 1.0)})
        best = max(best, float(-res.fun))

    # analytic tail: every constituent is decreasing past the grid end,
    # so the tail supremum is bounded by the majorants evaluated there
    s_end = 1.0 + k2 * b.omega_max * float(ts[-1])
    rho = b.omega_min / b.omega_max
    M = b.b0_l1 + 0.5 * b.v0_l2sq
    bmax_end = M * rho ** (-1.0 / k2) * s_end ** (-1.0 / k2)
    tail_sup = 2.0 * Cc * s_end ** (1.0 / k2 - 1.0) \
        * (b.v0_l2sq + bmax_end**2) ** 0.25
    if b.lap_sum > 0:
        beta, r = tail.beta, tail.r
        w = b.omega_min
        B0 = 1.0 + 1.0 / w + M / w + M / w**2
        C0 = 1.0 / w + 1.0 / w**2 + M / w**2 + M / w**3
        D0 = 1.0 / w**2 + 1.0 / w**3
        Y0 = b.lap_sum
        for K0, p, q in ((B0, 1.0 / k2 + 1.0, 0.25),
                         (C0, 1.0 / k2 + 2.0, 0.75),
                         (D0, 1.0 / k2 + 2.0, 1.25)):
            logv = (math.log(2.0 * Cc * K0) + q * math.log(Y0)
                    + p * math.log(s_end) - q * beta * (s_end**r - 1.0))
            tail_sup += math.exp(min(logv, 700.0))
    return max(best, tail_sup)


def check_corollary(bounds: DataBounds, config: CriterionConfig):
    """The two closed-form sufficient conditions (z1, z2)."""
    _require_kappa2(bounds)
    lhs = bounds.b_min / bounds.omega_max
    z1 = lhs > 2.0 * config.c_omega_kappa * (bounds.b0_l1 + 0.5 * bounds.v0_l2sq)
    if bounds.lap_sum == 0.0:
        z2 = lhs > 0.0
    else:
        a0 = compute_a0(bounds, config)
        z2 = lhs > a0 * bounds.lap_sum**0.25
    return z1, z2


def full_report(bounds: DataBounds, config: CriterionConfig) -> CriterionReport:
    """check_glob_add augmented with a0 and the corollary verdicts."""
    report = check_glob_add(bounds, config)
    report.a0 = compute_a0(bounds, config)
    z1, z2 = check_corollary(bounds, config)
    report.z1_holds = z1
    report.z2_holds = z2
    return report
