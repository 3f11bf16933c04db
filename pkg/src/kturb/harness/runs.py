"""Run orchestration: simulate, verify, manufactured-solution order
checks, and the criterion front end."""

import dataclasses
import math
import os
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .. import ops
from ..criterion import CriterionConfig, CriterionReport, check_glob_add, full_report
from ..dynamics import Forcing, ModelParams, State, TendencyKernel, state_to_hat
from ..envelopes import EnvelopeSet
from ..errors import KturbError, VerificationFailure
from ..fields import ScalarField, VectorField
from ..integrator import StepControl, advance, compute_dt
from .config import RunConfig
from .initial import extract_bounds, generate_initial
from .monitor import Monitor, write_csv
from .snapshot import write_snapshot


@dataclass
class SimulationResult:
    final_state: State
    records: list
    bounds: object
    monitor_path: Optional[str] = None
    snapshot_path: Optional[str] = None


def run_simulate(config: RunConfig) -> SimulationResult:
    """Advance the configured initial data to t_end, sampling monitors
    every monitor_every steps.  Partial monitor output is flushed even
    when the march aborts."""
    grid = config.make_grid()
    state0 = generate_initial(config.initial, grid)
    bounds = extract_bounds(state0, config.params, config.c_p_override)
    mon = Monitor(bounds)
    mon.sample(state0)

    out = config.out_dir
    if out:
        os.makedirs(out, exist_ok=True)
    callbacks = [(config.monitor_every, mon.sample)]
    snap_count = [0]
    if out and config.snapshot_every > 0:
        def snap_cb(state):
            snap_count[0] += 1
            write_snapshot(os.path.join(out, f"state_{snap_count[0]:05d}.snap"),
                           state, config.params)
        callbacks.append((config.snapshot_every, snap_cb))

    monitor_path = os.path.join(out, "monitor.csv") if out else None
    try:
        final = advance(state0, config.t_end, config.params, config.control,
                        callbacks=callbacks)
    except KturbError:
        mon.finalize()
        if monitor_path:
            write_csv(monitor_path, mon.records)
        raise
    if final.t > mon.records[-1].t:
        mon.sample(final)
    mon.finalize()
    snapshot_path = None
    if out:
        write_csv(monitor_path, mon.records)
        snapshot_path = os.path.join(out, "final.snap")
        write_snapshot(snapshot_path, final, config.params)
    return SimulationResult(final, mon.records, bounds,
                            monitor_path, snapshot_path)


@dataclass
class VerificationReport:
    passed: bool
    failures: List[str]
    records: list
    criterion_holds: bool
    x2_within_y2: Optional[bool]
    tol_abs_coeff: float
    tol_rel: float
    result: SimulationResult = None


def run_verify(config: RunConfig) -> VerificationReport:
    """Simulate, then check every sampled state against the analytic
    envelopes.

    Absolute tolerances are 1e-6*scale + 10*dt^2 (scale = local envelope
    value), relative ones 1e-6 + 10*dt^2, reflecting the O(dt^2)-or-
    better accuracy of the sampled comparisons.  The H2 aggregate X2 is
    checked for non-growth (within 1%) whenever the existence margin is
    positive on [0, t_end]; the pointwise X2 <= Y2 comparison is only
    reported, not asserted.
    """
    result = run_simulate(config)
    bounds = result.bounds
    env = EnvelopeSet(bounds)
    grid = config.make_grid()
    state_probe = State(v=VectorField.zero(grid),
                        omega=ScalarField.constant(grid, bounds.omega_max),
                        b=ScalarField.constant(grid, bounds.b_min))
    dt = compute_dt(state_probe, config.params, config.control)
    tol_rel = 1e-6 + 10.0 * dt * dt

    crit_cfg = dataclasses.replace(config.criterion, horizon=config.t_end)
    crit = check_glob_add(bounds, crit_cfg)

    failures = []

    def fail(rec, what, measured, bound):
        failures.append(
            f"t = {rec.t:.8g}: {what}: measured {measured:.12g} vs "
            f"bound {bound:.12g}")

    x2_0 = result.records[0].x2
    x2_within_y2 = True
    for rec in result.records:
        t = rec.t

        def tol(scale):
            return 1e-6 * abs(scale) + 10.0 * dt * dt

        lo = float(env.omega_lower(t))
        hi = float(env.omega_upper(t))
        if rec.min_omega < lo - tol(lo):
            fail(rec, "min omega below lower envelope", rec.min_omega, lo)
        if rec.max_omega > hi + tol(hi):
            fail(rec, "max omega above upper envelope", rec.max_omega, hi)
        bl = float(env.b_lower(t))
        if rec.min_b < bl - tol(bl):
            fail(rec, "min b below lower envelope", rec.min_b, bl)
        if bounds.kappa2 > 0.5:
            ve = float(env.v_l2_envelope(t))
            if rec.v_l2 > ve * (1.0 + tol_rel):
                fail(rec, "velocity L2 above decay envelope", rec.v_l2, ve)
        b1 = float(env.b_l1_upper(t, "min"))
        if rec.b_l1 > b1 * (1.0 + tol_rel):
            fail(rec, "b L1 mass above decay envelope", rec.b_l1, b1)
        if crit.holds and rec.x2 > 1.01 * x2_0:
            fail(rec, "X2 grew beyond 1% of its initial value", rec.x2, x2_0)
        if bounds.kappa2 > 0.5 and rec.x2 > float(env.y2(t)) * (1.0 + tol_rel):
            x2_within_y2 = False

    report = VerificationReport(
        passed=not failures,
        failures=failures,
        records=result.records,
        criterion_holds=crit.holds,
        x2_within_y2=x2_within_y2 if bounds.kappa2 > 0.5 else None,
        tol_abs_coeff=10.0 * dt * dt,
        tol_rel=tol_rel,
        result=result,
    )
    if failures:
        raise VerificationFailure(failures[0], report=report)
    return report


# ---------------------------------------------------------------------------
# manufactured-solution temporal order check

@dataclass
class ConvergenceReport:
    dts: List[float]
    errors: dict       # field name -> list of L2 errors, one per dt
    orders: dict       # field name -> list of observed orders
    passed: bool
    threshold: float = 3.8


class _Manufactured:
    """Band-limited exact fields with prescribed time modulation.

    v*(x,t) = a(t) (sin k2 x2, sin k3 x3, sin k1 x1) is divergence-free
    and zero-mean; omega* and b* oscillate around 2 and stay positive.
    The modulation frequency is large enough that the RK4 error clears
    the roundoff floor at the smallest tested dt.
    """

    def __init__(self, grid, params, a=None, da=None, gamma=None, dgamma=None):
        self.grid = grid
        self.params = params
        if a is not None:
            self.a, self.da = a, da
        if gamma is not None:
            self.gamma, self.dgamma = gamma, dgamma
        x1, x2, x3 = grid.coordinates()
        k = [2.0 * math.pi / L for L in grid.lengths]
        self.pv = np.stack([
            np.broadcast_to(np.sin(k[1] * x2), grid.resolution),
            np.broadcast_to(np.sin(k[2] * x3), grid.resolution),
            np.broadcast_to(np.sin(k[0] * x1), grid.resolution),
        ])
        self.pw = np.broadcast_to(np.cos(k[0] * x1), grid.resolution)
        self.pb = np.broadcast_to(np.sin(k[1] * x2), grid.resolution)
        self.kernel = TendencyKernel(grid, params)

    @staticmethod
    def a(t):
        return 0.1 * (1.0 + 0.5 * np.sin(5.0 * t))

    @staticmethod
    def da(t):
        return 0.25 * np.cos(5.0 * t)

    @staticmethod
    def gamma(t):
        return 0.5 + 0.25 * np.cos(5.0 * t)

    @staticmethod
    def dgamma(t):
        return -1.25 * np.sin(5.0 * t)

    def exact(self, t):
        v = self.a(t) * self.pv
        om = 2.0 + self.gamma(t) * self.pw
        b = 2.0 + self.gamma(t) * self.pb
        return np.concatenate([v, om[None], b[None]])

    def exact_ddt(self, t):
        dv = self.da(t) * self.pv
        dom = self.dgamma(t) * self.pw
        db = self.dgamma(t) * self.pb
        return np.concatenate([dv, dom[None], db[None]])

    def forcing(self, t):
        """F = d/dt exact - discrete RHS(exact), so the exact fields
        solve the forced semi-discrete system with zero spatial error."""
        g = self.grid
        rhs = g.irfft(self.kernel(g.rfft(self.exact(t)), t))
        F = self.exact_ddt(t) - rhs
        return F[:3], F[3], F[4]

    def initial_state(self):
        y = self.exact(0.0)
        g = self.grid
        return State(v=VectorField(g, y[:3].copy()),
                     omega=ScalarField(g, y[3].copy()),
                     b=ScalarField(g, y[4].copy()), t=0.0)


def run_mms(config: RunConfig, dts=(4e-3, 2e-3, 1e-3),
            threshold=3.8) -> ConvergenceReport:
    """Temporal convergence study against a manufactured solution."""
    grid = config.make_grid()
    mms = _Manufactured(grid, config.params)
    forcing = Forcing(func=mms.forcing)
    t_end = config.t_end
    errors = {"v": [], "omega": [], "b": []}
    for dt in dts:
        control = StepControl(dt_max=dt, dt_fixed=dt,
                              eps_pos=config.control.eps_pos)
        final = advance(mms.initial_state(), t_end, config.params, control,
                        forcing=forcing)
        exact = mms.exact(t_end)
        errors["v"].append(float(np.sqrt(sum(
            ops.lp_norm(grid, final.v.values[i] - exact[i], 2) ** 2
            for i in range(3)))))
        errors["omega"].append(
            ops.lp_norm(grid, final.omega.values - exact[3], 2))
        errors["b"].append(
            ops.lp_norm(grid, final.b.values - exact[4], 2))
    orders = {}
    passed = True
    for name, errs in errors.items():
        ords = []
        for i in range(len(dts) - 1):
            ratio = math.log2(dts[i] / dts[i + 1])
            ords.append(math.log2(errs[i] / errs[i + 1]) / ratio)
        orders[name] = ords
        if min(ords) < threshold:
            passed = False
    return ConvergenceReport(dts=list(dts), errors=errors, orders=orders,
                             passed=passed, threshold=threshold)


# ---------------------------------------------------------------------------
# criterion front end

def run_check(config: RunConfig, bounds=None) -> CriterionReport:
    """Evaluate the existence criterion; bounds default to statistics of
    the configured initial data."""
    if bounds is None:
        grid = config.make_grid()
        state0 = generate_initial(config.initial, grid)
        bounds = extract_bounds(state0, config.params, config.c_p_override)
    return full_report(bounds, config.criterion)


def format_report(report: CriterionReport) -> str:
    lines = []
    verdict = "HOLDS" if report.holds else "VIOLATED"
    hz = "inf" if math.isinf(report.horizon) else "%.17g" % report.horizon
    lines.append(f"existence criterion: {verdict} "
                 f"(C = {report.c_omega_kappa:g}, horizon = {hz})")
    if report.first_violation_t is not None:
        lines.append(f"first violation at t = {report.first_violation_t:.12g}")
    if report.a0 is not None:
        lines.append(f"a0 = {report.a0:.12g}")
    if report.z1_holds is not None:
        lines.append(f"z1 holds: {report.z1_holds}")
    if report.z2_holds is not None:
        lines.append(f"z2 holds: {report.z2_holds}")
    n = len(report.margin_samples)
    if n:
        m0 = report.margin_samples[0][1]
        mN = report.margin_samples[-1][1]
        lines.append(f"margin sampled at {n} points: "
                     f"start {m0:.6g}, end {mN:.6g}")
    return "\n".join(lines) + "\n"


def report_to_kv(report: CriterionReport) -> str:
    """Machine-readable key = value mirror of the report."""
    def fmt(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if v is None:
            return "none"
        if isinstance(v, float):
            return "%.17g" % v
        return str(v)

    pairs = [
        ("holds", report.holds),
        ("first_violation_t", report.first_violation_t),
        ("c_omega_kappa", report.c_omega_kappa),
        ("horizon", report.horizon),
        ("a0", report.a0),
        ("z1_holds", report.z1_holds),
        ("z2_holds", report.z2_holds),
        ("margin_samples", len(report.margin_samples)),
        ("margin_start", report.margin_samples[0][1]
         if report.margin_samples else None),
        ("margin_end", report.margin_samples[-1][1]
         if report.margin_samples else None),
    ]
    return "".join(f"{k} = {fmt(v)}\n" for k, v in pairs)
