"""Adaptive integration of the wave-frame ODE with blow-up capture.

The driver steps scipy's Dormand-Prince RK5(4) pair manually so that
every accepted step's dense interpolant can fill a uniform output grid
and so the first threshold crossing of a diverging trajectory can be
bracketed by bisection inside the step where it happens.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np
from scipy.integrate import RK45

from . import model

# Near-empty populations with a small prey and predator seed. Starting
# here reproduces the reference blow-up and decay behaviors; starting
# at a perturbed coexistence point does not, because several systems
# make that point unstable at every speed.
DEFAULT_IC = (0.01, 0.0, 0.01, 0.0)

COMPONENTS = "NMPQ"


class IntegrationError(Exception):
    pass


class StiffnessError(IntegrationError):
    """Step size underflow, distinct from blow-up."""


class PeakCountError(IntegrationError):
    """Too few post-transient peaks to support a classification."""


@dataclasses.dataclass(frozen=True)
class IntegrationOptions:
    zeta_span: tuple = (0.0, 300.0)
    initial_state: tuple | None = None  # None means DEFAULT_IC
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float = np.inf
    blowup_threshold: float = 1e6
    sample_interval: float = 0.05

    def validate(self):
        z0, z1 = self.zeta_span
        if not z1 > z0:
            raise ValueError("zeta_span must be increasing")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.blowup_threshold <= 0:
            raise ValueError("blowup_threshold must be positive")
        if self.sample_interval <= 0:
            raise ValueError("sample_interval must be positive")


@dataclasses.dataclass
class Trajectory:
    zetas: np.ndarray
    states: np.ndarray
    termination: str            # "completed" or "blowup"
    zeta_star: float | None
    v: float
    system: str
    initial_state: tuple
    options: IntegrationOptions
    n_accepted: int
    n_rejected: int
    n_rhs: int

    def component(self, name: str) -> np.ndarray:
        return self.states[:, COMPONENTS.index(name)]


def integrate(spec: model.ModelSpec, v: float,
              opts: IntegrationOptions | None = None) -> Trajectory:
    """Integrate the wave-frame system over opts.zeta_span.

    Output is sampled on the uniform grid z0 + i*sample_interval via the
    per-step dense interpolant. When the state max-norm exceeds the
    blow-up threshold the run stops, the crossing is bisected inside the
    offending step, and samples past the crossing are discarded.
    """
    opts = opts or IntegrationOptions()
    opts.validate()
    z0, z1 = float(opts.zeta_span[0]), float(opts.zeta_span[1])
    ic = opts.initial_state if opts.initial_state is not None else DEFAULT_IC
    y0 = np.asarray(ic, float)
    if y0.shape != (4,) or not np.all(np.isfinite(y0)):
        raise ValueError("initial state must be 4 finite numbers")
    thr = opts.blowup_threshold
    if np.max(np.abs(y0)) > thr:
        raise ValueError("initial state already beyond the blow-up threshold")

    def rhs(_z, y):
        return model.evaluate_rhs(spec, v, y)

    solver = RK45(rhs, z0, y0, z1, rtol=opts.rel_tol, atol=opts.abs_tol,
                  max_step=opts.max_step)
    dt = opts.sample_interval
    grid_z = [z0]
    grid_y = [y0.copy()]
    next_t = z0 + dt
    termination = "completed"
    zeta_star = None
    n_accepted = 0
    min_step = 1e-12 * (z1 - z0)

    while solver.status == "running":
        message = solver.step()
        if solver.status == "failed":
            raise StiffnessError(
                f"integrator failed near zeta = {solver.t:.6g}: {message}")
        n_accepted += 1
        if solver.step_size is not None and solver.step_size < min_step:
            raise StiffnessError(
                f"step size underflow ({solver.step_size:.3e}) near "
                f"zeta = {solver.t:.6g}")
        dense = solver.dense_output()
        while next_t <= solver.t + 1e-15:
            yv = dense(next_t)
            if np.max(np.abs(yv)) > thr:
                break
            grid_z.append(next_t)
            grid_y.append(yv)
            next_t += dt
        if np.max(np.abs(solver.y)) > thr:
            lo, hi = solver.t_old, solver.t
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if np.max(np.abs(dense(mid))) > thr:
                    hi = mid
                else:
                    lo = mid
            termination = "blowup"
            zeta_star = float(hi)
            break

    n_rhs = int(solver.nfev)
    n_rejected = max(0, (n_rhs - 1) // 6 - n_accepted)
    return Trajectory(zetas=np.array(grid_z), states=np.array(grid_y),
                      termination=termination, zeta_star=zeta_star, v=v,
                      system=spec.system, initial_state=tuple(y0),
                      options=opts, n_accepted=n_accepted,
                      n_rejected=n_rejected, n_rhs=n_rhs)


def resample_series(traj: Trajectory, component: str = "N"):
    """One state component on the uniform grid, plus its spacing."""
    if component not in COMPONENTS:
        raise ValueError(f"component must be one of {COMPONENTS}")
    if len(traj.zetas) == 0:
        raise ValueError("empty trajectory")
    return traj.component(component), traj.options.sample_interval


def find_peaks(zetas, values):
    """Local maxima by 3-point comparison with quadratic refinement.

    Returns (peak_zetas, peak_values) as arrays. The refinement fits a
    parabola through the three samples around each maximum, so peak
    positions are not snapped to the grid.
    """
    zp, vp = [], []
    if len(values) < 3:
        return np.array(zp), np.array(vp)
    h = zetas[1] - zetas[0]
    for i in range(1, len(values) - 1):
        a, b, c = values[i - 1], values[i], values[i + 1]
        if b >= a and b > c:
            den = a - 2.0 * b + c
            off = 0.5 * (a - c) / den if den != 0.0 else 0.0
            zp.append(zetas[i] + off * h)
            vp.append(b - 0.25 * (a - c) * off)
    return np.array(zp), np.array(vp)


@dataclasses.dataclass
class OscillationSummary:
    classification: str  # decay_to_fixed_point | limit_cycle | aperiodic_bounded | blowup
    final_state: tuple
    zeta_star: float | None
    d_initial: float
    d_final: float
    n_peaks: int                  # post-transient peak count of N
    amplitude_trend: tuple        # last 10 (or fewer) peak values of N
    peak_spread: float | None     # relative spread of the last 10 peaks
    period_estimate: float | None


def summarize_oscillation(traj: Trajectory, fp,
                          transient_fraction: float = 0.2) -> OscillationSummary:
    """Classify a trajectory against a reference fixed point.

    Order of tests: blow-up, then decay (final distance to the fixed
    point below 1e-4 of the initial distance, with an absolute floor of
    1e-4 so deep spirals that start close still qualify), then limit
    cycle (at least 12 post-transient peaks of N whose last 10 heights
    agree to better than 1%). Anything else bounded is aperiodic.
    """
    if not 0.0 <= transient_fraction <= 0.9:
        raise ValueError("transient_fraction must lie in [0, 0.9]")
    if hasattr(fp, "state"):
        ref = fp.state()
    else:
        N0, P0 = fp
        ref = np.array([N0, 0.0, P0, 0.0])
    y0 = np.asarray(traj.initial_state)
    y_end = traj.states[-1]
    d0 = float(np.linalg.norm(y0 - ref))
    dF = float(np.linalg.norm(y_end - ref))
    base = dict(final_state=tuple(float(x) for x in y_end),
                zeta_star=traj.zeta_star, d_initial=d0, d_final=dF)

    if traj.termination == "blowup":
        return OscillationSummary(classification="blowup", n_peaks=0,
                                  amplitude_trend=(), peak_spread=None,
                                  period_estimate=None, **base)
    if dF < max(1e-4 * d0, 1e-4):
        return OscillationSummary(classification="decay_to_fixed_point",
                                  n_peaks=0, amplitude_trend=(),
                                  peak_spread=None, period_estimate=None,
                                  **base)

    zp, vp = find_peaks(traj.zetas, traj.component("N"))
    z_lo = traj.zetas[0] + transient_fraction * (traj.zetas[-1] - traj.zetas[0])
    keep = zp >= z_lo
    zp, vp = zp[keep], vp[keep]
    if len(vp) < 12:
        raise PeakCountError(
            f"only {len(vp)} post-transient peaks; classification needs at "
            "least 12 (lengthen the span or lower transient_fraction)")
    last_z, last_v = zp[-10:], vp[-10:]
    spread = float((last_v.max() - last_v.min()) / abs(last_v.mean()))
    period = float(np.mean(np.diff(last_z)))
    label = "limit_cycle" if spread < 0.01 else "aperiodic_bounded"
    return OscillationSummary(classification=label, n_peaks=int(len(vp)),
                              amplitude_trend=tuple(float(x) for x in last_v),
                              peak_spread=spread, period_estimate=period,
                              **base)


def write_trajectory_csv(traj: Trajectory, path):
    with open(path, "w") as fh:
        fh.write("zeta,N,M,P,Q\n")
        for z, row in zip(traj.zetas, traj.states):
            fh.write("%.17g,%.17g,%.17g,%.17g,%.17g\n"
                     % (z, row[0], row[1], row[2], row[3]))


def trajectory_metadata(traj: Trajectory, spec: model.ModelSpec) -> dict:
    """Sidecar document describing one run, JSON-ready."""
    return {
        "system": spec.system,
        "params": spec.params.as_dict(),
        "v": traj.v,
        "zeta_span": [float(traj.options.zeta_span[0]),
                      float(traj.options.zeta_span[1])],
        "initial_state": [float(x) for x in traj.initial_state],
        "rel_tol": traj.options.rel_tol,
        "abs_tol": traj.options.abs_tol,
        "sample_interval": traj.options.sample_interval,
        "blowup_threshold": traj.options.blowup_threshold,
        "termination": traj.termination,
        "zeta_star": traj.zeta_star,
        "n_samples": int(len(traj.zetas)),
        "n_accepted": traj.n_accepted,
        "n_rejected": traj.n_rejected,
        "n_rhs": traj.n_rhs,
    }


def write_metadata(traj: Trajectory, spec: model.ModelSpec, path):
    with open(path, "w") as fh:
        json.dump(trajectory_metadata(traj, spec), fh, indent=2, sort_keys=True)
        fh.write("\n")
