"""Trajectory-level numerical diagnostics.

Conservation drift, a Benettin largest-Lyapunov estimate, observed
convergence order, local-maximum counting for the two occupation series, and
the coupling-power fit of their discrepancy.  Everything is deterministic:
identical configs produce bit-identical reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import (
    DiagnosticError,
    GaussianMoments,
    OscBasis,
    UsageError,
    quanta_expectation,
)
from .dynamics import (
    ScenarioConfig,
    flat_from_state,
    initial_state,
    integrate,
    make_guard,
    make_rhs,
    make_rhs_augmented,
    rk4_step,
    scenario_with,
)

__all__ = [
    "LyapunovEstimate",
    "DiscrepancyScaling",
    "DiagnosticsReport",
    "energy_drift",
    "benettin_lyapunov",
    "lyapunov_max",
    "convergence_order",
    "linear_test_order",
    "structure_count",
    "discrepancy_scaling",
    "max_abs_discrepancy",
    "max_abs_remainder",
    "adiabatic_invariant_drift",
]


@dataclass(frozen=True)
class LyapunovEstimate:
    """Largest Lyapunov exponent estimate with its averaging window."""

    value: float
    n_segments: int
    window: tuple[float, float]
    failed: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        return {"value": self.value, "n_segments": self.n_segments,
                "window": list(self.window), "failed": self.failed,
                "note": self.note}


@dataclass(frozen=True)
class DiscrepancyScaling:
    """Power-law fit of max|N_ours - N_cdms| against the coupling."""

    power: float | None
    couplings: tuple[float, ...]
    amplitudes: tuple[float, ...]
    remainders: tuple[float, ...]
    zero_signal: bool = False
    note: str = ""


@dataclass(frozen=True)
class DiagnosticsReport:
    """Bundle of per-run diagnostics; fields are None when not computed."""

    energy_drift: float | None = None
    lyapunov: LyapunovEstimate | None = None
    order: float | None = None
    extrema_ours: int | None = None
    extrema_cdms: int | None = None
    discrepancy_power: float | None = None

    def to_dict(self) -> dict:
        return {
            "energy_drift": self.energy_drift,
            "lyapunov": self.lyapunov.to_dict() if self.lyapunov else None,
            "convergence_order": self.order,
            "extrema_ours": self.extrema_ours,
            "extrema_cdms": self.extrema_cdms,
            "discrepancy_power": self.discrepancy_power,
        }


def energy_drift(records) -> float:
    """Max over the series of |Etot(t) - Etot(0)| / |Etot(0)|."""
    if len(records) < 2:
        raise UsageError("energy_drift needs at least two records")
    e0 = records[0].Etot
    if e0 == 0.0:
        raise UsageError("energy_drift undefined for Etot(0) == 0")
    return max(abs(r.Etot - e0) for r in records) / abs(e0)


# ---------------------------------------------------------------------------
# Lyapunov (Benettin two-trajectory renormalization)
# ---------------------------------------------------------------------------

def benettin_lyapunov(rhs, y0, *, dt, renorm_interval, horizon,
                      displacement=1e-8, displacement_index=0,
                      transient_fraction=0.1, guard=None) -> LyapunovEstimate:
    """Generic Benettin estimate on an arbitrary flow.

    Two copies of the system start `displacement` apart in component
    `displacement_index`; after every renorm_interval the log separation
    growth is recorded and the companion is pulled back to the reference.
    The first transient_fraction of segments is discarded, the rest averaged.
    """
    if not (renorm_interval > 0.0):
        raise UsageError("renorm_interval must be positive")
    if not (horizon > 0.0):
        raise UsageError("horizon must be positive")
    n_seg = max(1, round(horizon / renorm_interval))
    n_sub = max(1, round(renorm_interval / dt))
    h = renorm_interval / n_sub
    y_ref = tuple(y0)
    y_cmp = tuple(v + (displacement if i == displacement_index else 0.0)
                  for i, v in enumerate(y0))
    logs = []
    t = 0.0
    for seg in range(n_seg):
        for k in range(n_sub):
            tk = t + k * h
            try:
                y_ref = rk4_step(rhs, tk, y_ref, h)
                y_cmp = rk4_step(rhs, tk, y_cmp, h)
            except (ZeroDivisionError, OverflowError):
                return _finish_benettin(logs, n_seg, transient_fraction,
                                        renorm_interval, horizon, failed=True,
                                        note=f"singular evaluation at t={tk}")
        t += renorm_interval
        if guard is not None:
            hit = guard(t, y_ref) or guard(t, y_cmp)
            if hit is not None:
                return _finish_benettin(logs, n_seg, transient_fraction,
                                        renorm_interval, horizon, failed=True,
                                        note=f"trajectory aborted: {hit[1]}")
        d = math.sqrt(sum((a - b) ** 2 for a, b in zip(y_ref, y_cmp)))
        if d == 0.0:
            logs.append(0.0)
            y_cmp = tuple(v + (displacement if i == displacement_index else 0.0)
                          for i, v in enumerate(y_ref))
            continue
        logs.append(math.log(d / displacement))
        scale = displacement / d
        y_cmp = tuple(a + (b - a) * scale for a, b in zip(y_ref, y_cmp))
    return _finish_benettin(logs, n_seg, transient_fraction,
                            renorm_interval, horizon)


def _finish_benettin(logs, n_seg, transient_fraction, renorm_interval,
                     horizon, failed=False, note=""):
    skip = math.ceil(transient_fraction * n_seg)
    kept = logs[skip:]
    if not kept:
        return LyapunovEstimate(value=math.nan, n_segments=0,
                                window=(skip * renorm_interval, horizon),
                                failed=True,
                                note=note or "no segments survived the transient cut")
    value = sum(kept) / (len(kept) * renorm_interval)
    return LyapunovEstimate(value=value, n_segments=len(kept),
                            window=(skip * renorm_interval, horizon),
                            failed=failed, note=note)


def lyapunov_max(config: ScenarioConfig, renorm_interval: float = 1.0,
                 horizon: float | None = None,
                 displacement: float = 1e-8) -> LyapunovEstimate:
    """Largest Lyapunov exponent of the scenario's (A, Adot, rho, rhodot) flow.

    Always runs in the pinney representation with the config's fixed step;
    the initial displacement is applied to A.
    """
    pconf = replace(config, representation="pinney")
    y0 = flat_from_state(initial_state(pconf))
    rhs = make_rhs("pinney", config.params)
    guard = make_guard("pinney", config.params, config.rho_min)
    return benettin_lyapunov(rhs, y0, dt=config.dt,
                             renorm_interval=renorm_interval,
                             horizon=config.t_end if horizon is None else horizon,
                             displacement=displacement,
                             displacement_index=0,
                             transient_fraction=0.1, guard=guard)


# ---------------------------------------------------------------------------
# convergence order
# ---------------------------------------------------------------------------

def _check_dt_list(dt_list) -> None:
    if len(dt_list) < 3:
        raise UsageError("convergence study needs at least three step sizes")
    for a, b in zip(dt_list, dt_list[1:]):
        if not math.isclose(a / b, 2.0, rel_tol=1e-9):
            raise UsageError(f"step sizes must halve: got {a} then {b}")


def convergence_order(config: ScenarioConfig, dt_list) -> float:
    """Observed order from self-convergence of the final state.

    Runs the scenario at each step size (which must halve down the list),
    takes Euclidean distances between successive final states, and averages
    the log2 ratios.  Classical rk4 on a smooth trajectory sits near 4.
    """
    _check_dt_list(dt_list)
    finals = []
    for dt in dt_list:
        traj = integrate(replace(config, method="rk4", dt=dt))
        if not traj.completed:
            raise DiagnosticError(
                f"run at dt={dt} aborted: {traj.abort_reason}")
        r = traj.records[-1]
        finals.append((r.A, r.Adot, r.rho, r.rhodot))
    diffs = []
    for a, b in zip(finals, finals[1:]):
        diffs.append(math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b))))
    if any(d == 0.0 for d in diffs):
        raise DiagnosticError("successive runs coincide; no error signal to fit")
    orders = [math.log2(d0 / d1) for d0, d1 in zip(diffs, diffs[1:])]
    return sum(orders) / len(orders)


def linear_test_order(dt_list=(0.04, 0.02, 0.01), t_end: float = 5.0) -> float:
    """Self-test of the stepper on Addot = -A against the exact cosine.

    Uses true errors at t_end for A(0)=1, Adot(0)=0, so the estimate is
    anchored to a known solution rather than self-convergence.
    """
    _check_dt_list(dt_list)

    def rhs(t, y):
        return (y[1], -y[0])

    errs = []
    for dt in dt_list:
        n = max(1, round(t_end / dt))
        h = t_end / n
        y = (1.0, 0.0)
        for i in range(n):
            y = rk4_step(rhs, i * h, y, h)
        errs.append(math.hypot(y[0] - math.cos(t_end), y[1] + math.sin(t_end)))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    return sum(orders) / len(orders)


# ---------------------------------------------------------------------------
# structure and discrepancy metrics
# ---------------------------------------------------------------------------

def structure_count(series, floor: float = 1e-9) -> int:
    """Number of strict local maxima rising at least `floor` above both neighbors.

    The floor is absolute because the occupation series legitimately touch
    zero, where any relative floor would blow up.
    """
    if len(series) < 3:
        raise UsageError("structure_count needs at least three samples")
    if floor < 0.0:
        raise UsageError("noise floor must be nonnegative")
    count = 0
    for prev, cur, nxt in zip(series, series[1:], series[2:]):
        if cur > prev + floor and cur > nxt + floor:
            count += 1
    return count


def max_abs_discrepancy(records) -> float:
    """max over the series of |N_ours - N_cdms|."""
    return max(abs(r.N_ours - r.N_cdms) for r in records)


def max_abs_remainder(records) -> float:
    """max over the series of |(N_ours - N_cdms) - dN_leading|."""
    return max(abs((r.N_ours - r.N_cdms) - r.dN_leading) for r in records)


def discrepancy_scaling(base_config: ScenarioConfig, e_list) -> DiscrepancyScaling:
    """Fit max|N_ours - N_cdms| against the coupling over a scenario family.

    Couplings must form a geometric progression (all zero is allowed and
    reported as a zero-signal result) and every leg must start inside the
    weak-coupling regime e^2 A0^2 / m^2 < 1.  Also returns, per coupling, the
    worst deviation of the measured discrepancy from its leading-order law,
    for the next-order remainder check.
    """
    e_list = tuple(float(e) for e in e_list)
    if len(e_list) < 3:
        raise UsageError("discrepancy scaling needs at least three couplings")
    if any(e < 0.0 for e in e_list):
        raise UsageError("couplings must be nonnegative")
    if all(e == 0.0 for e in e_list):
        legs = [integrate(scenario_with(base_config, e=0.0)) for _ in e_list]
        amps = tuple(max_abs_discrepancy(t.records) for t in legs)
        rems = tuple(max_abs_remainder(t.records) for t in legs)
        return DiscrepancyScaling(power=None, couplings=e_list, amplitudes=amps,
                                  remainders=rems, zero_signal=True,
                                  note="zero signal: all couplings are zero")
    if any(e == 0.0 for e in e_list):
        raise UsageError("couplings must be all zero or a geometric progression "
                         "of positive values")
    ratios = [a / b for a, b in zip(e_list, e_list[1:])]
    if any(not math.isclose(r, ratios[0], rel_tol=1e-9) for r in ratios):
        raise UsageError(f"couplings must form a geometric progression, got {e_list}")
    m = base_config.params.m
    for e in e_list:
        if (e * base_config.A0 / m) ** 2 >= 1.0:
            raise UsageError(
                f"coupling e={e} puts the start outside the weak regime "
                f"e^2 A0^2/m^2 < 1")
    amps = []
    rems = []
    for e in e_list:
        traj = integrate(scenario_with(base_config, e=e))
        if not traj.completed:
            raise DiagnosticError(f"scaling leg e={e} aborted: {traj.abort_reason}")
        amps.append(max_abs_discrepancy(traj.records))
        rems.append(max_abs_remainder(traj.records))
    if all(a == 0.0 for a in amps):
        return DiscrepancyScaling(power=None, couplings=e_list,
                                  amplitudes=tuple(amps), remainders=tuple(rems),
                                  zero_signal=True,
                                  note="zero signal: no measurable discrepancy")
    if any(a <= 0.0 for a in amps):
        raise DiagnosticError("mixed zero/nonzero discrepancy amplitudes; "
                              "cannot fit a power law")
    slope = float(np.polyfit(np.log(e_list), np.log(amps), 1)[0])
    return DiscrepancyScaling(power=slope, couplings=e_list,
                              amplitudes=tuple(amps), remainders=tuple(rems))


# ---------------------------------------------------------------------------
# adiabatic invariant
# ---------------------------------------------------------------------------

def adiabatic_invariant_drift(config: ScenarioConfig) -> float:
    """Worst-case quanta of the invariant basis along the trajectory.

    The moments are evolved as their own linear system while a Pinney width
    is co-integrated in the same state vector; at every sample the moments
    are counted in the basis built from that independent width
    (W = 1/rho^2, sigma = -rhodot/rho).  In exact arithmetic the count stays
    at its initial zero; the returned max |N| measures the combined
    integration error, and is the testable form of the invariance of the
    conserved quadratic operator.
    """
    params = config.params
    state0 = initial_state(replace(config, representation="pinney"))
    r0, rd0 = state0.quantum.rho, state0.quantum.rhodot
    h = params.hbar
    inv = 1.0 / r0
    y = (state0.A, state0.Adot,
         0.5 * h * r0 * r0,
         0.5 * h * r0 * rd0,
         0.5 * h * (rd0 * rd0 + inv * inv),
         r0, rd0)
    rhs = make_rhs_augmented(params)
    guard = make_guard("augmented", params, config.rho_min)
    n = max(1, round(config.t_end / config.dt))
    step = config.t_end / n
    worst = 0.0
    for i in range(1, n + 1):
        y = rk4_step(rhs, (i - 1) * step, y, step)
        hit = guard(i * step, y)
        if hit is not None:
            raise DiagnosticError(f"augmented run aborted: {hit[1]}")
        if i % config.sample_every == 0 or i == n:
            mom = GaussianMoments(x2=y[2], p2=y[4], c=y[3])
            basis = OscBasis(W=1.0 / (y[5] * y[5]), sigma=-y[6] / y[5])
            worst = max(worst, abs(quanta_expectation(mom, basis, h)))
    return worst
