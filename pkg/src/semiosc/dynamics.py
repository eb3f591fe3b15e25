"""Time evolution of the coupled classical-quantum system.

The coupled first-order system is integrated without operator splitting, in
one of three equivalent quantum-sector representations:

pinney    y = (A, Adot, rho, rhodot)          rhoddot = -omega^2 rho + 1/rho^3
mode      y = (A, Adot, Re f, Im f, Re fdot, Im fdot)   fddot = -omega^2 f
moments   y = (A, Adot, x2, c, p2)            linear moment flow

All three share the classical back-reaction Addot = -e^2 A <x^2>.  Observables
are always computed from the exact state at sample times, never interpolated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .core import (
    DomainError,
    GaussianMoments,
    ModelParams,
    ModeSector,
    PinneySector,
    SemiState,
    SemiquantumError,
    UsageError,
    energies,
    frequency,
    occupation_difference_leading,
    occupation_numbers,
    state_effective_frequency,
    state_moments,
    validate_state,
)

__all__ = [
    "REPRESENTATIONS",
    "METHODS",
    "QUANTUM_INITS",
    "ScenarioConfig",
    "TimeSeriesRecord",
    "COLUMNS",
    "Trajectory",
    "init_vacuum",
    "init_adiabatic",
    "initial_state",
    "derivatives",
    "convert",
    "integrate",
    "record_observables",
    "make_rhs",
    "make_guard",
    "flat_from_state",
    "state_from_flat",
]

REPRESENTATIONS = ("pinney", "mode", "moments")
METHODS = ("rk4", "adaptive")
QUANTUM_INITS = ("vacuum", "explicit", "adiabatic")

STATUS_COMPLETED = "completed"
STATUS_SINGULARITY = "aborted-singularity"
STATUS_STEPFAIL = "aborted-stepfail"


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one run.

    quantum_init selects the initial quantum sector:
      vacuum    rho0 = omega(A0)**-0.5, rhodot0 = 0 (instantaneous ground state)
      explicit  rho0, rhodot0 given in the config
      adiabatic width started on the slowly-tracking solution (second
                adiabatic order), suppressing the startup oscillation that a
                plain vacuum start excites whenever omegadot(0) != 0

    method "rk4" is fixed-step classical Runge-Kutta with step dt;
    "adaptive" is an embedded 4(5) pair controlled by rtol/atol from dt_init.
    sample_every is the output stride in (accepted) steps; the initial state
    and the final state are always recorded.
    """

    params: ModelParams
    A0: float
    Adot0: float
    t_end: float
    representation: str = "pinney"
    method: str = "rk4"
    dt: float = 1e-3
    rtol: float = 1e-10
    atol: float = 1e-12
    dt_init: float = 1e-3
    sample_every: int = 10
    quantum_init: str = "vacuum"
    rho0: float | None = None
    rhodot0: float | None = None
    rho_min: float = 1e-8

    def __post_init__(self) -> None:
        if self.representation not in REPRESENTATIONS:
            raise UsageError(f"unknown representation {self.representation!r}")
        if self.method not in METHODS:
            raise UsageError(f"unknown method {self.method!r}")
        if self.quantum_init not in QUANTUM_INITS:
            raise UsageError(f"unknown quantum_init {self.quantum_init!r}")
        if not (self.t_end > 0.0):
            raise UsageError(f"t_end must be positive, got {self.t_end}")
        if not (self.dt > 0.0) or not (self.dt_init > 0.0):
            raise UsageError("dt and dt_init must be positive")
        if not (self.rtol > 0.0) or not (self.atol > 0.0):
            raise UsageError("rtol and atol must be positive")
        if self.sample_every < 1:
            raise UsageError(f"sample_every must be >= 1, got {self.sample_every}")
        if not (self.rho_min > 0.0):
            raise UsageError(f"rho_min must be positive, got {self.rho_min}")
        if self.quantum_init == "explicit":
            if self.rho0 is None or self.rhodot0 is None:
                raise UsageError("explicit quantum_init requires rho0 and rhodot0")
            if not (self.rho0 > 0.0):
                raise UsageError(f"rho0 must be positive, got {self.rho0}")


@dataclass(frozen=True)
class TimeSeriesRecord:
    """One sampled row of every observable.  Field order is the CSV schema."""

    t: float
    A: float
    Adot: float
    rho: float
    rhodot: float
    Omega: float
    Omegadot: float
    omega: float
    omegadot: float
    x2: float
    p2: float
    c: float
    N_ours: float
    N_cdms: float
    dN_leading: float
    Hx: float
    Etot: float
    corr: float

    def as_row(self) -> tuple[float, ...]:
        return tuple(getattr(self, f) for f in COLUMNS)


COLUMNS: tuple[str, ...] = tuple(f.name for f in fields(TimeSeriesRecord))


@dataclass(frozen=True)
class Trajectory:
    """Result of integrate(): sampled records plus how the run ended."""

    records: tuple[TimeSeriesRecord, ...]
    status: str
    abort_time: float | None = None
    abort_reason: str | None = None

    @property
    def completed(self) -> bool:
        return self.status == STATUS_COMPLETED


# ---------------------------------------------------------------------------
# initial states
# ---------------------------------------------------------------------------

def init_vacuum(A0: float, Adot0: float, params: ModelParams) -> SemiState:
    """Instantaneous-vacuum start: Omega(0) = omega(A0), Omegadot(0) = 0.

    Equivalently rho0 = omega0**-0.5, rhodot0 = 0, which also makes
    rhoddot(0) = 0: the width starts at its momentary Pinney equilibrium, and
    the shearless occupation starts at exactly zero.
    """
    omega0, _ = frequency(A0, Adot0, params)
    return SemiState(0.0, A0, Adot0, PinneySector(omega0 ** -0.5, 0.0))


def init_adiabatic(A0: float, Adot0: float, params: ModelParams) -> SemiState:
    """Start the width on the slow-tracking solution instead of the vacuum.

    A vacuum start fixes Omegadot(0) = 0; when omegadot(0) != 0 that mismatch
    excites an O(e^2) oscillation of Omega about its adiabatic track, which
    contaminates small-coupling scaling studies.  Here Omega(0) carries the
    second-order adiabatic shift and Omegadot(0) = omegadot(0), leaving only
    an O(e^4) startup residual:

        Omega(0)    = omega (1 - omegaddot/(4 omega^3) + 3 omegadot^2/(8 omega^4))
        Omegadot(0) = omegadot
    """
    omega0, omegadot0 = frequency(A0, Adot0, params)
    e2 = params.e * params.e
    x2_0 = 0.5 * params.hbar / omega0
    Addot0 = -e2 * A0 * x2_0
    omegaddot0 = (e2 * (Adot0 * Adot0 + A0 * Addot0) - omegadot0 * omegadot0) / omega0
    Omega0 = omega0 * (1.0 - 0.25 * omegaddot0 / omega0 ** 3
                       + 0.375 * (omegadot0 / (omega0 * omega0)) ** 2)
    if not (Omega0 > 0.0):
        raise DomainError("adiabatic start left the domain (Omega0 <= 0); "
                          "the scenario is not slowly driven")
    rho0 = Omega0 ** -0.5
    rhodot0 = -0.5 * Omega0 ** -1.5 * omegadot0
    return SemiState(0.0, A0, Adot0, PinneySector(rho0, rhodot0))


def initial_state(config: ScenarioConfig) -> SemiState:
    """Initial SemiState of a scenario, converted to its representation."""
    if config.quantum_init == "vacuum":
        state = init_vacuum(config.A0, config.Adot0, config.params)
    elif config.quantum_init == "adiabatic":
        state = init_adiabatic(config.A0, config.Adot0, config.params)
    else:
        state = SemiState(0.0, config.A0, config.Adot0,
                          PinneySector(config.rho0, config.rhodot0))
    return convert(state, config.representation, config.params)


# ---------------------------------------------------------------------------
# derivatives and representation conversion
# ---------------------------------------------------------------------------

def derivatives(state: SemiState, params: ModelParams):
    """Time derivative of every component, in the state's own representation.

    pinney  -> (Adot, Addot, rhodot, rhoddot)
    mode    -> (Adot, Addot, fdot, fddot)        complex quantum entries
    moments -> (Adot, Addot, dx2, dc, dp2)
    """
    rep = state.representation
    rhs = make_rhs(rep, params)
    d = rhs(state.t, flat_from_state(state))
    if rep == "mode":
        return (d[0], d[1], complex(d[2], d[3]), complex(d[4], d[5]))
    return d


def convert(state: SemiState, target: str, params: ModelParams) -> SemiState:
    """Re-express the quantum sector in another representation.

    Conversions are exact algebraic maps; pinney -> mode fixes the phase
    convention theta(0) = 0 (the mode function starts real positive).
    Sources are validated first: a mode state must carry Wronskian i*hbar, a
    moments state must be pure, otherwise ValidationError.
    """
    if target not in REPRESENTATIONS:
        raise UsageError(f"unknown representation {target!r}")
    validate_state(state, params)
    if state.representation == target:
        return state
    h = params.hbar
    if state.representation == "pinney":
        rho, rhodot = state.quantum.rho, state.quantum.rhodot
    else:
        mom = state_moments(state, params)
        rho = math.sqrt(2.0 * mom.x2 / h)
        rhodot = 2.0 * mom.c / (h * rho)
    if target == "pinney":
        quantum = PinneySector(rho, rhodot)
    elif target == "mode":
        amp = math.sqrt(0.5 * h)
        quantum = ModeSector(complex(amp * rho, 0.0),
                             complex(amp * rhodot, -amp / rho))
    else:
        inv = 1.0 / rho
        quantum = GaussianMoments(x2=0.5 * h * rho * rho,
                                  p2=0.5 * h * (rhodot * rhodot + inv * inv),
                                  c=0.5 * h * rho * rhodot)
    return SemiState(state.t, state.A, state.Adot, quantum)


# ---------------------------------------------------------------------------
# flat state vectors (plain float tuples, for the steppers)
# ---------------------------------------------------------------------------

def flat_from_state(state: SemiState) -> tuple[float, ...]:
    q = state.quantum
    if isinstance(q, PinneySector):
        return (state.A, state.Adot, q.rho, q.rhodot)
    if isinstance(q, ModeSector):
        return (state.A, state.Adot, q.f.real, q.f.imag, q.fdot.real, q.fdot.imag)
    return (state.A, state.Adot, q.x2, q.c, q.p2)


def state_from_flat(t: float, y: tuple[float, ...], representation: str) -> SemiState:
    if representation == "pinney":
        return SemiState(t, y[0], y[1], PinneySector(y[2], y[3]))
    if representation == "mode":
        return SemiState(t, y[0], y[1],
                         ModeSector(complex(y[2], y[3]), complex(y[4], y[5])))
    return SemiState(t, y[0], y[1], GaussianMoments(x2=y[2], p2=y[4], c=y[3]))


def make_rhs(representation: str, params: ModelParams):
    """Right-hand side f(t, y) -> dy/dt on the flat layout, as a fast closure."""
    m2 = params.m * params.m
    e2 = params.e * params.e
    half_hbar = 0.5 * params.hbar
    if representation == "pinney":
        def rhs(t, y):
            A, Ad, r, rd = y
            w2 = m2 + e2 * A * A
            return (Ad, -e2 * A * half_hbar * r * r, rd, 1.0 / (r * r * r) - w2 * r)
    elif representation == "mode":
        def rhs(t, y):
            A, Ad, fr, fi, gr, gi = y
            w2 = m2 + e2 * A * A
            return (Ad, -e2 * A * (fr * fr + fi * fi), gr, gi, -w2 * fr, -w2 * fi)
    elif representation == "moments":
        def rhs(t, y):
            A, Ad, x2, c, p2 = y
            w2 = m2 + e2 * A * A
            return (Ad, -e2 * A * x2, 2.0 * c, p2 - w2 * x2, -2.0 * w2 * c)
    else:
        raise UsageError(f"unknown representation {representation!r}")
    return rhs


def make_rhs_augmented(params: ModelParams):
    """Moments flow co-integrated with an independent Pinney width.

    Layout (A, Adot, x2, c, p2, rho, rhodot); the back-reaction uses the
    moments' x2, the width just rides along on the same omega(A(t)).  Used by
    the adiabatic-invariant diagnostic.
    """
    m2 = params.m * params.m
    e2 = params.e * params.e

    def rhs(t, y):
        A, Ad, x2, c, p2, r, rd = y
        w2 = m2 + e2 * A * A
        return (Ad, -e2 * A * x2, 2.0 * c, p2 - w2 * x2, -2.0 * w2 * c,
                rd, 1.0 / (r * r * r) - w2 * r)

    return rhs


def make_guard(representation: str, params: ModelParams, rho_min: float):
    """Per-step sanity check: returns (status, reason) to abort, else None.

    The Pinney width floor translates to <x^2> <= hbar rho_min^2 / 2 in the
    other representations.
    """
    x2_min = 0.5 * params.hbar * rho_min * rho_min

    def guard(t, y):
        for v in y:
            if not math.isfinite(v):
                return (STATUS_STEPFAIL, f"non-finite state component at t={t}")
        if representation == "pinney" or representation == "augmented":
            r = y[2] if representation == "pinney" else y[5]
            if r <= rho_min:
                return (STATUS_SINGULARITY,
                        f"rho = {r} fell to the floor {rho_min} at t={t}")
        elif representation == "mode":
            if y[2] * y[2] + y[3] * y[3] <= x2_min:
                return (STATUS_SINGULARITY,
                        f"<x^2> fell to the width floor at t={t}")
        else:
            if y[2] <= x2_min:
                return (STATUS_SINGULARITY,
                        f"<x^2> fell to the width floor at t={t}")
        return None

    return guard


# ---------------------------------------------------------------------------
# steppers
# ---------------------------------------------------------------------------

def rk4_step(rhs, t, y, h):
    """One classical fourth-order Runge-Kutta step."""
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, tuple(a + 0.5 * h * b for a, b in zip(y, k1)))
    k3 = rhs(t + 0.5 * h, tuple(a + 0.5 * h * b for a, b in zip(y, k2)))
    k4 = rhs(t + h, tuple(a + h * b for a, b in zip(y, k3)))
    six = h / 6.0
    return tuple(a + six * (b + 2.0 * (c + d) + e)
                 for a, b, c, d, e in zip(y, k1, k2, k3, k4))


def rkf45_step(rhs, t, y, h):
    """One embedded Fehlberg 4(5) step: returns (y5, per-component error)."""
    k1 = rhs(t, y)
    k2 = rhs(t + 0.25 * h,
             tuple(a + 0.25 * h * b for a, b in zip(y, k1)))
    k3 = rhs(t + 0.375 * h,
             tuple(a + h * (0.09375 * b + 0.28125 * c)
                   for a, b, c in zip(y, k1, k2)))
    k4 = rhs(t + 12.0 / 13.0 * h,
             tuple(a + h * (1932.0 / 2197.0 * b - 7200.0 / 2197.0 * c
                            + 7296.0 / 2197.0 * d)
                   for a, b, c, d in zip(y, k1, k2, k3)))
    k5 = rhs(t + h,
             tuple(a + h * (439.0 / 216.0 * b - 8.0 * c + 3680.0 / 513.0 * d
                            - 845.0 / 4104.0 * e)
                   for a, b, c, d, e in zip(y, k1, k2, k3, k4)))
    k6 = rhs(t + 0.5 * h,
             tuple(a + h * (-8.0 / 27.0 * b + 2.0 * c - 3544.0 / 2565.0 * d
                            + 1859.0 / 4104.0 * e - 11.0 / 40.0 * f)
                   for a, b, c, d, e, f in zip(y, k1, k2, k3, k4, k5)))
    y5 = tuple(a + h * (16.0 / 135.0 * b + 6656.0 / 12825.0 * d
                        + 28561.0 / 56430.0 * e - 9.0 / 50.0 * f + 2.0 / 55.0 * g)
               for a, b, d, e, f, g in zip(y, k1, k3, k4, k5, k6))
    err = tuple(h * (b / 360.0 - 128.0 / 4275.0 * d - 2197.0 / 75240.0 * e
                     + f / 50.0 + 2.0 / 55.0 * g)
                for b, d, e, f, g in zip(k1, k3, k4, k5, k6))
    return y5, err


# ---------------------------------------------------------------------------
# observables and the main loop
# ---------------------------------------------------------------------------

def record_observables(state: SemiState, params: ModelParams) -> TimeSeriesRecord:
    """Every tracked observable of one state, as a time-series row."""
    omega, omegadot = frequency(state.A, state.Adot, params)
    Omega, Omegadot = state_effective_frequency(state, params)
    q = state.quantum
    mom = state_moments(state, params)
    if isinstance(q, PinneySector):
        rho, rhodot = q.rho, q.rhodot
    else:
        rho = math.sqrt(2.0 * mom.x2 / params.hbar)
        rhodot = 2.0 * mom.c / (params.hbar * rho)
    n_ours, n_cdms = occupation_numbers(state, params)
    report = energies(state, params)
    return TimeSeriesRecord(
        t=state.t, A=state.A, Adot=state.Adot,
        rho=rho, rhodot=rhodot,
        Omega=Omega, Omegadot=Omegadot, omega=omega, omegadot=omegadot,
        x2=mom.x2, p2=mom.p2, c=mom.c,
        N_ours=n_ours, N_cdms=n_cdms,
        dN_leading=occupation_difference_leading(state.A, state.Adot, params),
        Hx=report.Hx, Etot=report.Etot, corr=report.corr)


def integrate(config: ScenarioConfig) -> Trajectory:
    """Run one scenario; returns sampled records plus the termination status.

    On a width collapse (rho <= rho_min) or a step failure the partial record
    list is returned with the abort time and reason; nothing is raised.
    """
    params = config.params
    state0 = initial_state(config)
    rep = config.representation
    rhs = make_rhs(rep, params)
    guard = make_guard(rep, params, config.rho_min)
    y = flat_from_state(state0)
    records = [record_observables(state0, params)]

    def sample(t, yy):
        records.append(record_observables(state_from_flat(t, yy, rep), params))

    if config.method == "rk4":
        n = max(1, round(config.t_end / config.dt))
        h = config.t_end / n
        for i in range(1, n + 1):
            t_prev = (i - 1) * h
            try:
                y = rk4_step(rhs, t_prev, y, h)
            except (ZeroDivisionError, OverflowError):
                return Trajectory(tuple(records), STATUS_SINGULARITY, t_prev,
                                  "singular right-hand side evaluation")
            hit = guard(i * h, y)
            if hit is not None:
                return Trajectory(tuple(records), hit[0], i * h, hit[1])
            if i % config.sample_every == 0 or i == n:
                try:
                    sample(i * h, y)
                except SemiquantumError as exc:
                    return Trajectory(tuple(records), STATUS_STEPFAIL, i * h,
                                      f"state failed validation: {exc}")
        return Trajectory(tuple(records), STATUS_COMPLETED)

    # adaptive embedded 4(5)
    t = 0.0
    h = min(config.dt_init, config.t_end)
    accepted = 0
    last_sampled_t = 0.0
    while t < config.t_end:
        clamped = h >= config.t_end - t
        if clamped:
            h = config.t_end - t
        try:
            ynew, err = rkf45_step(rhs, t, y, h)
        except (ZeroDivisionError, OverflowError):
            return Trajectory(tuple(records), STATUS_SINGULARITY, t,
                              "singular right-hand side evaluation")
        acc = 0.0
        finite = True
        try:
            for e, a, b in zip(err, y, ynew):
                if not (math.isfinite(e) and math.isfinite(b)):
                    finite = False
                    break
                scale = config.atol + config.rtol * max(abs(a), abs(b))
                acc += (e / scale) ** 2
        except OverflowError:
            finite = False
        enorm = math.sqrt(acc / len(y)) if finite else math.inf
        if enorm > 1.0:
            h *= 0.2 if not math.isfinite(enorm) else max(0.2, 0.9 * enorm ** -0.2)
            if h < 1e-14 * max(1.0, abs(t)):
                return Trajectory(tuple(records), STATUS_STEPFAIL, t,
                                  f"step size underflow at t={t}")
            continue
        t = config.t_end if clamped else t + h
        y = ynew
        accepted += 1
        hit = guard(t, y)
        if hit is not None:
            return Trajectory(tuple(records), hit[0], t, hit[1])
        if accepted % config.sample_every == 0 or t >= config.t_end:
            if t != last_sampled_t:
                try:
                    sample(t, y)
                except SemiquantumError as exc:
                    return Trajectory(tuple(records), STATUS_STEPFAIL, t,
                                      f"state failed validation: {exc}")
                last_sampled_t = t
        if enorm > 0.0:
            h *= min(5.0, max(0.2, 0.9 * enorm ** -0.2))
        else:
            h *= 5.0
    return Trajectory(tuple(records), STATUS_COMPLETED)


def scenario_with(config: ScenarioConfig, **changes) -> ScenarioConfig:
    """dataclasses.replace that also reaches into params (m, e, hbar)."""
    param_changes = {k: changes.pop(k) for k in ("m", "e", "hbar")
                     if k in changes}
    if param_changes:
        changes["params"] = replace(config.params, **param_changes)
    return replace(config, **changes)
