"""Time integration of the actuator motion with event detection.

Two schemes share one trajectory/event contract: a fixed-step staggered
(velocity Verlet) scheme, which is the deterministic default and conserves
energy to O(dt^2) for undamped runs, and an adaptive explicit Runge-Kutta
scheme backed by scipy for tolerance-driven runs. Detected events are
stagnation (interior zero crossing of the velocity at positive displacement),
return to the origin, and touch-down at the contact surface.

Origin passes of undamped rest-start motion deserve care: the exact orbit
passes through the phase-space corner (x, v) = (0, 0), so a discretized orbit
crosses v = 0 within an energy-error neighborhood of the corner, possibly at
a slightly negative displacement. Such crossings inside the configured
origin_epsilon band are recorded as return events and the state is projected
onto the exact corner, which keeps multi-period event spacing uniform;
negative excursions beyond the band abort with an integrator failure since
the motion provably never goes negative.

At the exact critical voltage the second-order dynamics cannot hug the saddle
in floating point for long horizons, so :func:`integrate_critical` integrates
the equivalent reduced first-order equation in the gap variable u = x0 - x,
whose multiplicative decay stays strictly positive and strictly decreasing;
the report carries the gap series alongside the materialized trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .analysis import (
    REGIME_CRITICAL,
    classify_regime,
)
from .errors import (
    IntegratorFailureError,
    InvalidParameterError,
    NotApplicableError,
    RegimeMismatchError,
    SingularityError,
)
from .model import ModelParams, PhaseState, first_integral_rhs, make_force

SCHEME_SYMPLECTIC = "symplectic"
SCHEME_ADAPTIVE = "adaptive"

EVENT_STAGNATION = "stagnation"
EVENT_TOUCHDOWN = "touchdown"
EVENT_RETURN = "return"

TERMINATED_HORIZON = "horizon"
TERMINATED_TOUCHDOWN = "touchdown"

# Width of the contact layer (relative to the contact surface) inside which
# fixed steps are halved and energy diagnostics are not meaningful.
_CONTACT_ZONE = 1e-3
_MICROSTART = 1e-6  # Taylor launch interval for the adaptive scheme


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration controls.

    scheme selects "symplectic" (fixed step dt) or "adaptive"
    (rel_tol/abs_tol driven). contact_epsilon is the trigger distance below
    the contact surface; event times are refined to event_refine_tol. Fixed
    steps are halved near contact down to dt_min. origin_epsilon bounds the
    displacement band treated as an origin pass.
    """

    scheme: str = SCHEME_SYMPLECTIC
    dt: float = 1e-4
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    t_max: float = 50.0
    contact_epsilon: float = 1e-9
    event_refine_tol: float = 1e-10
    dt_min: float = 1e-12
    origin_epsilon: float = 1e-6

    def __post_init__(self) -> None:
        if self.scheme not in (SCHEME_SYMPLECTIC, SCHEME_ADAPTIVE):
            raise InvalidParameterError(f"unknown scheme '{self.scheme}'")
        for name in ("dt", "rel_tol", "abs_tol", "t_max", "event_refine_tol", "dt_min"):
            if not getattr(self, name) > 0.0:
                raise InvalidParameterError(f"{name} must be positive")
        if not 0.0 < self.contact_epsilon < 1e-3:
            raise InvalidParameterError("contact_epsilon must lie in (0, 1e-3)")
        if not 0.0 < self.origin_epsilon < 1e-2:
            raise InvalidParameterError("origin_epsilon must lie in (0, 1e-2)")


@dataclass(frozen=True)
class Event:
    kind: str
    t: float
    x: float


@dataclass
class Trajectory:
    """Time-ordered samples of the motion with detected events.

    t, x, v are aligned arrays with strictly increasing t. energy_drift is the
    maximum |H(t) - H(0)| over samples for undamped runs (excluding samples
    inside the contact layer, where a fixed-step scheme has no meaningful
    energy resolution); None for damped runs.
    """

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    events: list[Event] = field(default_factory=list)
    energy_drift: float | None = None
    terminated_by: str = TERMINATED_HORIZON

    def __post_init__(self) -> None:
        # samples are immutable after construction and safe to share
        for arr in (self.t, self.x, self.v):
            arr.setflags(write=False)
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0.0):
            raise IntegratorFailureError("samples not strictly increasing in t")

    def __len__(self) -> int:
        return len(self.t)

    def states(self) -> Iterator[PhaseState]:
        for t, x, v in zip(self.t, self.x, self.v):
            yield PhaseState(t=float(t), x=float(x), v=float(v))

    def events_of(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def first_event(self, kind: str) -> Event | None:
        for e in self.events:
            if e.kind == kind:
                return e
        return None

    def interpolate_x(self, tq) -> np.ndarray:
        """Cubic Hermite interpolation of the displacement at query times."""
        tq = np.atleast_1d(np.asarray(tq, dtype=float))
        if np.any(tq < self.t[0]) or np.any(tq > self.t[-1]):
            raise InvalidParameterError("query time outside the sampled range")
        idx = np.clip(np.searchsorted(self.t, tq, side="right") - 1, 0, len(self.t) - 2)
        t0, t1 = self.t[idx], self.t[idx + 1]
        h = t1 - t0
        s = (tq - t0) / h
        h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
        h10 = s * (1.0 - s) ** 2
        h01 = s * s * (3.0 - 2.0 * s)
        h11 = s * s * (s - 1.0)
        return (
            h00 * self.x[idx]
            + h10 * h * self.v[idx]
            + h01 * self.x[idx + 1]
            + h11 * h * self.v[idx + 1]
        )

    def first_crossing_time(self, level: float, refine_tol: float = 1e-10) -> float | None:
        """Time of the first upward crossing of a displacement level, or None."""
        above = np.nonzero(self.x >= level)[0]
        if len(above) == 0:
            return None
        i = int(above[0])
        if i == 0:
            return float(self.t[0])
        lo, hi = float(self.t[i - 1]), float(self.t[i])
        while hi - lo > refine_tol:
            mid = 0.5 * (lo + hi)
            if float(self.interpolate_x(mid)[0]) >= level:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SymmetryReport:
    """Mirror symmetry of a periodic response about its stagnation time."""

    t_s: float
    t_p: float
    max_defect: float
    period_defect: float | None
    n_points: int


@dataclass(frozen=True)
class CriticalReport:
    """Monotone approach of the critical response toward the pull-in position."""

    x_limit: float
    final_gap: float
    gap_strictly_decreasing: bool
    always_below_limit: bool
    gap: np.ndarray


@dataclass(frozen=True)
class GenericForcedModel:
    """Damped, driven motion x'' + mu x' + f(x,t) = lam * g(x,t) on [0, a].

    forcing_g may be singular at the touch-down position a. c1 bounds sup|f|
    and c2 lower-bounds g on the travel range; both claims are validated by
    grid sampling before integration.
    """

    mu: float
    lam: float
    f_fn: Callable
    forcing_g: Callable
    a: float
    c1: float
    c2: float

    def __post_init__(self) -> None:
        if self.mu < 0.0:
            raise InvalidParameterError("mu must be nonnegative")
        if self.lam <= 0.0 or self.a <= 0.0:
            raise InvalidParameterError("lam and a must be positive")
        if self.c1 < 0.0 or self.c2 <= 0.0:
            raise InvalidParameterError("c1 must be >= 0 and c2 > 0")


@dataclass(frozen=True)
class TouchDownCheck:
    """Outcome of the sufficient-condition touch-down test.

    guaranteed is True when lam*c2 > c1. When guaranteed, monotone reports
    v(t) > 0 on the interior, lower_bound_ok the pointwise displacement lower
    bound, and tc_bound the analytic contact-time bound obtained by inverting
    that lower bound at x = a.
    """

    guaranteed: bool
    margin: float
    t_c: float | None
    tc_bound: float | None
    monotone: bool | None
    lower_bound_ok: bool | None


def energy_series(traj: Trajectory, m: ModelParams) -> np.ndarray:
    """Total energy at each sample of an actuator trajectory."""
    xs = m.x_singular
    return (
        0.5 * traj.v**2
        + 0.5 * traj.x**2
        + 0.25 * m.kappa * traj.x**4
        - 0.5 * m.v * m.v / (xs - traj.x)
    )


def _hermite(t0, y0, d0, t1, y1, d1, tq):
    # cubic Hermite with endpoint values y and derivatives d
    h = t1 - t0
    s = (tq - t0) / h
    return (
        (1.0 + 2.0 * s) * (1.0 - s) ** 2 * y0
        + s * (1.0 - s) ** 2 * h * d0
        + s * s * (3.0 - 2.0 * s) * y1
        + s * s * (s - 1.0) * h * d1
    )


def _bisect_sign_change(fun, lo: float, hi: float, tol: float) -> float:
    flo = fun(lo)
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if flo * fun(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
            flo = fun(lo)
    return 0.5 * (lo + hi)


def _contact_tail_time(rhs_sq: Callable, x_from: float, surface: float) -> float:
    # Residual travel time from x_from to the surface using the squared
    # velocity profile; the substitution x = surface - delta s^2 absorbs the
    # square-root endpoint behavior. 16 nodes are ample for the tiny layer.
    delta = surface - x_from
    if delta <= 0.0:
        return 0.0
    nodes, weights = np.polynomial.legendre.leggauss(16)
    s = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    x = surface - delta * s * s
    val = rhs_sq(x)
    val = np.maximum(val, 1e-300)
    return float(np.sum(w * 2.0 * delta * s / np.sqrt(val)))


class _Collector:
    """Accumulates samples and events. Samples must arrive in increasing t."""

    def __init__(self) -> None:
        self.t: list[float] = []
        self.x: list[float] = []
        self.v: list[float] = []
        self.events: list[Event] = []

    def add(self, t: float, x: float, v: float) -> None:
        if self.t and t <= self.t[-1]:
            raise IntegratorFailureError(
                f"samples not strictly increasing in t at t={t}"
            )
        self.t.append(t)
        self.x.append(x)
        self.v.append(v)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.asarray(self.t), np.asarray(self.x), np.asarray(self.v)


def _run_symplectic(
    force: Callable[[float, float], float],
    mu: float,
    t0: float,
    x0: float,
    v0: float,
    cfg: IntegratorConfig,
    surface: float,
    project_origin: bool,
    tail_fn: Callable[[float, float], float],
) -> tuple[_Collector, str]:
    """Staggered position-velocity scheme with step halving near contact.

    The damping term enters the half kick explicitly and the full kick
    implicitly, which reduces to plain velocity Verlet at mu = 0.
    """
    col = _Collector()
    dt_base = cfg.dt
    zone = _CONTACT_ZONE * surface
    trigger = surface - cfg.contact_epsilon
    t_max = cfg.t_max
    t, x, v = t0, x0, v0
    a = force(x, t)
    col.add(t, x, v)
    terminated = TERMINATED_HORIZON
    half_mu = 0.5 * mu

    while t < t_max - 1e-15:
        dt_eff = dt_base if t + dt_base <= t_max else t_max - t
        if surface - x < zone:
            gap = surface - x
            while dt_eff > cfg.dt_min:
                vh_est = v + 0.5 * dt_eff * (a - mu * v)
                if abs(vh_est) * dt_eff <= 0.25 * gap:
                    break
                dt_eff *= 0.5
            dt_eff = max(dt_eff, cfg.dt_min)

        vh = v + 0.5 * dt_eff * (a - mu * v)
        x_new = x + dt_eff * vh
        t_new = t + dt_eff

        if x_new >= trigger:
            if vh <= 0.0:
                raise IntegratorFailureError(
                    f"contact trigger reached with nonpositive drift velocity at t={t}"
                )
            t_cross = t + (trigger - x) / vh
            col.add(t_cross, trigger, vh)
            t_c = t_cross + tail_fn(trigger, vh)
            col.events.append(Event(EVENT_TOUCHDOWN, t_c, surface))
            terminated = TERMINATED_TOUCHDOWN
            break

        if x_new < 0.0:
            if x_new < -cfg.origin_epsilon or not project_origin:
                raise IntegratorFailureError(
                    f"interior displacement went negative: x={x_new} at t={t_new}"
                )
            # descending zero crossing inside the (linear) drift
            t_zero = t + (0.0 - x) / vh
            col.add(t_zero, 0.0, 0.0)
            col.events.append(Event(EVENT_RETURN, t_zero, 0.0))
            t, x, v = t_zero, 0.0, 0.0
            a = force(x, t)
            continue

        a_new = force(x_new, t_new)
        if mu:
            v_new = (vh + 0.5 * dt_eff * a_new) / (1.0 + half_mu * dt_eff)
        else:
            v_new = vh + 0.5 * dt_eff * a_new

        if v != 0.0 and (v * v_new < 0.0 or v_new == 0.0):
            acc0 = a - mu * v
            acc1 = a_new - mu * v_new
            t_star = _bisect_sign_change(
                lambda tq: _hermite(t, v, acc0, t_new, v_new, acc1, tq),
                t,
                t_new,
                cfg.event_refine_tol,
            )
            x_star = _hermite(t, x, v, t_new, x_new, v_new, t_star)
            if project_origin and v < 0.0 and x_star <= cfg.origin_epsilon:
                col.add(t_star, 0.0, 0.0)
                col.events.append(Event(EVENT_RETURN, t_star, 0.0))
                t, x, v = t_star, 0.0, 0.0
                a = force(x, t)
                continue
            col.events.append(Event(EVENT_STAGNATION, t_star, x_star))

        t, x, v, a = t_new, x_new, v_new, a_new
        col.add(t, x, v)

    return col, terminated


def _run_adaptive(
    force: Callable[[float, float], float],
    mu: float,
    t0: float,
    x0: float,
    v0: float,
    cfg: IntegratorConfig,
    surface: float,
    ceiling: float,
    project_origin: bool,
    tail_fn: Callable[[float, float], float],
) -> tuple[_Collector, str]:
    """Adaptive explicit Runge-Kutta segments with event-driven restarts.

    Each segment ends at the horizon, at the terminal contact event, or (for
    undamped rest-start runs) at an upward velocity crossing, where the state
    is projected onto the origin corner and relaunched. Launches from v = 0
    use a short Taylor step so the solver never starts on an event root.
    """
    from scipy.integrate import solve_ivp

    col = _Collector()
    trigger = surface - cfg.contact_epsilon
    clamp = ceiling - 1e-13 * max(1.0, ceiling)

    def rhs(t, y):
        x = y[0] if y[0] < clamp else clamp
        return (y[1], force(x, t) - mu * y[1])

    def ev_contact(t, y):
        return y[0] - trigger

    ev_contact.terminal = True
    ev_contact.direction = 1.0

    def ev_vdown(t, y):
        return y[1]

    ev_vdown.terminal = False
    ev_vdown.direction = -1.0

    def ev_vup(t, y):
        return y[1]

    ev_vup.terminal = bool(project_origin)
    ev_vup.direction = 1.0

    t, x, v = t0, x0, v0
    col.add(t, x, v)
    terminated = TERMINATED_HORIZON

    while True:
        if v == 0.0:
            # Taylor launch off the v = 0 event root
            if cfg.t_max - t <= 2.0 * _MICROSTART:
                break
            a0 = force(x, t)
            d = _MICROSTART
            t, x, v = t + d, x + 0.5 * a0 * d * d, a0 * d
            col.add(t, x, v)
        sol = solve_ivp(
            rhs,
            (t, cfg.t_max),
            (x, v),
            method="RK45",
            rtol=cfg.rel_tol,
            atol=cfg.abs_tol,
            events=[ev_contact, ev_vdown, ev_vup],
            max_step=0.25,
        )
        seg_events: list[Event] = []
        for te, ye in zip(sol.t_events[1], sol.y_events[1]):
            seg_events.append(Event(EVENT_STAGNATION, float(te), float(ye[0])))
        if not project_origin:
            for te, ye in zip(sol.t_events[2], sol.y_events[2]):
                seg_events.append(Event(EVENT_STAGNATION, float(te), float(ye[0])))

        project_last = False
        contact_state: tuple[float, float, float] | None = None
        if sol.status == 1:
            if len(sol.t_events[0]):
                te = float(sol.t_events[0][0])
                xe, ve = (float(val) for val in sol.y_events[0][0])
                contact_state = (te, xe, ve)
            else:
                te = float(sol.t_events[2][-1])
                xe = float(sol.y_events[2][-1][0])
                if xe <= cfg.origin_epsilon:
                    seg_events.append(Event(EVENT_RETURN, te, 0.0))
                    project_last = True
                else:
                    seg_events.append(Event(EVENT_STAGNATION, te, xe))
        elif sol.status == -1:
            xe, ve = float(sol.y[0, -1]), float(sol.y[1, -1])
            if surface - xe < _CONTACT_ZONE * surface and ve > 0.0:
                contact_state = (float(sol.t[-1]), xe, ve)
            else:
                raise IntegratorFailureError(
                    f"adaptive solver stalled: {sol.message} at t={sol.t[-1]}, x={xe}"
                )

        seg_events.sort(key=lambda e: e.t)
        col.events.extend(seg_events)

        n = len(sol.t)
        for i in range(n):
            ti = float(sol.t[i])
            if ti <= col.t[-1]:
                continue
            xi_val = float(sol.y[0, i])
            vi_val = float(sol.y[1, i])
            if project_last and i == n - 1:
                xi_val, vi_val = 0.0, 0.0
            col.add(ti, xi_val, vi_val)

        if contact_state is not None:
            te, xe, ve = contact_state
            if te > col.t[-1]:
                col.add(te, xe, ve)
            t_c = te + tail_fn(xe, ve)
            col.events.append(Event(EVENT_TOUCHDOWN, t_c, surface))
            terminated = TERMINATED_TOUCHDOWN
            break
        if sol.status == 0:
            break
        # relaunch after an origin projection or an anomalous turning point
        t = float(sol.t[-1])
        if project_last:
            x, v = 0.0, 0.0
        else:
            x, v = float(sol.y[0, -1]), 0.0
        if t >= cfg.t_max - 1e-15:
            break

    return col, terminated


def _finalize(
    col: _Collector,
    terminated: str,
    m: ModelParams | None,
    surface: float,
) -> Trajectory:
    t, x, v = col.arrays()
    traj = Trajectory(t=t, x=x, v=v, events=col.events, terminated_by=terminated)
    if m is not None and m.mu == 0.0:
        energies = energy_series(traj, m)
        keep = x <= surface - _CONTACT_ZONE * surface
        if not np.any(keep):
            keep = np.ones_like(x, dtype=bool)
        traj.energy_drift = float(np.max(np.abs(energies[keep] - energies[0])))
    return traj


def integrate(
    m: ModelParams,
    cfg: IntegratorConfig | None = None,
    x0: float = 0.0,
    v0: float = 0.0,
) -> Trajectory:
    """Integrate the actuator equation of motion from rest.

    Runs until the first touch-down or the horizon t_max, recording
    stagnation, return-to-origin, and touch-down events. The touch-down time
    extrapolates the residual travel beyond the trigger distance. Initial
    conditions other than (0, 0) are accepted but lie outside the regime
    guarantees documented for the rest start; origin projection is then
    disabled.
    """
    cfg = cfg or IntegratorConfig()
    start = PhaseState(t=0.0, x=x0, v=v0)
    x0, v0 = start.x, start.v
    if x0 >= 1.0 - cfg.contact_epsilon:
        raise InvalidParameterError(
            f"initial displacement x0={x0} already at the contact trigger"
        )
    rest = x0 == 0.0 and v0 == 0.0
    fast = make_force(m)
    a0 = fast(x0)

    if v0 == 0.0 and a0 == 0.0:
        # exact equilibrium (zero voltage at rest): two-sample trajectory
        t = np.array([0.0, cfg.t_max])
        return Trajectory(
            t=t,
            x=np.full(2, x0),
            v=np.zeros(2),
            events=[],
            energy_drift=0.0 if m.mu == 0.0 else None,
            terminated_by=TERMINATED_HORIZON,
        )

    surface = 1.0
    project = rest and m.mu == 0.0

    if rest and m.mu == 0.0:
        def tail_fn(xe: float, ve: float) -> float:
            return _contact_tail_time(lambda xx: first_integral_rhs(xx, m), xe, surface)
    else:
        def tail_fn(xe: float, ve: float) -> float:
            return (surface - xe) / ve if ve > 0.0 else 0.0

    def force(x: float, t: float) -> float:
        return fast(x)

    if cfg.scheme == SCHEME_ADAPTIVE:
        col, terminated = _run_adaptive(
            force, m.mu, 0.0, x0, v0, cfg, surface, m.x_singular, project, tail_fn
        )
    else:
        col, terminated = _run_symplectic(
            force, m.mu, 0.0, x0, v0, cfg, surface, project, tail_fn
        )
    return _finalize(col, terminated, m, surface)


def verify_periodicity(traj: Trajectory) -> SymmetryReport:
    """Check mirror symmetry of a periodic response about its stagnation time.

    Compares x(t_s + tau) with x(t_s - tau) for every sample time in
    (t_s, 2 t_s], interpolating the mirrored side, and reports the worst
    defect together with the defect of the detected period against 2 t_s.
    """
    stag = traj.first_event(EVENT_STAGNATION)
    if stag is None:
        raise NotApplicableError("trajectory has no stagnation event")
    t_s = stag.t
    t_end = float(traj.t[-1])
    if t_end < 2.0 * t_s:
        raise NotApplicableError("trajectory ends before one full period (2 t_s)")
    mask = (traj.t > t_s) & (traj.t <= 2.0 * t_s)
    tau = traj.t[mask] - t_s
    mirrored = traj.interpolate_x(t_s - tau)
    defect = float(np.max(np.abs(traj.x[mask] - mirrored))) if np.any(mask) else 0.0

    ret = traj.first_event(EVENT_RETURN)
    period_defect = abs(ret.t - 2.0 * t_s) if ret is not None else None
    t_p = ret.t if ret is not None else 2.0 * t_s
    return SymmetryReport(
        t_s=t_s,
        t_p=t_p,
        max_defect=defect,
        period_defect=period_defect,
        n_points=int(np.count_nonzero(mask)),
    )


def integrate_critical(
    m: ModelParams, cfg: IntegratorConfig | None = None
) -> tuple[Trajectory, CriticalReport]:
    """Integrate the critical response via its reduced first-order equation.

    At the critical voltage the residual has a double root at the pull-in
    position x0 and the climb obeys dx/dt = sqrt(x q(x)/(xi+1-x)) (x0 - x)
    with q positive. Integrating the gap u = x0 - x (classical RK4, step
    cfg.dt) keeps u strictly positive and strictly decreasing for arbitrarily
    long horizons, faithfully representing the asymptotic approach that a
    second-order integrator cannot hold onto at double precision. The applied
    voltage is projected onto the exactly critical value when deflating the
    double root.
    """
    cfg = cfg or IntegratorConfig()
    cls = classify_regime(m)
    if cls.regime != REGIME_CRITICAL:
        raise RegimeMismatchError(
            f"regime is '{cls.regime}', not critical (v={m.v}, v_dpi={cls.threshold.v_dpi})"
        )
    xs = m.x_singular
    x0 = cls.threshold.x0
    # residual as a polynomial, deflated twice at its double root
    coeffs = np.array([0.5 * m.kappa, -0.5 * m.kappa * xs, 1.0, -xs, m.v * m.v / xs])
    if m.kappa == 0.0:
        coeffs = coeffs[2:]
    q1 = _deflate(coeffs, x0)
    qt = tuple(float(c) for c in _deflate(q1, x0))

    def rate(u: float) -> float:
        x = x0 - u
        q = qt[0]
        for c in qt[1:]:
            q = q * x + c
        val = x * q / (xs - x)
        return math.sqrt(val) if val > 0.0 else 0.0

    def du(u: float) -> float:
        return -u * rate(u)

    dt = cfg.dt
    a0 = 0.5 * m.v * m.v / (xs * xs)
    t1 = dt
    x_start = 0.5 * a0 * t1 * t1

    ts = [0.0, t1]
    us = [x0, x0 - x_start]
    vs = [0.0, a0 * t1]
    u = x0 - x_start
    t = t1
    strictly_decreasing = True
    while t < cfg.t_max - 1e-12:
        h = min(dt, cfg.t_max - t)
        k1 = du(u)
        k2 = du(u + 0.5 * h * k1)
        k3 = du(u + 0.5 * h * k2)
        k4 = du(u + h * k3)
        u_new = u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not 0.0 < u_new < u:
            strictly_decreasing = False
            u_new = min(max(u_new, 1e-300), u)
        t += h
        u = u_new
        ts.append(t)
        us.append(u)
        vs.append(u * rate(u))

    gap = np.asarray(us)
    traj = Trajectory(
        t=np.asarray(ts),
        x=x0 - gap,
        v=np.asarray(vs),
        events=[],
        terminated_by=TERMINATED_HORIZON,
    )
    if m.mu == 0.0:
        energies = energy_series(traj, m)
        traj.energy_drift = float(np.max(np.abs(energies - energies[0])))
    report = CriticalReport(
        x_limit=x0,
        final_gap=float(gap[-1]),
        gap_strictly_decreasing=strictly_decreasing and bool(np.all(np.diff(gap) < 0.0)),
        always_below_limit=bool(np.all(gap > 0.0)),
        gap=gap,
    )
    return traj, report


def _deflate(coeffs: np.ndarray, root: float) -> np.ndarray:
    # synthetic division discarding the (tiny) remainder
    out = np.empty(len(coeffs) - 1)
    acc = coeffs[0]
    for i in range(len(coeffs) - 1):
        out[i] = acc
        acc = coeffs[i + 1] + acc * root
    return out


def generic_tc_bound(mu: float, margin: float, a: float) -> float:
    """Contact-time bound from inverting the touch-down displacement lower bound.

    For mu > 0 the bound solves (margin/mu)(t - (1 - e^{-mu t})/mu) = a; for
    mu = 0 it is sqrt(2 a / margin). margin = lam*c2 - c1 must be positive.
    """
    if margin <= 0.0:
        raise InvalidParameterError("touch-down bound requires lam*c2 > c1")
    if mu == 0.0:
        return math.sqrt(2.0 * a / margin)

    def lower(t: float) -> float:
        return (margin / mu) * (t - (1.0 - math.exp(-mu * t)) / mu)

    hi = 1.0
    while lower(hi) < a:
        hi *= 2.0
        if hi > 1e12:
            raise InvalidParameterError("touch-down bound bracket expansion failed")
    return _bisect_sign_change(lambda t: lower(t) - a, 0.0, hi, 1e-12)


_BOUND_GRID = 1000
_BOUND_SLACK = 1e-9


def _validate_generic_bounds(gm: GenericForcedModel, t_max: float) -> None:
    # Sample the claimed sup/inf bounds on a dense grid; reject models whose
    # constants are violated by more than the slack.
    xs = np.linspace(0.0, gm.a - 1e-6, _BOUND_GRID)
    ts = np.linspace(0.0, t_max, _BOUND_GRID)
    xg, tg = np.meshgrid(xs, ts, indexing="ij")
    try:
        fv = np.broadcast_to(np.asarray(gm.f_fn(xg, tg), dtype=float), xg.shape)
        gv = np.broadcast_to(np.asarray(gm.forcing_g(xg, tg), dtype=float), xg.shape)
    except Exception:
        fv = np.empty_like(xg)
        gv = np.empty_like(xg)
        for i in range(xg.shape[0]):
            for j in range(xg.shape[1]):
                fv[i, j] = gm.f_fn(xg[i, j], tg[i, j])
                gv[i, j] = gm.forcing_g(xg[i, j], tg[i, j])
    sup_f = float(np.max(np.abs(fv)))
    inf_g = float(np.min(gv))
    if sup_f > gm.c1 + _BOUND_SLACK:
        raise InvalidParameterError(
            f"claimed sup|f| <= c1={gm.c1} violated: sampled sup {sup_f}"
        )
    if inf_g < gm.c2 - _BOUND_SLACK:
        raise InvalidParameterError(
            f"claimed inf g >= c2={gm.c2} violated: sampled inf {inf_g}"
        )


def integrate_generic(
    gm: GenericForcedModel, cfg: IntegratorConfig | None = None
) -> tuple[Trajectory, TouchDownCheck]:
    """Integrate a generic forced model and check the touch-down guarantee.

    When lam*c2 > c1 the motion provably climbs monotonically to the
    touch-down position; the check verifies positive velocity throughout,
    the pointwise displacement lower bound, and that the detected contact
    time respects the analytic bound. When the margin is nonpositive the
    model is still integrated and the check reports guaranteed=False.
    """
    cfg = cfg or IntegratorConfig()
    _validate_generic_bounds(gm, cfg.t_max)

    def force(x: float, t: float) -> float:
        if x >= gm.a:
            raise SingularityError(f"x={x} at or beyond touch-down position a={gm.a}")
        return gm.lam * gm.forcing_g(x, t) - gm.f_fn(x, t)

    def tail_fn(xe: float, ve: float) -> float:
        return (gm.a - xe) / ve if ve > 0.0 else 0.0

    if cfg.scheme == SCHEME_ADAPTIVE:
        col, terminated = _run_adaptive(
            force, gm.mu, 0.0, 0.0, 0.0, cfg, gm.a, gm.a, False, tail_fn
        )
    else:
        col, terminated = _run_symplectic(
            force, gm.mu, 0.0, 0.0, 0.0, cfg, gm.a, False, tail_fn
        )
    traj = _finalize(col, terminated, None, gm.a)

    margin = gm.lam * gm.c2 - gm.c1
    guaranteed = margin > 0.0
    if not guaranteed:
        return traj, TouchDownCheck(
            guaranteed=False,
            margin=margin,
            t_c=None,
            tc_bound=None,
            monotone=None,
            lower_bound_ok=None,
        )

    interior = traj.t > traj.t[0]
    monotone = bool(np.all(traj.v[interior] > 0.0))
    if gm.mu > 0.0:
        lower = (margin / gm.mu) * (traj.t - (1.0 - np.exp(-gm.mu * traj.t)) / gm.mu)
    else:
        lower = 0.5 * margin * traj.t**2
    lower_ok = bool(np.all(traj.x >= lower - 1e-9))
    touch = traj.first_event(EVENT_TOUCHDOWN)
    t_c = touch.t if touch is not None else None
    return traj, TouchDownCheck(
        guaranteed=True,
        margin=margin,
        t_c=t_c,
        tc_bound=generic_tc_bound(gm.mu, margin, gm.a),
        monotone=monotone,
        lower_bound_ok=lower_ok,
    )
