"""Per-frequency linear problem ``w'' + c(t) r^2 w = 0`` and its weighted energy certificate.

Coefficients are piecewise-linear paths.  The integration grid always
contains the path nodes, so the coefficient is linear inside every RK4 step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EtaInadmissibleError,
    HorizonMismatchError,
    InvalidGridError,
    KirchhoffError,
    StepTooLargeError,
)
from .spectral import GevreyParams

# fraction of the horizon kept free of nodes before T when grids are refined
GRID_EPS_REL = 1e-6
# oscillation resolution: step * radius * sqrt(max c) must not exceed this
STEP_RESOLUTION = 0.5


@dataclass(frozen=True, eq=False)
class CoefficientPath:
    """Piecewise-linear coefficient ``c(t)`` sampled at ``times`` (``times[0] = 0``)."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        v = np.array(self.values, dtype=float)
        if t.ndim != 1 or t.size < 2 or t.shape != v.shape:
            raise InvalidGridError("coefficient path needs >= 2 nodes and matching values")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise InvalidGridError("coefficient path times must start at 0 and strictly increase")
        if np.any(~np.isfinite(v)) or np.any(v <= 0):
            raise InvalidGridError("coefficient path values must be finite and positive")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, value: float, times) -> CoefficientPath:
        times = np.asarray(times, dtype=float)
        return cls(times, np.full(times.shape, float(value)))

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.times)

    def __call__(self, t):
        return np.interp(t, self.times, self.values)

    def sup_distance(self, other: CoefficientPath, upto: float | None = None) -> float:
        """Max node gap, over this path's nodes ``t <= upto``."""
        mask = slice(None) if upto is None else self.times <= upto
        return float(np.max(np.abs(self.values[mask] - other(self.times[mask]))))


def uniform_grid(horizon: float, step: float) -> np.ndarray:
    """``0, step, 2 step, ...`` ending exactly at ``horizon`` (last step shortened)."""
    if not (horizon > 0 and step > 0):
        raise InvalidGridError("horizon and step must be positive")
    n = max(1, int(math.ceil(horizon / step - 1e-9)))
    return np.append(np.arange(n) * step, horizon)


def refined_time_grid(horizon: float, ratio: float = 1e-3, eps_rel: float = GRID_EPS_REL) -> np.ndarray:
    """Nodes with spacing ``~ ratio * (T - t)``, last interior node at ``T - eps_rel T``, then ``T``."""
    if not (0 < ratio and 0 < eps_rel < 1):
        raise InvalidGridError("ratio and eps_rel must be positive, eps_rel < 1")
    span = math.log(1.0 / eps_rel)
    n = max(1, int(math.ceil(span / math.log1p(ratio))))
    gaps = horizon * np.exp(-np.linspace(0.0, span, n + 1))
    t = horizon - gaps
    t[0] = 0.0
    return np.append(t, horizon)


def oscillating_path(nu0: float, big_m: float, q: float, horizon: float, *,
                     ratio: float = 1e-3, eps_rel: float = GRID_EPS_REL,
                     amplitude: float = 1.0, slowdown: float = 1.0,
                     phase: float = 0.0) -> CoefficientPath:
    """Sample ``nu0 + (M-nu0)/2 (1 + A sin(theta(t)/B + phase))``, ``theta = (T-t)^(1-q)/(q-1)``.

    ``|c'(t)| = (M-nu0)/2 * A/B * |cos(.)| * (T-t)^(-q)``, so with ``A = B = 1``
    the path sits exactly on the class envelope with ``K = (M-nu0)/2``.  The
    value at ``T`` (where the function has no limit) repeats the last
    interior sample.
    """
    t = refined_time_grid(horizon, ratio, eps_rel)
    c = oscillating_value(t[:-1], nu0, big_m, q, horizon, amplitude, slowdown, phase)
    return CoefficientPath(t, np.append(c, c[-1]))


def oscillating_value(t, nu0, big_m, q, horizon, amplitude=1.0, slowdown=1.0, phase=0.0):
    theta = (horizon - np.asarray(t, dtype=float)) ** (1.0 - q) / (q - 1.0)
    return nu0 + 0.5 * (big_m - nu0) * (1.0 + amplitude * np.sin(theta / slowdown + phase))


def oscillating_derivative(t, nu0, big_m, q, horizon, amplitude=1.0, slowdown=1.0, phase=0.0):
    """Closed-form derivative of :func:`oscillating_value`."""
    gap = horizon - np.asarray(t, dtype=float)
    theta = gap ** (1.0 - q) / (q - 1.0)
    return 0.5 * (big_m - nu0) * amplitude / slowdown * np.cos(theta / slowdown + phase) * gap ** (-q)


# ---------------------------------------------------------------------------
# class membership


@dataclass(frozen=True)
class ClassKParams:
    nu0: float
    big_m: float
    k_const: float
    horizon: float
    q: float

    def __post_init__(self):
        if not 0 < self.nu0 <= self.big_m:
            raise KirchhoffError("class parameters need 0 < nu0 <= M")
        if not self.q > 1:
            raise KirchhoffError("class parameters need q > 1")
        if self.k_const < 0 or not self.horizon > 0:
            raise KirchhoffError("class parameters need K >= 0 and horizon > 0")

    def envelope(self, t):
        return self.k_const / (self.horizon - np.asarray(t, dtype=float)) ** self.q

    def modulus(self, t_early, t_late):
        """Integrated envelope ``K/(q-1) [(T-t_late)^(1-q) - (T-t_early)^(1-q)]``."""
        e = 1.0 - self.q
        return self.k_const / (self.q - 1.0) * (
            (self.horizon - np.asarray(t_late)) ** e - (self.horizon - np.asarray(t_early)) ** e)


@dataclass(frozen=True)
class MembershipReport:
    ok: bool
    worst_violation: float
    location: float
    kind: str


class ClassMembershipError(KirchhoffError):
    def __init__(self, report: MembershipReport):
        self.report = report
        super().__init__(f"coefficient path is not in the class: {report.kind} violation "
                         f"{report.worst_violation!r} at t={report.location!r}")


def check_class_membership(path: CoefficientPath, params: ClassKParams, tol: float = 1e-9) -> MembershipReport:
    """Check ``nu0 <= c <= M`` at nodes and the derivative envelope on every segment.

    A segment's increment ``|c(t_{i+1}) - c(t_i)|`` is compared with the
    envelope integrated over the segment, i.e. its slope against the mean of
    ``K/(T-t)^q`` there.  Interpolants of functions obeying the pointwise
    bound always pass, and accepted paths obey the integrated modulus
    exactly.  Value violations are absolute; slope violations are
    ``(|slope| - mean env) / max(mean env, 1)``.  The path is accepted iff
    the worst violation is ``<= tol``.
    """
    if abs(path.horizon - params.horizon) > 1e-12 * params.horizon:
        raise HorizonMismatchError(
            f"horizon mismatch: path ends at {path.horizon!r}, class horizon is {params.horizon!r}")
    v = path.values
    t = path.times
    candidates = []
    low = params.nu0 - v
    high = v - params.big_m
    i_low, i_high = int(np.argmax(low)), int(np.argmax(high))
    candidates.append((float(low[i_low]), float(t[i_low]), "lower"))
    candidates.append((float(high[i_high]), float(t[i_high]), "upper"))

    with np.errstate(divide="ignore", invalid="ignore"):
        mean_env = params.modulus(t[:-1], t[1:]) / np.diff(t)
        slope_excess = (np.abs(path.slopes) - mean_env) / np.maximum(mean_env, 1.0)
    # segments reaching T have an unbounded envelope
    slope_excess = np.where(np.isinf(mean_env), -np.inf, slope_excess)
    j = int(np.argmax(slope_excess))
    candidates.append((float(slope_excess[j]), float(t[j]), "slope"))

    worst, where, kind = max(candidates, key=lambda c: c[0])
    return MembershipReport(ok=worst <= tol, worst_violation=worst, location=where, kind=kind)


# ---------------------------------------------------------------------------
# integration


@dataclass(frozen=True, eq=False)
class ModeTrajectory:
    radius: float
    times: np.ndarray
    w: np.ndarray
    w_dot: np.ndarray


def solve_grid(path: CoefficientPath, step: float, extra=()) -> np.ndarray:
    """Uniform grid of spacing ``step`` merged with the path nodes and ``extra`` instants."""
    pieces = [uniform_grid(path.horizon, step), path.times, np.asarray(extra, dtype=float)]
    return np.unique(np.concatenate(pieces))


def check_step(step: float, radius: float, max_c: float) -> None:
    limit = STEP_RESOLUTION / (radius * math.sqrt(max_c))
    if step > limit:
        raise StepTooLargeError(
            f"step exceeds oscillation resolution: step={step!r} > {limit!r} "
            f"(radius={radius!r}, max c={max_c!r})")


def integrate_linear(path: CoefficientPath, grid: np.ndarray, radii, a, b):
    """Classical RK4 for ``w'' = -c(t) r^2 w`` on ``grid``, vectorised over modes.

    Returns ``(w, w_dot)`` with shape ``(len(grid), len(radii))``.
    """
    r2 = np.asarray(radii, dtype=float) ** 2
    w = np.array(a, dtype=complex).reshape(r2.shape)
    v = np.array(b, dtype=complex).reshape(r2.shape)
    h = np.diff(grid)
    c0 = path(grid[:-1])
    cm = path(grid[:-1] + 0.5 * h)
    c1 = path(grid[1:])
    ws = np.empty((grid.size, r2.size), dtype=complex)
    vs = np.empty_like(ws)
    ws[0], vs[0] = w, v
    for n in range(h.size):
        hn = h[n]
        km0, kmm, km1 = c0[n] * r2, cm[n] * r2, c1[n] * r2
        k1w, k1v = v, -km0 * w
        k2w = v + 0.5 * hn * k1v
        k2v = -kmm * (w + 0.5 * hn * k1w)
        k3w = v + 0.5 * hn * k2v
        k3v = -kmm * (w + 0.5 * hn * k2w)
        k4w = v + hn * k3v
        k4v = -km1 * (w + hn * k3w)
        w = w + hn / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        v = v + hn / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        ws[n + 1], vs[n + 1] = w, v
    return ws, vs


def solve_mode(path: CoefficientPath, radius: float, a: complex, b: complex, step: float,
               extra_times=()) -> ModeTrajectory:
    """Integrate one frequency shell under ``path`` from ``(w, w') = (a, b)`` to the path horizon."""
    if not radius > 0:
        raise KirchhoffError("radius must be positive")
    check_step(step, radius, float(path.values.max()))
    grid = solve_grid(path, step, extra_times)
    ws, vs = integrate_linear(path, grid, [radius], [a], [b])
    return ModeTrajectory(float(radius), grid, ws[:, 0], vs[:, 0])


# ---------------------------------------------------------------------------
# energy certificate


@dataclass(frozen=True, eq=False)
class CertificateReport:
    radius: float
    sigma: float
    times: np.ndarray
    w: np.ndarray
    w_dot: np.ndarray
    c: np.ndarray
    c_star: np.ndarray
    alpha_integral: np.ndarray
    k_values: np.ndarray
    e_values: np.ndarray
    switch_time: float | None
    max_energy_increase: float
    interval_bound_ratio: float
    interval_bound_ok: bool
    k_bound_margin: float
    k_bound_ok: bool
    decay_tol: float = field(default=1e-6)

    @property
    def decay_ok(self) -> bool:
        return self.max_energy_increase <= self.decay_tol

    @property
    def passed(self) -> bool:
        return self.decay_ok and self.interval_bound_ok and self.k_bound_ok


def _abs_linear_integral(d0: np.ndarray, d1: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Exact ``int |d|`` over steps where ``d`` is linear from ``d0`` to ``d1``."""
    same_sign = d0 * d1 >= 0
    a0, a1 = np.abs(d0), np.abs(d1)
    denom = np.where(same_sign, 1.0, a0 + a1)
    crossing = h * (d0 ** 2 + d1 ** 2) / (2.0 * denom)
    return np.where(same_sign, 0.5 * h * (a0 + a1), crossing)


def energy_certificate(path: CoefficientPath, params: ClassKParams, radius: float,
                       a: complex, b: complex, g: GevreyParams, sigma: float, step: float,
                       *, membership_tol: float = 1e-9, decay_tol: float = 1e-6,
                       ratio_tol: float = 1e-6) -> CertificateReport:
    """Weighted-energy certificate for one frequency under an admissible coefficient.

    The coefficient is frozen for ``t > T - r^(-1/(qs-s))`` (or everywhere,
    at ``c(T)``, when ``T r^(1/(qs-s)) <= 1``).  With
    ``alpha = |c* - c| r / nu0 + |c*'| / c*`` and
    ``k = exp(-int alpha + eta r^(1/s))`` the energy
    ``E = (|w'|^2 + c* r^2 |w|^2) r^(4 sigma) k`` must not increase, and the
    weighted solution must stay below the data bound at every instant.
    ``int alpha`` is integrated exactly on each step.
    """
    nu0, big_m, q, horizon = params.nu0, params.big_m, params.q, params.horizon
    s, eta = g.s, g.eta
    reduced = eta - (params.k_const / (q - 1.0) + 2.0 * big_m) / nu0
    if not reduced > 0:
        raise EtaInadmissibleError(
            f"eta inadmissible for the energy estimate: eta={eta!r}, reduced weight {reduced!r} <= 0")
    membership = check_class_membership(path, params, membership_tol)
    if not membership.ok:
        raise ClassMembershipError(membership)
    if a == 0 and b == 0:
        raise KirchhoffError("certificate needs nonzero mode data")

    expo = 1.0 / (q * s - s)
    if horizon * radius ** expo <= 1.0:
        switch = None
        frozen = float(path(horizon))
        extra = ()
    else:
        switch = horizon - radius ** (-expo)
        frozen = float(path(switch))
        extra = (switch,)
    traj = solve_mode(path, radius, a, b, step, extra)
    t = traj.times
    c = path(t)
    if switch is None:
        c_star = np.full_like(c, frozen)
        pre = np.zeros(t.size - 1, dtype=bool)
    else:
        c_star = np.where(t <= switch, c, frozen)
        pre = t[1:] <= switch

    h = np.diff(t)
    inc_pre = np.abs(np.log(c[1:]) - np.log(c[:-1]))
    inc_post = radius / nu0 * _abs_linear_integral(frozen - c[:-1], frozen - c[1:], h)
    alpha_int = np.concatenate([[0.0], np.cumsum(np.where(pre, inc_pre, inc_post))])

    log_weight = eta * radius ** (1.0 / s)
    raw = np.abs(traj.w_dot) ** 2 + c_star * radius ** 2 * np.abs(traj.w) ** 2
    log_e = np.log(raw) + 4.0 * sigma * math.log(radius) - alpha_int + log_weight
    k_values = np.exp(log_weight - alpha_int)
    e_values = np.exp(log_e)
    rel_increase = np.expm1(np.diff(log_e))
    max_increase = max(0.0, float(rel_increase.max())) if rel_increase.size else 0.0

    freeze_exp = 2.0 * big_m / nu0 * max(1.0, horizon ** (1.0 - (q * s - s)))
    # lower bound for k, in log form
    k_margin = float(np.min((log_weight - alpha_int) - (-freeze_exp + reduced * radius ** (1.0 / s))))

    # everything carries the common factor r^(4 sigma), which cancels in the ratio
    lhs = np.exp((reduced - eta) * radius ** (1.0 / s)) * (
        nu0 * radius ** 2 * np.abs(traj.w) ** 2 + np.abs(traj.w_dot) ** 2)
    rhs = max(big_m, 1.0) * math.exp(freeze_exp) * (radius ** 2 * abs(a) ** 2 + abs(b) ** 2)
    ratio = float(np.max(lhs / rhs))

    return CertificateReport(
        radius=float(radius), sigma=float(sigma), times=t, w=traj.w, w_dot=traj.w_dot,
        c=c, c_star=c_star, alpha_integral=alpha_int, k_values=k_values, e_values=e_values,
        switch_time=switch, max_energy_increase=max_increase,
        interval_bound_ratio=ratio, interval_bound_ok=ratio <= 1.0 + ratio_tol,
        k_bound_margin=k_margin, k_bound_ok=k_margin >= -1e-12 * max(1.0, abs(log_weight)),
        decay_tol=decay_tol)
