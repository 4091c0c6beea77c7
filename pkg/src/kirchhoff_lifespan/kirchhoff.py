"""Nonlinear Kirchhoff dynamics on frequency shells.

Each shell obeys ``w_j'' + phi(sum_k mu_k r_k^2 |w_k|^2) r_j^2 w_j = 0``;
the shells interact only through that scalar coefficient.  The same solution
is reached either by integrating the coupled system directly or by iterating
the coefficient map ``c -> phi*(||grad v_c||^2)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, NumericalDivergenceError
from .linear import (
    GRID_EPS_REL,
    CoefficientPath,
    check_step,
    integrate_linear,
    solve_grid,
    uniform_grid,
)
from .nonlinearity import NonlinearityModel, compute_data_constants, phi_star
from .spectral import SpectralProfile, grad_norm_sq, weighted_norm_sq

log = logging.getLogger(__name__)

DEFAULT_BLOWUP_FACTOR = 1e6


def hamiltonian(model: NonlinearityModel, state: SpectralProfile) -> float:
    """Conserved first integral ``||u_t||^2 + int_0^{||grad u||^2} phi``."""
    return weighted_norm_sq(state, 0.0, 2.0, 0.0, "velocity") + model.integral(grad_norm_sq(state))


def energy_32(model: NonlinearityModel, state: SpectralProfile) -> float:
    """``phi(||grad u||^2) ||u||^2_{H^3/2} + ||u_t||^2_{H^1/2}`` (homogeneous norms)."""
    return (model(grad_norm_sq(state)) * weighted_norm_sq(state, 0.0, 2.0, 1.5, "position")
            + weighted_norm_sq(state, 0.0, 2.0, 0.5, "velocity"))


class Status(str, Enum):
    COMPLETED = "completed"
    BLOWUP_FLAGGED = "blowup_flagged"
    STEP_REJECTED = "step_rejected"


@dataclass(frozen=True, eq=False)
class SimulationResult:
    profile: SpectralProfile
    times: np.ndarray
    w: np.ndarray        # (n_times, n_shells)
    w_dot: np.ndarray
    c_trace: np.ndarray
    grad_trace: np.ndarray
    hamiltonian_trace: np.ndarray
    e32_trace: np.ndarray
    status: Status = Status.COMPLETED
    flagged_at: float | None = None

    def state(self, i: int) -> SpectralProfile:
        return self.profile.with_amplitudes(self.w[i], self.w_dot[i])

    @property
    def max_hamiltonian_drift(self) -> float:
        """``max_t |H(t) - H(0)| / (H(0) (1 + t))``."""
        h0 = self.hamiltonian_trace[0]
        return float(np.max(np.abs(self.hamiltonian_trace - h0) / (abs(h0) * (1.0 + self.times))))


def _traces(model: NonlinearityModel, profile: SpectralProfile, w: np.ndarray, wd: np.ndarray):
    r, mu = profile.radii, profile.masses
    w2, v2 = np.abs(w) ** 2, np.abs(wd) ** 2
    grad = w2 @ (mu * r ** 2)
    kinetic = v2 @ mu
    h32 = w2 @ (mu * r ** 3)
    h12 = v2 @ (mu * r)
    coeff = np.array([model(g) for g in grad])
    ham = kinetic + np.array([model.integral(g) for g in grad])
    return grad, coeff, ham, coeff * h32 + h12


def direct_solve(model: NonlinearityModel, profile: SpectralProfile, horizon: float, step: float,
                 blowup_threshold: float | None = None) -> SimulationResult:
    """Integrate the coupled shell system with RK4, re-evaluating the coefficient at every stage.

    Stops early with ``BLOWUP_FLAGGED`` once ``E_{3/2}`` exceeds
    ``blowup_threshold`` (default ``1e6 E_{3/2}(0)``).
    """
    const = compute_data_constants(model, profile)
    check_step(step, float(profile.radii.max()), const.big_m)
    if blowup_threshold is None:
        blowup_threshold = DEFAULT_BLOWUP_FACTOR * energy_32(model, profile)

    grid = uniform_grid(horizon, step)
    r2 = profile.radii ** 2
    weights = (profile.masses * r2).tolist()
    h32w = profile.masses * profile.radii ** 3
    h12w = profile.masses * profile.radii

    def coefficient(w):
        # fixed canonical reduction order, correctly rounded
        return model(math.fsum([m * (z.real * z.real + z.imag * z.imag) for m, z in zip(weights, w.tolist())]))

    w = profile.pos.copy()
    v = profile.vel.copy()
    ws = np.empty((grid.size, len(profile)), dtype=complex)
    vs = np.empty_like(ws)
    ws[0], vs[0] = w, v
    status, flagged_at, last = Status.COMPLETED, None, grid.size - 1
    for n in range(grid.size - 1):
        hn = grid[n + 1] - grid[n]
        k1w, k1v = v, -coefficient(w) * r2 * w
        w2 = w + 0.5 * hn * k1w
        k2w, k2v = v + 0.5 * hn * k1v, -coefficient(w2) * r2 * w2
        w3 = w + 0.5 * hn * k2w
        k3w, k3v = v + 0.5 * hn * k2v, -coefficient(w3) * r2 * w3
        w4 = w + hn * k3w
        k4w, k4v = v + hn * k3v, -coefficient(w4) * r2 * w4
        w = w + hn / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        v = v + hn / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(v))):
            raise NumericalDivergenceError(float(grid[n + 1]))
        ws[n + 1], vs[n + 1] = w, v
        e32 = coefficient(w) * float(np.abs(w) ** 2 @ h32w) + float(np.abs(v) ** 2 @ h12w)
        if e32 > blowup_threshold:
            status, flagged_at, last = Status.BLOWUP_FLAGGED, float(grid[n + 1]), n + 1
            log.warning("E_3/2 exceeded %g at t=%g", blowup_threshold, flagged_at)
            break

    times = grid[: last + 1]
    ws, vs = ws[: last + 1], vs[: last + 1]
    grad, coeff, ham, e32s = _traces(model, profile, ws, vs)
    # exact initial values, independent of the vectorised reductions
    ham[0] = hamiltonian(model, profile)
    return SimulationResult(profile, times, ws, vs, coeff, grad, ham, e32s, status, flagged_at)


def theta_map(model: NonlinearityModel, lam: float, profile: SpectralProfile,
              path: CoefficientPath, step: float) -> CoefficientPath:
    """Solve every shell linearly under ``path`` and return ``phi*(||grad v(t_i)||^2)`` on the path nodes."""
    grad = _linear_grad_at_nodes(profile, path, step)
    return CoefficientPath(path.times, [phi_star(model, lam, g) for g in grad])


def _linear_solve(profile: SpectralProfile, path: CoefficientPath, step: float):
    check_step(step, float(profile.radii.max()), float(path.values.max()))
    grid = solve_grid(path, step)
    ws, vs = integrate_linear(path, grid, profile.radii, profile.pos, profile.vel)
    return grid, ws, vs


def _linear_grad_at_nodes(profile: SpectralProfile, path: CoefficientPath, step: float) -> np.ndarray:
    grid, ws, _ = _linear_solve(profile, path, step)
    idx = np.searchsorted(grid, path.times)
    weights = profile.masses * profile.radii ** 2
    return np.array([math.fsum(row) for row in (np.abs(ws[idx]) ** 2 * weights)])


@dataclass(frozen=True, eq=False)
class ThetaResult:
    iterates: list[CoefficientPath]
    distances: list[float]
    converged: bool
    fixed_point: CoefficientPath
    solution: SimulationResult
    tol: float
    relaxed_from: int | None = None
    self_consistency: float = math.nan
    direct_gap: float = math.nan
    direct: SimulationResult | None = field(default=None, repr=False)


def fixed_point_solve(model: NonlinearityModel, profile: SpectralProfile, horizon: float, tol: float,
                      max_iter: int, step: float, *, relax: float = 0.5,
                      stall_window: int = 5) -> ThetaResult:
    """Iterate the coefficient map from ``c0 = phi(||grad u0||^2)`` until successive paths agree.

    Paths live on the uniform solve grid; distances are sup norms over nodes
    ``t <= T (1 - 1e-6)``.  If the distances stop decreasing over
    ``stall_window`` iterations the update switches to
    ``c <- (1 - relax) c + relax Theta(c)``.  On convergence the fixed point
    is checked for self-consistency and compared with :func:`direct_solve`.
    """
    const = compute_data_constants(model, profile)
    lam = const.lam
    cutoff = horizon * (1.0 - GRID_EPS_REL)
    times = uniform_grid(horizon, step)
    current = CoefficientPath.constant(model(grad_norm_sq(profile)), times)
    iterates, distances = [current], []
    relaxed_from = None
    converged = False
    for it in range(max_iter):
        image = theta_map(model, lam, profile, current, step)
        if relaxed_from is not None:
            image = CoefficientPath(times, (1.0 - relax) * current.values + relax * image.values)
        gap = image.sup_distance(current, cutoff)
        iterates.append(image)
        distances.append(gap)
        current = image
        log.debug("theta iteration %d: gap %.3e", it + 1, gap)
        if gap <= tol:
            converged = True
            break
        if relaxed_from is None and len(distances) >= stall_window:
            window = distances[-stall_window:]
            if any(b >= a for a, b in zip(window, window[1:])):
                relaxed_from = len(distances)
                log.info("theta iteration stalled; switching to relaxation %.2f", relax)

    grid, ws, vs = _linear_solve(profile, current, step)
    idx = np.searchsorted(grid, times)
    ws, vs = ws[idx], vs[idx]
    grad, _, ham, _ = _traces(model, profile, ws, vs)
    coeff = current.values.copy()
    h32 = np.abs(ws) ** 2 @ (profile.masses * profile.radii ** 3)
    h12 = np.abs(vs) ** 2 @ (profile.masses * profile.radii)
    solution = SimulationResult(profile, times, ws, vs, coeff, grad, ham,
                                np.array([model(g) for g in grad]) * h32 + h12)

    self_consistency = direct_gap = math.nan
    direct = None
    if converged:
        mask = times <= cutoff
        self_consistency = float(np.max(np.abs(
            coeff[mask] - np.array([phi_star(model, lam, g) for g in grad[mask]]))))
        direct = direct_solve(model, profile, horizon, step)
        direct_gap = float(np.max(np.abs(current(direct.times[mask]) - direct.c_trace[mask])))
    return ThetaResult(iterates, distances, converged, current, solution, tol, relaxed_from,
                       self_consistency, direct_gap, direct)


@dataclass(frozen=True)
class ProbeResult:
    reached: bool
    flagged_at: float | None
    max_e32: float
    t_target: float


def lifespan_probe(model: NonlinearityModel, profile: SpectralProfile, t_target: float,
                   blowup_threshold: float | None = None, step: float = 1e-3) -> ProbeResult:
    """Integrate to ``t_target`` and report whether ``E_{3/2}`` stayed finite and below the threshold."""
    if not t_target > 0:
        raise DomainError(f"t_target must be positive, got {t_target!r}")
    result = direct_solve(model, profile, t_target, step, blowup_threshold)
    finite = bool(np.all(np.isfinite(result.e32_trace)))
    reached = result.status is Status.COMPLETED and finite
    return ProbeResult(reached, result.flagged_at, float(np.max(result.e32_trace)), t_target)
