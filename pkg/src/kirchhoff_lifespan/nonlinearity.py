"""The nonlinearity phi, its truncation, and the data constants Lambda, M, L.

Only affine and piecewise-linear phi are supported, so the antiderivative,
the supremum and the Lipschitz constant on ``[0, Lambda]`` are all exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, InvalidProfileError
from .spectral import SpectralProfile, grad_norm_sq, weighted_norm_sq


@dataclass(frozen=True)
class AffinePhi:
    """``phi(rho) = base + slope * rho``."""

    base: float
    slope: float
    nu0: float

    def __post_init__(self):
        _check_nu0(self.nu0)
        if self.slope < 0:
            raise DomainError("affine phi with negative slope eventually drops below nu0")
        if self.base < self.nu0:
            raise DomainError(f"phi(0) = {self.base!r} is below nu0 = {self.nu0!r}")

    def __call__(self, rho: float) -> float:
        return self.base + self.slope * rho

    def integral(self, upper: float) -> float:
        return self.base * upper + 0.5 * self.slope * upper * upper

    def sup_on(self, upper: float) -> float:
        return self(upper)

    def lipschitz_on(self, upper: float) -> float:
        return abs(self.slope) if upper > 0 else 0.0


@dataclass(frozen=True)
class SampledPhi:
    """Piecewise-linear phi through ``(nodes, values)``.

    Extended by the first value below the first node and by the last value
    beyond the last node.
    """

    nodes: tuple[float, ...]
    values: tuple[float, ...]
    nu0: float

    def __post_init__(self):
        _check_nu0(self.nu0)
        nodes = tuple(float(x) for x in self.nodes)
        values = tuple(float(v) for v in self.values)
        if len(nodes) == 0 or len(nodes) != len(values):
            raise DomainError("sampled phi needs equally many nodes and values (at least one)")
        if nodes[0] < 0 or any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise DomainError("sampled phi nodes must be nonnegative and strictly ascending")
        if min(values) < self.nu0:
            raise DomainError(f"sampled phi value {min(values)!r} is below nu0 = {self.nu0!r}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    def __call__(self, rho: float) -> float:
        return float(np.interp(rho, self.nodes, self.values))

    def _breakpoints(self, upper: float) -> np.ndarray:
        inner = [x for x in self.nodes if 0 < x < upper]
        return np.array([0.0, *inner, upper])

    def integral(self, upper: float) -> float:
        if upper == 0:
            return 0.0
        xs = self._breakpoints(upper)
        ys = np.interp(xs, self.nodes, self.values)
        # phi is linear between breakpoints, so the trapezoid rule is exact
        return math.fsum(0.5 * (ys[1:] + ys[:-1]) * np.diff(xs))

    def sup_on(self, upper: float) -> float:
        return float(np.interp(self._breakpoints(upper), self.nodes, self.values).max())

    def lipschitz_on(self, upper: float) -> float:
        # slopes of the node segments that meet [0, upper); the constant extensions have slope 0
        slopes = [abs((v1 - v0) / (x1 - x0))
                  for x0, x1, v0, v1 in zip(self.nodes, self.nodes[1:], self.values, self.values[1:])
                  if x0 < upper]
        return max(slopes, default=0.0)


NonlinearityModel = Union[AffinePhi, SampledPhi]


def _check_nu0(nu0: float) -> None:
    if not (math.isfinite(nu0) and nu0 > 0):
        raise DomainError(f"nu0 must be finite and > 0, got {nu0!r}")


def eval_phi(model: NonlinearityModel, rho: float) -> float:
    if rho < 0:
        raise DomainError(f"domain error: phi is defined on [0, inf), got rho={rho!r}")
    return model(rho)


def phi_integral(model: NonlinearityModel, upper: float) -> float:
    """Exact ``int_0^upper phi(rho) d rho``."""
    if upper < 0:
        raise DomainError(f"domain error: upper limit {upper!r} < 0")
    return model.integral(upper)


def phi_star(model: NonlinearityModel, lam: float, rho: float) -> float:
    """phi truncated at ``lam``: equal to phi below, frozen at ``phi(lam)`` above."""
    if rho < 0 or lam < 0:
        raise DomainError("domain error: phi_star needs rho >= 0 and lambda >= 0")
    return model(min(rho, lam))


@dataclass(frozen=True)
class DataConstants:
    lam: float
    big_m: float
    lip_l: float
    h0: float


def compute_data_constants(model: NonlinearityModel, profile: SpectralProfile) -> DataConstants:
    """``H(u;0)``, ``Lambda = H(u;0)/nu0`` and the exact sup / Lipschitz constant of phi on ``[0, Lambda]``."""
    if not profile.is_nontrivial:
        raise InvalidProfileError("trivial data: the data constants need nontrivial data")
    h0 = weighted_norm_sq(profile, 0.0, 2.0, 0.0, "velocity") + model.integral(grad_norm_sq(profile))
    lam = h0 / model.nu0
    return DataConstants(lam=lam, big_m=model.sup_on(lam), lip_l=model.lipschitz_on(lam), h0=h0)


def model_from_dict(doc: dict) -> NonlinearityModel:
    """Build a model from ``{kind: affine, base, slope, nu0}`` or ``{kind: sampled, nodes, values, nu0}``."""
    kind = doc.get("kind")
    if kind == "affine":
        return AffinePhi(float(doc["base"]), float(doc["slope"]), float(doc["nu0"]))
    if kind == "sampled":
        return SampledPhi(tuple(doc["nodes"]), tuple(doc["values"]), float(doc["nu0"]))
    raise DomainError(f"unknown nonlinearity kind {kind!r}")

