"""Radial frequency-shell representation of initial data and weighted norms.

Every quantity in the life-span analysis depends on the Fourier data only
through ``|xi|`` and the measure, so data are stored as a finite list of
shells ``(radius, position amplitude, velocity amplitude, mass)`` and every
norm is an exact finite sum over them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal, Sequence

import numpy as np

from .errors import (
    DomainError,
    InvalidGridError,
    InvalidProfileError,
    WeightOverflowError,
)

Component = Literal["position", "velocity"]

# exp() overflows just above this exponent
_MAX_EXP = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class FrequencyShell:
    radius: float
    pos_amp: complex = 0j
    vel_amp: complex = 0j
    mass: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InvalidProfileError(f"shell radius must be finite and > 0, got {self.radius!r}")
        if not (math.isfinite(self.mass) and self.mass >= 0):
            raise InvalidProfileError(f"shell mass must be finite and >= 0, got {self.mass!r}")
        object.__setattr__(self, "pos_amp", complex(self.pos_amp))
        object.__setattr__(self, "vel_amp", complex(self.vel_amp))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "mass", float(self.mass))

    @property
    def contributes(self) -> bool:
        return self.mass > 0 and (self.pos_amp != 0 or self.vel_amp != 0)


@dataclass(frozen=True)
class SpectralProfile:
    """Ordered collection of frequency shells.

    Shells are kept sorted by ``(radius, insertion index)``; that order is the
    summation order of every reduction.  Unless ``allow_trivial`` is set, at
    least one shell must carry nonzero mass and a nonzero amplitude.
    """

    shells: tuple[FrequencyShell, ...]
    dimension: int = 1
    allow_trivial: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        shells = tuple(sorted(self.shells, key=lambda sh: sh.radius))
        if not shells:
            raise InvalidProfileError("profile needs at least one shell")
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise InvalidProfileError(f"dimension must be a positive integer, got {self.dimension!r}")
        if not self.allow_trivial and not any(sh.contributes for sh in shells):
            raise InvalidProfileError("trivial data: every shell has zero mass or zero amplitudes")
        object.__setattr__(self, "shells", shells)
        object.__setattr__(self, "dimension", int(self.dimension))

    def __len__(self):
        return len(self.shells)

    @cached_property
    def radii(self) -> np.ndarray:
        return _frozen(np.array([sh.radius for sh in self.shells]))

    @cached_property
    def pos(self) -> np.ndarray:
        return _frozen(np.array([sh.pos_amp for sh in self.shells], dtype=complex))

    @cached_property
    def vel(self) -> np.ndarray:
        return _frozen(np.array([sh.vel_amp for sh in self.shells], dtype=complex))

    @cached_property
    def masses(self) -> np.ndarray:
        return _frozen(np.array([sh.mass for sh in self.shells]))

    @property
    def is_nontrivial(self) -> bool:
        return any(sh.contributes for sh in self.shells)

    def with_amplitudes(self, pos: Sequence[complex], vel: Sequence[complex]) -> SpectralProfile:
        """Same radii and masses, new amplitudes (used for evolved states)."""
        if len(pos) != len(self.shells) or len(vel) != len(self.shells):
            raise InvalidProfileError("amplitude arrays must match the number of shells")
        shells = tuple(
            FrequencyShell(sh.radius, complex(a), complex(b), sh.mass)
            for sh, a, b in zip(self.shells, pos, vel)
        )
        return SpectralProfile(shells, self.dimension, allow_trivial=True)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GevreyParams:
    """Gevrey order ``s > 1`` and exponential weight ``eta > 0``."""

    s: float
    eta: float

    def __post_init__(self):
        if not (math.isfinite(self.s) and self.s > 1):
            raise DomainError(f"Gevrey order s must be > 1, got {self.s!r}")
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise DomainError(f"Gevrey weight eta must be > 0, got {self.eta!r}")

    @property
    def q(self) -> float:
        """Decay exponent ``(s + 1) / s`` of the coefficient-derivative envelope."""
        return (self.s + 1.0) / self.s


def weighted_norm_sq(
    profile: SpectralProfile,
    eta: float,
    s: float,
    beta: float,
    component: Component = "position",
) -> float:
    """Return ``sum_j mass_j exp(eta r_j^(1/s)) r_j^(2 beta) |amp_j|^2``.

    With ``eta = 0`` the exponential weight is 1 and ``s`` is ignored.
    Raises :class:`WeightOverflowError` naming the first shell whose term is
    not representable.
    """
    if eta < 0 or not math.isfinite(eta):
        raise DomainError(f"eta must be finite and >= 0, got {eta!r}")
    if eta > 0 and not s > 1:
        raise DomainError(f"Gevrey order s must be > 1 when eta > 0, got {s!r}")
    if beta < 0:
        raise DomainError(f"negative-order norms are not supported (beta={beta!r})")
    if component == "position":
        amps = profile.pos
    elif component == "velocity":
        amps = profile.vel
    else:
        raise DomainError(f"unknown component {component!r}")

    terms = []
    for j, (r, m, amp) in enumerate(zip(profile.radii, profile.masses, amps)):
        base = m * abs(amp) ** 2
        if base == 0.0:
            continue
        log_weight = 2.0 * beta * math.log(r)
        if eta > 0:
            log_weight += eta * r ** (1.0 / s)
        if log_weight + math.log(base) > _MAX_EXP:
            raise WeightOverflowError(j, float(r))
        term = base * r ** (2.0 * beta)
        if eta > 0:
            term *= math.exp(eta * r ** (1.0 / s))
        terms.append(term)
    total = math.fsum(terms)
    if not math.isfinite(total):
        raise WeightOverflowError(len(profile) - 1, float(profile.radii[-1]))
    return total


def pair_gevrey_norm_sq(profile: SpectralProfile, g: GevreyParams) -> float:
    """Squared Gevrey norm of the pair ``((-Delta)^(3/4) u0, (-Delta)^(1/4) u1)``."""
    return (weighted_norm_sq(profile, g.eta, g.s, 1.5, "position")
            + weighted_norm_sq(profile, g.eta, g.s, 0.5, "velocity"))


def grad_norm_sq(profile: SpectralProfile) -> float:
    """``||grad u0||^2``."""
    return weighted_norm_sq(profile, 0.0, 2.0, 1.0, "position")


def unit_sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n, ``2 pi^(n/2) / Gamma(n/2)``."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def from_radial_samples(
    radii: Sequence[float],
    u0_values: Sequence[complex],
    u1_values: Sequence[complex],
    n: int,
) -> SpectralProfile:
    """Discretise radially symmetric Fourier data by the trapezoid rule.

    Shell masses are ``omega_n r_j^(n-1) Delta_j`` with ``Delta_j`` half the
    sum of the adjacent gaps (a single gap at the ends).  A one-point grid
    uses ``Delta = 1``.
    """
    r = np.asarray(radii, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise InvalidGridError("invalid radial grid: need a non-empty 1-d list of radii")
    if np.any(~np.isfinite(r)) or np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise InvalidGridError("invalid radial grid: radii must be positive and strictly ascending")
    if len(u0_values) != r.size or len(u1_values) != r.size:
        raise InvalidGridError("invalid radial grid: value lists must match the radii")
    if int(n) != n or n < 1:
        raise InvalidGridError(f"invalid radial grid: dimension must be >= 1, got {n!r}")

    if r.size == 1:
        widths = np.ones(1)
    else:
        gaps = np.diff(r)
        widths = np.zeros_like(r)
        widths[:-1] += gaps / 2
        widths[1:] += gaps / 2
    masses = unit_sphere_area(int(n)) * r ** (n - 1) * widths
    shells = tuple(
        FrequencyShell(float(ri), complex(a), complex(b), float(m))
        for ri, a, b, m in zip(r, u0_values, u1_values, masses)
    )
    return SpectralProfile(shells, int(n))
