"""Life-span lower bounds and their comparison.

Two lower bounds for the maximal existence time ``T_m``:

* the Sobolev-level bound ``nu0^(3/2) / (4 L E_{3/2}(0))``;
* the Gevrey bound
  ``[min(nu0,1)/max(M,1) * exp(-2M/nu0)/(2 s L) * (nu0 eta - 2M)/||pair||^2]^(s/(s+1))``,
  valid for ``eta > 2M/nu0``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum

from .errors import EtaBelowThresholdError, KirchhoffError, TrivialDataError
from .kirchhoff import energy_32
from .nonlinearity import DataConstants, NonlinearityModel, compute_data_constants
from .spectral import GevreyParams, SpectralProfile, pair_gevrey_norm_sq

# relative gap below which two bound values count as a tie for route checking
_TIE_RTOL = 1e-9


class Verdict(str, Enum):
    GEVREY_STRICTLY_LARGER = "gevrey_strictly_larger"
    CLASSICAL_GEQ = "classical_geq"
    INCOMPARABLE_ETA_TOO_SMALL = "incomparable_eta_too_small"


class RouteDisagreementError(KirchhoffError):
    """Threshold-inequality verdict and direct comparison disagree."""


def classical_bound(nu0: float, lip_l: float, e32_at_0: float) -> float:
    if not e32_at_0 > 0:
        raise TrivialDataError(f"trivial data: E_3/2(0) = {e32_at_0!r}")
    if lip_l == 0:
        return math.inf
    return nu0 ** 1.5 / (4.0 * lip_l * e32_at_0)


def gevrey_bound(nu0: float, big_m: float, lip_l: float, s: float, eta: float,
                 pair_norm_sq: float) -> float:
    if not eta > 2.0 * big_m / nu0:
        raise EtaBelowThresholdError(
            f"eta below Gevrey threshold: eta={eta!r} <= 2M/nu0={2.0 * big_m / nu0!r}")
    if lip_l == 0:
        return math.inf
    base = (min(nu0, 1.0) / max(big_m, 1.0)
            * math.exp(-2.0 * big_m / nu0) / (2.0 * s * lip_l)
            * (nu0 * eta - 2.0 * big_m) / pair_norm_sq)
    return base ** (s / (s + 1.0))


def compute_K(nu0: float, big_m: float, lip_l: float, s: float, t_m: float,
              pair_norm_sq: float) -> float:
    """Derivative-envelope constant of the coefficient class on ``[0, t_m]``."""
    if lip_l == 0:
        return 0.0
    return (2.0 * lip_l * max(big_m, 1.0) / min(nu0, 1.0) * math.exp(2.0 * big_m / nu0)
            * t_m ** ((s + 1.0) / s) * pair_norm_sq)


def eta_prime(eta: float, k_const: float, q: float, big_m: float, nu0: float) -> float:
    """Reduced weight ``eta - (K/(q-1) + 2M)/nu0``; positive iff eta is admissible."""
    return eta - (k_const / (q - 1.0) + 2.0 * big_m) / nu0


def c_s_constant(nu0: float, big_m: float, lip_l: float, s: float) -> float:
    if lip_l == 0:
        return math.inf
    q = (s + 1.0) / s
    return (max(big_m, 1.0) / min(nu0, 1.0) * 2.0 * s * lip_l * math.exp(2.0 * big_m / nu0)
            * (nu0 ** 1.5 / (4.0 * lip_l)) ** q)


@dataclass(frozen=True)
class BoundReport:
    eta: float
    s: float
    classical: float
    gevrey: float
    constants: DataConstants
    e32_0: float
    pair_norm_sq: float
    k_const: float
    eta_prime: float
    c_s: float
    eta_threshold: float
    verdict: Verdict

    def to_flat(self) -> dict:
        """Flat key/value form; ``inf``/``nan`` become strings."""
        out = {k: v for k, v in asdict(self).items() if k != "constants"}
        out.update(asdict(self.constants))
        out["verdict"] = self.verdict.value
        return {k: _jsonable(v) for k, v in out.items()}


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return v


def compare_bounds(model: NonlinearityModel, profile: SpectralProfile, g: GevreyParams) -> BoundReport:
    """Evaluate both bounds and decide which is larger, by two routes.

    The direct comparison of the two values is authoritative.  The threshold
    route ``eta > 2M/nu0 + C_s * ||pair||^2 / (nu0 * E_{3/2}(0)^((s+1)/s))``
    must agree with it except at numerical ties.  Ties count as
    ``classical_geq``.  ``k_const`` is evaluated at ``T_m = classical``, so
    ``eta_prime > 0`` exactly when the Gevrey bound is strictly larger.
    """
    const = compute_data_constants(model, profile)
    nu0, big_m, lip_l, s, eta = model.nu0, const.big_m, const.lip_l, g.s, g.eta
    e32 = energy_32(model, profile)
    pair = pair_gevrey_norm_sq(profile, g)
    classical = classical_bound(nu0, lip_l, e32)
    c_s = c_s_constant(nu0, big_m, lip_l, s)
    k_const = 0.0 if lip_l == 0 else compute_K(nu0, big_m, lip_l, s, classical, pair)
    ep = eta_prime(eta, k_const, g.q, big_m, nu0)
    if c_s == math.inf:
        eta_threshold = math.inf
    else:
        eta_threshold = 2.0 * big_m / nu0 + c_s * pair / (nu0 * e32 ** g.q)

    if not eta > 2.0 * big_m / nu0:
        gevrey = math.nan
        verdict = Verdict.INCOMPARABLE_ETA_TOO_SMALL
    else:
        gevrey = gevrey_bound(nu0, big_m, lip_l, s, eta, pair)
        direct = gevrey > classical
        by_threshold = eta > eta_threshold
        if direct != by_threshold and not _near_tie(gevrey, classical):
            raise RouteDisagreementError(
                f"threshold route says {by_threshold}, direct comparison says {direct} "
                f"(eta={eta!r}, threshold={eta_threshold!r})")
        verdict = Verdict.GEVREY_STRICTLY_LARGER if direct else Verdict.CLASSICAL_GEQ

    return BoundReport(eta=eta, s=s, classical=classical, gevrey=gevrey, constants=const,
                       e32_0=e32, pair_norm_sq=pair, k_const=k_const, eta_prime=ep, c_s=c_s,
                       eta_threshold=eta_threshold, verdict=verdict)


def _near_tie(a: float, b: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= _TIE_RTOL * max(abs(a), abs(b))
