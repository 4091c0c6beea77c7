"""Experiment configuration: a versioned YAML (or JSON) document.

Example::

    version: 1
    model: {kind: affine, base: 1.0, slope: 1.0, nu0: 1.0}
    profile:
      dimension: 1
      shells:
        - {radius: 1.0, pos_re: 1.0, pos_im: 0.0, vel_re: 0.0, vel_im: 0.0, mass: 1.0}
    gevrey: {s: 2.0, eta: 6.0}          # or eta_sweep: {from: 3, to: 30, count: 100}
    run: {horizon: 20.0, step: 1.0e-3, tol: 1.0e-8, max_iter: 50, blowup_factor: 1.0e6}
    outputs: {directory: out, formats: [csv, report]}

Optional sections ``certify`` and ``probe`` configure the commands of the
same name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError, KirchhoffError
from .nonlinearity import NonlinearityModel, model_from_dict
from .spectral import FrequencyShell, SpectralProfile, from_radial_samples

SCHEMA_VERSION = 1
FORMATS = frozenset({"csv", "report"})


@dataclass(frozen=True)
class CertifySettings:
    nu0: float
    big_m: float
    k_const: float
    horizon: float
    q: float
    path: dict
    radii: tuple[float, ...] | None = None
    sigma: float = 0.0
    eta: float | None = None
    step_factor: float = 0.02


@dataclass(frozen=True)
class ExperimentConfig:
    model: NonlinearityModel
    profile: SpectralProfile
    s: float | None = None
    eta: float | None = None
    eta_sweep: tuple[float, float, int] | None = None
    horizon: float | None = None
    step: float = 1e-3
    tol: float = 1e-8
    max_iter: int = 50
    blowup_factor: float = 1e6
    out_dir: Path = Path("out")
    formats: frozenset = field(default=FORMATS)
    certify: CertifySettings | None = None
    probe_target: float | str | None = None


def _require(d: Any, key: str, where: str):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected a mapping")
    if key not in d:
        raise ConfigError(f"{where}.{key}: missing required field")
    return d[key]


def _number(value, where: str, *, positive: bool = False, nonneg: bool = False) -> float:
    if isinstance(value, str):
        # YAML 1.1 reads exponent literals such as 1e-3 as strings
        try:
            value = float(value)
        except ValueError:
            pass
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    x = float(value)
    if not math.isfinite(x):
        raise ConfigError(f"{where}: must be finite")
    if positive and not x > 0:
        raise ConfigError(f"{where}: must be > 0, got {x!r}")
    if nonneg and x < 0:
        raise ConfigError(f"{where}: must be >= 0, got {x!r}")
    return x


def _parse_profile(doc: Any) -> SpectralProfile:
    if not isinstance(doc, dict):
        raise ConfigError("profile: expected a mapping")
    if "shells" in doc and "radial" in doc:
        raise ConfigError("profile: give either shells or radial, not both")
    try:
        if "radial" in doc:
            rad = doc["radial"]
            radii = _require(rad, "radii", "profile.radial")
            n = int(_number(rad.get("dimension", doc.get("dimension", 1)), "profile.radial.dimension",
                            positive=True))

            def cplx(re_key, im_key):
                re = rad.get(re_key, [0.0] * len(radii))
                im = rad.get(im_key, [0.0] * len(radii))
                if len(re) != len(radii) or len(im) != len(radii):
                    raise ConfigError(f"profile.radial.{re_key}: length must match radii")
                return [complex(_number(a, f"profile.radial.{re_key}"), _number(b, f"profile.radial.{im_key}"))
                        for a, b in zip(re, im)]

            return from_radial_samples(radii, cplx("u0_re", "u0_im"), cplx("u1_re", "u1_im"), n)
        shells_doc = _require(doc, "shells", "profile")
        if not isinstance(shells_doc, list) or not shells_doc:
            raise ConfigError("profile.shells: expected a non-empty list")
        shells = []
        for i, sh in enumerate(shells_doc):
            where = f"profile.shells[{i}]"
            shells.append(FrequencyShell(
                _number(_require(sh, "radius", where), f"{where}.radius", positive=True),
                complex(_number(sh.get("pos_re", 0.0), f"{where}.pos_re"),
                        _number(sh.get("pos_im", 0.0), f"{where}.pos_im")),
                complex(_number(sh.get("vel_re", 0.0), f"{where}.vel_re"),
                        _number(sh.get("vel_im", 0.0), f"{where}.vel_im")),
                _number(sh.get("mass", 1.0), f"{where}.mass", nonneg=True),
            ))
        dim = int(_number(doc.get("dimension", 1), "profile.dimension", positive=True))
        return SpectralProfile(tuple(shells), dim)
    except ConfigError:
        raise
    except KirchhoffError as exc:
        raise ConfigError(f"profile: {exc}") from exc


def _parse_certify(doc: Any) -> CertifySettings:
    where = "certify"
    cls = _require(doc, "class", where)
    path = _require(doc, "path", where)
    if not isinstance(path, dict) or path.get("kind") not in ("oscillating", "constant"):
        raise ConfigError("certify.path.kind: expected 'oscillating' or 'constant'")
    radii = doc.get("radii")
    if radii is not None:
        radii = tuple(_number(r, f"certify.radii[{i}]", positive=True) for i, r in enumerate(radii))
    eta = doc.get("eta")
    return CertifySettings(
        nu0=_number(_require(cls, "nu0", "certify.class"), "certify.class.nu0", positive=True),
        big_m=_number(_require(cls, "big_m", "certify.class"), "certify.class.big_m", positive=True),
        k_const=_number(_require(cls, "k_const", "certify.class"), "certify.class.k_const", nonneg=True),
        horizon=_number(_require(cls, "horizon", "certify.class"), "certify.class.horizon", positive=True),
        q=_number(_require(cls, "q", "certify.class"), "certify.class.q", positive=True),
        path=dict(path),
        radii=radii,
        sigma=_number(doc.get("sigma", 0.0), "certify.sigma", nonneg=True),
        eta=None if eta is None else _number(eta, "certify.eta", positive=True),
        step_factor=_number(doc.get("step_factor", 0.02), "certify.step_factor", positive=True),
    )


def parse_config(doc: Any) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a mapping at top level")
    version = doc.get("version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"version: expected {SCHEMA_VERSION}, got {version!r}")
    try:
        model = model_from_dict(_require(doc, "model", "config"))
    except ConfigError:
        raise
    except (KirchhoffError, KeyError, TypeError) as exc:
        raise ConfigError(f"model: {exc}") from exc
    profile = _parse_profile(_require(doc, "profile", "config"))

    kw: dict[str, Any] = {}
    gev = doc.get("gevrey")
    if gev is not None:
        kw["s"] = _number(_require(gev, "s", "gevrey"), "gevrey.s")
        if not kw["s"] > 1:
            raise ConfigError(f"gevrey.s: must be > 1, got {kw['s']!r}")
        has_eta, has_sweep = "eta" in gev, "eta_sweep" in gev
        if has_eta == has_sweep:
            raise ConfigError("gevrey: give exactly one of eta / eta_sweep")
        if has_eta:
            kw["eta"] = _number(gev["eta"], "gevrey.eta", positive=True)
        else:
            sw = gev["eta_sweep"]
            lo = _number(_require(sw, "from", "gevrey.eta_sweep"), "gevrey.eta_sweep.from", positive=True)
            hi = _number(_require(sw, "to", "gevrey.eta_sweep"), "gevrey.eta_sweep.to", positive=True)
            count = _require(sw, "count", "gevrey.eta_sweep")
            if isinstance(count, bool) or not isinstance(count, int) or count < 1:
                raise ConfigError("gevrey.eta_sweep.count: expected a positive integer")
            if hi < lo:
                raise ConfigError("gevrey.eta_sweep.to: must be >= from")
            kw["eta_sweep"] = (lo, hi, count)

    run = doc.get("run", {}) or {}
    if "horizon" in run:
        kw["horizon"] = _number(run["horizon"], "run.horizon", positive=True)
    for key in ("step", "tol", "blowup_factor"):
        if key in run:
            kw[key] = _number(run[key], f"run.{key}", positive=True)
    if "max_iter" in run:
        mi = run["max_iter"]
        if isinstance(mi, bool) or not isinstance(mi, int) or mi < 1:
            raise ConfigError("run.max_iter: expected a positive integer")
        kw["max_iter"] = mi

    out = doc.get("outputs", {}) or {}
    if "directory" in out:
        kw["out_dir"] = Path(str(out["directory"]))
    if "formats" in out:
        formats = frozenset(out["formats"])
        if not formats <= FORMATS:
            raise ConfigError(f"outputs.formats: unknown formats {sorted(formats - FORMATS)}")
        kw["formats"] = formats

    if "certify" in doc:
        kw["certify"] = _parse_certify(doc["certify"])
    if "probe" in doc:
        target = _require(doc["probe"], "t_target", "probe")
        if isinstance(target, str):
            if target not in ("classical", "gevrey"):
                raise ConfigError("probe.t_target: expected a number, 'classical' or 'gevrey'")
            kw["probe_target"] = target
        else:
            kw["probe_target"] = _number(target, "probe.t_target", positive=True)
    return ExperimentConfig(model=model, profile=profile, **kw)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: not valid YAML/JSON: {exc}") from exc
    return parse_config(doc)
