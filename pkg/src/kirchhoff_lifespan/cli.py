"""Command-line experiment runner.

Exit codes: 0 all checks passed, 1 invariant or certificate failure,
2 configuration error, 3 numerical refusal (a precondition was not met).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .bounds import RouteDisagreementError, Verdict, compare_bounds
from .config import ExperimentConfig, load_config
from .errors import ConfigError, KirchhoffError
from .kirchhoff import (
    Status,
    direct_solve,
    energy_32,
    fixed_point_solve,
    lifespan_probe,
)
from .linear import (
    ClassKParams,
    CoefficientPath,
    check_class_membership,
    energy_certificate,
    oscillating_path,
)
from .nonlinearity import AffinePhi, SampledPhi, compute_data_constants
from .reporting import (
    SWEEP_HEADER,
    certificate_rows,
    simulation_rows,
    write_csv,
    write_report,
)
from .spectral import GevreyParams

log = logging.getLogger("kirchhoff_lifespan")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_REFUSED = 0, 1, 2, 3

HAMILTONIAN_RTOL = 1e-8
DOMAIN_ATOL = 1e-8


class Run:
    """Per-invocation context: config, output directory and console output."""

    def __init__(self, cfg: ExperimentConfig, out_dir: Path, seed: int | None, quiet: bool):
        self.cfg = cfg
        self.out = out_dir
        self.seed = seed
        self.quiet = quiet

    def say(self, msg: str) -> None:
        if not self.quiet:
            print(msg)

    def csv(self, name: str, header, rows) -> None:
        if "csv" in self.cfg.formats:
            write_csv(self.out / name, header, rows)

    def report(self, name: str, data: dict) -> None:
        if "report" in self.cfg.formats:
            write_report(self.out / name, {"seed": self.seed, **data})


def _need(value, field: str):
    if value is None:
        raise ConfigError(f"{field}: required by this command")
    return value


def cmd_bounds(run: Run) -> int:
    cfg = run.cfg
    s = _need(cfg.s, "gevrey.s")
    if cfg.eta_sweep is not None:
        lo, hi, count = cfg.eta_sweep
        etas = np.linspace(lo, hi, count)
    else:
        etas = np.array([_need(cfg.eta, "gevrey.eta")])
    rows, reports = [], []
    for eta in etas:
        rep = compare_bounds(cfg.model, cfg.profile, GevreyParams(s, float(eta)))
        reports.append(rep)
        rows.append([rep.eta, rep.classical, rep.gevrey, rep.verdict, rep.k_const, rep.eta_prime])
    run.csv("bounds.csv", SWEEP_HEADER, rows)
    verdicts = [r.verdict for r in reports]
    flips = sum(1 for a, b in zip(verdicts, verdicts[1:]) if a != b)
    if len(reports) == 1:
        data = reports[0].to_flat()
    else:
        data = {"sweep_count": len(reports), "verdict_changes": flips,
                "first_gevrey_larger_eta": next(
                    (r.eta for r in reports if r.verdict is Verdict.GEVREY_STRICTLY_LARGER), None),
                **{k: v for k, v in reports[0].to_flat().items()
                   if k in ("classical", "lam", "big_m", "lip_l", "h0", "e32_0", "c_s", "s")}}
    run.report("bounds_report.json", data)
    last = reports[-1]
    run.say(f"classical={last.classical:.6g} gevrey={last.gevrey:.6g} verdict={last.verdict.value}"
            + (f" ({flips} verdict change{'' if flips == 1 else 's'} over sweep)" if len(reports) > 1 else ""))
    return EXIT_OK


def _is_linear(model) -> bool:
    if isinstance(model, AffinePhi):
        return model.slope == 0
    return isinstance(model, SampledPhi) and len(set(model.values)) == 1


def cmd_simulate(run: Run) -> int:
    cfg = run.cfg
    horizon = _need(cfg.horizon, "run.horizon")
    const = compute_data_constants(cfg.model, cfg.profile)
    threshold = cfg.blowup_factor * energy_32(cfg.model, cfg.profile)
    res = direct_solve(cfg.model, cfg.profile, horizon, cfg.step, threshold)
    drift = res.max_hamiltonian_drift
    grad_excess = float(np.max(res.grad_trace) - const.lam)
    checks = {
        "hamiltonian_drift_ok": drift <= HAMILTONIAN_RTOL,
        "domain_bound_ok": grad_excess <= DOMAIN_ATOL,
        "completed": res.status is Status.COMPLETED,
    }
    data = {"status": res.status, "flagged_at": res.flagged_at, "steps": len(res.times) - 1,
            "hamiltonian_0": res.hamiltonian_trace[0], "hamiltonian_drift": drift,
            "max_grad_norm_sq": float(np.max(res.grad_trace)), "lam": const.lam,
            "max_e32": float(np.max(res.e32_trace)), **checks}
    if _is_linear(cfg.model):
        c = cfg.model(0.0)
        omega = np.sqrt(c) * cfg.profile.radii
        t = res.times[:, None]
        exact = cfg.profile.pos * np.cos(omega * t) + cfg.profile.vel * np.sin(omega * t) / omega
        data["linear_mode_max_error"] = float(np.max(np.abs(res.w - exact)))
    run.csv("simulation.csv", *simulation_rows(res))
    run.report("simulate_report.json", data)
    run.say(f"status={res.status.value} hamiltonian drift={drift:.3e} max|grad u|^2={data['max_grad_norm_sq']:.6g}"
            f" (Lambda={const.lam:.6g})")
    return EXIT_OK if all(checks.values()) else EXIT_CHECK_FAILED


def cmd_theta(run: Run) -> int:
    cfg = run.cfg
    horizon = _need(cfg.horizon, "run.horizon")
    res = fixed_point_solve(cfg.model, cfg.profile, horizon, cfg.tol, cfg.max_iter, cfg.step)
    run.csv("theta_solution.csv", *simulation_rows(res.solution))
    run.csv("theta_distances.csv", ["iteration", "distance"],
            [(i + 1, d) for i, d in enumerate(res.distances)])
    ok = True
    if res.converged:
        ok = res.self_consistency <= cfg.tol and res.direct_gap <= 10 * cfg.tol
    run.report("theta_report.json", {
        "converged": res.converged, "iterations": len(res.distances), "tol": cfg.tol,
        "final_distance": res.distances[-1] if res.distances else None,
        "decreasing_after_2": all(b < a for a, b in zip(res.distances[1:], res.distances[2:])),
        "relaxed_from": res.relaxed_from, "self_consistency": res.self_consistency,
        "direct_gap": res.direct_gap, "checks_ok": ok})
    run.say(f"converged={res.converged} after {len(res.distances)} iterations; "
            f"self-consistency={res.self_consistency:.3e} direct gap={res.direct_gap:.3e}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _certify_path(settings, params: ClassKParams) -> CoefficientPath:
    opts = settings.path
    if opts["kind"] == "oscillating":
        return oscillating_path(params.nu0, params.big_m, params.q, params.horizon,
                                ratio=float(opts.get("ratio", 1e-3)),
                                amplitude=float(opts.get("amplitude", 1.0)),
                                slowdown=float(opts.get("slowdown", 1.0)))
    nodes = int(opts.get("nodes", 101))
    if "value" not in opts:
        raise ConfigError("certify.path.value: required for a constant path")
    return CoefficientPath.constant(float(opts["value"]), np.linspace(0.0, params.horizon, nodes))


def cmd_certify(run: Run) -> int:
    cfg = run.cfg
    st = _need(cfg.certify, "certify")
    params = ClassKParams(st.nu0, st.big_m, st.k_const, st.horizon, st.q)
    s = _need(cfg.s, "gevrey.s")
    eta = st.eta if st.eta is not None else _need(cfg.eta, "gevrey.eta")
    g = GevreyParams(s, eta)
    path = _certify_path(st, params)
    member = check_class_membership(path, params)
    if st.radii is not None:
        modes = [(r, 1.0 + 0j, 0j) for r in st.radii]
    else:
        modes = [(sh.radius, sh.pos_amp, sh.vel_amp) for sh in cfg.profile.shells]
    cmax = float(path.values.max())
    results, all_ok = [], True
    for i, (r, a, b) in enumerate(modes):
        step = min(cfg.step, st.step_factor / (r * math.sqrt(cmax)))
        cert = energy_certificate(path, params, r, a, b, g, st.sigma, step)
        run.csv(f"certificate_{i}.csv", *certificate_rows(cert))
        results.append({"radius": r, "step": step, "switch_time": cert.switch_time,
                        "max_energy_increase": cert.max_energy_increase, "decay_ok": cert.decay_ok,
                        "interval_bound_ratio": cert.interval_bound_ratio,
                        "interval_bound_ok": cert.interval_bound_ok,
                        "k_bound_margin": cert.k_bound_margin, "k_bound_ok": cert.k_bound_ok})
        all_ok &= cert.passed
        run.say(f"r={r:g}: max dE/E={cert.max_energy_increase:.3e} "
                f"interval ratio={cert.interval_bound_ratio:.3e} k-margin={cert.k_bound_margin:.3g}"
                f" -> {'ok' if cert.passed else 'FAIL'}")
    run.report("certify_report.json", {
        "eta": eta, "s": s, "membership_ok": member.ok, "membership_worst": member.worst_violation,
        "radii": results, "all_ok": all_ok})
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def cmd_probe(run: Run) -> int:
    cfg = run.cfg
    target = _need(cfg.probe_target, "probe.t_target")
    if isinstance(target, str):
        s = _need(cfg.s, "gevrey.s")
        rep = compare_bounds(cfg.model, cfg.profile, GevreyParams(s, _need(cfg.eta, "gevrey.eta")))
        target = rep.classical if target == "classical" else rep.gevrey
        if not math.isfinite(target):
            raise ConfigError(f"probe.t_target: the requested bound is {target!r}, nothing to probe")
    threshold = cfg.blowup_factor * energy_32(cfg.model, cfg.profile)
    res = lifespan_probe(cfg.model, cfg.profile, target, threshold, min(cfg.step, target))
    run.report("probe_report.json", {"t_target": target, "reached": res.reached,
                                     "flagged_at": res.flagged_at, "max_e32": res.max_e32})
    run.say(f"t_target={target:.6g} reached={res.reached} max E_3/2={res.max_e32:.6g}")
    return EXIT_OK if res.reached else EXIT_CHECK_FAILED


COMMANDS = {"bounds": cmd_bounds, "simulate": cmd_simulate, "theta": cmd_theta,
            "certify": cmd_certify, "probe": cmd_probe}

HELP = {
    "bounds": "classical and Gevrey life-span bounds, optionally over an eta sweep",
    "simulate": "direct integration of the shell system with energy checks",
    "theta": "fixed-point iteration of the linearise-and-solve map",
    "certify": "energy certificate for modes of a linear equation with a prescribed coefficient",
    "probe": "integrate up to a target time and report whether it was reached",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kirchhoff-lifespan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", required=True, type=Path, help="experiment config (YAML or JSON)")
        p.add_argument("--out", type=Path, default=None, help="output directory (overrides outputs.directory)")
        p.add_argument("--seed", type=int, default=None, help="recorded in reports")
        p.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        run = Run(cfg, args.out if args.out is not None else cfg.out_dir, args.seed, args.quiet)
        return COMMANDS[args.command](run)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RouteDisagreementError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except KirchhoffError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED


if __name__ == "__main__":
    sys.exit(main())
