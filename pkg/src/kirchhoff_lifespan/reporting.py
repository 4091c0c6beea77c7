"""CSV tables and flat key/value reports.

Reals are written with 17 significant digits and '.' decimals, infinities as
``inf``.  Nothing time- or host-dependent is written, so reruns reproduce
files byte for byte.
"""

from __future__ import annotations

import csv
import json
import math
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .kirchhoff import SimulationResult
from .linear import CertificateReport


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, Enum):
        return str(x.value)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) for x in row])
    return path


def _plain(v):
    if isinstance(v, Enum):
        return v.value
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return v
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def write_report(path: Path, data: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(data), indent=2, sort_keys=True) + "\n")
    return path


def simulation_rows(result: SimulationResult):
    header = ["t", "c", "hamiltonian", "e32"]
    for j in range(result.w.shape[1]):
        header += [f"w_re_{j}", f"w_im_{j}", f"wdot_re_{j}", f"wdot_im_{j}"]
    rows = []
    for i, t in enumerate(result.times):
        row = [t, result.c_trace[i], result.hamiltonian_trace[i], result.e32_trace[i]]
        for w, v in zip(result.w[i], result.w_dot[i]):
            row += [w.real, w.imag, v.real, v.imag]
        rows.append(row)
    return header, rows


CERTIFICATE_HEADER = ["t", "w_re", "w_im", "wdot_re", "wdot_im", "c", "c_star", "alpha_int", "k", "E"]


def certificate_rows(cert: CertificateReport):
    rows = zip(cert.times, cert.w.real, cert.w.imag, cert.w_dot.real, cert.w_dot.imag,
               cert.c, cert.c_star, cert.alpha_integral, cert.k_values, cert.e_values)
    return CERTIFICATE_HEADER, rows


SWEEP_HEADER = ["eta", "classical", "gevrey", "verdict", "K", "eta_prime"]
