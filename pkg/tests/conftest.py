import math

import pytest

from kirchhoff_lifespan import AffinePhi, FrequencyShell, SampledPhi, SpectralProfile
from kirchhoff_lifespan.spectral import grad_norm_sq


def single_shell(radius=1.0, a=1.0, b=0.0, mass=1.0):
    return SpectralProfile((FrequencyShell(radius, a, b, mass),))


def canonical_model():
    return AffinePhi(1.0, 1.0, 1.0)


def concentrated_instance():
    """Low-frequency shell with ||grad u0||^2 = 1 and a steep phi just past it.

    phi is flat on [0, 0.5] and rises with slope 1000 immediately after, so
    L is large while M stays close to nu0.  The classical bound is small
    enough (~0.227) that the Gevrey bound overtakes it for moderate eta.
    """
    r = 1e-3
    profile = single_shell(r, 1.0 / r, 0.0, 1.0)
    model = SampledPhi((0.0, 0.5, 0.5001), (1.0, 1.0, 1.1), 1.0)
    return model, profile


@pytest.fixture
def canonical():
    return canonical_model(), single_shell()


@pytest.fixture
def concentrated():
    return concentrated_instance()


def random_concentrated_instance(rng):
    """Random low-frequency profile with ||grad u0||^2 = 1 and a random steep phi.

    Both verdicts of the bound comparison occur with comparable frequency.
    """
    n = int(rng.integers(1, 4))
    radii = rng.uniform(1e-3, 1e-2, n)
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    b = 1e-3 * (rng.normal(size=n) + 1j * rng.normal(size=n))
    mu = rng.uniform(0.5, 2.0, n)
    prof = SpectralProfile(tuple(FrequencyShell(*x) for x in zip(radii, a, b, mu)))
    prof = SpectralProfile(prof.with_amplitudes(prof.pos / math.sqrt(grad_norm_sq(prof)), prof.vel).shells)
    nu0 = float(rng.uniform(0.5, 1.5))
    delta = float(10 ** rng.uniform(-5, -2))
    model = SampledPhi((0.0, 0.5, 0.5 + delta), (nu0, nu0, 1.1 * nu0), nu0)
    return model, prof


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = {}


def record_criterion(number, ok, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[number])
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
