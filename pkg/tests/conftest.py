import math
from collections import defaultdict

import numpy as np
import pytest

from lockcert.chain_engine import CornerChain, InterfaceData
from lockcert.lock_core import LemmaInput

SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)

# asinh(-sqrt 3), asinh(sqrt(2)/2), log 2 at 40 digits via mpmath
THETA_B1 = -1.316957896924816708625046347307968444027
THETA_B2 = 0.6584789484624083543086108960531062029547
LOG2 = 0.6931471805599453094172321214581765680755
MARGIN_B2 = 0.449489742783178098197284074705891391966  # sqrt 6 - 2


def chain_b(**kw) -> CornerChain:
    return CornerChain(
        3,
        (
            InterfaceData("sigma_1", (1.0,), (2.0,)),
            InterfaceData("sigma_2", (3.0,), (2.0,)),
        ),
        **kw,
    )


def euclidean_chain() -> CornerChain:
    return CornerChain(
        3,
        (
            InterfaceData("sigma_1", (2.0,), (2.0,)),
            InterfaceData("sigma_2", (1.0,), (1.0,)),
        ),
    )


def four_interface_chain(n=4) -> CornerChain:
    pairs = [(1, 2), (2, 2.5), (4, 3), (2, 1.5)]
    return CornerChain(
        n, tuple(InterfaceData(f"sigma_{i}", (lo,), (up,)) for i, (lo, up) in enumerate(pairs, 1))
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


def random_lemma_input(rng, n_samples=64, tight=False) -> LemmaInput:
    """Random admissible lemma instance.

    Mixes the generic case with the structured ones the chain engine feeds
    in: a = 0, Hlow == a, and zero radicand.  With ``tight`` the corner
    sample (Hlow, Hbar) is included and Hlow >= a.
    """
    while True:
        h_low = float(rng.uniform(0.1, 10.0))
        kind = rng.integers(0, 5)
        if kind == 0:
            a = 0.0
        elif kind == 1 and not tight:
            a = h_low
        else:
            a = float(rng.uniform(0.0, h_low if tight else 10.0))
        if kind == 3 and h_low > a:
            h_bar = math.sqrt(h_low**2 - a**2)
        else:
            h_bar = float(rng.uniform(0.1, 10.0))
        if h_bar**2 - h_low**2 + a**2 >= 0:
            break
    hm = h_low * (1.0 + rng.exponential(0.5, n_samples))
    hp = h_bar * rng.uniform(0.01, 1.0, n_samples)
    # Hit the bounds exactly on some samples.
    hm[rng.random(n_samples) < 0.1] = h_low
    hp[rng.random(n_samples) < 0.1] = h_bar
    samples = list(zip(hm.tolist(), hp.tolist()))
    if tight:
        samples[0] = (h_low, h_bar)
    return LemmaInput(h_low, h_bar, a, samples)


def random_interface(rng, name, low, up, k=None) -> InterfaceData:
    k = int(rng.integers(1, 9)) if k is None else k
    hm = low * (1.0 + rng.exponential(0.3, k))
    hp = up * rng.uniform(0.05, 1.0, k)
    hm[0] = low
    hp[-1] = up
    return InterfaceData(name, tuple(hm.tolist()), tuple(hp.tolist()))


def random_chain(rng, valid=False) -> CornerChain:
    """Random chain; with ``valid`` the split pattern and square-sum hold."""
    N = int(rng.integers(2, 7))
    lam = int(rng.integers(1, N))
    bounds = []
    for i in range(1, N + 1):
        x = float(rng.uniform(0.2, 5.0))
        y = x * (1.0 + float(rng.uniform(0.0, 1.5)))
        if not valid and rng.random() < 0.3:
            x, y = y, x
        bounds.append((x, y) if i <= lam else (y, x))
    if valid:
        deficit = sum(up * up - lo * lo for lo, up in bounds)
        if deficit > 0:
            lo, up = bounds[-1]
            bounds[-1] = (math.sqrt(lo * lo + deficit) * (1.0 + float(rng.uniform(0, 0.2))), up)
    n = int(rng.integers(3, 8))
    return CornerChain(
        n, tuple(random_interface(rng, f"sigma_{i}", lo, up) for i, (lo, up) in enumerate(bounds, 1))
    )


# Per-criterion pass/fail lines for the acceptance module.
_CRITERIA = defaultdict(list)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[marker.args[0]].append((item.name, report.outcome))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number k")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        results = _CRITERIA[k]
        ok = all(outcome == "passed" for _, outcome in results)
        names = ", ".join(f"{name}={outcome}" for name, outcome in results)
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  ({names})")
