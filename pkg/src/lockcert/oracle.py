"""Brute-force boost-angle oracle.

Scans a uniform grid of angles and records, for each, the worst jump margin
over the samples.  It never looks at the closed-form angle while scanning, so
it is an independent check on the lock construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import lock_core
from .chain_engine import CornerChain, certify, defect_ledger, effective_bounds, effective_upper
from .errors import LockError
from .lock_core import DEFAULT_TOL, LemmaInput

RANGE_TOO_NARROW = "RangeTooNarrow"
GRID_BEATS_CLOSED_FORM = "GridBeatsClosedForm"

_CHUNK = 4096


def margins_on_grid(thetas: np.ndarray, h_minus, h_plus, a: float, xi_out: float) -> np.ndarray:
    """Worst ``X1 - |X2|`` over the samples, for every angle in ``thetas``."""
    hm = np.asarray(h_minus, dtype=float)
    hp = np.asarray(h_plus, dtype=float)
    out = np.empty(len(thetas))
    for lo in range(0, len(thetas), _CHUNK):
        th = thetas[lo:lo + _CHUNK, None]
        ch, sh = np.cosh(th), np.sinh(th)
        x1 = ch * hm - sh * a - hp
        x2 = ch * a - sh * hm - xi_out
        out[lo:lo + _CHUNK] = np.min(x1 - np.abs(x2), axis=1)
    return out


def lipschitz_constant(h_minus, a: float, theta_max: float) -> float:
    """Bound on ``|d margin / d theta|`` for ``|theta| <= theta_max``."""
    return 2.0 * (float(np.max(np.abs(h_minus))) + abs(a)) * math.cosh(theta_max)


@dataclass
class ScanResult:
    name: str
    a: float
    xi_out: float
    grid_theta: float
    grid_margin: float
    step: float
    lipschitz: float
    resolution_bound: float
    closed_theta: float | None = None
    closed_margin: float | None = None
    flags: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "a": self.a,
            "xi_out": self.xi_out,
            "closed_theta": self.closed_theta,
            "closed_margin": self.closed_margin,
            "grid_theta": self.grid_theta,
            "grid_margin": self.grid_margin,
            "step": self.step,
            "lipschitz": self.lipschitz,
            "resolution_bound": self.resolution_bound,
            "flags": list(self.flags),
        }


def theta_grid(theta_range: float, steps: int) -> np.ndarray:
    if not theta_range > 0 or steps < 2:
        raise ValueError(f"need range > 0 and steps >= 2, got {theta_range!r}, {steps!r}")
    return np.linspace(-theta_range, theta_range, steps)


def scan(
    samples,
    a: float,
    xi_out: float,
    theta_range: float = 10.0,
    steps: int = 200_001,
    closed_theta: float | None = None,
    tol: float = DEFAULT_TOL,
    scale: float = 1.0,
    name: str = "",
) -> ScanResult:
    """Grid-scan one interface and compare against ``closed_theta`` if given.

    The flag ``GridBeatsClosedForm`` is raised when the best grid margin
    exceeds the closed-form margin by more than ``lipschitz * step / 2``
    plus ``tol * scale``.
    """
    hm = [m for m, _ in samples]
    hp = [p for _, p in samples]
    thetas = theta_grid(theta_range, steps)
    margins = margins_on_grid(thetas, hm, hp, a, xi_out)
    best = int(np.argmax(margins))
    step = float(thetas[1] - thetas[0])
    lip = lipschitz_constant(hm, a, theta_range)
    bound = 0.5 * lip * step + tol * scale
    res = ScanResult(
        name=name, a=a, xi_out=xi_out,
        grid_theta=float(thetas[best]), grid_margin=float(margins[best]),
        step=step, lipschitz=lip, resolution_bound=bound,
    )
    if closed_theta is not None:
        res.closed_theta = closed_theta
        res.closed_margin = lock_core.min_margin(closed_theta, samples, a, xi_out)
        if abs(closed_theta) > theta_range:
            res.flags.append(RANGE_TOO_NARROW)
        if res.grid_margin - res.closed_margin > bound:
            res.flags.append(GRID_BEATS_CLOSED_FORM)
    return res


def scan_lemma(inp: LemmaInput, xi_out: float | None = None, theta_range=10.0, steps=200_001, tol=DEFAULT_TOL) -> ScanResult:
    """Scan a single lemma instance.

    With a negative radicand the closed-form angle does not exist; the scan
    still runs (outgoing trace defaulting to 0) and reports what the grid
    can achieve.
    """
    rad = inp.radicand()
    if xi_out is None:
        xi_out = math.sqrt(max(rad, 0.0))
    try:
        closed = lock_core.lock_angle(inp.h_low_minus, inp.h_bar_plus, inp.a, tol)
    except LockError:
        closed = None
    return scan(inp.samples, inp.a, xi_out, theta_range, steps, closed, tol, inp.scale)


def scan_chain(chain: CornerChain, theta_range=10.0, steps=200_001, tol=DEFAULT_TOL) -> list[ScanResult]:
    """Scan every interface of ``chain`` with the ledger's incoming and outgoing traces.

    The trace leaving the last interface is pinned to 0, as asymptotic
    flatness demands; for chains violating the square-sum condition this is
    where the grid exhibits a negative best margin.
    """
    ledger = defect_ledger(chain)
    cert = certify(chain, tol)
    scale = chain.scale()
    results = []
    for ell, f in enumerate(chain.interfaces, start=1):
        a = ledger.c[ell - 1]
        xi_out = ledger.c[ell] if ell < chain.N else 0.0
        if cert.interfaces:
            rec = cert.interfaces[ell - 1]
            a, xi_out, closed = rec.a, (rec.xi if cert.verdict != "CertifiedMiaoCase" else 0.0), rec.theta
        else:
            low, _ = effective_bounds(f)
            try:
                up = effective_upper(ell, chain, ledger, tol)
                closed = lock_core.lock_angle(low, up, a, tol)
            except LockError:
                closed = None
        results.append(scan(f.samples, a, xi_out, theta_range, steps, closed, tol, scale, f.name))
    return results
