"""Corner chains, the defect ledger and assembly of lock certificates.

A chain is the ordered list of corner hypersurfaces Sigma_1 .. Sigma_N
(innermost first) together with sampled one-sided mean curvatures.  The
defect ledger carries the prefix sums

    d_l = sum_{i <= l} (Hbar_{i,+}^2 - Hlow_{i,-}^2),   c_l = sqrt(max(d_l, 0)),

and region M_l receives the tensor k_l = c_l / (n - 1) * g_l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from . import lock_core
from .errors import (
    EmptySamples,
    HypothesesNotChecked,
    InterfaceError,
    InvariantBreach,
    LockError,
    OverrideInconsistent,
    StructuralMismatch,
    ValidationError,
)
from .lock_core import DEFAULT_TOL, Boost, LemmaInput

THEOREM_APPLIES = "TheoremApplies"
MIAO_CASE = "MiaoCase"
REJECTED = "Rejected"

CERTIFIED = "Certified"
CERTIFIED_MIAO = "CertifiedMiaoCase"
FAILED = "Failed"

# Frame of the jump condition: normal slot first, trace slot second, no shift terms.
CONVENTION = {
    "nu_plus": [1, 0],
    "tau_plus": [0, 1],
    "beta_plus": 0,
    "beta_minus": 0,
    "beta_delta": 0,
    "normal": "infinity-pointing",
}

UNCHECKED_HYPOTHESES = ("spin structure", "non-negative scalar curvature of each region")


@dataclass(frozen=True)
class InterfaceData:
    name: str
    samples_minus: tuple[float, ...]
    samples_plus: tuple[float, ...]
    bound_low_minus: float | None = None
    bound_up_plus: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "samples_minus", tuple(float(x) for x in self.samples_minus))
        object.__setattr__(self, "samples_plus", tuple(float(x) for x in self.samples_plus))
        if not self.samples_minus or not self.samples_plus:
            raise EmptySamples(f"{self.name}: empty samples")
        if len(self.samples_minus) != len(self.samples_plus):
            raise ValidationError(
                f"{self.name}: samples_minus and samples_plus differ in length "
                f"({len(self.samples_minus)} != {len(self.samples_plus)})"
            )
        for x in self.samples_minus + self.samples_plus:
            if not math.isfinite(x):
                raise ValidationError(f"{self.name}: non-finite sample {x!r}")

    @property
    def sample_count(self) -> int:
        return len(self.samples_minus)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.samples_minus, self.samples_plus))

    def scaled(self, lam: float) -> "InterfaceData":
        return InterfaceData(
            self.name,
            tuple(lam * x for x in self.samples_minus),
            tuple(lam * x for x in self.samples_plus),
            None if self.bound_low_minus is None else lam * self.bound_low_minus,
            None if self.bound_up_plus is None else lam * self.bound_up_plus,
        )


def effective_bounds(iface: InterfaceData) -> tuple[float, float]:
    """``(Hlow_-, Hbar_+)``: sample min/max, widened by overrides where given."""
    if not iface.samples_minus or not iface.samples_plus:
        raise EmptySamples(f"{iface.name}: empty samples")
    low = min(iface.samples_minus)
    up = max(iface.samples_plus)
    if iface.bound_low_minus is not None:
        if iface.bound_low_minus > low:
            raise OverrideInconsistent(
                f"{iface.name}: bound_low_minus={iface.bound_low_minus!r} exceeds sample {low!r}"
            )
        low = iface.bound_low_minus
    if iface.bound_up_plus is not None:
        if iface.bound_up_plus < up:
            raise OverrideInconsistent(
                f"{iface.name}: bound_up_plus={iface.bound_up_plus!r} is below sample {up!r}"
            )
        up = iface.bound_up_plus
    return low, up


@dataclass(frozen=True)
class CornerChain:
    n: int
    interfaces: tuple[InterfaceData, ...]
    lam: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "interfaces", tuple(self.interfaces))
        if int(self.n) != self.n or self.n < 3:
            raise ValidationError(f"dimension n must be an integer >= 3, got {self.n!r}")
        if len(self.interfaces) < 2:
            raise ValidationError(
                f"a chain needs N >= 2 interfaces, got {len(self.interfaces)}"
            )
        if self.lam is not None and not 1 <= self.lam < len(self.interfaces):
            raise ValidationError(f"lambda must satisfy 1 <= lambda < N, got {self.lam!r}")

    @property
    def N(self) -> int:
        return len(self.interfaces)

    def bounds(self) -> list[tuple[float, float]]:
        return [effective_bounds(f) for f in self.interfaces]

    def scale(self) -> float:
        return max(1.0, *(max(lo, up) for lo, up in self.bounds()))

    def scaled(self, lam: float) -> "CornerChain":
        return CornerChain(self.n, tuple(f.scaled(lam) for f in self.interfaces), self.lam)


@dataclass(frozen=True)
class HypothesisReport:
    positivity_ok: bool
    lambda_pattern_ok: bool
    lam: int | None
    lambda_candidates: tuple[int, ...]
    square_sum: float
    square_sum_ok: bool
    overall: str
    reason: str | None = None

    @property
    def label(self) -> str:
        return f"{REJECTED}({self.reason})" if self.overall == REJECTED else self.overall


def _pattern_ok(bounds, lam: int, slack: float) -> bool:
    head = all(lo <= up + slack for lo, up in bounds[:lam])
    tail = all(lo >= up - slack for lo, up in bounds[lam:])
    return head and tail


def check_hypotheses(chain: CornerChain, tol: float = DEFAULT_TOL) -> HypothesisReport:
    """Positivity, the concave-then-convex split pattern and the square-sum condition."""
    bounds = chain.bounds()
    scale = chain.scale()
    slack = tol * scale
    positivity_ok = all(
        x > 0 for f in chain.interfaces for x in f.samples_minus + f.samples_plus
    ) and all(lo > 0 and up > 0 for lo, up in bounds)

    N = chain.N
    if chain.lam is not None:
        candidates = (chain.lam,) if _pattern_ok(bounds, chain.lam, slack) else ()
    else:
        candidates = tuple(L for L in range(1, N) if _pattern_ok(bounds, L, slack))
    lam = candidates[0] if candidates else None

    ledger = ledger_from_bounds(bounds)
    # Same prefix sum as the ledger so that square_sum == -d_N exactly.
    square_sum = -ledger.d[-1] + 0.0
    square_sum_ok = square_sum >= -slack

    if not positivity_ok:
        overall, reason = REJECTED, "positivity"
    elif lam is None:
        overall, reason = REJECTED, "pattern"
    elif not square_sum_ok:
        overall, reason = REJECTED, "square_sum"
    else:
        overall = MIAO_CASE if ledger.lambda_prime is None else THEOREM_APPLIES
        reason = None
    return HypothesisReport(
        positivity_ok=positivity_ok,
        lambda_pattern_ok=lam is not None,
        lam=lam,
        lambda_candidates=candidates,
        square_sum=square_sum,
        square_sum_ok=square_sum_ok,
        overall=overall,
        reason=reason,
    )


@dataclass(frozen=True)
class DefectLedger:
    d: tuple[float, ...]
    c: tuple[float, ...]
    lambda_prime: int | None


def ledger_from_bounds(bounds: Sequence[tuple[float, float]]) -> DefectLedger:
    d = [0.0]
    for lo, up in bounds:
        d.append(d[-1] + (up * up - lo * lo))
    c = [0.0] + [math.sqrt(max(x, 0.0)) for x in d[1:]]
    positive = [ell for ell, x in enumerate(d) if x > 0]
    return DefectLedger(tuple(d), tuple(c), positive[-1] if positive else None)


def defect_ledger(chain: CornerChain) -> DefectLedger:
    return ledger_from_bounds(chain.bounds())


def k_constants(ledger: DefectLedger, n: int) -> list[float]:
    """Factors ``c_l / (n - 1)`` so that ``k_l = factor * g_l`` on region ``l``."""
    return [c / (n - 1) for c in ledger.c]


def effective_upper(ell: int, chain: CornerChain, ledger: DefectLedger, tol: float = DEFAULT_TOL) -> float:
    """Upper bound fed to the lemma at interface ``ell`` (1-based).

    Past the last positive defect the raw ``Hbar_{l,+}`` is replaced by
    ``sqrt(Hlow_{l,-}^2 - c_{l-1}^2)``, which forces the outgoing trace to 0.
    """
    if not 1 <= ell <= chain.N:
        raise IndexError(f"interface index {ell} outside 1..{chain.N}")
    low, up = effective_bounds(chain.interfaces[ell - 1])
    if ledger.lambda_prime is not None and ell <= ledger.lambda_prime:
        return up
    slack = tol * chain.scale()
    rad = low * low - ledger.c[ell - 1] ** 2
    if rad < 0:
        raise InvariantBreach(
            f"interface {ell}: Hlow_-^2 - c_(l-1)^2 = {rad!r} < 0"
        )
    adjusted = math.sqrt(rad)
    if adjusted < up - slack:
        raise InvariantBreach(
            f"interface {ell}: adjusted upper bound {adjusted!r} below Hbar_+ = {up!r}"
        )
    return max(adjusted, up)


@dataclass(frozen=True)
class InterfaceRecord:
    name: str
    a: float
    effective_up: float
    xi: float
    theta: float
    min_margin: float
    sample_count: int
    sinh_theta: float = 0.0

    def boost(self) -> Boost:
        return Boost(self.theta, self.sinh_theta)


@dataclass(frozen=True)
class LockCertificate:
    n: int
    verdict: str
    square_sum: float
    ledger: DefectLedger
    interfaces: tuple[InterfaceRecord, ...]
    k_factors: tuple[float, ...]
    tol: float
    scale: float
    reason: str | None = None
    failed_interface: int | None = None
    lam: int | None = None
    warnings: tuple[str, ...] = ()
    convention: dict = field(default_factory=lambda: dict(CONVENTION))
    unchecked_hypotheses: tuple[str, ...] = UNCHECKED_HYPOTHESES

    @property
    def sample_counts(self) -> list[int]:
        return [r.sample_count for r in self.interfaces]

    @property
    def certified(self) -> bool:
        return self.verdict in (CERTIFIED, CERTIFIED_MIAO)

    @property
    def label(self) -> str:
        if self.verdict == FAILED:
            return f"{FAILED}(interface {self.failed_interface})"
        if self.verdict == REJECTED:
            return f"{REJECTED}({self.reason})"
        return self.verdict

    @property
    def worst_margin(self) -> float:
        return min((r.min_margin for r in self.interfaces), default=math.nan)


def _miao_certificate(chain, report, ledger, tol, scale) -> LockCertificate:
    records = []
    warnings = []
    for ell, f in enumerate(chain.interfaces, start=1):
        _, up = effective_bounds(f)
        margin = min(hm - hp for hm, hp in f.samples)
        if margin < -tol * scale:
            warnings.append(
                f"interface {ell} ({f.name}): pointwise H_- - H_+ = {margin!r} < 0; "
                "relies on the bound-level reduction only"
            )
        records.append(InterfaceRecord(f.name, 0.0, up, 0.0, 0.0, margin, f.sample_count))
    return LockCertificate(
        n=chain.n,
        verdict=CERTIFIED_MIAO,
        square_sum=report.square_sum,
        ledger=ledger,
        interfaces=tuple(records),
        k_factors=tuple(0.0 for _ in ledger.c),
        tol=tol,
        scale=scale,
        lam=report.lam,
        warnings=tuple(warnings),
    )


def build_certificate(chain: CornerChain, tol: float = DEFAULT_TOL) -> LockCertificate:
    """Construct k and the boost angles for ``chain`` and verify every corner.

    Raises :class:`HypothesesNotChecked` when the chain fails the hypotheses;
    use :func:`certify` to get a rejected certificate instead.
    """
    report = check_hypotheses(chain, tol)
    if report.overall == REJECTED:
        raise HypothesesNotChecked(f"hypotheses fail: {report.label}")
    ledger = defect_ledger(chain)
    scale = chain.scale()
    if report.overall == MIAO_CASE:
        return _miao_certificate(chain, report, ledger, tol, scale)

    k = tuple(k_constants(ledger, chain.n))
    base = dict(
        n=chain.n, square_sum=report.square_sum, ledger=ledger, k_factors=k,
        tol=tol, scale=scale, lam=report.lam,
    )
    if ledger.lambda_prime == chain.N:
        # Only reachable through the square-sum tolerance slack.
        return LockCertificate(
            verdict=FAILED, interfaces=(), failed_interface=chain.N,
            reason=f"residual defect d_N = {ledger.d[-1]!r} > 0", **base,
        )

    records = []
    failed = None
    for ell, f in enumerate(chain.interfaces, start=1):
        low, _ = effective_bounds(f)
        a = ledger.c[ell - 1]
        try:
            up = effective_upper(ell, chain, ledger, tol)
            inp = LemmaInput(low, up, a, f.samples)
            x_out = lock_core.xi(up, low, a, tol)
            v = lock_core.verify_interface(inp, x_out, tol, scale)
        except LockError as exc:
            raise InterfaceError(ell, exc) from exc
        records.append(
            InterfaceRecord(f.name, a, up, v.xi, v.theta, v.min_margin, f.sample_count, v.sinh_theta)
        )
        if not v.passed and failed is None:
            failed = ell
    if failed is not None:
        return LockCertificate(
            verdict=FAILED, interfaces=tuple(records), failed_interface=failed,
            reason=f"min margin {records[failed - 1].min_margin!r} below tolerance", **base,
        )
    return LockCertificate(verdict=CERTIFIED, interfaces=tuple(records), **base)


def certify(chain: CornerChain, tol: float = DEFAULT_TOL) -> LockCertificate:
    """Like :func:`build_certificate`, but hypothesis failures yield a Rejected certificate."""
    report = check_hypotheses(chain, tol)
    if report.overall != REJECTED:
        return build_certificate(chain, tol)
    ledger = defect_ledger(chain)
    return LockCertificate(
        n=chain.n,
        verdict=REJECTED,
        square_sum=report.square_sum,
        ledger=ledger,
        interfaces=(),
        k_factors=tuple(k_constants(ledger, chain.n)),
        tol=tol,
        scale=chain.scale(),
        reason=report.reason,
        lam=report.lam,
    )


def verify_certificate(cert: LockCertificate, chain: CornerChain) -> bool:
    """Independently re-check ``cert`` against ``chain``.

    Only the recorded ``(a, effective_up, theta)`` are trusted as inputs; the
    ledger is recomputed from the chain bounds and every jump vector is
    re-evaluated at the chain's samples.
    """
    if len(cert.interfaces) != chain.N or len(cert.ledger.d) != chain.N + 1:
        raise StructuralMismatch(
            f"certificate covers {len(cert.interfaces)} interfaces, chain has {chain.N}"
        )
    for ell, (rec, f) in enumerate(zip(cert.interfaces, chain.interfaces), start=1):
        if rec.sample_count != f.sample_count:
            raise StructuralMismatch(
                f"interface {ell}: sample count {rec.sample_count} != {f.sample_count}"
            )
    if cert.verdict not in (CERTIFIED, CERTIFIED_MIAO):
        return False

    tol = cert.tol
    scale = chain.scale()
    slack = tol * scale
    N = chain.N

    expected = ledger_from_bounds(chain.bounds())
    for got, want in zip(cert.ledger.d, expected.d):
        if abs(got - want) > slack * scale:
            return False
    for d, c in zip(cert.ledger.d, cert.ledger.c):
        if c < 0 or abs(c * c - max(d, 0.0)) > slack * scale:
            return False
    if len(cert.k_factors) != N + 1:
        return False
    if cert.k_factors[0] != 0 or cert.k_factors[N] != 0:
        return False
    if cert.verdict == CERTIFIED_MIAO:
        if any(x > 0 for x in cert.ledger.d) or any(k != 0 for k in cert.k_factors):
            return False
    for c, kf in zip(cert.ledger.c, cert.k_factors):
        if abs(kf - c / (chain.n - 1)) > slack:
            return False

    # k-trace leaving Sigma_l must equal the one entering Sigma_{l+1}.
    traces = [kf * (chain.n - 1) for kf in cert.k_factors]
    for ell, (rec, f) in enumerate(zip(cert.interfaces, chain.interfaces), start=1):
        low, up = effective_bounds(f)
        if abs(rec.a - traces[ell - 1]) > slack:
            return False
        if rec.effective_up < up - slack:
            return False
        try:
            x_out = lock_core.xi(rec.effective_up, low, rec.a, tol)
        except LockError:
            return False
        if abs(x_out - traces[ell]) > math.sqrt(slack) * scale:
            return False
        b = Boost(rec.theta)
        for hm, hp in f.samples:
            x = lock_core.jump_vector(b, hm, rec.a, hp, traces[ell])
            if not lock_core.dec_jump_holds(x, tol, scale):
                return False
    return True


def perturb_theta(cert: LockCertificate, ell: int, delta: float) -> LockCertificate:
    """Copy of ``cert`` with the angle at interface ``ell`` (1-based) shifted by ``delta``."""
    recs = list(cert.interfaces)
    r = recs[ell - 1]
    theta = r.theta + delta
    recs[ell - 1] = replace(r, theta=theta, sinh_theta=math.sinh(theta))
    return replace(cert, interfaces=tuple(recs))
