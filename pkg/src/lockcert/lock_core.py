"""Minkowski-plane algebra and the closed-form boost angle of the lock lemma.

Vectors of R^{1,1} carry the mean curvature in their first ("time") slot and
the trace of the k-tensor in their second ("space") slot.  The boost matrix is

    F = [[cosh t, -sinh t],
         [-sinh t, cosh t]]

and an interface passes when the jump vector X = F H_minus - H_plus lies in
the closed future cone, X.t >= |X.s|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .errors import DegenerateAngle, NegativeTrace, RadicandNegative, SampleOutOfBounds

DEFAULT_TOL = 1e-9

# Denominator threshold (relative to Hlow^2 + Hbar^2 + a^2) below which the
# conjugate form of sinh(theta) is abandoned in favour of the raw quotient.
_STABLE_DENOM_REL = 1e-9
# Radicands this close to 0 (relative to the sum of squares) are rounding noise.
_NOISE = 16 * 2.0**-52


class LorentzVec(NamedTuple):
    t: float
    s: float


def lorentz_norm_sq(v: LorentzVec) -> float:
    """Quadratic form ``t**2 - s**2`` of the Minkowski plane."""
    return v.t * v.t - v.s * v.s


@dataclass(frozen=True)
class Boost:
    """Hyperbolic rotation by ``theta`` with cached hyperbolic functions."""

    theta: float
    sinh_theta: float = field(default=math.nan)
    cosh_theta: float = field(default=math.nan)

    def __post_init__(self):
        if math.isnan(self.sinh_theta):
            object.__setattr__(self, "sinh_theta", math.sinh(self.theta))
        object.__setattr__(self, "cosh_theta", math.sqrt(1.0 + self.sinh_theta**2))

    @classmethod
    def from_sinh(cls, sinh_theta: float) -> "Boost":
        # Keeps sinh exact instead of round-tripping through asinh.
        return cls(math.asinh(sinh_theta), sinh_theta)

    def inverse(self) -> "Boost":
        return Boost(-self.theta, -self.sinh_theta)


def boost_apply(b: Boost | float, v: LorentzVec) -> LorentzVec:
    """Apply ``F_theta`` to ``v``; ``b`` may be a :class:`Boost` or a bare angle."""
    if not isinstance(b, Boost):
        b = Boost(b)
    ch, sh = b.cosh_theta, b.sinh_theta
    return LorentzVec(ch * v.t - sh * v.s, -sh * v.t + ch * v.s)


def _check_trace(a: float) -> None:
    if a < 0:
        raise NegativeTrace(f"k-trace constant must be >= 0, got a={a!r}")


def _scale(*values: float) -> float:
    return max(1.0, *(abs(x) for x in values))


def _radicand(h_bar_plus: float, h_low_minus: float, a: float, tol: float) -> float:
    """``Hbar_+^2 - Hlow_-^2 + a^2`` with near-zero values snapped to 0.

    Values at rounding-noise level snap to 0 from either side.  Larger
    negative values down to ``-tol`` (relative to the squared input scale)
    also clamp to 0; anything below raises.  Positive radicands above the
    noise floor are never snapped, since the square root would magnify the
    change.
    """
    _check_trace(a)
    rad = h_bar_plus**2 - h_low_minus**2 + a**2
    noise = _NOISE * (h_bar_plus**2 + h_low_minus**2 + a**2)
    if rad < -tol * _scale(h_bar_plus, h_low_minus, a) ** 2:
        raise RadicandNegative(
            f"Hbar_+^2 - Hlow_-^2 + a^2 = {rad!r} < 0 "
            f"(Hbar_+={h_bar_plus!r}, Hlow_-={h_low_minus!r}, a={a!r})"
        )
    return 0.0 if rad <= noise else rad


def xi(h_bar_plus: float, h_low_minus: float, a: float, tol: float = DEFAULT_TOL) -> float:
    """Outgoing k-trace ``sqrt(Hbar_+^2 - Hlow_-^2 + a^2)``."""
    return math.sqrt(_radicand(h_bar_plus, h_low_minus, a, tol))


def sinh_raw(h_low_minus: float, h_bar_plus: float, a: float, xi_val: float) -> float:
    """The unrationalised quotient ``(a Hbar - xi Hlow) / (Hlow^2 - a^2)``.

    Singular at ``Hlow == a``; kept as a cross-check for :func:`lock_angle`.
    """
    return (a * h_bar_plus - xi_val * h_low_minus) / (h_low_minus**2 - a**2)


def sinh_stable(h_low_minus: float, h_bar_plus: float, a: float, xi_val: float) -> float:
    """Conjugate form ``(Hlow^2 - Hbar^2) / (a Hbar + xi Hlow)``."""
    return (h_low_minus**2 - h_bar_plus**2) / (a * h_bar_plus + xi_val * h_low_minus)


def angle_equal_branch(h_low_minus: float, h_bar_plus: float) -> float:
    """Angle used when ``Hlow_- == a``: ``log Hlow_- - log Hbar_+``."""
    return math.log(h_low_minus) - math.log(h_bar_plus)


def lock_sinh(h_low_minus: float, h_bar_plus: float, a: float, tol: float = DEFAULT_TOL) -> float:
    """sinh of the lock angle, evaluated in the numerically stable form.

    When the radicand snaps to 0 the bound is moved to
    ``sqrt(Hlow^2 - a^2)``, where it vanishes exactly, and the conjugate
    form reduces to ``a / sqrt(Hlow^2 - a^2)`` without cancellation.
    """
    rad = _radicand(h_bar_plus, h_low_minus, a, tol)
    if rad == 0.0 and h_low_minus > a:
        return a / math.sqrt((h_low_minus - a) * (h_low_minus + a))
    x = math.sqrt(rad)
    quad = h_low_minus**2 + h_bar_plus**2 + a**2
    denom = a * h_bar_plus + x * h_low_minus
    if denom > _STABLE_DENOM_REL * quad:
        return sinh_stable(h_low_minus, h_bar_plus, a, x)
    # Here a and xi are negligible next to the bounds, so Hlow ~ Hbar.
    if abs(h_low_minus - h_bar_plus) > tol * max(h_low_minus, h_bar_plus):
        raise DegenerateAngle(
            f"a and xi both vanish but Hlow_-={h_low_minus!r} != Hbar_+={h_bar_plus!r}"
        )
    if h_low_minus == a:
        return math.sinh(angle_equal_branch(h_low_minus, h_bar_plus))
    return sinh_raw(h_low_minus, h_bar_plus, a, x)


def lock_angle(h_low_minus: float, h_bar_plus: float, a: float, tol: float = DEFAULT_TOL) -> float:
    """Boost angle putting every jump vector of the interface in the future cone.

    >>> round(lock_angle(2.0, 1.0, 2.0), 12) == round(math.log(2.0), 12)
    True
    """
    return math.asinh(lock_sinh(h_low_minus, h_bar_plus, a, tol))


def jump_vector(theta: Boost | float, h_minus: float, a: float, h_plus: float, xi_out: float) -> LorentzVec:
    """``F_theta (h_minus, a) - (h_plus, xi_out)``."""
    v = boost_apply(theta, LorentzVec(h_minus, a))
    return LorentzVec(v.t - h_plus, v.s - xi_out)


def dec_margin(x: LorentzVec) -> float:
    return x.t - abs(x.s)


def dec_jump_holds(x: LorentzVec, tol: float = DEFAULT_TOL, scale: float = 1.0) -> bool:
    """Weak dominant-energy jump condition ``X1 >= |X2|`` up to ``tol * scale``."""
    return dec_margin(x) >= -tol * scale


@dataclass(frozen=True)
class LemmaInput:
    h_low_minus: float
    h_bar_plus: float
    a: float
    samples: Sequence[tuple[float, float]]

    def __post_init__(self):
        if not (self.h_low_minus > 0 and self.h_bar_plus > 0):
            raise SampleOutOfBounds(
                f"bounds must be positive, got Hlow_-={self.h_low_minus!r}, Hbar_+={self.h_bar_plus!r}"
            )
        _check_trace(self.a)
        object.__setattr__(self, "samples", tuple((float(m), float(p)) for m, p in self.samples))

    @property
    def scale(self) -> float:
        return max(1.0, self.h_bar_plus)

    def radicand(self) -> float:
        return self.h_bar_plus**2 - self.h_low_minus**2 + self.a**2

    def check_samples(self, tol: float = DEFAULT_TOL) -> None:
        slack = tol * self.scale
        for k, (hm, hp) in enumerate(self.samples):
            if hm < self.h_low_minus - slack or hp > self.h_bar_plus + slack:
                raise SampleOutOfBounds(
                    f"sample {k}: (H_-, H_+) = ({hm!r}, {hp!r}) outside "
                    f"H_- >= {self.h_low_minus!r}, H_+ <= {self.h_bar_plus!r}"
                )


@dataclass(frozen=True)
class InterfaceVerdict:
    theta: float
    xi: float
    min_margin: float
    passed: bool
    sinh_theta: float = 0.0

    @property
    def boost(self) -> Boost:
        return Boost(self.theta, self.sinh_theta)


def min_margin(boost: Boost | float, samples, a: float, xi_out: float) -> float:
    """Smallest ``X1 - |X2|`` over ``samples`` of ``(H_-, H_+)`` pairs."""
    if not isinstance(boost, Boost):
        boost = Boost(boost)
    return min(dec_margin(jump_vector(boost, hm, a, hp, xi_out)) for hm, hp in samples)


def verify_interface(
    inp: LemmaInput,
    xi_out: float | None = None,
    tol: float = DEFAULT_TOL,
    scale: float | None = None,
) -> InterfaceVerdict:
    """Construct the lock angle for ``inp`` and check every sample against it.

    ``xi_out`` defaults to :func:`xi` of the input bounds.  ``scale`` defaults
    to ``max(1, Hbar_+)``; the chain engine passes one scale per chain.
    """
    inp.check_samples(tol)
    if xi_out is None:
        xi_out = xi(inp.h_bar_plus, inp.h_low_minus, inp.a, tol)
    if scale is None:
        scale = inp.scale
    b = Boost.from_sinh(lock_sinh(inp.h_low_minus, inp.h_bar_plus, inp.a, tol))
    margin = min_margin(b, inp.samples, inp.a, xi_out) if inp.samples else math.inf
    return InterfaceVerdict(
        theta=b.theta,
        xi=xi_out,
        min_margin=margin,
        passed=margin >= -tol * scale,
        sinh_theta=b.sinh_theta,
    )
