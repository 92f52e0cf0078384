"""Piecewise rotationally symmetric metrics ``g = ds^2 + f(s)^2 g_sphere``.

Each piece of a :class:`RadialProfile` is a closed interval in the radial
coordinate with its own warping function.  Neighbouring pieces share the
value of ``f`` at the junction (so the induced metrics on the spheres agree)
but may disagree in ``f'``, which produces a corner along the junction
sphere.  The spheres ``s = const`` have mean curvature ``(n-1) f'/f`` with
respect to the outward normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .chain_engine import CornerChain, InterfaceData
from .errors import (
    CurvatureHypothesisViolated,
    DimensionUnsupported,
    NonpositiveMeanCurvature,
    NotAsymptoticallyFlat,
    OutOfDomain,
    ProfileError,
)

DEFAULT_TOL = 1e-9
CURVATURE_SAMPLES = 1024

# Integration tolerances for the Schwarzschild end.
_ODE_RTOL = 1e-13
_ODE_ATOL = 1e-14


@dataclass(frozen=True)
class CapPiece:
    """``f = sin s`` on ``[0, end]``: a cap of the unit round sphere."""

    end: float
    start: float = 0.0
    kind = "cap"

    def f(self, s):
        return np.sin(s)

    def fp(self, s):
        return np.cos(s)

    def fpp(self, s):
        return -np.sin(s)


@dataclass(frozen=True)
class LinearPiece:
    """``f = f_start + slope * (s - start)``; ``end=None`` means semi-infinite."""

    start: float
    f_start: float
    slope: float
    end: float | None = None
    kind = "linear"

    def f(self, s):
        return self.f_start + self.slope * (np.asarray(s, dtype=float) - self.start)

    def fp(self, s):
        return np.full_like(np.asarray(s, dtype=float), self.slope)

    def fpp(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))


@dataclass(frozen=True)
class SchwarzschildEnd:
    """Spatial Schwarzschild end of mass ``mass`` glued on at ``start``.

    ``f`` solves ``f' = sqrt(1 - 2 m / f^(n-2))`` with ``f(start) = f_start``.
    Derivatives are evaluated from ``f`` directly, so only ``f(s)`` itself
    needs the integrator.
    """

    start: float
    f_start: float
    mass: float
    n: int
    end = None
    kind = "schwarzschild"

    def __post_init__(self):
        if 1.0 - 2.0 * self.mass / self.f_start ** (self.n - 2) <= 0:
            raise ProfileError(
                f"Schwarzschild end with m={self.mass!r} glued at f={self.f_start!r} "
                "is not outside the horizon"
            )

    def slope_from_f(self, f):
        return np.sqrt(1.0 - 2.0 * self.mass * np.asarray(f, dtype=float) ** (2 - self.n))

    def f(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s_arr < self.start):
            raise OutOfDomain(f"s={s!r} precedes the Schwarzschild end at {self.start!r}")
        order = np.argsort(s_arr)
        targets = s_arr[order]
        out = np.empty_like(targets)
        at_start = targets == self.start
        out[at_start] = self.f_start
        rest = targets[~at_start]
        if rest.size:
            sol = solve_ivp(
                lambda _s, y: self.slope_from_f(y),
                (self.start, rest[-1]),
                [self.f_start],
                method="DOP853",
                t_eval=rest,
                rtol=_ODE_RTOL,
                atol=_ODE_ATOL,
            )
            if not sol.success:
                raise ProfileError(f"Schwarzschild integration failed: {sol.message}")
            out[~at_start] = sol.y[0]
        result = np.empty_like(out)
        result[order] = out
        return result if np.ndim(s) else float(result[0])

    def fp(self, s):
        return self.slope_from_f(self.f(s))

    def fpp(self, s):
        return self.mass * (self.n - 2) * np.asarray(self.f(s), dtype=float) ** (1 - self.n)


def schwarzschild_mean_curvature(n: int, mass: float, f: float) -> float:
    """Mean curvature of the sphere of area radius ``f`` in a Schwarzschild end."""
    return (n - 1) * math.sqrt(1.0 - 2.0 * mass / f ** (n - 2)) / f


@dataclass(frozen=True)
class RadialProfile:
    n: int
    pieces: tuple
    inner_boundary: bool = False

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if int(self.n) != self.n or self.n < 3:
            raise ProfileError(f"dimension n must be an integer >= 3, got {self.n!r}")
        if not self.pieces:
            raise ProfileError("profile has no pieces")
        for j, p in enumerate(self.pieces):
            last = j == len(self.pieces) - 1
            if (p.end is None) != last:
                raise ProfileError(
                    f"piece {j}: only the last piece is semi-infinite"
                )
            if p.kind == "cap" and j != 0:
                raise ProfileError(f"piece {j}: a spherical cap can only be the first piece")
            if p.kind == "schwarzschild" and not last:
                raise ProfileError(f"piece {j}: a Schwarzschild end must be the last piece")
            if p.end is not None and not p.end > p.start:
                raise ProfileError(f"piece {j}: empty interval [{p.start}, {p.end}]")
            if j and p.start != self.pieces[j - 1].end:
                raise ProfileError(f"piece {j}: starts at {p.start}, previous ends at {self.pieces[j - 1].end}")
            if j and not math.isclose(
                float(p.f(p.start)), float(self.pieces[j - 1].f(p.start)), rel_tol=1e-12, abs_tol=1e-14
            ):
                raise ProfileError(f"junction {j}: warping function is discontinuous")
        first = self.pieces[0]
        if first.start != 0:
            raise ProfileError("the first piece must start at s = 0")
        closes = first.kind == "cap" or (first.kind == "linear" and first.f_start == 0 and first.slope == 1)
        if not closes and not self.inner_boundary:
            raise ProfileError(
                "first piece does not close smoothly at the centre (need f(0)=0, f'(0)=1); "
                "declare inner_boundary to allow this"
            )
        for j, p in enumerate(self.pieces):
            if p.kind == "cap" and p.end >= math.pi:
                raise ProfileError(f"piece {j}: cap must end before s = pi")
            if p.kind == "linear":
                f_lo = p.f_start
                f_hi = float(p.f(p.end)) if p.end is not None else (math.inf if p.slope >= 0 else -math.inf)
                if f_hi <= 0 or (f_lo < 0) or (f_lo == 0 and j != 0):
                    raise ProfileError(f"piece {j}: warping function not positive on the interior")

    @property
    def junctions(self) -> list[float]:
        return [p.start for p in self.pieces[1:]]

    @classmethod
    def build(cls, n: int, specs, inner_boundary: bool = False) -> "RadialProfile":
        """Assemble a profile from piece descriptions, placing each piece after the last.

        Piece kinds and their keys:

        * ``{"kind": "cap", "end": s1}``
        * ``{"kind": "linear", "slope": b, ("length" | "end" | "f_end"): x}``, the
          first linear piece also takes ``"f0"`` (default 0); omit the extent
          on the last piece to make it semi-infinite
        * ``{"kind": "schwarzschild", ("mass" | "slope"): x}``
        """
        pieces = []
        s0, f0 = 0.0, None
        for j, spec in enumerate(specs):
            kind = spec.get("kind")
            last = j == len(specs) - 1
            if kind == "cap":
                if j:
                    raise ProfileError(f"piece {j}: a spherical cap can only be the first piece")
                p = CapPiece(end=float(spec["end"]))
            elif kind == "linear":
                fs = float(spec.get("f0", 0.0)) if f0 is None else f0
                slope = float(spec["slope"])
                if "length" in spec:
                    end = s0 + float(spec["length"])
                elif "end" in spec:
                    end = float(spec["end"])
                elif "f_end" in spec:
                    if slope == 0:
                        raise ProfileError(f"piece {j}: f_end needs a non-zero slope")
                    end = s0 + (float(spec["f_end"]) - fs) / slope
                elif last:
                    end = None
                else:
                    raise ProfileError(f"piece {j}: linear piece needs length, end or f_end")
                p = LinearPiece(start=s0, f_start=fs, slope=slope, end=end)
            elif kind == "schwarzschild":
                if f0 is None:
                    raise ProfileError("a Schwarzschild end cannot be the first piece")
                if "mass" in spec:
                    m = float(spec["mass"])
                elif "slope" in spec:
                    m = 0.5 * (1.0 - float(spec["slope"]) ** 2) * f0 ** (n - 2)
                else:
                    raise ProfileError(f"piece {j}: Schwarzschild end needs mass or slope")
                p = SchwarzschildEnd(start=s0, f_start=f0, mass=m, n=n)
            else:
                raise ProfileError(f"piece {j}: unknown kind {kind!r}")
            pieces.append(p)
            if p.end is not None:
                s0, f0 = p.end, float(p.f(p.end))
        return cls(n, tuple(pieces), inner_boundary)


def _piece(profile: RadialProfile, piece: int):
    if not 0 <= piece < len(profile.pieces):
        raise OutOfDomain(f"piece index {piece} outside 0..{len(profile.pieces) - 1}")
    return profile.pieces[piece]


def _in_piece(p, s: float, piece: int) -> None:
    hi = math.inf if p.end is None else p.end
    if not p.start <= s <= hi:
        raise OutOfDomain(f"s={s!r} outside piece {piece} = [{p.start}, {hi}]")


def sphere_mean_curvature(profile: RadialProfile, piece: int, s: float) -> float:
    """``(n-1) f'(s)/f(s)`` using the derivative of the named piece."""
    p = _piece(profile, piece)
    _in_piece(p, s, piece)
    f = float(p.f(s))
    if f <= 0:
        raise OutOfDomain(f"f({s!r}) = {f!r} is not positive")
    if p.kind == "schwarzschild":
        return schwarzschild_mean_curvature(profile.n, p.mass, f)
    return (profile.n - 1) * float(p.fp(s)) / f


def _scalar_curvature(n, f, fp, fpp):
    return (n - 1) * (-2.0 * fpp / f + (n - 2) * (1.0 - fp**2) / f**2)


def warped_scalar_curvature(profile: RadialProfile, piece: int, s: float) -> float:
    """Scalar curvature ``(n-1) [-2 f''/f + (n-2)(1 - f'^2)/f^2]`` of the warped product."""
    p = _piece(profile, piece)
    _in_piece(p, s, piece)
    f = float(p.f(s))
    if f <= 0:
        raise OutOfDomain(f"f({s!r}) = {f!r} is not positive")
    return float(_scalar_curvature(profile.n, f, p.fp(s), p.fpp(s)))


def check_scalar_curvature(profile: RadialProfile, tol: float = DEFAULT_TOL, points: int = CURVATURE_SAMPLES) -> float:
    """Smallest sampled scalar curvature; raises if it drops below ``-tol``.

    Linear pieces with ``|slope| > 1`` are rejected analytically before any
    sampling.  Semi-infinite pieces are sampled over a window of a few
    junction radii past their start.
    """
    n = profile.n
    worst = math.inf
    for j, p in enumerate(profile.pieces):
        if p.kind == "linear" and abs(p.slope) > 1:
            raise CurvatureHypothesisViolated(
                f"piece {j}: linear slope {p.slope!r} gives negative scalar curvature"
            )
        hi = p.end if p.end is not None else p.start + 10.0 * (1.0 + float(p.f(p.start)))
        ss = np.linspace(p.start, hi, points + 2)[1:-1]
        f = np.asarray(p.f(ss), dtype=float)
        if p.kind == "schwarzschild":
            fp = p.slope_from_f(f)
            fpp = p.mass * (n - 2) * f ** (1 - n)
        else:
            fp, fpp = p.fp(ss), p.fpp(ss)
        R = _scalar_curvature(n, f, fp, fpp)
        worst = min(worst, float(np.min(R)))
        if worst < -tol:
            raise CurvatureHypothesisViolated(f"piece {j}: sampled scalar curvature {worst!r} < 0")
    return worst


def _outer_piece_index(profile: RadialProfile, s: float) -> int:
    idx = 0
    for j, p in enumerate(profile.pieces):
        if s >= p.start:
            idx = j
    return idx


def hawking_mass(profile: RadialProfile, s: float) -> float:
    """Hawking mass ``(f/2)(1 - f'^2)`` of the sphere at ``s`` (n = 3 only).

    At a junction the derivative is taken from the outer piece.
    """
    if profile.n != 3:
        raise DimensionUnsupported(f"Hawking mass is implemented for n = 3 only, got n = {profile.n}")
    if s < 0:
        raise OutOfDomain(f"s={s!r} < 0")
    p = profile.pieces[_outer_piece_index(profile, s)]
    f = float(p.f(s))
    if f <= 0:
        raise OutOfDomain(f"f({s!r}) = {f!r} is not positive")
    if p.kind == "schwarzschild":
        fp = float(p.slope_from_f(f))
    else:
        fp = float(p.fp(s))
    return 0.5 * f * (1.0 - fp * fp)


def asymptotically_flat(profile: RadialProfile) -> bool:
    last = profile.pieces[-1]
    return last.kind == "schwarzschild" or (last.kind == "linear" and last.end is None and last.slope == 1)


def adm_mass_limit(profile: RadialProfile) -> float:
    """Limit of the Hawking mass along the end (n = 3)."""
    if profile.n != 3:
        raise DimensionUnsupported(f"mass is implemented for n = 3 only, got n = {profile.n}")
    if not asymptotically_flat(profile):
        raise NotAsymptoticallyFlat("last piece must be a Schwarzschild end or a flat end (slope 1)")
    last = profile.pieces[-1]
    if last.kind == "schwarzschild":
        return last.mass
    return 0.0


def chain_from_profile(
    profile: RadialProfile,
    samples_per_interface: int = 1,
    theorem_mode: bool = True,
    tol: float = DEFAULT_TOL,
) -> CornerChain:
    """One interface per junction with the one-sided sphere mean curvatures.

    Junction spheres are round, so all samples of an interface coincide; the
    count is kept so the chain looks like any other sampled input.
    """
    if samples_per_interface < 1:
        raise ProfileError(f"samples_per_interface must be >= 1, got {samples_per_interface}")
    if theorem_mode:
        if profile.inner_boundary:
            raise ProfileError("profiles with an inner boundary are not admissible")
        if not asymptotically_flat(profile):
            raise NotAsymptoticallyFlat("last piece must be a Schwarzschild end or a flat end (slope 1)")
        check_scalar_curvature(profile, tol)
    interfaces = []
    for j, s in enumerate(profile.junctions, start=1):
        h_minus = sphere_mean_curvature(profile, j - 1, s)
        h_plus = sphere_mean_curvature(profile, j, s)
        if theorem_mode and (h_minus <= 0 or h_plus <= 0):
            raise NonpositiveMeanCurvature(
                f"junction {j} at s={s!r}: H_- = {h_minus!r}, H_+ = {h_plus!r}"
            )
        interfaces.append(
            InterfaceData(
                f"sigma_{j}",
                (h_minus,) * samples_per_interface,
                (h_plus,) * samples_per_interface,
            )
        )
    return CornerChain(profile.n, tuple(interfaces))
