import math
from pathlib import Path

import numpy as np
import pytest

from lockcert.chain_engine import CERTIFIED, CERTIFIED_MIAO, certify
from lockcert.documents import parse_profile_spec
from lockcert.errors import (
    CurvatureHypothesisViolated,
    DimensionUnsupported,
    NonpositiveMeanCurvature,
    NotAsymptoticallyFlat,
    OutOfDomain,
    ProfileError,
)
from lockcert.radial_geometry import (
    RadialProfile,
    SchwarzschildEnd,
    adm_mass_limit,
    chain_from_profile,
    check_scalar_curvature,
    hawking_mass,
    schwarzschild_mean_curvature,
    sphere_mean_curvature,
    warped_scalar_curvature,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def flat(n=3):
    return RadialProfile.build(n, [{"kind": "linear", "f0": 0.0, "slope": 1.0}])


def schwarzschild(m=1.0, f0=4.0, n=3):
    # Flat ball out to f0, then a Schwarzschild end with the requested mass.
    return RadialProfile.build(
        n,
        [
            {"kind": "linear", "f0": 0.0, "slope": 1.0, "end": f0},
            {"kind": "schwarzschild", "mass": m},
        ],
    )


def cap_cone():
    return parse_profile_spec((FIXTURES / "cap_cone_schwarzschild.profile.json").read_bytes())


class TestMeanCurvature:
    @pytest.mark.parametrize("s, expected", [(1.0, 2.0), (2.0, 1.0)])
    def test_flat(self, s, expected):
        assert sphere_mean_curvature(flat(), 0, s) == pytest.approx(expected, rel=1e-15)

    def test_flat_higher_dimension(self):
        assert sphere_mean_curvature(flat(5), 0, 2.0) == pytest.approx(2.0)

    def test_schwarzschild_closed_form(self):
        assert schwarzschild_mean_curvature(3, 1.0, 4.0) == pytest.approx(math.sqrt(2) / 4, rel=1e-15)

    def test_schwarzschild_piece_at_junction(self):
        assert sphere_mean_curvature(schwarzschild(), 1, 4.0) == pytest.approx(math.sqrt(2) / 4, rel=1e-14)

    def test_out_of_piece(self):
        with pytest.raises(OutOfDomain):
            sphere_mean_curvature(schwarzschild(), 1, 3.0)
        with pytest.raises(OutOfDomain):
            sphere_mean_curvature(flat(), 3, 1.0)


class TestScalarCurvature:
    def test_flat(self):
        assert warped_scalar_curvature(flat(), 0, 1.7) == pytest.approx(0.0, abs=1e-14)

    def test_round_cap(self):
        p = RadialProfile.build(3, [{"kind": "cap", "end": 1.0}, {"kind": "linear", "slope": math.cos(1.0)}])
        assert warped_scalar_curvature(p, 0, math.pi / 4) == pytest.approx(6.0, rel=1e-14)

    @pytest.mark.parametrize("s", [4.5, 10.0, 40.0])
    def test_schwarzschild_vanishes(self, s):
        assert warped_scalar_curvature(schwarzschild(), 1, s) == pytest.approx(0.0, abs=1e-10)

    def test_cone_has_positive_curvature(self):
        assert warped_scalar_curvature(cap_cone(), 1, 1.1) > 0

    def test_check_accepts_fixture(self):
        assert check_scalar_curvature(cap_cone()) >= -1e-9

    def test_steep_cone_rejected(self):
        p = RadialProfile.build(
            3,
            [
                {"kind": "linear", "f0": 0.0, "slope": 1.0, "end": 1.0},
                {"kind": "linear", "slope": 1.3, "length": 1.0},
                {"kind": "linear", "slope": 1.0},
            ],
        )
        with pytest.raises(CurvatureHypothesisViolated):
            check_scalar_curvature(p)


class TestSchwarzschildIntegration:
    def test_slope_matches_ode(self):
        end = SchwarzschildEnd(4.0, 4.0, 1.0, 3)
        s = np.linspace(4.0, 30.0, 50)
        f = end.f(s)
        # Centered differences against f' = sqrt(1 - 2m/f).
        h = 1e-4
        fd = (end.f(s[1:-1] + h) - end.f(s[1:-1] - h)) / (2 * h)
        assert fd == pytest.approx(end.slope_from_f(f[1:-1]), rel=1e-7)

    def test_monotone_unsorted_query(self):
        end = SchwarzschildEnd(4.0, 4.0, 1.0, 3)
        vals = end.f([9.0, 4.0, 6.0])
        assert vals[1] == 4.0 and vals[1] < vals[2] < vals[0]

    def test_inside_horizon(self):
        with pytest.raises(ProfileError):
            SchwarzschildEnd(1.0, 1.5, 1.0, 3)


class TestHawkingMass:
    def test_flat(self):
        assert hawking_mass(flat(), 3.0) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("s", [4.0, 7.0, 25.0])
    def test_schwarzschild_constant(self, s):
        assert hawking_mass(schwarzschild(), s) == pytest.approx(1.0, rel=1e-10)

    def test_inside_flat_ball(self):
        assert hawking_mass(schwarzschild(), 2.0) == pytest.approx(0.0, abs=1e-15)

    def test_cap(self):
        s = 0.8
        assert hawking_mass(cap_cone(), s) == pytest.approx(0.5 * math.sin(s) ** 3, rel=1e-14)

    def test_dimension(self):
        with pytest.raises(DimensionUnsupported):
            hawking_mass(flat(4), 1.0)


class TestAdmMass:
    def test_schwarzschild(self):
        assert adm_mass_limit(schwarzschild(m=0.7)) == 0.7

    def test_flat(self):
        assert adm_mass_limit(flat()) == 0.0

    def test_fixture(self):
        assert adm_mass_limit(cap_cone()) == pytest.approx(0.48, rel=1e-14)

    def test_cone_end_not_flat(self):
        p = RadialProfile.build(
            3,
            [{"kind": "linear", "f0": 0.0, "slope": 1.0, "end": 1.0}, {"kind": "linear", "slope": 0.2}],
        )
        with pytest.raises(NotAsymptoticallyFlat):
            adm_mass_limit(p)

    def test_dimension(self):
        with pytest.raises(DimensionUnsupported):
            adm_mass_limit(flat(4))


class TestProfileValidation:
    def test_discontinuous(self):
        from lockcert.radial_geometry import LinearPiece

        with pytest.raises(ProfileError):
            RadialProfile(3, (LinearPiece(0.0, 0.0, 1.0, 1.0), LinearPiece(1.0, 2.0, 1.0)))

    def test_no_smooth_closure(self):
        with pytest.raises(ProfileError):
            RadialProfile.build(3, [{"kind": "linear", "f0": 1.0, "slope": 1.0}])

    def test_inner_boundary_allowed_but_not_admissible(self):
        p = RadialProfile.build(3, [{"kind": "linear", "f0": 1.0, "slope": 1.0}], inner_boundary=True)
        with pytest.raises(ProfileError):
            chain_from_profile(p)

    def test_cap_past_pole(self):
        with pytest.raises(ProfileError):
            RadialProfile.build(3, [{"kind": "cap", "end": 3.5}, {"kind": "linear", "slope": 1.0}])

    def test_schwarzschild_not_last(self):
        with pytest.raises(ProfileError):
            RadialProfile.build(
                3,
                [
                    {"kind": "linear", "f0": 0.0, "slope": 1.0, "end": 4.0},
                    {"kind": "schwarzschild", "mass": 1.0},
                    {"kind": "linear", "slope": 1.0},
                ],
            )


class TestChainFromProfile:
    def test_euclidean_fixture(self):
        ch = chain_from_profile(parse_profile_spec((FIXTURES / "euclidean_annuli.profile.json").read_bytes()))
        assert ch.bounds() == [pytest.approx((2.0, 2.0)), pytest.approx((1.0, 1.0))]
        assert certify(ch).verdict == CERTIFIED_MIAO

    def test_cap_cone_fixture(self):
        ch = chain_from_profile(cap_cone(), samples_per_interface=3)
        (l1, u1), (l2, u2) = ch.bounds()
        assert l1 == pytest.approx(2 / math.sqrt(3), rel=1e-14)
        assert u1 == pytest.approx(3.6 / math.sqrt(3), rel=1e-14)
        assert l2 == pytest.approx(1.8, rel=1e-14)
        assert u2 == pytest.approx(0.4, rel=1e-12)
        assert all(f.sample_count == 3 for f in ch.interfaces)
        cert = certify(ch)
        assert cert.verdict == CERTIFIED
        assert cert.square_sum == pytest.approx(0.0933333333333333, rel=1e-10)

    def test_perturbed_cap_cone_rejected(self):
        p = RadialProfile.build(
            3,
            [
                {"kind": "cap", "end": math.pi / 3},
                {"kind": "linear", "slope": 0.9, "f_end": 1.0},
                {"kind": "schwarzschild", "slope": 0.3},
            ],
        )
        cert = certify(chain_from_profile(p))
        assert cert.label == "Rejected(square_sum)"
        assert cert.square_sum == pytest.approx(-0.10666666666666667, rel=1e-9)

    def test_jump_formula(self):
        p = cap_cone()
        ch = chain_from_profile(p, theorem_mode=False)
        for (lo, up), s, (a, b) in zip(ch.bounds(), p.junctions, zip(p.pieces, p.pieces[1:])):
            f = float(a.f(s))
            assert float(b.f(s)) == pytest.approx(f, rel=1e-14)
            fp_minus = float(a.fp(s))
            fp_plus = float(b.slope_from_f(f)) if b.kind == "schwarzschild" else float(b.fp(s))
            assert up - lo == pytest.approx(2 * (fp_plus - fp_minus) / f, rel=1e-12, abs=1e-14)

    def test_nonpositive_mean_curvature(self):
        p = RadialProfile.build(
            3,
            [
                {"kind": "cap", "end": 2.0},
                {"kind": "linear", "slope": 0.5, "length": 1.0},
                {"kind": "linear", "slope": 1.0},
            ],
        )
        with pytest.raises(NonpositiveMeanCurvature):
            chain_from_profile(p)
        ch = chain_from_profile(p, theorem_mode=False)
        assert ch.bounds()[0][0] < 0
