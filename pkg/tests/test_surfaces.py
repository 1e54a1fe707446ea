import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from conftest import h3_focal_oracle
from ldx.builtins import BUILTINS
from ldx.errors import DegenerateAssumption, NoRealTheta, WrongRegime
from ldx.frame import arclengths, compile_system, frame_at
from ldx.heights import Kind, h_third_derivative_on_locus, height_jet
from ldx.minkowski import E0, Vec4
from ldx.surfaces import (
    Bands,
    Classification,
    Witness,
    argmin_jacobian_sv,
    classify_point,
    jacobian_min_sv,
    sample_patch,
    singular_locus,
    slice_test,
    surface_point,
    theta_rhs,
    theta_singular,
)

H, DS = Kind.HYPERBOLIC, Kind.DESITTER
C = Classification


# -- surface_point --------------------------------------------------------------------


@pytest.mark.parametrize("u, th", [(0.0, 0.0), (1.3, 0.7), (5.0, -1.9)])
def test_helix_surface_point(helix, u, th):
    b = frame_at(helix, u).n2
    want = E0 * math.cosh(th) + b * math.sinh(th)
    assert list(surface_point(helix, H, u, th)) == pytest.approx(list(want), abs=1e-12)


def test_helix_binormal_is_the_classical_one(helix):
    # b(s) = (sin(s/r2), -cos(s/r2), 1)/r2 for the right-handed helix
    u = 0.8
    r2 = math.sqrt(2.0)
    want = [0.0, math.sin(u / r2) / r2, -math.cos(u / r2) / r2, 1 / r2]
    assert list(frame_at(helix, u).n2) == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize("u, th", [(0.3, 0.0), (2.0, 1.0), (4.5, 4.0)])
def test_de_sitter_focal_surface_of_h3_curve(systems, u, th):
    want, kh = h3_focal_oracle(BUILTINS["h3_torsion"].defs["curve"], u, th)
    assert kh < 1
    got = surface_point(systems["h3_torsion"], DS, u, th).array()
    assert np.abs(got - want).max() < 1e-9


def test_helix_has_no_de_sitter_surface(helix):
    with pytest.raises(WrongRegime):
        surface_point(helix, DS, 1.0, 0.0)


# -- theta_singular -----------------------------------------------------------------------


def test_helix_singular_angle_is_zero(helix):
    for u in np.linspace(0, 4 * math.pi, 7):
        assert theta_singular(helix, H, float(u)) == pytest.approx(0.0, abs=1e-12)


def test_h3_circle_angle_is_degenerate(systems):
    with pytest.raises(DegenerateAssumption):
        theta_singular(systems["h3_circle"], DS, 1.0)


def test_no_real_angle_where_ratio_exceeds_one():
    sys = compile_system(
        {"mode": "embedded", "hypersurface": ["0.3*(u1^2+u2^2)", "u1", "u2", "u3"],
         "curve": ["0.5*cos(s)+0.15*cos(2*s)", "0.5*sin(s)", "0.2*s+0.1*sin(3*s)"]},
        (0.0, 2 * math.pi))
    from ldx.frame import frame_jets

    found = []
    for u in np.linspace(0.0, 2 * math.pi, 200):
        try:
            rhs, _ = theta_rhs(frame_jets(sys, float(u)).inv, H)
        except (ValueError, ZeroDivisionError):
            continue
        if abs(rhs) > 1.2:
            found.append(float(u))
    assert found, "scan found no sample with |ratio| > 1.2"
    for u in found[:5]:
        with pytest.raises(NoRealTheta):
            theta_singular(sys, H, u)
    loc = singular_locus(sys, H, n_samples=200)
    assert any(p.status == "NoRealTheta" for p in loc.points)


def test_de_sitter_angle_uses_principal_branch(systems):
    for u in np.linspace(0.2, 1.0, 5):
        th = theta_singular(systems["slice_h3"], DS, float(u))
        assert -math.pi / 2 < th < math.pi / 2


# -- jacobian -----------------------------------------------------------------------------


def test_jacobian_min_sv_examples(perturbed, helix):
    for u in (0.5, 2.0, 4.0):
        th = theta_singular(perturbed, H, u)
        assert jacobian_min_sv(perturbed, H, u, th) < 1e-7
        assert jacobian_min_sv(perturbed, H, u, th + 0.3) > 1e-3
    assert jacobian_min_sv(helix, H, 3.0, 0.0) < 1e-10


def test_jacobian_minimum_locates_the_singular_angle(perturbed, systems):
    for u in (0.5, 2.0, 4.0):
        th = theta_singular(perturbed, H, u)
        assert argmin_jacobian_sv(perturbed, H, u, th - 1.0, th + 1.0) == pytest.approx(th, abs=1e-6)
    sys = systems["h3_torsion"]
    th = theta_singular(sys, DS, 1.0)
    assert argmin_jacobian_sv(sys, DS, 1.0, th - 1.0, th + 1.0) == pytest.approx(th, abs=1e-6)


# -- singular locus and classification ----------------------------------------------------


def test_helix_locus_is_the_constant_point(helix):
    loc = singular_locus(helix, H, (0.0, 2 * math.pi), 100)
    assert len(loc.points) == 100 and loc.slice_degenerate
    for p in loc.points:
        assert p.classification is C.SLICE_DEGENERATE
        assert list(p.position) == pytest.approx([1, 0, 0, 0], abs=1e-12)


def test_perturbed_locus_has_edges_and_isolated_swallowtails(perturbed_locus):
    classes = [p.classification for p in perturbed_locus.points]
    assert classes.count(C.CUSPIDAL_EDGE) == 100
    assert classes.count(C.SWALLOWTAIL) == 4
    swallow = [p for p in perturbed_locus.points if p.classification is C.SWALLOWTAIL]
    assert all(p.refined for p in swallow)
    assert [p.u for p in swallow] == pytest.approx(
        [1.9353, 2.7771, 5.0769, 5.9187], abs=1e-4)


def test_h3_circle_locus_is_degenerate_everywhere(systems):
    loc = singular_locus(systems["h3_circle"], DS, n_samples=20)
    assert {p.status for p in loc.points} == {"DegenerateAssumption"}
    assert all(p.classification is C.UNRESOLVED for p in loc.points)


BANDS = Bands(1e-6, 1e-6, 1e-6, 1e-6)


@pytest.mark.parametrize("w, want", [
    (Witness(0.4, 0.3, 0.2, 5.0), C.CUSPIDAL_EDGE),
    (Witness(0.4, 0.3, 0.0, -1.1), C.SWALLOWTAIL),
    (Witness(0.0, 0.9, 0.0, 0.7), C.CUSPIDAL_BEAKS),
    (Witness(0.0, 0.0, 0.0, 0.7), C.UNRESOLVED),
    (Witness(0.4, 0.3, 0.0, 0.0), C.UNRESOLVED),
])
def test_classification_table(w, want):
    assert classify_point(w, BANDS) is want


def test_slice_flag_overrides_table():
    assert classify_point(Witness(0.4, 0, 0.2, 0), BANDS, True) is C.SLICE_DEGENERATE


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_lips_never_reported(l0, l1, rho, rp):
    """No witness is ever mapped outside the four local models plus Unresolved,
    and a point with rho' = 0 is never given a stable type."""
    cls = classify_point(Witness(l0, l1, rho, rp), BANDS)
    assert cls in set(C)
    if abs(rho) <= 1e-6 and abs(rp) <= 1e-6:
        assert cls is C.UNRESOLVED


def test_rho_roots_match_third_derivative_roots(perturbed, perturbed_locus):
    def h3(u):
        return h_third_derivative_on_locus(perturbed, H, u, theta_singular(perturbed, H, u))

    for r in perturbed_locus.roots:
        q = brentq(h3, r - 0.05, r + 0.05, xtol=1e-12)
        s_r, s_q = arclengths(perturbed, [r, q])
        assert abs(s_r - s_q) < 1e-6


# -- slices ---------------------------------------------------------------------------------


def _same_plane(v, c, v_want, c_want, tol=1e-7):
    v = np.array(list(v), dtype=float)
    v_want = np.array(v_want, dtype=float)
    for sgn in (1.0, -1.0):
        if np.abs(sgn * v - v_want).max() < tol and abs(sgn * c - c_want) < tol:
            return True
    return False


def test_helix_is_a_slice(helix):
    rep = slice_test(helix, H)
    assert rep.is_slice and rep.consistent
    assert _same_plane(rep.v, rep.c, [1, 0, 0, 0], 0.0)


def test_perturbed_curve_is_not_a_slice(perturbed):
    rep = slice_test(perturbed, H)
    assert not rep.is_slice and rep.consistent
    assert rep.max_rho > 1e-3


@pytest.mark.parametrize("name", ["slice_graph", "slice_h3"])
def test_constructed_slices_recover_their_hyperplane(systems, name):
    b = BUILTINS[name]
    rep = slice_test(systems[name], Kind(b.kind))
    assert rep.is_slice and rep.consistent
    v_want, c_want = b.slice_plane
    assert _same_plane(rep.v, rep.c, v_want, c_want)
    assert rep.plane_residual < 1e-7


def test_de_sitter_non_slice(systems):
    rep = slice_test(systems["h3_torsion"], DS)
    assert not rep.is_slice and rep.consistent


# -- patches --------------------------------------------------------------------------------


def test_helix_patch(helix):
    p = sample_patch(helix, H, (0.0, 4 * math.pi), (-2.0, 2.0), 50, 50)
    assert p.positions.shape == (50, 50, 4)
    assert np.abs(p.residuals).max() < 1e-9
    assert set(p.status) == {"ok"}
    # with 51 angles the middle column is theta = 0, the constant point e0
    q = sample_patch(helix, H, (0.0, 4 * math.pi), (-2.0, 2.0), 10, 51)
    assert np.abs(q.positions[:, 25] - [1, 0, 0, 0]).max() < 1e-12


def test_de_sitter_patch_is_periodic(systems):
    p = sample_patch(systems["h3_torsion"], DS, theta_range=(0.0, 2 * math.pi), n_u=10, n_theta=9)
    assert np.abs(p.positions[:, 0] - p.positions[:, -1]).max() < 1e-12
    assert np.abs(p.residuals).max() < 1e-9
    assert p.meta["antipodal_branch"]


def test_patch_embeds_row_errors(systems):
    p = sample_patch(systems["h3_torsion"], H, n_u=3, n_theta=4)
    assert set(p.status) == {"WrongRegime"}
    assert np.isnan(p.positions).all()


@pytest.mark.parametrize("name, kind", [("graph_perturbed", H), ("h3_torsion", DS)])
def test_patch_points_are_discriminant_points(systems, name, kind):
    sys = systems[name]
    p = sample_patch(sys, kind, n_u=12, n_theta=12)
    for i, u in enumerate(p.u):
        for j in range(len(p.theta)):
            h = height_jet(sys, kind, Vec4.of(p.positions[i, j]), float(u))
            assert abs(h.c[0]) < 1e-9 and abs(h.c[1]) < 1e-9
