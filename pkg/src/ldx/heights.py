"""Tangential height functions h_v(s) = <t(s), v> and a brute-force A_k oracle.

v ranges over H^3(-1) for the timelike family and over S^3_1 for the
spacelike family. The oracle reads derivatives straight off the arc-length
jet of h_v, independently of any closed-form invariant.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadDirection, WrongRegime
from .frame import frame_jets, lambda0_jet, mixed_torsion_jet
from .minkowski import PseudoSphere, Vec4, pseudo_dot, pseudo_sphere_residual
from .smoothcurve import cos, cosh, sin, sinh

INFINITE = math.inf
DIRECTION_TOL = 1e-9


class Kind(enum.Enum):
    """Which pseudo-sphere the directions live on.

    The height-function family and the surface built from its discriminant
    share this tag: timelike tangential heights <-> hyperbolic surface in
    H^3(-1), spacelike tangential heights <-> de Sitter surface in S^3_1.
    """

    HYPERBOLIC = "hyperbolic"
    DESITTER = "desitter"

    @property
    def sphere(self):
        return PseudoSphere.H3 if self is Kind.HYPERBOLIC else PseudoSphere.S31


HeightFamilyKind = Kind
TIMELIKE_TANGENTIAL = Kind.HYPERBOLIC
SPACELIKE_TANGENTIAL = Kind.DESITTER


@dataclass(frozen=True)
class SingularityReport:
    u: float
    order: float            # k >= 0, -1 when h(u) != 0, INFINITE when all vanish
    derivatives: tuple      # |h|, |h'|, ..., up to k_max + 1
    tol: float
    scale: float


def vanishing_order(derivs, tol):
    """Index of the first non-vanishing derivative, minus one.

    A derivative counts as zero when |d| <= tol * max(1, max |d_j|).
    """
    mags = [abs(d) for d in derivs]
    scale = max([1.0] + mags)
    for j, m in enumerate(mags):
        if m > tol * scale:
            return j - 1, scale
    return INFINITE, scale


def _check_direction(kind, v):
    res = float(pseudo_sphere_residual(v, kind.sphere))
    if abs(res) > DIRECTION_TOL:
        raise BadDirection(f"direction is off {kind.sphere.value} (residual {res:.3g})")


def height_jet(sys, kind, v, u, order=None):
    """Arc-length jet of h_v at the point ``u`` of the curve."""
    kind = Kind(kind)
    v = Vec4.of([float(a) for a in v])
    _check_direction(kind, v)
    t = frame_jets(sys, u).t
    h = pseudo_dot(t, v)
    return h if order is None else h.truncate(order)


def detect_Ak(sys, kind, v, u, k_max=4, tol=None):
    tol = sys.tol.oracle if tol is None else tol
    h = height_jet(sys, kind, v, u)
    if k_max + 1 > h.order:
        raise ValueError(f"k_max={k_max} needs a jet of order {k_max + 1}, have {h.order}")
    derivs = [h.derivative(j) for j in range(k_max + 2)]
    order, scale = vanishing_order(derivs, tol)
    return SingularityReport(float(u), order, tuple(abs(d) for d in derivs), tol, scale)


def regime_gap(inv_values, kind):
    """k_g^2 - k_n^2 (hyperbolic) or k_n^2 - k_g^2 (de Sitter); positive in regime."""
    kn, kg = inv_values["k_n"], inv_values["k_g"]
    return (kg * kg - kn * kn) if kind is Kind.HYPERBOLIC else (kn * kn - kg * kg)


def direction(fj, kind, theta, jets=False, eps=1e-8):
    """The discriminant direction at angle theta built from a FrameJets.

    With ``jets=True`` the result is a jet in arc length with theta held fixed.
    """
    kind = Kind(kind)
    inv = fj.inv if jets else {k: v.value for k, v in fj.inv.items()}
    r2 = regime_gap(inv, kind)
    r2v = float(r2)
    if r2v <= eps:
        want = "k_g^2 > k_n^2" if kind is Kind.HYPERBOLIC else "k_n^2 > k_g^2"
        raise WrongRegime(f"{kind.value} surface needs {want} (difference {r2v:.3g})")
    if jets:
        ng, n1, n2 = fj.n_gamma, fj.n1, fj.n2
        r = r2 ** 0.5
    else:
        ng, n1, n2 = fj.n_gamma.value(), fj.n1.value(), fj.n2.value()
        r = math.sqrt(r2v)
    if kind is Kind.HYPERBOLIC:
        a, b = cosh(theta), sinh(theta)
    else:
        a, b = cos(theta), sin(theta)
    return (ng * inv["k_g"] + n1 * inv["k_n"]) * (a / r) + n2 * b


def closed_form_direction(sys, kind, u, theta):
    """v with h_v(u) = h_v'(u) = 0 at angle theta (the surface point)."""
    return direction(frame_jets(sys, u), kind, theta, eps=sys.tol.assume)


@dataclass(frozen=True)
class VersalityWitness:
    rank_B: int
    det_A: float
    singular_values: tuple
    chart: int              # index of the component solved from the constraint


def _deriv_rows(fj, v, nrows, chart=None):
    """Rows m = 0..nrows-1: d/dv_i of the m-th derivative of H in a chart."""
    v = np.array([float(a) for a in v])
    eps = np.array([-1.0, 1.0, 1.0, 1.0])
    j = int(np.argmax(np.abs(v))) if chart is None else int(chart)
    others = [i for i in range(4) if i != j]
    rows = []
    for m in range(nrows):
        x = np.array(list(fj.t.derivative(m)))
        rows.append([eps[i] * (x[i] - v[i] / v[j] * x[j]) for i in others])
    return np.array(rows), j


def versality_check(sys, kind, u, v0, tol=None, chart=None):
    """Rank of the 2x3 matrix B and determinant of the 3x3 matrix A.

    Row m holds the coefficients of d^m/ds^m of dH/dv_i at u, i.e. the
    components of t^(m) in the chart that solves the pseudo-sphere equation
    for the largest component of v0 (or for component ``chart``).
    """
    kind = Kind(kind)
    _check_direction(kind, v0)
    tol = sys.tol.rank if tol is None else tol
    fj = frame_jets(sys, u)
    A, chart = _deriv_rows(fj, v0, 3, chart)
    sv = np.linalg.svd(A[:2], compute_uv=False)
    rank = int(np.sum(sv > tol * sv[0])) if sv[0] > 0 else 0
    return VersalityWitness(rank, float(np.linalg.det(A)), tuple(sv), chart)


_CHART_SIGN = (1.0, 1.0, -1.0, 1.0)


def det_A_on_locus(sys, kind, u, theta, chart):
    """Closed form of det A at a point of the singular locus (h = h' = h'' = 0).

    With r = sqrt(|k_g^2 - k_n^2|) and D = k_n tau_2 + k_g tau_g:
      hyperbolic:  cosh(theta) (r^2 D^2 - lambda0^2) / (v_j r D)
      de Sitter:  -cos(theta)  (r^2 D^2 + lambda0^2) / (v_j r D)
    times a sign depending only on the chart component j. On the hyperbolic
    locus |lambda0| < r |D|, so the determinant never vanishes there.
    """
    kind = Kind(kind)
    fj = frame_jets(sys, u)
    vals = {k: v.value for k, v in fj.inv.items()}
    r = math.sqrt(abs(regime_gap(vals, kind)))
    D = mixed_torsion_jet(fj.inv).value
    l0 = lambda0_jet(fj.inv).value
    if kind is Kind.HYPERBOLIC:
        w = math.cosh(theta) * (r * r * D * D - l0 * l0) / (r * D)
    else:
        w = -math.cos(theta) * (r * r * D * D + l0 * l0) / (r * D)
    v = closed_form_direction(sys, kind, u, theta)
    return _CHART_SIGN[chart] * w / float(v[chart])


def contact_order_with_slice(sys, v0, c, u, k_max=5, tol=None):
    """Order of contact of the curve with HP(v0, c) at u (g = <gamma, v0> - c)."""
    tol = sys.tol.oracle if tol is None else tol
    v0 = Vec4.of([float(a) for a in v0])
    g = pseudo_dot(frame_jets(sys, u).gamma, v0) - float(c)
    if k_max + 1 > g.order:
        raise ValueError(f"k_max={k_max} needs a jet of order {k_max + 1}")
    derivs = [g.derivative(j) for j in range(k_max + 2)]
    return vanishing_order(derivs, tol)[0]


def h_third_derivative_on_locus(sys, kind, u, theta):
    """h_v'''(u) with v = S(u, theta) frozen; the oracle side of rho."""
    v = closed_form_direction(sys, kind, u, theta)
    return height_jet(sys, kind, v, u).derivative(3)


__all__ = [
    "INFINITE", "Kind", "HeightFamilyKind", "TIMELIKE_TANGENTIAL", "SPACELIKE_TANGENTIAL",
    "SingularityReport", "VersalityWitness", "vanishing_order", "height_jet", "detect_Ak",
    "closed_form_direction", "direction", "versality_check", "det_A_on_locus",
    "contact_order_with_slice", "regime_gap",
    "h_third_derivative_on_locus",
]
