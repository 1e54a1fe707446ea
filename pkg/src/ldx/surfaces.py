"""Hyperbolic and de Sitter surfaces of a curve, their singular loci and
the classification of singular points.

Both surfaces are the discriminant sets of the tangential height families in
:mod:`ldx.heights`. Points are addressed by the curve parameter ``u`` and an
angle ``theta``; derivatives along the curve are taken in arc length.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DegenerateAssumption, LdxError, NoRealTheta
from .frame import (
    INVARIANTS,
    _d,
    arclengths,
    frame_jets,
    lambda0_jet,
    mixed_torsion_jet,
    rho_parts,
)
from .heights import Kind, closed_form_direction, direction, regime_gap
from .minkowski import Vec4, pseudo_dot, pseudo_sphere_residual
from .parallel import pmap

SurfaceKind = Kind

DEFAULT_THETA_RANGE = {
    Kind.HYPERBOLIC: (-2.5, 2.5),
    Kind.DESITTER: (0.0, 2.0 * math.pi),
}


class Classification(enum.Enum):
    CUSPIDAL_EDGE = "CuspidalEdge"
    SWALLOWTAIL = "Swallowtail"
    CUSPIDAL_BEAKS = "CuspidalBeaks"
    SLICE_DEGENERATE = "SliceDegenerate"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class Witness:
    lambda0: float
    lambda1: float
    rho: float
    rho_prime: float


@dataclass(frozen=True)
class Bands:
    """Zero bands: a witness value counts as zero when |x| <= band."""

    rho: float
    rho_prime: float
    lambda0: float
    lambda1: float


@dataclass(frozen=True)
class SingularLocusPoint:
    u: float
    s: float                      # arc length from the start of the range
    theta: float
    position: Vec4
    classification: Classification
    witness: Witness
    status: str = "ok"            # or the name of the error raised at u
    refined: bool = False         # inserted by root refinement of rho


@dataclass(frozen=True)
class SingularLocus:
    kind: Kind
    points: list
    bands: Bands
    slice_degenerate: bool
    max_rho: float
    rho_scale: float
    roots: tuple                  # refined zeros of rho, in u

    def valid(self):
        return [p for p in self.points if p.status == "ok"]

    def with_class(self, cls):
        return [p for p in self.points if p.classification is cls]


# -- point-wise ----------------------------------------------------------------


def surface_point(sys, kind, u, theta):
    """S(u, theta) on H^3(-1) (hyperbolic) or S^3_1 (de Sitter)."""
    return closed_form_direction(sys, Kind(kind), u, theta)


def theta_rhs(inv, kind):
    """lambda0 / (sqrt(+-(k_g^2 - k_n^2)) (k_n tau_2 + k_g tau_g)) at the jet base."""
    vals = {k: v.value for k, v in inv.items()}
    r = math.sqrt(regime_gap(vals, kind))
    D = mixed_torsion_jet(inv).value
    return lambda0_jet(inv).value / (r * D), D


def theta_singular(sys, kind, u):
    """The angle of the singular point of the surface over ``u``.

    artanh of the ratio for the hyperbolic surface, principal atan branch for
    the de Sitter surface (theta + pi is the antipodal solution).
    """
    kind = Kind(kind)
    fj = frame_jets(sys, u)
    vals = {k: v.value for k, v in fj.inv.items()}
    # the regime check lives in direction(); reuse it
    direction(fj, kind, 0.0, eps=sys.tol.assume)
    D = mixed_torsion_jet(fj.inv).value
    if abs(D) <= sys.tol.assume:
        raise DegenerateAssumption(
            f"k_n tau_2 + k_g tau_g = {D:.3g} vanishes at {sys.param}={float(u):g}"
        )
    rhs = lambda0_jet(fj.inv).value / (math.sqrt(regime_gap(vals, kind)) * D)
    if kind is Kind.HYPERBOLIC:
        if abs(rhs) >= 1.0:
            raise NoRealTheta(f"tanh(theta) = {rhs:.6g} has no real solution")
        return math.atanh(rhs)
    return math.atan(rhs)


def jacobian(sys, kind, u, theta):
    """4x2 matrix [dS/ds, dS/dtheta] (s = arc length)."""
    kind = Kind(kind)
    fj = frame_jets(sys, u)
    S = direction(fj, kind, theta, jets=True, eps=sys.tol.assume)
    ds = np.array(list(S.derivative(1)))
    vals = {k: v.value for k, v in fj.inv.items()}
    r = math.sqrt(regime_gap(vals, kind))
    if kind is Kind.HYPERBOLIC:
        da, db = math.sinh(theta), math.cosh(theta)
    else:
        da, db = -math.sin(theta), math.cos(theta)
    base = fj.n_gamma.value() * vals["k_g"] + fj.n1.value() * vals["k_n"]
    dth = (base * (da / r) + fj.n2.value() * db).array()
    return np.column_stack([ds, dth])


def jacobian_min_sv(sys, kind, u, theta):
    return float(np.linalg.svd(jacobian(sys, kind, u, theta), compute_uv=False)[-1])


def argmin_jacobian_sv(sys, kind, u, lo, hi, xtol=1e-12):
    """Angle in [lo, hi] minimizing the smallest Jacobian singular value.

    A purely numerical locator of the singular point, independent of the
    closed-form angle.
    """
    res = optimize.minimize_scalar(
        lambda th: jacobian_min_sv(sys, kind, u, th),
        bounds=(lo, hi), method="bounded", options={"xatol": xtol, "maxiter": 500},
    )
    return float(res.x)


def witness_at(sys, u):
    inv = frame_jets(sys, u).inv
    P, D, l0, Q = rho_parts(inv)
    rho = P * D + l0 * Q
    return Witness(l0.value, _d(D).value, rho.value, rho.derivative(1))


def _rho_terms(sys, u):
    """rho, the size of its two summands and a curvature scale."""
    inv = frame_jets(sys, u).inv
    P, D, l0, Q = rho_parts(inv)
    kappa = max(abs(inv[k].value) for k in INVARIANTS)
    terms = abs(P.value * D.value) + abs(l0.value * Q.value)
    return P.value * D.value + l0.value * Q.value, terms, kappa


# -- classification ----------------------------------------------------------------


def classify_point(witness, bands, slice_degenerate=False):
    """Decision table for a point already known to lie on the singular locus.

    rho != 0 gives a cuspidal edge; rho = 0 with rho' != 0 gives a swallowtail
    when lambda0 != 0 and cuspidal beaks when lambda0 = 0 but lambda1 != 0.
    A curve on which rho vanishes identically has a constant locus and is
    reported as slice-degenerate. Everything else is unresolved.
    """
    if slice_degenerate:
        return Classification.SLICE_DEGENERATE
    w, b = witness, bands
    if abs(w.rho) > b.rho:
        return Classification.CUSPIDAL_EDGE
    if abs(w.rho_prime) <= b.rho_prime:
        return Classification.UNRESOLVED
    if abs(w.lambda0) > b.lambda0:
        return Classification.SWALLOWTAIL
    if abs(w.lambda1) > b.lambda1:
        return Classification.CUSPIDAL_BEAKS
    return Classification.UNRESOLVED


# -- the singular locus -------------------------------------------------------------


def _locus_sample(sys, kind, u):
    try:
        theta = theta_singular(sys, kind, u)
        pos = surface_point(sys, kind, u, theta)
        rho, terms, kappa = _rho_terms(sys, u)
        return dict(u=u, theta=theta, position=pos, witness=witness_at(sys, u),
                    terms=terms, kappa=kappa, status="ok")
    except LdxError as e:
        nan = math.nan
        return dict(u=u, theta=nan, position=Vec4(nan, nan, nan, nan),
                    witness=Witness(nan, nan, nan, nan), terms=nan, kappa=nan,
                    status=type(e).__name__)


def _rho_root(sys, a, b, xtol):
    f = lambda u: witness_at(sys, u).rho
    return optimize.brentq(f, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)


def singular_locus(sys, kind, u_range=None, n_samples=100):
    """Sample the singular locus, refine zeros of rho and classify every point.

    Per-sample failures (degenerate assumption, no real angle, wrong regime)
    are recorded as the point's ``status`` instead of raising.
    """
    kind = Kind(kind)
    a, b = sys.interval if u_range is None else (float(x) for x in u_range)
    grid = [float(u) for u in np.linspace(a, b, int(n_samples))]
    samples = pmap(lambda u: _locus_sample(sys, kind, u), grid)

    ok = [x for x in samples if x["status"] == "ok"]
    tol = sys.tol
    if ok:
        max_rho = max(abs(x["witness"].rho) for x in ok)
        scale = max(max(x["terms"], x["kappa"] ** 6) for x in ok)
        slice_deg = max_rho <= tol.slice * scale
    else:
        max_rho, scale, slice_deg = math.nan, math.nan, False

    def band(name):
        vals = [abs(getattr(x["witness"], name)) for x in ok]
        return tol.classify * max(vals) if vals else 0.0

    bands = Bands(band("rho"), band("rho_prime"), band("lambda0"), band("lambda1"))

    roots = []
    if ok and not slice_deg:
        brackets = []
        for x, y in zip(samples, samples[1:]):
            if x["status"] != "ok" or y["status"] != "ok":
                continue
            rx, ry = x["witness"].rho, y["witness"].rho
            if rx == 0.0 or ry == 0.0 or (rx > 0) == (ry > 0):
                continue
            brackets.append((x["u"], y["u"]))
        roots = pmap(lambda ab: _rho_root(sys, ab[0], ab[1], tol.root), brackets)
        refined = pmap(lambda u: _locus_sample(sys, kind, u), roots)
        for r in refined:
            r["refined"] = True
        samples = sorted(samples + refined, key=lambda x: x["u"])

    s_vals = arclengths(sys, [x["u"] for x in samples], start=a)
    points = []
    for x, s in zip(samples, s_vals):
        cls = (classify_point(x["witness"], bands, slice_deg)
               if x["status"] == "ok" else Classification.UNRESOLVED)
        points.append(SingularLocusPoint(
            u=x["u"], s=s, theta=x["theta"], position=x["position"], classification=cls,
            witness=x["witness"], status=x["status"], refined=x.get("refined", False),
        ))
    return SingularLocus(kind, points, bands, slice_deg, max_rho, scale, tuple(roots))


# -- slices ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SliceReport:
    is_slice: bool
    v: Vec4 = None
    c: float = None
    max_rho: float = math.nan
    rho_scale: float = math.nan
    spread: float = math.nan            # max distance of locus points from their mean
    plane_residual: float = math.nan    # max |<gamma, v> - c| for the recovered (v, c)
    fit_residual: float = math.nan      # best affine hyperplane fit through gamma
    conditions: dict = field(default_factory=dict)

    @property
    def consistent(self):
        """True when the three slice characterizations agree."""
        return len(set(self.conditions.values())) == 1


def _hyperplane_fit(points):
    """Best Euclidean affine hyperplane through ``points``: (normal, offset, rms)."""
    P = np.asarray(points, dtype=float)
    centre = P.mean(axis=0)
    _, sv, vt = np.linalg.svd(P - centre)
    normal = vt[-1]
    rms = sv[-1] / math.sqrt(len(P))
    return normal, float(normal @ centre), float(rms)


def slice_test(sys, kind, u_range=None, n_samples=100):
    """Whether the curve lies in one hyperplane section of its hypersurface.

    Three characterizations are evaluated independently: rho vanishing on the
    range, the singular locus being a single point, and the curve points
    admitting an exact affine hyperplane fit.
    """
    kind = Kind(kind)
    locus = singular_locus(sys, kind, u_range, n_samples)
    pts = locus.valid()
    if not pts:
        raise DegenerateAssumption("singular locus undefined on the whole range")
    tol = sys.tol
    X = np.array([p.position.array() for p in pts])
    spread = float(np.max(np.linalg.norm(X - X.mean(axis=0), axis=1)))
    gammas = np.array([frame_jets(sys, p.u).gamma.value().array() for p in pts])
    _, _, fit = _hyperplane_fit(gammas)
    scale = max(1.0, float(np.max(np.abs(gammas))))
    conditions = {
        "rho_vanishes": bool(locus.slice_degenerate),
        "locus_constant": spread < tol.spread,
        "curve_in_hyperplane": fit < tol.spread * scale,
    }
    v = c = None
    resid = math.nan
    if locus.slice_degenerate:
        v = Vec4.of(X.mean(axis=0))
        c = float(pseudo_dot(Vec4.of(gammas[0]), v))
        resid = float(max(abs(pseudo_dot(Vec4.of(g), v) - c) for g in gammas))
    return SliceReport(
        is_slice=bool(locus.slice_degenerate), v=v, c=c, max_rho=locus.max_rho,
        rho_scale=locus.rho_scale, spread=spread, plane_residual=resid,
        fit_residual=fit, conditions=conditions,
    )


# -- meshes -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SurfacePatch:
    kind: Kind
    u: np.ndarray                  # (n_u,)
    s: np.ndarray                  # (n_u,) arc length from the range start
    theta: np.ndarray              # (n_theta,)
    positions: np.ndarray          # (n_u, n_theta, 4), NaN where undefined
    residuals: np.ndarray          # pseudo-sphere residual per sample
    min_sv: np.ndarray             # smallest Jacobian singular value per sample
    status: tuple                  # per u row: "ok" or the error name
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.positions.shape[:2]


def _patch_row(sys, kind, u, thetas):
    n = len(thetas)
    pos = np.full((n, 4), np.nan)
    res = np.full(n, np.nan)
    msv = np.full(n, np.nan)
    try:
        for j, th in enumerate(thetas):
            p = surface_point(sys, kind, u, th)
            pos[j] = p.array()
            res[j] = pseudo_sphere_residual(p, kind.sphere)
            msv[j] = jacobian_min_sv(sys, kind, u, th)
    except LdxError as e:
        pos[:] = res[:] = msv[:] = np.nan
        return pos, res, msv, type(e).__name__
    return pos, res, msv, "ok"


def sample_patch(sys, kind, u_range=None, theta_range=None, n_u=50, n_theta=50):
    kind = Kind(kind)
    a, b = sys.interval if u_range is None else (float(x) for x in u_range)
    t0, t1 = DEFAULT_THETA_RANGE[kind] if theta_range is None else theta_range
    us = np.linspace(a, b, int(n_u))
    thetas = np.linspace(float(t0), float(t1), int(n_theta))
    rows = pmap(lambda u: _patch_row(sys, kind, float(u), thetas), us)
    meta = {"u_range": (a, b), "theta_range": (float(t0), float(t1)),
            "n_u": int(n_u), "n_theta": int(n_theta)}
    if kind is Kind.DESITTER:
        meta["antipodal_branch"] = "theta + pi"
    return SurfacePatch(
        kind=kind, u=us, s=np.array(arclengths(sys, us, start=a)), theta=thetas,
        positions=np.stack([r[0] for r in rows]),
        residuals=np.stack([r[1] for r in rows]),
        min_sv=np.stack([r[2] for r in rows]),
        status=tuple(r[3] for r in rows), meta=meta,
    )


__all__ = [
    "SurfaceKind", "Classification", "Witness", "Bands", "SingularLocusPoint",
    "SingularLocus", "SliceReport", "SurfacePatch", "DEFAULT_THETA_RANGE",
    "surface_point", "theta_singular", "theta_rhs", "jacobian", "jacobian_min_sv",
    "argmin_jacobian_sv", "witness_at", "classify_point", "singular_locus",
    "slice_test", "sample_patch",
]
