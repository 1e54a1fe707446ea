"""Lorentzian Darboux frame and curve invariants.

A curve is given either as gamma = X o gamma_bar with X a spacelike embedding
of a 3-parameter domain (``embedded`` mode) or directly as a spacetime curve
together with its unit timelike normal (``direct`` mode).

All public operations take a value ``u`` of the curve's own parameter. The
jets they return or use internally are expansions in *arc length* measured
from that point (base point 0), obtained by formally inverting the series of
s(u). Global arc-length positions come from :func:`arclengths`.
"""

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .errors import (
    BadDirectNormal,
    FrameDegenerate,
    IrregularCurve,
    LdxError,
    NotSpacelikeHypersurface,
)
from .minkowski import Vec4, pseudo_dot, wedge3
from .smoothcurve import Jet, diff_expr, eval_jet, evaluate, parse_expr, sqrt
from .tolerances import DEFAULT

HYPERSURFACE_VARS = ("u1", "u2", "u3")
INVARIANTS = ("k_n", "tau1", "tau2", "k_g", "tau_g")
VALIDATION_POINTS = 65


@dataclass(frozen=True, eq=False)
class CurveSystem:
    """A compiled curve. Immutable; hashed by identity so it can key caches."""

    mode: str
    param: str
    interval: tuple
    order: int
    curve: tuple                 # gamma_bar (3 exprs) or gamma (4 exprs)
    curve_d: tuple               # d/du of ``curve``
    hypersurface: tuple = None   # X (4 exprs), embedded mode
    partials: tuple = None       # ((dX/du1), (dX/du2), (dX/du3))
    normal: tuple = None         # n_gamma (4 exprs), direct mode
    tol: object = DEFAULT
    source: dict = field(default_factory=dict)

    @property
    def embedded(self):
        return self.mode == "embedded"


@dataclass(frozen=True)
class FrameSample:
    u: float
    n_gamma: Vec4
    t: Vec4
    n1: Vec4
    n2: Vec4
    k_n: float
    tau1: float
    tau2: float
    k_g: float
    tau_g: float
    jets: dict = field(default_factory=dict, repr=False)

    def invariants(self):
        return {name: getattr(self, name) for name in INVARIANTS}


@dataclass(frozen=True)
class DerivedInvariants:
    u: float
    lambda0: float
    lambda1: float
    lambda2: float
    rho: float
    rho_prime: float
    mixed_torsion: float   # k_n tau_2 + k_g tau_g
    rho_scale: float       # size of the terms whose sum is rho


@dataclass(frozen=True)
class AssumptionFlags:
    u: float
    kg_nonzero: bool
    nondegenerate: bool    # |k_n tau_2 + k_g tau_g| > eps
    regime: str            # "hyperbolic", "desitter" or "neither"
    kg2_minus_kn2: float = math.nan
    mixed_torsion: float = math.nan


# -- compilation --------------------------------------------------------------


def compile_system(defs, interval, order=7, tol=DEFAULT):
    """Parse and validate a curve definition.

    ``defs`` is a mapping with ``mode`` ("embedded" or "direct"), an optional
    ``param`` name (default "s") and either ``hypersurface`` (4 strings in
    u1, u2, u3) plus ``curve`` (3 strings), or ``curve`` (4 strings) plus
    ``normal`` (4 strings).
    """
    if order < 6:
        raise ValueError("jet order must be at least 6")
    mode = defs.get("mode", "embedded")
    param = defs.get("param", "s")
    a, b = (float(x) for x in interval)
    if not a < b:
        raise ValueError("empty interval")

    def exprs(key, n, variables):
        srcs = defs.get(key)
        if srcs is None or len(srcs) != n:
            raise ValueError(f"{key!r} needs {n} expressions")
        return tuple(parse_expr(str(src), variables) for src in srcs)

    if mode == "embedded":
        X = exprs("hypersurface", 4, HYPERSURFACE_VARS)
        curve = exprs("curve", 3, [param])
        partials = tuple(tuple(diff_expr(x, v) for x in X) for v in HYPERSURFACE_VARS)
        normal = None
    elif mode == "direct":
        X = partials = None
        curve = exprs("curve", 4, [param])
        normal = exprs("normal", 4, [param])
    else:
        raise ValueError(f"unknown mode {mode!r}")
    curve_d = tuple(diff_expr(c, param) for c in curve)
    sys = CurveSystem(
        mode=mode, param=param, interval=(a, b), order=int(order), curve=curve,
        curve_d=curve_d, hypersurface=X, partials=partials, normal=normal, tol=tol,
        source=dict(defs),
    )
    _validate(sys)
    return sys


def _validate(sys):
    tol = sys.tol
    for u in np.linspace(*sys.interval, VALIDATION_POINTS):
        u = float(u)
        vel = _velocity(sys, u)
        speed2 = pseudo_dot(vel, vel)
        eucl = float(np.linalg.norm(vel.array()))
        if eucl < tol.regular:
            raise IrregularCurve(f"curve is singular at {sys.param}={u:g}")
        if speed2 <= tol.lightlike * eucl**2:
            raise IrregularCurve(f"curve is not spacelike at {sys.param}={u:g}")
        if sys.embedded:
            normal_at(sys, u, 0)
        else:
            g, n = _param_jets(sys, u, 1)
            nn = pseudo_dot(n, n).value
            ng = pseudo_dot(n, g.deriv()).value
            if abs(nn + 1.0) > tol.direct_normal or abs(ng) > tol.direct_normal * max(1.0, eucl):
                raise BadDirectNormal(
                    f"at {sys.param}={u:g}: <n,n>={nn:.3g} (want -1), <n,gamma'>={ng:.3g} (want 0)"
                )


# -- evaluation along the curve parameter ----------------------------------------


def _env_param(sys, value):
    return {sys.param: value}


def _velocity(sys, u):
    """d gamma / du as a real vector (float evaluation only)."""
    env = _env_param(sys, u)
    if not sys.embedded:
        return Vec4.of([evaluate(e, env) for e in sys.curve_d])
    pt = dict(zip(HYPERSURFACE_VARS, (evaluate(e, env) for e in sys.curve)))
    dbar = [evaluate(e, env) for e in sys.curve_d]
    comps = [0.0] * 4
    for i, col in enumerate(sys.partials):
        for k in range(4):
            comps[k] += evaluate(col[k], pt) * dbar[i]
    return Vec4.of(comps)


def speed(sys, u):
    v = _velocity(sys, u)
    return math.sqrt(max(pseudo_dot(v, v), 0.0))


def _surface_jets(sys, u, order):
    pvar = Jet.variable(u, order)
    bar = [eval_jet(e, _env_param(sys, pvar)) for e in sys.curve]
    env = dict(zip(HYPERSURFACE_VARS, bar))
    X = Vec4.of([eval_jet(e, env) for e in sys.hypersurface])
    partials = [Vec4.of([eval_jet(e, env) for e in col]) for col in sys.partials]
    return X, partials


def normal_at(sys, u, order=None):
    """Future-directed unit normal of the hypersurface along the curve, as a
    jet in the curve parameter (embedded mode only)."""
    if not sys.embedded:
        raise ValueError("normal_at needs an embedded-mode system")
    order = sys.order if order is None else order
    _, (xu1, xu2, xu3) = _surface_jets(sys, u, order)
    return _unit_normal(sys, xu1, xu2, xu3, u)


def _unit_normal(sys, xu1, xu2, xu3, u):
    w = wedge3(xu1, xu2, xu3)
    q = -pseudo_dot(w, w)
    scale = float(np.dot(w.array(), w.array()))
    if scale == 0.0 or q.value <= sys.tol.lightlike * scale:
        raise NotSpacelikeHypersurface(
            f"X_u1 ^ X_u2 ^ X_u3 is not timelike at {sys.param}={u:g}"
        )
    n = w / sqrt(q)
    n0 = n[0].value
    if n0 == 0.0:
        raise LdxError("timelike normal with zero time component")
    # future directed means <n, e0> = -n0 < 0
    return n if n0 > 0 else -n


def _param_jets(sys, u, order):
    """(gamma, n_gamma) as jets in the curve parameter."""
    if sys.embedded:
        X, (xu1, xu2, xu3) = _surface_jets(sys, u, order)
        return X, _unit_normal(sys, xu1, xu2, xu3, u)
    pvar = Jet.variable(u, order)
    env = _env_param(sys, pvar)
    g = Vec4.of([eval_jet(e, env) for e in sys.curve])
    n = Vec4.of([eval_jet(e, env) for e in sys.normal])
    return g, n


def unit_speed_jets(sys, u, order=None):
    """(gamma, n_gamma) as jets in arc length measured from the point ``u``."""
    order = sys.order if order is None else order
    g, n = _param_jets(sys, u, order)
    gp = g.deriv()
    speed2 = pseudo_dot(gp, gp)
    if speed2.value <= sys.tol.regular**2:
        raise IrregularCurve(f"curve is singular at {sys.param}={u:g}")
    s_of_u = sqrt(speed2).integrate(0.0)
    u_of_s = s_of_u.inverse()
    return g.map(lambda c: c.compose(u_of_s)), n.map(lambda c: c.compose(u_of_s))


# -- the frame -------------------------------------------------------------------


@dataclass(frozen=True)
class FrameJets:
    """Frame vectors and invariants as arc-length jets at one point."""

    u: float
    gamma: Vec4
    n_gamma: Vec4
    t: Vec4
    n1: Vec4
    n2: Vec4
    inv: dict


@functools.lru_cache(maxsize=16384)
def frame_jets(sys, u):
    """Frame and invariant jets; invariants carry order K-2."""
    u = float(u)
    gamma, ng = unit_speed_jets(sys, u, sys.order + 1)
    t = gamma.deriv()
    tp = t.deriv()
    k_n = -pseudo_dot(ng, tp)
    w = tp - ng * k_n
    kg2 = pseudo_dot(w, w)
    eps = sys.tol.kg
    if not kg2.value > eps * eps:
        raise FrameDegenerate(
            f"geodesic curvature {math.sqrt(max(kg2.value, 0.0)):.3g} <= {eps:g} "
            f"at {sys.param}={u:g}"
        )
    k_g = sqrt(kg2)
    n1 = w / k_g
    # orientation chosen so that for M = R^3 (n_gamma = e0) n2 is the Frenet binormal
    n2 = -wedge3(ng, t, n1)
    ngp = ng.deriv()
    inv = {
        "k_n": k_n,
        "tau1": pseudo_dot(n1, ngp),
        "tau2": pseudo_dot(n2, ngp),
        "k_g": k_g,
        "tau_g": -pseudo_dot(n2.deriv(), n1),
    }
    K = sys.order - 2
    inv = {k: v.truncate(K) for k, v in inv.items()}
    return FrameJets(u, gamma, ng, t, n1, n2, inv)


def frame_at(sys, u):
    fj = frame_jets(sys, u)
    vals = {k: v.value for k, v in fj.inv.items()}
    return FrameSample(
        u=float(u),
        n_gamma=fj.n_gamma.value(),
        t=fj.t.value(),
        n1=fj.n1.value(),
        n2=fj.n2.value(),
        jets=dict(fj.inv),
        **vals,
    )


def frame_gram(sample):
    """4x4 matrix of pseudo-products of (n_gamma, t, n1, n2); ideally diag(-1,1,1,1)."""
    vecs = (sample.n_gamma, sample.t, sample.n1, sample.n2)
    return np.array([[float(pseudo_dot(a, b)) for b in vecs] for a in vecs])


def frenet_residuals(sys, u):
    """Euclidean norms of the four structure-equation residuals at ``u``.

    n_gamma' = k_n t + tau1 n1 + tau2 n2
    t'       = k_n n_gamma + k_g n1
    n1'      = tau1 n_gamma - k_g t + tau_g n2
    n2'      = tau2 n_gamma - tau_g n1
    """
    fj = frame_jets(sys, u)
    ng, t, n1, n2 = (x.value() for x in (fj.n_gamma, fj.t, fj.n1, fj.n2))
    k = {name: j.value for name, j in fj.inv.items()}
    d = lambda x: x.derivative(1)
    res = {
        "n_gamma": d(fj.n_gamma) - (t * k["k_n"] + n1 * k["tau1"] + n2 * k["tau2"]),
        "t": d(fj.t) - (ng * k["k_n"] + n1 * k["k_g"]),
        "n1": d(fj.n1) - (ng * k["tau1"] - t * k["k_g"] + n2 * k["tau_g"]),
        "n2": d(fj.n2) - (ng * k["tau2"] - n1 * k["tau_g"]),
    }
    return {name: float(np.linalg.norm(v.array())) for name, v in res.items()}


# -- derived invariants ----------------------------------------------------------


def _d(j, k=1):
    for _ in range(k):
        j = j.deriv()
    return j


def lambda0_jet(inv):
    kn, kg, t1 = inv["k_n"], inv["k_g"], inv["tau1"]
    return kg * _d(kn) + kg * kg * t1 - kn * kn * t1 - kn * _d(kg)


def mixed_torsion_jet(inv):
    return inv["k_n"] * inv["tau2"] + inv["k_g"] * inv["tau_g"]


def rho_parts(inv):
    """The two products whose sum is rho, as jets.

    rho = P * D + lambda0 * Q with D = k_n tau_2 + k_g tau_g, where the third
    derivative of the height function along the singular direction equals
    rho * cosh(theta) / (sqrt(k_g^2 - k_n^2) D).
    """
    kn, kg, t1, t2, tg = inv["k_n"], inv["k_g"], inv["tau1"], inv["tau2"], inv["tau_g"]
    kn1, kn2 = _d(kn), _d(kn, 2)
    kg1, kg2 = _d(kg), _d(kg, 2)
    t11, t21, tg1 = _d(t1), _d(t2), _d(tg)
    P = (-kg * kn2 - kg * kn * t2 * t2 - 2.0 * kg * kg1 * t1 - kg * kg * t11
         - kg * kg * tg * t2 + 2.0 * kn * kn1 * t1 + kn * kn * t11
         - kn * kn * t2 * tg + kg2 * kn - kg * kn * tg * tg)
    Q = (2.0 * kn1 * t2 + kn * t1 * tg + kn * t21 + 2.0 * kg1 * tg
         + kg * t1 * t2 + kg * tg1)
    return P, mixed_torsion_jet(inv), lambda0_jet(inv), Q


def rho_jet(inv):
    P, D, l0, Q = rho_parts(inv)
    return P * D + l0 * Q


def lambda2_value(inv):
    kn, kg, t1, t2, tg = inv["k_n"], inv["k_g"], inv["tau1"], inv["tau2"], inv["tau_g"]
    v = lambda j, k=0: _d(j, k).value
    Kn, Kn1, Kn2, Kn3 = v(kn), v(kn, 1), v(kn, 2), v(kn, 3)
    Kg, Kg1, Kg2, Kg3 = v(kg), v(kg, 1), v(kg, 2), v(kg, 3)
    T1, T11, T12 = v(t1), v(t1, 1), v(t1, 2)
    T2, T21 = v(t2), v(t2, 1)
    Tg, Tg1 = v(tg), v(tg, 1)
    return (Kg * Kn3 + 3 * Kg2 * Kg * T1 + 3 * Kg1 * T11 * Kg + Kg**2 * T12
            + Kg**2 * Tg * T21 - Kg**2 * Tg**2 * T1 - Kn * T1 * T2 * Kg**2
            + Kn * T1 * T2 * Kg * Tg - 3 * Kn * Kn2 * T1 - 3 * Kn * Kn1 * T11
            - Kn**2 * T12 + Kn * Kg3 + Kn**2 * T1 * Tg**2 + Kg**2 * T1 * T2**2
            - Kn**2 * T1 * T2**2 + Kn**2 * T2 * Tg1 - Kn**2 * T21 * Tg
            - Kg**2 * Tg1 * T2 + 2 * T1**2 * Kn1 * Kg - 2 * T1**2 * Kg1 * Kn)


def derived_invariants_at(sys, u):
    inv = frame_jets(sys, u).inv
    P, D, l0, Q = rho_parts(inv)
    rho = P * D + l0 * Q
    return DerivedInvariants(
        u=float(u),
        lambda0=l0.value,
        lambda1=_d(D).value,
        lambda2=lambda2_value(inv),
        rho=rho.value,
        rho_prime=rho.derivative(1),
        mixed_torsion=D.value,
        rho_scale=abs(P.value * D.value) + abs(l0.value * Q.value),
    )


def rho_prime_reduced(sys, u):
    """(-1/sqrt(k_g^2 - k_n^2)) (-3 lambda0' lambda1 + lambda2).

    Kept as a cross-check against the jet derivative of rho at points where
    lambda0 vanishes.
    """
    inv = frame_jets(sys, u).inv
    l0 = lambda0_jet(inv)
    lam1 = _d(mixed_torsion_jet(inv)).value
    r2 = inv["k_g"].value ** 2 - inv["k_n"].value ** 2
    return (-1.0 / math.sqrt(r2)) * (-3.0 * _d(l0).value * lam1 + lambda2_value(inv))


def assumption_report(sys, grid):
    eps = sys.tol.assume
    out = []
    for u in grid:
        u = float(u)
        try:
            inv = frame_jets(sys, u).inv
        except FrameDegenerate:
            out.append(AssumptionFlags(u, False, False, "neither"))
            continue
        kn, kg = inv["k_n"].value, inv["k_g"].value
        diff = kg * kg - kn * kn
        D = mixed_torsion_jet(inv).value
        regime = "hyperbolic" if diff > eps else "desitter" if diff < -eps else "neither"
        out.append(AssumptionFlags(u, True, abs(D) > eps, regime, diff, D))
    return out


# -- arc length -------------------------------------------------------------------


def arclengths(sys, us, start=None):
    """Arc length from ``start`` (default: interval start) to each of ``us``."""
    start = sys.interval[0] if start is None else float(start)
    us = [float(u) for u in us]
    order = sorted(range(len(us)), key=lambda i: us[i])
    out = [0.0] * len(us)
    prev, acc = start, 0.0
    f = functools.partial(speed, sys)
    for i in order:
        seg, _ = integrate.quad(f, prev, us[i], epsabs=1e-10, epsrel=1e-10, limit=200)
        acc += seg
        prev = us[i]
        out[i] = acc
    return out


def param_at_arclength(sys, s):
    """Curve parameter at arc length ``s`` from the interval start."""
    a, b = sys.interval
    total = arclengths(sys, [b])[0]
    if not -1e-12 <= s <= total + 1e-12:
        raise ValueError(f"arc length {s} outside [0, {total}]")
    return optimize.brentq(lambda u: arclengths(sys, [u], a)[0] - s, a, b, xtol=1e-13)
