import math
import re

import pytest
from hypothesis import HealthCheck, settings

from ldx.builtins import BUILTINS

settings.register_profile(
    "ldx", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ldx")


@pytest.fixture(scope="session")
def systems():
    """Compiled builtin curves, keyed by name."""
    return {name: b.compile() for name, b in BUILTINS.items()}


@pytest.fixture(scope="session")
def helix(systems):
    return systems["helix_r3"]


@pytest.fixture(scope="session")
def perturbed(systems):
    return systems["graph_perturbed"]


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


SQRT2 = math.sqrt(2.0)


def reparametrized(defs, new_param_expr, param="u"):
    """Curve definitions with s replaced by an expression in a new parameter."""
    sub = f"({new_param_expr})"
    out = dict(defs)
    out["curve"] = [re.sub(r"\bs\b", sub, e) for e in defs["curve"]]
    if "normal" in defs:
        out["normal"] = [re.sub(r"\bs\b", sub, e) for e in defs["normal"]]
    out["param"] = param
    return out


@pytest.fixture(scope="session")
def perturbed_locus(perturbed):
    from ldx.surfaces import singular_locus

    return singular_locus(perturbed, "hyperbolic")


def mp_eval(e, env):
    """Evaluate an expression tree in mpmath at the current precision."""
    import mpmath

    from ldx.smoothcurve import Add, Call, Div, Mul, Neg, Num, Pow, Sub, Var

    if isinstance(e, Num):
        return mpmath.mpf(e.value)
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Neg):
        return -mp_eval(e.arg, env)
    if isinstance(e, Call):
        return getattr(mpmath, e.func)(mp_eval(e.arg, env))
    a, b = mp_eval(e.left, env), mp_eval(e.right, env)
    return {Add: lambda: a + b, Sub: lambda: a - b, Mul: lambda: a * b,
            Div: lambda: a / b, Pow: lambda: a ** b}[type(e)]()


def h3_focal_oracle(curve_srcs, s, theta):
    """De Sitter focal point of a unit-speed curve on H^3(-1) from its own
    Frenet frame in H^3, built from symbolic derivatives in 40-digit arithmetic:

        (cos theta / sqrt(1 - k_h^2)) (k_h gamma + e) + sin theta b
    """
    import mpmath
    import numpy as np

    from ldx.smoothcurve import diff_expr, parse_expr

    with mpmath.workdps(40):
        env = {"s": mpmath.mpf(s)}
        ex = [parse_expr(x, ["s"]) for x in curve_srcs]
        d1 = [diff_expr(x, "s") for x in ex]
        d2 = [diff_expr(x, "s") for x in d1]
        g = [mp_eval(x, env) for x in ex]
        t = [mp_eval(x, env) for x in d1]
        w = [mp_eval(x, env) - gi for x, gi in zip(d2, g)]   # curvature vector in H^3
        kh = mpmath.sqrt(-w[0] ** 2 + w[1] ** 2 + w[2] ** 2 + w[3] ** 2)
        e = [x / kh for x in w]
        b = []
        for i in range(4):
            first = [0] * 4
            first[i] = -1 if i == 0 else 1
            b.append(-mpmath.det(mpmath.matrix([first, g, t, e])))
        c, sn = mpmath.cos(theta), mpmath.sin(theta)
        out = [c / mpmath.sqrt(1 - kh * kh) * (kh * gi + ei) + sn * bi
               for gi, ei, bi in zip(g, e, b)]
        return np.array([float(x) for x in out]), float(kh)
