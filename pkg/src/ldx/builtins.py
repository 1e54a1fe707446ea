"""Ready-made example curves.

Each entry carries the raw definition (as accepted by ``compile_system``), a
working interval, the surface kind it is meant for and, for curves built to
lie in a hyperplane section, the hyperplane (v, c) used in the construction.
"""

import math
from dataclasses import dataclass, field

from .frame import compile_system
from .tolerances import DEFAULT

R3 = ("0", "u1", "u2", "u3")
PARABOLOID = ("0.3*(u1^2+u2^2)", "u1", "u2", "u3")
H3_GRAPH = ("sqrt(1+u1^2+u2^2+u3^2)", "u1", "u2", "u3")


@dataclass(frozen=True)
class Builtin:
    name: str
    description: str
    defs: dict
    interval: tuple
    kind: str
    slice_plane: tuple = None     # (v, c) when the curve lies in HP(v, c) by construction
    notes: dict = field(default_factory=dict)

    def compile(self, order=7, tol=DEFAULT, interval=None):
        return compile_system(self.defs, interval or self.interval, order=order, tol=tol)


def _f(x):
    return repr(float(x))


def _h3_circle(a=1.0):
    ca, sa = math.cosh(a), math.sinh(a)
    g = [f"{_f(ca)}*cosh(s/{_f(ca)})", f"{_f(ca)}*sinh(s/{_f(ca)})", _f(sa), "0"]
    return {"mode": "direct", "curve": g, "normal": g}


def _h3_torsion(r=0.5, b=1.0):
    # (cosh r cosh(a s), cosh r sinh(a s), sinh r cos(b s), sinh r sin(b s)) at unit speed
    cr, sr = math.cosh(r), math.sinh(r)
    a = math.sqrt((1.0 - (sr * b) ** 2) / cr**2)
    g = [f"{_f(cr)}*cosh({_f(a)}*s)", f"{_f(cr)}*sinh({_f(a)}*s)",
         f"{_f(sr)}*cos({_f(b)}*s)", f"{_f(sr)}*sin({_f(b)}*s)"]
    return {"mode": "direct", "curve": g, "normal": g}


def _paraboloid_slice(phi=0.3, c=-0.2):
    # <X(u), v> = c with v = (cosh phi, sinh phi, 0, 0) is a circle in (u1, u2)
    ch, sh = math.cosh(phi), math.sinh(phi)
    m = sh / (0.6 * ch)
    rad = math.sqrt(m * m - c / (0.3 * ch))
    defs = {"mode": "embedded", "hypersurface": list(PARABOLOID),
            "curve": [f"{_f(m)}+{_f(rad)}*cos(s)", f"{_f(rad)}*sin(s)", "0.3*s+0.05*sin(s)"]}
    return defs, ((ch, sh, 0.0, 0.0), c)


_SLICE_GRAPH, _SLICE_GRAPH_PLANE = _paraboloid_slice()

BUILTINS = {
    b.name: b
    for b in [
        Builtin(
            "helix_r3",
            "unit-speed circular helix in the flat slice x0 = 0",
            {"mode": "embedded", "hypersurface": list(R3),
             "curve": ["cos(s/sqrt(2))", "sin(s/sqrt(2))", "s/sqrt(2)"]},
            (0.0, 4.0 * math.pi), "hyperbolic",
            slice_plane=((1.0, 0.0, 0.0, 0.0), 0.0),
        ),
        Builtin(
            "h3_circle",
            "circle of radius cosh(1) in H^3(-1), given directly with its normal",
            _h3_circle(), (0.0, 2.0 * math.pi), "desitter",
        ),
        Builtin(
            "h3_torsion",
            "constant-curvature helix on H^3(-1) with geodesic curvature below 1",
            _h3_torsion(), (0.0, 2.0 * math.pi), "desitter",
        ),
        Builtin(
            "graph_perturbed",
            "helix with modulated radius on the graph x0 = 0.3(u1^2 + u2^2)",
            {"mode": "embedded", "hypersurface": list(PARABOLOID),
             "curve": ["(0.5+0.02*sin(2*s))*cos(s)", "(0.5+0.02*sin(2*s))*sin(s)", "0.3*s"]},
            (0.0, 2.0 * math.pi), "hyperbolic",
        ),
        Builtin(
            "slice_graph",
            "curve on x0 = 0.3(u1^2 + u2^2) inside a tilted spacelike hyperplane",
            _SLICE_GRAPH, (0.0, 2.0 * math.pi), "hyperbolic",
            slice_plane=_SLICE_GRAPH_PLANE,
        ),
        Builtin(
            "slice_h3",
            "parabola on H^3(-1) inside the timelike hyperplane x3 = 0.3",
            {"mode": "embedded", "hypersurface": list(H3_GRAPH),
             "curve": ["s", "0.3*s^2", "0.3"]},
            (0.2, 1.0), "desitter",
            slice_plane=((0.0, 0.0, 0.0, 1.0), 0.3),
        ),
    ]
}


def get_builtin(name):
    try:
        return BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}") from None
