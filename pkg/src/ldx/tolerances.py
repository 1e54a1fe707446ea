"""Numerical tolerances shared by the geometry modules.

Exact-zero conditions in the geometry become scaled bands here. All fields can
be overridden from a config file or ``--tol NAME=VALUE``.
"""

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    lightlike: float = 1e-10   # |<x,x>| <= lightlike * |x|_E^2
    kg: float = 1e-8           # geodesic curvature must exceed this
    assume: float = 1e-8       # band for k_n tau_2 + k_g tau_g and k_g^2 - k_n^2
    regular: float = 1e-10     # minimum parameter speed
    direct_normal: float = 1e-8
    oracle: float = 1e-6       # derivative vanishing band (relative)
    rank: float = 1e-8         # singular value cutoff relative to the largest
    classify: float = 1e-6     # zero band for rho, rho', lambda0, lambda1 (relative)
    slice: float = 1e-6        # max|rho| band relative to its term scale
    spread: float = 1e-7       # locus constancy / hyperplane residual
    root: float = 1e-10        # bisection tolerance in the curve parameter

    def with_overrides(self, **kw):
        known = {f.name for f in fields(self)}
        bad = set(kw) - known
        if bad:
            raise KeyError(", ".join(sorted(bad)))
        return replace(self, **{k: float(v) for k, v in kw.items()})


DEFAULT = Tolerances()
