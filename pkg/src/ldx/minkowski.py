"""Lorentzian linear algebra of Minkowski 4-space, signature (-,+,+,+).

Every function here only uses +, -, *, / and sqrt on the components, so the
same code runs on plain floats and on :class:`~ldx.smoothcurve.Jet` scalars.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroVector
from .smoothcurve.jet import sqrt

LIGHTLIKE_TOL = 1e-10


class Vec4:
    """A spacetime vector (x0, x1, x2, x3) over real or jet scalars."""

    __slots__ = ("x",)

    def __init__(self, x0, x1, x2, x3):
        self.x = (x0, x1, x2, x3)

    @classmethod
    def of(cls, seq):
        a, b, c, d = seq
        return cls(a, b, c, d)

    def __iter__(self):
        return iter(self.x)

    def __getitem__(self, i):
        return self.x[i]

    def __add__(self, other):
        return Vec4(*(a + b for a, b in zip(self.x, other.x)))

    def __sub__(self, other):
        return Vec4(*(a - b for a, b in zip(self.x, other.x)))

    def __neg__(self):
        return Vec4(*(-a for a in self.x))

    def __mul__(self, k):
        return Vec4(*(a * k for a in self.x))

    def __rmul__(self, k):
        return Vec4(*(k * a for a in self.x))

    def __truediv__(self, k):
        return Vec4(*(a / k for a in self.x))

    def map(self, f):
        return Vec4(*(f(a) for a in self.x))

    # jet helpers
    def value(self):
        """Real components (leading jet coefficients)."""
        return Vec4(*(float(a) for a in self.x))

    def deriv(self):
        return Vec4(*(a.deriv() for a in self.x))

    def derivative(self, k):
        """k-th derivative of each jet component, as a real vector."""
        return Vec4(*(a.derivative(k) for a in self.x))

    def array(self):
        return np.array([float(a) for a in self.x])

    def __repr__(self):
        return "Vec4(" + ", ".join(repr(a) for a in self.x) + ")"


E0 = Vec4(1.0, 0.0, 0.0, 0.0)
E1 = Vec4(0.0, 1.0, 0.0, 0.0)
E2 = Vec4(0.0, 0.0, 1.0, 0.0)
E3 = Vec4(0.0, 0.0, 0.0, 1.0)


class CausalCharacter(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


def pseudo_dot(x, y):
    return -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3]


def pseudo_norm(x):
    return sqrt(abs(pseudo_dot(x, x)))


def euclid_norm(x):
    return math.sqrt(sum(float(a) ** 2 for a in x))


def causal_character(x, tol=LIGHTLIKE_TOL):
    """Classify a nonzero vector; |<x,x>| <= tol*|x|_E^2 counts as lightlike."""
    e2 = euclid_norm(x) ** 2
    if e2 == 0.0:
        raise ZeroVector("causal character of the zero vector is undefined")
    q = float(pseudo_dot(x, x))
    if abs(q) <= tol * e2:
        return CausalCharacter.LIGHTLIKE
    return CausalCharacter.SPACELIKE if q > 0 else CausalCharacter.TIMELIKE


def _triple(x, y, z):
    x, y, z = sorted((x, y, z))
    return x * y * z


def _det3(a, b, c, d, e, f, g, h, i):
    if all(isinstance(t, (int, float)) for t in (a, b, c, d, e, f, g, h, i)):
        # order-independent products and a correctly rounded sum make row swaps
        # negate the result bit for bit
        return math.fsum((
            _triple(a, e, i), _triple(b, f, g), _triple(c, d, h),
            -_triple(c, e, g), -_triple(b, d, i), -_triple(a, f, h),
        ))
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def wedge3(x, y, z):
    """Pseudo vector product: cofactor expansion of the determinant with first
    row (-e0, e1, e2, e3) and rows x, y, z."""
    cols = [(x[k], y[k], z[k]) for k in range(4)]

    def minor(skip):
        c = [cols[k] for k in range(4) if k != skip]
        return _det3(c[0][0], c[1][0], c[2][0],
                     c[0][1], c[1][1], c[2][1],
                     c[0][2], c[1][2], c[2][2])

    return Vec4(-minor(0), -minor(1), minor(2), -minor(3))


@dataclass(frozen=True)
class Hyperplane:
    """HP(v, c) = {x : <x, v> = c}."""

    v: Vec4
    c: float

    @property
    def kind(self):
        """Spacelike hyperplane for timelike v, timelike for spacelike v."""
        ch = causal_character(self.v)
        return {
            CausalCharacter.TIMELIKE: "spacelike",
            CausalCharacter.SPACELIKE: "timelike",
            CausalCharacter.LIGHTLIKE: "lightlike",
        }[ch]


def hyperplane_eval(h, x):
    return pseudo_dot(x, h.v) - h.c


class PseudoSphere(enum.Enum):
    H3 = "H3"
    S31 = "S31"


def pseudo_sphere_residual(x, kind):
    q = pseudo_dot(x, x)
    if PseudoSphere(kind) is PseudoSphere.H3:
        return q + 1.0
    return q - 1.0
