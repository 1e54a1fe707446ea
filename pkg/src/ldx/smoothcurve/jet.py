"""Truncated Taylor series ("jets") in one real variable.

A jet of order K at base point a stores c[k] = f^(k)(a) / k! for k = 0..K.
Arithmetic between jets is exact truncated-series arithmetic, so derivatives
extracted from a computed jet are exact up to floating point rounding.

Binary operations between jets of different orders truncate to the smaller
order; mixing jets expanded at different base points is an error.
"""

import math

import numpy as np

from ..errors import DomainError


class Jet:
    __slots__ = ("c", "base")
    __array_ufunc__ = None  # make numpy scalars defer to our reflected ops

    def __init__(self, coeffs, base=0.0):
        self.c = np.asarray(coeffs, dtype=float)
        self.base = float(base)

    @classmethod
    def variable(cls, base, order):
        """The identity function x -> x expanded at ``base``."""
        c = np.zeros(order + 1)
        c[0] = base
        if order >= 1:
            c[1] = 1.0
        return cls(c, base)

    @classmethod
    def constant(cls, value, base, order):
        c = np.zeros(order + 1)
        c[0] = value
        return cls(c, base)

    @property
    def order(self):
        return len(self.c) - 1

    @property
    def value(self):
        return float(self.c[0])

    def derivative(self, k):
        """k-th derivative at the base point."""
        if k > self.order:
            raise ValueError(f"jet of order {self.order} has no derivative {k}")
        return math.factorial(k) * float(self.c[k])

    def derivatives(self):
        return [math.factorial(k) * float(ck) for k, ck in enumerate(self.c)]

    def deriv(self):
        """Jet of f' (one order lower)."""
        k = np.arange(1, len(self.c))
        return Jet(self.c[1:] * k, self.base)

    def integrate(self, constant=0.0):
        """Jet of the antiderivative with the given value at the base point."""
        c = np.empty(len(self.c) + 1)
        c[0] = constant
        c[1:] = self.c / np.arange(1, len(self.c) + 1)
        return Jet(c, self.base)

    def truncate(self, order):
        return Jet(self.c[: order + 1], self.base)

    def compose(self, inner):
        """f(inner(y)) where ``self`` is f expanded at inner's constant term.

        ``inner`` is a jet in a new variable y; its constant term must equal
        this jet's base point.
        """
        order = min(self.order, inner.order)
        delta = inner.c[: order + 1].copy()
        if not math.isclose(delta[0], self.base, rel_tol=1e-12, abs_tol=1e-12):
            raise ValueError("inner jet does not start at the outer base point")
        delta[0] = 0.0
        out = np.zeros(order + 1)
        out[0] = self.c[order]
        for k in range(order - 1, -1, -1):
            out = _mul_trunc(out, delta, order)
            out[0] += self.c[k]
        return Jet(out, inner.base)

    def inverse(self):
        """Jet of the inverse function, expanded at f(base).

        Requires f'(base) != 0. Built order by order: each new coefficient is
        fixed by the residual of f(g(y)) - y at that order.
        """
        if self.c.size < 2 or self.c[1] == 0.0:
            raise DomainError("cannot invert a jet with zero first derivative")
        order = self.order
        f1 = self.c[1]
        g = np.zeros(order + 1)
        g[0] = self.base
        g[1] = 1.0 / f1
        outer = Jet(self.c, self.base)
        y0 = self.c[0]
        for k in range(2, order + 1):
            trial = outer.compose(Jet(np.concatenate([g[:k], [0.0]]), y0))
            g[k] = -trial.c[k] / f1
        return Jet(g, y0)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.base != self.base:
                raise ValueError("jets expanded at different base points")
            n = min(len(self.c), len(other.c))
            return self.c[:n], other.c[:n]
        return self.c, float(other)

    def __add__(self, other):
        a, b = self._coerce(other)
        if isinstance(b, float):
            out = a.copy()
            out[0] += b
            return Jet(out, self.base)
        return Jet(a + b, self.base)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Jet(-self.c, self.base)

    def __pos__(self):
        return self

    def __mul__(self, other):
        a, b = self._coerce(other)
        if isinstance(b, float):
            return Jet(a * b, self.base)
        return Jet(_mul_trunc(a, b, len(a) - 1), self.base)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._coerce(other)
        if isinstance(b, float):
            if b == 0.0:
                raise DomainError("division by zero")
            return Jet(a / b, self.base)
        return Jet(_div(a, b), self.base)

    def __rtruediv__(self, other):
        return Jet.constant(float(other), self.base, self.order) / self

    def __pow__(self, n):
        if isinstance(n, Jet):
            return exp(n * log(self))
        if float(n).is_integer():
            n = int(n)
            if n < 0:
                return 1.0 / (self ** (-n))
            result = Jet.constant(1.0, self.base, self.order)
            base = self
            while n:
                if n & 1:
                    result = result * base
                n >>= 1
                if n:
                    base = base * base
            return result
        return exp(float(n) * log(self))

    def __rpow__(self, a):
        return exp(self * _log_float(float(a)))

    def __abs__(self):
        return -self if self.c[0] < 0 else self

    def __float__(self):
        return self.value

    def __repr__(self):
        return f"Jet({self.c.tolist()}, base={self.base})"


def _mul_trunc(a, b, order):
    return np.convolve(a, b)[: order + 1]


def _div(a, b):
    if b[0] == 0.0:
        raise DomainError("division by a jet with zero leading coefficient")
    n = len(a)
    q = np.zeros(n)
    for k in range(n):
        q[k] = (a[k] - np.dot(b[1 : k + 1], q[k - 1 :: -1][:k])) / b[0]
    return q


def _log_float(x):
    if x <= 0.0:
        raise DomainError(f"log of nonpositive value {x}")
    return math.log(x)


# -- elementary functions on floats or jets ----------------------------------
#
# Each jet rule solves the linear ODE the function satisfies, coefficient by
# coefficient: for f' = g * a' we have k f_k = sum_j j a_j g_{k-j}.


def _ode_coeff(a, g, k):
    j = np.arange(1, k + 1)
    return np.dot(j * a[1 : k + 1], g[k - 1 :: -1][:k]) / k


def exp(x):
    if not isinstance(x, Jet):
        return math.exp(x)
    a = x.c
    e = np.zeros_like(a)
    e[0] = math.exp(a[0])
    for k in range(1, len(a)):
        e[k] = _ode_coeff(a, e, k)
    return Jet(e, x.base)


def log(x):
    if not isinstance(x, Jet):
        return _log_float(x)
    a = x.c
    if a[0] <= 0.0:
        raise DomainError(f"log of jet with nonpositive leading term {a[0]}")
    l = np.zeros_like(a)
    l[0] = math.log(a[0])
    for k in range(1, len(a)):
        j = np.arange(1, k)
        l[k] = (a[k] - np.dot(j * l[1:k], a[k - 1 : 0 : -1]) / k) / a[0]
    return Jet(l, x.base)


def sqrt(x):
    if not isinstance(x, Jet):
        if x < 0.0:
            raise DomainError(f"sqrt of negative value {x}")
        return math.sqrt(x)
    a = x.c
    if a[0] <= 0.0:
        raise DomainError(f"sqrt of jet with nonpositive leading term {a[0]}")
    r = np.zeros_like(a)
    r[0] = math.sqrt(a[0])
    for k in range(1, len(a)):
        r[k] = (a[k] - np.dot(r[1:k], r[k - 1 : 0 : -1])) / (2.0 * r[0])
    return Jet(r, x.base)


def _sincos(x, hyperbolic):
    a = x.c
    s = np.zeros_like(a)
    c = np.zeros_like(a)
    if hyperbolic:
        s[0], c[0] = math.sinh(a[0]), math.cosh(a[0])
    else:
        s[0], c[0] = math.sin(a[0]), math.cos(a[0])
    sign = 1.0 if hyperbolic else -1.0
    for k in range(1, len(a)):
        s[k] = _ode_coeff(a, c, k)
        c[k] = sign * _ode_coeff(a, s, k)
    return Jet(s, x.base), Jet(c, x.base)


def sin(x):
    if not isinstance(x, Jet):
        return math.sin(x)
    return _sincos(x, False)[0]


def cos(x):
    if not isinstance(x, Jet):
        return math.cos(x)
    return _sincos(x, False)[1]


def tan(x):
    if not isinstance(x, Jet):
        return math.tan(x)
    s, c = _sincos(x, False)
    return s / c


def sinh(x):
    if not isinstance(x, Jet):
        return math.sinh(x)
    return _sincos(x, True)[0]


def cosh(x):
    if not isinstance(x, Jet):
        return math.cosh(x)
    return _sincos(x, True)[1]


def tanh(x):
    if not isinstance(x, Jet):
        return math.tanh(x)
    s, c = _sincos(x, True)
    return s / c


def atan(x):
    if not isinstance(x, Jet):
        return math.atan(x)
    d = x.deriv() / (1.0 + x * x)
    return d.integrate(math.atan(x.c[0]))


FUNCTIONS = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "sinh": sinh,
    "cosh": cosh,
    "tanh": tanh,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "atan": atan,
}
