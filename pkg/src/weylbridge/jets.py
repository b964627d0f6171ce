"""Second-order forward-mode differentiation in four variables.

A :class:`Jet2` carries the value, gradient and Hessian of a scalar.  Products
and compositions follow the second-order chain rule exactly, so metric
derivatives come out to machine precision rather than finite-difference
accuracy.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EvaluationDomainError
from .expr import integer_exponent

DIM = 4


class Jet2:
    __slots__ = ("value", "grad", "hess")

    def __init__(self, value, grad=None, hess=None):
        self.value = float(value)
        self.grad = np.zeros(DIM) if grad is None else grad
        self.hess = np.zeros((DIM, DIM)) if hess is None else hess

    @classmethod
    def variable(cls, value, index):
        grad = np.zeros(DIM)
        grad[index] = 1.0
        return cls(value, grad)

    def is_constant(self):
        return not (self.grad.any() or self.hess.any())

    def __repr__(self):
        return f"Jet2(value={self.value!r}, grad={self.grad.tolist()!r})"

    @staticmethod
    def _lift(other):
        return other if isinstance(other, Jet2) else Jet2(other)

    def __add__(self, other):
        other = self._lift(other)
        return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        cross = np.outer(self.grad, other.grad)
        return Jet2(
            self.value * other.value,
            self.value * other.grad + other.value * self.grad,
            self.value * other.hess + other.value * self.hess + cross + cross.T,
        )

    __rmul__ = __mul__

    def chain(self, f0, f1, f2):
        """Compose with a scalar function whose value, first and second derivative at ``self.value`` are given."""
        return Jet2(f0, f1 * self.grad, f1 * self.hess + f2 * np.outer(self.grad, self.grad))

    def reciprocal(self):
        u = self.value
        if u == 0.0:
            raise EvaluationDomainError("division by zero")
        return self.chain(1.0 / u, -1.0 / u**2, 2.0 / u**3)

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def __pow__(self, n):
        return jet_power(self, Jet2(n))


def _int_power(base: Jet2, n: int) -> Jet2:
    if n < 0:
        if base.value == 0.0:
            raise EvaluationDomainError("zero raised to a negative power")
        return _int_power(base, -n).reciprocal()
    result = Jet2(1.0)
    square = base
    while n:
        if n & 1:
            result = result * square
        n >>= 1
        if n:
            square = square * square
    return result


def jet_power(base: Jet2, exponent: Jet2) -> Jet2:
    """``base ** exponent``; integer constant exponents use repeated multiplication."""
    if exponent.is_constant():
        n = integer_exponent(exponent.value)
        if n is not None:
            return _int_power(base, n)
        u, b = base.value, exponent.value
        if u <= 0.0:
            raise EvaluationDomainError(f"non-integer power {b} of non-positive base {u}")
        return base.chain(u**b, b * u ** (b - 1), b * (b - 1) * u ** (b - 2))
    if base.value <= 0.0:
        raise EvaluationDomainError(f"variable power of non-positive base {base.value}")
    return jet_func("exp", exponent * jet_func("log", base))


def jet_func(name: str, u: Jet2) -> Jet2:
    x = u.value
    if name == "sin":
        return u.chain(math.sin(x), math.cos(x), -math.sin(x))
    if name == "cos":
        return u.chain(math.cos(x), -math.sin(x), -math.cos(x))
    if name == "tan":
        c = math.cos(x)
        if abs(c) < 1e-300:
            raise EvaluationDomainError(f"tan is singular at {x}")
        t = math.tan(x)
        sec2 = 1.0 / c**2
        return u.chain(t, sec2, 2.0 * t * sec2)
    if name == "exp":
        e = math.exp(x)
        return u.chain(e, e, e)
    if name == "log":
        if x <= 0.0:
            raise EvaluationDomainError(f"log of non-positive value {x}")
        return u.chain(math.log(x), 1.0 / x, -1.0 / x**2)
    if name == "sqrt":
        if x <= 0.0:
            raise EvaluationDomainError(f"sqrt is not differentiable at {x}")
        s = math.sqrt(x)
        return u.chain(s, 0.5 / s, -0.25 / (s * x))
    if name == "sinh":
        return u.chain(math.sinh(x), math.cosh(x), math.sinh(x))
    if name == "cosh":
        return u.chain(math.cosh(x), math.sinh(x), math.cosh(x))
    if name == "tanh":
        t = math.tanh(x)
        d = 1.0 - t * t
        return u.chain(t, d, -2.0 * t * d)
    raise EvaluationDomainError(f"unknown function {name!r}")


class JetOps:
    """Arithmetic table consumed by :func:`weylbridge.expr.evaluate`."""

    @staticmethod
    def const(x):
        return Jet2(x)

    @staticmethod
    def func(name, u):
        return jet_func(name, u)

    @staticmethod
    def power(base, exponent):
        return jet_power(base, exponent)

    @staticmethod
    def divide(a, b):
        return a / b


def seed(point) -> list:
    """Independent-variable jets at ``point``."""
    return [Jet2.variable(float(x), k) for k, x in enumerate(point)]
