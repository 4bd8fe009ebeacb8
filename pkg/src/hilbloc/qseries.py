"""Truncated q-series with exact rational coefficients.

The central closed form is the eta-product power

    eta_power(x, N) = prod_{n>=1} (1 - q^n)^(-x)   (mod q^(N+1)),

where the exponent x may be any rational number: each factor is expanded by
the generalized binomial series (1-u)^(-x) = sum_k x(x+1)...(x+k-1)/k! u^k.
At x = 1 the coefficients are the partition numbers; integer exponents count
torus-fixed points on punctual Hilbert schemes chart by chart.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

__all__ = ["QSeries", "eta_power"]


class QSeries:
    """Power series in q truncated at a fixed order, exact coefficients."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Sequence, order: int | None = None):
        coeffs = [Fraction(c) for c in coeffs]
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("order must be nonnegative")
        coeffs = coeffs[: order + 1]
        coeffs += [Fraction(0)] * (order + 1 - len(coeffs))
        self.order = order
        self.coeffs = tuple(coeffs)

    @classmethod
    def one(cls, order: int) -> "QSeries":
        return cls([Fraction(1)], order)

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QSeries)
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def _require_same_order(self, other: "QSeries") -> None:
        if self.order != other.order:
            raise ValueError("truncation orders differ")

    def __mul__(self, other: "QSeries") -> "QSeries":
        self._require_same_order(other)
        n = self.order
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return QSeries(out, n)

    def __truediv__(self, other: "QSeries") -> "QSeries":
        """Truncated quotient; the divisor needs a nonzero constant term."""
        self._require_same_order(other)
        if other.coeffs[0] == 0:
            raise ZeroDivisionError("division by a series with zero constant term")
        n = self.order
        inv0 = 1 / other.coeffs[0]
        out = [Fraction(0)] * (n + 1)
        for k in range(n + 1):
            acc = self.coeffs[k]
            for j in range(1, k + 1):
                acc -= other.coeffs[j] * out[k - j]
            out[k] = acc * inv0
        return QSeries(out, n)

    def truncate(self, order: int) -> "QSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return QSeries(self.coeffs[: order + 1], order)

    def first_difference(self, other: "QSeries") -> int | None:
        """Index of the first differing coefficient, or None if equal."""
        self._require_same_order(other)
        for k, (a, b) in enumerate(zip(self.coeffs, other.coeffs)):
            if a != b:
                return k
        return None

    def __repr__(self) -> str:
        bits = [str(self.coeffs[0])]
        for k in range(1, self.order + 1):
            c = self.coeffs[k]
            if c:
                q = "q" if k == 1 else f"q^{k}"
                bits.append(q if c == 1 else f"{c}*{q}")
        return " + ".join(bits) + f" + O(q^{self.order + 1})"


def _binomial_factor(x: Fraction, n: int, order: int) -> list[Fraction]:
    """Coefficients of (1 - q^n)^(-x) truncated at the given order."""
    out = [Fraction(0)] * (order + 1)
    out[0] = Fraction(1)
    term = Fraction(1)
    k = 0
    while (k + 1) * n <= order:
        term = term * (x + k) / (k + 1)  # rising factorial / k!
        k += 1
        out[k * n] = term
    return out


def eta_power(x, order: int) -> QSeries:
    """Exact expansion of prod_{n=1}^{order} (1 - q^n)^(-x) to the given order."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    x = Fraction(x)
    result = QSeries.one(order)
    for n in range(1, order + 1):
        result = result * QSeries(_binomial_factor(x, n, order), order)
    return result
