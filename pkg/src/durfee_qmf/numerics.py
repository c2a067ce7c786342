"""Scalar helpers, truncated power series, quadrature engines and the error function E.

Scalars are plain Python/numpy ``complex`` (double precision); exact rationals are
:class:`fractions.Fraction`.  Every function here is pure.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import special

MAX_NODES = 2**20
SQRT_PI = math.sqrt(math.pi)


class QuadratureError(ArithmeticError):
    """Raised when a quadrature rule exhausts its refinement budget."""

    def __init__(self, message: str, estimate: float):
        super().__init__(f"{message} (last error estimate {estimate:.3e})")
        self.estimate = estimate


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class PrecisionError(ArithmeticError):
    """A series cannot reach double precision at the requested point."""


def e(x):
    """``exp(2 pi i x)``; works on scalars and arrays."""
    return np.exp(2j * np.pi * x)


def e_frac(x: Fraction) -> complex:
    """``e(x)`` for an exact rational, reduced mod 1 before the exponential."""
    x = x - math.floor(x)
    return cmath.exp(2j * math.pi * float(x))


def frac_mul(k, x: float) -> np.ndarray:
    """``(k * x) mod 1`` for integer ``k`` (|k| < 2**26) without the float error of ``k*x``.

    ``x`` is split into a 26-bit head, whose products with ``k`` are exact, and a
    small tail.
    """
    k = np.asarray(k, dtype=float)
    hi = math.ldexp(round(math.ldexp(x, 26)), -26) if abs(x) < 2**26 else x
    lo = x - hi
    return np.mod(np.mod(k * hi, 1.0) + k * lo, 1.0)


def check_uhp(tau) -> complex:
    tau = complex(tau)
    if not (tau.imag > 0) or not cmath.isfinite(tau):
        raise DomainError(f"tau={tau} is not in the upper half-plane")
    return tau


def csqrt(z) -> complex:
    """Principal square root, argument in (-pi/2, pi/2]."""
    return cmath.sqrt(complex(z))


def cpow(z, p: float) -> complex:
    """Principal branch ``z**p``."""
    z = complex(z)
    if z == 0:
        return 0j
    return cmath.exp(p * cmath.log(z))


def E_func(z):
    """``E(z) = 2 * integral_0^z exp(-pi t^2) dt = erf(sqrt(pi) z)``."""
    return special.erf(SQRT_PI * np.asarray(z, dtype=complex if np.iscomplexobj(z) else float))


def sgn_minus_E(nu: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(mantissa, gaussian_exponent)`` with ``sgn(nu) - E(x) = mantissa * exp(gaussian_exponent)``.

    ``x`` is real.  When ``nu`` and ``x`` share a sign the difference is an erfc tail
    and is returned in scaled form (``erfcx``) so callers can merge the Gaussian
    factor with other exponentials before exponentiating.
    """
    s = np.sign(nu)
    same = (s * x) > 0
    ax = SQRT_PI * np.abs(x)
    mant = np.where(same, s * special.erfcx(ax), s - special.erf(SQRT_PI * x))
    expo = np.where(same, -ax * ax, 0.0)
    return mant, expo


# ---------------------------------------------------------------------------
# truncated power series


class TruncatedSeries:
    """Power series ``sum_{n<=order} c_n q^n``.

    ``exact`` series hold Python ints (numpy object arrays); otherwise coefficients
    are complex128.  Arithmetic never reports coefficients beyond the smaller order.
    """

    __slots__ = ("coeffs", "order", "exact")

    def __init__(self, coeffs: Sequence, order: int | None = None, exact: bool | None = None):
        if exact is None:
            exact = all(isinstance(c, (int, np.integer)) for c in coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("order must be non-negative")
        if exact:
            arr = np.zeros(order + 1, dtype=object)
            arr[:] = 0
            for i, c in enumerate(list(coeffs)[: order + 1]):
                arr[i] = int(c)
        else:
            arr = np.zeros(order + 1, dtype=complex)
            src = np.asarray(coeffs, dtype=complex)[: order + 1]
            arr[: len(src)] = src
        self.coeffs = arr
        self.order = order
        self.exact = exact

    @classmethod
    def one(cls, order: int, exact: bool = True) -> "TruncatedSeries":
        return cls([1], order, exact)

    @classmethod
    def monomial(cls, power: int, order: int, coeff=1, exact: bool = True) -> "TruncatedSeries":
        c = [0] * (order + 1)
        if power <= order:
            c[power] = coeff
        return cls(c, order, exact and isinstance(coeff, int))

    def __len__(self) -> int:
        return self.order + 1

    def __getitem__(self, n: int):
        if n < 0 or n > self.order:
            raise IndexError(f"coefficient {n} outside order {self.order}")
        return self.coeffs[n]

    def __iter__(self):
        return iter(self.coeffs)

    def tolist(self) -> list:
        return list(self.coeffs)

    def __repr__(self) -> str:
        shown = ", ".join(str(c) for c in self.coeffs[:8])
        return f"TruncatedSeries([{shown}{', ...' if self.order >= 8 else ''}], order={self.order})"

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        exact = isinstance(other, (int, np.integer))
        return TruncatedSeries([other], self.order, exact)

    def _combine_dtype(self, other: "TruncatedSeries", n: int):
        exact = self.exact and other.exact
        a = self.coeffs[: n + 1]
        b = other.coeffs[: n + 1]
        if not exact:
            a = a.astype(complex)
            b = b.astype(complex)
        return a, b, exact

    def __add__(self, other) -> "TruncatedSeries":
        other = self._coerce(other)
        n = min(self.order, other.order)
        a, b, exact = self._combine_dtype(other, n)
        return TruncatedSeries(a + b, n, exact)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(-self.coeffs, self.order, self.exact)

    def __sub__(self, other) -> "TruncatedSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TruncatedSeries":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        n = min(self.order, other.order)
        a, b, exact = self._combine_dtype(other, n)
        return TruncatedSeries(np.convolve(a, b)[: n + 1], n, exact)

    def __rmul__(self, other) -> "TruncatedSeries":
        return self.scale(other)

    def scale(self, c) -> "TruncatedSeries":
        exact = self.exact and isinstance(c, (int, np.integer))
        arr = self.coeffs * c if exact else self.coeffs.astype(complex) * complex(c)
        return TruncatedSeries(arr, self.order, exact)

    def shift(self, power: int) -> "TruncatedSeries":
        """Multiply by ``q**power`` (power >= 0), keeping the order."""
        out = np.zeros_like(self.coeffs)
        if self.exact:
            out[:] = 0
        if power <= self.order:
            out[power:] = self.coeffs[: self.order + 1 - power]
        return TruncatedSeries(out, self.order, self.exact)

    def div_one_minus(self, c, power: int) -> "TruncatedSeries":
        """Divide by ``(1 - c q**power)`` with ``power >= 1``."""
        if power < 1:
            raise ValueError("power must be >= 1 for a formal inverse")
        exact = self.exact and isinstance(c, (int, np.integer))
        out = self.coeffs.copy() if exact else self.coeffs.astype(complex)
        cc = int(c) if exact else complex(c)
        for n in range(power, self.order + 1):
            out[n] = out[n] + cc * out[n - power]
        return TruncatedSeries(out, self.order, exact)

    def mul_one_minus(self, c, power: int) -> "TruncatedSeries":
        """Multiply by ``(1 - c q**power)``."""
        exact = self.exact and isinstance(c, (int, np.integer))
        src = self.coeffs if exact else self.coeffs.astype(complex)
        out = src.copy()
        cc = int(c) if exact else complex(c)
        if power == 0:
            return TruncatedSeries(src * (1 - cc), self.order, exact)
        out[power:] = src[power:] - cc * src[: self.order + 1 - power]
        return TruncatedSeries(out, self.order, exact)

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse; exact only when the constant term is +-1."""
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        exact = self.exact and c0 in (1, -1)
        a = self.coeffs if exact else self.coeffs.astype(complex)
        out = np.zeros_like(a)
        if exact:
            out[:] = 0
        out[0] = (c0 if exact else 1 / complex(c0))
        for n in range(1, self.order + 1):
            acc = 0
            for i in range(1, n + 1):
                acc = acc + a[i] * out[n - i]
            out[n] = -acc * out[0]
        return TruncatedSeries(out, self.order, exact)

    def evaluate(self, q: complex) -> complex:
        return complex(np.polyval(self.coeffs[::-1].astype(complex), q))

    def equals(self, other: "TruncatedSeries", upto: int | None = None) -> bool:
        n = min(self.order, other.order) if upto is None else upto
        return all(self.coeffs[i] == other.coeffs[i] for i in range(n + 1))


# ---------------------------------------------------------------------------
# quadrature


def quad_gaussian_line(f: Callable[[np.ndarray], np.ndarray], tol: float = 1e-12,
                       center: float = 0.0, max_nodes: int = MAX_NODES) -> tuple[complex, float]:
    """Integrate ``f`` over the real line by the trapezoidal rule.

    ``f`` takes a real numpy array and must decay at least like a Gaussian. The
    truncation half-width ``T`` grows until the sampled envelope beyond ``T`` is
    below ``tol/10`` per unit length; the step is halved until two successive
    estimates agree to ``tol``.  Returns ``(value, error_estimate)``.
    """
    T = 2.0
    while True:
        probe = center + np.concatenate([np.linspace(T, 3 * T, 41), -np.linspace(T, 3 * T, 41)])
        env = np.abs(np.asarray(f(probe)))
        if np.all(np.isfinite(env)) and env.max() * 2 * T < tol / 10:
            break
        T *= 1.5
        if T > 1e6:
            raise QuadratureError("integrand does not decay on the real line", math.inf)

    n = 64
    h = 2 * T / n
    t = center - T + h * np.arange(n + 1)
    vals = np.asarray(f(t), dtype=complex)
    total = vals.sum() - 0.5 * (vals[0] + vals[-1])
    estimate = h * total
    err = math.inf
    while n < max_nodes:
        mids = center - T + h * (np.arange(n) + 0.5)
        total = total + np.asarray(f(mids), dtype=complex).sum()
        n *= 2
        h /= 2
        new = h * total
        err = abs(new - estimate)
        estimate = new
        if err <= tol and n >= 256:
            return complex(estimate), float(err)
    raise QuadratureError("trapezoidal refinement budget exhausted", err)


def _de_nodes(level_h: float, umax: float, offset: bool) -> np.ndarray:
    start = level_h / 2 if offset else 0.0
    k = np.arange(math.floor((umax - start) / level_h) + 1)
    pos = start + level_h * k
    return np.concatenate([-pos[::-1], pos]) if offset else np.concatenate([-pos[:0:-1], pos])


def quad_vertical_ray(f: Callable[[np.ndarray], np.ndarray], base: float, tol: float = 1e-12,
                      height: float | None = None, scale: float = 1.0,
                      max_nodes: int = MAX_NODES) -> tuple[complex, float]:
    """Integrate ``f(z) dz`` along ``z = base + i t`` for ``t`` in ``(0, height)``.

    ``height=None`` means the infinite ray.  Uses double-exponential nodes:
    exp-sinh for the infinite ray, tanh-sinh for a finite segment, so an integrable
    singularity at ``t = 0`` costs nothing extra.  ``scale`` sets the centre of
    the exp-sinh map and should roughly match where the integrand lives.
    Returns ``(value, error_estimate)``; ``f`` receives a complex array.
    """
    if height is None:
        def phi(u):
            s = 0.5 * math.pi * np.sinh(u)
            t = scale * np.exp(s)
            return t, 0.5 * math.pi * np.cosh(u) * t
    else:
        L = float(height)

        def phi(u):
            s = 0.5 * math.pi * np.sinh(u)
            # t = L/2 (1 + tanh s), written to keep relative accuracy near t = 0
            t = L / (1.0 + np.exp(-2.0 * s))
            w = L * 0.5 * math.pi * np.cosh(u) / (2.0 * np.cosh(s) ** 2)
            return t, w

    def g(u):
        t, w = phi(u)
        ok = (t > 0) & np.isfinite(t) & (w > 0)
        out = np.zeros(u.shape, dtype=complex)
        if np.any(ok):
            out[ok] = np.asarray(f(base + 1j * t[ok]), dtype=complex) * w[ok]
        out[~np.isfinite(out)] = 0.0
        return 1j * out

    umax = 6.5 if height is None else 4.5
    h = 0.5
    u = _de_nodes(h, umax, offset=False)
    vals = g(u)
    total = vals.sum()
    estimate = h * total
    nodes = len(u)
    err = math.inf
    while nodes < max_nodes:
        mids = _de_nodes(h, umax, offset=True)
        total = total + g(mids).sum()
        nodes += len(mids)
        h /= 2
        new = h * total
        err = abs(new - estimate)
        estimate = new
        if err <= tol and h <= 1 / 16:
            return complex(estimate), float(err)
    raise QuadratureError("double-exponential refinement budget exhausted", err)
