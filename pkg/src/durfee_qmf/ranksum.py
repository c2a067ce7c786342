"""The rank generating function R_n for n-marked Durfee symbols.

Writing ``S_j = m_1 + ... + m_j`` the summand of ``R_n`` is::

    q^{S_n^2 + S_1 + ... + S_{n-1}}
    / ( P_1(S_1) * prod_{j>=2} C_j(S_j + 1) / C_j(S_{j-1}) )

with ``P_1(s) = prod_{i=1}^{s} (1 - x_1 q^i)(1 - q^i/x_1)`` and
``C_j(t) = prod_{i=1}^{t-1} (1 - x_j q^i)(1 - q^i/x_j)``.  Each factor depends on
a single ``S_j``, so the multisum collapses to a chain of one-dimensional sums
over ``S_1 <= S_2 <= ... <= S_n``: ``O(n S)`` work instead of ``O(S^n)``.  At a
root of unity ``q = e(h/k)`` the same chain runs over the finite index box
``0 < m_1 <= k``, ``0 <= m_j < k``, with the window sums taken as prefix-sum
differences.

The finite sums cancel heavily (terms of size ``e^{500}`` adding up to ``O(1)``
for ``k`` in the thousands), so every numeric evaluation runs in mpmath and the
working precision is raised until it exceeds the observed dynamic range.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .numerics import DomainError, TruncatedSeries, check_uhp
from .qseries import SingularInputError, pochhammer, r1_series
from .quantumset import RootVector, quantum_set_violation
from .zwegers import appell_a3

MAX_ORDER = 4000
GUARD_BITS = 64


class ResourceError(RuntimeError):
    """A truncation order above the configured cap would be needed."""


class IllConditionedError(ArithmeticError):
    pass


class UnusableSolutionError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# formal series


def _is_unit_int(x) -> bool:
    return isinstance(x, int) and x in (1, -1)


def rn_multisum(x: Sequence[complex], N: int) -> TruncatedSeries:
    """``R_n(x; q)`` as a q-expansion through ``q^N``.

    Multi-indices whose q-order provably exceeds ``N`` are pruned, so the
    enumeration is finite.  Coefficients are exact integers when every ``x_j`` is
    the integer ``1`` or ``-1``.  ``n = 1`` gives the rank generating function.
    """
    x = list(x)
    if not x:
        raise ValueError("need at least one variable")
    for j, xj in enumerate(x, 1):
        if xj == 0 or not cmath.isfinite(complex(xj)):
            raise SingularInputError(f"x_{j} = {xj} makes a denominator factor q^i/x_{j} undefined")
    if len(x) == 1:
        return r1_series(x[0], N)
    exact = all(_is_unit_int(v) for v in x)
    inv = [v if exact else 1 / complex(v) for v in x]
    n = len(x)
    total = TruncatedSeries([0], N, exact)

    def lower(j: int, sums: list[int]) -> int:
        # smallest q-order reachable once S_1..S_j are fixed (j is 1-based)
        s = sums[-1]
        return s * s + sum(sums[: n - 1]) + max(0, n - 1 - j) * s

    # depth-first over (m_1, ..., m_n); ``series`` holds 1/denominator so far
    stack = [(1, [], TruncatedSeries.one(N, exact), 0)]
    while stack:
        j, sums, series, prev = stack.pop()
        start = 1 if j == 1 else 0
        cur = series
        if j == 1:
            m = start
            s = prev + m
            cur = cur.div_one_minus(x[0], 1).div_one_minus(inv[0], 1)
        else:
            # (x_j q^{S_{j-1}}; q)_{m+1}: factors i = S_{j-1} .. S_{j-1} + m
            m = 0
            s = prev
            cur = cur.div_one_minus(x[j - 1], s).div_one_minus(inv[j - 1], s)
        while True:
            new = sums + [s]
            if lower(j, new) > N:
                break
            if j == n:
                expo = s * s + sum(new[: n - 1])
                total = total + cur.shift(expo)
            else:
                stack.append((j + 1, new, cur, s))
            m += 1
            s += 1
            cur = cur.div_one_minus(x[j - 1], s).div_one_minus(inv[j - 1], s)
    return total


# ---------------------------------------------------------------------------
# mpmath chain


@dataclass
class _ChainResult:
    value: object
    max_mag: float  # log2 of the largest quantity that entered a sum


def _log2abs(z) -> float:
    if z == 0:
        return -math.inf
    m, ex = mpmath.frexp(abs(z))
    return float(ex) + math.log2(float(m))


def _chain(qpow, qsq, xs, smax: int, k: int | None) -> _ChainResult:
    """Run the collapsed multisum.

    ``qpow(i)`` returns ``q^i``, ``qsq(s)`` returns ``q^{s^2}``.  ``k=None`` sums
    over all ``1 <= S_1 <= ... <= S_n <= smax``; an integer ``k`` restricts to the
    box ``S_1 <= k``, ``0 <= S_j - S_{j-1} <= k - 1``.
    """
    n = len(xs)
    inv = [1 / v for v in xs]
    top = smax + 2
    qp = [qpow(i) for i in range(top + 1)]
    # C[j][t] = prod_{i=1}^{t-1} (1 - x_j q^i)(1 - q^i / x_j), t = 0..top; C[j][0] unused
    C = []
    for j in range(n):
        row = [mpmath.mpc(1)] * (top + 1)
        acc = mpmath.mpc(1)
        for t in range(2, top + 1):
            i = t - 1
            acc = acc * (1 - xs[j] * qp[i]) * (1 - qp[i] * inv[j])
            row[t] = acc
        C.append(row)
    # P_1(s) = C[0][s + 1]
    maxmag = -math.inf
    lim1 = smax if k is None else min(smax, k)
    F = [mpmath.mpc(0)] * (top + 1)
    for s in range(1, lim1 + 1):
        F[s] = qp[s] * C[1][s] / C[0][s + 1]
        maxmag = max(maxmag, _log2abs(F[s]))
    hi = lim1
    for j in range(1, n):
        # window sums W(s) = sum_{s'} F[s'] with s - s' in [0, k - 1]
        pref = [mpmath.mpc(0)] * (top + 2)
        for s in range(1, top + 1):
            pref[s] = pref[s - 1] + F[s]
        new_hi = hi + (k - 1 if k is not None else smax)
        new_hi = min(new_hi, smax)
        G = [mpmath.mpc(0)] * (top + 1)
        last = j == n - 1
        total = mpmath.mpc(0)
        for s in range(1, new_hi + 1):
            lo = 0 if k is None else max(0, s - k)
            W = pref[min(s, hi)] - pref[min(lo, hi)]
            if W == 0:
                continue
            if last:
                term = qsq(s) / C[j][s + 1] * W
                total += term
                maxmag = max(maxmag, _log2abs(term))
            else:
                G[s] = qp[s] * C[j + 1][s] / C[j][s + 1] * W
                maxmag = max(maxmag, _log2abs(G[s]))
        if last:
            return _ChainResult(total, maxmag)
        F, hi = G, new_hi
    raise AssertionError("unreachable")


def _adaptive(run, start_bits: int = 80, max_bits: int = 1 << 16):
    """Evaluate ``run()`` at increasing precision until the dynamic range is covered.

    Returns ``(value, error_estimate, bits)``; the error estimate is the change
    between the final precision and ``GUARD_BITS/2`` bits more.
    """
    bits = start_bits
    while True:
        with mpmath.workprec(bits):
            res = run()
        v = res.value
        need = (res.max_mag - _log2abs(v) if v != 0 else res.max_mag) + GUARD_BITS + 20
        if not math.isfinite(need) or need <= bits:
            break
        bits = int(need) + 16
        if bits > max_bits:
            raise ArithmeticError(f"finite sum needs more than {max_bits} bits")
    with mpmath.workprec(bits + GUARD_BITS // 2):
        res2 = run()
    v1 = complex(res.value)
    v2 = complex(res2.value)
    return v2, abs(v2 - v1), bits


# ---------------------------------------------------------------------------
# finite sums at roots of unity


@dataclass
class RnEvaluation:
    value: complex
    mode: str
    term_count: int
    error_estimate: float
    precision_bits: int = 0
    geometric_ratios: list[float] = field(default_factory=list)
    order: int = 0

    def as_dict(self) -> dict:
        return dict(value=self.value, mode=self.mode, term_count=self.term_count,
                    error_estimate=self.error_estimate, precision_bits=self.precision_bits,
                    geometric_ratios=self.geometric_ratios, order=self.order)


def _root(frac: Fraction):
    """``e(frac)`` in the current mpmath context."""
    frac = Fraction(frac) % 1
    return mpmath.expjpi(2 * mpmath.mpf(frac.numerator) / frac.denominator)


def geometric_ratios(zeta: RootVector, k: int) -> list[float]:
    """``|((1 - x_j^k)(1 - x_j^{-k}))^{-1}| = 1/(2 - 2 cos(2 pi k alpha_j/beta_j))`` for each j."""
    out = []
    for a, b in zeta.entries:
        c = 2 - 2 * math.cos(2 * math.pi * ((a * k) % b) / b)
        out.append(math.inf if c == 0 else 1 / c)
    return out


def rn_finite_sum(zeta: RootVector, x: Fraction) -> RnEvaluation:
    """``R_n(zeta; e(h/k))`` as the exact finite sum over ``0 < m_1 <= k``, ``0 <= m_j < k``."""
    x = Fraction(x)
    why = quantum_set_violation(zeta, x)
    if why is not None:
        raise DomainError(f"{x} is not in the quantum set: {why}")
    h, k = x.numerator, x.denominator
    n = zeta.n
    ratios = geometric_ratios(zeta, k)
    for j, r in enumerate(ratios, 1):
        if not r < 1:
            raise AssertionError(f"geometric ratio {r} >= 1 for j={j} at {x}: invariant violated")
    fr = zeta.fractions

    def run():
        xs = [_root(f) for f in fr]
        table = [_root(Fraction(h * i, k)) for i in range(k)]

        def qpow(i):
            return table[i % k]

        def qsq(s):
            return table[(s * s) % k]

        res = _chain(qpow, qsq, xs, n * k, k)
        pref = mpmath.mpc(1)
        for f in fr:
            g = 1 / ((1 - _root(f * k)) * (1 - _root(-f * k)))
            pref *= 1 / (1 - g)
        return _ChainResult(res.value * pref, res.max_mag)

    value, err, bits = _adaptive(run)
    return RnEvaluation(value, "finite-sum", k**n, err, bits, ratios, k)


def a_n_at_rational(x: Fraction, zeta: RootVector) -> complex:
    """``A_n(x) = e(-x/24) R_n(zeta; e(x))`` for ``x`` in the quantum set."""
    x = Fraction(x)
    r = rn_finite_sum(zeta, x)
    return complex(_root(-x / 24)) * r.value


# ---------------------------------------------------------------------------
# inside the disc


def _xs_mp(x: Sequence[complex]):
    return [mpmath.mpc(complex(v)) for v in x]


def rn_value(x: Sequence[complex], q: complex, tol: float = 1e-15, smax: int | None = None,
             cap: int = MAX_ORDER) -> RnEvaluation:
    """Numeric ``R_n(x; q)`` for ``|q| < 1``.

    The total index ``S_n`` is truncated adaptively (doubling) until the last
    quarter of the contributions is below ``tol`` relative; ``cap`` bounds it.
    The reported ``order`` is the final ``S_n`` bound.
    """
    q = complex(q)
    if not abs(q) < 1:
        raise DomainError("|q| must be below 1")
    x = list(x)
    if len(x) < 2:
        raise ValueError("use r1_series for n = 1")
    S = smax or 16
    while True:
        if S > cap:
            raise ResourceError(f"R_n at |q|={abs(q):.6f} needs total index above the cap {cap}")

        def run(S=S):
            qm = mpmath.mpc(q)
            xs = _xs_mp(x)
            return _chain(lambda i: qm**i, lambda s: qm ** (s * s), xs, S, None)

        value, err, bits = _adaptive(run, start_bits=64)
        tail = _tail_bound(x, q, S, bits)
        if smax is not None or tail <= tol * max(abs(value), 1e-300):
            return RnEvaluation(value, "truncated-multisum", S, max(err, tail), bits, [], S)
        S *= 2


def _tail_bound(x, q, S, bits) -> float:
    """Size of the contributions with ``S_n`` in the last quarter of the range."""
    with mpmath.workprec(bits):
        qm = mpmath.mpc(q)
        xs = _xs_mp(x)
        full = _chain(lambda i: qm**i, lambda s: qm ** (s * s), xs, S, None).value
        part = _chain(lambda i: qm**i, lambda s: qm ** (s * s), xs, (3 * S) // 4, None).value
    return abs(complex(full - part))


def rn_value_tau(zeta: RootVector, tau: complex, tol: float = 1e-15) -> complex:
    tau = check_uhp(tau)
    xs = [cmath.exp(2j * math.pi * float(f)) for f in zeta.fractions]
    return rn_value(xs, cmath.exp(2j * math.pi * tau), tol).value


def a_n(tau: complex, zeta: RootVector) -> complex:
    """``A_n(tau) = e(-tau/24) R_n(zeta; e(tau))``."""
    tau = check_uhp(tau)
    return cmath.exp(-2j * math.pi * tau / 24) * rn_value_tau(zeta, tau)


def radial_limit_probe(zeta: RootVector, x: Fraction, heights: Sequence[float],
                       cap: int = MAX_ORDER) -> list[complex]:
    """``R_n(zeta; t e(x))`` for each radius ``t``; approaches the finite sum as ``t -> 1``."""
    x = Fraction(x)
    xs = [cmath.exp(2j * math.pi * float(f)) for f in zeta.fractions]
    out = []
    for t in heights:
        if not 0 < t < 1:
            raise DomainError(f"radius {t} outside (0, 1)")
        q = t * cmath.exp(2j * math.pi * float(x % 1))
        out.append(rn_value(xs, q, tol=1e-12, cap=cap).value)
    return out


# ---------------------------------------------------------------------------
# Appell decomposition constants


def root_coefficients(zeta: RootVector) -> list[complex]:
    """``zeta_{2 beta}^{-3 alpha} - zeta_{2 beta}^{-alpha}`` for each entry."""
    return [complex(_root(Fraction(-3 * a, 2 * b)) - _root(Fraction(-a, 2 * b))) for a, b in zeta.entries]


@dataclass
class PiDaggerSolution:
    """Numerically fitted decomposition ``(q)_inf R_n = sum_j c_j A_3(alpha_j/beta_j, -2 tau; tau) + kappa (q)_inf``.

    ``literal_residual`` is the held-out defect of the fit without ``kappa``.
    """

    zeta: RootVector
    c: list[complex]
    pi_dagger: list[complex]
    kappa: complex
    residual: float
    literal_residual: float
    sample_count: int
    condition: float
    stability: float = math.nan
    threshold: float = 1e-7

    @property
    def usable(self) -> bool:
        return self.residual < self.threshold

    @property
    def K(self) -> complex:
        """``sum_j c_j e(3 alpha_j / (2 beta_j))``."""
        return sum(cj * complex(_root(Fraction(3 * a, 2 * b)))
                   for cj, (a, b) in zip(self.c, self.zeta.entries))

    def as_dict(self) -> dict:
        return dict(zeta=str(self.zeta), c_j=self.c, pi_dagger_j=self.pi_dagger, kappa=self.kappa,
                    residual=self.residual, literal_residual=self.literal_residual,
                    sample_count=self.sample_count, condition=self.condition,
                    stability=self.stability, usable=self.usable)


def default_taus(count: int, seed: int = 0) -> list[complex]:
    rng = np.random.default_rng(seed)
    re = rng.uniform(-0.5, 0.5, count)
    im = rng.uniform(0.4, 1.5, count)
    return [complex(a, b) for a, b in zip(re, im)]


def _design(zeta: RootVector, taus: Sequence[complex]):
    rows, rhs, qinf = [], [], []
    xs = [cmath.exp(2j * math.pi * float(f)) for f in zeta.fractions]
    for t in taus:
        q = cmath.exp(2j * math.pi * t)
        p = pochhammer(q, q)
        rows.append([appell_a3(float(f), -2 * t, t) for f in zeta.fractions])
        qinf.append(p)
        rhs.append(p * rn_value(xs, q).value)
    return np.array(rows), np.array(rhs), np.array(qinf)


def _fit(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    sv = np.linalg.svd(A, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    return sol, cond


def _defect(A: np.ndarray, sol: np.ndarray, b: np.ndarray) -> float:
    """Largest held-out defect, relative to the largest single term of its row.

    ``R_n = O(q^2)`` is much smaller than the individual Appell terms high in H,
    so dividing by ``|b|`` alone would only measure double-precision cancellation.
    """
    terms = np.abs(A * sol[None, :])
    scale = np.maximum(np.abs(b), terms.max(axis=1))
    return float(np.max(np.abs(A @ sol - b) / scale))


def solve_pi_dagger(zeta: RootVector, taus: Sequence[complex] | None = None, held_out: int = 4,
                    threshold: float = 1e-7, check_stability: bool = True) -> PiDaggerSolution:
    """Fit the Appell decomposition of ``(q)_inf R_n`` on sample points ``taus``.

    A fit with only the ``n`` Appell coefficients does not close numerically;
    one more unknown ``kappa`` multiplying ``(q)_inf`` does, because
    ``A_3(u, -2tau) = e(u) A_3(u, -tau) + e(3u/2) (q)_inf``.  The fit without it is
    reported as ``literal_residual``.  The last
    ``held_out`` points are not used in the fit and measure the residual.
    """
    n = zeta.n
    if taus is None:
        taus = default_taus(2 * n + 4 + held_out)
    taus = [check_uhp(t) for t in taus]
    if len(taus) - held_out < 2 * n:
        raise ValueError(f"need at least {2 * n} fitting points plus {held_out} held out")
    if len(set(taus)) != len(taus):
        raise ValueError("sample points must be distinct")
    for t in taus:
        if not 0.4 <= t.imag <= 1.5:
            raise ValueError(f"sample {t} has Im outside [0.4, 1.5]")
    A, b, qinf = _design(zeta, taus)
    fit_n = len(taus) - held_out
    Aug = np.column_stack([A, qinf])
    sol, cond = _fit(Aug[:fit_n], b[:fit_n])
    if cond > 1e8:
        raise IllConditionedError(f"condition number {cond:.3e} > 1e8; use more or better spread samples")
    residual = _defect(Aug[fit_n:], sol, b[fit_n:])
    lit, _ = _fit(A[:fit_n], b[:fit_n])
    literal = _defect(A[fit_n:], lit, b[fit_n:])
    c = [complex(v) for v in sol[:n]]
    coeffs = root_coefficients(zeta)
    out = PiDaggerSolution(zeta, c, [cf / cj for cf, cj in zip(coeffs, c)], complex(sol[n]),
                           residual, literal, len(taus), cond, threshold=threshold)
    if check_stability:
        seed = 1
        while set(extra := default_taus(len(taus), seed=seed)) & set(taus):
            seed += 1
        more = solve_pi_dagger(zeta, list(taus) + extra, held_out, threshold, check_stability=False)
        out.stability = max(abs(a - b) / abs(a) for a, b in zip(out.c, more.c))
    if not out.usable:
        raise UnusableSolutionError(f"held-out residual {residual:.3e} above {threshold:.1e}")
    return out
