"""Root-of-unity vectors, the quantum set, the level ``ell`` and the group <S_ell, T>."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable

import numpy as np

from .modular import SL2Matrix


class InvalidRootVector(ValueError):
    pass


class ClosureViolation(AssertionError):
    """A group element moved a quantum-set point outside the set."""


INFINITY = "infinity"


@dataclass(frozen=True)
class RootVector:
    """Distinct primitive roots of unity ``e(alpha_j / beta_j)``, stored as ``(alpha_j, beta_j)`` pairs."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        entries = tuple((int(a), int(b)) for a, b in self.entries)
        object.__setattr__(self, "entries", entries)
        for problem in self.problems():
            raise InvalidRootVector(problem)

    def problems(self) -> list[str]:
        out = []
        if len(self.entries) < 2:
            out.append(f"need at least 2 entries, got {len(self.entries)}")
        for j, (a, b) in enumerate(self.entries, 1):
            if b <= 0:
                out.append(f"beta_{j} = {b} must be positive")
                continue
            if math.gcd(a, b) != 1:
                out.append(f"gcd(alpha_{j}, beta_{j}) = {math.gcd(a, b)} != 1")
            if b < 3:
                out.append(f"beta_{j} = {b} must be at least 3")
        fr = [Fraction(a, b) for a, b in self.entries if b > 0]
        for r in range(len(fr)):
            for s in range(r + 1, len(fr)):
                if (fr[r] + fr[s]).denominator == 1 or (fr[r] - fr[s]).denominator == 1:
                    out.append(f"alpha_{r + 1}/beta_{r + 1} +- alpha_{s + 1}/beta_{s + 1} is an integer")
        return out

    @classmethod
    def parse(cls, text: str) -> "RootVector":
        """Parse ``"1/4,1/5"``."""
        pairs = []
        for tok in text.replace(" ", "").split(","):
            if not tok:
                continue
            a, _, b = tok.partition("/")
            if not b:
                raise InvalidRootVector(f"entry {tok!r} is not of the form a/b")
            pairs.append((int(a), int(b)))
        return cls(tuple(pairs))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def fractions(self) -> list[Fraction]:
        return [Fraction(a, b) for a, b in self.entries]

    @property
    def betas(self) -> list[int]:
        return [b for _, b in self.entries]

    def __str__(self) -> str:
        return ",".join(f"{a}/{b}" for a, b in self.entries)


def unchecked_root_vector(entries: Iterable[tuple[int, int]]) -> RootVector:
    """Build a vector without validation (used to report problems of bad input)."""
    obj = object.__new__(RootVector)
    object.__setattr__(obj, "entries", tuple((int(a), int(b)) for a, b in entries))
    return obj


def closest_integer(x: Fraction) -> int:
    """Nearest integer; exact half-integers round down."""
    x = Fraction(x)
    return math.ceil(x - Fraction(1, 2))


def quantum_set_violation(zeta: RootVector, x: Fraction) -> str | None:
    """Name the first violated membership condition, or ``None`` if ``x`` is in the set."""
    x = Fraction(x)
    k = x.denominator
    for j, (a, b) in enumerate(zeta.entries, 1):
        if k % b == 0:
            return f"beta_{j} divides k (beta_{j}={b}, k={k})"
    for j, (a, b) in enumerate(zeta.entries, 1):
        y = Fraction(a * k, b)
        if abs(y - closest_integer(y)) <= Fraction(1, 6):
            return f"distance of alpha_{j} k/beta_{j} to the nearest integer is {abs(y - closest_integer(y))} <= 1/6"
    return None


def is_in_quantum_set(zeta: RootVector, x: Fraction) -> bool:
    return quantum_set_violation(zeta, x) is None


def ell_of(zeta: RootVector) -> int:
    L = reduce(math.lcm, zeta.betas)
    return (2 if any(b % 3 == 0 for b in zeta.betas) else 6) * L * L


def apply_mobius(gamma: SL2Matrix, x: Fraction):
    """Exact ``(a x + b)/(c x + d)``; returns :data:`INFINITY` at the pole."""
    x = Fraction(x)
    num = gamma.a * x.numerator + gamma.b * x.denominator
    den = gamma.c * x.numerator + gamma.d * x.denominator
    if den == 0:
        return INFINITY
    return Fraction(num, den)


_LETTERS = {"S": ("S", 1), "s": ("S", -1), "T": ("T", 1), "t": ("T", -1)}


@dataclass(frozen=True)
class GroupWord:
    """A formal word in ``S_ell``, ``T`` and their inverses.

    Written as a string: ``S``/``T`` for the generators, ``s``/``t`` for their
    inverses; ``"TS"`` means the matrix product ``T @ S_ell``.  Words are never
    reduced.
    """

    letters: str
    ell: int = field(default=1)

    def __post_init__(self):
        bad = set(self.letters) - set(_LETTERS)
        if bad:
            raise ValueError(f"unknown letters {sorted(bad)} in word {self.letters!r}")

    def inverse(self) -> "GroupWord":
        return GroupWord("".join(c.swapcase() for c in reversed(self.letters)), self.ell)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        if self.ell != other.ell:
            raise ValueError("words at different levels")
        return GroupWord(self.letters + other.letters, self.ell)

    def __str__(self) -> str:
        return self.letters or "1"


def generator(letter: str, ell: int) -> SL2Matrix:
    name, power = _LETTERS[letter]
    if name == "S":
        return SL2Matrix(1, 0, power * ell, 1)
    return SL2Matrix(1, power, 0, 1)


def word_to_matrix(w: GroupWord) -> SL2Matrix:
    m = SL2Matrix.identity()
    for c in w.letters:
        m = m @ generator(c, w.ell)
    return m


@lru_cache(maxsize=16)
def quantum_pool(zeta: RootVector, kmax: int = 200, hmax: int = 200) -> tuple[Fraction, ...]:
    """All ``h/k`` in the quantum set with ``1 <= k <= kmax``, ``|h| <= hmax``."""
    out = []
    for k in range(1, kmax + 1):
        if quantum_set_violation(zeta, Fraction(0 if k == 1 else 1, k)) is not None:
            # membership depends only on k once gcd(h, k) = 1
            continue
        for h in range(-hmax, hmax + 1):
            if math.gcd(h, k) == 1:
                out.append(Fraction(h, k))
    return tuple(out)


@dataclass
class ClosureReport:
    zeta: str
    trials: int
    checked: int
    infinite: int
    violations: list[dict]
    seed: int

    def as_dict(self) -> dict:
        return dict(zeta=self.zeta, trials=self.trials, checked=self.checked,
                    infinite=self.infinite, violations=self.violations, seed=self.seed)


def random_word(rng: np.random.Generator, ell: int, max_len: int) -> GroupWord:
    length = int(rng.integers(1, max_len + 1))
    return GroupWord("".join(rng.choice(list("SsTt"), size=length)), ell)


def closure_fuzz(zeta: RootVector, trials: int = 500, max_word_len: int = 6, seed: int = 42,
                 raise_on_violation: bool = True) -> ClosureReport:
    """Check that random words in <S_ell, T> keep random pool points inside the quantum set.

    Each trial draws from its own child of ``SeedSequence(seed)``, so the report
    does not depend on how trials are scheduled.
    """
    ell = ell_of(zeta)
    pool = quantum_pool(zeta)
    children = np.random.SeedSequence(seed).spawn(trials)
    violations = []
    checked = infinite = 0
    for child in children:
        rng = np.random.default_rng(child)
        w = random_word(rng, ell, max_word_len)
        x = pool[int(rng.integers(len(pool)))]
        y = apply_mobius(word_to_matrix(w), x)
        if y == INFINITY:
            infinite += 1
            continue
        checked += 1
        why = quantum_set_violation(zeta, y)
        if why is not None:
            violations.append({"word": str(w), "x": str(x), "image": str(y), "reason": why})
    report = ClosureReport(str(zeta), trials, checked, infinite, violations, seed)
    if violations and raise_on_violation:
        raise ClosureViolation(f"{len(violations)} closure violations, first: {violations[0]}")
    return report
