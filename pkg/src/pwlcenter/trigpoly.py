"""Real trigonometric polynomials on the period [0, 2*pi).

A ``TrigPoly`` stores ``a0 + sum_k cos_k cos(kt) + sin_k sin(kt)``. Products
are computed by convolving the complex exponential coefficients, which is the
product-to-sum expansion in disguise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import AllConstant, IdenticallyZero

TWO_PI = 2.0 * math.pi

COEFF_TOL = 1e-12
ROOT_TOL = 1e-10
SIMPLE_TOL = 1e-8


def _trim(values: Sequence[float], tol: float) -> tuple:
    vals = list(values)
    while vals and abs(vals[-1]) < tol:
        vals.pop()
    return tuple(float(v) for v in vals)


@dataclass(frozen=True)
class TrigPoly:
    """Real trigonometric polynomial with aligned cosine/sine coefficient tuples.

    ``cos[k-1]`` and ``sin[k-1]`` hold the coefficients of harmonic ``k``.
    Trailing harmonics with both coefficients below ``COEFF_TOL`` are dropped.
    """

    a0: float = 0.0
    cos: tuple = ()
    sin: tuple = ()

    def __post_init__(self):
        c = [float(v) for v in self.cos]
        s = [float(v) for v in self.sin]
        n = max(len(c), len(s))
        c += [0.0] * (n - len(c))
        s += [0.0] * (n - len(s))
        while n and abs(c[n - 1]) < COEFF_TOL and abs(s[n - 1]) < COEFF_TOL:
            n -= 1
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "cos", tuple(c[:n]))
        object.__setattr__(self, "sin", tuple(s[:n]))

    # constructors

    @classmethod
    def constant(cls, c: float) -> "TrigPoly":
        return cls(a0=c)

    @classmethod
    def cos_k(cls, k: int, scale: float = 1.0) -> "TrigPoly":
        if k == 0:
            return cls(a0=scale)
        return cls(cos=[0.0] * (k - 1) + [scale])

    @classmethod
    def sin_k(cls, k: int, scale: float = 1.0) -> "TrigPoly":
        return cls(sin=[0.0] * (k - 1) + [scale])

    @classmethod
    def from_exp(cls, c: np.ndarray) -> "TrigPoly":
        """Build from exponential coefficients ``c[j]`` of ``e^{i(j-n)t}``, ``len(c) = 2n+1``.

        The imaginary residue of a non-Hermitian input is discarded.
        """
        c = np.asarray(c, dtype=complex)
        n = (len(c) - 1) // 2
        pos = c[n + 1:]
        neg = c[:n][::-1]
        # a_k = w_k + w_-k, b_k = i (w_k - w_-k)
        cos = (pos + neg).real
        sin = (1j * (pos - neg)).real
        return cls(a0=c[n].real, cos=cos, sin=sin)

    @classmethod
    def from_dict(cls, d: dict) -> "TrigPoly":
        return cls(a0=d.get("a0", 0.0), cos=d.get("cos", ()), sin=d.get("sin", ()))

    def to_dict(self) -> dict:
        return {"a0": self.a0, "cos": list(self.cos), "sin": list(self.sin)}

    # structure

    @property
    def degree(self) -> int:
        return len(self.cos)

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    def is_zero(self, tol: float = COEFF_TOL) -> bool:
        return self.degree == 0 and abs(self.a0) < tol

    def exp_coeffs(self, n: int | None = None) -> np.ndarray:
        """Coefficients of ``e^{ikt}`` for ``k = -n..n`` (length ``2n+1``)."""
        n = self.degree if n is None else n
        c = np.zeros(2 * n + 1, dtype=complex)
        c[n] = self.a0
        d = min(n, self.degree)
        a = np.asarray(self.cos[:d])
        b = np.asarray(self.sin[:d])
        c[n + 1:n + 1 + d] = (a - 1j * b) / 2
        c[n - d:n][::-1] = (a + 1j * b) / 2
        return c

    def real_vector(self, n: int) -> np.ndarray:
        """``[a0, cos_1..cos_n, sin_1..sin_n]`` zero-padded to degree ``n``."""
        v = np.zeros(2 * n + 1)
        v[0] = self.a0
        d = min(n, self.degree)
        v[1:1 + d] = self.cos[:d]
        v[1 + n:1 + n + d] = self.sin[:d]
        return v

    def max_abs_coeff(self) -> float:
        return float(max([abs(self.a0), *map(abs, self.cos), *map(abs, self.sin)]))

    # evaluation

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.a0)
        for k, (ck, sk) in enumerate(zip(self.cos, self.sin), start=1):
            out = out + ck * np.cos(k * t) + sk * np.sin(k * t)
        return out if out.ndim else float(out)

    # arithmetic

    def __add__(self, other):
        if not isinstance(other, TrigPoly):
            return TrigPoly(self.a0 + other, self.cos, self.sin)
        n = max(self.degree, other.degree)
        v = self.real_vector(n) + other.real_vector(n)
        return TrigPoly(v[0], v[1:n + 1], v[n + 1:])

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly(-self.a0, [-c for c in self.cos], [-s for s in self.sin])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TrigPoly):
            other = float(other)
            return TrigPoly(self.a0 * other, [c * other for c in self.cos],
                            [s * other for s in self.sin])
        return TrigPoly.from_exp(np.convolve(self.exp_coeffs(), other.exp_coeffs()))

    __rmul__ = __mul__

    def __truediv__(self, other: float):
        return self * (1.0 / other)

    def __pow__(self, m: int):
        out = TrigPoly.constant(1.0)
        for _ in range(m):
            out = out * self
        return out

    def almost_equal(self, other: "TrigPoly", tol: float = 1e-12) -> bool:
        return coeff_distance(self, other) < tol

    def derivative(self) -> "TrigPoly":
        return derivative(self)

    def antiderivative(self) -> "DriftTrigPoly":
        return antiderivative(self)

    def __repr__(self):
        terms = [f"{self.a0:.6g}"]
        for k, (c, s) in enumerate(zip(self.cos, self.sin), start=1):
            if c:
                terms.append(f"{c:+.6g}cos({k}t)")
            if s:
                terms.append(f"{s:+.6g}sin({k}t)")
        return f"TrigPoly({' '.join(terms)})"


@dataclass(frozen=True)
class DriftTrigPoly:
    """``drift * t + trig(t)``; the antiderivative of a TrigPoly with nonzero mean."""

    drift: float
    trig: TrigPoly

    def __call__(self, t):
        out = self.drift * np.asarray(t, dtype=float) + self.trig(t)
        return out if np.ndim(out) else float(out)

    def derivative(self) -> TrigPoly:
        return derivative(self.trig) + self.drift

    def is_periodic(self, tol: float = 1e-10) -> bool:
        return abs(self.drift) < tol


@dataclass(frozen=True)
class RealPoly:
    """Real polynomial, ascending coefficients."""

    coeffs: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs, COEFF_TOL))

    @property
    def degree(self) -> int:
        # zero polynomial reports -1
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        if not self.coeffs:
            return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def derivative(self) -> "RealPoly":
        if len(self.coeffs) <= 1:
            return RealPoly(())
        return RealPoly(np.polynomial.polynomial.polyder(self.coeffs))

    def antiderivative(self) -> "RealPoly":
        if not self.coeffs:
            return RealPoly(())
        return RealPoly(np.polynomial.polynomial.polyint(self.coeffs))

    def to_list(self) -> list:
        return list(self.coeffs)


def coeff_distance(p: TrigPoly, q: TrigPoly) -> float:
    """Max absolute coefficient difference."""
    n = max(p.degree, q.degree)
    return float(np.max(np.abs(p.real_vector(n) - q.real_vector(n))))


def evaluate(p, t):
    return p(t)


def add(p: TrigPoly, q: TrigPoly) -> TrigPoly:
    return p + q


def multiply(p: TrigPoly, q: TrigPoly) -> TrigPoly:
    return p * q


def derivative(p: TrigPoly) -> TrigPoly:
    k = np.arange(1, p.degree + 1)
    return TrigPoly(0.0, k * np.asarray(p.sin), -k * np.asarray(p.cos))


def antiderivative(p: TrigPoly) -> DriftTrigPoly:
    """Antiderivative vanishing at t = 0; the mean of ``p`` becomes the drift."""
    k = np.arange(1, p.degree + 1)
    cos = -np.asarray(p.sin) / k
    sin = np.asarray(p.cos) / k
    return DriftTrigPoly(p.a0, TrigPoly(-float(np.sum(cos)), cos, sin))


def compose_poly(P: RealPoly, h: TrigPoly) -> TrigPoly:
    """``P(h(t))`` by Horner's rule in the trigonometric ring."""
    out = TrigPoly()
    for c in reversed(P.coeffs):
        out = out * h + c
    return out


def time_shift(p: TrigPoly, tau: float) -> TrigPoly:
    """Return ``t -> p(t + tau)``."""
    k = np.arange(1, p.degree + 1)
    c, s = np.cos(k * tau), np.sin(k * tau)
    a, b = np.asarray(p.cos), np.asarray(p.sin)
    return TrigPoly(p.a0, a * c + b * s, b * c - a * s)


def compress(p: TrigPoly, k: int) -> TrigPoly:
    """Inverse of :func:`expand`; only harmonics divisible by ``k`` are kept."""
    return TrigPoly(p.a0, p.cos[k - 1::k], p.sin[k - 1::k])


def expand(p: TrigPoly, k: int) -> TrigPoly:
    """Return ``t -> p(k t)``."""
    cos = np.zeros(p.degree * k)
    sin = np.zeros(p.degree * k)
    cos[k - 1::k] = p.cos
    sin[k - 1::k] = p.sin
    return TrigPoly(p.a0, cos, sin)


def fourier_support_gcd(ps: Iterable[TrigPoly], tol: float = COEFF_TOL) -> int:
    """Largest k such that every input is 2*pi/k periodic."""
    idx = [k for p in ps for k, (c, s) in enumerate(zip(p.cos, p.sin), start=1)
           if abs(c) >= tol or abs(s) >= tol]
    if not idx:
        raise AllConstant("every input is constant")
    return reduce(math.gcd, idx)


@dataclass(frozen=True)
class Zero:
    t: float
    simple: bool
    multiplicity: int = 1


def zeros_on_period(p: TrigPoly, root_tol: float = ROOT_TOL,
                    simple_tol: float = SIMPLE_TOL) -> list:
    """All zeros of ``p`` in [0, 2*pi) as a sorted list of :class:`Zero`.

    Roots come from the unit-circle roots of the associated Laurent polynomial.
    """
    from .laurent import trig_to_laurent, unit_circle_roots

    if p.is_zero():
        raise IdenticallyZero("polynomial is identically zero")
    if p.is_constant:
        return []
    return unit_circle_roots(trig_to_laurent(p), root_tol=root_tol,
                             simple_tol=simple_tol)
