"""Complex Laurent polynomials and the trig <-> Laurent correspondence.

Under ``z = e^{it}`` a real trigonometric polynomial becomes a Laurent
polynomial with ``w[-k] == conj(w[k])``; those form the subring called ``A``
below. Real zeros of the trig polynomial are the unit-circle roots of
``z^n p(z)``, found here with an Aberth-Ehrlich simultaneous iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IdenticallyZero, NotInA
from .trigpoly import COEFF_TOL, ROOT_TOL, SIMPLE_TOL, TWO_PI, TrigPoly, Zero

A_TOL = 1e-12
UNIT_TOL = 1e-8
CLUSTER_RADIUS = 1e-7
LOOSE_RADIUS = 2e-2
MAX_ITER = 200


@dataclass(frozen=True)
class LaurentPoly:
    """Sparse map ``exponent -> complex coefficient``."""

    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(k): complex(v) for k, v in self.coeffs.items() if abs(v) >= COEFF_TOL}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @property
    def degree(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int) -> complex:
        return self.coeffs.get(k, 0j)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for k, w in self.coeffs.items():
            out = out + w * z ** k
        return out if out.ndim else complex(out)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        d = dict(self.coeffs)
        for k, w in other.coeffs.items():
            d[k] = d.get(k, 0j) + w
        return LaurentPoly(d)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return LaurentPoly({k: w * other for k, w in self.coeffs.items()})
        d = {}
        for k1, w1 in self.coeffs.items():
            for k2, w2 in other.coeffs.items():
                d[k1 + k2] = d.get(k1 + k2, 0j) + w1 * w2
        return LaurentPoly(d)

    __rmul__ = __mul__

    def dense(self, n: int | None = None) -> np.ndarray:
        """Coefficients for exponents ``-n..n``."""
        n = self.degree if n is None else n
        out = np.zeros(2 * n + 1, dtype=complex)
        for k, w in self.coeffs.items():
            out[k + n] = w
        return out

    def debug_dump(self) -> dict:
        return {k: (w.real, w.imag) for k, w in self.coeffs.items()}


@dataclass(frozen=True)
class AMembership:
    in_A: bool
    max_asymmetry: float


def trig_to_laurent(p: TrigPoly) -> LaurentPoly:
    c = p.exp_coeffs()
    n = p.degree
    return LaurentPoly({k - n: w for k, w in enumerate(c)})


def check_A_membership(p: LaurentPoly, tol: float = A_TOL) -> AMembership:
    # the imaginary part of the constant term is canonicalized away
    asym = 0.0
    for k in range(1, p.degree + 1):
        asym = max(asym, abs(p[-k] - p[k].conjugate()))
    return AMembership(asym < tol, asym)


def laurent_to_trig(p: LaurentPoly, tol: float = A_TOL) -> TrigPoly:
    m = check_A_membership(p, tol)
    if not m.in_A:
        raise NotInA(f"asymmetry {m.max_asymmetry:.3g} exceeds {tol:.1g}")
    n = p.degree
    c = p.dense(n)
    c[n] = c[n].real
    return TrigPoly.from_exp(c)


def _aberth(coeffs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """All roots of ``sum coeffs[j] z^j`` (ascending, nonzero ends)."""
    N = len(coeffs) - 1
    desc = coeffs[::-1]
    ddesc = np.polyder(desc)
    # Fujiwara-style radius for the starting circle
    radius = 2 * max(abs(coeffs[N - j] / coeffs[N]) ** (1.0 / j) for j in range(1, N + 1))
    radius = max(radius, 1e-3)
    best, best_err = None, np.inf
    for attempt in range(6):
        angles = TWO_PI * np.arange(N) / N + 0.4 + 0.1 * attempt
        z = 0.5 * radius * np.exp(1j * angles)
        if attempt:
            z = z * (1 + 0.2 * rng.standard_normal(N)) + 0.05 * radius * rng.standard_normal(N)
        for _ in range(MAX_ITER):
            pz = np.polyval(desc, z)
            dpz = np.polyval(ddesc, z)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = pz / dpz
                diff = z[:, None] - z[None, :]
                np.fill_diagonal(diff, 1.0)
                inv = 1.0 / diff
                np.fill_diagonal(inv, 0.0)
                w = ratio / (1.0 - ratio * inv.sum(axis=1))
            w = np.where(np.isfinite(w), w, 0.0)
            z = z - w
            if np.max(np.abs(w)) <= 4e-16 * max(1.0, np.max(np.abs(z))):
                break
        err = np.max(np.abs(np.polyval(desc, z)) / np.polyval(np.abs(desc), np.abs(z)))
        if np.all(np.isfinite(z)) and err < best_err:
            best, best_err = z, err
        if best_err < 1e-12:
            break
    return best


def _clusters(z: np.ndarray, radius: float) -> list:
    groups = []
    unused = list(range(len(z)))
    while unused:
        group = [unused.pop(0)]
        grew = True
        while grew:
            grew = False
            for j in list(unused):
                if np.min(np.abs(z[group] - z[j])) < radius:
                    group.append(j)
                    unused.remove(j)
                    grew = True
        groups.append(group)
    return groups


def unit_circle_roots(p: LaurentPoly, root_tol: float = ROOT_TOL,
                      simple_tol: float = SIMPLE_TOL, unit_tol: float = UNIT_TOL,
                      cluster_radius: float = CLUSTER_RADIUS, seed: int = 0) -> list:
    """Zeros ``t in [0, 2pi)`` of ``p(e^{it})`` with multiplicities.

    The Laurent polynomial is cleared of negative exponents (times ``z^n``),
    all roots are found simultaneously, and roots within ``unit_tol`` of the
    unit circle are kept. Roots closer than ``cluster_radius`` are merged and
    reported once with their multiplicity.
    """
    if p.is_zero():
        raise IdenticallyZero("Laurent polynomial is identically zero")
    lo = min(p.coeffs)
    hi = max(p.coeffs)
    if lo == hi:
        return []
    coeffs = np.array([p[k] for k in range(lo, hi + 1)], dtype=complex)
    roots = _aberth(coeffs, np.random.default_rng(seed))

    desc = coeffs[::-1]
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    radius = cluster_radius * math.sqrt(scale)
    found = []
    leftovers = []
    for group in _clusters(roots, radius):
        zc = _refine(desc, roots[group].mean(), len(group), radius)
        if abs(abs(zc) - 1.0) < unit_tol:
            found.append((zc, len(group)))
        elif abs(abs(roots[group[0]]) - 1.0) < LOOSE_RADIUS:
            leftovers.extend(group)
    # roots of multiplicity >= 3 scatter by ~eps**(1/m); merge them more loosely
    for group in _clusters(roots[leftovers], LOOSE_RADIUS):
        if len(group) < 2:
            continue
        members = roots[leftovers][group]
        zc = _refine(desc, members.mean(), len(group), LOOSE_RADIUS)
        if abs(abs(zc) - 1.0) < unit_tol and abs(np.polyval(desc, zc)) < root_tol * scale:
            found.append((zc, len(group)))

    out = []
    for zc, m in found:
        t = math.atan2(zc.imag, zc.real) % TWO_PI
        if m == 1:
            t = _newton_t(p, t)
        if t >= TWO_PI - 1e-13:
            t = 0.0
        slope = abs(_dt(p, t))
        out.append(Zero(t, m == 1 and slope > simple_tol, m))
    out.sort(key=lambda zr: zr.t)
    return out


def _refine(desc: np.ndarray, zc: complex, m: int, radius: float) -> complex:
    # a root of multiplicity m is a simple root of the (m-1)-th derivative
    f = np.polyder(desc, m - 1) if m > 1 else desc
    df = np.polyder(f)
    for _ in range(4):
        d = np.polyval(df, zc)
        if d == 0:
            break
        step = np.polyval(f, zc) / d
        if abs(step) > radius:
            break
        zc = zc - step
    return complex(zc)


def _dt(p: LaurentPoly, t: float) -> float:
    z = complex(math.cos(t), math.sin(t))
    return sum(1j * k * w * z ** k for k, w in p.coeffs.items()).real


def _newton_t(p: LaurentPoly, t: float) -> float:
    for _ in range(2):
        z = complex(math.cos(t), math.sin(t))
        f = p(z).real
        d = _dt(p, t)
        if d == 0:
            break
        t = (t - f / d) % TWO_PI
    return t
