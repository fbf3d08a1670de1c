"""Event-driven integration of ``x' = a(t)|x| + b(t)``.

Inside a region of constant sign ``s`` the equation is linear,
``x' = s a(t) x + b(t)``, so

    u(t) = e^{s(A(t)-A(r0))} [ u(r0) + int_{r0}^t b(r) e^{-s(A(r)-A(r0))} dr ].

The bracket ``[...]`` is monotone between consecutive zeros of ``b``; the
quadrature grid always contains those zeros, so every sign change of the
solution is bracketed by a pair of adjacent grid nodes and then located with
Brent's method. Cell integrals over one period are cached per equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import IdenticallyZero, TangencyAmbiguous
from .trigpoly import TWO_PI, TrigPoly, antiderivative, derivative, time_shift, zeros_on_period

QUAD_TOL = 1e-11
GRID = 512
TIME_TOL = 1e-13
TOUCH_TOL = 1e-9
SLOPE_TOL = 1e-10

_GL_LO = np.polynomial.legendre.leggauss(10)
_GL_HI = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class PwlOde:
    """``x' = a(t)|x| + b(t)``; ``shift`` records a time translation already applied."""

    a: TrigPoly
    b: TrigPoly
    shift: float = 0.0
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.validate and self.b.is_zero():
            raise IdenticallyZero("b must not vanish identically")

    def canonical(self) -> "PwlOde":
        """Translate time so that ``b(0) = 0`` (first zero of ``b`` in [0, 2pi))."""
        zeros = zeros_on_period(self.b)
        if not zeros or zeros[0].t == 0.0:
            return self
        return self.shifted(zeros[0].t)

    def shifted(self, tau: float) -> "PwlOde":
        """The same equation with time origin moved to ``t = tau``."""
        return PwlOde(time_shift(self.a, tau), time_shift(self.b, tau), self.shift + tau)


@dataclass(frozen=True)
class Crossing:
    t: float
    slope: float
    direction: str  # "up" or "down" in forward time


@dataclass(frozen=True)
class Touch:
    """Non-simple zero: the solution reaches 0 at a zero of b and turns back."""

    t: float
    curvature: float


@dataclass(frozen=True)
class Segment:
    sign: int
    t_start: float
    t_end: float
    u_start: float


@dataclass
class Trace:
    ode: PwlOde
    t0: float
    x0: float
    t1: float
    x1: float
    crossings: list
    touches: list
    segments: list
    quad_tol: float = QUAD_TOL

    @property
    def zero_times(self) -> list:
        return sorted([c.t for c in self.crossings] + [z.t for z in self.touches])

    def value(self, t: float) -> float:
        """Solution value at any ``t`` covered by the trace."""
        K = kernel(self.ode, self.quad_tol)
        lo, hi = min(self.t0, self.t1), max(self.t0, self.t1)
        if not lo - TIME_TOL <= t <= hi + TIME_TOL:
            raise ValueError(f"t = {t} outside the integrated interval")
        for seg in self.segments:
            a, b = sorted((seg.t_start, seg.t_end))
            if a - TIME_TOL <= t <= b + TIME_TOL:
                return K.propagate(seg.sign, seg.t_start, seg.u_start, t)
        raise ValueError(f"t = {t} not covered")  # pragma: no cover

    def sample(self, n: int = 400) -> list:
        """Rows ``(t, x, segment_sign)`` on a uniform grid plus the event times."""
        ts = np.union1d(np.linspace(self.t0, self.t1, n), self.zero_times)
        rows = []
        for t in ts:
            sign = next(s.sign for s in self.segments
                        if min(s.t_start, s.t_end) - TIME_TOL <= t <= max(s.t_start, s.t_end) + TIME_TOL)
            rows.append((float(t), float(self.value(t)), sign))
        return rows


class Kernel:
    """Cached period grid and cell integrals for one equation.

    ``J[s][i]`` is ``int_{n_i}^{n_{i+1}} b(r) exp(-s (A(r) - A(n_i))) dr`` over
    grid cell ``i``; it is periodic in the cell because ``A(r + 2pi) - A(r)``
    is constant.
    """

    def __init__(self, a: TrigPoly, b: TrigPoly, quad_tol: float = QUAD_TOL, grid: int = GRID):
        self.a, self.b = a, b
        self.A = antiderivative(a)
        self.db = derivative(b)
        self.quad_tol = quad_tol
        nodes = np.linspace(0.0, TWO_PI, grid + 1)
        bz = np.array([z.t for z in zeros_on_period(b)]) if not b.is_zero() else np.zeros(0)
        nodes = np.union1d(nodes, bz)
        nodes = self._refine(nodes)
        self.nodes = nodes
        self.A_nodes = self.A(nodes)
        self.A_period = self.A.drift * TWO_PI
        self.is_bzero = np.zeros(len(nodes), dtype=bool)
        for t in bz:
            self.is_bzero[np.argmin(np.abs(nodes - t))] = True
        self.is_bzero[-1] = self.is_bzero[0]
        self.J = {1: self._cells(nodes, 1, _GL_HI), -1: self._cells(nodes, -1, _GL_HI)}

    def _cells(self, nodes, s, rule):
        x, w = rule
        lo, hi = nodes[:-1], nodes[1:]
        half = (hi - lo)[:, None] / 2
        r = (lo + hi)[:, None] / 2 + half * x[None, :]
        f = self.b(r.ravel()).reshape(r.shape) * np.exp(
            -s * (self.A(r.ravel()).reshape(r.shape) - self.A(lo)[:, None]))
        return np.sum(f * w[None, :] * half, axis=1)

    def _refine(self, nodes):
        for _ in range(40):
            width = np.diff(nodes)
            allowed = self.quad_tol * width / TWO_PI
            bad = np.zeros(len(width), dtype=bool)
            for s in (1, -1):
                err = np.abs(self._cells(nodes, s, _GL_HI) - self._cells(nodes, s, _GL_LO))
                bad |= err > allowed
            if not bad.any():
                break
            nodes = np.union1d(nodes, (nodes[:-1][bad] + nodes[1:][bad]) / 2)
        return nodes

    # pieces of a path

    def A_at(self, t):
        return self.A(t)

    def partial(self, s: int, lo: float, t: float) -> float:
        """Oriented ``int_lo^t b(r) exp(-s(A(r) - A(lo))) dr`` (within one cell)."""
        x, w = _GL_HI
        half = (t - lo) / 2
        r = (lo + t) / 2 + half * x
        f = self.b(r) * np.exp(-s * (self.A(r) - self.A(lo)))
        return float(np.dot(f, w) * half)

    def path(self, s_start: float, t_end: float):
        """Grid points strictly between the endpoints, with full-cell indices.

        Returns ``(pts, cell, bzero)``: ``pts`` from ``s_start`` to ``t_end``
        inclusive in travel order; ``cell[j]`` is the base-cell index of the
        step ``pts[j] -> pts[j+1]`` or -1 when the step is a partial cell.
        """
        fwd = t_end >= s_start
        lo, hi = (s_start, t_end) if fwd else (t_end, s_start)
        base = self.nodes[:-1]
        k0 = math.floor(lo / TWO_PI)
        k1 = math.floor(hi / TWO_PI)
        ks = np.arange(k0, k1 + 1)
        grid = (base[None, :] + TWO_PI * ks[:, None]).ravel()
        idx = np.tile(np.arange(len(base)), len(ks))
        keep = (grid > lo + TIME_TOL) & (grid < hi - TIME_TOL)
        grid, idx = grid[keep], idx[keep]
        if not fwd:
            grid, idx = grid[::-1], idx[::-1]
        pts = np.concatenate(([s_start], grid, [t_end]))
        ncell = len(self.nodes) - 1
        cell = np.full(len(pts) - 1, -1)
        if len(grid) > 1:
            if fwd:
                nxt = (idx[:-1] + 1) % ncell
                full = nxt == idx[1:]
                cell[1:-1] = np.where(full, idx[:-1], -1)
            else:
                prv = (idx[:-1] - 1) % ncell
                full = prv == idx[1:]
                cell[1:-1] = np.where(full, idx[1:], -1)
        bzero = np.concatenate(([False], self.is_bzero[idx], [False]))
        return pts, cell, bzero

    def increments(self, s: int, pts, cell) -> np.ndarray:
        """Oriented step integrals normalized to ``A`` at each step's start."""
        inc = np.empty(len(pts) - 1)
        full = cell >= 0
        J = self.J[s][np.where(full, cell, 0)]
        fwd = pts[-1] >= pts[0]
        if fwd:
            inc[full] = J[full]
        else:
            # step right node -> left node; renormalize from the left node
            width_dA = self.A(pts[1:][full]) - self.A(pts[:-1][full])
            inc[full] = -J[full] * np.exp(-s * width_dA)
        for j in np.flatnonzero(~full):
            inc[j] = self.partial(s, pts[j], pts[j + 1])
        return inc

    def values(self, s: int, u0: float, pts, cell):
        """Bracket values ``V`` and solution values ``U`` at the path points."""
        Ap = self.A(pts)
        inc = self.increments(s, pts, cell)
        w = np.exp(-s * (Ap[:-1] - Ap[0]))
        V = np.concatenate(([u0], u0 + np.cumsum(inc * w)))
        U = V * np.exp(s * (Ap - Ap[0]))
        return V, U

    def propagate(self, s: int, t0: float, u0: float, t: float) -> float:
        if t == t0:
            return float(u0)
        pts, cell, _ = self.path(t0, t)
        _, U = self.values(s, u0, pts, cell)
        return float(U[-1])

    def period_integral(self, s: int) -> float:
        """``int_0^{2pi} b(r) exp(-s A(r)) dr``."""
        return float(np.sum(self.J[s] * np.exp(-s * self.A_nodes[:-1])))


@lru_cache(maxsize=256)
def _kernel(a: TrigPoly, b: TrigPoly, quad_tol: float) -> Kernel:
    return Kernel(a, b, quad_tol)


def kernel(ode: PwlOde, quad_tol: float = QUAD_TOL) -> Kernel:
    return _kernel(ode.a, ode.b, float(quad_tol))


def _sign_at_zero(K: Kernel, t: float, travel: int) -> int:
    """Sign of the solution just after passing u(t) = 0 in the travel direction."""
    bt = float(K.b(t))
    if abs(bt) > SLOPE_TOL:
        return int(np.sign(bt)) * travel
    dbt = float(K.db(t))
    if abs(dbt) <= SLOPE_TOL:
        raise TangencyAmbiguous(f"b and b' both vanish at t = {t:.12g}")
    # u'' = b' at a tangency: local minimum for b' > 0 on both sides
    return int(np.sign(dbt))


def integrate(ode: PwlOde, t0: float, x0: float, t1: float, quad_tol: float = QUAD_TOL) -> Trace:
    """Integrate from ``(t0, x0)`` to time ``t1`` (``t1 < t0`` integrates backward)."""
    K = kernel(ode, quad_tol)
    travel = 1 if t1 >= t0 else -1
    s_time, u = float(t0), float(x0)
    sign = int(np.sign(u)) if u != 0.0 else _sign_at_zero(K, s_time, travel)
    crossings, touches, segments = [], [], []
    while True:
        pts, cell, bzero = K.path(s_time, t1)
        V, U = K.values(sign, u, pts, cell)
        away = np.abs(pts - s_time) > 1e-12
        flipped = (sign * V < 0) & away
        touched = bzero & (np.abs(U) < TOUCH_TOL) & away
        hits = np.flatnonzero(flipped | touched)
        if hits.size == 0:
            segments.append(Segment(sign, s_time, float(t1), u))
            x_end = float(U[-1])
            break
        j = int(hits[0])
        if touched[j] or (bzero[j] and abs(U[j]) < TOUCH_TOL):
            t_c = float(pts[j])
            segments.append(Segment(sign, s_time, t_c, u))
            new_sign = _sign_at_zero(K, t_c, travel)
            touches.append(Touch(t_c, float(K.db(t_c))))
        else:
            left, right = float(pts[j - 1]), float(pts[j])
            u_left = float(U[j - 1])
            g = lambda t: u_left + K.partial(sign, left, t)
            lo, hi = sorted((left, right))
            if g(right) * u_left < 0:
                t_c = brentq(g, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
            else:
                # sign change only visible at the rounding level of the node value
                t_c = right
            if abs(t_c - s_time) <= 1e-12:
                if abs(u) >= TOUCH_TOL or u == 0.0:
                    raise TangencyAmbiguous(f"solution stalls at zero near t = {t_c:.12g}")
                # start value is zero to working precision: restart from u = 0
                sign = _sign_at_zero(K, s_time, travel)
                u = 0.0
                continue
            segments.append(Segment(sign, s_time, t_c, u))
            slope = float(K.b(t_c))
            new_sign = _sign_at_zero(K, t_c, travel)
            if abs(slope) > SLOPE_TOL:
                crossings.append(Crossing(t_c, slope, "up" if slope > 0 else "down"))
            else:
                touches.append(Touch(t_c, float(K.db(t_c))))
        s_time, u, sign = t_c, 0.0, new_sign
    if travel < 0:
        crossings.reverse()
        touches.reverse()
    return Trace(ode, float(t0), float(x0), float(t1), x_end, crossings, touches, segments, quad_tol)


def poincare(ode: PwlOde, x: float, quad_tol: float = QUAD_TOL) -> float:
    return integrate(ode, 0.0, x, TWO_PI, quad_tol).x1


def displacement(ode: PwlOde, x: float, quad_tol: float = QUAD_TOL) -> float:
    return poincare(ode, x, quad_tol) - x


def outer_band_displacement(ode: PwlOde, sign: int, quad_tol: float = QUAD_TOL):
    """Affine return map ``x -> slope x + offset`` on the band where ``sign * x > 0``
    throughout the period."""
    K = kernel(ode, quad_tol)
    slope = math.exp(sign * K.A_period)
    return slope, slope * K.period_integral(sign)
