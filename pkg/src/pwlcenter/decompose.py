"""Composition condition ``a = p(h) h'``, ``b = q(h) h'``.

The search integrates ``a`` and ``b`` to ``A`` and ``B`` and looks for a trig
polynomial ``H`` with ``A = P(H)`` and ``B = Q(H)``. Candidates for ``H`` come
from peeling the Laurent coefficients of ``A`` from the top degree down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BothZero, ConstantInner, NoSolution
from .laurent import check_A_membership, LaurentPoly, laurent_to_trig, trig_to_laurent
from .trigpoly import (
    RealPoly,
    TrigPoly,
    antiderivative,
    compose_poly,
    compress,
    derivative,
    expand,
    fourier_support_gcd,
)

WITNESS_TOL = 1e-9
OUTER_TOL = 1e-9
DRIFT_TOL = 1e-10
SYMMETRY_TOL = 1e-8


@dataclass(frozen=True)
class CompositionWitness:
    p: RealPoly
    q: RealPoly
    h: TrigPoly
    # antiderivatives with A = P(h), B = Q(h) up to constants
    P: Optional[RealPoly] = None
    Q: Optional[RealPoly] = None

    def to_dict(self) -> dict:
        return {"p": self.p.to_list(), "q": self.q.to_list(), "h": self.h.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "CompositionWitness":
        return cls(RealPoly(d["p"]), RealPoly(d["q"]), TrigPoly.from_dict(d["h"]))


@dataclass(frozen=True)
class DecompositionOutcome:
    """Result of :func:`find_common_witness`.

    ``kind`` is ``"witness"``, ``"frequency_factor"`` or ``"none"``. The
    common frequency factor is always recorded in ``frequency_factor`` (1 when
    the inputs have no common period shorter than 2*pi).
    """

    kind: str
    witness: Optional[CompositionWitness] = None
    frequency_factor: int = 1
    residual: float = math.inf
    reason: str = ""

    @property
    def found(self) -> bool:
        return self.witness is not None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "witness": self.witness.to_dict() if self.witness else None,
            "frequency_factor": self.frequency_factor,
            "residual": self.residual,
            "reason": self.reason,
        }


def construct_from_witness(p: RealPoly, q: RealPoly, h: TrigPoly):
    if h.is_constant:
        raise ConstantInner("inner function h must be nonconstant")
    dh = derivative(h)
    return compose_poly(p, h) * dh, compose_poly(q, h) * dh


def verify_witness(a: TrigPoly, b: TrigPoly, w: CompositionWitness) -> float:
    """Max coefficient deviation between (a, b) and the recomposed pair."""
    a2, b2 = construct_from_witness(w.p, w.q, w.h)
    n = max(a.degree, b.degree, a2.degree, b2.degree)
    da = np.abs(a.real_vector(n) - a2.real_vector(n))
    db = np.abs(b.real_vector(n) - b2.real_vector(n))
    return float(max(da.max(), db.max()))


def solve_outer_poly(F: TrigPoly, H: TrigPoly, tol: float = WITNESS_TOL) -> RealPoly:
    """Find real ``P`` with ``F = P(H)``, or raise :class:`NoSolution`."""
    if H.is_constant:
        raise ConstantInner("H must be nonconstant")
    if F.is_constant:
        return RealPoly((F.a0,))
    if F.degree % H.degree:
        raise NoSolution(f"deg H = {H.degree} does not divide deg F = {F.degree}")
    m = F.degree // H.degree
    n = F.degree
    cols = []
    power = TrigPoly.constant(1.0)
    for _ in range(m + 1):
        cols.append(power.real_vector(n))
        power = power * H
    M = np.column_stack(cols)
    rhs = F.real_vector(n)
    coef, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    residual = float(np.max(np.abs(M @ coef - rhs)))
    if residual >= tol:
        raise NoSolution("F is not a polynomial in H", residual)
    return RealPoly(coef)


def _top_coefficient(eta: np.ndarray, m: int, power: int) -> complex:
    """Coefficient of ``z**power`` in ``(sum eta[k] z^k)**m``."""
    poly = np.array([1.0 + 0j])
    for _ in range(m):
        poly = np.convolve(poly, eta)
    return poly[power] if power < len(poly) else 0j


def peel_candidates(A: TrigPoly, d: int) -> list:
    """Degree-``d`` trig polynomials ``H`` (zero mean) with ``A = P(H)``.

    ``P`` is normalized to leading coefficient +1 or -1, so the leading
    Laurent coefficient of ``H`` solves ``c * eta_d**m = alpha_n``; the next
    ``d - 1`` coefficients then follow one at a time from the coefficients of
    ``z^(n-1) .. z^(n-d+1)`` of ``A``, each linear in the new unknown. The
    opposite end is peeled the same way as a conjugate-symmetry check.
    """
    n = A.degree
    if d < 1 or n == 0 or n % d:
        return []
    m = n // d
    alpha = trig_to_laurent(A)
    # for odd m the sign of P is absorbed by H -> -H
    signs = (1.0,) if m % 2 else (1.0, -1.0)
    out = []
    for c in signs:
        target = alpha[n] / c
        r = abs(target) ** (1.0 / m)
        phi = np.angle(target)
        for j in range(m):
            lead = r * np.exp(1j * (phi + 2 * math.pi * j) / m)
            top = _peel_side(lambda k: alpha[k], n, d, m, c, lead)
            bottom = _peel_side(lambda k: alpha[-k], n, d, m, c, np.conj(lead))
            H = LaurentPoly({**{k: top[k] for k in range(1, d + 1)},
                             **{-k: bottom[k] for k in range(1, d + 1)}})
            if not check_A_membership(H, SYMMETRY_TOL * max(1.0, abs(lead))).in_A:
                continue
            H = _denoise(laurent_to_trig(H, tol=math.inf))
            try:
                solve_outer_poly(A, H)
            except NoSolution:
                continue
            out.append(H)
    return out


def _denoise(H: TrigPoly) -> TrigPoly:
    cut = 1e-14 * H.max_abs_coeff()
    clean = [np.where(np.abs(v) < cut, 0.0, v) for v in (H.cos, H.sin)]
    return TrigPoly(0.0, *clean)


def _peel_side(coef, n: int, d: int, m: int, c: float, lead: complex) -> np.ndarray:
    eta = np.zeros(d + 1, dtype=complex)
    eta[d] = lead
    denom = c * m * lead ** (m - 1)
    for j in range(1, d):
        partial = _top_coefficient(eta, m, n - j)
        eta[d - j] = (coef(n - j) - c * partial) / denom
    return eta


def _witness_from(P: RealPoly, Q: RealPoly, H: TrigPoly, k: int) -> CompositionWitness:
    h = expand(H, k) if k > 1 else H
    return CompositionWitness(P.derivative(), Q.derivative(), h, P, Q)


def find_common_witness(a: TrigPoly, b: TrigPoly) -> DecompositionOutcome:
    """Search for ``(p, q, h)`` with ``a = p(h) h'`` and ``b = q(h) h'``."""
    if a.is_zero() and b.is_zero():
        raise BothZero("a and b are both identically zero")
    A, B = antiderivative(a), antiderivative(b)
    if not (A.is_periodic(DRIFT_TOL) and B.is_periodic(DRIFT_TOL)):
        return DecompositionOutcome("none", residual=math.inf,
                                    reason="nonzero mean: antiderivative not periodic")
    k = fourier_support_gcd([p for p in (a, b) if not p.is_zero()])
    At, Bt = A.trig, B.trig
    if k > 1:
        At, Bt = compress(At, k), compress(Bt, k)
    fallback = "frequency_factor" if k > 1 else "none"

    if a.is_zero() or b.is_zero():
        # one coefficient vanishes: the other antiderivative is its own inner function
        inner = (Bt if a.is_zero() else At) - (Bt if a.is_zero() else At).a0
        one, zero = RealPoly((0.0, 1.0)), RealPoly(())
        P, Q = (zero, one) if a.is_zero() else (one, zero)
        return DecompositionOutcome("witness", _witness_from(P, Q, inner, k), k, 0.0)

    best = math.inf
    g = math.gcd(At.degree, Bt.degree)
    for d in sorted((d for d in range(1, g + 1) if g % d == 0), reverse=True):
        for H in peel_candidates(At, d):
            try:
                Q = solve_outer_poly(Bt, H)
            except NoSolution as exc:
                best = min(best, exc.residual)
                continue
            P = solve_outer_poly(At, H)
            w = _witness_from(P, Q, H, k)
            return DecompositionOutcome("witness", w, k, verify_witness(a, b, w))
    return DecompositionOutcome(fallback, None, k, best, reason="no common inner factor")
