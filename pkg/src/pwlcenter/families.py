"""Test corpora: random composition centers and the cos(kt) perturbation family."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decompose import construct_from_witness
from .flow import PwlOde
from .trigpoly import RealPoly, TrigPoly, zeros_on_period


@dataclass(frozen=True)
class WitnessInstance:
    p: RealPoly
    q: RealPoly
    h: TrigPoly
    ode: PwlOde


def random_witness(rng: np.random.Generator, max_pq: int = 3, max_h: int = 2) -> WitnessInstance:
    """Draw ``(p, q, h)`` with uniform coefficients in [-1, 1] until ``b`` has
    only simple zeros."""
    while True:
        p = RealPoly(rng.uniform(-1, 1, rng.integers(1, max_pq + 2)))
        q = RealPoly(rng.uniform(-1, 1, rng.integers(1, max_pq + 2)))
        dh = int(rng.integers(1, max_h + 1))
        h = TrigPoly(rng.uniform(-1, 1), rng.uniform(-1, 1, dh), rng.uniform(-1, 1, dh))
        a, b = construct_from_witness(p, q, h)
        if b.is_zero():
            continue
        if all(z.simple for z in zeros_on_period(b)):
            return WitnessInstance(p, q, h, PwlOde(a, b))


def witness_family(n: int = 50, seed: int = 2024) -> list:
    rng = np.random.default_rng(seed)
    return [random_witness(rng) for _ in range(n)]


def cos_perturbation(k: int, eps: float) -> PwlOde:
    """``x' = eps cos(kt) |x| + sin t``."""
    return PwlOde(TrigPoly.cos_k(k, eps), TrigPoly.sin_k(1))
