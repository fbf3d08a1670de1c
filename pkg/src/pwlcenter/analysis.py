"""Band structure, the merging hypothesis, crossing-curve invariants and the
global-center classifier.

All routines take a :class:`~pwlcenter.flow.PwlOde`. ``band_candidates`` and
friends expect the canonical form (``b(0) = 0``); ``center_classify`` does the
shift itself and reports it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from .decompose import DecompositionOutcome, find_common_witness
from .errors import InconsistentBand, NonSimpleB, NoTwoZeroBand, PwlError
from .flow import QUAD_TOL, PwlOde, displacement, integrate, outer_band_displacement
from .trigpoly import ROOT_TOL, TWO_PI, DriftTrigPoly, antiderivative, zeros_on_period

DEDUP_TOL = 1e-8


@dataclass
class AnalysisConfig:
    quad_tol: float = QUAD_TOL
    root_tol: float = ROOT_TOL
    center_tol: float = 1e-6
    outer_tol: float = 1e-8
    band_points: int = 41
    outer_points: int = 10
    isolation_bracket: float = 1e-3
    isolation_min: float = 1e-5
    hypothesis_samples: int = 8
    gap_tol: float = 1e-3
    cycle_grid: int = 9
    x_range: Optional[tuple] = None

    def __post_init__(self):
        for name in ("quad_tol", "root_tol", "center_tol", "outer_tol", "isolation_bracket", "gap_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if min(self.band_points, self.cycle_grid, self.hypothesis_samples) < 3:
            raise ValueError("grid sizes must be at least 3")


@dataclass
class Band:
    lo: float
    hi: float
    zero_count: int
    sign_profile: str  # positive, negative or mixed

    @property
    def interval(self) -> tuple:
        return (self.lo, self.hi)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)


@dataclass
class BandStructure:
    edges: list
    bands: list

    def band_of(self, x: float) -> Band:
        for band in self.bands:
            if band.lo < x < band.hi:
                return band
        raise ValueError(f"x = {x} lies on a band edge")


@dataclass
class HypothesisReport:
    holds: bool
    band: tuple
    merge_edge: Optional[str]
    t_bar: Optional[float]
    extrapolated_gap: float
    b_at_merge: Optional[float]
    evidence: list = field(default_factory=list)
    reason: str = ""
    # absolute time translation of the system the check was run on
    origin: float = 0.0


@dataclass
class CycleInvariantReport:
    x: list
    t1: list
    t2: list
    r_t1t2: list
    r_periodic: list
    r_a_integral: list
    r_b_integral: list
    t1_monotone: bool
    t2_monotone: bool

    def max_abs(self, name: str) -> float:
        return float(np.max(np.abs(getattr(self, name))))


@dataclass
class ClassificationReport:
    verdict: str
    shift: float
    hypothesis: Optional[HypothesisReport]
    bands: Optional[BandStructure]
    witness: DecompositionOutcome
    max_abs_displacement: float
    limit_cycles: list
    outer_bands: dict
    numeric_center: bool
    consistency: bool
    equivalence_applicable: bool
    samples: list
    config: AnalysisConfig
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        hyp = asdict(self.hypothesis) if self.hypothesis else None
        bands = None
        if self.bands is not None:
            bands = {"edges": list(self.bands.edges),
                     "bands": [{"lo": _finite(b.lo), "hi": _finite(b.hi),
                                "zero_count": b.zero_count, "sign_profile": b.sign_profile}
                               for b in self.bands.bands]}
        cfg = asdict(self.config)
        cfg["x_range"] = list(cfg["x_range"]) if cfg["x_range"] else None
        return {
            "verdict": self.verdict,
            "shift": self.shift,
            "hypothesis": hyp,
            "bands": bands,
            "witness": self.witness.to_dict(),
            "max_abs_displacement": self.max_abs_displacement,
            "limit_cycles": list(self.limit_cycles),
            "outer_bands": self.outer_bands,
            "numeric_center": self.numeric_center,
            "consistency": self.consistency,
            "equivalence_applicable": self.equivalence_applicable,
            "tolerances": cfg,
            "notes": list(self.notes),
        }


def _finite(x: float):
    return x if math.isfinite(x) else ("-inf" if x < 0 else "inf")


def _b_zeros(ode: PwlOde, root_tol: float = ROOT_TOL) -> list:
    zeros = zeros_on_period(ode.b, root_tol=root_tol)
    if any(not z.simple for z in zeros):
        raise NonSimpleB("b has a non-simple zero")
    return zeros


def _zeros_inside(trace) -> list:
    return [t for t in trace.zero_times if 1e-12 < t < TWO_PI - 1e-12]


def band_candidates(ode: PwlOde, quad_tol: float = QUAD_TOL) -> list:
    """Values at t = 0 of the solutions tangent to x = 0 at a zero of ``b``.

    The zero of ``b`` at t = 0 also counts at t = 2*pi, since a solution
    touching zero at the end of the period is a separate band edge unless the
    equation happens to be a center there.
    """
    taus = [z.t for z in _b_zeros(ode)]
    if taus and taus[0] < 1e-12:
        taus.append(TWO_PI)
    values = []
    for tau in taus:
        values.append(0.0 if tau == 0.0 else integrate(ode, tau, 0.0, 0.0, quad_tol).x1)
    values.sort()
    out = []
    for v in values:
        if not out or abs(v - out[-1]) > DEDUP_TOL:
            out.append(v)
    return out


def _outer_offsets(edges: list) -> np.ndarray:
    span = max(1.0, edges[-1] - edges[0]) if edges else 1.0
    return span * np.array([0.5, 1.0, 2.0])


def band_structure(ode: PwlOde, quad_tol: float = QUAD_TOL) -> BandStructure:
    edges = band_candidates(ode, quad_tol)
    n_b = len(_b_zeros(ode))
    bounds = [-math.inf] + edges + [math.inf]
    offsets = _outer_offsets(edges)
    bands = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if math.isinf(lo):
            xs = hi - offsets
        elif math.isinf(hi):
            xs = lo + offsets
        else:
            xs = lo + (hi - lo) * np.array([0.25, 0.5, 0.75])
        counts, signs = set(), set()
        for x in xs:
            tr = integrate(ode, 0.0, float(x), TWO_PI, quad_tol)
            zs = _zeros_inside(tr)
            if tr.touches:
                raise InconsistentBand(f"non-simple zero inside band ({lo}, {hi})")
            counts.add(len(zs))
            signs.add("mixed" if zs else ("positive" if x > 0 else "negative"))
        if len(counts) != 1 or len(signs) != 1:
            raise InconsistentBand(f"zero counts {sorted(counts)} in band ({lo}, {hi})")
        count = counts.pop()
        if count > n_b + 1:
            raise InconsistentBand(f"{count} zeros exceeds the bound {n_b + 1}")
        bands.append(Band(lo, hi, count, signs.pop()))
    return BandStructure(edges, bands)


def _crossing_pair(ode: PwlOde, x: float, quad_tol: float):
    tr = integrate(ode, 0.0, x, TWO_PI, quad_tol)
    zs = _zeros_inside(tr)
    if len(zs) != 2 or tr.touches:
        return None
    return zs[0], zs[1]


def _extrapolate(dist: np.ndarray, values: np.ndarray) -> float:
    """Value at dist -> 0 of a quartic fit in ``sqrt(dist)``.

    Crossing times near a fold behave like series in ``sqrt(dist)``; the two
    crossings sit on different linear flows, so both parities appear.
    """
    s = np.sqrt(dist)
    M = np.column_stack([s ** j for j in range(5)])
    coef, *_ = np.linalg.lstsq(M, values, rcond=None)
    return float(coef[0])


def _edge_report(ode, band, edge, name, direction, dist, quad_tol, gap_tol, b_scale):
    evidence = []
    for d in dist:
        x = edge + direction * d
        pair = _crossing_pair(ode, float(x), quad_tol)
        if pair is None:
            return None
        evidence.append((float(x), pair[0], pair[1]))
    ev = np.array(evidence)
    gaps = ev[:, 2] - ev[:, 1]
    tail = 6
    gap0 = _extrapolate(dist[-tail:], gaps[-tail:])
    mid0 = _extrapolate(dist[-tail:], (ev[-tail:, 1] + ev[-tail:, 2]) / 2)
    decreasing = bool(np.all(np.diff(gaps[-3:]) < 0))
    b_bar = float(ode.b(mid0))
    holds = decreasing and abs(gap0) < gap_tol and abs(b_bar) < gap_tol * b_scale
    return HypothesisReport(holds, band.interval, name, mid0, gap0, b_bar, evidence,
                            "" if holds else "crossing times do not merge at this edge")


def hypothesis_check(ode: PwlOde, bands: Optional[BandStructure] = None,
                     quad_tol: float = QUAD_TOL, samples: int = 8,
                     gap_tol: float = 1e-3, windows: int = 3) -> HypothesisReport:
    """Look for a band of solutions with two simple zeros that merge at an edge."""
    bands = bands or band_structure(ode, quad_tol)
    two = [b for b in bands.bands if b.zero_count == 2 and b.finite]
    if not two:
        raise NoTwoZeroBand("no band of solutions with exactly two simple zeros")
    b_scale = max(1.0, ode.b.max_abs_coeff())
    fallback = None
    for band in two:
        half = (band.hi - band.lo) / 2
        for edge, name, direction in ((band.lo, "min", 1.0), (band.hi, "max", -1.0)):
            # slide the ratio-1/2 window toward the edge while the fold
            # asymptotics are not yet resolved
            for window in range(windows):
                dist = half * 0.5 ** np.arange(1 + window * samples, 1 + (window + 1) * samples)
                report = _edge_report(ode, band, edge, name, direction, dist, quad_tol,
                                      gap_tol, b_scale)
                if report is None:
                    break
                if report.holds:
                    return report
                if fallback is None or abs(report.extrapolated_gap) < abs(fallback.extrapolated_gap):
                    fallback = report
    if fallback is None:
        band = two[0]
        return HypothesisReport(False, band.interval, None, None, math.inf, None, [],
                                "two-zero band could not be sampled")
    fallback.merge_edge = None
    return fallback


def cycle_invariants(ode: PwlOde, band: tuple, grid_size: int = 9,
                     quad_tol: float = QUAD_TOL) -> CycleInvariantReport:
    """Residuals of the crossing-time relations on a grid inside a two-zero band.

    For a band of negative initial values the solution is positive between the
    crossings ``t1 < t2``; on a positive band every sign is mirrored.
    """
    lo, hi = band
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("band must be finite")
    A = antiderivative(ode.a)
    B = antiderivative(ode.b)
    xs = lo + (hi - lo) * np.arange(1, grid_size + 1) / (grid_size + 1)
    cols = {k: [] for k in ("t1", "t2", "r_t1t2", "r_periodic", "r_a_integral", "r_b_integral")}
    mid = 1 if hi <= 0 else -1
    for x in xs:
        pair = _crossing_pair(ode, float(x), quad_tol)
        if pair is None:
            raise NoTwoZeroBand(f"solution from x = {x} does not have two simple zeros")
        t1, t2 = pair
        cols["t1"].append(t1)
        cols["t2"].append(t2)
        cols["r_t1t2"].append(_weighted_integral(ode.b, A, t1, t2, mid))
        cols["r_periodic"].append(_weighted_integral(ode.b, A, t2, t1 + TWO_PI, -mid))
        cols["r_a_integral"].append(A(t2) - A(t1))
        cols["r_b_integral"].append(B(t2) - B(t1))
    d1, d2 = np.diff(cols["t1"]), np.diff(cols["t2"])
    # negative band: t1 decreases and t2 increases with x; mirrored above zero
    t1_ok = bool(np.all(d1 < 0)) if mid == 1 else bool(np.all(d1 > 0))
    t2_ok = bool(np.all(d2 > 0)) if mid == 1 else bool(np.all(d2 < 0))
    return CycleInvariantReport(list(map(float, xs)), **cols, t1_monotone=t1_ok, t2_monotone=t2_ok)


def _weighted_integral(b, A: DriftTrigPoly, lo: float, hi: float, sign: int) -> float:
    """``int_lo^hi b(t) exp(sign * (A(hi) - A(t))) dt`` by adaptive quadrature."""
    Ahi = A(hi)
    # on a center the value is ~0 and quad reports roundoff; the bound is still sound
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(lambda t: b(t) * math.exp(sign * (Ahi - A(t))), lo, hi,
                      epsabs=1e-13, epsrel=1e-12, limit=200)
    return float(val)


def abelian_cycle_integral(B: DriftTrigPoly, pairs: list) -> float:
    """Largest ``|B(t2) - B(t1)|`` over sampled preimage pairs of the simple cycle."""
    if not pairs:
        raise ValueError("pairs must be nonempty")
    return float(max(abs(B(t2) - B(t1)) for t1, t2 in pairs))


def _scan_points(bands: BandStructure, config: AnalysisConfig) -> list:
    edges = bands.edges
    pts = []
    for band in bands.bands:
        if band.finite:
            k = np.arange(1, config.band_points + 1) / (config.band_points + 1)
            pts.extend(band.lo + (band.hi - band.lo) * k)
    n_side = config.outer_points // 2
    span = max(1.0, edges[-1] - edges[0])
    if config.x_range:
        lo, hi = config.x_range
        left = np.linspace(lo, edges[0], n_side + 1)[:-1] if lo < edges[0] else []
        right = np.linspace(edges[-1], hi, n_side + 1)[1:] if hi > edges[-1] else []
    else:
        offs = span * np.geomspace(0.1, 2.0, n_side)
        left, right = edges[0] - offs[::-1], edges[-1] + offs
    pts.extend(left)
    pts.extend(right)
    return sorted(float(x) for x in pts)


def _locate_cycles(ode, xs, ds, bands, config):
    cycles = []
    for (x0, d0), (x1, d1) in zip(zip(xs, ds), zip(xs[1:], ds[1:])):
        # noise-level sign flips next to a band of periodic solutions are not cycles
        if d0 * d1 >= 0 or min(abs(d0), abs(d1)) <= config.center_tol:
            continue
        band_max = max(abs(d) for x, d in zip(xs, ds) if _same_band(bands, x, x0))
        if band_max <= config.isolation_min:
            continue
        f = lambda x: displacement(ode, x, config.quad_tol)
        lo, hi = x0, x1
        # bisect to an isolating bracket, then polish
        while hi - lo > config.isolation_bracket:
            mid = 0.5 * (lo + hi)
            if f(mid) * d0 > 0:
                lo = mid
            else:
                hi = mid
        root = brentq(f, lo, hi, xtol=1e-12)
        cycles.append(float(root))
    return cycles


def _same_band(bands, x, ref):
    lo = max([-math.inf] + [e for e in bands.edges if e < ref])
    hi = min([math.inf] + [e for e in bands.edges if e > ref])
    return lo < x < hi


def _hypothesis_other_origins(canon: PwlOde, config: AnalysisConfig):
    for z in zeros_on_period(canon.b)[1:]:
        alt = canon.shifted(z.t)
        try:
            rep = hypothesis_check(alt, None, config.quad_tol, config.hypothesis_samples,
                                   config.gap_tol)
        except PwlError:
            continue
        if rep.holds:
            rep.origin = alt.shift
            return rep
    return None


def center_classify(ode: PwlOde, config: Optional[AnalysisConfig] = None) -> ClassificationReport:
    """Decide whether every solution is periodic and cross-check with the
    composition condition."""
    config = config or AnalysisConfig()
    _b_zeros(ode, config.root_tol)
    canon = ode.canonical()
    notes = []

    outer = {}
    outer_fail = False
    for sign, name in ((1, "positive"), (-1, "negative")):
        slope, offset = outer_band_displacement(canon, sign, config.quad_tol)
        outer[name] = {"slope": slope, "offset": offset}
        if abs(slope - 1.0) > config.outer_tol or abs(offset) > config.outer_tol:
            outer_fail = True

    bands = None
    hypothesis = None
    try:
        bands = band_structure(canon, config.quad_tol)
        hypothesis = hypothesis_check(canon, bands, config.quad_tol,
                                      config.hypothesis_samples, config.gap_tol)
    except PwlError as exc:
        notes.append(f"{type(exc).__name__}: {exc}")
    if hypothesis is not None:
        hypothesis.origin = canon.shift
    if not (hypothesis and hypothesis.holds):
        # a merge at t = 0 is invisible on (0, 2pi); the statement is invariant
        # under time translation, so retry with the origin at the other zeros of b
        alt = _hypothesis_other_origins(canon, config)
        if alt is not None:
            hypothesis = alt
            notes.append(f"hypothesis verified with time origin {alt.origin:.17g}")
    if bands is None:
        edges = band_candidates(canon, config.quad_tol)
        bounds = [-math.inf] + edges + [math.inf]
        bands = BandStructure(edges, [Band(lo, hi, -1, "unknown")
                                      for lo, hi in zip(bounds[:-1], bounds[1:])])

    xs = _scan_points(bands, config)
    ds = [displacement(canon, x, config.quad_tol) for x in xs]
    max_d = float(max(abs(d) for d in ds))
    cycles = _locate_cycles(canon, xs, ds, bands, config)

    outcome = find_common_witness(ode.a, ode.b)
    numeric_center = max_d < config.center_tol and not outer_fail
    if numeric_center and outcome.found:
        verdict = "global_center"
    elif outer_fail or max_d > config.isolation_min:
        verdict = "not_global_center"
    else:
        verdict = "inconclusive"
    holds = bool(hypothesis and hypothesis.holds)
    consistency = numeric_center == outcome.found
    if not holds:
        notes.append("merging hypothesis not verified: equivalence not asserted")
    return ClassificationReport(
        verdict=verdict,
        shift=canon.shift,
        hypothesis=hypothesis,
        bands=bands,
        witness=outcome,
        max_abs_displacement=max_d,
        limit_cycles=cycles,
        outer_bands=outer,
        numeric_center=numeric_center,
        consistency=consistency,
        equivalence_applicable=holds,
        samples=list(zip(xs, ds)),
        config=config,
        notes=notes,
    )
