import json
import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from pwlcenter.analysis import (
    AnalysisConfig,
    band_candidates,
    band_structure,
    center_classify,
    cycle_invariants,
    hypothesis_check,
)
from pwlcenter.errors import NonSimpleB
from pwlcenter.families import cos_perturbation, witness_family
from pwlcenter.flow import PwlOde, integrate
from pwlcenter.trigpoly import TWO_PI, TrigPoly

SIN = PwlOde(TrigPoly(), TrigPoly.sin_k(1))
COMPOSITION = PwlOde(TrigPoly.sin_k(2), TrigPoly.cos_k(1))


def test_band_candidates_closed_form():
    # tangent solutions x + 1 - cos t through (0, 0) and (pi, 0)
    assert band_candidates(SIN) == pytest.approx([-2.0, 0.0], abs=1e-12)


def test_band_structure_closed_form():
    bs = band_structure(SIN)
    assert [b.zero_count for b in bs.bands] == [0, 2, 0]
    assert [b.sign_profile for b in bs.bands] == ["negative", "mixed", "positive"]
    assert bs.band_of(-1.0).zero_count == 2


def test_band_edges_are_tangencies():
    ode = COMPOSITION.canonical()
    for x in band_candidates(ode):
        tr = integrate(ode, 0.0, x, TWO_PI)
        assert tr.touches or abs(x) < 1e-12


def test_hypothesis_closed_form():
    rep = hypothesis_check(SIN)
    assert rep.holds
    assert rep.merge_edge == "min"
    assert rep.t_bar == pytest.approx(math.pi, abs=1e-6)
    assert abs(rep.extrapolated_gap) < 1e-3
    gaps = [e[2] - e[1] for e in rep.evidence]
    # t1 = arccos(1 + x) and t2 = 2pi - t1, closing at x = -2
    for x, t1, t2 in rep.evidence:
        assert t2 - t1 == pytest.approx(TWO_PI - 2 * math.acos(1 + x), abs=1e-9)
    assert gaps == sorted(gaps, reverse=True)


def test_cycle_invariants_closed_form():
    rep = cycle_invariants(SIN, (-2.0, 0.0))
    for name in ("r_t1t2", "r_periodic", "r_a_integral", "r_b_integral"):
        assert rep.max_abs(name) < 1e-10
    assert rep.t1_monotone and rep.t2_monotone
    # crossing times arccos(1 + x) and its mirror
    for x, t1, t2 in zip(rep.x, rep.t1, rep.t2):
        assert t1 == pytest.approx(math.acos(1 + x), abs=1e-9)
        assert t2 == pytest.approx(TWO_PI - math.acos(1 + x), abs=1e-9)


def test_cycle_invariants_detect_non_center():
    ode = cos_perturbation(4, 0.2)
    rep = cycle_invariants(ode, (-2.0, 0.0))
    assert rep.max_abs("r_a_integral") > 1e-3


def test_classify_closed_form():
    rep = center_classify(SIN)
    assert rep.verdict == "global_center"
    assert rep.witness.found
    assert rep.consistency and rep.equivalence_applicable
    assert rep.max_abs_displacement < 1e-12


def test_classify_composition_example():
    rep = center_classify(COMPOSITION)
    assert rep.verdict == "global_center"
    assert rep.shift == pytest.approx(math.pi / 2)
    assert rep.max_abs_displacement < 1e-6
    assert rep.consistency


def first_order_zeros():
    """Zeros of the first-order displacement int cos(4t) |x + 1 - cos t| dt on (-2, 0)."""
    def M(x):
        t1 = math.acos(1 + x)
        return quad(lambda t: math.cos(4 * t) * abs(x + 1 - math.cos(t)), 0, TWO_PI,
                    points=[t1, TWO_PI - t1], limit=200, epsabs=1e-13)[0]
    xs = np.linspace(-1.999, -0.001, 200)
    vs = [M(x) for x in xs]
    return [brentq(M, xs[i], xs[i + 1]) for i in range(len(xs) - 1) if vs[i] * vs[i + 1] < 0]


def test_perturbed_limit_cycles_match_first_order_theory():
    ref = first_order_zeros()
    assert len(ref) == 2
    rep = center_classify(cos_perturbation(4, 0.025))
    assert rep.verdict == "not_global_center"
    assert not rep.witness.found
    assert rep.consistency
    assert len(rep.limit_cycles) == 2
    assert np.allclose(rep.limit_cycles, ref, atol=1e-3)
    errs = []
    for eps in (0.1, 0.05):
        cyc = center_classify(cos_perturbation(4, eps)).limit_cycles
        errs.append(max(abs(c - r) for c, r in zip(cyc, ref)))
    # the first-order approximation improves as eps shrinks
    assert errs[1] < errs[0]


def test_perturbed_outer_bands():
    rep = center_classify(cos_perturbation(4, 0.1))
    for name in ("positive", "negative"):
        assert rep.outer_bands[name]["slope"] == pytest.approx(1.0, abs=1e-12)


def test_random_family_sample():
    for inst in witness_family(5, seed=11):
        rep = center_classify(inst.ode)
        assert rep.verdict == "global_center"
        assert rep.max_abs_displacement < 1e-6


def test_non_simple_b_rejected():
    with pytest.raises(NonSimpleB):
        center_classify(PwlOde(TrigPoly(), TrigPoly(1, [-1], [0])))


def test_report_serializes():
    rep = center_classify(SIN)
    d = rep.to_dict()
    json.dumps(d, allow_nan=True)
    assert d["verdict"] == "global_center"
    assert d["tolerances"]["center_tol"] == 1e-6


def test_config_validation():
    with pytest.raises(ValueError):
        AnalysisConfig(quad_tol=0)
    with pytest.raises(ValueError):
        AnalysisConfig(band_points=2)


def test_x_range_controls_outer_samples():
    rep = center_classify(SIN, AnalysisConfig(x_range=(-5.0, 3.0), outer_points=4))
    xs = [x for x, _ in rep.samples]
    assert min(xs) >= -5.0 and max(xs) <= 3.0
