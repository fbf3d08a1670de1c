import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwlcenter.decompose import (
    CompositionWitness,
    construct_from_witness,
    find_common_witness,
    peel_candidates,
    solve_outer_poly,
    verify_witness,
)
from pwlcenter.errors import BothZero, ConstantInner, NoSolution
from pwlcenter.trigpoly import TWO_PI, RealPoly, TrigPoly, compose_poly, derivative

T = np.linspace(0, TWO_PI, 41)


def test_construct_closed_form():
    a, b = construct_from_witness(RealPoly([0, 2]), RealPoly([1]), TrigPoly.sin_k(1))
    assert a.almost_equal(TrigPoly.sin_k(2))
    assert b.almost_equal(TrigPoly.cos_k(1))
    a, b = construct_from_witness(RealPoly([]), RealPoly([1]), TrigPoly(0, [-1], [0]))
    assert a.is_zero()
    assert b.almost_equal(TrigPoly.sin_k(1))


def test_construct_constant_inner():
    with pytest.raises(ConstantInner):
        construct_from_witness(RealPoly([1]), RealPoly([1]), TrigPoly.constant(2.0))


def test_composition_example():
    out = find_common_witness(TrigPoly.sin_k(2), TrigPoly.cos_k(1))
    assert out.kind == "witness"
    assert out.residual < 1e-12
    w = out.witness
    # equal to (2x, 1, sin t) up to the h -> -h symmetry
    assert np.allclose(np.abs(w.h(T)), np.abs(np.sin(T)), atol=1e-12)
    assert abs(w.p.coeffs[1]) == pytest.approx(2.0)


def test_a_zero_example():
    out = find_common_witness(TrigPoly(), TrigPoly.sin_k(1))
    assert out.kind == "witness"
    assert out.witness.p.is_zero()
    assert out.witness.q.to_list() == [1.0]
    assert np.allclose(out.witness.h(T), -np.cos(T))


def test_frequency_factor():
    out = find_common_witness(TrigPoly.sin_k(2), TrigPoly.cos_k(2))
    assert out.frequency_factor == 2
    assert out.kind in ("frequency_factor", "witness")


def test_perturbed_has_no_witness():
    out = find_common_witness(TrigPoly.cos_k(4, 0.1), TrigPoly.sin_k(1))
    assert out.kind == "none"
    assert not out.found


def test_nonzero_mean_has_no_witness():
    out = find_common_witness(TrigPoly(1.0, [1], [0]), TrigPoly.sin_k(1))
    assert out.kind == "none"


def test_both_zero():
    with pytest.raises(BothZero):
        find_common_witness(TrigPoly(), TrigPoly())


def test_solve_outer_poly():
    h = TrigPoly(0, [1], [2])
    F = compose_poly(RealPoly([3, -1, 0.5]), h)
    P = solve_outer_poly(F, h)
    assert np.allclose(P.coeffs, [3, -1, 0.5])
    with pytest.raises(NoSolution) as exc:
        solve_outer_poly(TrigPoly.cos_k(2) + TrigPoly.sin_k(2, 0.3), TrigPoly.cos_k(1))
    assert exc.value.residual > 1e-3


def test_peel_recovers_inner():
    h = TrigPoly(0, [0.3, -0.7], [0.5, 0.2])
    A = compose_poly(RealPoly([0, 0, 0, -2.0]), h)
    cands = peel_candidates(A, 2)
    # P is normalized to a +-1 leading coefficient, so H is a multiple of h
    def proportional(H):
        c = np.dot(H(T), h(T)) / np.dot(h(T), h(T))
        return np.allclose(H(T), c * h(T), atol=1e-9)
    assert any(proportional(H) for H in cands)
    for H in cands:
        solve_outer_poly(A, H)


def test_peel_even_negative_leading():
    # P with a negative leading coefficient and even degree
    h = TrigPoly(0, [1], [0.5])
    A = compose_poly(RealPoly([0, 1, -1]), h)
    assert peel_candidates(A, 1)


def test_witness_serialization():
    w = CompositionWitness(RealPoly([0, 2]), RealPoly([1]), TrigPoly.sin_k(1))
    again = CompositionWitness.from_dict(w.to_dict())
    assert again.p == w.p and again.q == w.q and again.h.almost_equal(w.h)


small = st.floats(-1, 1, allow_nan=False).filter(lambda v: abs(v) > 0.05)


@settings(max_examples=60, deadline=None)
@given(st.lists(small, min_size=1, max_size=4), st.lists(small, min_size=1, max_size=4),
       st.integers(1, 2), st.data())
def test_round_trip_random_witness(pc, qc, dh, data):
    hc = data.draw(st.lists(small, min_size=2 * dh, max_size=2 * dh))
    h = TrigPoly(0, hc[:dh], hc[dh:])
    a, b = construct_from_witness(RealPoly(pc), RealPoly(qc), h)
    out = find_common_witness(a, b)
    assert out.found
    assert verify_witness(a, b, out.witness) < 1e-8
    # brute-force oracle: the recovered inner function generates both primitives
    w = out.witness
    a2 = compose_poly(w.p, w.h) * derivative(w.h)
    assert np.allclose(a2(T), a(T), atol=1e-8)


def test_perturbed_witness_rejected():
    a, b = construct_from_witness(RealPoly([0, 1]), RealPoly([1, 1]), TrigPoly.sin_k(1))
    out = find_common_witness(a, b + TrigPoly.sin_k(3, 1e-3))
    assert not out.found
    assert out.residual > 1e-9


SIN2 = TrigPoly(0.5, [0, -0.5], [0, 0])


def test_solve_outer_examples():
    assert np.allclose(solve_outer_poly(SIN2, TrigPoly.sin_k(1)).coeffs, [0, 0, 1], atol=1e-12)
    assert np.allclose(solve_outer_poly(TrigPoly.sin_k(1), TrigPoly.sin_k(1)).coeffs, [0, 1])
    with pytest.raises(NoSolution):
        solve_outer_poly(TrigPoly.cos_k(1), TrigPoly.sin_k(1))


def _has_multiple(cands, ref):
    r = ref(T)
    for H in cands:
        c = np.dot(H(T), r) / np.dot(r, r)
        if abs(c) > 1e-6 and np.allclose(H(T), c * r, atol=1e-10):
            return True
    return False


def test_peel_examples():
    # sin^2 = P(+-sin t) with P = x^2, and also 1 - cos^2 with P = -x^2 + 1
    cands = peel_candidates(SIN2, 1)
    assert any(H.almost_equal(TrigPoly.sin_k(1)) for H in cands)
    assert any(H.almost_equal(TrigPoly.sin_k(1, -1.0)) for H in cands)
    # cos 2t = 2 cos^2 t - 1; the +-1 normalization rescales the inner function
    assert _has_multiple(peel_candidates(TrigPoly.cos_k(2), 1), TrigPoly.cos_k(1))
    cands = peel_candidates(TrigPoly.sin_k(1), 1)
    assert len(cands) == 1 and cands[0].almost_equal(TrigPoly.sin_k(1))
