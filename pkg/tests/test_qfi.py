import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photonfisher.dist import Geometric, SqueezedVacuum, Zeta, compose_small_peak, make_pmf, MAndM
from photonfisher.errors import DivergentQfi, InvalidParameter, NonPositiveQfi, NotConvergedInput
from photonfisher.moments import MomentResult, Status, moments_by_summation, moments_closed_form
from photonfisher.qfi import (
    bhatia_davis_bound, crlb, popoviciu_bound, qfi_coherent, qfi_from_moments, qfi_mandm,
    qfi_mandm_fixed_n, qfi_small_peak, qfi_squeezed,
)


def test_qfi_from_geometric_moments():
    rep = qfi_from_moments(moments_closed_form(Geometric(0.5)))
    assert rep.qfi == 8.0 and rep.finite
    assert rep.delta_phi == pytest.approx(1 / math.sqrt(8.0))


def test_qfi_from_zero_and_m_variance():
    m = MomentResult(7.46, 130.8484, 130.8484 + 7.46 ** 2, Status.EXACT)
    assert qfi_from_moments(m).qfi == pytest.approx(523.39, abs=0.01)


def test_qfi_from_divergent_moments_is_flagged():
    rep = qfi_from_moments(moments_closed_form(Zeta(2.5)))
    assert not rep.finite and math.isinf(rep.qfi) and rep.delta_phi is None


def test_qfi_refuses_unconverged_moments():
    m = MomentResult(1.0, 1.0, 2.0, Status.NOT_CONVERGED, 10)
    with pytest.raises(NotConvergedInput):
        qfi_from_moments(m)


def test_qfi_from_moments_with_repetitions():
    rep = qfi_from_moments(MomentResult(0, 25.0, 25.0, Status.EXACT), nu=100)
    assert rep.delta_phi == pytest.approx(0.01, rel=1e-15)


def test_coherent_benchmark():
    assert qfi_coherent(4) == 16
    assert qfi_coherent(0) == 0
    assert qfi_coherent(7.46) == pytest.approx(29.84, rel=1e-15)


def test_squeezed_qfi():
    assert qfi_squeezed(7.46) == pytest.approx(504.89, abs=0.01)
    assert qfi_squeezed(0) == 0
    assert qfi_squeezed(1) == 16
    summed = moments_by_summation(make_pmf(SqueezedVacuum.from_mean(1.0)))
    assert 4 * summed.variance == pytest.approx(16.0, rel=1e-8)


def test_mandm_qfi():
    assert qfi_mandm(0.5, 0, 10) == 100
    assert qfi_mandm(0.2984, 0, 25) == pytest.approx(523.39, abs=0.01)
    assert qfi_mandm(0.0, 0, 25) == 0 and qfi_mandm(1.0, 0, 25) == 0
    with pytest.raises(InvalidParameter):
        qfi_mandm(1.2, 0, 5)
    with pytest.raises(InvalidParameter):
        qfi_mandm(0.5, 5, 5)


def test_mandm_fixed_n_qfi():
    assert qfi_mandm_fixed_n(0, 25, 7.46) == pytest.approx(523.39, abs=0.01)
    assert qfi_mandm_fixed_n(2, 9, 2) == 0 and qfi_mandm_fixed_n(2, 9, 9) == 0
    # H ~ 4 M N for M >> N; M = 3352 sits just under 1e5
    h = qfi_mandm_fixed_n(0, 3352, 7.46)
    assert 9.9e4 < h < 1e5
    with pytest.raises(InvalidParameter):
        qfi_mandm_fixed_n(0, 25, 30.0)


def test_small_peak_qfi():
    assert qfi_small_peak(0.5, 4, 0) == 16
    assert qfi_small_peak(0.2984, 25, 0) == pytest.approx(523.39, abs=0.01)
    assert qfi_small_peak(0.5, 2, 3) == pytest.approx(10.0, rel=1e-15)
    # inner {1: 3/4, 5: 1/4} has mean 2 and variance 3
    summed = moments_by_summation(compose_small_peak(0.5, MAndM(1, 5, 0.25)))
    assert 4 * summed.variance == pytest.approx(10.0, rel=1e-12)
    with pytest.raises(InvalidParameter):
        qfi_small_peak(0.5, 0.0, 1.0)


def test_crlb():
    assert crlb(504.89) == pytest.approx(0.04451, abs=1e-5)
    assert crlb(4) == 0.5
    assert crlb(100, 100) == pytest.approx(0.01, rel=1e-15)
    with pytest.raises(NonPositiveQfi):
        crlb(0.0)
    with pytest.raises(DivergentQfi):
        crlb(math.inf)
    with pytest.raises(InvalidParameter):
        crlb(4.0, 0)


def test_popoviciu_and_bhatia_davis():
    assert popoviciu_bound(0, 10) == 25
    assert popoviciu_bound(4, 4) == 0
    assert popoviciu_bound(0, 25) == 156.25
    assert bhatia_davis_bound(0, 25, 7.46) == pytest.approx(130.8484, rel=1e-13)
    assert bhatia_davis_bound(3, 11, 7) == popoviciu_bound(3, 11)
    assert bhatia_davis_bound(3, 11, 3) == 0
    with pytest.raises(InvalidParameter):
        bhatia_davis_bound(0, 5, 6)


@st.composite
def bounded_pmfs(draw):
    m = draw(st.integers(0, 20))
    M = draw(st.integers(m + 1, m + 25))
    w = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=M - m + 1, max_size=M - m + 1)))
    if w.sum() == 0:
        w[0] = 1.0
    return m, M, w / w.sum()


@settings(max_examples=200, deadline=None)
@given(bounded_pmfs())
def test_variance_below_bhatia_davis_below_popoviciu(case):
    m, M, p = case
    n = np.arange(m, M + 1)
    mean = float(np.dot(n, p))
    var = float(np.dot((n - mean) ** 2, p))
    mean = min(max(mean, m), M)
    bd = bhatia_davis_bound(m, M, mean)
    assert var <= bd * (1 + 1e-12) + 1e-12
    assert bd <= popoviciu_bound(m, M) * (1 + 1e-15)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 50), st.integers(1, 60), st.floats(0.0, 1.0))
def test_two_point_pmf_attains_bhatia_davis(m, gap, a):
    M = m + gap
    mom = moments_closed_form(MAndM(m, M, a))
    bd = bhatia_davis_bound(m, M, min(max(mom.mean, m), M))
    assert mom.variance == pytest.approx(bd, rel=1e-9, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 100), st.integers(1, 100), st.floats(0.0, 1.0))
def test_fixed_n_agrees_with_weight_form(m, gap, frac):
    M = m + gap
    N = m + frac * gap
    a = (N - m) / (M - m)
    assert qfi_mandm_fixed_n(m, M, N) == pytest.approx(qfi_mandm(a, m, M), rel=1e-12, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 500), st.floats(0.0, 1.0))
def test_small_peak_point_inner_equals_zero_and_m(M, a):
    assert qfi_small_peak(a, M, 0.0) == pytest.approx(qfi_mandm_fixed_n(0, M, a * M), rel=1e-12, abs=1e-9)


@pytest.mark.parametrize("N", [0.05, 0.5, 1.0, 3.3, 7.46, 20.0])
def test_squeezed_qfi_matches_summation_oracle(N):
    summed = moments_by_summation(make_pmf(SqueezedVacuum.from_mean(N)))
    assert qfi_squeezed(N) == pytest.approx(4 * summed.variance, rel=1e-8)


def test_fixed_n_monotonicity():
    N = 7.46
    hs = [qfi_mandm_fixed_n(0, M, N) for M in range(8, 200)]
    assert all(b > a for a, b in zip(hs, hs[1:]))
    hs = [qfi_mandm_fixed_n(m, 40, N) for m in range(0, 8)]
    assert all(b < a for a, b in zip(hs, hs[1:]))
