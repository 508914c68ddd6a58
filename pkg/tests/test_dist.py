import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photonfisher.dist import (
    SS, SSW, Borel, Coherent, Dowling, Geometric, Logarithmic, MAndM, NegativeBinomial,
    SmallPeak, SqueezedVacuum, Support, Zeta, compose_small_peak, make_pmf,
)
from photonfisher.errors import InvalidParameter, VacuumOverlap
from photonfisher.moments import moments_by_summation


def test_mandm_balanced_pmf():
    pmf = make_pmf(MAndM(0, 10, 0.5))
    assert pmf(0) == 0.5
    assert pmf(10) == 0.5
    assert all(pmf(n) == 0.0 for n in range(1, 10))
    assert pmf(11) == 0.0


def test_geometric_pmf_values():
    pmf = make_pmf(Geometric(0.5))
    assert pmf(0) == pytest.approx(0.5, rel=1e-15)
    assert pmf(2) == pytest.approx(0.125, rel=1e-15)


def test_ssw_normalization_matches_exact_rational():
    # 1 / (1 + 1/4 + 1/9) = 36/49, computed with fractions
    assert make_pmf(SSW(2))(0) == pytest.approx(36 / 49, rel=1e-15)
    assert make_pmf(SSW(2))(0) == pytest.approx(0.7347, abs=1e-4)


def test_ss_reduces_to_ssw_at_unit_z():
    a, b = make_pmf(SSW(7)), make_pmf(SS(7, 1.0))
    assert [a(n) for n in range(8)] == [b(n) for n in range(8)]


@pytest.mark.parametrize("spec", [
    MAndM(2, 9, 0.3), SSW(40), SS(25, 2.5), Coherent(0.0),
])
def test_bounded_or_trivial_normalization(spec):
    pmf = make_pmf(spec)
    stop = pmf.support.stop if pmf.support.is_bounded else 10
    total = math.fsum(pmf(n) for n in range(0, stop + 1))
    assert abs(total - 1.0) <= 1e-12


@pytest.mark.parametrize("spec", [
    Coherent(3.2), SqueezedVacuum(1.1), Dowling(0.5, 4.0), Geometric(0.2),
    NegativeBinomial(0.4, 2.5), Logarithmic(0.8), Borel(0.7), Zeta(4.0),
])
def test_unbounded_partial_sums_reach_one(spec):
    pmf = make_pmf(spec)
    _, p = pmf.block(0, 200_000)
    assert np.all(p >= 0)
    tol = 1e-5 if isinstance(spec, Zeta) else 1e-12  # zeta tail ~ K^(1-s)
    assert abs(math.fsum(p) - 1.0) <= tol


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 3.0))
def test_squeezed_vacuum_odd_terms_vanish(r):
    n, p = make_pmf(SqueezedVacuum(r)).block(0, 400)
    assert np.all(p[n % 2 == 1] == 0.0)


def test_squeezed_recurrence_does_not_overflow():
    # direct (2n)! overflows doubles past n ~ 85
    pmf = make_pmf(SqueezedVacuum(3.0))
    n, p = pmf.block(0, 5000)
    assert np.all(np.isfinite(p))
    assert pmf(400) > 0


def test_squeezed_vacuum_matches_amplitudes():
    r = 0.7
    t, c = math.tanh(r), math.cosh(r)
    pmf = make_pmf(SqueezedVacuum(r))
    for k in range(6):
        amp = t ** k * math.sqrt(math.factorial(2 * k)) / (2 ** k * math.factorial(k) * math.sqrt(c))
        assert pmf(2 * k) == pytest.approx(amp ** 2, rel=1e-13)


@pytest.mark.parametrize("spec", [Borel(0.3), Borel(0.0), Logarithmic(0.5), Zeta(2.0)])
def test_vacuum_free_families(spec):
    assert make_pmf(spec)(0) == 0.0


def test_borel_zero_mu_is_single_photon():
    pmf = make_pmf(Borel(0.0))
    assert pmf(1) == 1.0
    assert pmf(2) == 0.0


@pytest.mark.parametrize("make", [
    lambda: Geometric(0.0), lambda: Geometric(1.0), lambda: Logarithmic(1.2),
    lambda: Borel(1.0), lambda: Zeta(1.0), lambda: NegativeBinomial(0.5, 0.0),
    lambda: MAndM(5, 5, 0.5), lambda: MAndM(6, 5, 0.5), lambda: MAndM(0, 5, 1.5),
    lambda: MAndM(0, 5.5, 0.5), lambda: SS(10, -1.0), lambda: Dowling(1.0, 0.0),
    lambda: Coherent(-1.0), lambda: SqueezedVacuum(float("nan")),
])
def test_invalid_parameters_rejected(make):
    with pytest.raises(InvalidParameter):
        make()


def test_support_rejects_inverted_bounds():
    with pytest.raises(InvalidParameter):
        Support(5, 3)
    assert 3 in Support(0, 3) and 4 not in Support(0, 3)
    assert 10**9 in Support.unbounded(1)


def test_small_peak_point_inner_is_zero_and_m():
    pmf = compose_small_peak(0.5, MAndM(0, 4, 1.0))
    assert pmf(0) == 0.5 and pmf(4) == 0.5
    assert sum(pmf(n) for n in range(1, 4)) == 0.0


def test_small_peak_mean():
    res = moments_by_summation(compose_small_peak(0.3, MAndM(0, 25, 1.0)))
    assert res.mean == pytest.approx(7.5, rel=1e-15)


def test_small_peak_with_borel_normalizes():
    n, p = compose_small_peak(0.3, Borel(0.5)).block(0, 10_000)
    assert abs(math.fsum(p) - 1.0) <= 1e-12


def test_small_peak_rejects_vacuum_overlap():
    with pytest.raises(VacuumOverlap):
        compose_small_peak(0.5, Geometric(0.5))
    with pytest.raises(VacuumOverlap):
        SmallPeak(0.5, SqueezedVacuum(0.4))


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.05, 0.9))
def test_small_peak_mean_is_weighted_inner_mean(a, mu):
    inner = moments_by_summation(make_pmf(Borel(mu)))
    outer = moments_by_summation(compose_small_peak(a, Borel(mu)))
    assert outer.mean == pytest.approx(a * inner.mean, rel=1e-12, abs=1e-300)
