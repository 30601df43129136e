import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy.integrate import quad

import conetip as ct
from conetip.errors import (CriticalContrastExcluded, InvalidGeometry,
                            NoTransitionFound, SeriesDomain)


def test_hyp2f1_at_zero():
    for abc in ((0.5, 0.5, 1.0), (1.5, 1.5, 2.0), (3.0, -2.0, 0.7)):
        assert ct.hyp2f1(*abc, 0.0) == 1.0


@given(st.floats(0.05, 1.5), st.floats(-0.9, 0.9))
@settings(max_examples=60, deadline=None)
def test_hyp2f1_binomial_identity(a, z):
    # 2F1(a, b; b; z) = (1 - z)^(-a) for any b
    assert_allclose(ct.hyp2f1(a, 0.75, 0.75, z), (1.0 - z) ** (-a), rtol=1e-12)


def test_hyp2f1_elliptic_oracle():
    # 2F1(1/2, 1/2; 1; z) = (2/pi) K(sqrt(z)) with K from direct quadrature
    z = 0.25
    k = np.sqrt(z)
    K, _ = quad(lambda t: 1.0 / np.sqrt(1.0 - k * k * np.sin(t) ** 2),
                0.0, np.pi / 2, epsabs=1e-13, epsrel=1e-13)
    assert_allclose(ct.hyp2f1(0.5, 0.5, 1.0, z), 2.0 / np.pi * K, rtol=1e-10)


def test_hyp2f1_domain_errors():
    with pytest.raises(SeriesDomain):
        ct.hyp2f1(0.5, 0.5, 1.0, 0.995)
    with pytest.raises(SeriesDomain):
        ct.hyp2f1(0.5, 0.5, -2.0, 0.5)


def test_aleph_quarter_aperture():
    assert round(ct.aleph(np.pi / 4), 3) == 0.218


def test_aleph_symmetric_point_exact():
    assert ct.aleph(np.pi / 2) == 1.0


def test_aleph_reciprocal_symmetry():
    for alpha in np.linspace(0.3, np.pi - 0.3, 20):
        assert abs(ct.aleph(alpha) * ct.aleph(np.pi - alpha) - 1.0) < 1e-10


def test_aleph_monotone_guard():
    with pytest.raises(InvalidGeometry):
        ct.aleph(0.05)
    with pytest.raises(InvalidGeometry):
        ct.aleph(np.pi - 0.05)


def test_has_blackhole(quarter_tip):
    flag, wit = ct.has_blackhole(quarter_tip, -0.5, modes=range(5), elements=64)
    assert flag and wit and wit[0][0] == 0
    flag, wit = ct.has_blackhole(quarter_tip, -0.1, modes=range(5), elements=64)
    assert not flag and wit == []
    with pytest.raises(CriticalContrastExcluded):
        ct.has_blackhole(quarter_tip, 0.5)


def test_scan_interval_quarter(quarter_tip):
    ci = ct.scan_interval(quarter_tip, kappa_range=(-0.6, -0.05), grid=12,
                          bisect_tol=1e-3, modes=(0, 1, 2), elements=64)
    assert ci.flags == ()
    target = -ct.aleph(np.pi / 4)
    assert_allclose(ci.closed_form, target, rtol=1e-12)
    assert abs(ci.endpoint_outer - target) / abs(target) < 0.02
    assert ci.attaining_mode == 0
    # detected interval contains every critical grid point, excludes the rest
    for k in ci.grid:
        flag, _ = ct.has_blackhole(quarter_tip, k, modes=(0, 1, 2), elements=64,
                                   stop_at_first=True)
        between = min(ci.endpoint_inner, ci.endpoint_outer) - 1e-9 <= k \
            <= max(ci.endpoint_inner, ci.endpoint_outer) + 1e-9
        assert flag == between


def test_scan_interval_guards(quarter_tip):
    with pytest.raises(CriticalContrastExcluded):
        ct.scan_interval(quarter_tip, kappa_range=(-1.5, -0.5))
    with pytest.raises(CriticalContrastExcluded):
        ct.scan_interval(quarter_tip, kappa_range=(-0.99, -0.5))
    with pytest.raises(NoTransitionFound):
        ct.scan_interval(quarter_tip, kappa_range=(-0.12, -0.05), grid=5,
                         modes=(0,), elements=48)


def test_scan_interval_wide_aperture():
    # mirror aperture: the interval flips to the far side of -1 and the
    # endpoint is the reciprocal of the pi/4 one
    g = ct.CapGeometry("internal", 3 * np.pi / 4)
    ci = ct.scan_interval(g, kappa_range=(-7.0, -1.2), grid=10,
                          bisect_tol=5e-3, modes=(0, 1), elements=64)
    target = -1.0 / ct.aleph(np.pi / 4)
    assert abs(ci.endpoint_outer - target) / abs(target) < 0.02
    assert_allclose(ci.closed_form, -ct.aleph(3 * np.pi / 4), rtol=1e-12)
    assert_allclose(ci.closed_form, target, rtol=1e-10)


def test_line_count_grows_toward_minus_one(quarter_tip):
    counts = []
    for kappa in (-0.5, -0.7, -0.85, -0.95):
        _, wit = ct.has_blackhole(quarter_tip, kappa, modes=range(4), elements=96)
        counts.append(len(wit))
    assert all(b >= a for a, b in zip(counts, counts[1:]))
    assert counts[-1] > counts[0]
