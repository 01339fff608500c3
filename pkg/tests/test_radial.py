import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import first_zero_j1, impedance_vacuum_l1, ode_trace

from layered_stekloff.errors import DegenerateTrace, InteriorResonance, InvalidMedium
from layered_stekloff.radial import (
    LayeredMedium,
    Polarization,
    check_assumption,
    radial_traces,
    te_impedance,
    te_impedances,
    te_radial_trace,
    tm_radial_trace,
    transfer_matrices,
)
from layered_stekloff.verification import random_medium

VACUUM = LayeredMedium.homogeneous(1.0)
TWO_LAYER = LayeredMedium((0.5, 1.0), (4.0, 1.0))


def test_vacuum_te_trace():
    tr = te_radial_trace(VACUUM, 1.0, 1)
    assert tr.value_at_R == pytest.approx(math.sin(1) - math.cos(1), rel=1e-14)
    assert tr.riccati_at_R == pytest.approx(math.cos(1), rel=1e-14)
    assert abs(tr.value_at_R - 0.3011686789) < 1e-10
    assert abs(tr.riccati_at_R - 0.5403023059) < 1e-10


@pytest.mark.parametrize("pol,tm", [(Polarization.TE, False), (Polarization.TM, True)])
@pytest.mark.parametrize("l", [1, 2, 5])
def test_two_layer_against_ode(pol, tm, l):
    value, ric = radial_traces(TWO_LAYER, 1.0, l, pol)
    ov, od = ode_trace(TWO_LAYER.radii, TWO_LAYER.eps, 1.0, l, tm)
    assert abs(value[l] - ov) <= 1e-9 * abs(ov)
    assert abs(ric[l] - od) <= 1e-9 * abs(od)


def test_random_media_against_ode():
    rng = np.random.default_rng(21)
    for _ in range(3):
        med = random_medium(rng, absorbing=bool(rng.integers(2)))
        for pol, tm in ((Polarization.TE, False), (Polarization.TM, True)):
            value, ric = radial_traces(med, 1.0, 10, pol)
            for l in (1, 4, 10):
                ov, od = ode_trace(med.radii, med.eps, 1.0, l, tm)
                assert abs(value[l] - ov) <= 1e-8 * abs(ov)
                assert abs(ric[l] - od) <= 1e-8 * abs(od)


def test_homogeneous_tm_trace_is_j():
    k0 = first_zero_j1()
    assert abs(tm_radial_trace(VACUUM, k0, 1).value_at_R) < 1e-15
    assert tm_radial_trace(VACUUM, 2.0, 1).value_at_R == pytest.approx(
        math.sin(2) / 4 - math.cos(2) / 2, rel=1e-14
    )


@settings(max_examples=25, deadline=None)
@given(frac=st.floats(0.05, 0.95), k=st.floats(0.2, 8), seed=st.integers(0, 2**32 - 1))
def test_null_interface_changes_nothing(frac, k, seed):
    med = random_medium(np.random.default_rng(seed), absorbing=True)
    lo, hi = med.inner_radii[1], med.radii[1]
    split = med.split(1, lo + frac * (hi - lo))
    for pol in Polarization:
        a = np.column_stack(radial_traces(med, k, 12, pol))
        b = np.column_stack(radial_traces(split, k, 12, pol))
        assert np.all(np.abs(a - b) <= 1e-12 * np.abs(a))


def test_transfer_determinant_matches_closed_form():
    rng = np.random.default_rng(8)
    for _ in range(5):
        med = random_medium(rng, absorbing=True)
        for pol in Polarization:
            for t in transfer_matrices(med, 1.7, 20, pol):
                rel = np.abs(t["det"] - t["det_closed"]) / np.abs(t["det_closed"])
                assert np.all(rel <= 1e-10)
                assert np.allclose(np.linalg.det(t["matrix"]), t["det_closed"], rtol=1e-10)


def test_real_media_give_real_traces():
    rng = np.random.default_rng(2)
    for _ in range(5):
        med = random_medium(rng)
        for pol in Polarization:
            v, d = radial_traces(med, 2.3, 15, pol)
            assert np.all(np.abs(v.imag) <= 1e-12 * np.abs(v))
            assert np.all(np.abs(d.imag) <= 1e-12 * np.abs(d))


def test_vacuum_impedance_oracle():
    assert te_impedance(VACUUM, 1.0, 1) == pytest.approx(impedance_vacuum_l1(), rel=1e-14)


def test_real_media_have_real_impedance():
    med = random_medium(np.random.default_rng(0))
    Z, mask = te_impedances(med, 1.0, 20)
    assert not mask.any()
    assert np.all(np.abs(Z.imag) <= 1e-12 * np.abs(Z))


def test_interior_resonance():
    with pytest.raises(InteriorResonance) as info:
        te_impedance(VACUUM, first_zero_j1(), 1)
    assert info.value.degree == 1
    Z, mask = te_impedances(VACUUM, first_zero_j1(), 3)
    assert mask.tolist() == [True, False, False]
    assert np.isnan(Z[0])


def test_check_assumption_examples():
    assert check_assumption(VACUUM, 1.0, 5).all_clear
    rep = check_assumption(VACUUM, 4.4934095, 3)
    assert rep.tm_degrees == (1,)
    assert 1 in rep.degrees and not rep.all_clear
    lossy = LayeredMedium((0.4, 1.0), (1 + 0.5j, 1.0))
    for k in np.linspace(0.5, 12, 24):
        assert check_assumption(lossy, k, 10).all_clear


def test_check_assumption_separates_polarizations():
    # for eps = 4 inside, TE and TM radial problems differ; a TE zero is
    # reported separately from the TM condition
    med = LayeredMedium((0.5, 1.0), (4.0, 1.0))
    ks = np.linspace(0.5, 8, 4000)
    te = [abs(radial_traces(med, k, 1, Polarization.TE)[0][1]) for k in ks]
    i = int(np.argmin(te))
    lo, hi = ks[max(i - 1, 0)], ks[min(i + 1, len(ks) - 1)]
    f = lambda k: radial_traces(med, k, 1, Polarization.TE)[0][1].real
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if (f(mid) < 0) == (f(lo) < 0):
            lo = mid
        else:
            hi = mid
    rep = check_assumption(med, 0.5 * (lo + hi), 1)
    assert rep.te_degrees == (1,) and rep.tm_degrees == ()


def test_invalid_media():
    with pytest.raises(InvalidMedium):
        LayeredMedium((1.0, 0.5), (2, 1))
    with pytest.raises(InvalidMedium):
        LayeredMedium((0.5, 0.5), (2, 1))
    with pytest.raises(InvalidMedium):
        LayeredMedium((1.0,), (2 - 0.1j,))
    with pytest.raises(InvalidMedium):
        LayeredMedium((1.0,), (0.0,))
    with pytest.raises(InvalidMedium):
        LayeredMedium((0.5, 1.0), (2,))
    with pytest.raises(InvalidMedium):
        radial_traces(VACUUM, -1.0, 2)


def test_underflowing_trace_is_reported():
    with pytest.raises(DegenerateTrace):
        te_radial_trace(VACUUM, 1e-4, 64)


def test_eps_lookup_and_helpers():
    med = LayeredMedium((0.3, 0.6, 1.0), (3, 2 + 1j, 1.5))
    assert med.eps_at([0.1, 0.45, 0.9, 1.5]).tolist() == [3, 2 + 1j, 1.5, 1]
    assert med.is_absorbing and not med.is_real
    assert med.with_eps(1, 2.0).is_real
    with pytest.raises(InvalidMedium):
        med.split(0, 0.5)
