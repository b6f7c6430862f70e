from fractions import Fraction

import numpy as np
import pytest

import rmt

GUE = {"kind": "gue", "sigma": 1}


def test_rg_flow_catalan():
    out = rmt.rg_flow(7, sigma=1)
    assert out["resolvent"] == [1, 0, 1, 0, 2, 0, 5]
    assert out["bounds_ok"]
    assert not out["truncated"]
    assert out["flow"]["schema"] == "rmt-flow/1"


def test_rg_flow_sigma_scaling():
    out = rmt.rg_flow(5, sigma=Fraction(1, 2))
    assert out["resolvent"] == [1, 0, Fraction(1, 4), 0, Fraction(1, 8)]


def test_trace_moment_exact():
    for n in range(2, 7):
        assert rmt.trace_moment_expectation(n, 4) == 2 + Fraction(1, n * n)


def test_sample_and_eigenvalues():
    m = rmt.sample_matrix(GUE, 16, seed=3)
    assert m.shape == (16, 16)
    assert np.allclose(m, m.conj().T)
    ours = rmt.eigenvalues_hermitian(m)
    ref = np.linalg.eigvalsh(m)
    assert np.allclose(ours, ref, atol=1e-10)
    again = rmt.sample_matrix(GUE, 16, seed=3)
    assert np.array_equal(m, again)


def test_spectra_moments_and_ks():
    spectra = rmt.sample_spectra(GUE, 128, 4, seed=11)
    assert len(spectra) == 4
    pooled = np.concatenate(spectra)
    assert abs(np.mean(pooled**2) - 1) < 0.05
    assert rmt.esd_moment(list(spectra[0]), 2) == pytest.approx(np.mean(spectra[0] ** 2))
    assert rmt.ks_distance_to_semicircle(list(pooled), 1.0) < 0.05


def test_semicircle_reference():
    assert rmt.semicircle_moment(4) == pytest.approx(2.0)
    assert rmt.semicircle_density(0.0) == pytest.approx(1 / np.pi)
    g = rmt.semicircle_resolvent(3.0)
    assert g == pytest.approx((3 - np.sqrt(5)) / 2)


def test_graphs():
    assert rmt.is_eulerian("v=2;e=0->1,1->0")
    assert not rmt.is_eulerian("v=2;e=0->1,0->1")
    assert rmt.aut_order("v=4;e=0->1,1->0,2->3,3->2") == 8
    assert rmt.scaling_exponent("v=1;e=0->0") == Fraction(-1, 2)
    assert rmt.canonical_form("v=2;e=1->0") == rmt.canonical_form("v=2;e=0->1")
    assert rmt.catalan(10) == 16796


def test_cumulant_scan_rows():
    rows = rmt.cumulant_scan(GUE, ["v=4;e=0->1,1->0,2->3,3->2"], [4, 8, 12], 200, seed=5)
    assert [r["N"] for r in rows] == [4, 8, 12]
    assert all(r["verdict"] == "consistent_vanishing" for r in rows)


def test_errors():
    with pytest.raises(rmt.RmtError, match="ensemble.kind"):
        rmt.sample_matrix({"kind": "goe"}, 4, seed=1)
    with pytest.raises(rmt.RmtError, match="capacity"):
        rmt.rg_flow(20)
    with pytest.raises(rmt.RmtError):
        rmt.eigenvalues_hermitian(np.array([[1, 2], [3, 4]], dtype=complex))
