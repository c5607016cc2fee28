import numpy as np
import pytest

from freedeconv.errors import (
    DimensionMismatchError,
    NonSelfadjointError,
)
from freedeconv.models import CwModel, SpnModel, cw_moments, spn_moments
from freedeconv.randmat import (
    EmpiricalSpectrum,
    GinibreSpec,
    cw_sampler,
    eigenvalues_selfadjoint,
    empirical_spectrum,
    realize_cw,
    realize_spn,
    sample_ginibre,
    scale_spn_model,
    spn_sampler,
    trial_seeds,
)


# -------------------------------------------------------------------- sampling

def test_ginibre_same_seed_is_bit_identical():
    spec = GinibreSpec(5, 3, seed=123)
    assert np.array_equal(sample_ginibre(spec), sample_ginibre(spec))


def test_ginibre_moments_real():
    spec = GinibreSpec(400, 250, seed=0)
    z = sample_ginibre(spec)
    n = z.size
    se_mean = np.sqrt(spec.entry_variance / n)
    assert abs(z.mean()) < 4 * se_mean
    # E|Z|^2 = v within four standard errors (fourth moment 3v^2 for Gaussian)
    se_var = np.sqrt(2.0) * spec.entry_variance / np.sqrt(n)
    assert abs(np.mean(z**2) - spec.entry_variance) < 4 * se_var


def test_ginibre_moments_complex():
    spec = GinibreSpec(400, 250, field="complex", seed=1)
    z = sample_ginibre(spec)
    assert np.iscomplexobj(z)
    n = z.size
    se_var = spec.entry_variance / np.sqrt(n)
    assert abs(np.mean(np.abs(z) ** 2) - spec.entry_variance) < 4 * se_var


def test_trial_seeds_deterministic_and_distinct():
    seeds = trial_seeds(42, 10)
    assert seeds == trial_seeds(42, 10)
    assert len(set(seeds)) == 10
    assert seeds != trial_seeds(43, 10)


# ---------------------------------------------------------------- realization

def test_realize_cw_zero_and_identity():
    model = CwModel(6, 4, (0.0,) * 6)
    spec = GinibreSpec(6, 4, seed=3)
    assert np.allclose(realize_cw(model, spec), 0.0)
    eye = CwModel(300, 200, (1.0,) * 300)
    w = realize_cw(eye, GinibreSpec(300, 200, seed=4))
    assert np.allclose(w, w.T)
    assert np.trace(w) / 200 == pytest.approx(300 / 200, rel=0.05)


def test_realize_cw_dimension_check():
    with pytest.raises(DimensionMismatchError):
        realize_cw(CwModel(6, 4, (1.0,) * 6), GinibreSpec(5, 4, seed=0))


def test_realize_spn_sigma_zero_is_squared_diagonal():
    model = SpnModel(5, 3, (1.0, 2.0, 3.0), 0.0)
    w = realize_spn(model, GinibreSpec(5, 3, seed=5))
    assert np.allclose(w, np.diag([1.0, 4.0, 9.0]))


def test_realize_spn_zero_signal_is_scaled_wishart():
    model = SpnModel(4, 3, (0.0, 0.0, 0.0), 2.0)
    spec = GinibreSpec(4, 3, seed=6)
    z = sample_ginibre(spec)
    assert np.allclose(realize_spn(model, spec), 4.0 * z.T @ z)


def test_realize_spn_mean_trace():
    model = SpnModel(400, 200, tuple(np.linspace(0, 2, 200)), 0.7)
    lam = 0.5
    expect = float(np.mean(np.linspace(0, 2, 200) ** 2)) + 0.49 / lam
    traces = [
        np.trace(realize_spn(model, GinibreSpec(400, 200, seed=s))) / 200
        for s in range(5)
    ]
    assert np.mean(traces) == pytest.approx(expect, rel=0.03)


def test_realize_spn_is_positive_semidefinite():
    model = SpnModel(6, 4, (0.5, 1.0, 1.5, 2.0), 1.2)
    w = realize_spn(model, GinibreSpec(6, 4, field="complex", seed=7))
    eigs = eigenvalues_selfadjoint(w)
    assert np.all(eigs > -1e-12)


# ---------------------------------------------------------------- eigenvalues

def test_eigenvalues_diagonal_and_swap():
    assert np.allclose(
        eigenvalues_selfadjoint(np.diag([3.0, 1.0, 2.0])), [1.0, 2.0, 3.0]
    )
    assert np.allclose(
        eigenvalues_selfadjoint(np.array([[0.0, 1.0], [1.0, 0.0]])), [-1.0, 1.0]
    )


def test_eigenvalues_trace_preservation():
    rng = np.random.default_rng(8)
    m = rng.normal(size=(40, 40))
    m = (m + m.T) / 2
    eigs = eigenvalues_selfadjoint(m)
    scale = np.abs(m).max()
    assert abs(eigs.sum() - np.trace(m)) <= 1e-9 * max(scale, 1.0) * 40


def test_eigenvalues_rejects_asymmetric():
    with pytest.raises(NonSelfadjointError):
        eigenvalues_selfadjoint(np.array([[0.0, 1.0], [0.0, 0.0]]))


# ------------------------------------------------------------------- spectrum

def test_empirical_spectrum_single_trial_sigma_zero():
    model = SpnModel(4, 2, (1.0, 2.0), 0.0)
    spec = empirical_spectrum(spn_sampler(model), 1, 2, master_seed=11)
    assert isinstance(spec, EmpiricalSpectrum)
    assert np.allclose(spec.eigenvalues, [1.0, 4.0])
    assert spec.moments[0] == pytest.approx(2.5)


def test_empirical_spectrum_standard_wishart_first_moment():
    model = CwModel(200, 200, (1.0,) * 200)
    spec = empirical_spectrum(cw_sampler(model), 20, 2, master_seed=12)
    assert abs(spec.moments[0] - 1.0) < 0.02
    assert len(spec.eigenvalues) == 200 * 20


def test_empirical_moments_converge_with_dimension():
    base = SpnModel(8, 4, (0.5, 1.0, 1.5, 2.0), 0.6)
    predicted = [float(c) for c in spn_moments(base, 3, "float").coeffs]

    def worst_error(factor, trials=8):
        model = scale_spn_model(base, factor)
        emp = empirical_spectrum(spn_sampler(model), trials, 3, master_seed=13)
        return max(
            abs(e - p) / abs(p) for e, p in zip(emp.moments, predicted)
        )

    assert worst_error(100) < worst_error(25) + 0.01


def test_real_and_complex_fields_share_the_limit():
    model = SpnModel(300, 150, tuple(np.linspace(0.2, 1.8, 150)), 0.8)
    real = empirical_spectrum(spn_sampler(model, "real"), 6, 4, master_seed=14)
    cplx = empirical_spectrum(spn_sampler(model, "complex"), 6, 4, master_seed=14)
    for a, b in zip(real.moments, cplx.moments):
        assert abs(a - b) / abs(b) < 0.03


def test_cw_empirical_matches_prediction():
    model = CwModel(400, 200, tuple(np.linspace(0.5, 2.5, 400)))
    predicted = cw_moments(model, 4, "float")
    emp = empirical_spectrum(cw_sampler(model), 15, 4, master_seed=15)
    for e, p in zip(emp.moments, predicted.coeffs):
        assert abs(e - p) / abs(p) < 0.03
