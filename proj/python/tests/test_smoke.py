import numpy as np
import pytest

import chblab


def test_obstacle_values():
    spec = chblab.PotentialSpec.obstacle(0.1)
    r = np.array([0.0, 1.05, 5.0])
    assert chblab.psi(spec, r)[0] == pytest.approx(0.5)
    assert chblab.beta_hat(spec, r)[1] == pytest.approx(0.05**3 / 0.06)
    assert chblab.beta_prime(spec, r)[2] == pytest.approx(10.0)


def test_log_potential_matches_formula():
    spec = chblab.PotentialSpec.logarithmic(1.0, 2.0, 0.25)
    expected = 0.5 * (1.5 * np.log(1.5) + 0.5 * np.log(0.5)) + 0.75
    assert chblab.psi(spec, np.array([0.5]))[0] == pytest.approx(expected, rel=1e-13)


def test_cutoff_plateau():
    s = np.linspace(-3, 3, 101)
    t = chblab.cutoff(0.1, s)
    assert np.all(np.diff(t) >= 0)
    assert t.max() == pytest.approx(0.925)


def test_sources():
    m = chblab.SourceModel.example(1.0, 0.5, 1.0, 2.0, chblab.PotentialKind.obstacle)
    assert m.gamma_phi(0.0, 1.0) == pytest.approx(2.0)
    assert m.gamma(1.0, 0.3) == pytest.approx(0.5)
    with pytest.raises(ValueError, match="B1"):
        chblab.SourceModel.example(1.0, 0.5, 2.0, 1.0, chblab.PotentialKind.obstacle)


def test_nutrient_without_consumption():
    g = chblab.Grid(16, 12, 4.0, 3.0)
    phi = np.random.default_rng(0).uniform(-1, 1, (12, 16))
    sigma = chblab.solve_nutrient(g, phi, K=2.0, h0=0.0)
    assert sigma.shape == (12, 16)
    assert np.allclose(sigma, 1.0, atol=1e-10)
    with pytest.raises(ValueError):
        chblab.solve_nutrient(g, phi.T)


def test_divergence_lift():
    g = chblab.Grid(20, 20)
    f = np.full((20, 20), 1.7)
    d, flux, _ = chblab.divergence_lift(g, f)
    assert np.allclose(d, f, atol=1e-8)
    assert flux == pytest.approx(1.7 / 4)


def test_gradient_flow_energy_decreases():
    out = chblab.simulate(
        "",
        [
            "grid.nx=16",
            "grid.lx=4",
            "source.enabled=false",
            "flow.mode=none",
            "time.t_end=0.2",
            "time.dt=0.02",
            "init.kind=random",
            "init.amplitude=0.5",
        ],
    )
    E = out["ledger"]["E"]
    slack = out["ledger"]["energy_slack"]
    assert len(E) == 10
    assert np.all(np.diff(E) <= slack[1:])
    assert out["phi"].shape == (16, 16)


def test_stationary_trivial():
    out = chblab.stationary("", ["grid.nx=16", "grid.lx=4", "source.enabled=false", "init.kind=uniform"])
    assert out["converged"]
    assert np.abs(out["phi"]).max() < 1e-10


def test_config_errors():
    with pytest.raises(chblab.ConfigError, match="B1"):
        chblab.simulate("", ["source.rho_S=0.5"])
    with pytest.raises(chblab.ConfigError):
        chblab.simulate("", ["grid.bogus=1"])
