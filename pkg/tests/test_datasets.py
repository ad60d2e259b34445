import numpy as np
import pytest

from parapde.datasets import (
    BenchmarkSpec,
    add_noise,
    advection_diffusion_grid,
    burgers_grid,
    ks_coefficient_functions,
    solve_advection_diffusion,
    solve_burgers,
    solve_ks_general,
    true_coefficients,
)
from parapde.errors import ConfigError, SolverBlowupError, StepSizeError
from parapde.grid import Grid
from parapde.preprocessing import TermDescriptor

from conftest import periodic_mass


def test_burgers_shape_finite_and_max_bound(burgers_clean):
    u = burgers_clean.values
    assert u.shape == (256, 256)
    assert np.all(np.isfinite(u))
    assert np.abs(u).max() <= np.abs(u[:, 0]).max() * 1.05


def test_burgers_mass_conservation(burgers_clean):
    masses = periodic_mass(burgers_clean.values, burgers_clean.grid.dx)
    assert np.max(np.abs(masses - masses[0])) / abs(masses[0]) < 1e-6


def test_burgers_self_convergence():
    coarse = solve_burgers(BenchmarkSpec("burgers", solver_substeps=20))
    fine = solve_burgers(BenchmarkSpec("burgers", solver_substeps=40))
    diff = np.max(np.abs(coarse.values - fine.values)) / np.max(np.abs(fine.values))
    assert diff < 1e-4


def test_burgers_determinism(burgers_clean):
    again = solve_burgers(BenchmarkSpec("burgers"))
    assert np.array_equal(again.values, burgers_clean.values)


def test_ad_shape_finite(ad_clean):
    assert ad_clean.values.shape == (256, 256)
    assert np.all(np.isfinite(ad_clean.values))


def test_ad_mass_conserved_all_frames(ad_clean):
    masses = periodic_mass(ad_clean.values, ad_clean.grid.dx)
    assert np.max(np.abs(masses - masses[0])) / abs(masses[0]) < 1e-6


def test_ad_self_convergence():
    coarse = solve_advection_diffusion(BenchmarkSpec("advection_diffusion", solver_substeps=20))
    fine = solve_advection_diffusion(BenchmarkSpec("advection_diffusion", solver_substeps=40))
    diff = np.max(np.abs(coarse.values - fine.values)) / np.max(np.abs(fine.values))
    assert diff < 1e-4


def test_ks_benchmark_shape(ks_clean):
    assert ks_clean.values.shape == (512, 512)
    assert np.all(np.isfinite(ks_clean.values))
    # first temporal half of the t <= 200 solve
    assert ks_clean.grid.t_max == pytest.approx(511 * 200.0 / 1023)


def _degenerate_coeffs():
    one = lambda x: np.ones_like(x)
    neg = lambda x: -np.ones_like(x)
    return one, neg, neg


def test_ks_degenerate_self_convergence():
    # constant-coefficient KS goes through the same solver path; chaos has no
    # time to amplify refinement differences on this horizon
    grid = Grid(-20.0, 20.0, 256, 0.0, 20.0, 128, periodic=True)
    u0 = np.cos(2 * np.pi * grid.x / 20.0) * (1.0 + np.sin(2 * np.pi * grid.x / 20.0))
    a_fn, b_fn, c_fn = _degenerate_coeffs()
    coarse = solve_ks_general(grid, a_fn, b_fn, c_fn, u0, substeps=20)
    fine = solve_ks_general(grid, a_fn, b_fn, c_fn, u0, substeps=40)
    diff = np.max(np.abs(coarse.values - fine.values)) / np.max(np.abs(fine.values))
    assert diff < 1e-3


def test_ks_zero_initial_condition_stays_zero():
    grid = Grid(-20.0, 20.0, 128, 0.0, 5.0, 64, periodic=True)
    a_fn, b_fn, c_fn = ks_coefficient_functions()
    out = solve_ks_general(grid, a_fn, b_fn, c_fn, np.zeros(grid.n_x), substeps=4)
    assert np.abs(out.values).max() == 0.0


def test_ks_residual_stability_guard():
    grid = Grid(-20.0, 20.0, 128, 0.0, 5.0, 64, periodic=True)
    a_fn, _, c_fn = ks_coefficient_functions()
    too_big = lambda x: -1.0 + 2.0 * np.exp(-(x**2))
    with pytest.raises(StepSizeError):
        solve_ks_general(grid, a_fn, too_big, c_fn, np.zeros(grid.n_x), substeps=4)


def test_solver_blowup_reports_step_and_magnitude():
    grid = Grid(-20.0, 20.0, 128, 0.0, 5.0, 64, periodic=True)
    a_fn, b_fn, c_fn = ks_coefficient_functions()
    u0 = 1e5 * np.cos(2 * np.pi * grid.x / 40.0)
    with pytest.raises(SolverBlowupError) as err, np.errstate(over="ignore", invalid="ignore"):
        solve_ks_general(grid, a_fn, b_fn, c_fn, u0, substeps=2)
    assert err.value.step >= 1
    assert "max |u|" in str(err.value)


def test_invalid_pde_id_rejected():
    with pytest.raises(ConfigError):
        BenchmarkSpec("navier_stokes")


def test_add_noise_zero_is_identity(burgers_clean):
    out = add_noise(burgers_clean, 0.0, 7)
    assert np.array_equal(out.values, burgers_clean.values)


def test_add_noise_scale(burgers_clean):
    out = add_noise(burgers_clean, 2.0, 11)
    resid_sd = (out.values - burgers_clean.values).std()
    target = 0.02 * burgers_clean.values.std()
    assert abs(resid_sd - target) / target < 0.05


def test_add_noise_deterministic(burgers_clean):
    a = add_noise(burgers_clean, 4.0, 3)
    b = add_noise(burgers_clean, 4.0, 3)
    assert np.array_equal(a.values, b.values)


def test_add_noise_mean_preserving(burgers_clean):
    eps = 2.0
    out = add_noise(burgers_clean, eps, 5)
    sd = burgers_clean.values.std()
    n = burgers_clean.values.size
    bound = 3.0 * (eps / 100.0) * sd / np.sqrt(n)
    assert abs(out.values.mean() - burgers_clean.values.mean()) < bound


def test_true_coefficients_burgers():
    coeffs = dict(true_coefficients("burgers", burgers_grid()))
    a = coeffs[TermDescriptor(1, 1)]
    diff = coeffs[TermDescriptor(0, 2)]
    assert a[0] == pytest.approx(-1.0)
    assert np.all(diff == 0.1)


def test_true_coefficients_advection_diffusion():
    grid = advection_diffusion_grid()
    coeffs = dict(true_coefficients("advection_diffusion", grid))
    i0 = int(np.argmin(np.abs(grid.x)))
    assert grid.x[i0] == 0.0
    assert coeffs[TermDescriptor(0, 1)][i0] == pytest.approx(-0.5)
    assert coeffs[TermDescriptor(1, 0)][i0] == pytest.approx(0.0, abs=1e-12)
    assert np.all(coeffs[TermDescriptor(0, 2)] == 0.1)


def test_true_coefficients_ks():
    _, b_fn, _ = ks_coefficient_functions()
    assert b_fn(2.0) == pytest.approx(-0.75)
    grid = Grid(-20.0, 20.0, 512, 0.0, 100.0, 512, periodic=True)
    coeffs = dict(true_coefficients("kuramoto_sivashinsky", grid))
    b = coeffs[TermDescriptor(0, 2)]
    assert np.interp(2.0, grid.x, b) == pytest.approx(-0.75, abs=1e-3)
