import math

import numpy as np
import pytest
from scipy.integrate import quad

from exact import ground_state
from models import LaurentForm, PotentialParams, dimension_reduce, effective_potential
from numerics import (
    GridError,
    GridFunction,
    GridOverrides,
    RadialGrid,
    build_grid,
    eigen_lowest,
    evaluate_state,
    h_residual,
    hamiltonian_apply,
    length_scales,
    norm,
    normalize,
    overlap,
    sturm_count,
    tridiagonal,
    turning_radius,
)
from susy import ClosedFormState


# ---------- Grids ----------
def test_grid_nodes_and_refinement():
    grid = RadialGrid(h=0.1, count=100, r_max=10.0)
    nodes = grid.nodes()
    assert nodes[0] == pytest.approx(0.1)
    assert nodes[-1] == pytest.approx(10.0)
    fine = grid.refined()
    assert fine.h == pytest.approx(0.05)
    assert fine.count == 201
    # same Dirichlet endpoint
    assert (fine.count + 1) * fine.h == pytest.approx((grid.count + 1) * grid.h)


def test_grid_too_small():
    with pytest.raises(ValueError):
        RadialGrid(h=0.1, count=10, r_max=1.0)


def test_length_scales(p1_params, dim3, phys):
    scales = length_scales(p1_params, dim3, phys)
    assert scales["coulomb"] == pytest.approx(1.0)
    assert scales["oscillator"] == pytest.approx(1.0)
    assert scales["linear"] == pytest.approx(0.5 ** (1.0 / 3.0))


def test_turning_radius_hydrogen(hydrogen, dim3, phys):
    V = effective_potential(hydrogen, dim3, phys)
    assert turning_radius(V, -0.5, 1.0) == pytest.approx(2.0)


def test_build_grid_default_and_overrides(hydrogen, dim3, phys):
    grid = build_grid(hydrogen, dim3, phys)
    assert grid.r_max == pytest.approx(10.0)
    assert grid.count == 20000
    pinned = build_grid(hydrogen, dim3, phys, overrides=GridOverrides(r_max=20.0, h=0.01))
    assert pinned.count == 2000
    assert pinned.h == 0.01
    widened = build_grid(hydrogen, dim3, phys, energy_guess=-0.5)
    assert widened.r_max == pytest.approx(12.0)


def test_build_grid_refines_per_level(hydrogen, dim3, phys):
    assert build_grid(hydrogen, dim3, phys, level=1).count == 60000
    assert build_grid(hydrogen, dim3, phys, level=2).count == 100000
    pinned = build_grid(hydrogen, dim3, phys, overrides=GridOverrides(r_max=20.0, h=0.01), level=3)
    assert pinned.count == 2000
    with pytest.raises(GridError):
        build_grid(hydrogen, dim3, phys, level=-1)


def test_two_dimensional_grid_is_centered(hydrogen, dim3, phys):
    assert not build_grid(hydrogen, dim3, phys).centered
    grid = build_grid(hydrogen, dimension_reduce(2, 0), phys)
    assert grid.centered
    assert grid.nodes()[0] == pytest.approx(grid.h / 2.0)
    assert grid.r_end == pytest.approx((grid.count + 0.5) * grid.h)
    fine = grid.refined()
    assert fine.centered
    assert fine.count == 2 * grid.count
    assert fine.nodes()[0] == pytest.approx(grid.h / 4.0)


# ---------- Grid functions ----------
def test_grid_function_validation():
    grid = RadialGrid(h=0.1, count=100, r_max=10.0)
    with pytest.raises(ValueError):
        GridFunction(grid=grid, values=np.ones(99))
    values = np.ones(100)
    values[3] = np.nan
    with pytest.raises(ValueError):
        GridFunction(grid=grid, values=values)
    f = GridFunction(grid=grid, values=np.ones(100))
    with pytest.raises(ValueError):
        f.values[0] = 2.0


def test_evaluate_rejects_bad_states():
    grid = RadialGrid(h=0.1, count=100, r_max=10.0)
    with pytest.raises(GridError):
        evaluate_state(ClosedFormState(q=-0.6, kappa=1.0), grid)
    with pytest.raises(GridError):
        evaluate_state(ClosedFormState(q=1.0), grid)


def test_normalize_hydrogen():
    grid = RadialGrid(h=0.001, count=40000, r_max=40.0)
    f, n0 = normalize(evaluate_state(ClosedFormState(q=1.0, lam=1.0), grid))
    assert n0 == pytest.approx(2.0, rel=1e-6)
    assert norm(f) == pytest.approx(1.0, rel=1e-12)


def test_normalize_p1_against_quadrature(p1_params, dim3, phys):
    psi = ground_state(p1_params, dim3, phys).psi
    grid = build_grid(p1_params, dim3, phys, energy_guess=1.0)
    _, n0 = normalize(evaluate_state(psi, grid))
    integral, _ = quad(lambda r: (r * math.exp(-r - 0.5 * r * r)) ** 2, 0.0, math.inf)
    assert n0 == pytest.approx(1.0 / math.sqrt(integral), rel=1e-6)


def test_normalize_idempotent_and_scale_covariant():
    grid = RadialGrid(h=0.01, count=2000, r_max=20.0)
    f = evaluate_state(ClosedFormState(q=2.0, lam=0.7, kappa=0.1), grid)
    g, n0 = normalize(f)
    again, n1 = normalize(g)
    assert n1 == pytest.approx(1.0, rel=1e-12)
    np.testing.assert_allclose(again.values, g.values, rtol=1e-12)
    _, doubled = normalize(f.scale(2.0))
    assert doubled == pytest.approx(n0 / 2.0, rel=1e-12)


def test_overlap_self_and_grid_mismatch():
    grid = RadialGrid(h=0.01, count=2000, r_max=20.0)
    f = evaluate_state(ClosedFormState(q=1.0, lam=1.0), grid)
    assert overlap(f, f.scale(3.0)) == pytest.approx(1.0, rel=1e-12)
    other = evaluate_state(ClosedFormState(q=1.0, lam=1.0), RadialGrid(h=0.02, count=1000, r_max=20.0))
    with pytest.raises(GridError):
        overlap(f, other)


# ---------- Hamiltonian ----------
def test_hamiltonian_is_linear(p1_params, dim3, phys):
    rng = np.random.default_rng(7)
    grid = RadialGrid(h=0.01, count=1200, r_max=12.0)
    V = effective_potential(p1_params, dim3, phys)
    f = GridFunction(grid=grid, values=rng.normal(size=grid.count))
    g = GridFunction(grid=grid, values=rng.normal(size=grid.count))
    alpha, beta = rng.normal(size=2)
    combined = GridFunction(grid=grid, values=alpha * f.values + beta * g.values)
    expected = alpha * hamiltonian_apply(V, f, phys).values + beta * hamiltonian_apply(V, g, phys).values
    actual = hamiltonian_apply(V, combined, phys).values
    np.testing.assert_allclose(actual, expected, rtol=0, atol=1e-9 * np.max(np.abs(expected)))


@pytest.mark.parametrize("mode", [1, 2, 5])
def test_free_hamiltonian_sine_modes(mode, phys):
    grid = RadialGrid(h=0.1, count=100, r_max=10.0)
    length = grid.r_end
    f = GridFunction(grid=grid, values=np.sin(mode * math.pi * grid.nodes() / length))
    eigenvalue = phys.kinetic * (2.0 - 2.0 * math.cos(mode * math.pi * grid.h / length)) / grid.h ** 2
    applied = hamiltonian_apply(LaurentForm(), f, phys).values
    np.testing.assert_allclose(applied, eigenvalue * f.values, rtol=0, atol=1e-10)


# ---------- Eigensolver ----------
def test_hydrogen_levels(hydrogen, dim3, phys):
    grid = build_grid(hydrogen, dim3, phys, overrides=GridOverrides(r_max=60.0, h=0.003))
    energies = eigen_lowest(effective_potential(hydrogen, dim3, phys), grid, phys, k=3).energies
    assert energies == pytest.approx([-0.5, -0.125, -0.5 / 9.0], abs=1e-4)


def test_hydrogen_richardson(hydrogen, dim3, phys):
    grid = build_grid(hydrogen, dim3, phys, overrides=GridOverrides(r_max=40.0, h=0.002))
    result = eigen_lowest(effective_potential(hydrogen, dim3, phys), grid, phys, k=1, richardson=True)
    assert result.richardson
    assert result.energies[0] == pytest.approx(-0.5, abs=5e-5)


def test_hydrogen_second_order_convergence(hydrogen, dim3, phys):
    V = effective_potential(hydrogen, dim3, phys)
    grid = RadialGrid(h=0.004, count=10000, r_max=40.0)
    coarse = eigen_lowest(V, grid, phys).energies[0] + 0.5
    fine = eigen_lowest(V, grid.refined(), phys).energies[0] + 0.5
    assert 3.6 <= coarse / fine <= 4.4


def test_p1_ground_energy(p1_params, dim3, phys):
    grid = build_grid(p1_params, dim3, phys, energy_guess=1.0)
    energy = eigen_lowest(effective_potential(p1_params, dim3, phys), grid, phys).energies[0]
    assert energy == pytest.approx(1.0, abs=1e-4)


def test_radial_oscillator_spectrum(dim3, phys):
    params = PotentialParams(c=0.5)
    grid = build_grid(params, dim3, phys, energy_guess=5.5)
    energies = eigen_lowest(effective_potential(params, dim3, phys), grid, phys, k=3).energies
    assert energies == pytest.approx([1.5, 3.5, 5.5], abs=1e-4)


def test_two_dimensional_ground_energy(phys):
    # M = 2 member of the family: a=1, c=0.5 -> b=2, E=-1
    dim = dimension_reduce(2, 0)
    params = PotentialParams(a=1.0, b=2.0, c=0.5)
    solution = ground_state(params, dim, phys)
    assert solution.energy.E == pytest.approx(-1.0)
    grid = build_grid(params, dim, phys, energy_guess=-1.0)
    result = eigen_lowest(effective_potential(params, dim, phys), grid, phys, k=1, vectors=True)
    assert result.energies[0] == pytest.approx(-1.0, abs=1e-4)
    exact = evaluate_state(solution.psi, grid)
    assert overlap(exact, result.vectors[0]) == pytest.approx(1.0, abs=1e-5)


def test_charmonium_limit_solves_numerically(dim3, phys):
    params = PotentialParams(a=1.0, b=1.0)
    grid = build_grid(params, dim3, phys)
    energies = eigen_lowest(effective_potential(params, dim3, phys), grid, phys, k=2).energies
    assert energies[0] < energies[1]
    assert all(math.isfinite(e) for e in energies)


def test_eigenvectors_normalized_and_signed(hydrogen, dim3, phys):
    grid = build_grid(hydrogen, dim3, phys, overrides=GridOverrides(r_max=30.0, h=0.003))
    result = eigen_lowest(effective_potential(hydrogen, dim3, phys), grid, phys, k=2, vectors=True)
    for vector in result.vectors:
        assert norm(vector) == pytest.approx(1.0, rel=1e-3)
        assert vector.values[np.argmax(np.abs(vector.values))] > 0
    exact = evaluate_state(ClosedFormState(q=1.0, lam=1.0), grid)
    assert overlap(exact, result.vectors[0]) == pytest.approx(1.0, abs=1e-6)
    assert abs(overlap(result.vectors[0], result.vectors[1])) <= 1e-8


def test_eigen_k_bounds(hydrogen, dim3, phys):
    grid = RadialGrid(h=0.1, count=100, r_max=10.0)
    V = effective_potential(hydrogen, dim3, phys)
    with pytest.raises(ValueError):
        eigen_lowest(V, grid, phys, k=0)
    with pytest.raises(ValueError):
        eigen_lowest(V, grid, phys, k=100)


def test_sturm_count_matches_eigenvalues(p1_params, dim3, phys):
    grid = build_grid(p1_params, dim3, phys, points=2000)
    V = effective_potential(p1_params, dim3, phys)
    energies = np.asarray(eigen_lowest(V, grid, phys, k=5).energies)
    diag, off = tridiagonal(V, grid, phys)
    midpoints = 0.5 * (energies[:-1] + energies[1:])
    assert list(sturm_count(diag, off, midpoints)) == [1, 2, 3, 4]
    assert sturm_count(diag, off, energies[0] - 1.0)[0] == 0


def test_sturm_count_random_tridiagonal():
    rng = np.random.default_rng(11)
    diag = rng.normal(size=60)
    off = rng.normal(size=59)
    full = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    eigenvalues = np.linalg.eigvalsh(full)
    shifts = rng.uniform(eigenvalues[0] - 1, eigenvalues[-1] + 1, size=100)
    expected = [int(np.sum(eigenvalues < s)) for s in shifts]
    assert list(sturm_count(diag, off, shifts)) == expected


# ---------- H-residual ----------
def test_ground_residual_small(p1_params, dim3, phys):
    psi = ground_state(p1_params, dim3, phys).psi
    grid = build_grid(p1_params, dim3, phys, energy_guess=1.0)
    V = effective_potential(p1_params, dim3, phys)
    assert h_residual(psi, 1.0, V, phys, grid=grid) <= 1e-6


def test_ground_residual_second_order(p1_params, dim3, phys):
    psi = ground_state(p1_params, dim3, phys).psi
    V = effective_potential(p1_params, dim3, phys)
    grid = RadialGrid(h=0.01, count=1200, r_max=12.0)
    ratio = h_residual(psi, 1.0, V, phys, grid=grid) / h_residual(psi, 1.0, V, phys, grid=grid.refined())
    assert 3.6 <= ratio <= 4.4


def test_residual_detects_wrong_energy(p1_params, dim3, phys):
    psi = ground_state(p1_params, dim3, phys).psi
    grid = build_grid(p1_params, dim3, phys, energy_guess=1.0)
    V = effective_potential(p1_params, dim3, phys)
    assert h_residual(psi, 1.1, V, phys, grid=grid) == pytest.approx(0.1, rel=1e-3)


def test_residual_needs_grid_for_closed_form(p1_params, dim3, phys):
    with pytest.raises(GridError):
        h_residual(ClosedFormState(q=1.0, lam=1.0), 1.0, effective_potential(p1_params, dim3, phys), phys)


def test_p2_residual(p2, phys):
    params, dim = p2
    solution = ground_state(params, dim, phys)
    grid = build_grid(params, dim, phys, energy_guess=solution.energy.E)
    V = effective_potential(params, dim, phys)
    assert h_residual(solution.psi, solution.energy.E, V, phys, grid=grid) <= 1e-6
