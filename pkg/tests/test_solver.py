"""Fixed-point solver: stationarity, convergence, geometry, scans."""

import numpy as np
import pytest

from diskmap import blaschke, solver, weight
from diskmap.solver import SolveOptions, scaled_identity
from diskmap.spectral import DiskFunction


# ---------------------------------------------------------------------------
# options and initial maps

def test_scaled_identity_coeffs():
    f = scaled_identity(2.5)
    assert f.coeffs.tolist() == [0.0, 2.5]


def test_resolve_init_variants(staircase):
    assert SolveOptions().resolve_init(staircase).coeffs[1] == 6.5
    assert SolveOptions(initial_map=2).resolve_init(staircase).coeffs[1] == 2.0
    g = DiskFunction([0.0, 1.0, 0.5])
    assert SolveOptions(initial_map=g).resolve_init(staircase) is g
    with pytest.raises(ValueError):
        SolveOptions(initial_map="big").resolve_init(staircase)


def test_solve_rejects_bad_grid(staircase):
    with pytest.raises(ValueError, match="power of two"):
        solver.solve(staircase, options=SolveOptions(n=12))


@pytest.mark.parametrize("theta", [0.0, -0.5, 1.5])
def test_solve_rejects_bad_damping(staircase, theta):
    with pytest.raises(ValueError, match="damping factor"):
        solver.solve(staircase, options=SolveOptions(theta=theta))


# ---------------------------------------------------------------------------
# operator stationarity and residuals

@pytest.mark.parametrize("r", [3.0, 4.5, 5.5, 6.0])
def test_scaled_identities_are_fixed_points(staircase, r):
    b = blaschke.construct([])
    f = scaled_identity(r)
    u, u_prime, tail = solver.apply_operator(f, staircase, b, 256)
    assert np.abs(u.coeffs[:2] - f.coeffs).max() < 1e-13
    assert np.abs(u.coeffs[2:]).max() < 1e-13
    assert np.abs(u_prime.coeffs[0] - r) < 1e-13


@pytest.mark.parametrize("r,want", [(6.0, 0.0), (5.0, 0.0), (2.0, 1.0)])
def test_residual_of_scaled_identities(staircase, r, want):
    got = solver.residual_sup(scaled_identity(r), staircase, 128)
    assert abs(got - want) < 1e-12


# ---------------------------------------------------------------------------
# solve runs

def test_maximal_staircase_solution(maximal_report):
    rep = maximal_report
    assert rep.converged
    assert rep.residual <= 1e-8
    assert abs(rep.f.coeffs[1] - 6.0) <= 1e-8
    assert np.abs(rep.f.coeffs[2:]).max() <= 1e-8
    assert abs(rep.f.coeffs[0]) <= 1e-12
    assert rep.univalent
    assert rep.locally_univalent
    assert rep.zeros == ()
    assert rep.field_name == "staircase"


def test_branched_staircase_solution(branched_report):
    rep = branched_report
    assert rep.converged
    assert rep.residual <= 1e-8
    want = np.zeros(rep.f.coeffs.size, dtype=complex)
    want[1] = 1.0
    want[2] = 1.0
    assert np.abs(rep.f.coeffs - want).max() <= 1e-7
    assert not rep.univalent
    assert not rep.locally_univalent
    assert rep.zeros == (-0.5 + 0.0j,)


def test_constant_field_solves_to_scaled_identity():
    rep = solver.solve(weight.constant_field(2.0))
    assert rep.converged
    assert abs(rep.f.coeffs[1] - 2.0) < 1e-10
    assert np.abs(rep.f.coeffs[2:]).max() < 1e-10
    assert rep.univalent


def test_exact_start_converges_immediately(staircase):
    rep = solver.solve(staircase, options=SolveOptions(initial_map=scaled_identity(6.0)))
    assert rep.converged
    assert rep.iterations <= 2
    assert abs(rep.f.coeffs[1] - 6.0) < 1e-12


def test_grid_doubles_until_tail_resolves():
    rep = solver.solve(weight.ripple_field(smooth=True), options=SolveOptions(n=8))
    assert rep.converged
    assert rep.doublings >= 1
    assert rep.n >= 16
    assert rep.f_prime.resolved()


def test_update_history_recorded(maximal_report):
    assert len(maximal_report.update_history) == maximal_report.iterations
    assert maximal_report.update_history[-1] < 1e-10


# ---------------------------------------------------------------------------
# univalence machinery

def test_polygon_simplicity():
    square = np.array([0.0, 1.0, 1.0 + 1.0j, 1.0j])
    assert solver.polygon_is_simple(square)
    bowtie = np.array([0.0, 1.0 + 1.0j, 1.0, 1.0j])
    assert not solver.polygon_is_simple(bowtie)


def test_winding_number_values():
    square = np.array([0.0, 1.0, 1.0 + 1.0j, 1.0j])
    assert solver.winding_number(square, 0.5 + 0.5j) == 1
    assert solver.winding_number(square, 5.0 + 5.0j) == 0
    assert solver.winding_number(square, 0.0j) is None  # vertex hit


def test_univalence_detects_double_cover():
    assert not solver.univalence(DiskFunction([0.0, 0.0, 1.0]), 64)
    assert solver.univalence(DiskFunction([0.0, 1.0]), 64)


@pytest.mark.parametrize("coeffs,count", [
    ([0.0, 6.0], 0),
    ([0.0, 1.0, 1.0], 1),
    ([0.0, 0.0, 0.0, 1.0], 2),
])
def test_interior_critical_point_count(coeffs, count):
    assert solver.interior_critical_points(DiskFunction(coeffs), 256) == count


# ---------------------------------------------------------------------------
# radial scans

def test_scan_staircase_band(staircase):
    res = solver.radial_scan(staircase, r_min=0.1, r_max=7.0, steps=10000)
    assert len(res.intervals) == 1
    a, b = res.intervals[0]
    assert abs(a - 3.0) < 1e-3
    assert abs(b - 6.0) < 1e-3


def test_scan_plateau_double_root():
    res = solver.radial_scan(weight.plateau_reciprocal_field())
    assert len(res.intervals) == 1
    a, b = res.intervals[0]
    assert 0.985 < a < b < 1.001
    assert b - a < 0.05


def test_scan_constant_single_point():
    res = solver.radial_scan(weight.constant_field(2.0))
    assert len(res.intervals) == 1
    a, b = res.intervals[0]
    assert abs(a - 2.0) < 1e-3 and abs(b - 2.0) < 1e-3


def test_scan_requires_radial_profile():
    f = weight.random_smooth_field(np.random.default_rng(0))
    with pytest.raises(ValueError, match="rotation-invariant"):
        solver.radial_scan(f)


def test_scan_rejects_bad_range(staircase):
    with pytest.raises(ValueError):
        solver.radial_scan(staircase, r_min=2.0, r_max=1.0)


# ---------------------------------------------------------------------------
# empirical contraction rate

def test_contraction_rate_respects_certificate():
    f = weight.gauss_radial_field(1.0, 0.1)
    L = np.sqrt(0.2) * np.exp(-0.5)
    cert = weight.contraction_certificate(f, L)
    rr = solver.contraction_rate(f, cert)
    assert rr.runs == 3
    assert rr.observed_rate <= cert.ratio + 0.05
    assert rr.limit_gap < 1e-8


def test_contraction_rate_requires_valid_certificate(staircase):
    cert = weight.contraction_certificate(staircase, 4.0 / 3.0)
    with pytest.raises(ValueError, match="valid"):
        solver.contraction_rate(staircase, cert)
