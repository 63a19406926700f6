"""Spectral core: grids, coefficient transforms, harmonic machinery.

Frozen oracles: the analytic completion of log|2 + e^{it}| is log(2 + z)
whose Taylor coefficients are log 2 and -(-1/2)^k / k, and the p-metric
between z and z/2 integrates the constant (1/2)^p.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diskmap.spectral import (
    BoundaryGrid,
    DiskFunction,
    antiderivative,
    check_grid_size,
    conjugate_periodic,
    derivative,
    grid_angles,
    grid_points,
    hp_boundary_distance,
    is_power_of_two,
    next_power_of_two,
    poisson_circle,
    poisson_extend,
    schwarz_integral,
)


def random_coeffs(rng, m):
    return rng.standard_normal(m) + 1j * rng.standard_normal(m)


@pytest.mark.parametrize("n,ok", [(8, True), (512, True), (1 << 15, True), (7, False), (12, False), (4, False), (0, False)])
def test_grid_size_validation(n, ok):
    if ok:
        assert check_grid_size(n) == n
    else:
        with pytest.raises(ValueError):
            check_grid_size(n)


def test_power_of_two_helpers():
    assert is_power_of_two(8) and not is_power_of_two(12)
    assert next_power_of_two(5) == 8
    assert next_power_of_two(8) == 8
    assert next_power_of_two(9) == 16


def test_grid_points_and_angles():
    n = 16
    t = grid_angles(n)
    xi = grid_points(n)
    assert t[0] == 0.0 and len(t) == n
    assert np.abs(xi - np.exp(1j * t)).max() == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_coefficient_boundary_round_trip(seed):
    rng = np.random.default_rng(seed)
    n = 64
    f = DiskFunction(random_coeffs(rng, n // 4))
    back = DiskFunction.from_boundary(f.trace(n))
    m = f.coeffs.size
    assert np.abs(back.coeffs[:m] - f.coeffs).max() < 1e-13
    assert np.abs(back.coeffs[m:]).max() < 1e-13


def test_trace_subsamples_unresolved_coefficients():
    rng = np.random.default_rng(3)
    f = DiskFunction(random_coeffs(rng, 21))
    vals = f.trace(8).values
    direct = f(grid_points(8))
    assert np.abs(vals - direct).max() < 1e-12


def test_circle_trace_matches_direct_evaluation():
    rng = np.random.default_rng(4)
    f = DiskFunction(random_coeffs(rng, 12))
    r = 0.7
    vals = f.circle_trace(r, 32)
    direct = f(r * grid_points(32))
    assert np.abs(vals - direct).max() < 1e-12


def test_call_is_horner():
    f = DiskFunction([1.0, 2.0, 3.0])
    z = 0.5 + 0.25j
    assert abs(f(z) - (1.0 + 2.0 * z + 3.0 * z * z)) < 1e-15


def test_degree_and_resolved():
    f = DiskFunction([0.0, 1.0, 0.0, 0.0])
    assert f.degree == 3  # storage length, trailing zeros included
    padded = np.zeros(512, dtype=complex)
    padded[1] = 6.0
    assert DiskFunction(padded).resolved()
    slow = DiskFunction(0.999 ** np.arange(512, dtype=float) + 0j)
    assert not slow.resolved()


@pytest.mark.parametrize("seed", range(3))
def test_derivative_antiderivative_inverse_pair(seed):
    rng = np.random.default_rng(10 + seed)
    f = DiskFunction(random_coeffs(rng, 9))
    g = antiderivative(derivative(f))
    expect = f.coeffs.copy()
    expect[0] = 0.0
    assert np.abs(g.coeffs[: expect.size] - expect).max() < 1e-14
    h = DiskFunction(random_coeffs(rng, 7))
    assert np.abs(derivative(antiderivative(h)).coeffs - h.coeffs).max() < 1e-14


def test_conjugate_of_cosine_is_sine():
    n = 64
    t = grid_angles(n)
    for k in (1, 3, 7):
        v = conjugate_periodic(np.cos(k * t))
        assert np.abs(v - np.sin(k * t)).max() < 1e-12


def test_conjugate_involution_and_mean():
    rng = np.random.default_rng(7)
    n = 128
    t = grid_angles(n)
    u = np.zeros(n)
    for k in range(1, n // 4):
        a, b = rng.standard_normal(2)
        u += a * np.cos(k * t) + b * np.sin(k * t)
    u += rng.standard_normal()
    v = conjugate_periodic(u)
    assert abs(v.mean()) < 1e-12
    w = conjugate_periodic(v)
    assert np.abs(w + (u - u.mean())).max() < 1e-10


@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
@settings(max_examples=25, deadline=None)
def test_conjugate_involution_property(seed):
    rng = np.random.default_rng(seed)
    n = 64
    t = grid_angles(n)
    u = np.zeros(n)
    for k in range(1, n // 4):
        a, b = rng.standard_normal(2)
        u += a * np.cos(k * t) + b * np.sin(k * t)
    w = conjugate_periodic(conjugate_periodic(u))
    assert np.abs(w + (u - u.mean())).max() < 1e-9 * (1.0 + np.abs(u).max())


def test_schwarz_integral_log_oracle():
    n = 512
    t = grid_angles(n)
    u = np.log(np.abs(2.0 + np.exp(1j * t)))
    F = schwarz_integral(u)
    k = np.arange(1, 40)
    expect = -((-0.5) ** k) / k
    assert abs(F.coeffs[0] - np.log(2.0)) < 1e-12
    assert np.abs(F.coeffs[1:40] - expect).max() < 1e-12
    assert np.abs(F.coeffs[40:200]).max() < 1e-12


def test_schwarz_real_part_interpolates():
    rng = np.random.default_rng(11)
    n = 128
    t = grid_angles(n)
    u = 0.3 + sum(
        rng.standard_normal() * np.cos(k * t) + rng.standard_normal() * np.sin(k * t)
        for k in range(1, 10)
    )
    F = schwarz_integral(u)
    assert np.abs(F.trace(n).values.real - u).max() < 1e-11
    assert abs(F.coeffs[0].imag) < 1e-14


def test_poisson_reproduces_harmonic_polynomials():
    n = 512
    t = grid_angles(n)
    rng = np.random.default_rng(12)
    pts = 0.9 * rng.uniform(0.0, 1.0, 25) * np.exp(2j * np.pi * rng.uniform(size=25))
    for k in (1, 3, 5):
        u = np.cos(k * t)
        vals = poisson_extend(u, pts)
        expect = (np.abs(pts) ** k) * np.cos(k * np.angle(pts))
        assert np.abs(vals - expect).max() < 1e-12
    const = poisson_extend(np.full(n, 2.5), pts)
    assert np.abs(const - 2.5).max() < 1e-12


def test_poisson_circle_matches_pointwise_extension():
    rng = np.random.default_rng(13)
    n = 64
    t = grid_angles(n)
    u = sum(rng.standard_normal() * np.cos(k * t) for k in range(1, 8))
    r = 0.55
    circle = poisson_circle(u, r)
    pts = r * grid_points(n)
    assert np.abs(circle - poisson_extend(u, pts)).max() < 1e-12


def test_poisson_rejects_exterior_points():
    with pytest.raises(ValueError):
        poisson_extend(np.ones(8), np.array([1.5 + 0.0j]))


def test_hp_distance_closed_form():
    f = DiskFunction([0.0, 1.0])
    g = DiskFunction([0.0, 0.5])
    for p in (0.1, 0.25, 0.4):
        expect = 2.0 * np.pi * 0.5 ** p
        assert abs(hp_boundary_distance(f, g, p) - expect) < 1e-12
    assert hp_boundary_distance(f, f, 0.25) == 0.0


@pytest.mark.parametrize("p", [-0.1, 0.0, 0.5, 0.9])
def test_hp_distance_rejects_bad_exponent(p):
    f = DiskFunction([0.0, 1.0])
    with pytest.raises(ValueError):
        hp_boundary_distance(f, f, p)


def test_boundary_grid_validates():
    with pytest.raises(ValueError):
        BoundaryGrid(np.ones(12))
