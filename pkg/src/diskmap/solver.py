"""Damped fixed-point solver for the prescribed boundary-modulus problem.

A solution is an analytic self-normalized map f (f(0) = 0 < f'(0)) whose
boundary derivative satisfies |f'(xi)| = Phi(xi, f(xi)).  Such maps are fixed
points of the update

    U(f)(z) = integral_0^z B(s) exp(S[log Phi(., f(.))](s)) ds,

where B carries the prescribed critical points and S is the Schwarz integral.
The solver iterates f <- (1-theta) f + theta U(f) spectrally, doubling the
grid whenever the tail of f' stops resolving.
"""

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import blaschke as blaschke_mod
from .errors import DivergenceError, ResolutionExceededError
from .spectral import (
    MAX_GRID,
    DiskFunction,
    check_grid_size,
    derivative,
    grid_points,
    schwarz_integral,
)

POLYGON_CAP = 1024
DIVERGENCE_FACTOR = 1e6
WINDING_SAMPLES = 50


def scaled_identity(r):
    """The map z -> r z as a DiskFunction."""
    return DiskFunction([0.0, float(r)])


@dataclass
class SolveOptions:
    n: int = 512
    theta: float = 0.5
    max_iters: int = 2000
    tol_update: float = 1e-10
    tol_residual: float = 1e-8
    initial_map: object = None  # None -> scaled_identity(sup_bound + 0.5); float -> that radius
    seed: int = 0

    def resolve_init(self, field):
        init = self.initial_map
        if init is None:
            # aim above the weight's sup bound: iterates then descend onto the
            # maximal solution instead of stalling on an interior fixed point
            return scaled_identity(field.sup_bound + 0.5)
        if isinstance(init, DiskFunction):
            return init
        if isinstance(init, (int, float)):
            return scaled_identity(float(init))
        raise ValueError("initial_map must be None, a radius, or a DiskFunction")


@dataclass
class SolveReport:
    f: DiskFunction
    f_prime: DiskFunction
    n: int
    iterations: int
    converged: bool
    residual: float
    update_history: list
    update_history_l2: list
    univalent: bool
    locally_univalent: bool
    theta: float
    zeros: tuple
    field_name: str
    tail_ratio: float
    doublings: int = 0

    def as_dict(self):
        return {
            "field": self.field_name,
            "n": self.n,
            "theta": self.theta,
            "zeros": [[z.real, z.imag] for z in self.zeros],
            "iterations": self.iterations,
            "converged": self.converged,
            "residual": self.residual,
            "univalent": self.univalent,
            "locally_univalent": self.locally_univalent,
            "final_update": self.update_history[-1] if self.update_history else None,
            "tail_ratio": self.tail_ratio,
            "doublings": self.doublings,
            "derivative_at_origin": float(self.f_prime.coeffs[0].real),
        }


def apply_operator(f, fld, b, n):
    """One application of the update operator at grid size n.

    Returns (U(f), U(f)', tail ratio of the pre-truncation derivative).
    The derivative is truncated to degree n-2 so that it is exactly the
    derivative of the returned primitive.
    """
    n = check_grid_size(n)
    xi = grid_points(n)
    fvals = f.trace(n).values
    phi = fld.evaluate(xi, fvals)
    exponent = schwarz_integral(np.log(phi))
    gvals = blaschke_mod.boundary_trace(b, n) * np.exp(exponent.trace(n).values)
    gc = np.fft.fft(gvals) / n
    peak = np.abs(gc).max()
    tail_ratio = float(np.abs(gc[-1]) / peak) if peak > 0 else 0.0
    gc[0] = gc[0].real  # U(f)'(0) = B(0) exp(S(0)) is real and positive
    fprime = gc[: n - 1]
    prim = np.zeros(n, dtype=np.complex128)
    prim[1:] = fprime / np.arange(1, n)
    return DiskFunction(prim), DiskFunction(fprime), tail_ratio


def residual_sup(f, fld, n):
    """sup over the grid of | |f'| - Phi(xi, f) |."""
    n = check_grid_size(n)
    xi = grid_points(n)
    fp = np.abs(derivative(f).trace(n).values)
    phi = fld.evaluate(xi, f.trace(n).values)
    return float(np.abs(fp - phi).max())


def _pad_coeffs(c, n):
    out = np.zeros(n, dtype=np.complex128)
    out[: min(c.size, n)] = c[:n]
    return out


def solve(fld, zeros=(), options=None):
    """Run the damped iteration to a certified fixed point.

    Convergence means both: boundary sup-norm of the last update below
    tol_update and residual below tol_residual.  The grid doubles (up to
    2**15) whenever the solved derivative's spectral tail is unresolved.
    """
    options = options or SolveOptions()
    n = check_grid_size(options.n)
    if not 0.0 < float(options.theta) <= 1.0:
        raise ValueError(
            f"damping factor must lie in (0, 1], got {options.theta}"
        )
    b = blaschke_mod.construct(zeros)
    f0 = options.resolve_init(fld)
    coeffs = _pad_coeffs(f0.coeffs, n)
    doublings = 0

    while True:
        report = _iterate(fld, b, coeffs, n, options, zeros)
        report.doublings = doublings
        if report.converged and not report.f_prime.resolved():
            if n >= MAX_GRID:
                raise ResolutionExceededError(
                    f"derivative tail unresolved at the maximum grid size {MAX_GRID}"
                )
            coeffs = _pad_coeffs(report.f.coeffs, 2 * n)
            n *= 2
            doublings += 1
            continue
        break

    report.univalent = univalence(report.f, report.n, seed=options.seed)
    report.locally_univalent = bool(
        len(zeros) == 0 and interior_critical_points(report.f, report.n) == 0
    )
    return report


def _iterate(fld, b, coeffs, n, options, zeros=()):
    f = DiskFunction(coeffs)
    theta = float(options.theta)
    sup_hist, l2_hist = [], []
    first_update = None
    dsup = np.inf
    fprime = derivative(f)
    tail = 0.0
    iterations = 0

    for iterations in range(1, options.max_iters + 1):
        updated, fprime, tail = apply_operator(f, fld, b, n)
        delta = updated.coeffs - f.coeffs
        dvals = np.fft.ifft(delta) * n
        dsup = float(np.abs(dvals).max())
        l2_hist.append(float(np.sqrt(np.square(np.abs(delta)).sum())))
        sup_hist.append(dsup)
        f = DiskFunction(f.coeffs + theta * delta)
        if first_update is None:
            first_update = max(dsup, options.tol_update)
        if dsup > DIVERGENCE_FACTOR * max(first_update, 1.0):
            raise DivergenceError(
                f"update norm {dsup:.3e} exceeded the divergence guard after {iterations} steps",
                history=sup_hist,
            )
        if dsup < options.tol_update:
            break

    res = residual_sup(f, fld, n)
    converged = bool(dsup < options.tol_update and res <= options.tol_residual)
    return SolveReport(
        f=f,
        f_prime=derivative(f),
        n=n,
        iterations=iterations,
        converged=converged,
        residual=res,
        update_history=sup_hist,
        update_history_l2=l2_hist,
        univalent=False,
        locally_univalent=False,
        theta=theta,
        zeros=tuple(np.asarray(zeros, dtype=np.complex128)) if len(zeros) else (),
        field_name=fld.name,
        tail_ratio=tail,
    )


# ---------------------------------------------------------------------------
# geometric checks

def _cross(u, v):
    return (np.conj(u) * v).imag


def polygon_is_simple(points):
    """No two non-adjacent edges of the closed polygon properly cross."""
    P = np.asarray(points, dtype=np.complex128)
    m = P.size
    A = P
    B = np.roll(P, -1)
    i = np.arange(m)
    ii, jj = np.meshgrid(i, i, indexing="ij")
    candidate = jj > ii + 1
    candidate &= ~((ii == 0) & (jj == m - 1))
    d1 = _cross(B[ii] - A[ii], A[jj] - A[ii])
    d2 = _cross(B[ii] - A[ii], B[jj] - A[ii])
    d3 = _cross(B[jj] - A[jj], A[ii] - A[jj])
    d4 = _cross(B[jj] - A[jj], B[ii] - A[jj])
    crossing = candidate & (d1 * d2 < 0) & (d3 * d4 < 0)
    return not bool(crossing.any())


def winding_number(points, w):
    """Winding of the closed polygon around w (nearest integer)."""
    P = np.asarray(points, dtype=np.complex128)
    rel = P - w
    if np.abs(rel).min() < 1e-12:
        return None
    turns = np.angle(np.roll(rel, -1) / rel).sum() / (2.0 * np.pi)
    return int(np.rint(turns))


def univalence(f, n, seed=0):
    """Injectivity proxy: simple boundary polygon plus unit winding about
    sampled interior image points."""
    m = min(check_grid_size(n), POLYGON_CAP)
    P = f.trace(m).values
    if not polygon_is_simple(P):
        return False
    rng = np.random.default_rng(seed)
    radii = 0.1 + 0.7 * rng.random(WINDING_SAMPLES)
    angles = 2.0 * np.pi * rng.random(WINDING_SAMPLES)
    targets = f(radii * np.exp(1j * angles))
    for w in targets:
        wind = winding_number(P, w)
        if wind is None:
            continue
        if wind != 1:
            return False
    return True


def interior_critical_points(f, n, radius=0.999):
    """Argument-principle count of zeros of f' in |z| < radius.

    Critical points between `radius` and the boundary are not seen; the
    solver treats local univalence as "no prescribed zeros and none detected
    here".
    """
    vals = derivative(f).circle_trace(radius, check_grid_size(n))
    if np.abs(vals).min() < 1e-13:
        return max(1, int(np.rint(np.abs(np.angle(np.roll(vals, -1) / vals).sum()) / (2.0 * np.pi))))
    turns = np.angle(np.roll(vals, -1) / vals).sum() / (2.0 * np.pi)
    return int(np.rint(turns))


# ---------------------------------------------------------------------------
# scans and rates

@dataclass
class ScanResult:
    intervals: list
    tolerance: float
    r_min: float
    r_max: float
    steps: int

    def as_dict(self):
        return {
            "intervals": [[a, b] for a, b in self.intervals],
            "tolerance": self.tolerance,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "steps": self.steps,
        }


def radial_scan(fld, r_min=None, r_max=None, steps=10000, tol=None):
    """Locate radii with r = Phi_radial(r): where scaled identities solve.

    Works only for rotation-invariant fields (radial profile available).
    Returns maximal runs of grid points where |r - phi(r)| <= tol; the
    default tol = max(1e-4, spacing/2) guarantees single-point crossings are
    not missed between nodes.
    """
    if fld.radial_profile is None:
        raise ValueError("radial_scan needs a rotation-invariant field")
    M = fld.sup_bound
    r_min = 0.0 if r_min is None else float(r_min)
    r_max = 1.5 * M if r_max is None else float(r_max)
    if not (r_max > r_min and steps >= 2):
        raise ValueError("need r_max > r_min and at least two steps")
    r = np.linspace(r_min, r_max, int(steps))
    spacing = r[1] - r[0]
    tol = max(1e-4, 0.5 * spacing) if tol is None else float(tol)
    g = np.abs(r - fld.radial_profile(r))
    mask = g <= tol
    intervals = []
    start = None
    for i, hit in enumerate(mask):
        if hit and start is None:
            start = i
        elif not hit and start is not None:
            intervals.append((float(r[start]), float(r[i - 1])))
            start = None
    if start is not None:
        intervals.append((float(r[start]), float(r[-1])))
    return ScanResult(intervals=intervals, tolerance=tol, r_min=r_min, r_max=r_max, steps=int(steps))


@dataclass
class RateReport:
    observed_rate: float
    certified_ratio: float
    limit: DiskFunction
    limit_gap: float
    runs: int

    def as_dict(self):
        return {
            "observed_rate": self.observed_rate,
            "certified_ratio": self.certified_ratio,
            "limit_gap": self.limit_gap,
            "runs": self.runs,
        }


def contraction_rate(fld, certificate, zeros=(), options=None, init_fractions=(0.2, 0.5, 0.9)):
    """Empirical contraction rate against a valid certificate.

    Runs undamped (theta = 1) from several starts inside the certified ball;
    the certificate bounds every consecutive update ratio by its `ratio`, so
    the observed maximum should not exceed it (plus discretization slack).
    """
    if not certificate.valid:
        raise ValueError("contraction_rate needs a valid contraction certificate")
    base = options or SolveOptions()
    reports = []
    for frac in init_fractions:
        opts = SolveOptions(
            n=base.n,
            theta=1.0,
            max_iters=base.max_iters,
            tol_update=base.tol_update,
            tol_residual=base.tol_residual,
            initial_map=float(frac) * certificate.sup_solution_bound,
            seed=base.seed,
        )
        reports.append(solve(fld, zeros=zeros, options=opts))

    rate = 0.0
    for rep in reports:
        h = rep.update_history_l2
        for a, bb in zip(h[:-1], h[1:]):
            if a > 1e-11 and bb > 0.0:
                rate = max(rate, bb / a)

    gap = 0.0
    nmax = max(rep.n for rep in reports)
    for i in range(len(reports)):
        for j in range(i + 1, len(reports)):
            diff = np.abs(reports[i].f.trace(nmax).values - reports[j].f.trace(nmax).values).max()
            gap = max(gap, float(diff))

    return RateReport(
        observed_rate=float(rate),
        certified_ratio=float(certificate.ratio),
        limit=reports[0].f,
        limit_gap=gap,
        runs=len(reports),
    )
