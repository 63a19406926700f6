"""Interior lattice certificates for solved or candidate disk maps.

Certificates compare log|f'| against the harmonic extension u of
log Phi(., f(.)) on circles filling the disk:

* subsolution:   log|f'| <= u everywhere inside (margin = u - log|f'|);
* supersolution: log|f'| >= u, and the map must be univalent;
* starlike:      Re(z f'(z)/f(z)) >= 0 on the boundary;
* free boundary: 1/|f'| matches 1/Phi on the boundary within a residual
  budget, plus finite-difference spot checks of |grad log|f^{-1}|| around
  interior image points.

All margins share the certificate tolerance 1e-8.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBoundaryError, NotUnivalentError
from .solver import residual_sup, univalence
from .spectral import check_grid_size, derivative, grid_angles, grid_points, poisson_circle

TOL_CERT = 1e-8
DERIVATIVE_FLOOR = 1e-14
FD_STEP = 1e-6
FD_TOL = 1e-4
NEWTON_TOL = 1e-13


@dataclass
class Certificate:
    kind: str
    passed: bool
    worst_margin: float
    worst_location: dict
    tolerance: float
    lattice: dict
    skipped: int = 0
    details: dict = None

    def as_dict(self):
        out = {
            "kind": self.kind,
            "pass": self.passed,
            "worst_margin": self.worst_margin,
            "worst_location": self.worst_location,
            "tolerance": self.tolerance,
            "lattice": self.lattice,
            "skipped": self.skipped,
        }
        if self.details:
            out["details"] = self.details
        return out

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def certificate_from_json(text):
    raw = json.loads(text)
    return Certificate(
        kind=raw["kind"],
        passed=bool(raw["pass"]),
        worst_margin=float(raw["worst_margin"]),
        worst_location=dict(raw["worst_location"]),
        tolerance=float(raw["tolerance"]),
        lattice=dict(raw["lattice"]),
        skipped=int(raw.get("skipped", 0)),
        details=raw.get("details"),
    )


def _interior_margins(f, fld, n, n_radii):
    """Yield (r, u - log|f'| on the circle of radius r, skip mask)."""
    n = check_grid_size(n)
    xi = grid_points(n)
    boundary_log_phi = np.log(fld.evaluate(xi, f.trace(n).values))
    fp = derivative(f)
    for r in np.linspace(0.1, 0.999, n_radii):
        u = poisson_circle(boundary_log_phi, r)
        mod_fp = np.abs(fp.circle_trace(r, n))
        skip = mod_fp < DERIVATIVE_FLOOR
        with np.errstate(divide="ignore"):
            margin = u - np.log(mod_fp)
        yield r, margin, skip


def check_subsolution(f, fld, n=512, n_radii=16, tol=TOL_CERT):
    """f is a subsolution when |f'| never exceeds the harmonic majorant of
    Phi along f; lattice points where f' vanishes are skipped and counted."""
    worst = np.inf
    where = {}
    skipped = 0
    angles = grid_angles(n)
    for r, margin, skip in _interior_margins(f, fld, n, n_radii):
        skipped += int(skip.sum())
        usable = np.where(skip, np.inf, margin)
        i = int(np.argmin(usable))
        if usable[i] < worst:
            worst = float(usable[i])
            where = {"r": float(r), "t": float(angles[i])}
    return Certificate(
        kind="subsolution",
        passed=bool(worst >= -tol),
        worst_margin=worst,
        worst_location=where,
        tolerance=tol,
        lattice={"n": n, "radii": n_radii},
        skipped=skipped,
    )


def check_supersolution(f, fld, n=512, n_radii=16, seed=0, tol=TOL_CERT):
    """Supersolutions must be univalent and keep |f'| above the harmonic
    minorant; folded boundaries are rejected outright."""
    if not univalence(f, n, seed=seed):
        raise NotUnivalentError("supersolution certificate needs a univalent map")
    worst = np.inf
    where = {}
    skipped = 0
    angles = grid_angles(n)
    for r, margin, skip in _interior_margins(f, fld, n, n_radii):
        skipped += int(skip.sum())
        usable = np.where(skip, np.inf, -margin)
        i = int(np.argmin(usable))
        if usable[i] < worst:
            worst = float(usable[i])
            where = {"r": float(r), "t": float(angles[i])}
    return Certificate(
        kind="supersolution",
        passed=bool(worst >= -tol),
        worst_margin=worst,
        worst_location=where,
        tolerance=tol,
        lattice={"n": n, "radii": n_radii},
        skipped=skipped,
    )


def check_starlike(f, n=512, seed=0, tol=TOL_CERT):
    """Boundary starlikeness Re(z f'/f) >= 0 for a univalent map."""
    if not univalence(f, n, seed=seed):
        raise NotUnivalentError("starlike certificate needs a univalent map")
    n = check_grid_size(n)
    xi = grid_points(n)
    fvals = f.trace(n).values
    scale = np.abs(fvals).max()
    if np.abs(fvals).min() < 1e-12 * max(scale, 1.0):
        raise DegenerateBoundaryError("boundary trace passes through 0; starlike quotient undefined")
    quotient = (xi * derivative(f).trace(n).values / fvals).real
    i = int(np.argmin(quotient))
    worst = float(quotient[i])
    return Certificate(
        kind="starlike",
        passed=bool(worst >= -tol),
        worst_margin=worst,
        worst_location={"t": float(grid_angles(n)[i])},
        tolerance=tol,
        lattice={"n": n},
    )


def _invert(f, fp, w, z0):
    """Newton inversion of f near z0; f is analytic so few steps suffice."""
    z = complex(z0)
    for _ in range(60):
        fz = complex(f(z))
        if abs(fz - w) < NEWTON_TOL:
            return z
        dz = complex(fp(z))
        if dz == 0.0:
            raise DegenerateBoundaryError("Newton inversion hit a critical point")
        z -= (fz - w) / dz
    raise DegenerateBoundaryError("Newton inversion failed to converge")


def free_boundary_check(f, fld, n=512, spots=8, delta=1e-3, seed=0, tol=TOL_CERT):
    """Check the free boundary identity along the solved boundary.

    Boundary part: |1/|f'| - 1/Phi(., f)| stays under a threshold derived
    from the solve residual.  Interior part: at a few points just inside the
    boundary, the gradient of u = log|f^{-1}| (finite differences around the
    image point, Newton inversion for each probe) matches 1/(|f'(z)| |z|) to
    a documented 1e-4 relative tolerance.
    """
    if not univalence(f, n, seed=seed):
        raise NotUnivalentError("free boundary certificate needs a univalent map")
    n = check_grid_size(n)
    xi = grid_points(n)
    fvals = f.trace(n).values
    fp = derivative(f)
    fpvals = fp.trace(n).values
    phi = fld.evaluate(xi, fvals)
    m1 = float(np.abs(fpvals).min())
    m2 = float(phi.min())
    if m1 < 1e-12 or m2 < 1e-12:
        raise DegenerateBoundaryError("boundary derivative or weight vanishes; identity undefined")
    residual = residual_sup(f, fld, n)
    threshold = residual / (m1 * m2) + tol
    gap = np.abs(1.0 / np.abs(fpvals) - 1.0 / phi)
    i = int(np.argmax(gap))
    boundary_worst = float(gap[i])
    boundary_ok = boundary_worst <= threshold

    grad_worst = 0.0
    h = FD_STEP
    for k in range(spots):
        t = 2.0 * np.pi * k / spots
        z0 = (1.0 - delta) * np.exp(1j * t)
        w0 = complex(f(z0))
        probes = {}
        for off in (h, -h, 1j * h, -1j * h):
            zk = _invert(f, fp, w0 + off, z0)
            probes[off] = np.log(abs(zk))
        gx = (probes[h] - probes[-h]) / (2.0 * h)
        gy = (probes[1j * h] - probes[-1j * h]) / (2.0 * h)
        grad = float(np.hypot(gx, gy))
        target = 1.0 / (abs(complex(fp(z0))) * abs(z0))
        grad_worst = max(grad_worst, abs(grad - target) / target)
    grad_ok = grad_worst <= FD_TOL

    passed = bool(boundary_ok and grad_ok)
    margin = float(min(threshold - boundary_worst, FD_TOL - grad_worst))
    return Certificate(
        kind="free_boundary",
        passed=passed,
        worst_margin=margin,
        worst_location={"t": float(grid_angles(n)[i])},
        tolerance=tol,
        lattice={"n": n, "spots": spots, "delta": delta},
        details={
            "boundary_gap": boundary_worst,
            "boundary_threshold": threshold,
            "gradient_relative_error": grad_worst,
            "gradient_tolerance": FD_TOL,
            "residual": residual,
        },
    )
