"""Spectral boundary calculus on the unit circle.

Conventions used throughout the package:

* boundary grids have n = 2**m >= 8 equispaced nodes t_j = 2*pi*j/n;
* an analytic disk function is stored by Taylor coefficients c_k,
  f(z) = sum_k c_k z**k, and its boundary trace is recovered by zero-padded
  inverse FFT, which is exact for polynomials of degree < n;
* real boundary data u determines an analytic completion F with
  Re F = (harmonic extension of u) and Im F(0) = 0 (Schwarz integral).
"""

import numpy as np

MIN_GRID = 8
MAX_GRID = 1 << 15
RESOLVED_RATIO = 1e-10


def is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


def next_power_of_two(n):
    p = 1
    while p < n:
        p <<= 1
    return p


def check_grid_size(n):
    """Validate a boundary grid size; returns n as an int."""
    n = int(n)
    if not is_power_of_two(n) or n < MIN_GRID:
        raise ValueError(f"grid size must be a power of two >= {MIN_GRID}, got {n}")
    return n


def grid_angles(n):
    """Angles t_j = 2*pi*j/n of the boundary grid."""
    n = check_grid_size(n)
    return np.arange(n) * (2.0 * np.pi / n)


def grid_points(n):
    """Unimodular nodes exp(i t_j) of the boundary grid."""
    return np.exp(1j * grid_angles(n))


def _values(u):
    """Accept a BoundaryGrid or a plain array of nodal values."""
    if isinstance(u, BoundaryGrid):
        return u.values
    v = np.asarray(u)
    check_grid_size(v.shape[-1] if v.ndim else 0)
    return v


class BoundaryGrid:
    """Nodal values of a function on the equispaced circle grid."""

    __slots__ = ("n", "values")

    def __init__(self, values):
        v = np.asarray(values, dtype=np.complex128)
        if v.ndim != 1:
            raise ValueError("boundary values must be a 1-d array")
        self.n = check_grid_size(v.size)
        self.values = v

    @property
    def angles(self):
        return grid_angles(self.n)

    def __len__(self):
        return self.n


class DiskFunction:
    """Analytic function on the unit disk held as Taylor coefficients."""

    __slots__ = ("coeffs", "_traces")

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-d array")
        self.coeffs = c
        self._traces = {}

    @classmethod
    def from_boundary(cls, values):
        """Read Taylor coefficients off nodal boundary values.

        Exact when the underlying function is a polynomial of degree < n;
        higher modes alias, which resolved() is there to catch.
        """
        v = np.asarray(_values(values), dtype=np.complex128)
        return cls(np.fft.fft(v) / v.size)

    @property
    def degree(self):
        return self.coeffs.size - 1

    def resolved(self):
        """Spectral tail check: top coefficient is negligible next to the peak."""
        mags = np.abs(self.coeffs)
        peak = mags.max()
        if peak == 0.0:
            return True
        return mags[-1] / peak < RESOLVED_RATIO

    def trace(self, n):
        """Boundary values at the n-point grid (cached per n)."""
        n = check_grid_size(n)
        got = self._traces.get(n)
        if got is None:
            got = BoundaryGrid(self._circle_values(1.0, n))
            self._traces[n] = got
        return got

    def circle_trace(self, r, n):
        """Values on the circle of radius r at n equispaced angles."""
        n = check_grid_size(n)
        return self._circle_values(float(r), n)

    def _circle_values(self, r, n):
        c = self.coeffs
        if r != 1.0:
            c = c * np.power(r, np.arange(c.size))
        m = c.size
        if m <= n:
            padded = np.zeros(n, dtype=np.complex128)
            padded[:m] = c
            return np.fft.ifft(padded) * n
        big = next_power_of_two(m)
        padded = np.zeros(big, dtype=np.complex128)
        padded[:m] = c
        return (np.fft.ifft(padded) * big)[:: big // n]

    def __call__(self, z):
        """Evaluate by Horner's rule; z may be any complex array."""
        z = np.asarray(z, dtype=np.complex128)
        out = np.full(z.shape, self.coeffs[-1])
        for ck in self.coeffs[-2::-1]:
            out = out * z + ck
        return out


def derivative(f):
    """f'(z) as a DiskFunction: c_k -> (k+1) c_{k+1}."""
    c = f.coeffs
    if c.size == 1:
        return DiskFunction([0.0])
    return DiskFunction(np.arange(1, c.size) * c[1:])


def antiderivative(f):
    """Primitive vanishing at 0: c_k -> c_{k-1}/k (length grows by one)."""
    c = f.coeffs
    out = np.zeros(c.size + 1, dtype=np.complex128)
    out[1:] = c / np.arange(1, c.size + 1)
    return DiskFunction(out)


def _signed_freqs(n):
    return np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)


def conjugate_periodic(u):
    """Periodic Hilbert conjugate of real nodal data.

    Multiplier -i*sign(k) with the mean and the Nyquist mode annihilated;
    conjugate(conjugate(u)) == -(u - mean(u)) up to the dropped Nyquist mode.
    """
    v = _values(u)
    v = np.asarray(v, dtype=np.float64) if not np.iscomplexobj(v) else v.real
    n = v.size
    spec = np.fft.fft(v)
    mult = np.zeros(n, dtype=np.complex128)
    mult[1 : n // 2] = -1j
    mult[n // 2 + 1 :] = 1j
    return np.fft.ifft(mult * spec).real


def schwarz_integral(u):
    """Analytic completion of real nodal data u.

    Returns F as a DiskFunction with Re F|_circle interpolating u and
    Im F(0) = 0: c_0 = Re u-hat_0, c_k = 2 u-hat_k for 0 < k < n/2, and the
    Nyquist coefficient kept once (real for real input).
    """
    v = _values(u)
    v = v.real if np.iscomplexobj(v) else np.asarray(v, dtype=np.float64)
    n = v.size
    spec = np.fft.fft(v) / n
    c = np.zeros(n // 2 + 1, dtype=np.complex128)
    c[0] = spec[0].real
    c[1 : n // 2] = 2.0 * spec[1 : n // 2]
    c[n // 2] = spec[n // 2].real
    return DiskFunction(c)


def poisson_extend(u, z):
    """Harmonic extension of real nodal data, evaluated at points z, |z| <= 1.

    Spectral form: sum_k u-hat_k r^|k| e^{i k theta}, exact for trigonometric
    polynomials of degree < n/2 (Nyquist handled as a cosine mode).
    """
    v = _values(u)
    v = v.real if np.iscomplexobj(v) else np.asarray(v, dtype=np.float64)
    n = v.size
    z = np.asarray(z, dtype=np.complex128)
    r = np.abs(z)
    if np.any(r > 1.0 + 1e-12):
        raise ValueError("poisson_extend needs |z| <= 1")
    r = np.minimum(r, 1.0)
    theta = np.angle(z)
    spec = np.fft.fft(v) / n
    k = _signed_freqs(n)
    radial = np.power(r[..., None], np.abs(k))
    phases = np.exp(1j * theta[..., None] * k)
    return (radial * phases * spec).sum(axis=-1).real


def poisson_circle(u, r):
    """Harmonic extension of real nodal data on the full circle of radius r."""
    v = _values(u)
    v = v.real if np.iscomplexobj(v) else np.asarray(v, dtype=np.float64)
    n = v.size
    r = float(r)
    if not 0.0 <= r <= 1.0 + 1e-12:
        raise ValueError("poisson_circle needs 0 <= r <= 1")
    r = min(r, 1.0)
    spec = np.fft.fft(v)
    damped = spec * np.power(r, np.abs(_signed_freqs(n)))
    return np.fft.ifft(damped).real


def hp_boundary_distance(f, g, p):
    """Trapezoid rule for the H^p-style gap integral(|f-g|^p dt), 0 < p < 1/2.

    Traces are taken on the finer of the two functions' natural grids, so
    mixed resolutions resample automatically.
    """
    p = float(p)
    if not 0.0 < p < 0.5:
        raise ValueError("exponent must satisfy 0 < p < 1/2")
    n = max(
        next_power_of_two(max(f.coeffs.size, MIN_GRID)),
        next_power_of_two(max(g.coeffs.size, MIN_GRID)),
    )
    diff = np.abs(f.trace(n).values - g.trace(n).values)
    return (2.0 * np.pi / n) * np.power(diff, p).sum()
