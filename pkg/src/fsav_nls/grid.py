"""Periodic collocation grids and the discrete fractional Laplacian.

Fields live on ``x_j = x_L + j*h`` (``j = 0..N-1``, the right end is
identified with the left). One-dimensional fields are arrays of shape
``(N,)``; two-dimensional fields have shape ``(N_y, N_x)`` so that x is the
fastest-varying (last) axis.

Transform convention: the forward FFT is unnormalized and the inverse
carries ``1/N`` per axis (``scipy.fft`` defaults). Under this convention

    h * sum(u**2) == h / N * sum(|fft(u)|**2)

The discrete fractional Laplacian ``-gamma * (-Delta)^(alpha/2)`` is diagonal
in Fourier space with eigenvalue ``-gamma * |k mu|**alpha`` at integer mode
``k`` (standard FFT ordering, single Nyquist mode ``k = -N/2``). In 2D the
eigenvalue at ``(k_x, k_y)`` is the sum of the per-axis values.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

__all__ = [
    "GridSpec",
    "SpectralSymbol",
    "build_grid",
    "build_symbol",
    "apply_operator",
    "inner_product",
    "forward",
    "inverse",
]

# Imaginary residue allowed after the inverse transform, relative to the
# largest value that could be produced (|lambda|_max * |field|_inf).
_REALNESS_RTOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid in one or two dimensions.

    Per-axis tuples are ordered ``(x, y)``. Array shapes are reversed,
    see :attr:`shape`.
    """

    lower: tuple
    upper: tuple
    n: tuple

    @property
    def dim(self):
        return len(self.n)

    @property
    def length(self):
        return tuple(b - a for a, b in zip(self.lower, self.upper))

    @property
    def h(self):
        return tuple(L / n for L, n in zip(self.length, self.n))

    @property
    def mu(self):
        """Fundamental wavenumber ``2*pi/(x_R - x_L)`` per axis."""
        return tuple(2.0 * np.pi / L for L in self.length)

    @property
    def cell(self):
        """Quadrature weight ``h`` (1D) or ``h_x * h_y`` (2D)."""
        return float(np.prod(self.h))

    @property
    def shape(self):
        return tuple(reversed(self.n))

    @property
    def size(self):
        return int(np.prod(self.n))

    def points(self, axis=0):
        """Collocation points along one axis (right end excluded)."""
        return self.lower[axis] + np.arange(self.n[axis]) * self.h[axis]

    def mesh(self):
        """Coordinate arrays with the field shape: ``(x,)`` or ``(X, Y)``."""
        if self.dim == 1:
            return (self.points(0),)
        return tuple(np.meshgrid(self.points(0), self.points(1), indexing="xy"))

    def modes(self, axis=0):
        """Integer mode indices ``0..N/2-1, -N/2..-1`` along one axis."""
        n = self.n[axis]
        return np.rint(sfft.fftfreq(n, 1.0 / n)).astype(int)

    def check_field(self, v, name="field"):
        v = np.asarray(v)
        if v.shape != self.shape:
            raise ValueError(f"{name} has shape {v.shape}, grid expects {self.shape}")
        return v


def build_grid(dim, lower, upper, n):
    """Build a 1D or 2D periodic grid.

    Scalars are broadcast to every axis, so ``build_grid(2, -8, 8, 128)``
    gives the square ``[-8, 8]^2`` with 128 points per axis.
    """
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")

    def per_axis(v, name):
        t = tuple(np.atleast_1d(v).tolist())
        if len(t) == 1:
            t = t * dim
        if len(t) != dim:
            raise ValueError(f"{name} needs {dim} entries, got {len(t)}")
        return t

    lower = tuple(float(a) for a in per_axis(lower, "lower"))
    upper = tuple(float(b) for b in per_axis(upper, "upper"))
    n_raw = per_axis(n, "n")
    for v in n_raw:
        if float(v) != int(v):
            raise ValueError(f"N must be an integer, got {v}")
    n = tuple(int(v) for v in n_raw)

    for a, b in zip(lower, upper):
        if not b > a:
            raise ValueError(f"domain end {b} must exceed start {a}")
    for v in n:
        if v < 4 or v % 2:
            raise ValueError(f"N must be even and at least 4, got {v}")
    return GridSpec(lower, upper, n)


@dataclass(frozen=True)
class SpectralSymbol:
    """Eigenvalues of ``gamma * D^alpha`` on a grid.

    ``axis_values[i]`` holds ``-gamma*|k mu_i|**alpha`` in FFT order for
    axis ``i``; ``values`` is the full per-mode array with the field shape.
    """

    grid: GridSpec
    alpha: float
    gamma: float
    axis_values: tuple
    values: np.ndarray = field(repr=False)

    @property
    def max_abs(self):
        return float(np.max(np.abs(self.values)))


def build_symbol(grid, alpha, gamma=1.0, allow_any_alpha=False):
    """Spectral symbol of the discrete operator ``-gamma*(-Delta)^(alpha/2)``.

    ``alpha`` must lie in ``(1, 2]``; ``allow_any_alpha=True`` widens this to
    ``(0, 2]`` for exploratory runs.
    """
    lo = 0.0 if allow_any_alpha else 1.0
    if not (lo < alpha <= 2.0):
        raise ValueError(f"alpha={alpha} outside ({lo:g}, 2]")
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")

    axis_values = []
    for ax in range(grid.dim):
        k = grid.modes(ax)
        lam = -gamma * np.abs(k * grid.mu[ax]) ** alpha
        axis_values.append(lam)

    if grid.dim == 1:
        values = axis_values[0].copy()
    else:
        lam_x, lam_y = axis_values
        values = lam_y[:, None] + lam_x[None, :]
    values.setflags(write=False)
    for lam in axis_values:
        lam.setflags(write=False)
    return SpectralSymbol(grid, float(alpha), float(gamma), tuple(axis_values), values)


def forward(v):
    """Unnormalized forward DFT over all axes."""
    return sfft.fftn(v)


def inverse(vh):
    """Inverse DFT over all axes (carries the ``1/N`` factors)."""
    return sfft.ifftn(vh)


def apply_operator(v, symbol):
    """Apply ``gamma * D^alpha`` to a real field.

    Raises ``ValueError`` on shape mismatch or if the inverse transform
    leaves a non-roundoff imaginary part (which would mean a non-even symbol).
    """
    v = symbol.grid.check_field(v)
    out = inverse(symbol.values * forward(v))
    scale = max(1.0, symbol.max_abs) * max(float(np.max(np.abs(v))), np.finfo(float).tiny)
    residue = float(np.max(np.abs(out.imag)))
    if residue > _REALNESS_RTOL * scale * np.sqrt(symbol.grid.size):
        raise ValueError(f"operator output not real: imaginary residue {residue:.3e}")
    return out.real


def inner_product(u, v, grid):
    """Discrete L2 inner product ``cell * sum(u * v)`` of real fields."""
    u = grid.check_field(u, "u")
    v = grid.check_field(v, "v")
    return grid.cell * float(np.sum(u * v))
