"""Eigen/singular value decompositions, Fourier series on the circle and the
periodic heat equation solved through its spectral expansion.

Circle grids are the ``N`` nodes ``x_j = -π + 2πj/N`` (right endpoint
excluded) with the normalized measure ``dx / 2π``; the basis ``e^{inx}``
is then orthonormal.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import AliasingError, DegeneracyError, InvalidArgument
from .spaces import GridFunction, grid_inner

RANK_TOL = 1e-12
SYMMETRY_TOL = 1e-9
DEFAULT_N_MAX = 32


def _scale(A: np.ndarray) -> float:
    s = float(np.max(np.abs(A), initial=0.0))
    return s if s > 0 else 1.0


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each one's largest-magnitude entry is positive.

    Entries within a relative 1e-8 of the column maximum count as tied; the
    lowest such index decides, so near-symmetric vectors get a stable sign.
    """
    V = np.array(vectors, copy=True)
    if V.size == 0:
        return V
    mag = np.abs(V)
    idx = np.argmax(mag >= mag.max(axis=0) * (1 - 1e-8), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


@dataclass(frozen=True, eq=False)
class SymmetricEigen:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.T


def sym_eigen(A) -> SymmetricEigen:
    """Eigendecomposition of a real symmetric matrix, ascending eigenvalues."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgument("matrix must be square")
    asym = float(np.max(np.abs(A - A.T), initial=0.0))
    if asym > SYMMETRY_TOL * _scale(A):
        raise InvalidArgument(f"matrix is not symmetric (max |A - A^T| = {asym:.3g})")
    w, U = np.linalg.eigh(0.5 * (A + A.T))
    return SymmetricEigen(w, fix_signs(U))


@dataclass(frozen=True, eq=False)
class SVDResult:
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    rank: int

    def reconstruct(self) -> np.ndarray:
        m, n = self.U.shape[0], self.V.shape[0]
        S = np.zeros((m, n), dtype=self.sigma.dtype)
        k = self.sigma.size
        S[:k, :k] = np.diag(self.sigma)
        return self.U @ S @ self.V.conj().T


def svd(A, tol: float = RANK_TOL) -> SVDResult:
    """Full SVD ``A = U Σ V*``; rank counts ``σ_i > tol σ_1``."""
    A = np.atleast_2d(np.asarray(A))
    U, s, Vh = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return SVDResult(U, s, Vh.conj().T, rank)


def matrix_rank(A, tol: float = RANK_TOL) -> int:
    return svd(A, tol).rank


def eigen_2x2(A) -> tuple[complex, complex]:
    """Roots of ``λ² - tr(A) λ + det(A) = 0``.

    Complex pairs are returned with the positive imaginary part first;
    real pairs in descending order.
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (2, 2):
        raise InvalidArgument("eigen_2x2 needs a 2x2 matrix")
    half_tr = 0.5 * (A[0, 0] + A[1, 1])
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    # discriminant computed without cancellation from tr^2/4 - det
    disc = (0.5 * (A[0, 0] - A[1, 1])) ** 2 + A[0, 1] * A[1, 0]
    if disc < 0:
        r = np.sqrt(-disc)
        return complex(half_tr, r), complex(half_tr, -r)
    r = np.sqrt(disc)
    big = half_tr + np.copysign(r, half_tr) if half_tr != 0 else r
    small = det / big if big != 0 else -r
    hi, lo = max(big, small), min(big, small)
    return complex(hi), complex(lo)


def adjoint_residual(A, trials: int = 100, adjoint=None, seed: int = 0) -> float:
    """Max over random complex u, v of ``|<Au, v> - <u, A* v>|``.

    ``adjoint`` defaults to the conjugate transpose.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgument("matrix must be square")
    B = A.conj().T if adjoint is None else np.asarray(adjoint)
    rng = np.random.default_rng(seed)
    n = A.shape[0]
    worst = 0.0
    for _ in range(trials):
        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        lhs = np.sum((A @ u) * np.conj(v))
        rhs = np.sum(u * np.conj(B @ v))
        worst = max(worst, float(abs(lhs - rhs)))
    return worst


def circle_laplacian_matrix(N: int) -> np.ndarray:
    """Periodic second-difference matrix on N nodes of [-π, π)."""
    if N < 4:
        raise InvalidArgument("need at least 4 nodes")
    h = 2 * np.pi / N
    L = -2.0 * np.eye(N) + np.roll(np.eye(N), 1, axis=1) + np.roll(np.eye(N), -1, axis=1)
    return L / h ** 2


# ---------------------------------------------------------------------------
# Fourier series
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FourierSeries:
    n_max: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (2 * self.n_max + 1,):
            raise InvalidArgument("need 2 n_max + 1 coefficients")
        object.__setattr__(self, "coeffs", c)

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def coeff(self, n: int) -> complex:
        if abs(n) > self.n_max:
            return 0j
        return complex(self.coeffs[n + self.n_max])

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.exp(1j * np.multiply.outer(x, self.modes)) @ self.coeffs

    def rows(self) -> list[tuple[int, float, float]]:
        return [(int(n), float(c.real), float(c.imag)) for n, c in zip(self.modes, self.coeffs)]


def circle_grid(N: int, fn=None) -> GridFunction:
    """Circle grid with samples of ``fn`` (zeros if omitted)."""
    if fn is None:
        return GridFunction(-np.pi, np.pi, np.zeros(N), periodic=True, normalization="circle")
    return GridFunction.on_circle(fn, N)


def delta_function(N: int) -> GridFunction:
    """Discrete unit impulse at x = 0 with ``<δ, e^{inx}> = 1`` for every n.

    Under the dx/2π measure the rectangle rule weighs each node by 1/N, so
    the impulse carries height N at its node.
    """
    if N % 2:
        raise InvalidArgument("impulse at x = 0 needs an even grid size")
    s = np.zeros(N)
    s[N // 2] = N
    return GridFunction(-np.pi, np.pi, s, periodic=True, normalization="circle")


def _require_circle(f: GridFunction) -> None:
    if not f.periodic or not np.isclose(f.b - f.a, 2 * np.pi):
        raise InvalidArgument("need a periodic grid of period 2π")


def fourier_coeffs(f: GridFunction, n_max: int = DEFAULT_N_MAX) -> FourierSeries:
    """``û_n = (1/2π) ∫ f e^{-inx} dx`` by the rectangle rule, |n| <= n_max."""
    _require_circle(f)
    if n_max < 0:
        raise InvalidArgument("n_max must be non-negative")
    if f.n < 4 * n_max:
        raise AliasingError(f"{f.n} samples cannot resolve {n_max} modes (need >= {4 * n_max})")
    modes = np.arange(-n_max, n_max + 1)
    E = np.exp(-1j * np.multiply.outer(modes, f.x))
    return FourierSeries(n_max, E @ f.samples / f.n)


def fourier_reconstruct(series: FourierSeries, grid: Union[GridFunction, int]) -> GridFunction:
    """Samples of ``Σ û_n e^{inx}`` on a circle grid."""
    if isinstance(grid, int):
        grid = circle_grid(grid)
    return grid.with_samples(series(grid.x))


def parseval_residual(f: GridFunction, n_max: int = DEFAULT_N_MAX) -> float:
    """``| ‖f‖² - Σ|û_n|² |`` with the dx/2π norm."""
    _require_circle(f)
    norm_sq = float(np.mean(np.abs(f.samples) ** 2))
    series = fourier_coeffs(f, n_max)
    return abs(norm_sq - float(np.sum(np.abs(series.coeffs) ** 2)))


def project_basis(f: GridFunction, basis: list[GridFunction]) -> np.ndarray:
    """Coefficients of the best L² approximation of f in span(basis).

    Solves the Gram system ``G c = (<f, φ_k>)_k``; for an orthonormal basis
    this reduces to ``c_k = <f, φ_k>``.
    """
    if not basis:
        raise InvalidArgument("basis is empty")
    k = len(basis)
    G = np.array([[grid_inner(basis[j], basis[i]) for j in range(k)] for i in range(k)])
    rhs = np.array([grid_inner(f, phi) for phi in basis])
    s = np.linalg.svd(G, compute_uv=False)
    if s[-1] <= RANK_TOL * s[0]:
        raise DegeneracyError("basis functions are linearly dependent on this grid")
    c = np.linalg.solve(G, rhs)
    if np.all(np.abs(c.imag) <= 1e-14 * max(1.0, np.max(np.abs(c)))):
        c = c.real
    return c


# ---------------------------------------------------------------------------
# heat equation
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HeatSolution:
    """``f(x, t) = Σ a_n e^{inx} e^{-n² t}`` for the initial coefficients ``a_n``."""

    initial: FourierSeries
    t: float = 0.0
    real: bool = True

    def __call__(self, x, t: Optional[float] = None) -> np.ndarray:
        t = self.t if t is None else t
        if t < 0:
            raise InvalidArgument("heat equation cannot be run backward in time")
        n = self.initial.modes
        damped = FourierSeries(self.initial.n_max, self.initial.coeffs * np.exp(-(n ** 2) * t))
        out = damped(x)
        return out.real if self.real else out

    def coeffs_at(self, t: float) -> FourierSeries:
        n = self.initial.modes
        return FourierSeries(self.initial.n_max, self.initial.coeffs * np.exp(-(n ** 2) * t))

    def on_grid(self, grid: Union[GridFunction, int], t: Optional[float] = None) -> GridFunction:
        if isinstance(grid, int):
            grid = circle_grid(grid)
        return grid.with_samples(self(grid.x, t))


def heat_solve(g: GridFunction, t: float = 0.0, n_max: int = DEFAULT_N_MAX) -> HeatSolution:
    """Spectral solution of ``∂f/∂t = ∂²f/∂x²`` on the circle with ``f(·, 0) = g``.

    The truncation error at time t is bounded by the discarded modes, which
    decay like ``exp(-n_max² t)``.
    """
    if t < 0:
        raise InvalidArgument("heat equation cannot be run backward in time")
    series = fourier_coeffs(g, n_max)
    return HeatSolution(series, t, real=not np.iscomplexobj(g.samples))


def heat_kernel(t: float, n_max: int = DEFAULT_N_MAX, grid: Union[GridFunction, int] = 256) -> GridFunction:
    """``h_t(x) = Σ_{|n| <= n_max} e^{-n² t} e^{inx}`` sampled on a circle grid."""
    if not t > 0:
        raise InvalidArgument("heat kernel needs t > 0")
    if isinstance(grid, int):
        grid = circle_grid(grid)
    n = np.arange(1, n_max + 1)
    vals = 1.0 + 2.0 * np.cos(np.multiply.outer(grid.x, n)) @ np.exp(-(n ** 2) * t)
    return grid.with_samples(vals)


def circular_convolve(f: GridFunction, g: GridFunction, method: str = "fourier") -> GridFunction:
    """``(f ⋆ g)(x) = (1/2π) ∫ f(y) g(x - y) dy`` on a circle grid.

    ``method="fourier"`` multiplies discrete Fourier coefficients;
    ``method="direct"`` evaluates the rectangle-rule sum.
    """
    _require_circle(f)
    if not f.same_grid(g):
        raise InvalidArgument("f and g must share a grid")
    N = f.n
    if N % 2:
        raise InvalidArgument("circular convolution needs an even grid size")
    # node of x_i - x_j on the grid is (i - j + N/2) mod N
    if method == "fourier":
        z = np.fft.ifft(np.fft.fft(f.samples) * np.fft.fft(g.samples))
        out = np.roll(z, -N // 2) / N
    elif method == "direct":
        i = np.arange(N)
        idx = (i[:, None] - i[None, :] + N // 2) % N
        out = (g.samples[idx] @ f.samples) / N
    else:
        raise InvalidArgument(f"unknown method {method!r}")
    if not (np.iscomplexobj(f.samples) or np.iscomplexobj(g.samples)):
        out = np.real(out)
    return f.with_samples(out)
