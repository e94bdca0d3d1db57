"""Finite-difference differential operators, Riemann quadrature and
residual checks for the classical integral identities."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgument
from .spaces import GridFunction, grid_inner

FIRST_DERIVATIVE_STEP = 1e-5
LAPLACIAN_STEP = 1e-3


@dataclass(frozen=True)
class DiffScheme:
    kind: str = "central"
    h: float = FIRST_DERIVATIVE_STEP

    def __post_init__(self):
        if self.kind not in ("forward", "backward", "central"):
            raise InvalidArgument(f"unknown difference scheme {self.kind!r}")
        if not self.h > 0:
            raise InvalidArgument("step size must be positive")


CENTRAL = DiffScheme()


def _point(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


def directional_derivative(f: Callable, x, d, scheme: DiffScheme = CENTRAL) -> float:
    """Finite-difference estimate of ``d/ds f(x + s d)`` at ``s = 0``.

    ``d`` is not normalized, so the result is ``<grad f(x), d>``.
    """
    x, d = _point(x), _point(d)
    if not np.any(d):
        raise InvalidArgument("direction must be nonzero")
    h = scheme.h
    if scheme.kind == "central":
        return float((f(x + h * d) - f(x - h * d)) / (2 * h))
    if scheme.kind == "forward":
        return float((f(x + h * d) - f(x)) / h)
    return float((f(x) - f(x - h * d)) / h)


def gradient_fd(f: Callable, x, scheme: DiffScheme = CENTRAL) -> np.ndarray:
    x = _point(x)
    eye = np.eye(x.size)
    return np.array([directional_derivative(f, x, eye[i], scheme) for i in range(x.size)])


def jacobian_fd(F: Callable, x, scheme: DiffScheme = CENTRAL) -> np.ndarray:
    """Matrix of partials ``J[i, j] = dF_i / dx_j``, shape (dim_out, dim_in)."""
    x = _point(x)
    h = scheme.h
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        if scheme.kind == "central":
            col = (_point(F(x + e)) - _point(F(x - e))) / (2 * h)
        elif scheme.kind == "forward":
            col = (_point(F(x + e)) - _point(F(x))) / h
        else:
            col = (_point(F(x)) - _point(F(x - e))) / h
        cols.append(col)
    return np.column_stack(cols)


def divergence_fd(F: Callable, x, scheme: DiffScheme = CENTRAL) -> float:
    J = jacobian_fd(F, x, scheme)
    if J.shape[0] != J.shape[1]:
        raise InvalidArgument(f"divergence needs a square field, got {J.shape}")
    return float(np.trace(J))


def laplacian_fd(f: Callable, x, h: float = LAPLACIAN_STEP) -> float:
    """Sum of second central differences along each coordinate axis."""
    if not h > 0:
        raise InvalidArgument("step size must be positive")
    x = _point(x)
    fx = f(x)
    total = 0.0
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        total += f(x + e) - 2 * fx + f(x - e)
    return float(total / h ** 2)


def riemann_integral(f: Callable, a: float, b: float, n: int, rule: str = "trapezoid") -> float:
    """Composite left/midpoint/trapezoid rule with n uniform subintervals."""
    if not b > a:
        raise InvalidArgument("need b > a")
    if n < 1:
        raise InvalidArgument("need at least one subinterval")
    h = (b - a) / n
    if rule == "left":
        x = a + h * np.arange(n)
        return float(h * np.sum(f(x)))
    if rule == "midpoint":
        x = a + h * (np.arange(n) + 0.5)
        return float(h * np.sum(f(x)))
    if rule == "trapezoid":
        y = np.asarray(f(np.linspace(a, b, n + 1)), dtype=float)
        return float(h * (y.sum() - 0.5 * (y[0] + y[-1])))
    raise InvalidArgument(f"unknown rule {rule!r}")


def taylor_residual(f: Callable, x, dx, scheme: DiffScheme = CENTRAL) -> float:
    """Remainder of the first-order Taylor expansion of f at x."""
    x, dx = _point(x), _point(dx)
    return float(abs(f(x + dx) - f(x) - gradient_fd(f, x, scheme) @ dx))


# ---------------------------------------------------------------------------
# grid calculus
# ---------------------------------------------------------------------------

def grid_derivative(f: GridFunction, method: str = "auto") -> GridFunction:
    """Derivative of sampled data.

    Periodic grids default to the Fourier (spectral) derivative, exact for
    band-limited data; ``method="central"`` gives the wraparound central
    difference instead. Closed grids use second-order central differences
    with one-sided stencils at the endpoints.
    """
    if method == "auto":
        method = "spectral" if f.periodic else "central"
    h = f.spacing
    s = f.samples
    if f.periodic and method == "spectral":
        n = f.n
        k = np.fft.fftfreq(n, d=1.0 / n)
        if n % 2 == 0:
            k[n // 2] = 0.0  # Nyquist mode has no well-defined derivative
        scale = 2 * np.pi / (f.b - f.a)
        ds = np.fft.ifft(1j * k * scale * np.fft.fft(s))
        if not np.iscomplexobj(s):
            ds = ds.real
        return f.with_samples(ds)
    if method != "central":
        raise InvalidArgument(f"unknown derivative method {method!r}")
    if f.periodic:
        return f.with_samples((np.roll(s, -1) - np.roll(s, 1)) / (2 * h))
    return f.with_samples(np.gradient(s, h, edge_order=2))


@dataclass(frozen=True)
class AdjointnessResult:
    """``lhs = <f', F> + <f, F'>``; ``residual = lhs - boundary``."""

    lhs: complex
    boundary: complex
    residual: float


def adjointness_residual(f: GridFunction, F: GridFunction, variant: str = "periodic",
                         method: str = "auto") -> AdjointnessResult:
    """Residual of integration by parts between gradient and divergence in 1-D.

    For ``variant="periodic"`` the boundary term is zero; for
    ``variant="boundary"`` it is ``f F`` evaluated between the endpoints.
    """
    if not f.same_grid(F):
        raise InvalidArgument("f and F must share a grid")
    if variant == "periodic":
        if not f.periodic:
            raise InvalidArgument("periodic variant needs a periodic grid")
        boundary = 0.0
    elif variant == "boundary":
        if f.periodic:
            raise InvalidArgument("boundary variant needs a closed grid")
        boundary = f.samples[-1] * np.conj(F.samples[-1]) - f.samples[0] * np.conj(F.samples[0])
        if f.normalization == "circle":
            boundary /= 2 * np.pi
    else:
        raise InvalidArgument(f"unknown variant {variant!r}")
    lhs = grid_inner(grid_derivative(f, method), F) + grid_inner(f, grid_derivative(F, method))
    return AdjointnessResult(complex(lhs), complex(boundary), float(abs(lhs - boundary)))


def dirichlet_energy_grid(f: GridFunction, method: str = "auto") -> float:
    """``<f', f'>`` of sampled data."""
    df = grid_derivative(f, method)
    return float(np.real(grid_inner(df, df)))


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix: QR of a Gaussian matrix with R's diagonal made positive."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))
