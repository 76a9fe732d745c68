"""Circulant gradient-smoothing operators and their FFT-based solvers.

The order-n smoothing operator is I + (-1)^n * sigma * L^n, where L is the
periodic one-dimensional discrete Laplacian acting on vector indices. Its
eigenvalues in the discrete Fourier basis are 1 + 4^n * sigma * sin^(2n)(pi*j/m),
so applying the operator, its inverse, or its inverse square root costs one
FFT round trip.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DimensionError",
    "StencilCoefficients",
    "SmootherPlan",
    "build_stencil",
    "wrap_stencil",
    "spectrum",
    "build_plan",
    "apply_forward",
    "apply_inverse",
    "apply_inverse_sqrt",
    "forward_difference",
    "backward_difference",
    "dense_operator",
    "dense_solve_oracle",
    "fourier_transform",
    "inverse_fourier_transform",
]


class DimensionError(ValueError):
    """Vector length is incompatible with the requested smoothing order."""


@dataclass(frozen=True)
class StencilCoefficients:
    """Central-difference stencil of L^n: 2n+1 signed integer weights."""

    order: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if self.order < 1:
            raise ValueError("stencil order must be >= 1")
        if c.shape != (2 * self.order + 1,):
            raise ValueError("stencil must have length 2n+1")
        object.__setattr__(self, "coeffs", c)


def build_stencil(n: int) -> StencilCoefficients:
    """Weights of the 2n-th central difference, built level by level.

    Each level folds (1, -2, 1) into the previous stencil, with the two
    outermost entries pinned to 1; the result equals the signed binomials
    (-1)^k * C(2n, k).
    """
    if n < 1:
        raise ValueError("order-0 smoothing is the identity and has no stencil")
    c = np.array([1.0, -2.0, 1.0])
    for k in range(2, n + 1):
        prev = c
        c = np.empty(2 * k + 1)
        c[0] = c[-1] = 1.0
        c[1] = c[-2] = -2.0 * prev[0] + prev[1]
        for i in range(2, 2 * k - 1):
            c[i] = prev[i - 2] - 2.0 * prev[i - 1] + prev[i]
    return StencilCoefficients(order=n, coeffs=c)


def wrap_stencil(stencil: StencilCoefficients, m: int) -> np.ndarray:
    """Lay the stencil out as the first column of the length-m circulant L^n.

    The center weight sits at index 0, the right half at 1..n, the left half
    at m-n..m-1. Requires m >= 2n+1 so the halves do not overlap.
    """
    n = stencil.order
    if m < 2 * n + 1:
        raise DimensionError(
            f"cannot wrap an order-{n} stencil into length {m}; need m >= {2 * n + 1}"
        )
    c = stencil.coeffs
    v = np.zeros(m)
    v[0] = c[n]
    v[1 : n + 1] = c[n + 1 :]
    v[m - n :] = c[:n]
    return v


def spectrum(m: int, n: int, sigma: float) -> np.ndarray:
    """Closed-form eigenvalues 1 + 4^n * sigma * sin^(2n)(pi*j/m), j = 0..m-1."""
    j = np.arange(m)
    return 1.0 + 4.0**n * sigma * np.sin(np.pi * j / m) ** (2 * n)


@dataclass(frozen=True)
class SmootherPlan:
    """Precomputed spectrum of the order-n smoothing operator for one (m, n, sigma).

    ``dim`` is the logical vector length; ``fft_dim`` is the transform length,
    larger than ``dim`` only when the vector had to be zero-padded up to 2n+1.
    Immutable, so a single plan can be shared across threads.
    """

    dim: int
    order: int
    sigma: float
    eigenvalues: np.ndarray
    fft_dim: int = field(default=0)

    def __post_init__(self):
        if self.fft_dim == 0:
            object.__setattr__(self, "fft_dim", self.dim)

    @property
    def padded(self) -> bool:
        return self.fft_dim != self.dim


def build_plan(m: int, n: int, sigma: float, pad: bool = True) -> SmootherPlan:
    """Construct the reusable solve context for the order-n smoother.

    Eigenvalues are computed from the closed form and cross-checked against
    1 + (-1)^n * sigma * DFT(wrapped stencil) for n <= 3. Vectors shorter than
    the stencil span (m < 2n+1) are handled by zero-padding up to 2n+1 when
    ``pad`` is true and rejected otherwise.
    """
    if m < 1:
        raise ValueError("dimension must be positive")
    if n < 1:
        raise ValueError("smoothing order must be >= 1")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    fft_dim = m
    if m < 2 * n + 1:
        if not pad:
            raise DimensionError(
                f"order-{n} smoothing needs dimension >= {2 * n + 1}, got {m}; "
                "enable padding to add dummy entries"
            )
        fft_dim = 2 * n + 1
    lam = spectrum(fft_dim, n, sigma)
    if n <= 3:
        v = wrap_stencil(build_stencil(n), fft_dim)
        lam_dft = 1.0 + (-1.0) ** n * sigma * np.fft.fft(v)
        if np.abs(lam_dft.imag).max() > 1e-12 * max(1.0, np.abs(lam).max()):
            raise AssertionError("stencil DFT produced a non-real spectrum")
        if not np.allclose(lam_dft.real, lam, rtol=1e-12, atol=1e-12):
            raise AssertionError("closed-form and stencil spectra disagree")
    return SmootherPlan(dim=m, order=n, sigma=float(sigma), eigenvalues=lam, fft_dim=fft_dim)


def _check_length(plan: SmootherPlan, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (plan.dim,):
        raise DimensionError(f"expected a vector of length {plan.dim}, got shape {x.shape}")
    return x


def _pad(plan: SmootherPlan, x: np.ndarray) -> np.ndarray:
    if not plan.padded:
        return x
    out = np.zeros(plan.fft_dim)
    out[: plan.dim] = x
    return out


def _spectral_multiply(plan: SmootherPlan, x: np.ndarray, multipliers: np.ndarray) -> np.ndarray:
    xp = _pad(plan, x)
    out = np.fft.ifft(np.fft.fft(xp) * multipliers).real
    return out[: plan.dim]


def apply_forward(plan: SmootherPlan, d: np.ndarray, spectral: bool = False) -> np.ndarray:
    """Apply the forward operator: g = d + (-1)^n * sigma * (stencil * d).

    The default route is the circular stencil convolution; ``spectral=True``
    multiplies by the eigenvalues instead. The two agree to 1e-12 relative.
    """
    d = _check_length(plan, d)
    if plan.sigma == 0.0:
        return d.copy()
    if spectral:
        return _spectral_multiply(plan, d, plan.eigenvalues)
    n = plan.order
    c = build_stencil(n).coeffs
    dp = _pad(plan, d)
    conv = np.zeros_like(dp)
    for offset in range(-n, n + 1):
        conv += c[n + offset] * np.roll(dp, -offset)
    out = dp + (-1.0) ** n * plan.sigma * conv
    return out[: plan.dim]


def apply_inverse(plan: SmootherPlan, g: np.ndarray) -> np.ndarray:
    """Solve the circulant system: returns d with (I + (-1)^n sigma L^n) d = g."""
    g = _check_length(plan, g)
    if plan.sigma == 0.0:
        return g.copy()
    return _spectral_multiply(plan, g, 1.0 / plan.eigenvalues)


def apply_inverse_sqrt(plan: SmootherPlan, v: np.ndarray) -> np.ndarray:
    """Apply the inverse square root of the order-1 operator (multipliers lambda^-1/2).

    Applying it twice equals ``apply_inverse``. Only order 1 is supported; the
    square-root estimates are stated for the plain (non-hyper) smoother.
    """
    if plan.order != 1:
        raise ValueError("inverse square root is only defined for order-1 plans")
    v = _check_length(plan, v)
    if plan.sigma == 0.0:
        return v.copy()
    return _spectral_multiply(plan, v, 1.0 / np.sqrt(plan.eigenvalues))


def forward_difference(p: int, u: np.ndarray) -> np.ndarray:
    """p-fold periodic forward difference: (Du)_i = u_{i+1} - u_i with wraparound."""
    if p < 0:
        raise ValueError("difference order must be >= 0")
    out = np.asarray(u, dtype=float).copy()
    for _ in range(p):
        out = np.roll(out, -1) - out
    return out


def backward_difference(p: int, u: np.ndarray) -> np.ndarray:
    """p-fold periodic backward difference, the negative transpose of the forward one."""
    if p < 0:
        raise ValueError("difference order must be >= 0")
    out = np.asarray(u, dtype=float).copy()
    for _ in range(p):
        out = out - np.roll(out, 1)
    return out


def dense_operator(m: int, n: int, sigma: float) -> np.ndarray:
    """Dense m-by-m matrix of the order-n smoother.

    For m >= 2n+1 this is the circulant built from the wrapped stencil. For
    smaller m the operator is synthesized from the closed-form spectrum in the
    DFT basis (equivalent to wrapping the stencil with overlapped taps summed),
    which keeps the matrix exactly invertible at tiny dimensions. The envelope
    machinery relies on that exactness.
    """
    if sigma == 0.0:
        return np.eye(m)
    if m >= 2 * n + 1:
        col = np.zeros(m)
        col[0] = 1.0
        col += (-1.0) ** n * sigma * wrap_stencil(build_stencil(n), m)
        # circulant: A[i, j] = col[(i - j) mod m]
        idx = (np.arange(m)[:, None] - np.arange(m)[None, :]) % m
        return col[idx]
    lam = spectrum(m, n, sigma)
    F = np.exp(-2j * np.pi * np.outer(np.arange(m), np.arange(m)) / m)
    A = (F.conj().T @ np.diag(lam) @ F).real / m
    return A


def dense_solve_oracle(m: int, n: int, sigma: float, g: np.ndarray) -> np.ndarray:
    """Test oracle: solve the smoothing system with a dense LU factorization.

    Builds the dense circulant from the wrapped stencil and calls a general
    solver. Sizes above 4096 are rejected to keep the dense cost bounded.
    Vectors shorter than 2n+1 are zero-padded exactly like ``apply_inverse``.
    """
    if m > 4096:
        raise ValueError("dense oracle is limited to m <= 4096")
    g = np.asarray(g, dtype=float)
    if g.shape != (m,):
        raise DimensionError(f"expected a vector of length {m}, got shape {g.shape}")
    if sigma == 0.0:
        return g.copy()
    fft_dim = max(m, 2 * n + 1)
    gp = np.zeros(fft_dim)
    gp[:m] = g
    w = wrap_stencil(build_stencil(n), fft_dim)
    col = np.zeros(fft_dim)
    col[0] = 1.0
    col = col + (-1.0) ** n * sigma * w
    idx = (np.arange(fft_dim)[:, None] - np.arange(fft_dim)[None, :]) % fft_dim
    return np.linalg.solve(col[idx], gp)[:m]


def fourier_transform(x: np.ndarray) -> np.ndarray:
    """Unnormalized discrete Fourier transform, any length including primes."""
    return np.fft.fft(np.asarray(x))


def inverse_fourier_transform(x: np.ndarray) -> np.ndarray:
    """Inverse transform normalized by 1/m, so ifft(fft(x)) round-trips to x."""
    return np.fft.ifft(np.asarray(x))
