"""Closed-form constants and bounds for the smoothing operator, with sampling checks.

Covers the averaged inverse-spectrum constant beta and its closed form, the
high-probability tail bound on the smoothed-to-raw norm ratio, the variance
reduction bound for Gaussian noise, and small Monte-Carlo / dense-eigensolve
harnesses that exercise each of them numerically.
"""

from dataclasses import dataclass, field

import numpy as np

from lsopt.smoothing import apply_inverse_sqrt, build_plan, spectrum

__all__ = [
    "BetaResult",
    "compute_beta",
    "ratio_tail_bound",
    "RatioSummary",
    "monte_carlo_ratio",
    "VarianceBound",
    "variance_ratio_bound",
    "empirical_variance_ratio",
    "TraceMajorizationReport",
    "eigen_product_check",
]


@dataclass(frozen=True)
class BetaResult:
    """Averaged inverse spectrum (1/m) sum 1/lambda_j of the order-1 smoother.

    ``beta_closed`` evaluates (1 + alpha^m) / ((1 - alpha^m) * sqrt(4 sigma + 1))
    with alpha the root (2 sigma + 1 - sqrt(4 sigma + 1)) / (2 sigma);
    ``beta_sum`` is the direct m-term average. Both are stored and must agree.
    """

    sigma: float
    m: int
    beta_closed: float
    beta_sum: float
    alpha: float
    beta_limit: float

    def __post_init__(self):
        if abs(self.beta_closed - self.beta_sum) > 1e-12:
            raise AssertionError(
                f"closed form {self.beta_closed!r} and direct sum {self.beta_sum!r} disagree"
            )


def compute_beta(sigma: float, m: int) -> BetaResult:
    """Evaluate beta both by the closed form and by direct summation."""
    if m < 1:
        raise ValueError("m must be positive")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0.0:
        return BetaResult(sigma=0.0, m=m, beta_closed=1.0, beta_sum=1.0, alpha=0.0, beta_limit=1.0)
    root = np.sqrt(4.0 * sigma + 1.0)
    alpha = (2.0 * sigma + 1.0 - root) / (2.0 * sigma)
    am = alpha**m
    closed = (1.0 + am) / ((1.0 - am) * root)
    direct = float(np.mean(1.0 / spectrum(m, 1, sigma)))
    return BetaResult(
        sigma=float(sigma),
        m=m,
        beta_closed=float(closed),
        beta_sum=direct,
        alpha=float(alpha),
        beta_limit=float(1.0 / root),
    )


def ratio_tail_bound(alpha: float, sigma: float, m: int) -> float:
    """Tail bound on P(||smoothed v|| >= alpha ||v||) for v uniform in the unit ball.

    Evaluates 2 exp(-(2/pi^2) m ((alpha - alpha pi/sqrt(m) - sqrt(beta)) / (alpha+1))^2).
    Only asserted for alpha above sqrt(beta) / (1 - pi/sqrt(m)), with m > pi^2;
    smaller alpha raises, since the estimate says nothing there.
    """
    if m <= np.pi**2:
        raise ValueError("the bound requires m > pi^2")
    beta = compute_beta(sigma, m).beta_closed
    threshold = np.sqrt(beta) / (1.0 - np.pi / np.sqrt(m))
    if alpha <= threshold:
        raise ValueError(f"alpha must exceed {threshold:.6g} for the bound to apply")
    z = (alpha - alpha * np.pi / np.sqrt(m) - np.sqrt(beta)) / (alpha + 1.0)
    return float(2.0 * np.exp(-(2.0 / np.pi**2) * m * z**2))


@dataclass(frozen=True)
class RatioSummary:
    """Monte-Carlo summary of ||M v|| / ||v|| over unit-sphere draws."""

    sigma: float
    m: int
    samples: int
    mean: float
    std: float
    exceedance: dict = field(default_factory=dict)


def monte_carlo_ratio(sigma, m, samples, seed, alphas=()) -> RatioSummary:
    """Sample the smoothed-to-raw norm ratio on the unit sphere.

    The ratio is scale-invariant, so sphere draws stand in for ball draws.
    Returns mean, standard deviation, and the exceedance frequency at each
    requested alpha level. Deterministic for a fixed seed.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    plan = build_plan(m, 1, sigma)
    rng = np.random.default_rng(seed)
    ratios = np.empty(samples)
    block = max(1, min(samples, 2**22 // max(m, 1)))
    lam_isqrt = 1.0 / np.sqrt(plan.eigenvalues)
    done = 0
    while done < samples:
        b = min(block, samples - done)
        v = rng.standard_normal((b, m))
        norms = np.linalg.norm(v, axis=1)
        w = np.fft.ifft(np.fft.fft(v, axis=1) * lam_isqrt, axis=1).real
        ratios[done : done + b] = np.linalg.norm(w, axis=1) / norms
        done += b
    exceed = {float(a): float(np.mean(ratios >= a)) for a in alphas}
    return RatioSummary(
        sigma=float(sigma),
        m=m,
        samples=samples,
        mean=float(ratios.mean()),
        std=float(ratios.std()),
        exceedance=exceed,
    )


@dataclass(frozen=True)
class VarianceBound:
    """Upper bound on the summed-variance ratio after smoothing Gaussian noise."""

    order: int
    sigma: float
    m: int
    kappa: float
    bound: float


def variance_ratio_bound(n: int, sigma: float, m: int, kappa: float = 1.0) -> VarianceBound:
    """Evaluate 1 - 1/kappa + (1/(kappa m)) sum_j 1/lambda_j^2 over j = 0..m-1.

    kappa is the condition number of the noise covariance; kappa = 1 reduces
    the bound to the plain averaged inverse-square spectrum.
    """
    if kappa < 1.0:
        raise ValueError("condition number must be >= 1")
    if m < 1:
        raise ValueError("m must be positive")
    mean_inv_sq = float(np.mean(1.0 / spectrum(m, n, sigma) ** 2))
    bound = 1.0 - 1.0 / kappa + mean_inv_sq / kappa
    return VarianceBound(order=n, sigma=float(sigma), m=m, kappa=float(kappa), bound=float(bound))


def empirical_variance_ratio(n, sigma, m, covariance=None, samples=2000, seed=0) -> float:
    """Measure the summed-variance ratio on sampled Gaussian noise.

    ``covariance`` gives the diagonal of the noise covariance (identity when
    omitted). Each draw is smoothed by the order-n inverse; the ratio of the
    summed per-coordinate variances after and before smoothing is returned.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    if covariance is None:
        scale = np.ones(m)
    else:
        scale = np.asarray(covariance, dtype=float)
        if scale.shape != (m,):
            raise ValueError("covariance spec must list m diagonal entries")
        if np.any(scale <= 0):
            raise ValueError("covariance eigenvalues must be positive")
    plan = build_plan(m, 1 if n == 0 else n, sigma)
    rng = np.random.default_rng(seed)
    sd = np.sqrt(scale)
    raw_var = np.zeros(m)
    smooth_var = np.zeros(m)
    raw_mean = np.zeros(m)
    smooth_mean = np.zeros(m)
    block = max(1, min(samples, 2**22 // max(m, 1)))
    done = 0
    inv = 1.0 / plan.eigenvalues
    while done < samples:
        b = min(block, samples - done)
        noise = rng.standard_normal((b, m)) * sd
        smoothed = np.fft.ifft(np.fft.fft(noise, axis=1) * inv, axis=1).real
        raw_var += np.sum(noise**2, axis=0)
        smooth_var += np.sum(smoothed**2, axis=0)
        raw_mean += np.sum(noise, axis=0)
        smooth_mean += np.sum(smoothed, axis=0)
        done += b
    raw = raw_var / samples - (raw_mean / samples) ** 2
    smo = smooth_var / samples - (smooth_mean / samples) ** 2
    return float(smo.sum() / raw.sum())


@dataclass(frozen=True)
class TraceMajorizationReport:
    """Outcome of checking trace(AB) <= sum of sorted eigenvalue products."""

    sizes: tuple
    trials: int
    violations: int
    max_violation: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def eigen_product_check(sizes=(8,), trials=100, seed=0) -> TraceMajorizationReport:
    """Verify the eigenvalue-product trace inequality on random SPD pairs.

    For symmetric positive definite A and B, the eigenvalues of AB summed are
    at most the sum of the descending-sorted eigenvalue products. Small sizes
    only; the check runs a dense eigensolve per trial.
    """
    sizes = tuple(int(s) for s in sizes)
    if any(s < 1 or s > 64 for s in sizes):
        raise ValueError("sizes must lie in 1..64 for the dense eigensolve")
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for s in sizes:
        for _ in range(trials):
            ma = rng.standard_normal((s, s))
            mb = rng.standard_normal((s, s))
            a = ma @ ma.T + 1e-3 * np.eye(s)
            b = mb @ mb.T + 1e-3 * np.eye(s)
            la = np.sort(np.linalg.eigvalsh(a))[::-1]
            lb = np.sort(np.linalg.eigvalsh(b))[::-1]
            lhs = float(np.trace(a @ b))  # = sum of eigenvalues of AB
            rhs = float(np.dot(la, lb))
            slack = lhs - rhs
            if slack > 1e-9 * max(1.0, abs(rhs)):
                violations += 1
                worst = max(worst, slack)
    return TraceMajorizationReport(
        sizes=sizes, trials=trials, violations=violations, max_violation=worst
    )
