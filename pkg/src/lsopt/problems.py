"""Benchmark objectives with exact gradients, stochastic sources, and envelopes.

Every problem exposes ``value``, ``gradient``, and ``stochastic_gradient``;
the stochastic source is unbiased for the exact gradient. Problems are
immutable after construction, and stochastic calls draw from an RNG handed in
by the caller, so evaluation is safe to run concurrently.

The envelope machinery at the bottom computes the inf-convolution of an
objective with the smoothing-operator quadratic (1/2t) <v-w, A (v-w)> and the
matching proximal (implicit) step.
"""

from dataclasses import dataclass

import numpy as np

from lsopt.smoothing import apply_forward, build_plan, dense_operator

__all__ = [
    "Problem",
    "with_gradient_noise",
    "anisotropic_quadratic",
    "point_cloud_center",
    "rosenbrock",
    "drilled_holes",
    "softmax_regression",
    "radial_ripple",
    "quadratic_form",
    "EnvelopeQuery",
    "EnvelopeResult",
    "EnvelopeSolveError",
    "hopf_lax_envelope",
    "implicit_smoothed_step",
]


class Problem:
    """An objective with exact value/gradient and an optional stochastic source."""

    dim: int
    minimizer = None
    lipschitz = None

    def value(self, w: np.ndarray) -> float:
        raise NotImplementedError

    def gradient(self, w: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def stochastic_gradient(self, w: np.ndarray, rng: np.random.Generator, batch_size: int = 1):
        """Default source is the exact gradient (deterministic problems)."""
        return self.gradient(w)


class _NoisyGradient(Problem):
    """Wraps a problem so the stochastic source adds white Gaussian noise."""

    def __init__(self, base: Problem, epsilon: float):
        self.base = base
        self.epsilon = float(epsilon)
        self.dim = base.dim
        self.minimizer = base.minimizer
        self.lipschitz = base.lipschitz

    def value(self, w):
        return self.base.value(w)

    def gradient(self, w):
        return self.base.gradient(w)

    def stochastic_gradient(self, w, rng, batch_size=1):
        return self.base.gradient(w) + self.epsilon * rng.standard_normal(self.dim)


def with_gradient_noise(problem: Problem, epsilon: float) -> Problem:
    """Simulated-noise wrapper: stochastic gradient = exact gradient + eps * N(0, I)."""
    return _NoisyGradient(problem, epsilon)


class _AnisotropicQuadratic(Problem):
    """Sum of odd-coordinate squares plus even-coordinate squares shrunk 100x."""

    def __init__(self, dim=100):
        if dim % 2:
            raise ValueError("dimension must be even")
        self.dim = dim
        self.coeffs = np.empty(dim)
        self.coeffs[0::2] = 1.0  # odd coordinates in 1-based counting
        self.coeffs[1::2] = 0.01
        self.minimizer = np.zeros(dim)
        self.lipschitz = 2.0

    def value(self, w):
        return float(np.dot(self.coeffs, w * w))

    def gradient(self, w):
        return 2.0 * self.coeffs * w


def anisotropic_quadratic(dim: int = 100) -> Problem:
    """The ill-conditioned diagonal quadratic benchmark (dim 100 by default)."""
    return _AnisotropicQuadratic(dim)


class _PointCloudCenter(Problem):
    """Mean squared distance to a fixed point cloud; minimized at the centroid."""

    def __init__(self, num_points, dim, seed):
        rng = np.random.default_rng(seed)
        self.points = rng.standard_normal((num_points, dim))
        self.dim = dim
        self.num_points = num_points
        self.minimizer = self.points.mean(axis=0)
        self.lipschitz = 2.0

    def value(self, w):
        return float(np.mean(np.sum((self.points - w) ** 2, axis=1)))

    def gradient(self, w):
        return 2.0 * (w - self.minimizer)

    def stochastic_gradient(self, w, rng, batch_size=1):
        if batch_size < 1:
            raise ValueError("batch size must be positive")
        if batch_size >= self.num_points:
            return self.gradient(w)  # full batch carries no sampling variance
        idx = rng.integers(0, self.num_points, batch_size)
        return 2.0 * (w - self.points[idx].mean(axis=0))


def point_cloud_center(num_points: int = 5000, dim: int = 50, seed: int = 0) -> Problem:
    """Finite-sum centering problem over a seeded random point cloud."""
    return _PointCloudCenter(num_points, dim, seed)


class _Rosenbrock(Problem):
    def __init__(self, dim, a, b):
        if dim < 2:
            raise ValueError("rosenbrock needs dimension >= 2")
        self.dim = dim
        self.a = a
        self.b = b
        self.minimizer = np.full(dim, a)

    def value(self, w):
        x = np.asarray(w, dtype=float)
        return float(np.sum((self.a - x[:-1]) ** 2 + self.b * (x[1:] - x[:-1] ** 2) ** 2))

    def gradient(self, w):
        x = np.asarray(w, dtype=float)
        g = np.zeros_like(x)
        g[:-1] += -2.0 * (self.a - x[:-1]) - 4.0 * self.b * x[:-1] * (x[1:] - x[:-1] ** 2)
        g[1:] += 2.0 * self.b * (x[1:] - x[:-1] ** 2)
        return g


def rosenbrock(dim: int = 2, a: float = 1.0, b: float = 100.0) -> Problem:
    """Chained Rosenbrock valley; reduces to the classic two-variable form at dim 2."""
    return _Rosenbrock(dim, a, b)


class _DrilledHoles(Problem):
    """A smooth well at (pi, pi, pi) with a ring of cosine-modulated dips around it.

    Thirteen dip centers sit on the unit circle at angles i/2 for i = 0..12,
    offset to the pi-center, all in the z = pi plane.
    """

    RADIUS = 1.0
    DECAY = 1.0 / np.sqrt(500.0)

    def __init__(self):
        self.dim = 3
        i = np.arange(13)  # integers below 4*pi
        self.hole_centers = np.column_stack(
            [
                self.RADIUS * np.sin(i / 2.0) + np.pi,
                self.RADIUS * np.cos(i / 2.0) + np.pi,
                np.full(13, np.pi),
            ]
        )
        self.center = np.full(3, np.pi)

    def value(self, w):
        x, y, z = w
        well = -4.0 * np.exp(-((x - np.pi) ** 2 + (y - np.pi) ** 2 + (z - np.pi) ** 2))
        q = (x - self.hole_centers[:, 0]) ** 2 + (y - self.hole_centers[:, 1]) ** 2
        dips = -4.0 * np.cos(x) * np.cos(y) * np.sum(np.exp(-self.DECAY * q))
        return float(well + dips)

    def gradient(self, w):
        x, y, z = w
        e0 = np.exp(-((x - np.pi) ** 2 + (y - np.pi) ** 2 + (z - np.pi) ** 2))
        g = np.array([8.0 * (x - np.pi) * e0, 8.0 * (y - np.pi) * e0, 8.0 * (z - np.pi) * e0])
        q = np.exp(
            -self.DECAY
            * ((x - self.hole_centers[:, 0]) ** 2 + (y - self.hole_centers[:, 1]) ** 2)
        )
        cx, sx, cy, sy = np.cos(x), np.sin(x), np.cos(y), np.sin(y)
        g[0] += 4.0 * sx * cy * np.sum(q) + 8.0 * self.DECAY * cx * cy * np.sum(
            q * (x - self.hole_centers[:, 0])
        )
        g[1] += 4.0 * cx * sy * np.sum(q) + 8.0 * self.DECAY * cx * cy * np.sum(
            q * (y - self.hole_centers[:, 1])
        )
        return g


def drilled_holes() -> Problem:
    """The three-variable well-with-dips landscape used for the basin experiment."""
    return _DrilledHoles()


class _SoftmaxRegression(Problem):
    """Multi-class cross-entropy over fixed features, weights flattened row-major."""

    def __init__(self, features, labels, num_classes, l2_penalty):
        self.features = np.asarray(features, dtype=float)
        self.labels = np.asarray(labels, dtype=int)
        if self.features.ndim != 2 or len(self.features) != len(self.labels):
            raise ValueError("features must be (n, d) with one label per row")
        if self.labels.min(initial=0) < 0 or self.labels.max(initial=0) >= num_classes:
            raise ValueError("labels must lie in [0, num_classes)")
        self.num_classes = num_classes
        self.l2_penalty = float(l2_penalty)
        self.num_samples, self.feature_dim = self.features.shape
        self.dim = num_classes * self.feature_dim

    def _loss_grad(self, w, X, y):
        W = w.reshape(self.num_classes, self.feature_dim)
        z = X @ W.T
        z -= z.max(axis=1, keepdims=True)
        p = np.exp(z)
        p /= p.sum(axis=1, keepdims=True)
        loss = float(-np.mean(np.log(p[np.arange(len(y)), y] + 1e-300)))
        resid = p
        resid[np.arange(len(y)), y] -= 1.0
        grad = (resid.T @ X) / len(y)
        if self.l2_penalty:
            loss += 0.5 * self.l2_penalty * float(np.dot(w, w))
            grad = grad + self.l2_penalty * W
        return loss, grad.reshape(-1)

    def value(self, w):
        return self._loss_grad(w, self.features, self.labels)[0]

    def gradient(self, w):
        return self._loss_grad(w, self.features, self.labels)[1]

    def stochastic_gradient(self, w, rng, batch_size=1):
        if batch_size < 1:
            raise ValueError("batch size must be positive")
        if batch_size >= self.num_samples:
            return self.gradient(w)
        idx = rng.integers(0, self.num_samples, batch_size)
        return self._loss_grad(w, self.features[idx], self.labels[idx])[1]


def softmax_regression(features, labels, num_classes, l2_penalty=0.0) -> Problem:
    """Cross-entropy objective with softmax-residual gradients and minibatch sampling."""
    return _SoftmaxRegression(features, labels, num_classes, l2_penalty)


class _RadialRipple(Problem):
    """||w||^2 (1 + sin(2 pi ||w||)/2): a bowl with concentric ripples."""

    def __init__(self, dim):
        self.dim = dim
        self.minimizer = np.zeros(dim)

    def value(self, w):
        rho = float(np.linalg.norm(w))
        return rho * rho * (1.0 + 0.5 * np.sin(2.0 * np.pi * rho))

    def gradient(self, w):
        rho = float(np.linalg.norm(w))
        scale = 2.0 + np.sin(2.0 * np.pi * rho) + np.pi * rho * np.cos(2.0 * np.pi * rho)
        return scale * np.asarray(w, dtype=float)  # -> 0 at the origin by symmetry


def radial_ripple(dim: int = 5) -> Problem:
    """Radially symmetric rippled bowl used for the envelope cross sections."""
    return _RadialRipple(dim)


class _QuadraticForm(Problem):
    def __init__(self, Q):
        Q = np.asarray(Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError("Q must be square")
        self.Q = Q
        self.dim = Q.shape[0]
        self.minimizer = np.zeros(self.dim)
        self.lipschitz = float(np.linalg.norm(Q, 2))

    def value(self, w):
        return 0.5 * float(w @ self.Q @ w)

    def gradient(self, w):
        return self.Q @ w


def quadratic_form(Q) -> Problem:
    """f(w) = w' Q w / 2 for a symmetric positive definite Q (test fixture)."""
    return _QuadraticForm(Q)


# ------------------------------------------------------------------ envelopes
@dataclass(frozen=True)
class EnvelopeQuery:
    """Parameters of one envelope evaluation: time, smoothing strength, inner budget."""

    t: float
    sigma: float
    inner_tolerance: float = 1e-10
    inner_max_iterations: int = 5000

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("envelope time must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


@dataclass(frozen=True)
class EnvelopeResult:
    value: float
    gradient: np.ndarray
    argmin: np.ndarray
    iterations: int


class EnvelopeSolveError(RuntimeError):
    """Inner minimization missed its tolerance; carries the best iterate found."""

    def __init__(self, message, best, residual):
        super().__init__(message)
        self.best = best
        self.residual = residual


def _coupling_forward(dim, sigma):
    """Forward application of the order-1 smoother used in the quadratic coupling.

    Below dimension 3 the exact dense operator stands in for the wrapped
    stencil, keeping forward and inverse a true matrix pair.
    """
    if sigma == 0.0:
        return lambda x: x
    if dim >= 3:
        plan = build_plan(dim, 1, sigma)
        return lambda x: apply_forward(plan, x)
    A = dense_operator(dim, 1, sigma)
    return lambda x: A @ x


def _minimize_coupled(problem, w, query, v0):
    """Descend f(v) + (1/2t) <v-w, A (v-w)> with backtracking line search."""
    t = query.t
    forward = _coupling_forward(problem.dim, query.sigma)

    def grad_z(v):
        return problem.gradient(v) + forward(v - w) / t

    def val_z(v):
        dv = v - w
        return problem.value(v) + 0.5 * float(dv @ forward(dv)) / t

    v = np.asarray(v0, dtype=float).copy()
    z = val_z(v)
    g = grad_z(v)
    # worst-case curvature of the coupling term caps the safe first step
    step = t / (1.0 + 4.0 * query.sigma)
    eps = np.finfo(float).eps
    iterations = 0
    for iterations in range(1, query.inner_max_iterations + 1):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= query.inner_tolerance:
            return v, z, iterations - 1
        # Once the true decrease drops below float resolution the Armijo test
        # is pure noise, so a trial may also be accepted on a shrinking
        # residual; that keeps the iteration from stalling at the eps floor
        # without letting slowly diverging oscillations sneak through.
        slack = 16.0 * eps * max(1.0, abs(z))
        g_next = None
        while True:
            trial = v - step * g
            z_trial = val_z(trial)
            if z_trial <= z - 1e-4 * step * gnorm * gnorm:
                break
            if z_trial <= z + slack:
                g_next = grad_z(trial)
                if float(np.linalg.norm(g_next)) <= gnorm:
                    break
                g_next = None
            step *= 0.5
            if step < 1e-250:
                raise EnvelopeSolveError(
                    f"line search collapsed with residual {gnorm:.3e}", v, gnorm
                )
        v, z = trial, z_trial
        g = grad_z(v) if g_next is None else g_next
        step *= 1.25
    gnorm = float(np.linalg.norm(g))
    if gnorm <= query.inner_tolerance:
        return v, z, iterations
    raise EnvelopeSolveError(
        f"inner solve used {query.inner_max_iterations} iterations, residual {gnorm:.3e}",
        v,
        gnorm,
    )


def hopf_lax_envelope(problem, w, query: EnvelopeQuery, initial=None) -> EnvelopeResult:
    """Evaluate the inf-convolution envelope u(w, t) and its gradient.

    Minimizes z(v) = f(v) + (1/2t) <v-w, A (v-w)> from ``initial`` (defaults to
    v = w), then reads off the envelope gradient -(1/t) A (v* - w).
    """
    w = np.asarray(w, dtype=float)
    v0 = w if initial is None else np.asarray(initial, dtype=float)
    v, z, iterations = _minimize_coupled(problem, w, query, v0)
    forward = _coupling_forward(problem.dim, query.sigma)
    grad = -forward(v - w) / query.t
    return EnvelopeResult(value=z, gradient=grad, argmin=v, iterations=iterations)


def implicit_smoothed_step(problem, w, t, sigma, tolerance=1e-10, max_iterations=5000):
    """Proximal point in the smoothing metric: argmin_v f(v) + (1/2t) <v-w, A (v-w)>.

    The returned point satisfies w+ = w - t A^{-1} grad f(w+) up to the inner
    tolerance, which makes it one implicit smoothed-gradient step.
    """
    query = EnvelopeQuery(
        t=t, sigma=sigma, inner_tolerance=tolerance, inner_max_iterations=max_iterations
    )
    w = np.asarray(w, dtype=float)
    v, _, _ = _minimize_coupled(problem, w, query, w)
    return v
