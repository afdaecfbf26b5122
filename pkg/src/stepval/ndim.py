"""Ball averages and ball-overlap ratios in ``R^n`` (binary64).

The overlap ratio ``|B_x(t) & B_x(0)| / |B_x(0)|`` is available three ways,
none of which is used to check itself:

* ``overlap_ratio_caps``: the lens is two hyperspherical caps, giving
  ``I_z((n+1)/2, 1/2)`` with ``z = 1 - (|t|/2x)**2``;
* ``overlap_ratio_layers``: slice along an axis orthogonal to ``t`` and
  integrate the ``(n-1)``-dimensional overlap over the slices, recursing
  down to the closed-form interval overlap in dimension 1;
* ``overlap_ratio_mc``: Monte Carlo with a counter-based generator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

__all__ = [
    "BallSpec", "SampledField", "QuadratureError", "BudgetExhausted", "ball_volume",
    "overlap_ratio_caps", "overlap_ratio_layers", "overlap_ratio_mc", "symdiff_ratio",
    "layer_squeeze", "ball_cesaro", "uniform_ball",
]


class QuadratureError(ArithmeticError):
    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3g})")
        self.achieved = achieved


class BudgetExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class BallSpec:
    dim: int
    radius: float
    center: tuple = ()

    def __post_init__(self):
        _check(self.dim, self.radius)
        center = tuple(float(c) for c in self.center) or (0.0,) * self.dim
        if len(center) != self.dim:
            raise ValueError("center must have one coordinate per dimension")
        object.__setattr__(self, "center", center)

    def volume(self) -> float:
        return ball_volume(self.dim, self.radius)


@dataclass(frozen=True)
class SampledField:
    """A bounded function on ``R^dim``; ``fn`` maps an ``(N, dim)`` array to ``(N,)``."""

    dim: int
    fn: Callable[[np.ndarray], np.ndarray]
    bound: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not math.isfinite(self.bound) or self.bound < 0:
            raise ValueError("bound must be finite and non-negative")

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(pts), dtype=float)

    def translate(self, t: Sequence[float]) -> SampledField:
        """``y -> u(y - t)``."""
        t = np.asarray(t, dtype=float)
        if t.shape != (self.dim,):
            raise ValueError("translation vector has the wrong length")
        fn = self.fn
        return SampledField(self.dim, lambda pts: fn(pts - t), self.bound)


def _check(dim, x):
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if not x > 0:
        raise ValueError("radius must be positive")


def _norm(t) -> float:
    return float(np.linalg.norm(np.atleast_1d(np.asarray(t, dtype=float))))


def ball_volume(dim: int, radius: float = 1.0) -> float:
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * radius ** dim


def overlap_ratio_caps(dim: int, x: float, t) -> float:
    _check(dim, x)
    d = _norm(t)
    if d >= 2 * x:
        return 0.0
    if d == 0:
        return 1.0
    h = d / (2 * x)
    # I_{1-h^2}(a, 1/2) = 1 - I_{h^2}(1/2, a); the second form keeps precision near h = 0
    return float(1.0 - special.betainc(0.5, (dim + 1) / 2, h * h))


def _quad(fn, a, b, epsrel, what):
    val, err, info = integrate.quad(fn, a, b, epsabs=0.0, epsrel=epsrel, limit=200, full_output=True)[:3]
    if err > max(100 * epsrel * abs(val), 1e-300) and abs(val) > 0:
        raise QuadratureError(f"{what} did not converge", err)
    return val


def _overlap_volume(dim: int, rho: float, d: float, epsrel: float) -> float:
    """Volume of the intersection of two ``dim``-balls of radius ``rho`` at distance ``d``."""
    if d >= 2 * rho:
        return 0.0
    if dim == 1:
        return 2 * rho - d
    theta_max = math.acos(d / (2 * rho))
    # slice r = rho*sin(theta): the slices at |r| < sqrt(rho^2 - d^2/4) overlap
    return 2 * _quad(lambda th: _overlap_volume(dim - 1, rho * math.cos(th), d, epsrel) * rho * math.cos(th),
                     0.0, theta_max, epsrel, f"layer integral in dimension {dim}")


def _ball_volume_layers(dim: int, rho: float, epsrel: float) -> float:
    if dim == 1:
        return 2 * rho
    v = ball_volume(dim - 1)
    return 2 * _quad(lambda th: v * (rho * math.cos(th)) ** (dim - 1) * rho * math.cos(th),
                     0.0, math.pi / 2, epsrel, f"ball layer integral in dimension {dim}")


def overlap_ratio_layers(dim: int, x: float, t, epsrel: float = 1e-11) -> float:
    """Ratio as ``int_0^x f(sqrt(x^2-r^2)) dr / int_0^x g(sqrt(x^2-r^2)) dr``.

    ``f`` and ``g`` are the ``(dim-1)``-dimensional overlap and ball volumes,
    themselves computed by the same recursion.
    """
    _check(dim, x)
    if dim < 2:
        raise ValueError("the layer recursion needs dim >= 2")
    d = _norm(t)
    if d >= 2 * x:
        return 0.0
    return _overlap_volume(dim, x, d, epsrel) / _ball_volume_layers(dim, x, epsrel)


def symdiff_ratio(dim: int, x: float, t) -> float:
    """``|B_x(-t) ^ B_x(0)| / |B_x(0)|``."""
    return 2.0 * (1.0 - overlap_ratio_caps(dim, x, t))


def uniform_ball(rng: np.random.Generator, n: int, dim: int, radius: float) -> np.ndarray:
    g = rng.standard_normal((n, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / dim)
    return g * r[:, None]


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def overlap_ratio_mc(dim: int, x: float, t, samples: int = 1_000_000, seed: int = 0,
                     batch: int = 1 << 18) -> tuple:
    """Fraction of uniform points of ``B_x(0)`` lying in ``B_x(t)``; returns ``(ratio, stderr)``."""
    _check(dim, x)
    t = np.broadcast_to(np.asarray(t, dtype=float), (dim,))
    rng = _rng(seed)
    hits, done = 0, 0
    while done < samples:
        n = min(batch, samples - done)
        pts = uniform_ball(rng, n, dim, x)
        hits += int(np.count_nonzero(np.sum((pts - t) ** 2, axis=1) < x * x))
        done += n
    p = hits / samples
    return p, math.sqrt(max(p * (1 - p), 0.0) / samples)


def layer_squeeze(dim: int, x: float, t, z: float, epsrel: float = 1e-10) -> tuple:
    """Lower and upper bounds on the overlap ratio from splitting the layer integrals at ``z``.

    With ``y = sqrt(x^2 - r^2)`` the layer integrals become
    ``int_0^x y f(y) / sqrt(x^2 - y^2) dy`` and the same with ``g``.  On
    ``[z, x]`` the lower-dimensional ratio ``f/g`` lies in ``[1 - eps, 1]``
    with ``eps = 1 - f(z)/g(z)``, and the integrands are increasing in ``y``,
    so the piece over ``[0, z]`` is at most ``z`` times its value at ``z``.
    """
    _check(dim, x)
    if dim < 2:
        raise ValueError("needs dim >= 2")
    if not 0 < z < x:
        raise ValueError("split point must satisfy 0 < z < x")
    d = _norm(t)
    k = dim - 1
    ratio_z = overlap_ratio_caps(k, z, d)
    eps = 1.0 - ratio_z
    gk = lambda y: ball_volume(k, y)  # noqa: E731
    phi_z = z * ratio_z * gk(z) / math.sqrt(x * x - z * z)
    psi_z = z * gk(z) / math.sqrt(x * x - z * z)
    # weight (x - y)^(-1/2) handles the endpoint singularity
    tail_psi = integrate.quad(lambda y: y * gk(y) / math.sqrt(x + y), z, x,
                              weight="alg", wvar=(0.0, -0.5), epsrel=epsrel)[0]
    lower = (1 - eps) * tail_psi / (z * psi_z + tail_psi)
    upper = (z * phi_z + (1 + eps) * tail_psi) / tail_psi
    return lower, upper


def ball_cesaro(u: SampledField, x: float, method: str = "monte_carlo", budget: int = 200_000,
                seed: int = 0, tol: float | None = None) -> tuple:
    """Average of ``u`` over ``B_x(0)``; returns ``(mean, stderr)``.

    ``x <= 0`` gives ``(0.0, 0.0)``.  For ``grid`` the error estimate is the
    change from halving the resolution.
    """
    if x <= 0:
        return 0.0, 0.0
    if method in ("monte_carlo", "mc"):
        rng = _rng(seed)
        n = int(budget)
        s = s2 = 0.0
        done = 0
        while done < n:
            m = min(1 << 17, n - done)
            vals = u(uniform_ball(rng, m, u.dim, x))
            s += float(vals.sum())
            s2 += float((vals * vals).sum())
            done += m
        mean = s / n
        var = max(s2 / n - mean * mean, 0.0)
        stderr = math.sqrt(var / max(n - 1, 1))
    elif method == "grid":
        k = max(2, int(budget ** (1.0 / u.dim)))
        mean = _grid_mean(u, x, k)
        stderr = abs(mean - _grid_mean(u, x, max(1, k // 2)))
    else:
        raise ValueError(f"unknown method {method!r}")
    if tol is not None and stderr > tol:
        raise BudgetExhausted(f"error estimate {stderr:.3g} above tolerance {tol:.3g} with budget {budget}")
    return mean, stderr


def _grid_mean(u: SampledField, x: float, k: int) -> float:
    axis = (np.arange(k) + 0.5) / k * 2 * x - x
    grids = np.meshgrid(*([axis] * u.dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    pts = pts[np.sum(pts * pts, axis=1) < x * x]
    if len(pts) == 0:
        return 0.0
    return float(u(pts).mean())
