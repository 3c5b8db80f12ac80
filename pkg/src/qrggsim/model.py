"""Quasi random geometric graph connection model.

Nodes live in the unit square. Two nodes at Euclidean distance d are always
connected for d <= r, never connected for d > r_prime, and connected
stochastically inside the annulus r < d <= r_prime. The annulus kernel is
either a constant probability p ("fixed") or a distance-decaying probability
(1 - sqrt((d^2 - r^2) / (r_prime^2 - r^2))) * p ("linear_decay").
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import RandomStream

KERNEL_FIXED = "fixed"
KERNEL_LINEAR_DECAY = "linear_decay"


class KernelNotSupportedError(ValueError):
    """Raised when an operation is defined only for the fixed-p kernel."""


@dataclass(frozen=True)
class ConnectionModel:
    """Radii and annulus kernel governing pairwise connectivity.

    For the fixed kernel `p` is the constant annulus probability; for
    linear_decay it is the p_connection factor scaling the decay term.
    """

    r: float
    r_prime: float
    kernel: str = KERNEL_FIXED
    p: float = 1.0

    def __post_init__(self):
        if self.kernel not in (KERNEL_FIXED, KERNEL_LINEAR_DECAY):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if not (0.0 <= self.r <= 1.0 and 0.0 <= self.r_prime <= 1.0):
            raise ValueError("radii must lie in [0, 1]")
        if self.r > self.r_prime:
            raise ValueError("require r <= r_prime")
        if self.r == self.r_prime and self.kernel != KERNEL_FIXED:
            raise ValueError("degenerate r == r_prime only allowed with the fixed kernel")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError("probability parameter must lie in [0, 1]")

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "r_prime": self.r_prime,
            "kernel": self.kernel,
            "p": self.p,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ConnectionModel":
        return cls(r=obj["r"], r_prime=obj["r_prime"], kernel=obj["kernel"], p=obj["p"])


def sample_points(n: int, rng: RandomStream) -> np.ndarray:
    """Sample n positions uniformly in the unit square. Shape (n, 2)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return rng.random((n, 2))


def kernel_probability(d, model: ConnectionModel):
    """Connection probability at distance d (scalar or array)."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr < 0):
        raise ValueError("distance must be non-negative")
    out = np.zeros_like(d_arr)
    out[d_arr <= model.r] = 1.0
    in_annulus = (d_arr > model.r) & (d_arr <= model.r_prime)
    if np.any(in_annulus):
        if model.kernel == KERNEL_FIXED:
            out[in_annulus] = model.p
        else:
            da = d_arr[in_annulus]
            frac = (da * da - model.r**2) / (model.r_prime**2 - model.r**2)
            out[in_annulus] = (1.0 - np.sqrt(frac)) * model.p
    if np.isscalar(d) or d_arr.ndim == 0:
        return float(out)
    return out


def connect_decision(u, v, model: ConnectionModel, rng: RandomStream) -> bool:
    """Realize one edge. Consumes exactly one draw iff 0 < probability < 1."""
    du = float(u[0]) - float(v[0])
    dv = float(u[1]) - float(v[1])
    prob = kernel_probability(math.hypot(du, dv), model)
    if prob >= 1.0:
        return True
    if prob <= 0.0:
        return False
    return float(rng.random()) < prob


def effective_annulus_p(model: ConnectionModel) -> float:
    """Mean annulus connection probability.

    For linear_decay the area-average of the decay factor over the annulus is
    exactly 1/3 (substituting v = (d^2 - r^2)/(r'^2 - r^2) turns the average
    into the integral of 1 - sqrt(v) over [0, 1]).
    """
    if model.kernel == KERNEL_FIXED:
        return model.p
    return model.p / 3.0


def p_prime_bounds(model: ConnectionModel, effective_p: float | None = None):
    """Interval bracketing the marginal pair-connection probability.

    lower = (pi r^2 + pi (r'^2 - r^2) p) / 4 (corner placement),
    upper = pi r^2 + pi (r'^2 - r^2) p, both clamped to [0, 1].

    The closed form assumes a constant annulus probability; a linear_decay
    model is rejected unless the caller passes an explicit effective p.
    """
    if model.kernel != KERNEL_FIXED and effective_p is None:
        raise KernelNotSupportedError(
            "pair-probability interval requires the fixed kernel; "
            "pass effective_p to substitute an averaged annulus probability"
        )
    p = model.p if model.kernel == KERNEL_FIXED else effective_p
    full = math.pi * model.r**2 + math.pi * (model.r_prime**2 - model.r**2) * p
    upper = min(1.0, max(0.0, full))
    lower = min(1.0, max(0.0, full / 4.0))
    return lower, upper


def unit_square_distance_cdf(rho: float) -> float:
    """P(d <= rho) for the distance of two uniform points in the unit square.

    Valid for 0 <= rho <= 1: pi rho^2 - (8/3) rho^3 + rho^4 / 2.
    """
    if rho < 0:
        return 0.0
    if rho > 1:
        raise ValueError("closed form implemented for rho <= 1 only")
    return math.pi * rho**2 - (8.0 / 3.0) * rho**3 + 0.5 * rho**4


def connection_probability(model: ConnectionModel, grid: int = 20001) -> float:
    """Border-corrected marginal pair-connection probability.

    Fixed kernel: exact via the unit-square distance CDF. Linear decay:
    Simpson integration of the kernel against the distance density.
    """
    disk = unit_square_distance_cdf(model.r)
    if model.r_prime == model.r:
        return disk
    if model.kernel == KERNEL_FIXED:
        annulus = unit_square_distance_cdf(model.r_prime) - unit_square_distance_cdf(model.r)
        return disk + model.p * annulus
    d = np.linspace(model.r, model.r_prime, grid)
    density = 2.0 * math.pi * d - 8.0 * d**2 + 2.0 * d**3
    frac = np.clip((d * d - model.r**2) / (model.r_prime**2 - model.r**2), 0.0, 1.0)
    integrand = (1.0 - np.sqrt(frac)) * model.p * density
    h = (model.r_prime - model.r) / (grid - 1)
    weights = np.ones(grid)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return disk + float(np.dot(weights, integrand)) * h / 3.0


def estimate_connection_probability(
    model: ConnectionModel, samples: int, rng: RandomStream
) -> float:
    """Monte Carlo estimate of the marginal pair-connection probability.

    Averages kernel_probability over `samples` independent uniform point
    pairs; the kernel average (rather than Bernoulli realizations) keeps the
    estimator unbiased with lower variance.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    total = 0.0
    remaining = samples
    # Chunked so multi-million-sample runs stay within memory.
    while remaining > 0:
        chunk = min(remaining, 1_000_000)
        pts = rng.random((chunk, 4))
        d = np.hypot(pts[:, 0] - pts[:, 2], pts[:, 1] - pts[:, 3])
        total += float(np.sum(kernel_probability(d, model)))
        remaining -= chunk
    return total / samples
