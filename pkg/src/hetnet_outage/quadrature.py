"""Gauss-Hermite rules and semi-infinite adaptive integration."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.linalg import eigh_tridiagonal

SQRT_PI = math.sqrt(math.pi)
MAX_ORDER = 64


class IntegrationError(RuntimeError):
    """Adaptive integration did not reach the requested tolerance."""

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error_bound!r})")
        self.estimate = estimate
        self.error_bound = error_bound


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for integrals of the form  int exp(-t^2) f(t) dt."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


@dataclass(frozen=True)
class PairedHermite:
    """Symmetric-pair form of a Gauss-Hermite rule.

    ``alphas[i] = W_i / sqrt(pi)`` and ``betas[i] = sqrt(2) * t_i`` for the
    retained positive nodes, largest beta first.  Each pair stands for the two
    abscissas ``+beta`` and ``-beta`` of a standard normal variable.
    """

    alphas: np.ndarray
    betas: np.ndarray
    dropped_pairs: int


def _orthonormal_hermite(x: np.ndarray, n: int) -> np.ndarray:
    """Rows p_0(x) .. p_{n}(x) of the orthonormal Hermite family."""
    p = np.empty((n + 1,) + x.shape)
    p[0] = math.pi ** -0.25
    if n >= 1:
        p[1] = math.sqrt(2.0) * x * p[0]
    for k in range(1, n):
        p[k + 1] = math.sqrt(2.0 / (k + 1)) * x * p[k] - math.sqrt(k / (k + 1)) * p[k - 1]
    return p


def gauss_hermite(n: int) -> QuadratureRule:
    """Gauss-Hermite rule of order ``n`` (weight function exp(-t^2)).

    Nodes come from the eigenvalues of the symmetric Jacobi matrix
    (Golub-Welsch), polished by Newton steps on the orthonormal recurrence.
    Weights use the Christoffel sum 1 / sum_k p_k(t)^2, which keeps full
    relative accuracy for the tiny outer weights.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError(f"order must be an integer, got {n!r}")
    if not 2 <= n <= MAX_ORDER:
        raise ValueError(f"order must lie in [2, {MAX_ORDER}], got {n}")
    n = int(n)
    off = np.sqrt(np.arange(1, n) / 2.0)
    x = eigh_tridiagonal(np.zeros(n), off, eigvals_only=True)
    for _ in range(2):
        p = _orthonormal_hermite(x, n)
        # p_n' = sqrt(2n) p_{n-1}
        x = x - p[n] / (math.sqrt(2.0 * n) * p[n - 1])
    x = np.sort(x)
    x = 0.5 * (x - x[::-1])
    if n % 2:
        x[n // 2] = 0.0
    p = _orthonormal_hermite(x, n - 1)
    w = 1.0 / np.sum(p * p, axis=0)
    w = 0.5 * (w + w[::-1])
    return QuadratureRule(order=n, nodes=x, weights=w)


def paired_form(rule: QuadratureRule, drop_pairs: int = 0) -> PairedHermite:
    """Fold an even-order rule into (alpha, beta) pairs, discarding the outermost ``drop_pairs``."""
    if rule.order % 2:
        raise ValueError("paired form needs an even-order rule (odd orders carry a centre node)")
    half = rule.order // 2
    if not 0 <= drop_pairs < half:
        raise ValueError(f"drop_pairs must lie in [0, {half - 1}], got {drop_pairs}")
    pos = rule.nodes[half:]
    keep = slice(0, half - drop_pairs)
    betas = math.sqrt(2.0) * pos[keep]
    alphas = rule.weights[half:][keep] / SQRT_PI
    order = np.argsort(-betas)
    return PairedHermite(alphas=alphas[order], betas=betas[order], dropped_pairs=drop_pairs)


def unpair(paired: PairedHermite) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`paired_form`: ascending nodes and weights of the retained pairs."""
    t = paired.betas / math.sqrt(2.0)
    w = paired.alphas * SQRT_PI
    nodes = np.concatenate([-t, t[::-1]])
    weights = np.concatenate([w, w[::-1]])
    order = np.argsort(nodes)
    return nodes[order], weights[order]


def normal_nodes(order: int, drop_pairs: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Abscissas and probabilities approximating a standard normal variable.

    Returns ``(u, p)`` with ``E[g(Z)] ~ sum p * g(u)``.  With ``drop_pairs=0``
    the probabilities sum to one up to rounding.
    """
    paired = paired_form(gauss_hermite(order), drop_pairs)
    u = np.concatenate([paired.betas, -paired.betas])
    p = np.concatenate([paired.alphas, paired.alphas])
    return u, p


def integrate_semi_infinite(
    f: Callable[[float], float],
    lower: float = 0.0,
    rel_tol: float = 1e-8,
    *,
    split: float | None = None,
    abs_tol: float = 0.0,
    limit: int = 200,
) -> float:
    """Adaptive estimate of  int_lower^inf f(x) dx.

    The range is cut at ``lower + split`` (default: 1).  The finite piece uses
    QAGS, which copes with integrable endpoint singularities; the tail uses
    QUADPACK's QAGI, which maps [a, inf) onto (0, 1] via x = a + (1 - t)/t.
    """
    if lower < 0:
        raise ValueError("lower limit must be nonnegative")
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    cut = lower + (1.0 if split is None else split)
    total = 0.0
    err = 0.0
    for a, b in ((lower, cut), (cut, np.inf)):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, e = integrate.quad(f, a, b, epsabs=abs_tol, epsrel=rel_tol, limit=limit)
        total += val
        err += e
        if not math.isfinite(val):
            raise IntegrationError("non-finite integral", total, err)
    tol = max(abs_tol, rel_tol * abs(total))
    if err > tol and err > 1e-15:
        raise IntegrationError("subdivision budget exhausted", total, err)
    return total
