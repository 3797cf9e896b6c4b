"""Shared numerical substrate: grids, integration, kernel matrices, sampling.

Two grid families are used throughout the package:

* uniform midpoint grids, which make the discrete Fourier-type transforms
  exactly unitary on the grid and are spectrally accurate for smooth
  integrands decaying at both ends;
* Gauss rules (Legendre panels inside :func:`quad_integrate`, generalized
  Gauss-Laguerre for everything orthogonal-polynomial flavoured).

A :class:`KernelMatrix` stores a transition kernel discretized against a
target grid, entry (i, j) = kernel(node_i, node_j) * weight_j, so that
matrix-vector products realize the action of the underlying semigroup.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_genlaguerre

from .errors import AccuracyError, DegenerateDensityError, DomainError, KernelError

__all__ = [
    "QuadratureGrid",
    "KernelMatrix",
    "quad_integrate",
    "build_kernel_matrix",
    "inverse_cdf_sample",
]

_NEG_KERNEL_TOL = -1e-12


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes and weights discretizing a state space.

    ``domain`` is ``(lower, upper, truncated)`` where the flag records that
    the grid stands in for a semi-infinite (or otherwise larger) set.  The
    weights integrate against the grid's reference measure; for the plain
    constructors this is Lebesgue measure, for :meth:`gauss_laguerre_measure`
    it is the Gamma(alpha+1) probability density.
    """

    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple
    kind: str = "custom"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise DomainError("grid nodes and weights must be 1-d arrays of equal length")
        if nodes.size < 2:
            raise DomainError("grid needs at least two nodes")
        if not np.all(np.diff(nodes) > 0):
            raise DomainError("grid nodes must be strictly increasing")
        if not np.all(weights > 0):
            raise DomainError("grid weights must be positive")

    @property
    def n(self):
        return self.nodes.size

    def integrate(self, values):
        """Quadrature of grid values against the grid's reference measure."""
        return np.asarray(values) @ self.weights

    @classmethod
    def midpoint(cls, lower, upper, n, truncated=True):
        """Uniform midpoint rule on [lower, upper]."""
        if not upper > lower:
            raise DomainError("midpoint grid requires upper > lower")
        h = (upper - lower) / n
        nodes = lower + (np.arange(n) + 0.5) * h
        return cls(nodes, np.full(n, h), (lower, upper, truncated), kind="midpoint")

    @classmethod
    def gauss_legendre(cls, lower, upper, n, truncated=False):
        """Single-panel Gauss-Legendre rule on [lower, upper]."""
        x, w = np.polynomial.legendre.leggauss(n)
        half = (upper - lower) / 2.0
        mid = (upper + lower) / 2.0
        return cls(mid + half * x, half * w, (lower, upper, truncated), kind="legendre")

    @classmethod
    def gauss_laguerre_measure(cls, alpha, n):
        """Generalized Gauss-Laguerre grid integrating against x^a e^-x / Gamma(a+1).

        The weights absorb the reference density, so ``integrate(f)``
        approximates the mean of f under a Gamma(alpha + 1) law; exact for
        polynomials of degree <= 2n - 1.
        """
        x, w = roots_genlaguerre(n, alpha)
        w = w / math.gamma(alpha + 1.0)
        keep = w > 0  # far tail weights underflow to exact zero
        return cls(x[keep], w[keep], (0.0, float(x[keep][-1]), True), kind="laguerre")

    def fourier_sine_conjugate(self):
        """Frequency grid making the midpoint sine transform an exact involution.

        For a midpoint grid on (0, N h) the conjugate grid has spacing
        pi / (N h); the discrete transform matrix is then orthogonal
        (a DST-IV), so applying it twice is the identity on grid values.
        """
        if self.kind != "midpoint" or self.domain[0] != 0.0:
            raise DomainError("sine-conjugate grid requires a midpoint grid on (0, X)")
        n = self.n
        h_conj = math.pi / (n * (self.nodes[1] - self.nodes[0]))
        return QuadratureGrid.midpoint(0.0, n * h_conj, n)

    def fourier_line_conjugate(self):
        """Symmetric frequency grid making the full-line transform exactly unitary."""
        if self.kind != "midpoint":
            raise DomainError("line-conjugate grid requires a midpoint grid")
        n = self.n
        h = self.nodes[1] - self.nodes[0]
        h_conj = 2.0 * math.pi / (n * h)
        half_span = n * h_conj / 2.0
        return QuadratureGrid.midpoint(-half_span, half_span, n)


@dataclass(frozen=True)
class KernelMatrix:
    """A transition kernel discretized against a pair of grids.

    ``entries[i, j] = kernel(src_node_i, tgt_node_j) * tgt_weight_j``; a row
    therefore sums to the total transition mass from the source node.
    """

    source_grid: QuadratureGrid
    target_grid: QuadratureGrid
    entries: np.ndarray
    row_sums: np.ndarray = field(init=False)

    def __post_init__(self):
        entries = np.asarray(self.entries)
        if entries.shape != (self.source_grid.n, self.target_grid.n):
            raise DomainError("kernel matrix shape does not match its grids")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "row_sums", entries.real.sum(axis=1))

    def apply(self, values):
        """Integrate a grid function against each source row."""
        return self.entries @ np.asarray(values)

    def compose(self, other: "KernelMatrix") -> "KernelMatrix":
        """Chapman-Kolmogorov composition (self first, then other)."""
        if other.source_grid.n != self.target_grid.n:
            raise DomainError("composition grids are incompatible")
        return KernelMatrix(self.source_grid, other.target_grid, self.entries @ other.entries)


def build_kernel_matrix(kernel, g_src: QuadratureGrid, g_tgt: QuadratureGrid) -> KernelMatrix:
    """Discretize a two-argument transition density against a target grid.

    ``kernel(x1, x2)`` must broadcast over arrays.  Values more negative than
    -1e-12 signal a formula bug and raise :class:`KernelError`; roundoff-level
    negatives are clipped to zero.
    """
    vals = np.asarray(kernel(g_src.nodes[:, None], g_tgt.nodes[None, :]), dtype=float)
    bad = vals.min()
    if bad < _NEG_KERNEL_TOL:
        raise KernelError(f"kernel produced negative value {bad:.3e}")
    if bad < 0:
        vals = np.clip(vals, 0.0, None)
    return KernelMatrix(g_src, g_tgt, vals * g_tgt.weights[None, :])


# ---------------------------------------------------------------------------
# adaptive integration


def _panel_estimates(f, a, b, rule_hi, rule_lo):
    half = (b - a) / 2.0
    mid = (a + b) / 2.0
    hi = half * np.dot(rule_hi[1], f(mid + half * rule_hi[0]))
    lo = half * np.dot(rule_lo[1], f(mid + half * rule_lo[0]))
    return hi, abs(hi - lo)


_RULE_HI = np.polynomial.legendre.leggauss(25)
_RULE_LO = np.polynomial.legendre.leggauss(12)


def _adaptive_on_interval(f, a, b, tol, max_panels=2000):
    """Adaptive Gauss-Legendre on a finite interval; returns (value, error)."""
    val, err = _panel_estimates(f, a, b, _RULE_HI, _RULE_LO)
    heap = [(-err, a, b, val, err)]
    total, total_err, n_panels = val, err, 1
    while total_err > tol and n_panels < max_panels:
        neg_err, pa, pb, pval, perr = heapq.heappop(heap)
        if -neg_err <= 0:
            heapq.heappush(heap, (neg_err, pa, pb, pval, perr))
            break
        pm = (pa + pb) / 2.0
        v1, e1 = _panel_estimates(f, pa, pm, _RULE_HI, _RULE_LO)
        v2, e2 = _panel_estimates(f, pm, pb, _RULE_HI, _RULE_LO)
        total += v1 + v2 - pval
        total_err += e1 + e2 - perr
        heapq.heappush(heap, (-e1, pa, pm, v1, e1))
        heapq.heappush(heap, (-e2, pm, pb, v2, e2))
        n_panels += 1
    return total, total_err


def quad_integrate(f, domain, target_tol=1e-10, tail="auto"):
    """Adaptive panel Gauss-Legendre integration, semi-infinite aware.

    Parameters
    ----------
    f : callable
        Vectorized integrand, finite on the domain interior.
    domain : (a, b)
        ``b`` may be ``np.inf`` (and ``a`` may be ``-np.inf``).  Infinite
        ends are mapped exponentially, ``x = a + (e^u - 1)``, and truncated
        once panel contributions fall below the tolerance; ``tail='tan'``
        switches to an algebraic map ``x = a + tan(v)`` for heavy-tailed
        integrands, and ``'auto'`` tries the exponential map first and falls
        back when it fails to converge.
    target_tol : float
        Absolute error target.

    Returns
    -------
    (value, achieved_tol)

    Raises
    ------
    AccuracyError
        If the achieved error estimate exceeds ``target_tol``.
    """
    a, b = domain
    if not a < b:
        raise DomainError(f"empty integration domain {domain}")

    if math.isinf(a) and math.isinf(b):
        v1, e1 = quad_integrate(f, (0.0, b), target_tol / 2.0, tail=tail)
        v2, e2 = quad_integrate(lambda x: f(-x), (0.0, -a if math.isinf(a) else a), target_tol / 2.0, tail=tail)
        return v1 + v2, e1 + e2
    if math.isinf(a):
        val, err = quad_integrate(lambda x: f(-x), (-b, math.inf), target_tol, tail=tail)
        return val, err

    if not math.isinf(b):
        val, err = _adaptive_on_interval(f, a, b, target_tol)
        if err > target_tol:
            raise AccuracyError(
                "quad_integrate did not reach tolerance on finite interval",
                achieved=err, target=target_tol,
            )
        return val, err

    def run_tail(mode):
        # core [a, a+1], then mapped tail panels of geometrically growing reach
        core, core_err = _adaptive_on_interval(f, a, a + 1.0, target_tol / 2.0)
        total, total_err = core, core_err
        if mode == "exp":
            g = lambda u: f(a + np.expm1(u)) * np.exp(u)
            edges = np.arange(0.0, 710.0, 2.0)
        else:
            g = lambda v: f(a + np.tan(v)) / np.cos(v) ** 2
            edges = np.linspace(math.atan(1.0), math.pi / 2.0, 60)
            edges[-1] = math.pi / 2.0 - 1e-12
        converged = False
        start = math.log(2.0) if mode == "exp" else edges[0]
        prev = start
        for edge in edges[1:] if mode == "exp" else edges[1:]:
            if mode == "exp" and edge <= start:
                continue
            v, e = _adaptive_on_interval(g, prev, edge, target_tol / 8.0, max_panels=400)
            total += v
            total_err += e
            prev = edge
            if abs(v) < target_tol / 16.0 and e < target_tol / 16.0:
                converged = True
                break
        return total, total_err, converged

    modes = ["exp", "tan"] if tail == "auto" else [tail]
    last = None
    for mode in modes:
        total, total_err, converged = run_tail(mode)
        last = (total, total_err)
        if converged and total_err <= target_tol:
            return total, total_err
    total, total_err = last
    if total_err > target_tol or not converged:
        raise AccuracyError(
            "quad_integrate tail did not converge",
            achieved=total_err, target=target_tol,
        )
    return total, total_err


def inverse_cdf_sample(grid: QuadratureGrid, density_values, u):
    """Sample by inverting the piecewise-linear CDF of a gridded density.

    The density is treated as constant on each quadrature cell (cell mass =
    value * weight), normalized, and the resulting piecewise-linear CDF is
    inverted at ``u`` (scalar or array in (0, 1)).  Monotone nondecreasing
    in ``u`` by construction.
    """
    d = np.asarray(density_values, dtype=float)
    if d.min() < -1e-10:
        raise DegenerateDensityError(f"density has negative values down to {d.min():.3e}")
    masses = np.clip(d, 0.0, None) * grid.weights
    total = masses.sum()
    if not total > 0:
        raise DegenerateDensityError("density has no positive mass on the grid")
    cdf = np.concatenate([[0.0], np.cumsum(masses / total)])
    cdf[-1] = 1.0
    # cell boundaries induced by the weights, anchored at the domain edge
    bounds = np.concatenate([[grid.domain[0]], grid.domain[0] + np.cumsum(grid.weights)])
    u_arr = np.asarray(u, dtype=float)
    idx = np.clip(np.searchsorted(cdf, u_arr, side="right") - 1, 0, grid.n - 1)
    cell_mass = cdf[idx + 1] - cdf[idx]
    frac = np.where(cell_mass > 0, (u_arr - cdf[idx]) / np.where(cell_mass > 0, cell_mass, 1.0), 0.0)
    out = bounds[idx] + frac * (bounds[idx + 1] - bounds[idx])
    return out if out.shape else float(out)
