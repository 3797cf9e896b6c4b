"""Special functions underlying the kernel and transform catalog.

Everything here is elementary but performance- and accuracy-critical:
squared gamma moduli on vertical lines, modified Bessel functions of purely
imaginary order, generalized Laguerre polynomials, and the normalized
Pochhammer weights that make the Laguerre family orthonormal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import AccuracyError, DomainError

__all__ = [
    "GammaAbs2Args",
    "LaguerreParams",
    "log_gamma",
    "gamma_abs2",
    "bessel_k_imag",
    "bessel_k_imag_table",
    "laguerre_eval",
    "laguerre_all",
    "pochhammer_weight",
    "pochhammer_weights",
]

# Lanczos approximation, g = 607/128, 15 coefficients.  Valid (and only used)
# for Re(z) > 0; every caller in this package keeps arguments in the right
# half-plane, so no reflection branch is provided.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = np.array(
    [
        0.99999999999999709182,
        57.156235665862923517,
        -59.597960355475491248,
        14.136097974741747174,
        -0.49191381609762019978,
        0.33994649984811888699e-4,
        0.46523628927048575665e-4,
        -0.98374475304879564677e-4,
        0.15808870322491248884e-3,
        -0.21026444172410488319e-3,
        0.21743961811521264320e-3,
        -0.16431810653676389022e-3,
        0.84418223983852743293e-4,
        -0.26190838401581408670e-4,
        0.36899182659531622704e-5,
    ]
)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Gauss-Legendre panel rules for the Bessel quadratures; the 10-point rule
# backs the a-posteriori accuracy check.
_GL_RULE = np.polynomial.legendre.leggauss(20)
_GL_RULE_COARSE = np.polynomial.legendre.leggauss(10)
# exp underflows to 0 below -745.1; integrand contributions past this point
# are lost to double precision anyway.
_EXP_UNDERFLOW = 745.0


@dataclass(frozen=True)
class GammaAbs2Args:
    """Argument bundle for the squared gamma modulus |Gamma((t+iy)/2)|^2."""

    t: float
    y: float

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError(f"gamma modulus requires t > 0, got t={self.t}")


@dataclass(frozen=True)
class LaguerreParams:
    """Degree, index and argument of a generalized Laguerre polynomial."""

    k: int
    alpha: float
    x: float

    def __post_init__(self):
        if self.k < 0:
            raise DomainError(f"Laguerre degree must be >= 0, got {self.k}")
        if self.alpha < 0:
            raise DomainError(f"Laguerre index must be >= 0, got {self.alpha}")


def log_gamma(z):
    """Principal branch of log Gamma(z) for Re(z) > 0, scalar or array.

    Fixed 15-term Lanczos rational approximation; relative accuracy is a few
    ulp across the right half-plane.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.real <= 0):
        raise DomainError("log_gamma requires Re(z) > 0")
    # Gamma(z) = sqrt(2 pi) t^(z + 1/2) e^(-t) A(z) / z  with t = z + g + 1/2
    t = z + _LANCZOS_G + 0.5
    a = np.full_like(z, _LANCZOS_C[0])
    for k in range(1, len(_LANCZOS_C)):
        a = a + _LANCZOS_C[k] / (z + k)
    out = _LOG_SQRT_2PI + (z + 0.5) * np.log(t) - t + np.log(a) - np.log(z)
    return out if out.shape else complex(out)


def gamma_abs2(t, y):
    """Squared modulus |Gamma((t + i y)/2)|^2 for t > 0.

    Evaluated as exp(2 Re log Gamma(z)): the log-gamma values at the
    conjugate pair z, conj(z) share their real part, so the result is even
    in ``y`` by construction.  ``y`` may be an array.
    """
    if not np.isfinite(t) or t <= 0:
        raise DomainError(f"gamma_abs2 requires t > 0, got t={t}")
    z = 0.5 * (t + 1j * np.asarray(y, dtype=float))
    val = np.exp(2.0 * np.real(log_gamma(z)))
    return val if isinstance(val, np.ndarray) else float(val)


def _cosh_integral_panels(z_min, panel_width=0.5, rule=None):
    """Panel nodes/weights covering [0, u*] with z_min * cosh(u*) at underflow."""
    nodes, weights = rule if rule is not None else _GL_RULE
    if z_min >= _EXP_UNDERFLOW:
        return None, None
    u_star = math.acosh(_EXP_UNDERFLOW / z_min) if z_min > 0 else 0.0
    n_panels = max(1, math.ceil(u_star / panel_width))
    edges = np.linspace(0.0, n_panels * panel_width, n_panels + 1)
    half = panel_width / 2.0
    centers = (edges[:-1] + edges[1:]) / 2.0
    u = (centers[:, None] + half * nodes[None, :]).ravel()
    w = np.broadcast_to(half * weights, (n_panels, nodes.size)).ravel()
    return u, w


def _cosh_integral(y, z, rule):
    u, w = _cosh_integral_panels(z, rule=rule)
    if u is None:
        return 0.0
    return float(np.dot(w, np.exp(-z * np.cosh(u)) * np.cos(y * u)))


def bessel_k_imag(y, z, check=True):
    """Modified Bessel function K_{iy}(z) of purely imaginary order, z > 0.

    Quadrature of the integral representation
    ``K_{iy}(z) = \\int_0^inf exp(-z cosh u) cos(y u) du``
    on Gauss-Legendre panels of width 1/2, truncated where the integrand
    underflows.  The function is even in ``y``; negative orders are folded.

    With ``check=True`` a 10-point companion rule is evaluated on the same
    panels and an :class:`AccuracyError` is raised if the two disagree.
    """
    if not z > 0:
        raise DomainError(f"bessel_k_imag requires z > 0, got z={z}")
    y = abs(float(y))
    if z >= _EXP_UNDERFLOW:
        # K_{iy}(z) < exp(-z) is below the double-precision floor here.
        return 0.0
    val = _cosh_integral(y, z, _GL_RULE)
    if check:
        coarse = _cosh_integral(y, z, _GL_RULE_COARSE)
        tol = 1e-9 * max(1.0, abs(val))
        if abs(val - coarse) > tol:
            raise AccuracyError(
                f"bessel_k_imag quadrature unresolved at y={y}, z={z}",
                achieved=abs(val - coarse),
                target=tol,
            )
    return val


def bessel_k_imag_table(y_values, z_values):
    """K_{iy}(z) on the product of a y-array and a z-array.

    Shares a single panel rule across all arguments (truncated for the
    smallest z), so the whole table costs two matrix products.  Returns an
    array of shape ``(len(y_values), len(z_values))``.
    """
    y = np.abs(np.asarray(y_values, dtype=float))
    z = np.asarray(z_values, dtype=float)
    if np.any(z <= 0):
        raise DomainError("bessel_k_imag_table requires z > 0")
    u, w = _cosh_integral_panels(float(z.min()))
    if u is None:
        return np.zeros((y.size, z.size))
    with np.errstate(over="ignore", under="ignore"):
        arg = np.outer(np.cosh(u), z)
        np.clip(arg, None, _EXP_UNDERFLOW + 10.0, out=arg)
        envelope = np.exp(-arg) * w[:, None]
    return np.cos(np.outer(y, u)) @ envelope


def laguerre_all(k_max, alpha, x):
    """Table of L_k^(alpha)(x) for k = 0..k_max, vectorized in x.

    Forward three-term recurrence from L_0 = 1, L_{-1} = 0:
    ``(k+1) L_{k+1} = (2k + alpha + 1 - x) L_k - (k + alpha) L_{k-1}``.
    Returns shape ``(k_max + 1,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((k_max + 1,) + x.shape)
    out[0] = 1.0
    if k_max >= 1:
        out[1] = 1.0 + alpha - x
    for k in range(1, k_max):
        out[k + 1] = ((2 * k + alpha + 1 - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1)
    return out


def laguerre_eval(p: LaguerreParams) -> float:
    """Evaluate a single generalized Laguerre polynomial L_k^(alpha)(x)."""
    table = laguerre_all(p.k, p.alpha, np.asarray(p.x, dtype=float))
    return float(table[p.k])


def pochhammer_weight(k, alpha):
    """Normalized weight k! / (1 + alpha)_k, computed in log space.

    These are the reciprocal squared norms of the Laguerre family under the
    Gamma(alpha + 1) reference density; log-space evaluation keeps them
    finite for large k.
    """
    if k < 0:
        raise DomainError(f"pochhammer_weight requires k >= 0, got {k}")
    if alpha < 0:
        raise DomainError(f"pochhammer_weight requires alpha >= 0, got {alpha}")
    return math.exp(
        math.lgamma(k + 1) + math.lgamma(alpha + 1) - math.lgamma(alpha + 1 + k)
    )


def pochhammer_weights(k_max, alpha):
    """Vector of pochhammer_weight(k, alpha) for k = 0..k_max."""
    k = np.arange(k_max + 1, dtype=float)
    return np.exp(gammaln(k + 1) + math.lgamma(alpha + 1) - gammaln(alpha + 1 + k))
