"""Half-line Weyl-Titchmarsh M-matrices and their large-|z| asymptotics.

For z off the real axis the finite-interval disk value is

    M_R(z, x0) = -phi1(z, R, x0)^{-1} theta1(z, R, x0),   R >< x0,

equivalently the Moebius image at x0 of the solutions whose first component
vanishes at R.  As R -> +-infinity the disks nest and contract to the
half-line M-matrix at rate exp(-2 Im sqrt(z) |R - x0|).  M satisfies the
Riccati equation M' + M^2 = Q - z I in the base point, and along the upper
imaginary axis admits the expansion

    M_+-(z, x) = +-i sqrt(z) I + sum_k c_k(x) z^{-k/2},

whose coefficients are evaluated here through a symbolic recursion in the
noncommuting derivatives of Q.
"""

from dataclasses import dataclass

import numpy as np

from .propagator import propagate_frame
from .symbolic import m_expansion_polynomials
from .util import mnorm, sqrt_up

WEYL_RTOL = 1e-11
WEYL_ATOL = 1e-13


class ConvergenceError(RuntimeError):
    """Disk limit failed to converge within the R budget."""


def _side_sign(side):
    if side in (+1, "+", "plus"):
        return 1
    if side in (-1, "-", "minus"):
        return -1
    raise ValueError(f"side must be '+' or '-', got {side!r}")


@dataclass
class WeylMatrix:
    """A half-line M value with convergence diagnostics."""

    value: np.ndarray
    side: int
    z: complex
    x0: float
    convergence: float
    method: str = "disk-limit"


@dataclass
class AsymptoticSeries:
    """Expansion coefficients c_1..c_N of M_side at a base point x."""

    side: int
    x: float
    coefficients: list
    m: int

    @property
    def order(self):
        return len(self.coefficients)


def weyl_disk_approx(q_spec, z, x0, r, rtol=WEYL_RTOL, atol=WEYL_ATOL):
    """Finite-interval disk value M_R(z, x0) for R on either side of x0.

    Built from renormalized frame transport of the Dirichlet data [0; I]
    at R back to x0, which keeps entries bounded for any |R - x0|.
    """
    z = complex(z)
    if z.imag == 0.0:
        raise ValueError("disk values need a nonreal spectral parameter")
    if r == x0:
        raise ValueError("interval endpoint R must differ from x0")
    m = q_spec.m
    frame = np.zeros((2 * m, m), dtype=complex)
    frame[m:, :] = np.eye(m)
    transported = propagate_frame(q_spec, z, r, x0, frame, rtol=rtol, atol=atol)
    v1 = transported.frame[:m]
    v2 = transported.frame[m:]
    cond = np.linalg.cond(v1)
    if not np.isfinite(cond) or cond > 1e12:
        raise ConvergenceError(
            f"near-singular first block at R={r:g} (condition {cond:.2e})"
        )
    return v2 @ np.linalg.inv(v1)


def weyl_m(q_spec, z, x0, side="+", tol=1e-9, max_rounds=60,
           rtol=WEYL_RTOL, atol=WEYL_ATOL):
    """Half-line M matrix as the Cauchy limit of disk values.

    The interval endpoints follow R_j = x0 +- (5 + 5j)/max(1, Im sqrt(z)),
    matching the exp(-2 Im sqrt(z) R) contraction scale; iteration stops
    when successive disk values differ by less than ``tol``.
    """
    z = complex(z)
    if z.imag == 0.0:
        raise ValueError("weyl_m needs a nonreal spectral parameter")
    sign = _side_sign(side)
    gamma = max(1.0, sqrt_up(z).imag)
    prev = None
    increment = np.inf
    for j in range(max_rounds):
        r = x0 + sign * (5.0 + 5.0 * j) / gamma
        cur = weyl_disk_approx(q_spec, z, x0, r, rtol=rtol, atol=atol)
        if prev is not None:
            increment = mnorm(cur - prev)
            if increment < tol:
                return WeylMatrix(value=cur, side=sign, z=z, x0=x0,
                                  convergence=increment)
        prev = cur
    raise ConvergenceError(
        f"disk limit not converged after {max_rounds} rounds "
        f"(last increment {increment:.2e}, z={z:g}, side={sign:+d})"
    )


def riccati_defect(q_spec, z, x, h=None, tol=1e-10, rtol=WEYL_RTOL, atol=WEYL_ATOL):
    """Norm of M' + M^2 - Q + z I at base point x, with M' by centered
    differences of `weyl_m` over x +- h.  Small values certify consistency
    of the computed M field."""
    if h is None:
        h = 1e-3 * max(1.0, abs(x))
    if h <= 0.0:
        raise ValueError("finite-difference step must be positive")
    kw = dict(tol=tol, rtol=rtol, atol=atol)
    m_mid = weyl_m(q_spec, z, x, "+", **kw).value
    m_hi = weyl_m(q_spec, z, x + h, "+", **kw).value
    m_lo = weyl_m(q_spec, z, x - h, "+", **kw).value
    m_prime = (m_hi - m_lo) / (2.0 * h)
    defect = m_prime + m_mid @ m_mid - q_spec(x) + complex(z) * np.eye(q_spec.m)
    return mnorm(defect)


def asymptotic_coefficients(q_spec, x, n, side="+"):
    """First n expansion coefficients of M_side at x as numeric matrices.

    Coefficient k needs Q^(k-1); an error is raised when the potential kind
    cannot supply that derivative order.
    """
    sign = _side_sign(side)
    if n < 0:
        raise ValueError("coefficient count must be nonnegative")
    polys = m_expansion_polynomials(sign, n)
    need = max((p.max_derivative_order for p in polys), default=0)
    gens = [np.atleast_2d(q_spec(x, order=j)) for j in range(need + 1)]
    coeffs = [p.evaluate(gens, q_spec.m) for p in polys]
    return AsymptoticSeries(side=sign, x=float(x), coefficients=coeffs, m=q_spec.m)


def asymptotic_eval(series, z):
    """Evaluate sign * i sqrt(z) I + sum_k c_k z^{-k/2} (Im sqrt(z) >= 0)."""
    s = sqrt_up(z)
    acc = series.side * 1j * s * np.eye(series.m, dtype=complex)
    for k, c in enumerate(series.coefficients, start=1):
        acc = acc + c * s ** (-k)
    return acc
