"""Integration of the first-order system for -psi'' + Q psi = z psi.

The 2m x 2m fundamental solution Psi(z, x, x0) solves

    Psi' = [[0, I], [Q(x) - z I, 0]] Psi,     Psi(z, x0, x0) = I,

whose coefficient matrix is trace free, so det Psi = 1, and which satisfies
the Lagrange identity Psi(conj(z), x, x0)* J Psi(z, x, x0) = J.  Raw entries
grow like exp(|Im sqrt(z)| |x - x0|); `propagate_frame` transports tall
frames with periodic QR renormalization so subspace (Moebius) data survives
arbitrarily long intervals.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .potentials import symplectic_j
from .util import sqrt_up

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


class PropagationError(RuntimeError):
    """Integrator failure (step-size underflow or exceeded budget)."""


class RankCollapseError(PropagationError):
    """Transported frame lost numerical column rank."""


def _solve_linear(q_spec, z, x0, x1, y0, rtol, atol):
    """Integrate Y' = C(x) Y from x0 to x1 for a 2m x k matrix Y."""
    m = q_spec.m
    shape = y0.shape
    z = complex(z)

    def rhs(x, flat):
        y = flat.reshape(shape)
        qz = q_spec(x) - z * np.eye(m)
        out = np.empty_like(y)
        out[:m] = y[m:]
        out[m:] = qz @ y[:m]
        return out.reshape(-1)

    sol = solve_ivp(
        rhs,
        (x0, x1),
        y0.reshape(-1).astype(complex),
        method="DOP853",
        rtol=rtol,
        atol=atol,
        dense_output=False,
    )
    if not sol.success:
        raise PropagationError(
            f"integration failed on [{x0:g}, {x1:g}] at z={z:g}: {sol.message}"
        )
    return sol.y[:, -1].reshape(shape)


@dataclass
class FundamentalSystem:
    """Normalized fundamental solution with its m x m block decomposition."""

    z: complex
    x0: float
    x: float
    matrix: np.ndarray  # 2m x 2m
    m: int
    error_estimate: float

    @property
    def theta1(self):
        return self.matrix[: self.m, : self.m]

    @property
    def phi1(self):
        return self.matrix[: self.m, self.m :]

    @property
    def theta2(self):
        return self.matrix[self.m :, : self.m]

    @property
    def phi2(self):
        return self.matrix[self.m :, self.m :]

    def det_defect(self):
        return abs(np.linalg.det(self.matrix) - 1.0)


def integrate_fundamental(q_spec, z, x0, x, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Fundamental solution Psi(z, x, x0) with Psi(z, x0, x0) = I_{2m}.

    Intended for moderate spans; for long intervals at nonreal z use
    `propagate_frame`, which renormalizes.
    """
    m = q_spec.m
    eye = np.eye(2 * m, dtype=complex)
    if x == x0:
        return FundamentalSystem(z=complex(z), x0=x0, x=x, matrix=eye, m=m,
                                 error_estimate=0.0)
    psi = _solve_linear(q_spec, z, x0, x, eye, rtol, atol)
    err = rtol * float(np.linalg.norm(psi, 2)) * max(1.0, abs(x - x0))
    return FundamentalSystem(z=complex(z), x0=x0, x=x, matrix=psi, m=m,
                             error_estimate=err)


def lagrange_defect(fs_z, fs_zbar):
    """Norm of Psi(conj(z))* J Psi(z) - J for a conjugate pair of solutions."""
    j = symplectic_j(fs_z.m)
    return float(np.linalg.norm(fs_zbar.matrix.conj().T @ j @ fs_z.matrix - j, 2))


@dataclass
class FrameTransport:
    """Transported frame together with the QR renormalization log.

    ``log`` holds ``(x, R)`` pairs: right multiplying the returned frame by
    the reversed product of the R factors reconstructs the raw transported
    frame, so the Moebius action on column spans is preserved exactly.
    """

    frame: np.ndarray
    log: list
    z: complex
    x0: float
    x1: float

    @property
    def log_growth(self):
        return float(sum(np.log(np.linalg.norm(r, 2)) for _, r in self.log))

    @property
    def growth_factor(self):
        return float(np.exp(self.log_growth))


def propagate_frame(q_spec, z, x0, x1, frame, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                    renorm_step=None):
    """Transport a 2m x k frame from x0 to x1 with QR renormalization.

    The frame is re-orthonormalized every ``renorm_step`` of arclength
    (default keyed to the growth rate |Im sqrt(z)| so each leg grows by at
    most ~e^3) and the triangular factors are logged.
    """
    frame = np.asarray(frame, dtype=complex)
    if frame.ndim != 2 or frame.shape[0] != 2 * q_spec.m:
        raise ValueError(f"frame must be 2m x k, got {frame.shape}")
    if np.linalg.matrix_rank(frame) < frame.shape[1]:
        raise RankCollapseError("input frame is column-rank deficient")
    if x1 == x0:
        return FrameTransport(frame=frame.copy(), log=[], z=complex(z), x0=x0, x1=x1)

    gamma = abs(sqrt_up(z).imag)
    if renorm_step is None:
        renorm_step = min(2.0, 3.0 / max(1.0, gamma))
    span = abs(x1 - x0)
    n_legs = max(1, int(np.ceil(span / renorm_step)))
    xs = np.linspace(x0, x1, n_legs + 1)

    log = []
    v = frame.copy()
    for a, b in zip(xs[:-1], xs[1:]):
        v = _solve_linear(q_spec, z, a, b, v, rtol, atol)
        v, r = np.linalg.qr(v)
        # fix the phase of R's diagonal so the decomposition is unique
        d = np.diag(r).copy()
        d[d == 0] = 1.0
        phases = d / np.abs(d)
        v = v * phases
        r = phases.conj()[:, None] * r
        dr = np.abs(np.diag(r))
        if dr.min() < 1e-13 * max(dr.max(), 1.0):
            raise RankCollapseError(
                f"frame rank collapsed near x={b:g} (diag ratio {dr.min()/dr.max():.2e})"
            )
        log.append((float(b), r))
    return FrameTransport(frame=v, log=log, z=complex(z), x0=x0, x1=x1)
