"""Matrix-valued potentials and the first-order system coefficients.

A potential is an m x m Hermitian matrix function Q(x), evaluable together
with its derivatives where the construction permits.  Supported kinds:

* ``constant`` -- Q(x) = C for a Hermitian matrix C
* ``diagonal`` -- Q(x) = diag(f_1(x), ..., f_m(x)) with scalar expressions
* ``fourier``  -- Q(x) = Q_0 + sum_{k>=1} (Q_k e^{i k kappa x} + h.c.),
  kappa = 2*pi/period, which is Hermitian by construction
* ``sampled``  -- clamped cubic spline through Hermitian samples

Scalar expressions use a small grammar: sums of ``a``, ``a*x^n``,
``a*cos(b*x)`` and ``a*sin(b*x)``; the ``*`` may be omitted, e.g.
``"2cos(2x)"`` or ``"1+0.5x^2"``.

The Schrodinger equation -psi'' + Q psi = z psi is treated as the
first-order Hamiltonian system J Psi' = (z A + B(x)) Psi on C^{2m} with

    J = [[0, -I], [I, 0]],   A = [[I, 0], [0, 0]],   B = [[-Q, 0], [0, I]].

`hamiltonian_coefficients` packages these for the integrator.
"""

import re
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .util import herm

HERMITIAN_TOL = 1e-12

# kinds with term-wise analytic derivatives of every order
_ANALYTIC_MAX_ORDER = 64


class PotentialError(ValueError):
    """Malformed potential configuration or unsupported evaluation."""


# ---------------------------------------------------------------------------
# scalar expression grammar
# ---------------------------------------------------------------------------

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TRIG_RE = re.compile(
    rf"^(?P<coef>[+-]?{_NUM}|[+-])?\*?(?P<fn>cos|sin)\((?P<freq>[+-]?{_NUM}|[+-])?\*?x\)$"
)
_POLY_RE = re.compile(rf"^(?P<coef>[+-]?{_NUM}|[+-])?\*?x(?:\^(?P<power>\d+))?$")
_CONST_RE = re.compile(rf"^[+-]?{_NUM}$")


def _coef_value(text):
    if text is None or text == "+" or text == "":
        return 1.0
    if text == "-":
        return -1.0
    return float(text)


def _split_terms(expr):
    terms, cur, depth = [], "", 0
    for ch in expr:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur.strip("+-") != "":
            if cur and cur[-1] in "eE":
                cur += ch
                continue
            terms.append(cur)
            cur = ch
            continue
        cur += ch
    if cur.strip("+-") != "":
        terms.append(cur)
    if depth != 0:
        raise PotentialError(f"unbalanced parentheses in expression {expr!r}")
    return terms


@dataclass(frozen=True)
class _Term:
    kind: str  # "const" | "trig" | "poly"
    a: float
    b: float = 0.0  # frequency for trig
    phase: float = 0.0  # 0 for cos, -pi/2 for sin
    n: int = 0  # power for poly

    def derivative(self, x, order):
        if self.kind == "const":
            return self.a if order == 0 else 0.0
        if self.kind == "trig":
            return (
                self.a
                * self.b ** order
                * np.cos(self.b * x + self.phase + order * np.pi / 2.0)
            )
        # poly: d^k/dx^k a x^n
        if order > self.n:
            return 0.0
        c = self.a
        for j in range(order):
            c *= self.n - j
        return c * x ** (self.n - order)


class ScalarExpression:
    """Sum of constant, monomial and trigonometric terms with analytic
    derivatives of every order."""

    def __init__(self, terms, text=""):
        self.terms = tuple(terms)
        self.text = text

    @classmethod
    def parse(cls, text):
        raw = str(text).replace(" ", "")
        if raw == "":
            raise PotentialError("empty scalar expression")
        terms = []
        for t in _split_terms(raw):
            m = _CONST_RE.match(t)
            if m:
                terms.append(_Term("const", float(t)))
                continue
            m = _TRIG_RE.match(t)
            if m:
                a = _coef_value(m.group("coef"))
                b = _coef_value(m.group("freq"))
                phase = 0.0 if m.group("fn") == "cos" else -np.pi / 2.0
                terms.append(_Term("trig", a, b=b, phase=phase))
                continue
            m = _POLY_RE.match(t)
            if m:
                a = _coef_value(m.group("coef"))
                n = int(m.group("power") or 1)
                terms.append(_Term("poly", a, n=n))
                continue
            raise PotentialError(f"unsupported term {t!r} in scalar expression {text!r}")
        return cls(terms, text=raw)

    def __call__(self, x, order=0):
        return float(sum(t.derivative(x, order) for t in self.terms))


def _as_scalar_function(entry):
    if isinstance(entry, (int, float)):
        return ScalarExpression((_Term("const", float(entry)),), text=repr(entry))
    if isinstance(entry, str):
        return ScalarExpression.parse(entry)
    raise PotentialError(f"diagonal entry must be a number or expression, got {entry!r}")


# ---------------------------------------------------------------------------
# matrix parsing helpers
# ---------------------------------------------------------------------------


def _as_complex(v, key):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, complex):
        return v
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", ""))
        except ValueError:
            pass
    raise PotentialError(f"{key}: cannot interpret {v!r} as a complex number")


def _as_matrix(rows, key):
    try:
        mat = np.array(
            [[_as_complex(v, key) for v in row] for row in rows], dtype=complex
        )
    except TypeError as exc:
        raise PotentialError(f"{key}: expected a nested list matrix") from exc
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise PotentialError(f"{key}: matrix must be square, got shape {mat.shape}")
    return mat


def _require_hermitian(mat, key):
    defect = np.linalg.norm(mat - mat.conj().T, 2)
    if defect > HERMITIAN_TOL * max(1.0, np.linalg.norm(mat, 2)):
        raise PotentialError(f"{key}: matrix is not Hermitian (defect {defect:.2e})")
    return herm(mat)


# ---------------------------------------------------------------------------
# the potential object
# ---------------------------------------------------------------------------


@dataclass
class PotentialSpec:
    """Evaluable Hermitian potential.  Immutable after construction; safe to
    share across workers.

    Call as ``Q(x, order)`` for Q(x), Q'(x), ... up to ``max_order``.
    """

    m: int
    kind: str
    period: float | None
    max_order: int
    config: dict = field(repr=False)
    _impl: object = field(repr=False)

    def __call__(self, x, order=0):
        if order < 0:
            raise PotentialError("derivative order must be nonnegative")
        if order > self.max_order:
            raise PotentialError(
                f"derivative order {order} unavailable for kind {self.kind!r} "
                f"(max {self.max_order})"
            )
        return self._impl(float(x), int(order))

    def effective_period(self):
        """Declared period, falling back to 1.0 for constants (any period
        works); raises for genuinely aperiodic kinds."""
        if self.period is not None:
            return self.period
        if self.kind == "constant":
            return 1.0
        raise PotentialError(f"potential of kind {self.kind!r} has no period")


def _constant_impl(c):
    m = c.shape[0]
    zero = np.zeros((m, m), dtype=complex)

    def impl(x, order):
        return c.copy() if order == 0 else zero.copy()

    return impl


def _diagonal_impl(funcs):
    def impl(x, order):
        return np.diag([f(x, order) for f in funcs]).astype(complex)

    return impl


def _fourier_impl(q0, coeffs, kappa):
    def impl(x, order):
        acc = np.zeros_like(q0)
        for k, qk in enumerate(coeffs, start=1):
            t = (1j * k * kappa) ** order * qk * np.exp(1j * k * kappa * x)
            acc = acc + t + t.conj().T
        if order == 0:
            acc = acc + q0
        return acc

    return impl


def _sampled_impl(xs, values, period):
    if period is not None:
        bc = "periodic"
        if np.linalg.norm(values[0] - values[-1]) > HERMITIAN_TOL * 10:
            raise PotentialError(
                "sampled: periodic potential needs matching first/last samples"
            )
    else:
        bc = "clamped"
    spline = CubicSpline(xs, np.array(values), axis=0, bc_type=bc)
    x_lo = xs[0]

    def impl(x, order):
        if period is not None:
            x = x_lo + (x - x_lo) % period
        return np.asarray(spline(x, nu=order), dtype=complex)

    return impl


def build_potential(config):
    """Build a `PotentialSpec` from a JSON-compatible description.

    Keys: ``kind`` (constant | diagonal | fourier | sampled), ``period``
    (optional positive float), and per-kind data (``matrix``, ``entries``,
    ``q0``/``coefficients``, ``x``/``values``).  Complex entries may be
    written as ``[re, im]`` or strings like ``"1+2j"``.
    """
    if not isinstance(config, dict):
        raise PotentialError("potential config must be a mapping")
    kind = config.get("kind")
    period = config.get("period")
    if period is not None:
        period = float(period)
        if period <= 0.0:
            raise PotentialError("period: must be positive")

    if kind == "constant":
        c = _require_hermitian(_as_matrix(config["matrix"], "matrix"), "matrix")
        spec = PotentialSpec(
            m=c.shape[0],
            kind=kind,
            period=period,
            max_order=_ANALYTIC_MAX_ORDER,
            config=config,
            _impl=_constant_impl(c),
        )
    elif kind == "diagonal":
        entries = config.get("entries")
        if not entries:
            raise PotentialError("entries: diagonal kind needs a nonempty list")
        funcs = [_as_scalar_function(e) for e in entries]
        spec = PotentialSpec(
            m=len(funcs),
            kind=kind,
            period=period,
            max_order=_ANALYTIC_MAX_ORDER,
            config=config,
            _impl=_diagonal_impl(funcs),
        )
    elif kind in ("fourier", "fourier-hermitian"):
        if period is None:
            raise PotentialError("period: required for fourier kind (kappa = 2*pi/period)")
        q0 = _require_hermitian(_as_matrix(config["q0"], "q0"), "q0")
        raw = config.get("coefficients", [])
        coeffs = [_as_matrix(c, f"coefficients[{k}]") for k, c in enumerate(raw)]
        for k, c in enumerate(coeffs):
            if c.shape != q0.shape:
                raise PotentialError(f"coefficients[{k}]: dimension mismatch with q0")
        kappa = 2.0 * np.pi / period
        spec = PotentialSpec(
            m=q0.shape[0],
            kind="fourier",
            period=period,
            max_order=_ANALYTIC_MAX_ORDER,
            config=config,
            _impl=_fourier_impl(q0, coeffs, kappa),
        )
    elif kind == "sampled":
        xs = np.asarray(config["x"], dtype=float)
        if xs.ndim != 1 or len(xs) < 4 or np.any(np.diff(xs) <= 0):
            raise PotentialError("x: need at least 4 strictly increasing sample points")
        values = [
            _require_hermitian(_as_matrix(v, f"values[{j}]"), f"values[{j}]")
            for j, v in enumerate(config["values"])
        ]
        if len(values) != len(xs):
            raise PotentialError("values: length must match x")
        order = config.get("interpolation_order", 3)
        if order != 3:
            raise PotentialError("interpolation_order: only cubic (3) is supported")
        spec = PotentialSpec(
            m=values[0].shape[0],
            kind=kind,
            period=period,
            max_order=2,
            config=config,
            _impl=_sampled_impl(xs, values, period),
        )
    else:
        raise PotentialError(f"kind: unknown potential kind {kind!r}")

    m_declared = config.get("m")
    if m_declared is not None and int(m_declared) != spec.m:
        raise PotentialError(f"m: declared {m_declared} but data has dimension {spec.m}")
    _validate(spec)
    return spec


def _probe_points(spec):
    span = spec.period if spec.period is not None else 2.0
    lo = 0.0
    if spec.kind == "sampled":
        xs = np.asarray(spec.config["x"], dtype=float)
        lo, span = xs[0], xs[-1] - xs[0]
    return lo + span * np.linspace(0.05, 0.95, 7)

def _validate(spec):
    for x in _probe_points(spec):
        q = spec(x)
        if np.linalg.norm(q - q.conj().T, 2) > 1e-11:
            raise PotentialError(f"potential not Hermitian at x={x:.3f}")
        if spec.period is not None:
            if np.linalg.norm(spec(x + spec.period) - q, 2) > 1e-9 * max(
                1.0, np.linalg.norm(q, 2)
            ):
                raise PotentialError(f"declared period fails at x={x:.3f}")


# ---------------------------------------------------------------------------
# Hamiltonian system coefficients
# ---------------------------------------------------------------------------


def symplectic_j(m):
    """J = [[0, -I_m], [I_m, 0]]; satisfies J^2 = -I and J* = -J."""
    j = np.zeros((2 * m, 2 * m), dtype=complex)
    j[:m, m:] = -np.eye(m)
    j[m:, :m] = np.eye(m)
    return j


def projector_a(m):
    """A = diag(I_m, 0); the weight selecting the first component."""
    a = np.zeros((2 * m, 2 * m), dtype=complex)
    a[:m, :m] = np.eye(m)
    return a


def coefficient_b(q_spec, x):
    """B(x) = diag(-Q(x), I_m)."""
    m = q_spec.m
    b = np.zeros((2 * m, 2 * m), dtype=complex)
    b[:m, :m] = -q_spec(x)
    b[m:, m:] = np.eye(m)
    return b


@dataclass
class HamiltonianCoefficients:
    """Constant matrices J, A and the map x -> B(x) of the first-order system."""

    m: int
    j: np.ndarray
    a: np.ndarray
    b: object  # callable x -> 2m x 2m

    @classmethod
    def for_potential(cls, q_spec):
        m = q_spec.m
        return cls(
            m=m,
            j=symplectic_j(m),
            a=projector_a(m),
            b=lambda x: coefficient_b(q_spec, x),
        )


def hamiltonian_coefficients(q_spec):
    return HamiltonianCoefficients.for_potential(q_spec)


def free_potential(m=1):
    """Q = 0, the zero potential in dimension m."""
    return build_potential({"kind": "constant", "matrix": np.zeros((m, m)).tolist()})


def constant_potential(c, period=None):
    """Q(x) = C for a Hermitian matrix (or scalar) C."""
    c = np.atleast_2d(np.asarray(c, dtype=complex))
    cfg = {"kind": "constant", "matrix": [[ [v.real, v.imag] for v in row] for row in c]}
    if period is not None:
        cfg["period"] = period
    return build_potential(cfg)
