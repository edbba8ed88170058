"""Small shared numerical helpers: branch conventions, Hermitian parts,
matrix norms and Richardson extrapolation."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def sqrt_up(z):
    """Square root of a complex number with Im(sqrt(z)) >= 0.

    This branch is used throughout for the spectral parameter: on the
    positive real axis it is the ordinary positive root, on the negative
    real axis it is +i*sqrt(|z|).
    """
    s = np.sqrt(complex(z))
    if s.imag < 0.0:
        s = -s
    return s


def herm(a):
    """Hermitian part (A + A*)/2."""
    a = np.asarray(a)
    return 0.5 * (a + a.conj().T)


def imag_matrix(a):
    """Matrix imaginary part (A - A*)/(2i); Hermitian for any square A."""
    a = np.asarray(a)
    return (a - a.conj().T) / 2j


def hermitian_defect(a):
    """Spectral norm of A - A*."""
    a = np.asarray(a)
    return float(np.linalg.norm(a - a.conj().T, 2))


def mnorm(a):
    """Spectral norm, also accepting scalars."""
    a = np.atleast_2d(np.asarray(a))
    return float(np.linalg.norm(a, 2))


def richardson(values, ratio=2.0, exponents=(1.0, 2.0, 3.0)):
    """Extrapolate a sequence f(h_j) -> f(0) for steps h_j = h_0 / ratio**j.

    ``values`` are scalars or arrays ordered by decreasing step.  The error
    is modelled as sum_k c_k h**p_k with the given exponents, eliminated
    in order; surplus sequence entries deepen each elimination stage.

    Returns ``(limit, residual)`` where ``residual`` is the norm of the
    last correction actually applied (a practical error estimate).
    """
    rows = [np.asarray(v, dtype=complex) for v in values]
    if len(rows) == 0:
        raise ValueError("richardson needs at least one value")
    residual = np.inf
    for p in exponents:
        if len(rows) < 2:
            break
        q = ratio ** p
        new = [(q * rows[j + 1] - rows[j]) / (q - 1.0) for j in range(len(rows) - 1)]
        residual = float(np.linalg.norm(new[-1] - rows[-1]))
        rows = new
    if len(rows) >= 2:
        residual = float(np.linalg.norm(rows[-1] - rows[-2]))
    value = rows[-1]
    if value.ndim == 0:
        return complex(value), residual
    return value, residual


def pmap(fn, items, workers=None):
    """Order-preserving map, optionally threaded.

    Results are collected in input order, so reductions over the output do
    not depend on the worker count.
    """
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
