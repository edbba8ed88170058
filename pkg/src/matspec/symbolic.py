"""Polynomials in the noncommuting derivatives of a matrix potential.

The large-|z| expansion coefficients of the half-line M-matrices are
universal polynomials in Q, Q', Q'', ... with complex coefficients; because
the generators do not commute, monomials are ordered words.  Keeping the
recursion symbolic and differentiating words by the product rule avoids
nested numeric differentiation.

A monomial is a tuple of generator indices, ``(j1, j2, ...)`` standing for
the ordered product Q^(j1) Q^(j2) ...; the empty word is the identity.
"""

import numpy as np


class DerivPolynomial:
    """Complex-linear combination of ordered words in Q, Q', Q'', ..."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = dict(terms or {})

    @classmethod
    def generator(cls, order=0, coeff=1.0):
        return cls({(order,): complex(coeff)})

    @classmethod
    def zero(cls):
        return cls()

    def __add__(self, other):
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, 0.0) + c
            if out[mono] == 0:
                del out[mono]
        return DerivPolynomial(out)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        out = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                mono = ma + mb
                out[mono] = out.get(mono, 0.0) + ca * cb
                if out[mono] == 0:
                    del out[mono]
        return DerivPolynomial(out)

    __rmul__ = __mul__

    def scale(self, c):
        c = complex(c)
        return DerivPolynomial({m: c * v for m, v in self.terms.items()})

    def derivative(self):
        """d/dx by the product rule: raise one letter's order per term."""
        out = {}
        for mono, c in self.terms.items():
            for pos in range(len(mono)):
                raised = mono[:pos] + (mono[pos] + 1,) + mono[pos + 1 :]
                out[raised] = out.get(raised, 0.0) + c
                if out[raised] == 0:
                    del out[raised]
        return DerivPolynomial(out)

    @property
    def max_derivative_order(self):
        orders = [max(mono) for mono in self.terms if mono]
        return max(orders) if orders else 0

    def evaluate(self, generators, dim):
        """Substitute matrices for the generators; ``generators[j]`` is the
        value of Q^(j) at the evaluation point."""
        acc = np.zeros((dim, dim), dtype=complex)
        eye = np.eye(dim, dtype=complex)
        for mono, c in self.terms.items():
            word = eye
            for j in mono:
                word = word @ generators[j]
            acc += c * word
        return acc


def m_expansion_polynomials(side, count):
    """The first ``count`` expansion coefficients of M_side as polynomials.

    Recursion: c_1 = (sign/2i) Q, c_2 = Q'/4 and, for k >= 2,
    c_{k+1} = (sign*i/2) (c_k' + sum_{l=1}^{k-1} c_l c_{k-l}).
    Coefficient k requires derivatives of Q up to order k-1.
    """
    sign = +1.0 if side in (+1, "+") else -1.0
    polys = []
    if count >= 1:
        polys.append(DerivPolynomial.generator(0, sign / 2j))
    if count >= 2:
        polys.append(DerivPolynomial.generator(1, 0.25))
    while len(polys) < count:
        k = len(polys)
        acc = polys[k - 1].derivative()
        for ell in range(1, k):
            acc = acc + polys[ell - 1] * polys[k - 1 - ell]
        polys.append(acc.scale(sign * 0.5j))
    return polys
