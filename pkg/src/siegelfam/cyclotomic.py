"""Exact sums of roots of unity with rational coefficients.

A sum  sum_j  c_j * e(q_j)  with c_j rational and q_j rational (e(x) =
exp(2*pi*i*x)) lives in a cyclotomic field.  We reduce such sums modulo the
cyclotomic polynomial so that rationality can be asserted exactly; the Hecke
action on exact Fourier coefficients and quadratic Gauss sum identities both
rely on this.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from math import gcd


def _cyclotomic_poly(n):
    """Coefficients of the n-th cyclotomic polynomial (exact, by division)."""
    # x^n - 1 = prod_{d | n} Phi_d(x)
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            phi_d = _cyclotomic_poly(d)
            poly = _poly_div_exact(poly, phi_d)
    return poly


def _poly_div_exact(num, den):
    num = [Fraction(x) for x in num]
    out = [Fraction(0)] * (len(num) - len(den) + 1)
    while len(num) >= len(den) and any(num):
        shift = len(num) - len(den)
        lead = num[-1] / den[-1]
        out[shift] = lead
        for i, c in enumerate(den):
            num[shift + i] -= lead * c
        while num and num[-1] == 0:
            num.pop()
    assert all(x.denominator == 1 for x in out)
    return [int(x) for x in out]


_PHI_CACHE: dict[int, list[int]] = {}


def _phi(n):
    if n not in _PHI_CACHE:
        _PHI_CACHE[n] = _cyclotomic_poly(n)
    return _PHI_CACHE[n]


class RootOfUnitySum:
    """Exact element of Q(zeta_N), stored as coefficients of zeta_N^j."""

    def __init__(self, order=1):
        self.order = order
        self.coeffs = {}

    def add(self, coeff, numer, denom):
        """Add coeff * e(numer/denom)."""
        coeff = Fraction(coeff)
        if coeff == 0:
            return
        g = gcd(numer, denom) if numer else denom
        numer, denom = numer // g, denom // g
        if denom < 0:
            denom, numer = -denom, -numer
        new_order = self.order * denom // gcd(self.order, denom)
        if new_order != self.order:
            self.coeffs = {j * (new_order // self.order): c for j, c in self.coeffs.items()}
            self.order = new_order
        j = (numer * (self.order // denom)) % self.order
        self.coeffs[j] = self.coeffs.get(j, Fraction(0)) + coeff
        if self.coeffs[j] == 0:
            del self.coeffs[j]

    def _reduced(self):
        """Coefficient list reduced mod Phi_order, length deg Phi."""
        n = self.order
        phi = _phi(n)
        deg = len(phi) - 1
        vec = [Fraction(0)] * n
        for j, c in self.coeffs.items():
            vec[j % n] += c
        # reduce powers >= deg using Phi (monic): zeta^deg = -sum phi[i] zeta^i
        for j in range(n - 1, deg - 1, -1):
            c = vec[j]
            if c == 0:
                continue
            vec[j] = Fraction(0)
            for i in range(deg):
                vec[j - deg + i] += -c * phi[i]
        return vec[:deg]

    def as_rational(self):
        """Exact rational value; raises if the sum is not rational."""
        red = self._reduced()
        if any(c != 0 for c in red[1:]):
            raise ValueError("root-of-unity sum is not rational: %r" % (red,))
        return red[0] if red else Fraction(0)

    def is_rational(self):
        red = self._reduced()
        return all(c == 0 for c in red[1:])

    def conjugate(self):
        out = RootOfUnitySum(self.order)
        for j, c in self.coeffs.items():
            out.coeffs[(-j) % self.order] = c
        return out

    def __mul__(self, other):
        if isinstance(other, RootOfUnitySum):
            n = self.order * other.order // gcd(self.order, other.order)
            out = RootOfUnitySum(n)
            for j1, c1 in self.coeffs.items():
                for j2, c2 in other.coeffs.items():
                    out.add(c1 * c2, j1 * (n // self.order) + j2 * (n // other.order), n)
            return out
        out = RootOfUnitySum(self.order)
        for j, c in self.coeffs.items():
            out.coeffs[j] = c * Fraction(other)
        return out

    def complex_value(self):
        return sum(float(c) * cmath.exp(2j * cmath.pi * j / self.order)
                   for j, c in self.coeffs.items())


def exact_exp_sum(terms):
    """Exact rational value of sum coeff*e(num/den); raises if irrational."""
    acc = RootOfUnitySum()
    for coeff, num, den in terms:
        acc.add(coeff, num, den)
    return acc.as_rational()
