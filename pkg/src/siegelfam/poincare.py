"""Truncated Fourier coefficients of Poincare series and their error budget.

The rank-0 term is the exact automorphism count; the rank-1 term is the
literal truncated sum of the classical level-N representative formula
(quadratic Gauss phases evaluated exactly before a single complex
exponential); the rank-2 contribution is never evaluated, only budgeted at
the scale N^-2 k^(-2/3) det(T)^(k/2-1/4+eps).  All implied constants in
reported bounds are set to 1 and are a scale, not a certificate.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from scipy.special import jv as _scipy_jv

from .cyclotomic import RootOfUnitySum
from .fourier import FourierExpansion
from .quadform import QuadForm, automorphism_count, reduce as qf_reduce, representations


def gauss_sum(a: int, b: int, c: int) -> complex:
    """S(a, b; c) = sum_{x mod c} e((a x^2 + b x)/c), exactly reduced."""
    if c < 1:
        raise ValueError("modulus must be >= 1")
    acc = RootOfUnitySum()
    for x in range(c):
        acc.add(1, a * x * x + b * x, c)
    return acc.complex_value()


def gauss_sum_abs2(a: int, b: int, c: int) -> Fraction:
    """|S(a, b; c)|^2 as an exact rational.

    |S|^2 = c * sum over u mod c with c | 2au of e((a u^2 + b u)/c).
    """
    if c < 1:
        raise ValueError("modulus must be >= 1")
    step = c // gcd(2 * a % c if a % c else c, c) if c > 1 else 1
    acc = RootOfUnitySum()
    for u in range(0, c, step):
        if (2 * a * u) % c == 0:
            acc.add(c, a * u * u + b * u, c)
    return acc.as_rational()


def besselJ(nu: float, x: float) -> float:
    """J_nu(x) for nu >= 1/2, x >= 0 (scipy backend, ~1e-12 absolute)."""
    if nu < 0.5 or x < 0:
        raise ValueError("need nu >= 1/2 and x >= 0")
    return float(_scipy_jv(nu, x))


# frozen constants of the three-regime panel (checked by the test suite)
BESSEL_SMALL_CONST = 1.0     # |J_nu(x)| <= C (x/2)^nu / Gamma(nu+1), x <= sqrt(nu+1)
BESSEL_LARGE_CONST = 0.8     # |J_nu(x)| <= C nu^(-1/3), x >= 1
BESSEL_MID_CONST = 1.0       # |J_nu(x)| <= C min(1, x/nu) nu^(-1/3), x >= 1


def bessel_bound(nu: float, x: float) -> float:
    """Envelope used in tail budgets: min of the regime bounds that apply."""
    bounds = []
    if x <= math.sqrt(nu + 1):
        bounds.append(BESSEL_SMALL_CONST
                      * math.exp(nu * math.log(x / 2) - math.lgamma(nu + 1))
                      if x > 0 else 0.0)
    if x >= 1:
        bounds.append(BESSEL_LARGE_CONST * nu ** (-1 / 3))
        bounds.append(BESSEL_MID_CONST * min(1.0, x / nu) * nu ** (-1 / 3))
    if not bounds:
        # 1 < sqrt(nu+1) gap region: the small-x bound still applies for x < 1
        bounds.append(BESSEL_SMALL_CONST
                      * math.exp(nu * math.log(max(x, 1e-300) / 2) - math.lgamma(nu + 1)))
    return min(bounds)


@dataclass
class PoincareSpec:
    q: QuadForm
    level: int
    k: int
    c_max: int = 24
    m_max: int = 12

    def __post_init__(self):
        if self.k % 2 or self.k < 6:
            raise ValueError("weight must be even and >= 6")
        if not self.q.is_positive_definite():
            raise ValueError("Q must be positive definite")


@dataclass
class Rank1Budget:
    partial: complex
    tail: float
    regime_tally: dict = field(default_factory=dict)

    def __post_init__(self):
        assert self.tail >= 0


def rank0(t: QuadForm, q: QuadForm) -> int:
    """delta(T, Q): the exact rank-0 term."""
    return automorphism_count(q, t)


def _primitive_vectors_upto(limit_value, form: QuadForm):
    """Primitive (x, y) != 0 with form[(x, y)] <= limit_value, up to sign."""
    out = []
    bound = isqrt(4 * max(form.a, form.c) * limit_value // form.det4) + 2
    for x in range(0, bound + 1):
        for y in range(-bound, bound + 1):
            if x == 0 and y <= 0:
                continue
            if gcd(x, abs(y)) != 1:
                continue
            if form.value(x, y) <= limit_value:
                out.append((x, y))
    return out


def _complete_unimodular(x, y):
    """Integer matrix [[a, b], [x, y]] with determinant +1."""
    g, u, v = _xgcd(x, y)
    if g < 0:
        g, u, v = -g, -u, -v
    assert g == 1
    return ((-v, u), (x, y))


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qq = old_r // r
        old_r, r = r, old_r - qq * r
        old_s, s = s, old_s - qq * s
        old_t, t = t, old_t - qq * t
    return old_r, old_s, old_t


from functools import lru_cache


@lru_cache(maxsize=512)
def _roots_table(denom: int):
    return tuple(cmath.exp(2j * math.pi * r / denom) for r in range(denom))


def rank1_partial(t: QuadForm, spec: PoincareSpec, a1_shift: int = 0) -> Rank1Budget:
    """Truncated rank-1 sum of the representative formula, with tail budget.

    Phases are exact fractions over the common denominator 2 N c s4, mapped
    through a precomputed root-of-unity table (one exponential per residue).
    a1_shift adds a multiple of Nc to the inverse lift a_1 (the result must
    not depend on it; exposed for the invariance test).
    """
    t_red, _ = qf_reduce(t)
    q = spec.q
    n_level, k = spec.level, spec.k
    det_t = float(t_red.det)
    det_q = float(q.det)
    prefactor = ((-1) ** (k // 2) * math.sqrt(2) * math.pi
                 * (det_t / det_q) ** (k / 2 - 0.75))
    total = 0j
    tally = {"R11": 0, "R12": 0, "R13": 0}
    x_full = 4 * math.pi * math.sqrt(det_t * det_q) / n_level
    # V runs over primitive first columns (v1, v2); s4 = T[(-v2, v1)].  The
    # completion for -(v1, v2) yields identical s-data, so enumerate up to
    # sign and double.
    for v1, v2 in _primitive_vectors_upto(spec.m_max, _rotated(t_red)):
        vmat = _complete_unimodular_col(v1, v2)
        vinv = _inv2(vmat)
        s_form = t_red.transform(vinv)  # V^-1 T V^-t, rows of V^-1 acting
        s1, s2, s4 = s_form.a, s_form.b, s_form.c
        if s4 > spec.m_max:
            continue
        # U runs over primitive bottom rows with Q[(u3, u4)] = s4, up to sign
        for u3, u4 in _half_representations(q, s4):
            umat = _complete_unimodular(u3, u4)
            p_form = q.transform(umat)
            p1, p2, p4 = p_form.a, p_form.b, p_form.c
            assert p4 == s4
            for c in range(1, spec.c_max + 1):
                nc = n_level * c
                arg = 4 * math.pi * math.sqrt(det_t * det_q) / (nc * s4)
                jval = besselJ(k - 1.5, arg)
                if jval == 0.0:
                    continue
                base = 2.0 * prefactor * s4 ** -0.5 * nc ** -1.5 * jval
                regime = ("R11" if nc * s4 >= x_full else
                          "R12" if nc * s4 >= x_full / math.sqrt(k) else "R13")
                denom = 2 * nc * s4
                roots = _roots_table(denom)
                for d4 in (1, -1):
                    for d1 in range(1, nc + 1):
                        if gcd(d1, nc) != 1:
                            continue
                        a1 = pow(d1, -1, nc) + a1_shift * nc
                        # numerator of the phase over denom = 2 nc s4:
                        # 2 s4 [a1 s4 d2^2 - (a1 d4 p2 - s2) d2 + a1 p1 + d1 s1]
                        #   - d4 p2 s2.
                        # The last piece is constant in d2 (it is sometimes
                        # quoted with a spurious d2 factor, which breaks both
                        # the Petersson reciprocity of the sum and the
                        # Gauss-sum step that bounds it; see the test suite).
                        quad_c = 2 * s4 * a1 * s4
                        lin_c = -2 * s4 * (a1 * d4 * p2 - s2)
                        const_c = 2 * s4 * (a1 * p1 + d1 * s1) - d4 * p2 * s2
                        phase_sum = 0j
                        for d2 in range(nc):
                            num = (quad_c * d2 * d2 + lin_c * d2 + const_c) % denom
                            phase_sum += roots[num]
                        total += base * phase_sum
                        tally[regime] += nc
    tail = _rank1_tail(t_red, spec)
    return Rank1Budget(partial=total, tail=tail, regime_tally=tally)


def _rotated(t: QuadForm) -> QuadForm:
    """The form m -> T[(-v2, v1)] as a quadratic form in (v1, v2)."""
    return QuadForm(t.c, -t.b, t.a)


def _complete_unimodular_col(v1, v2):
    """Integer matrix [[v1, x], [v2, y]] with determinant +1."""
    g, u, v = _xgcd(v1, v2)
    if g < 0:
        g, u, v = -g, -u, -v
    assert g == 1
    return ((v1, -v), (v2, u))


def _inv2(m):
    (a, b), (c, d) = m
    det = a * d - b * c
    assert det in (1, -1)
    return ((d * det, -b * det), (-c * det, a * det))


def _transpose(m):
    (a, b), (c, d) = m
    return ((a, c), (b, d))


def _half_representations(q: QuadForm, value: int):
    """Primitive representations of value by q, up to overall sign."""
    out = []
    for x, y in representations(q, value):
        if gcd(x, abs(y)) != 1:
            continue
        if x > 0 or (x == 0 and y > 0):
            out.append((x, y))
    return out


def _rank1_tail(t: QuadForm, spec: PoincareSpec, grid: int = 384):
    """Faithful bound on the dropped (m, c) terms of the truncated rank-1 sum.

    Per uncovered pair: 2 (d4 signs) * phi(Nc) (d1 range) * sqrt(2 (m,Nc) Nc)
    (the sharp quadratic Gauss-sum bound) * the formula prefactor * a Bessel
    envelope * the exact count of (U, V) pairs at that m.  Beyond the grid the
    Bessel envelope makes the remainder negligible at the reported precision.
    """
    det_t = float(t.det)
    det_q = float(spec.q.det)
    k, n_level = spec.k, spec.level
    shape = math.sqrt(2) * math.pi * (det_t / det_q) ** (k / 2 - 0.75)
    nu = k - 1.5
    rot = _rotated(t)
    total = 0.0
    v_counts = {}
    u_counts = {}
    for m in range(1, grid + 1):
        v_counts[m] = 2 * len(_primitive_representations(rot, m))  # both signs
        u_counts[m] = len(_half_representations(spec.q, m))
    for m in range(1, grid + 1):
        pairs = v_counts[m] * u_counts[m]
        if pairs == 0:
            continue
        for c in range(1, grid + 1):
            if m <= spec.m_max and c <= spec.c_max:
                continue
            nc = n_level * c
            arg = 4 * math.pi * math.sqrt(det_t * det_q) / (nc * m)
            jb = bessel_bound(nu, arg)
            gauss = math.sqrt(2.0 * gcd(m, nc) * nc)
            term = pairs * 2 * _phi(nc) * gauss * m ** -0.5 * nc ** -1.5 * jb
            total += term
            if term < 1e-24 and arg < 1.0:
                break  # envelope decays monotonically from here on
    return shape * total


def _primitive_representations(form: QuadForm, value: int):
    return [(x, y) for x, y in representations(form, value) if gcd(x, abs(y)) == 1]


@lru_cache(maxsize=4096)
def _phi(n: int) -> int:
    out = 0
    for d in range(1, n + 1):
        if gcd(d, n) == 1:
            out += 1
    return out


def rank2_scale(t: QuadForm, spec: PoincareSpec, eps: float = 0.01) -> float:
    """Budget scale of the never-evaluated rank-2 term (constant 1)."""
    det_t = float(t.det)
    return (spec.level ** -2.0 * spec.k ** (-2.0 / 3.0)
            * det_t ** (spec.k / 2 - 0.25 + eps))


@dataclass
class CoefficientEstimate:
    value: complex
    rank0: int
    rank1: Rank1Budget
    rank2_budget: float

    @property
    def error_budget(self):
        return self.rank1.tail + self.rank2_budget

    def to_json(self, params=None):
        payload = {
            "rank0": self.rank0,
            "rank1_partial": [self.rank1.partial.real, self.rank1.partial.imag],
            "rank1_tail": self.rank1.tail,
            "rank2_scale": self.rank2_budget,
            "total": [self.value.real, self.value.imag],
            "note": "bound terms use implied constants 1: scale, not certificate",
        }
        if params is not None:
            payload["params"] = params
        return json.dumps(payload, indent=2, sort_keys=True)


def coefficient_estimate(t: QuadForm, spec: PoincareSpec) -> CoefficientEstimate:
    """a(T; G_{Q,N,k}) ~ rank0 + rank1_partial, with the rank-2 scale budgeted."""
    r0 = rank0(t, spec.q)
    r1 = rank1_partial(t, spec)
    return CoefficientEstimate(
        value=r0 + r1.partial, rank0=r0, rank1=r1,
        rank2_budget=rank2_scale(t, spec))


def ratio_oracle(t1: QuadForm, t2: QuadForm, spec: PoincareSpec,
                 f: FourierExpansion):
    """Poincare coefficient ratio vs the exact eigenform ratio (dim-1 spaces).

    In a 1-dimensional cusp space a(T;G_Q)/a(T';G_Q) = a(T;f)/a(T';f); the
    gap between the truncated Poincare ratio and the exact right-hand side is
    compared to the propagated truncation budget.
    """
    est1 = coefficient_estimate(t1, spec)
    est2 = coefficient_estimate(t2, spec)
    denom_val = f.coefficient(t2)
    if denom_val == 0:
        raise ZeroDivisionError("a(T2; f) = 0")
    if abs(est2.value) <= est2.error_budget:
        raise ArithmeticError("denominator estimate is not resolved beyond its budget")
    lhs = est1.value / est2.value
    rhs = float(f.coefficient(t1) / denom_val)
    gap = abs(lhs - rhs)
    budget = ((est1.error_budget + abs(lhs) * est2.error_budget)
              / (abs(est2.value) - est2.error_budget))
    return {"lhs": lhs, "rhs": rhs, "gap": gap, "budget": budget,
            "estimates": (est1, est2)}
