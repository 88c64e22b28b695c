"""Lift oldform combinatorics, eigenvalue predictions, and norm formulas.

Level raising of the weight-k lift of an elliptic newform happens through two
reindexing maps on Fourier expansions; iterating them over the primes dividing
N/M produces the full 3^r-dimensional oldspace.  The Ramanujan-violation
detector and the inner-product formula are the computable consequences used
by the density pipeline.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .equidist import a_d_lambda, weight_omega
from .fourier import FourierExpansion
from .form_factory import EllipticFormData
from .hecke import TP, SatakeParams, eigenvalue, weyl_canonicalize
from .quadform import QuadForm
from . import volumes


def t1_map(f: FourierExpansion, p: int) -> FourierExpansion:
    """a(T) placed at key pT: coefficient of T' is a(T'/p), 0 off p-divisible."""
    out = {}
    for key, val in f.coeffs.items():
        out[key.scale(p)] = val
    return FourierExpansion(f.k, f.level * p, f.det_bound * p * p, out,
                            label=f"T1({p}){f.label}" if f.label else "")


def t3_map(f: FourierExpansion, p: int) -> FourierExpansion:
    """Restriction to p-divisible keys: coefficient of pT is a(pT)."""
    if f.det_bound4 < 3 * p * p:
        raise ValueError(
            f"T3 at p = {p} needs 4 detBound >= {3 * p * p} to keep any key")
    out = {}
    for key, val in f.coeffs.items():
        if key.a % p == 0 and key.b % p == 0 and key.c % p == 0:
            out[key] = val
    return FourierExpansion(f.k, f.level * p, f.det_bound, out,
                            label=f"T3({p}){f.label}" if f.label else "")


@dataclass
class SKOldformBasis:
    base: FourierExpansion
    primes: tuple
    expansions: list

    @property
    def count(self):
        return len(self.expansions)


def oldform_basis(sk_lift_form: FourierExpansion, primes) -> SKOldformBasis:
    """The 3^r expansions {f, T1(p,f), T3(p,f)} iterated over the prime set."""
    primes = tuple(sorted(primes))
    if len(set(primes)) != len(primes):
        raise ValueError("prime set must be squarefree")
    for p in primes:
        if sk_lift_form.level % p == 0:
            raise ValueError(f"{p} already divides the base level")
    basis = [sk_lift_form]
    for p in primes:
        basis = [g for f in basis for g in (f, t1_map(f, p), t3_map(f, p))]
    return SKOldformBasis(base=sk_lift_form, primes=primes, expansions=basis)


def coefficient_matrix_rank(expansions, bound4=None):
    """Exact rank over Q of the coefficient vectors on keys up to bound4."""
    bound4 = min(f.det_bound4 for f in expansions) if bound4 is None else bound4
    keys = expansions[0].support_keys(bound4)
    rows = [[f.coefficient(key) for key in keys] for f in expansions]
    return _rank_exact(rows)


def _rank_exact(rows):
    rows = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    cols = len(rows[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def predicted_eigenvalue(lift: FourierExpansion, p: int) -> Fraction:
    """T(p)-eigenvalue of the lift, through full coset application."""
    if lift.level % p == 0:
        raise ValueError("prediction applies to p prime to the level")
    return eigenvalue(lift, TP, p)


def classical_eigenvalue_prediction(g: EllipticFormData, k: int, p: int) -> Fraction:
    """a_g(p) + p^(k-1) + p^(k-2), in the classical slash normalization."""
    return Fraction(g.coefficient(p)) + Fraction(p) ** (k - 1) + Fraction(p) ** (k - 2)


def detect_ramanujan_violation(params: SatakeParams, p: int, tol: float = 1e-6) -> bool:
    """True iff the canonical representative reaches the sqrt(p) wall."""
    canon = weyl_canonicalize(params.a, params.b)
    top = max(abs(canon.a), abs(canon.b))
    return top >= math.sqrt(p) - tol


def sl2_gamma0_index(n: int) -> int:
    """[SL2(Z) : Gamma_0(N)] = N prod (1 + 1/p)."""
    idx = n
    m = n
    p = 2
    seen = set()
    while m > 1:
        if m % p == 0:
            if p not in seen:
                idx = idx // p * (p + 1)
                seen.add(p)
            while m % p == 0:
                m //= p
        else:
            p += 1
    return idx


def brown_norm_constant(k: int, level: int) -> float:
    """B_{k,M} = M^k (k-1) prod(p^4+1) / (2^(m+3) 3 [Sp4:G0(M)] [G0(M):G0(4M)])."""
    m_primes = _prime_divisors(level)
    numerator = float(level) ** k * (k - 1)
    for p in m_primes:
        numerator *= p ** 4 + 1
    sp4_index = volumes.gamma0_index(level)
    ell_index = sl2_gamma0_index(4 * level) // sl2_gamma0_index(level)
    return numerator / (2 ** (len(m_primes) + 3) * 3 * sp4_index * ell_index)


def _prime_divisors(n):
    out = []
    p = 2
    while n > 1:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        else:
            p += 1
    return out


def brown_norm(g: EllipticFormData, k: int, level: int, disc: int,
               plus_coefficient) -> float:
    """<SK(g), SK(g)> from the inner-product relation.

    disc = D < 0 fundamental with gcd(level, D) = 1; plus_coefficient is
    a(|D|) of the half-integral form attached to g; the elliptic datum must
    carry <g, g>, L(1, pi_g) and L(1/2, pi_g x chi_D).
    """
    if disc >= 0 or math.gcd(level, disc) != 1:
        raise ValueError("need a fundamental D < 0 coprime to the level")
    for name, val in (("petersson_norm", g.petersson_norm),
                      ("l_value_sym", g.l_value_sym),
                      ("l_value_twist", g.l_value_twist)):
        if val is None:
            raise ValueError(f"elliptic datum lacks {name}")
    if plus_coefficient == 0:
        raise ValueError("a(|D|) of the plus form vanishes; pick another D")
    if g.l_value_twist == 0:
        raise ValueError("twisted central value vanishes; pick another D")
    b_km = brown_norm_constant(k, level)
    return (b_km * abs(float(plus_coefficient)) ** 2 * g.l_value_sym
            / (math.pi * abs(disc) ** (k - 1.5) * g.l_value_twist)
            * g.petersson_norm)


def sk_weight_budget(level: int, k: int, delta: float = 0.1) -> float:
    """Monitor scale 1/(M^(5-delta) k^(2-delta)) for lift mass in a family."""
    return 1.0 / (level ** (5 - delta) * k ** (2 - delta))


def audit_report(family, d: int, character, budget_delta: float = 0.1) -> str:
    """JSON audit: flagged members, their weight mass, and the budget scale."""
    flagged = [m for m in family.members if m.sk_flagged]
    mass = sum(m.omega for m in flagged)
    total = family.total_mass()
    payload = {
        "k": family.k,
        "N": family.level,
        "flagged": [m.label for m in flagged],
        "flagged_mass": mass,
        "total_mass": total,
        "budget_scale": sk_weight_budget(max(family.level, 1), family.k, budget_delta),
        "note": "budget is a scale, not a certificate",
    }
    return json.dumps(payload, indent=2, sort_keys=True)
