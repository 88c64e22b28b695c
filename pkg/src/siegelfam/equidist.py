"""Spectral weights, ray class data, Weyl sums, and the pivotal identity.

The family-side measure attaches to each eigenform the weight
c_k^{d,Lambda}/vol(Gamma_0(N)\\H_2) * |a(d,Lambda;f)|^2 / <f,f>; its integrals
against the Sugano basis are compared to the model-measure predictions.  The
identity check ties the exact Fourier-coefficient side to the Satake/Sugano
side and is the package's central cross-validation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import volumes
from .bessel_measure import _class_group, sugano_U
from .fourier import FourierExpansion, linear_combine
from .hecke import SatakeParams, satake_of_form
from .quadform import (
    QuadForm,
    kronecker,
    reduce as qf_reduce,
    reduced_forms,
)

volume = volumes.volume
gamma0_index = volumes.gamma0_index


def c_k_d_lambda(k: int, d: int, character) -> float:
    """The explicit constant multiplying |a(d,Lambda;f)|^2/<f,f> (without 1/vol)."""
    if k % 2 or k < 6:
        raise ValueError("weight must be even and >= 6")
    cg = _class_group(d)
    d_lam = cg.d_lambda(character)
    log_val = (0.5 * math.log(math.pi) + (3 - 2 * k) * math.log(4 * math.pi)
               + math.lgamma(k - 1.5) + math.lgamma(k - 2)
               + (1.5 - k) * math.log(d / 4.0))
    return math.exp(log_val) * d_lam / (cg.w * cg.h)


def a_d_lambda(f: FourierExpansion, d: int, character) -> complex:
    """a(d, Lambda; f) = sum over Cl_d of conj(Lambda(c)) a(S_c; f)."""
    cg = _class_group(d)
    if 4 * f.det_bound < d:
        raise ValueError(f"detBound {f.det_bound} < d/4 = {Fraction(d, 4)}")
    total = 0j
    for form in cg.elements:
        total += character.value(form).conjugate() * complex(f.coefficient(form))
    return total


def weight_omega(f: FourierExpansion, level: int, k: int, d: int, character,
                 petersson_norm: float) -> float:
    """omega_{f,N,k}^{d,Lambda}; petersson_norm is <f,f> in the f-scale given."""
    if petersson_norm is None or petersson_norm <= 0:
        raise ValueError("a positive Petersson norm is required")
    a_val = a_d_lambda(f, d, character)
    return (c_k_d_lambda(k, d, character) / volume(level)
            * abs(a_val) ** 2 / petersson_norm)


# ----------------------------------------------------------- ray class data

@dataclass(frozen=True)
class RayClassData:
    d: int
    modulus: int
    elements: tuple           # reduced primitive forms of disc -d M^2
    images: dict              # element -> element of Cl_d (the surjection)

    @property
    def order(self):
        return len(self.elements)


def _omega_coords(disc):
    """Multiplication data for Z[omega] with omega = sqrt(D)/2 or (1+sqrt(D))/2."""
    if disc % 4 == 0:
        c0 = disc // 4

        def mul(e1, e2):
            (x1, y1), (x2, y2) = e1, e2
            return (x1 * x2 + y1 * y2 * c0, x1 * y2 + x2 * y1)
    else:
        c0 = (disc - 1) // 4

        def mul(e1, e2):
            (x1, y1), (x2, y2) = e1, e2
            return (x1 * x2 + y1 * y2 * c0, x1 * y2 + x2 * y1 + y1 * y2)
    return mul


def _module_norm_form(gens, disc):
    """Norm form of the Z-module spanned by gens (coords over {1, omega})."""
    rows = [list(g) for g in gens if g != (0, 0)]
    # HNF sweep: reduce to [n, x0 + y0*omega] with y0 > 0, 0 <= x0 < n
    while sum(1 for r in rows if r[1] != 0) > 1:
        nz = sorted((r for r in rows if r[1] != 0), key=lambda r: abs(r[1]))
        a, b = nz[0], nz[1]
        q = b[1] // a[1]
        b[0] -= q * a[0]
        b[1] -= q * a[1]
        rows = [r for r in rows if r != [0, 0]]
    gx = 0
    for r in rows:
        if r[1] == 0:
            gx = math.gcd(gx, r[0])
    y_row = next(r for r in rows if r[1] != 0)
    if y_row[1] < 0:
        y_row = [-y_row[0], -y_row[1]]
    x0, y0 = y_row[0] % gx if gx else y_row[0], y_row[1]
    n = gx
    if disc % 4 == 0:
        qa, qb, qc = n * n, 2 * n * x0, x0 * x0 - y0 * y0 * (disc // 4)
    else:
        qa, qb, qc = (n * n, n * (2 * x0 + y0),
                      x0 * x0 + x0 * y0 - y0 * y0 * (disc - 1) // 4)
    cont = math.gcd(math.gcd(qa, abs(qb)), abs(qc))
    red, _ = qf_reduce(QuadForm(qa // cont, qb // cont, qc // cont))
    return red


def _extend_to_maximal_order(form: QuadForm, d: int, modulus: int) -> QuadForm:
    """Image of a disc -dM^2 class under Cl_d(M) -> Cl_d (ideal extension)."""
    disc_k = -d
    mul = _omega_coords(disc_k)
    a, b = form.a, form.b
    # module of the order-level form: [a, (b + M sqrt(-d))/2] in {1, omega_K}
    if disc_k % 4 == 0:
        assert b % 2 == 0
        gen2 = (b // 2, modulus)
    else:
        assert (b - modulus) % 2 == 0
        gen2 = ((b - modulus) // 2, modulus)
    gens = [
        (a, 0), (0, a),                      # a, a*omega
        gen2, mul(gen2, (0, 1)),             # g, g*omega
    ]
    return _module_norm_form(gens, disc_k)


@lru_cache(maxsize=None)
def ray_class_group(d: int, modulus: int) -> RayClassData:
    """Class data for the modulus-M congruence quotient (M = 1 or prime).

    Realized as the class group of primitive forms of discriminant -d M^2
    (the congruence condition cuts out the order of conductor M), together
    with the natural surjection onto Cl_d.
    """
    cg = _class_group(d)
    if modulus == 1:
        elems = tuple(cg.elements)
        return RayClassData(d=d, modulus=1, elements=elems,
                            images={e: e for e in elems})
    if modulus > 10 or not _is_prime(modulus):
        raise ValueError(
            f"modulus {modulus} unsupported: only 1 and small primes are implemented")
    elems = tuple(reduced_forms(-d * modulus * modulus))
    images = {e: _extend_to_maximal_order(e, d, modulus) for e in elems}
    for img in images.values():
        assert img in cg.index, "surjection image left the class group"
    return RayClassData(d=d, modulus=modulus, elements=elems, images=images)


def ray_class_order_formula(d: int, modulus: int) -> int:
    """Independent order oracle: h * M prod_{p|M}(1 - chi(p)/p) / [O* : O_M*]."""
    cg = _class_group(d)
    if modulus == 1:
        return cg.h
    val = Fraction(cg.h * modulus)
    m = modulus
    p = 2
    seen = set()
    while m > 1:
        if m % p == 0:
            if p not in seen:
                val *= 1 - Fraction(kronecker(-d, p), p)
                seen.add(p)
            m //= p
        else:
            p += 1
    unit_index = {6: 3, 4: 2}.get(cg.w, 1)  # [O^x : +-1] collapses at conductor > 1
    val /= unit_index
    assert val.denominator == 1
    return int(val)


def _is_prime(n):
    return n > 1 and all(n % q for q in range(2, int(math.isqrt(n)) + 1))


# ------------------------------------------------------------ weighted family

@dataclass
class FamilyMember:
    label: str
    expansion: FourierExpansion | None
    satake: dict                 # p -> SatakeParams
    omega: float
    conductor: float = 1.0       # q(pi), for the density module
    sk_flagged: bool = False


@dataclass
class WeightedFamily:
    k: int
    level: int
    primes: tuple
    d: int
    character: object
    members: list = field(default_factory=list)

    def total_mass(self):
        return sum(m.omega for m in self.members)


def weyl_sum(family: WeightedFamily, indices: dict, eps: float = 0.01):
    """sum_f omega_f prod_p U_p^(l_p, m_p)(a_p, b_p), with its report fields.

    indices maps p -> (l, m) for p in family.primes; missing primes use (0,0).
    """
    total = 0j
    u_funcs = {}
    for p in family.primes:
        lm = indices.get(p, (0, 0))
        u_funcs[p] = sugano_U(lm, p, family.d, family.character) if lm != (0, 0) else None
    for member in sorted(family.members, key=lambda m: m.label):
        term = complex(member.omega)
        for p in family.primes:
            if u_funcs[p] is not None:
                sp = member.satake[p]
                term *= complex(u_funcs[p](sp.a, sp.b))
        total += term
    big_l = 1
    big_m = 1
    for p in family.primes:
        l, m = indices.get(p, (0, 0))
        big_l *= p ** l
        big_m *= p ** m
    target = 1.0 if big_l == big_m == 1 else 0.0
    scale = (family.level ** -1.0 * family.k ** (-2.0 / 3.0)
             * big_l ** (1 + eps) * big_m ** (1.5 + eps))
    return {
        "value": total,
        "target": target,
        "L": big_l,
        "M": big_m,
        "error_scale": scale,
    }


# ------------------------------------------------------- the pivotal identity

class IdentityDataError(ValueError):
    pass


def bessel_identity_check(f: FourierExpansion, k: int, p: int, L: int, M: int,
                          d: int, character, satake: SatakeParams | None = None):
    """Exact-coefficient side vs Satake/Sugano side of the pivotal identity.

    lhs = (h_d / |Cl_d(M)|) sum_{c in Cl_d(M)} conj(Lambda(c)) a(S_c^{L,M}; f)
    rhs = L^(k-3/2) M^(k-2) sum_{c in Cl_d} conj(Lambda(c)) a(S_c; f)
          * U_p^(l,m)(a_p, b_p)

    Returns (lhs, rhs, relative error).  For L = M = 1 the two sides coincide
    structurally.  S_c^{L,M} for c in Cl_d(M) is realized as L * F_c with F_c
    the reduced representative of disc -d M^2 (det = L^2 M^2 d/4 as required).
    """
    cg = _class_group(d)
    l = _prime_exponent(L, p)
    m = _prime_exponent(M, p)
    base = a_d_lambda(f, d, character)
    if L == M == 1:
        return complex(base), complex(base), 0.0
    ray = ray_class_group(d, M)
    lhs = 0j
    scale = 0.0
    for c in ray.elements:
        key = c.scale(L)
        if key.det4 > f.det_bound4:
            raise IdentityDataError(
                f"identity needs det <= {key.det}; expansion reaches {f.det_bound}")
        lam_val = character.value(ray.images[c]).conjugate()
        term = complex(f.coefficient(key))
        lhs += lam_val * term
        scale += abs(term)
    lhs *= Fraction(cg.h, ray.order)
    scale *= cg.h / ray.order
    if satake is None:
        satake = satake_of_form(f, p)
    u_val = complex(sugano_U((l, m), p, d, character)(satake.a, satake.b))
    power = float(L) ** (k - 1.5) * float(M) ** (k - 2.0)
    rhs = power * base * u_val
    scale += power * abs(base * u_val)
    # when both sides cancel to numerical zero relative to the summand scale,
    # measure the gap against that scale instead of against pure noise
    side = max(abs(lhs), abs(rhs))
    scale = max(scale, 1e-300)
    denom = side if side >= 1e-10 * scale else scale
    return lhs, rhs, abs(lhs - rhs) / denom


def _prime_exponent(n: int, p: int) -> int:
    if n == 1:
        return 0
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    if n != 1:
        raise IdentityDataError(f"{n} is not a power of the identity prime {p}")
    return e


# ------------------------------------------------- basis invariance (remixes)

@dataclass
class EigenBlock:
    """Orthonormal eigenvectors sharing local data (one Hecke eigenspace)."""
    expansions: list             # list of FourierExpansion, declared orthonormal
    satake: dict                 # p -> SatakeParams, shared by the block


def _block_structure_ok(blocks, mixing, tol=1e-12):
    sizes = [len(b.expansions) for b in blocks]
    n = sum(sizes)
    if len(mixing) != n or any(len(row) != n for row in mixing):
        return False
    # unitarity
    for i in range(n):
        for j in range(n):
            val = sum(mixing[i][t] * complex(mixing[j][t]).conjugate() for t in range(n))
            if abs(val - (1 if i == j else 0)) > 1e-9:
                return False
    # block diagonality w.r.t. the declared eigenvalue blocks
    starts = []
    pos = 0
    for s in sizes:
        starts.append((pos, pos + s))
        pos += s
    for bi, (i0, i1) in enumerate(starts):
        for bj, (j0, j1) in enumerate(starts):
            if bi == bj:
                continue
            for i in range(i0, i1):
                for j in range(j0, j1):
                    if abs(mixing[i][j]) > tol:
                        return False
    return True


def basis_invariance_check(blocks, mixing, level: int, k: int, d: int, character,
                           index_panel=None, tol: float = 1e-10):
    """Weyl-sum panels before and after a within-eigenspace unitary remix.

    blocks: list of EigenBlock with orthonormal members; mixing: unitary matrix
    acting on the concatenated basis, which must be block diagonal (mixing
    across distinct eigenvalue blocks is rejected).  Returns (ok, max_diff).
    """
    if not _block_structure_ok(blocks, mixing):
        raise ValueError("mixing matrix is not unitary block-diagonal "
                         "for the declared eigenvalue blocks")
    primes = tuple(sorted(blocks[0].satake))
    if index_panel is None:
        index_panel = [{p: lm for p in primes} for lm in
                       ((0, 0), (1, 0), (2, 0), (0, 1))]

    def family_for(expansions_with_blocks):
        fam = WeightedFamily(k=k, level=level, primes=primes, d=d,
                             character=character, members=[])
        for i, (exp, block) in enumerate(expansions_with_blocks):
            omega = weight_omega(exp, level, k, d, character, petersson_norm=1.0)
            fam.members.append(FamilyMember(
                label=f"v{i}", expansion=exp, satake=block.satake, omega=omega))
        return fam

    original = [(exp, block) for block in blocks for exp in block.expansions]
    fam_a = family_for(original)
    # remixed vectors: rows of the mixing matrix applied to the basis
    n = len(original)
    remixed = []
    for i in range(n):
        combo = _complex_combine([mixing[i][j] for j in range(n)],
                                 [exp for exp, _ in original])
        remixed.append((combo, original[_block_of(blocks, i)][1]))
    fam_b = family_for(remixed)
    max_diff = 0.0
    for indices in index_panel:
        va = weyl_sum(fam_a, indices)["value"]
        vb = weyl_sum(fam_b, indices)["value"]
        max_diff = max(max_diff, abs(va - vb))
    return max_diff <= tol, max_diff


def _block_of(blocks, flat_index):
    pos = 0
    for bi, b in enumerate(blocks):
        if flat_index < pos + len(b.expansions):
            return bi
        pos += len(b.expansions)
    raise IndexError(flat_index)


class _ComplexExpansion:
    """Real/imaginary pair of expansions with complex-coefficient lookups."""

    def __init__(self, re: FourierExpansion, im: FourierExpansion):
        self.re = re
        self.im = im
        self.k = re.k
        self.level = re.level
        self.det_bound = re.det_bound
        self.det_bound4 = re.det_bound4

    def coefficient(self, t):
        return complex(self.re.coefficient(t)) + 1j * complex(self.im.coefficient(t))


def _complex_combine(coeffs, expansions):
    re_parts = [(Fraction(complex(c).real), f) for c, f in zip(coeffs, expansions)]
    im_parts = [(Fraction(complex(c).imag), f) for c, f in zip(coeffs, expansions)]
    return _ComplexExpansion(linear_combine(re_parts), linear_combine(im_parts))
