"""Hecke operators T(p), T_1(p^2) on Fourier expansions, and Satake parameters.

Coset representatives are generated, not transcribed: every right coset of a
multiplier-m integral symplectic similitude has a unique block-upper-triangular
normal form [[A, B], [0, m A^-t]] with A in left Hermite form and B reduced
modulo symmetric translates.  The list is validated against the defining
relation g^t J g = m J, the Smith-type of the double coset, and (for T(p))
the Lagrangian-flag degree count (p+1)(p^2+1).

The slash action follows (f|T)(Z) = sum_i lambda(M_i)^k j(M_i, Z)^-k f(M_i<Z>),
under which the similitude center acts trivially.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .cyclotomic import RootOfUnitySum
from .fourier import FourierExpansion
from .intlinalg import lattice_quotient_reps, smith_normal_form
from .quadform import QuadForm

TP = "Tp"
T1P2 = "T1p2"


@dataclass(frozen=True)
class CosetRep:
    """Block upper-triangular representative: A, B integer 2x2, D = m A^-t."""
    a: tuple  # ((a1, c), (0, a2))
    b: tuple  # ((b11, b12), (b21, b22))
    m: int    # similitude multiplier

    def full_matrix(self):
        (a1, c), (_, a2) = self.a
        q = a1 * a2
        d = ((self.m * a2 // q, 0), (-self.m * c // q, self.m * a1 // q))
        rows = [
            [self.a[0][0], self.a[0][1], self.b[0][0], self.b[0][1]],
            [self.a[1][0], self.a[1][1], self.b[1][0], self.b[1][1]],
            [0, 0, d[0][0], d[0][1]],
            [0, 0, d[1][0], d[1][1]],
        ]
        return rows


@dataclass(frozen=True)
class HeckeOperator:
    kind: str
    p: int
    reps: tuple

    @property
    def multiplier(self):
        return self.p if self.kind == TP else self.p * self.p

    def __len__(self):
        return len(self.reps)


def _symplectic_j():
    return [[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]]


def _check_similitude(mat, m):
    j = _symplectic_j()
    jm = [[sum(j[r][k] * mat[k][c] for k in range(4)) for c in range(4)] for r in range(4)]
    mt_jm = [[sum(mat[k][r] * jm[k][c] for k in range(4)) for c in range(4)] for r in range(4)]
    return mt_jm == [[m * j[r][c] for c in range(4)] for r in range(4)]


def _snf_type(mat):
    d, _u, _v = smith_normal_form([row[:] for row in mat])
    return tuple(d[i][i] for i in range(4))


def _divisor_pairs(m):
    out = []
    for a1 in range(1, m + 1):
        if m % a1:
            continue
        for a2 in range(1, m + 1):
            if m % a2:
                continue
            out.append((a1, a2))
    return out


def _sigma_residue_basis(a1, a2, c):
    """Basis of {(Y', Z') in Z^2 : a2 | a1 Y' + c Z'}."""
    g1 = gcd(a1, a2)
    v1 = (a2 // g1, 0)
    z1 = None
    for z in range(1, a2 + 1):
        if (c * z) % g1 == 0:
            # solve a1 y = -c z (mod a2)
            target = (-c * z) % a2
            sol = None
            for y in range(a2):
                if (a1 * y) % a2 == target:
                    sol = y
                    break
            if sol is not None:
                z1 = (sol, z)
                break
    assert z1 is not None
    return [v1, z1]


def _coset_reps_for_multiplier(m):
    """All canonical [[A, B], [0, m A^-t]] cosets with multiplier m."""
    reps = []
    for a1, a2 in _divisor_pairs(m):
        q = a1 * a2
        for c in range(a2):
            if (m * c) % q:
                continue
            # V_A: Sigma = (1/q) [[X, Y], [Y, Z]], X = -c Y' + a2 X',
            # (Y, Z) = a1 (Y', Z') with a2 | a1 Y' + c Z'
            yz = _sigma_residue_basis(a1, a2, c)
            v_basis = [
                [a2, 0, 0],
                [-c * yz[0][0], a1 * yz[0][0], a1 * yz[0][1]],
                [-c * yz[1][0], a1 * yz[1][0], a1 * yz[1][1]],
            ]
            w_basis = [
                [m * a2 // a1, 0, 0],
                [-2 * m * c // a1, m, 0],
                [m * c * c // q, -m * c // a2, m * a1 // a2],
            ]
            for vec in lattice_quotient_reps(v_basis, w_basis):
                x, y, z = vec
                # B = A Sigma with Sigma = (1/q) [[x, y], [y, z]]
                b11, num = divmod(a1 * x + c * y, q)
                assert num == 0
                b12, num = divmod(a1 * y + c * z, q)
                assert num == 0
                b21, num = divmod(a2 * y, q)
                assert num == 0
                b22, num = divmod(a2 * z, q)
                assert num == 0
                rep = CosetRep(a=((a1, c), (0, a2)), b=((b11, b12), (b21, b22)), m=m)
                mat = rep.full_matrix()
                assert _check_similitude(mat, m)
                reps.append(rep)
    return reps


@lru_cache(maxsize=None)
def coset_reps(kind: str, p: int) -> HeckeOperator:
    """Complete duplicate-free coset list for T(p) or T_1(p^2)."""
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if kind == TP:
        reps = [r for r in _coset_reps_for_multiplier(p)]
        expected = (p + 1) * (p * p + 1)
        if len(reps) != expected:
            raise AssertionError(
                f"T({p}) coset generation produced {len(reps)}, expected {expected}")
    elif kind == T1P2:
        target = (1, p, p, p * p)
        reps = [r for r in _coset_reps_for_multiplier(p * p)
                if _snf_type(r.full_matrix()) == target]
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    return HeckeOperator(kind=kind, p=p, reps=tuple(reps))


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def dump_coset_reps(op: HeckeOperator) -> str:
    """4x4 integer rows, one blank line between reps (audit format)."""
    blocks = []
    for rep in op.reps:
        rows = rep.full_matrix()
        blocks.append("\n".join(" ".join(str(x) for x in row) for row in rows))
    return "\n\n".join(blocks) + "\n"


class InsufficientTruncation(ValueError):
    pass


def apply(op: HeckeOperator, f: FourierExpansion, k: int | None = None) -> FourierExpansion:
    """f | op as an exact expansion on the reachable determinant bound."""
    k = f.k if k is None else k
    m = op.multiplier
    bound4 = f.det_bound4 // (m * m)
    if bound4 < 1:
        raise InsufficientTruncation(
            f"input reaches 4det = {f.det_bound4}; applying {op.kind} at p = {op.p} "
            f"needs at least 4det = {m * m}")
    out = {}
    for key in f.support_keys(bound4):
        acc = RootOfUnitySum()
        for rep in op.reps:
            (a1, c), (_, a2) = rep.a
            q = a1 * a2
            # source key T_i = m * A^-t T A^-1 = (m/q^2) * (adj A)^t T (adj A)
            adj_t = ((a2, 0), (-c, a1))  # rows of (adj A)^t
            tt = key.transform(adj_t)
            if (m * tt.a) % (q * q) or (m * tt.b) % (q * q) or (m * tt.c) % (q * q):
                continue
            src = QuadForm(m * tt.a // (q * q), m * tt.b // (q * q), m * tt.c // (q * q))
            coeff = f.coefficient(src)
            if coeff == 0:
                continue
            # factor lambda^k det(D)^-k = (q/m)^k; phase e(tr(T_i B D^-1))
            phase_num, phase_den = _phase_fraction(src, rep)
            acc.add(coeff * Fraction(q, m) ** k, phase_num, phase_den)
        val = acc.as_rational()
        if val != 0:
            out[key] = val
    label = f"{f.label}|{op.kind}{op.p}" if f.label else ""
    return FourierExpansion(f.k, f.level, Fraction(bound4, 4), out, label=label)


def _phase_fraction(src: QuadForm, rep: CosetRep):
    """tr(T_i B D^-1) as an exact fraction (numerator, denominator)."""
    (a1, c), (_, a2) = rep.a
    b = rep.b
    m = rep.m
    # D^-1 = A^t / m; compute 2*T_i as integer matrix to avoid half-integers
    t2 = ((2 * src.a, src.b), (src.b, 2 * src.c))
    # X = B * A^t
    at = ((a1, 0), (c, a2))
    x = tuple(tuple(sum(b[r][i] * at[i][col] for i in range(2)) for col in range(2))
              for r in range(2))
    # tr(T_i X)/m = tr(t2 X) / (2m)
    tr2 = sum(t2[r][i] * x[i][r] for r in range(2) for i in range(2))
    return tr2, 2 * m


class NotAnEigenform(ValueError):
    pass


def eigenvalue(f: FourierExpansion, kind: str, p: int, k: int | None = None) -> Fraction:
    """Exact eigenvalue, verified identical across every testable key."""
    op = coset_reps(kind, p)
    g = apply(op, f, k)
    ratio = None
    witnesses = 0
    for key in g.support_keys():
        denom = f.coefficient(key)
        if denom == 0:
            if g.coefficient(key) != 0:
                raise NotAnEigenform(
                    f"{f.label or 'form'} has a(T)=0 but (f|T)(T)!=0 at {key}")
            continue
        r = g.coefficient(key) / denom
        witnesses += 1
        if ratio is None:
            ratio = r
        elif ratio != r:
            raise NotAnEigenform(
                f"{f.label or 'form'}: eigenvalue ratio differs at {key}: {r} vs {ratio}")
    if ratio is None:
        raise NotAnEigenform("no nonzero coefficient available within the bound")
    if witnesses < 1:
        raise NotAnEigenform("no testable keys")
    return ratio


# ------------------------------------------------------------------- Satake

@dataclass(frozen=True)
class SatakeParams:
    a: complex
    b: complex

    def as_tuple(self):
        return (self.a, self.b)

    def alphas(self):
        """Spin local parameters (a, 1/a, b, 1/b)."""
        return (self.a, 1 / self.a, self.b, 1 / self.b)


def weyl_orbit(a: complex, b: complex):
    """All 8 images under the Weyl group of (a, b)."""
    out = []
    for x in (a, 1 / a):
        for y in (b, 1 / b):
            out.append((x, y))
            out.append((y, x))
    return out


def weyl_canonicalize(a: complex, b: complex, tol: float = 1e-12) -> SatakeParams:
    """Canonical Weyl-orbit representative.

    Inversion rules put each coordinate at modulus >= 1 (for unit modulus,
    inversion is conjugation, which pins the argument into [0, pi]); the swap
    then orders |a| <= |b|, remaining ties broken lexicographically by
    (|a|, arg a, arg b).  The SK orbit lands on (e^(i theta), sqrt p).
    """
    if a == 0 or b == 0:
        raise ValueError("Satake parameters must be nonzero")
    eligible = [(x, y) for x, y in weyl_orbit(a, b)
                if abs(x) >= 1 - tol and abs(y) >= 1 - tol
                and abs(x) <= abs(y) + tol]
    assert eligible, "Weyl orbit has no representative in the canonical cone"

    snap = 1e-9  # coarse grid for tie comparisons, well above float noise

    def arg_key(z):
        ph = cmath.phase(z)  # in (-pi, pi]
        if ph < -tol:
            ph += 2 * math.pi  # negative args sort after [0, pi] ones
        return ph

    def key(xy):
        x, y = xy
        return (round(abs(x) / snap), round(arg_key(x) / snap), round(arg_key(y) / snap))

    x, y = min(eligible, key=key)
    return SatakeParams(x, y)


def sigma_of(a, b):
    return a + b + 1 / a + 1 / b


def tau_of(a, b):
    return 1 + a * b + b / a + a / b + 1 / (a * b)


def satake_from_eigenvalues(lam_p, lam1_p2, k: int, p: int) -> SatakeParams:
    """Satake parameters from exact T(p), T_1(p^2) eigenvalues.

    The eigenvalues here are those of the slash action with the lambda(M)^k
    multiplier factor, under which the similitude center acts trivially (so
    they carry a factor p^(3-k) relative to the common classical tables).
    In this convention the frozen dictionary reads

        sigma(a, b) = p^(-3/2) * lambda(p)
        tau(a, b)   = (lambda_1(p^2) + 1) / p^2

    pinned and cross-validated on twelve exact eigenform data points by
    scripts/freeze_satake_dictionary.py; (a, b) is then recovered from the
    symmetric functions sigma = s1 + s2, tau - 1 = s1 s2 of s_i = x + 1/x.
    """
    sigma, tau = _sigma_tau_from_eigenvalues(lam_p, lam1_p2, k, p)
    # {s1, s2} = roots of z^2 - sigma z + (tau - 1)
    disc = cmath.sqrt(complex(sigma * sigma - 4 * (tau - 1)))
    s1 = (complex(sigma) + disc) / 2
    s2 = (complex(sigma) - disc) / 2
    a = _halve(s1)
    b = _halve(s2)
    params = weyl_canonicalize(a, b)
    limit = math.sqrt(p) * (1 + 1e-8)
    if not (0 < abs(params.a) <= limit and 0 < abs(params.b) <= limit):
        raise ValueError(
            f"Satake parameters out of the classification range: {params}")
    return params


def _halve(s):
    """Solve a + 1/a = s, returning the root with |a| <= 1."""
    disc = cmath.sqrt(s * s - 4)
    r1 = (s + disc) / 2
    r2 = (s - disc) / 2
    return r1 if abs(r1) <= abs(r2) else r2


def _sigma_tau_from_eigenvalues(lam_p, lam1_p2, k, p):
    sigma = float(lam_p) * p ** -1.5
    tau = float((Fraction(lam1_p2) + 1) / (p * p))
    return sigma, tau


def satake_of_form(f: FourierExpansion, p: int) -> SatakeParams:
    """Satake parameters of a stored eigenform at p, via exact eigenvalues."""
    lam = eigenvalue(f, TP, p)
    lam1 = eigenvalue(f, T1P2, p)
    return satake_from_eigenvalues(lam, lam1, f.k, p)
