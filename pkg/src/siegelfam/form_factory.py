"""Ground-truth level-1 forms and ingestion of external coefficient data.

The weight-10 and weight-12 cusp forms are produced through the classical
lift chain: Cohen's H function gives the index-1 Jacobi-Eisenstein series,
whose products with elliptic Eisenstein series span the index-1 Jacobi cusp
forms; reading those through the plus-space coordinate D = 4n - r^2 and
applying the divisor-sum lift a(T) = sum_{e | cont(T)} e^(k-1) c(4 det T/e^2)
yields exact rational Siegel Fourier coefficients, normalized so that
a((1,1,1)) = 1.  The degree-2 Siegel Eisenstein series (same H-function data)
is kept as an independent cross-check route.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .fourier import FormatError, FourierExpansion, reduced_keys_up_to
from .quadform import QuadForm, content, is_fundamental, kronecker

EISENSTEIN_WEIGHTS = (4, 6, 10, 12)


# ---------------------------------------------------------------- Bernoulli

@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(-1, 2)
    if n % 2:
        return Fraction(0)
    # B_n = -1/(n+1) * sum_{j<n} C(n+1, j) B_j
    total = Fraction(0)
    for j in range(n):
        total += Fraction(_binom(n + 1, j)) * bernoulli(j)
    return -total / (n + 1)


def _binom(n, k):
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


def zeta_negative_odd(s: int) -> Fraction:
    """zeta(s) for s a negative odd integer: -B_{1-s}/(1-s)."""
    assert s < 0 and s % 2 == 1
    n = 1 - s
    return -bernoulli(n) / n


@lru_cache(maxsize=None)
def generalized_bernoulli(r: int, disc: int) -> Fraction:
    """B_{r, chi} for chi the Kronecker character of a fundamental discriminant."""
    n = abs(disc)
    # power sums S_j = sum_a chi(a) a^j, then
    # B_{r,chi} = sum_i C(r,i) B_i N^{i-1} S_{r-i}
    chi = [kronecker(disc, a) for a in range(n)]
    powers = [1] * n
    s = [0] * (r + 1)
    s[0] = sum(chi)
    for j in range(1, r + 1):
        for a in range(n):
            powers[a] *= a
        s[j] = sum(c * p for c, p in zip(chi, powers))
    total = Fraction(0)
    for i in range(r + 1):
        total += _binom(r, i) * bernoulli(i) * Fraction(n) ** (i - 1) * s[r - i]
    return total


def dirichlet_L_negative(r: int, disc: int) -> Fraction:
    """L(1-r, chi_disc) = -B_{r, chi}/r."""
    return -generalized_bernoulli(r, disc) / r


def _fundamental_part(neg_n: int):
    """Write neg_n < 0 as D0 * f^2 with D0 a fundamental discriminant."""
    n = -neg_n
    f = 1
    for g in range(isqrt(n), 0, -1):
        if n % (g * g) == 0 and is_fundamental(n // (g * g)):
            f = g
            break
    d0 = -(n // (f * f))
    assert is_fundamental(-d0)
    return d0, f


def _mu(n):
    out = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            out = -out
        d += 1
    if n > 1:
        out = -out
    return out


def _divisors(n):
    out = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(out + [n // d for d in out]))


def _sigma(k, n):
    return sum(d ** k for d in _divisors(n))


@lru_cache(maxsize=None)
def cohen_H(r: int, n: int) -> Fraction:
    """Cohen's class-number function H(r, N) for odd r >= 1, N >= 0."""
    if n == 0:
        return zeta_negative_odd(1 - 2 * r)
    if (-n) % 4 not in (0, 1):
        return Fraction(0)
    d0, f = _fundamental_part(-n)
    total = Fraction(0)
    for d in _divisors(f):
        m = _mu(d)
        if m == 0:
            continue
        total += m * kronecker(d0, d) * d ** (r - 1) * _sigma(2 * r - 1, f // d)
    return dirichlet_L_negative(r, d0) * total


# ------------------------------------------------------- elliptic expansions

def elliptic_eisenstein(k: int, nmax: int):
    """q-expansion of E_k on SL2(Z), coefficients as Fractions, n <= nmax."""
    factor = Fraction(-2 * k) / bernoulli(k)
    return [Fraction(1)] + [factor * _sigma(k - 1, n) for n in range(1, nmax + 1)]


def _series_mul(a, b, nmax):
    out = [Fraction(0)] * (nmax + 1)
    for i, ai in enumerate(a[: nmax + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: nmax + 1 - i]):
            if bj:
                out[i + j] += ai * bj
    return out


def delta_series(nmax: int):
    """q-expansion of the discriminant cusp form Delta = (E4^3 - E6^2)/1728."""
    e4 = elliptic_eisenstein(4, nmax)
    e6 = elliptic_eisenstein(6, nmax)
    e43 = _series_mul(_series_mul(e4, e4, nmax), e4, nmax)
    e62 = _series_mul(e6, e6, nmax)
    return [(a - b) / 1728 for a, b in zip(e43, e62)]


def newform_qexp(weight: int, nmax: int):
    """The unique level-1 newform of the given weight (18 or 22), exact."""
    if weight == 18:
        return _series_mul(delta_series(nmax), elliptic_eisenstein(6, nmax), nmax)
    if weight == 22:
        e10 = _series_mul(elliptic_eisenstein(4, nmax), elliptic_eisenstein(6, nmax), nmax)
        return _series_mul(delta_series(nmax), e10, nmax)
    raise ValueError(f"no generated newform of weight {weight}")


# --------------------------------------------------------------- data types

@dataclass
class EllipticFormData:
    """Newform data of weight 2k-2: coefficients and optional analytic inputs."""
    weight: int
    level: int
    coeffs: dict  # n -> Fraction, with coeffs[1] == 1
    atkin_lehner: dict = field(default_factory=dict)  # p | level -> +-1
    petersson_norm: float | None = None
    l_value_sym: float | None = None      # L(1, pi_g)
    l_value_twist: float | None = None    # L(1/2, pi_g x chi_D)
    label: str = ""

    def __post_init__(self):
        if self.coeffs.get(1) != 1:
            raise ValueError("newform data must be normalized with a(1) = 1")

    def coefficient(self, n):
        if n not in self.coeffs:
            raise KeyError(f"elliptic coefficient a({n}) beyond stored bound")
        return self.coeffs[n]

    @property
    def bound(self):
        return max(self.coeffs)

    def deligne_check(self):
        """|a(p)| <= 2 p^((w-1)/2) for stored primes (spot check)."""
        w = self.weight
        for n, a in self.coeffs.items():
            if n > 1 and all(n % q for q in range(2, n)) and n > 1:
                if float(abs(a)) > 2.0000001 * n ** ((w - 1) / 2):
                    return False
        return True


@dataclass
class PlusSpaceData:
    """Plus-space coefficients c(n) for n = 0, 3 mod 4 (weight k - 1/2)."""
    k: int
    coeffs: dict  # n -> Fraction, keys = 0, 3 mod 4 only
    label: str = ""

    def __post_init__(self):
        for n in self.coeffs:
            if n % 4 not in (0, 3):
                raise ValueError(f"plus-space index {n} not 0 or 3 mod 4")
            if n < 0:
                raise ValueError("plus-space indices must be nonnegative")

    def coefficient(self, n):
        if n % 4 not in (0, 3):
            return Fraction(0)
        if n > self.bound:
            raise KeyError(f"plus-space coefficient c({n}) beyond stored bound")
        return self.coeffs.get(n, Fraction(0))

    @property
    def bound(self):
        return max(self.coeffs)


# ----------------------------------------------------- Jacobi/plus-space data

def _jacobi_eisenstein_plus(k: int, dmax: int):
    """c(D) of the index-1 Jacobi-Eisenstein series E_{k,1}: H(k-1,D)/H(k-1,0)."""
    h0 = cohen_H(k - 1, 0)
    return {d: cohen_H(k - 1, d) / h0 for d in range(dmax + 1) if (-d) % 4 in (0, 1)}


def plus_space_form(k: int, dmax: int) -> PlusSpaceData:
    """Plus-space generator for weight k - 1/2, k in {10, 12} (1-dim spaces).

    Built from the Eichler-Zagier index-1 Jacobi cusp forms
    phi_{10,1} = (E_6 E_{4,1} - E_4 E_{6,1})/144 and
    phi_{12,1} = (E_4^2 E_{4,1} - E_6 E_{6,1})/144,
    normalized so that c(3) = 1.
    """
    if k not in (10, 12):
        raise ValueError(f"plus-space generator implemented for k in (10, 12), not {k}")
    nmax = dmax // 4 + 1
    c4 = _jacobi_eisenstein_plus(4, dmax)
    c6 = _jacobi_eisenstein_plus(6, dmax)
    if k == 10:
        left, right = elliptic_eisenstein(6, nmax), elliptic_eisenstein(4, nmax)
    else:
        e4 = elliptic_eisenstein(4, nmax)
        left, right = _series_mul(e4, e4, nmax), elliptic_eisenstein(6, nmax)
    out = {}
    for d in range(dmax + 1):
        if d % 4 not in (0, 3):
            continue
        total = Fraction(0)
        for j in range(d // 4 + 1):
            if d - 4 * j >= 0:
                total += left[j] * c4.get(d - 4 * j, Fraction(0))
                total -= right[j] * c6.get(d - 4 * j, Fraction(0))
        out[d] = total / 144
    assert out.get(0, Fraction(0)) == 0, "lift input failed the cusp condition"
    assert out[3] == 1, "unexpected normalization of the Jacobi cusp form"
    return PlusSpaceData(k=k, coeffs=out, label=f"plus{k}")


def sk_lift(plus: PlusSpaceData, k: int, det_bound, level: int = 1,
            label: str = "") -> FourierExpansion:
    """Maass lift: a(T) = sum_{e | cont(T)} e^(k-1) c(4 det(T)/e^2)."""
    bound4 = int(4 * Fraction(det_bound))
    if plus.bound < bound4:
        raise ValueError(
            f"plus-space data reaches {plus.bound} < 4*detBound = {bound4}")
    coeffs = {}
    for key in reduced_keys_up_to(bound4):
        total = Fraction(0)
        for e in _divisors(content(key)):
            total += Fraction(e) ** (k - 1) * plus.coefficient(key.det4 // (e * e))
        if total:
            coeffs[key] = total
    return FourierExpansion(k, level, Fraction(bound4, 4), coeffs, label=label)


_IGUSA_CACHE: dict[tuple, FourierExpansion] = {}


def igusa_cusp_forms(det_bound):
    """(chi10, chi12): generators of S_10(1) and S_12(1), a((1,1,1)) = 1."""
    key = int(4 * Fraction(det_bound))
    if key not in _IGUSA_CACHE:
        chi10 = sk_lift(plus_space_form(10, key), 10, Fraction(key, 4), label="chi10")
        chi12 = sk_lift(plus_space_form(12, key), 12, Fraction(key, 4), label="chi12")
        _IGUSA_CACHE[key] = (chi10, chi12)
    return _IGUSA_CACHE[key]


# ------------------------------------------------- degree-2 Eisenstein series

class SiegelEisenstein:
    """Degree-2 Siegel Eisenstein series E_k, all ranks, exact rationals.

    Only the positive definite coefficients enter cusp-form combinations; the
    singular ones are kept so products of Eisenstein series can be formed for
    the cross-check route.
    """

    def __init__(self, k: int, det_bound):
        if k not in EISENSTEIN_WEIGHTS:
            raise ValueError(f"unsupported Eisenstein weight {k}")
        self.k = k
        self.bound4 = int(4 * Fraction(det_bound))
        self.alpha = 2 / (zeta_negative_odd(1 - k) * zeta_negative_odd(3 - 2 * k))
        self._rank1_factor = Fraction(-2 * k) / bernoulli(k)

    def coefficient(self, t: QuadForm) -> Fraction:
        """a(T; E_k) for positive semi-definite semi-integral T."""
        if t.a == 0 and t.b == 0 and t.c == 0:
            return Fraction(1)
        if t.det4 < 0 or t.a < 0 or t.c < 0:
            raise ValueError(f"{t} is not positive semi-definite")
        if t.det4 == 0:
            return self._rank1_factor * _sigma(self.k - 1, content(t))
        total = Fraction(0)
        for d in _divisors(content(t)):
            total += Fraction(d) ** (self.k - 1) * cohen_H(self.k - 1, t.det4 // (d * d))
        return self.alpha * total

    def positive_definite_part(self, level: int = 1) -> FourierExpansion:
        coeffs = {}
        for key in reduced_keys_up_to(self.bound4):
            val = self.coefficient(key)
            if val:
                coeffs[key] = val
        return FourierExpansion(self.k, level, Fraction(self.bound4, 4), coeffs,
                                label=f"E{self.k}")


def eisenstein_series(k: int, det_bound) -> FourierExpansion:
    """Positive definite part of the degree-2 Siegel Eisenstein series."""
    return SiegelEisenstein(k, det_bound).positive_definite_part()


def eisenstein_product_coefficient(factors, t: QuadForm) -> Fraction:
    """a(T; prod E_k) via convolution over T = sum of psd semi-integral parts."""
    if len(factors) == 1:
        return factors[0].coefficient(t)
    head, rest = factors[0], factors[1:]
    total = Fraction(0)
    for part, remainder in _psd_splits(t):
        val = head.coefficient(part)
        if val:
            total += val * eisenstein_product_coefficient(rest, remainder)
    return total


def cusp_times_eisenstein(cusp: FourierExpansion, eis: SiegelEisenstein,
                          det_bound, label: str = "") -> FourierExpansion:
    """Product of a cusp expansion with a Siegel Eisenstein series (cuspidal)."""
    bound4 = int(4 * Fraction(det_bound))
    coeffs = {}
    for key in reduced_keys_up_to(bound4):
        total = Fraction(0)
        for part, remainder in _psd_splits(key):
            if remainder.is_positive_definite():
                val = cusp.coefficient(remainder)
                if val:
                    total += val * eis.coefficient(part)
        if total:
            coeffs[key] = total
    return FourierExpansion(cusp.k + eis.k, cusp.level, Fraction(bound4, 4),
                            coeffs, label=label)


def _psd_splits(t: QuadForm):
    """All (T1, T - T1) with both parts positive semi-definite semi-integral."""
    out = []
    for a1 in range(0, t.a + 1):
        for c1 in range(0, t.c + 1):
            bmax = isqrt(4 * a1 * c1)
            a2, c2 = t.a - a1, t.c - c1
            for b1 in range(-bmax, bmax + 1):
                b2 = t.b - b1
                if b2 * b2 <= 4 * a2 * c2:
                    out.append((QuadForm(a1, b1, c1), QuadForm(a2, b2, c2)))
    return out


# ------------------------------------------------------------------ ingestion

def ingest(path, schema: str):
    """Load 'elliptic', 'plus', or 'fourier' data files with validation."""
    if schema == "fourier":
        from . import fourier
        return fourier.load(path)
    if schema not in ("elliptic", "plus"):
        raise ValueError(f"unknown schema {schema!r}")
    header = {}
    coeffs = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" not in body:
                    raise FormatError(f"{path}:{lineno}: bad header line {line!r}")
                key, _, val = body.partition("=")
                header[key.strip()] = val.strip()
                continue
            left, sep, right = line.partition(":")
            if not sep:
                raise FormatError(f"{path}:{lineno}: expected 'n : value'")
            try:
                n = int(left.strip())
                val = Fraction(right.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from exc
            if n in coeffs:
                raise FormatError(f"{path}:{lineno}: duplicate index {n}")
            coeffs[n] = val
    if schema == "plus":
        for lineno_check in coeffs:
            if lineno_check % 4 not in (0, 3):
                raise FormatError(
                    f"{path}: plus-space index {lineno_check} not 0 or 3 mod 4")
        if "k" not in header:
            raise FormatError(f"{path}: missing header field 'k'")
        return PlusSpaceData(k=int(header["k"]), coeffs=coeffs,
                             label=header.get("label", ""))
    for field_name in ("weight", "level"):
        if field_name not in header:
            raise FormatError(f"{path}: missing header field {field_name!r}")
    if coeffs.get(1) != 1:
        raise FormatError(f"{path}: newform data must have a(1) = 1")
    al = {}
    for key, val in header.items():
        if key.startswith("AL"):
            al[int(key[2:])] = int(val)
    def _opt(name):
        return float(header[name]) if name in header else None
    return EllipticFormData(
        weight=int(header["weight"]), level=int(header["level"]), coeffs=coeffs,
        atkin_lehner=al, petersson_norm=_opt("petersson_norm"),
        l_value_sym=_opt("L1"), l_value_twist=_opt("Lhalf_twist"),
        label=header.get("label", ""))


def elliptic_form_from_generated(weight: int, bound: int, label: str = "") -> EllipticFormData:
    """EllipticFormData for the unique level-1 newform of weight 18 or 22."""
    series = newform_qexp(weight, bound)
    coeffs = {n: series[n] for n in range(1, bound + 1)}
    return EllipticFormData(weight=weight, level=1, coeffs=coeffs,
                            label=label or f"f{weight}")
