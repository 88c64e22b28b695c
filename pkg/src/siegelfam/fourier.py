"""Truncated Fourier expansions of degree-2 Siegel cusp forms.

Coefficients are exact rationals keyed on GL2(Z)-reduced positive definite
forms (even weight makes a(T; f) a GL2-class function).  A missing key inside
the stored determinant bound means the coefficient is zero; a lookup beyond
the bound is a hard error, never a silent zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import volumes
from .quadform import QuadForm, gl2_reduce

GAMMA_HALF_LOG = 0.5 * math.log(math.pi)


class TruncationError(LookupError):
    """Lookup outside the stored determinant bound."""


class FormatError(ValueError):
    """Malformed expansion file."""


def canonical_key(t: QuadForm) -> QuadForm:
    return gl2_reduce(t)


class FourierExpansion:
    def __init__(self, k, level, det_bound, coeffs, label=""):
        if k % 2 or k < 4:
            raise ValueError(f"weight must be even and >= 4, got {k}")
        if level < 1:
            raise ValueError("level must be positive")
        self.k = k
        self.level = level
        self._bound4 = int(4 * Fraction(det_bound))
        if self._bound4 < 1:
            raise ValueError("determinant bound must be positive")
        self.label = label
        self.coeffs = {}
        for key, val in coeffs.items():
            if canonical_key(key) != key:
                raise ValueError(f"key {key} is not GL2-reduced")
            if key.det4 > self._bound4:
                raise ValueError(f"key {key} has det beyond the stored bound")
            val = Fraction(val)
            if val != 0:
                self.coeffs[key] = val

    @property
    def det_bound(self) -> Fraction:
        return Fraction(self._bound4, 4)

    @property
    def det_bound4(self) -> int:
        return self._bound4

    def coefficient(self, t: QuadForm) -> Fraction:
        """a(T; f) for any positive definite semi-integral T within the bound."""
        if t.det4 > self._bound4:
            raise TruncationError(
                f"det(T) = {t.det4}/4 exceeds stored bound {self._bound4}/4"
                f" for {self.label or 'expansion'}")
        return self.coeffs.get(canonical_key(t), Fraction(0))

    def keys(self):
        return sorted(self.coeffs)

    def support_keys(self, bound4=None):
        """All reduced keys with det4 <= bound4 (default: the stored bound)."""
        bound4 = self._bound4 if bound4 is None else bound4
        return reduced_keys_up_to(bound4)

    def restrict(self, det_bound) -> "FourierExpansion":
        b4 = int(4 * Fraction(det_bound))
        if b4 > self._bound4:
            raise TruncationError("cannot extend an expansion by restriction")
        kept = {key: v for key, v in self.coeffs.items() if key.det4 <= b4}
        return FourierExpansion(self.k, self.level, Fraction(b4, 4), kept, self.label)

    def scaled(self, scalar) -> "FourierExpansion":
        scalar = Fraction(scalar)
        return FourierExpansion(
            self.k, self.level, self.det_bound,
            {key: scalar * v for key, v in self.coeffs.items()}, self.label)

    def __eq__(self, other):
        return (isinstance(other, FourierExpansion)
                and self.k == other.k and self.level == other.level
                and self._bound4 == other._bound4 and self.coeffs == other.coeffs)

    def __repr__(self):
        return (f"FourierExpansion(k={self.k}, N={self.level}, "
                f"detBound={self.det_bound}, {len(self.coeffs)} coeffs, "
                f"label={self.label!r})")


def reduced_keys_up_to(bound4: int):
    """All GL2-reduced positive definite keys with 4*det <= bound4."""
    out = []
    amax = int(math.isqrt(bound4 // 3)) + 1
    for a in range(1, amax + 1):
        for b in range(0, a + 1):
            cmin = a
            c = cmin
            while True:
                det4 = 4 * a * c - b * b
                if det4 > bound4:
                    break
                if det4 > 0 and c >= a:
                    out.append(QuadForm(a, b, c))
                c += 1
    return sorted(out, key=lambda f: (f.det4, f.a, f.b, f.c))


def linear_combine(terms) -> FourierExpansion:
    """Pointwise sum of scalar * expansion over matching weight and level."""
    terms = list(terms)
    if not terms:
        raise ValueError("empty combination")
    k = terms[0][1].k
    level = terms[0][1].level
    for _, f in terms:
        if f.k != k or f.level != level:
            raise ValueError("mismatched weight or level in linear combination")
    bound4 = min(f.det_bound4 for _, f in terms)
    out = {}
    for scalar, f in terms:
        scalar = Fraction(scalar)
        for key, val in f.coeffs.items():
            if key.det4 <= bound4:
                out[key] = out.get(key, Fraction(0)) + scalar * val
    out = {key: v for key, v in out.items() if v != 0}
    return FourierExpansion(k, level, Fraction(bound4, 4), out)


@dataclass(frozen=True)
class PeterssonConstant:
    k: int
    level: int
    det_q: Fraction
    value: float


def petersson_pairing_constant(k: int, level: int, q: QuadForm) -> PeterssonConstant:
    """The scalar G with <G_{Q,N,k}, f> = G * conj(a(Q; f)).

    G = 2/vol(Gamma_0(N)\\H_2) * sqrt(pi) (4 pi)^(3-2k)
        * Gamma(k - 3/2) Gamma(k - 2) * det(Q)^(3/2 - k).
    """
    if k % 2 or k < 6:
        raise ValueError("weight must be even and >= 6")
    det_q = Fraction(q.det4, 4)
    log_val = (math.log(2) - math.log(volumes.volume(level))
               + GAMMA_HALF_LOG + (3 - 2 * k) * math.log(4 * math.pi)
               + math.lgamma(k - 1.5) + math.lgamma(k - 2)
               + (1.5 - k) * math.log(float(det_q)))
    return PeterssonConstant(k, level, det_q, math.exp(log_val))


def _format_value(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def save(f: FourierExpansion, path) -> None:
    lines = [f"# k={f.k}", f"# N={f.level}", f"# detBound={_format_value(f.det_bound)}"]
    if f.label:
        lines.append(f"# label={f.label}")
    for key in f.keys():
        lines.append(f"{key} : {_format_value(f.coeffs[key])}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load(path) -> FourierExpansion:
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
            if ":" not in line:
                raise FormatError(f"{path}:{lineno}: expected 'a b c : value'")
            left, _, right = line.partition(":")
            try:
                key = QuadForm.parse(left.strip())
            except (ValueError, TypeError) as exc:
                raise FormatError(f"{path}:{lineno}: bad key: {exc}") from exc
            try:
                val = Fraction(right.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise FormatError(f"{path}:{lineno}: bad value: {exc}") from exc
            if not key.is_positive_definite():
                raise FormatError(f"{path}:{lineno}: key {key} not positive definite")
            if canonical_key(key) != key:
                raise FormatError(f"{path}:{lineno}: key {key} is not reduced")
            if key in coeffs:
                raise FormatError(f"{path}:{lineno}: duplicate key {key}")
            coeffs[key] = val
    for field in ("k", "N", "detBound"):
        if field not in header:
            raise FormatError(f"{path}: missing header field {field!r}")
    try:
        k = int(header["k"])
        level = int(header["N"])
        bound = Fraction(header["detBound"])
    except ValueError as exc:
        raise FormatError(f"{path}: bad header value: {exc}") from exc
    bound4 = int(4 * bound)
    for key in coeffs:
        if key.det4 > bound4:
            raise FormatError(f"{path}: key {key} has det beyond detBound")
    return FourierExpansion(k, level, bound, coeffs, header.get("label", ""))
