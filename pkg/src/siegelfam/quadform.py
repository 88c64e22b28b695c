"""Positive definite semi-integral 2x2 matrices as binary quadratic forms.

A triple (a, b, c) stands for the matrix [[a, b/2], [b/2, c]], so det = (4ac -
b^2)/4 and disc = b^2 - 4ac.  A unimodular U acts by T -> U T U^t; Fourier
coefficients of even-weight forms are class functions for this action, which
is why everything downstream keys on reduced representatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .intlinalg import smith_normal_form, mat_inv_unimodular, mat_mul


@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if not all(isinstance(x, int) for x in (self.a, self.b, self.c)):
            raise TypeError("QuadForm entries must be integers")

    @property
    def disc(self):
        return self.b * self.b - 4 * self.a * self.c

    @property
    def det4(self):
        """4*det(T) = 4ac - b^2, always an integer for semi-integral T."""
        return 4 * self.a * self.c - self.b * self.b

    @property
    def det(self):
        return Fraction(self.det4, 4)

    def is_positive_definite(self):
        return self.a > 0 and self.det4 > 0

    def value(self, x, y):
        """T[(x, y)] = a x^2 + b x y + c y^2."""
        return self.a * x * x + self.b * x * y + self.c * y * y

    def bilinear2(self, u, v):
        """2 * u T v^t for integer row vectors u, v (always an integer)."""
        return (2 * self.a * u[0] * v[0] + self.b * (u[0] * v[1] + u[1] * v[0])
                + 2 * self.c * u[1] * v[1])

    def transform(self, u):
        """U T U^t for U = ((u11, u12), (u21, u22))."""
        (u11, u12), (u21, u22) = u
        a = self.value(u11, u12)
        c = self.value(u21, u22)
        b = self.bilinear2((u11, u12), (u21, u22))
        return QuadForm(a, b, c)

    def scale(self, n):
        return QuadForm(n * self.a, n * self.b, n * self.c)

    def divide_exact(self, n):
        if self.a % n or self.b % n or self.c % n:
            raise ValueError(f"{self} not divisible by {n}")
        return QuadForm(self.a // n, self.b // n, self.c // n)

    def __str__(self):
        return f"{self.a} {self.b} {self.c}"

    @classmethod
    def parse(cls, text):
        parts = text.split()
        if len(parts) != 3:
            raise ValueError(f"expected 'a b c', got {text!r}")
        return cls(*map(int, parts))


@dataclass(frozen=True)
class UnimodularTransform:
    m: tuple  # ((u11, u12), (u21, u22))

    def __post_init__(self):
        if self.det not in (1, -1):
            raise ValueError("transform must have determinant +-1")

    @property
    def det(self):
        (a, b), (c, d) = self.m
        return a * d - b * c

    def compose(self, other):
        """self after other: (self.compose(other)).apply(f) = self(other(f))."""
        return UnimodularTransform(tuple(tuple(r) for r in mat_mul(
            [list(r) for r in self.m], [list(r) for r in other.m])))

    def apply(self, f: QuadForm) -> QuadForm:
        return f.transform(self.m)


IDENTITY_TRANSFORM = UnimodularTransform(((1, 0), (0, 1)))


class NotPositiveDefinite(ValueError):
    pass


def reduce(f: QuadForm):
    """Gauss-reduced representative and the SL2(Z) transform realizing it.

    Reduced means |b| <= a <= c with b >= 0 whenever |b| = a or a = c.
    Returns (reduced, U) with U f U^t = reduced and det U = 1.
    """
    if not f.is_positive_definite():
        raise NotPositiveDefinite(f"form {f} is not positive definite")
    a, b, c = f.a, f.b, f.c
    u = ((1, 0), (0, 1))

    def lmul(m, u):
        return (
            (m[0][0] * u[0][0] + m[0][1] * u[1][0], m[0][0] * u[0][1] + m[0][1] * u[1][1]),
            (m[1][0] * u[0][0] + m[1][1] * u[1][0], m[1][0] * u[0][1] + m[1][1] * u[1][1]),
        )

    while True:
        # normalize b into (-a, a]:  T -> U T U^t with U = [[1, 0], [r, 1]]
        # sends (a, b, c) to (a, b + 2ra, c + rb + r^2 a)
        if not (-a < b <= a):
            r = (a - b) // (2 * a)  # unique r with b + 2ra in (-a, a]
            a, b, c = a, b + 2 * r * a, c + r * b + r * r * a
            u = lmul(((1, 0), (r, 1)), u)
        if a > c:
            # swap: U = [[0, 1], [-1, 0]] sends (a, b, c) to (c, -b, a)
            a, b, c = c, -b, a
            u = lmul(((0, 1), (-1, 0)), u)
            continue
        break
    if b < 0 and (a == c or b == -a):
        # b = -a is excluded by the normalization; only a == c can happen here
        a, b, c = c, -b, a
        u = lmul(((0, 1), (-1, 0)), u)
    return QuadForm(a, b, c), UnimodularTransform(u)


def gl2_reduce(f: QuadForm) -> QuadForm:
    """Representative of the GL2(Z)-class: the SL2-reduced form with b >= 0."""
    r, _ = reduce(f)
    return QuadForm(r.a, abs(r.b), r.c)


def content(f: QuadForm) -> int:
    if f.a == 0 and f.b == 0 and f.c == 0:
        raise ValueError("content of the zero form")
    return gcd(gcd(abs(f.a), abs(f.b)), abs(f.c))


def scale_LM(q: QuadForm, L: int, M: int) -> QuadForm:
    """diag(L,L) diag(M,1) Q diag(M,1): (a,b,c) -> (L M^2 a, L M b, L c)."""
    return QuadForm(L * M * M * q.a, L * M * q.b, L * q.c)


def representations(f: QuadForm, n: int):
    """All integer (x, y) with f(x, y) = n, for positive definite f and n >= 0."""
    if not f.is_positive_definite():
        raise NotPositiveDefinite(str(f))
    if n < 0:
        return []
    if n == 0:
        return [(0, 0)]
    out = []
    # 4a*f(x,y) = (2ax + by)^2 + det4 * y^2
    ymax = isqrt(4 * f.a * n // f.det4)
    for y in range(-ymax, ymax + 1):
        rest = 4 * f.a * n - f.det4 * y * y
        if rest < 0:
            continue
        s = isqrt(rest)
        if s * s != rest:
            continue
        for sign in ((s,) if s == 0 else (s, -s)):
            num = sign - f.b * y
            if num % (2 * f.a) == 0:
                out.append((num // (2 * f.a), y))
    return out


def automorphism_count(q: QuadForm, t: QuadForm) -> int:
    """delta(T, Q) = #{U in GL2(Z) : U Q U^t = T}."""
    if not (q.is_positive_definite() and t.is_positive_definite()):
        raise NotPositiveDefinite("automorphism_count needs positive definite forms")
    if q.det4 != t.det4:
        return 0
    count = 0
    rows1 = representations(q, t.a)
    rows2 = representations(q, t.c)
    for u1 in rows1:
        for u2 in rows2:
            if q.bilinear2(u1, u2) == t.b:
                # det condition is automatic: equal determinants force det U = +-1
                count += 1
    return count


def is_fundamental(d: int) -> bool:
    """-d a fundamental discriminant (d > 0)."""
    if d <= 0:
        return False
    if d % 4 == 3:
        return _squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (1, 2) and _squarefree(m)
    return False


def _squarefree(n):
    i = 2
    while i * i <= n:
        if n % (i * i) == 0:
            return False
        i += 1
    return True


def reduced_forms(disc: int, primitive_only=True):
    """All reduced positive definite forms of discriminant disc < 0."""
    if disc >= 0:
        raise ValueError("need a negative discriminant")
    out = []
    d = -disc
    amax = isqrt(d // 3)
    for a in range(1, amax + 1):
        for b in range(-a, a + 1):
            if (b * b - disc) % (4 * a) != 0:
                continue
            c = (b * b - disc) // (4 * a)
            if c < a:
                continue
            if b < 0 and (a == c or b == -a):
                continue
            f = QuadForm(a, b, c)
            if primitive_only and content(f) != 1:
                continue
            out.append(f)
    return sorted(out)


def _principal_form(disc: int) -> QuadForm:
    if disc % 4 == 0:
        return QuadForm(1, 0, -disc // 4)
    return QuadForm(1, 1, (1 - disc) // 4)


def _equivalent_with_coprime_a(f: QuadForm, m: int) -> QuadForm:
    """A form properly equivalent to f whose first coefficient is coprime to m."""
    bound = 1
    while True:
        for x in range(-bound, bound + 1):
            for y in range(-bound, bound + 1):
                if gcd(x, y) != 1:
                    continue
                if gcd(f.value(x, y), m) == 1:
                    # complete (x, y) to an SL2 matrix acting on the left
                    g, u, v = _xgcd(x, y)
                    if g < 0:
                        g, u, v = -g, -u, -v
                    assert g == 1
                    mat = ((x, y), (-v, u))
                    return f.transform(mat)
        bound += 1
        if bound > 64:
            raise RuntimeError("no coprime representative found (should not happen)")


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Dirichlet composition of primitive forms of equal discriminant."""
    if f.disc != g.disc:
        raise ValueError("composition needs equal discriminants")
    disc = f.disc
    g = _equivalent_with_coprime_a(g, 2 * f.a * disc)
    a1, b1 = f.a, f.b
    a2, b2 = g.a, g.b
    assert gcd(a1, a2) == 1
    # CRT: B = b1 mod 2a1, B = b2 mod 2a2 (solvable: b1 = b2 = disc mod 2)
    g_, u, v = _xgcd(2 * a1, 2 * a2)
    assert (b2 - b1) % g_ == 0
    lcm = 2 * a1 * a2 * 2 // g_
    b = (b1 + 2 * a1 * u * ((b2 - b1) // g_)) % lcm
    a = a1 * a2
    assert (b * b - disc) % (4 * a) == 0
    comp = QuadForm(a, b, (b * b - disc) // (4 * a))
    red, _ = reduce(comp)
    return red


def form_inverse(f: QuadForm) -> QuadForm:
    red, _ = reduce(QuadForm(f.a, -f.b, f.c))
    return red


class ClassGroupCharacter:
    """Character of the class group, with exact root-of-unity values.

    exponents[f] is a Fraction q with value(f) = exp(2*pi*i*q).
    """

    def __init__(self, exponents):
        self.exponents = exponents

    def value(self, f: QuadForm) -> complex:
        import cmath
        q = self.exponents[f]
        return cmath.exp(2j * cmath.pi * float(q))

    def exponent(self, f: QuadForm) -> Fraction:
        return self.exponents[f]

    @property
    def order(self):
        from math import lcm
        dens = [q.denominator for q in self.exponents.values()]
        return lcm(*dens) if dens else 1

    def is_real(self):
        return self.order <= 2

    def conjugate(self):
        return ClassGroupCharacter({f: -q for f, q in self.exponents.items()})


class ClassGroupData:
    """Class group of Q(sqrt(-d)) as reduced primitive forms of disc -d."""

    def __init__(self, d: int):
        if not is_fundamental(d):
            raise ValueError(f"-{d} is not a fundamental discriminant")
        self.d = d
        self.disc = -d
        self.elements = reduced_forms(self.disc)
        self.identity = _principal_form(self.disc)
        idx = {f: i for i, f in enumerate(self.elements)}
        n = len(self.elements)
        self.table = [[idx[compose(f, g)] for g in self.elements] for f in self.elements]
        self.index = idx
        self.characters = self._characters()
        if d == 3:
            self.w = 6
        elif d == 4:
            self.w = 4
        else:
            self.w = 2

    @property
    def h(self):
        return len(self.elements)

    def compose(self, f, g):
        return self.elements[self.table[self.index[f]][self.index[g]]]

    def inverse(self, f):
        return form_inverse(f)

    def _characters(self):
        n = len(self.elements)
        id_i = self.index[self.identity]
        # relations e_i + e_j - e_{ij} = 0 and e_identity = 0 generate the
        # full relation lattice of the group on the generators (all elements)
        cols = []
        for i in range(n):
            for j in range(i, n):
                rel = [0] * n
                rel[i] += 1
                rel[j] += 1
                rel[self.table[i][j]] -= 1
                cols.append(rel)
        rel = [0] * n
        rel[id_i] = 1
        cols.append(rel)
        mat = [[cols[c][r] for c in range(len(cols))] for r in range(n)]
        dmat, u, _v = smith_normal_form(mat)
        diag = [dmat[i][i] if i < min(len(dmat), len(dmat[0])) else 0 for i in range(n)]
        chars = []

        def char_values(kvec):
            vals = {}
            for j, f in enumerate(self.elements):
                q = Fraction(0)
                for i in range(n):
                    if diag[i] not in (0, 1):
                        # coordinate of e_j in the SNF basis is row i of U
                        q += Fraction(kvec[i] * u[i][j], diag[i])
                vals[f] = q - (q.numerator // q.denominator)  # fractional part
            return vals

        free = [i for i in range(n) if diag[i] not in (0, 1)]
        ranges = [diag[i] for i in free]

        def gen(idx, cur):
            if idx == len(free):
                kvec = [0] * n
                for pos, i in enumerate(free):
                    kvec[i] = cur[pos]
                chars.append(ClassGroupCharacter(char_values(kvec)))
                return
            for t in range(ranges[idx]):
                gen(idx + 1, cur + [t])

        gen(0, [])
        assert len(chars) == n, (len(chars), n)
        return chars

    def trivial_character(self):
        return next(ch for ch in self.characters
                    if all(q == 0 for q in ch.exponents.values()))

    def d_lambda(self, character) -> int:
        """1 if the character squares to the trivial one, else 2."""
        return 1 if character.order <= 2 else 2

    def dump_table(self):
        lines = []
        for i, f in enumerate(self.elements):
            row = " ".join(str(x) for x in self.table[i])
            lines.append(f"{i}\t{f}\t{row}")
        return "\n".join(lines)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a / n)."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -sign
    # factor out 2s from n
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 == 1 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    # Jacobi symbol (a / n) for odd n > 0
    result = sign
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def splitting_type(d: int, p: int) -> str:
    """'split', 'inert' or 'ramified' for p in Q(sqrt(-d)), -d fundamental."""
    chi = kronecker(-d, p)
    if chi == 1:
        return "split"
    if chi == -1:
        return "inert"
    return "ramified"


def prime_form(d: int, p: int) -> QuadForm:
    """A form (p, b, c) of discriminant -d representing a prime ideal above p."""
    for b in range(0, 2 * p):
        if (b * b + d) % (4 * p) == 0:
            return QuadForm(p, b, (b * b + d) // (4 * p))
    raise ValueError(f"no prime ideal of norm {p} for discriminant -{d}")


def lambda_p(cg: ClassGroupData, character: ClassGroupCharacter, p: int) -> float:
    """lambda_p = sum of the character over prime ideals of norm p (always real)."""
    typ = splitting_type(cg.d, p)
    if typ == "inert":
        return 0.0
    pf = prime_form(cg.d, p)
    red, _ = reduce(pf)
    val = character.value(red)
    if typ == "ramified":
        return float(val.real)  # ideal class has order <= 2, value is +-1
    conj_val = character.value(form_inverse(red))
    return float((val + conj_val).real)
