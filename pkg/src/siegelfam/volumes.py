"""Volume of Gamma_0(N)\\H_2 and the index [Sp4(Z) : Gamma_0(N)].

The base volume vol(Sp4(Z)\\H_2) for the measure det(Y)^{-3} dX dY is
Siegel's value 2 * prod_{j=1,2} pi^{-j} Gamma(j) zeta(2j) = pi^3 / 270
(see scripts/siegel_volume_constant.py for an independent high-precision
evaluation).  The index of the Siegel congruence subgroup equals the number
of Lagrangian planes in F_p^4, prod_{p | N} (p+1)(p^2+1) for squarefree N;
for N = 2 this is cross-checked by enumerating Sp4(F_2) directly.
"""

from __future__ import annotations

import math
from functools import lru_cache

SIEGEL_VOLUME_SP4 = math.pi ** 3 / 270.0


def _factor(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def gamma0_index(n: int) -> int:
    """[Sp4(Z) : Gamma_0(N)] = prod_{p^r || N} p^(3(r-1)) (p+1)(p^2+1)."""
    if n < 1:
        raise ValueError("level must be positive")
    idx = 1
    for p, r in _factor(n).items():
        idx *= p ** (3 * (r - 1)) * (p + 1) * (p * p + 1)
    return idx


def volume(n: int) -> float:
    """vol(Gamma_0(N)\\H_2) = vol(Sp4(Z)\\H_2) * [Sp4(Z) : Gamma_0(N)]."""
    return SIEGEL_VOLUME_SP4 * gamma0_index(n)


@lru_cache(maxsize=None)
def sp4_f2_order() -> int:
    """|Sp4(F_2)|, by brute-force enumeration (oracle for the index formula)."""
    return len(_sp4_f2_elements())


def _sp4_f2_elements():
    # J in block form ((0, -I), (I, 0)); over F_2 signs vanish
    elems = []
    j = [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
    for code in range(1 << 16):
        m = [[(code >> (4 * r + c)) & 1 for c in range(4)] for r in range(4)]
        # compute m^t J m mod 2
        jm = [[sum(j[r][k] * m[k][c] for k in range(4)) % 2 for c in range(4)]
              for r in range(4)]
        mt_jm = [[sum(m[k][r] * jm[k][c] for k in range(4)) % 2 for c in range(4)]
                 for r in range(4)]
        if mt_jm == j:
            elems.append(tuple(tuple(r) for r in m))
    return elems


def gamma0_index_enumerated(n: int) -> int:
    """Index of the image of Gamma_0(N) in Sp4(Z/N), by finite enumeration.

    Only practical for N = 2; the reduction Sp4(Z) -> Sp4(Z/N) is surjective,
    so the index equals |Sp4(F_N)| / |C-block-zero subgroup|.
    """
    if n != 2:
        raise ValueError("finite enumeration oracle implemented for N = 2 only")
    elems = _sp4_f2_elements()
    parabolic = [m for m in elems
                 if m[2][0] == m[2][1] == m[3][0] == m[3][1] == 0]
    assert len(elems) % len(parabolic) == 0
    return len(elems) // len(parabolic)
