"""Explicit-formula engine for low-lying zero statistics.

Everything runs on the prime-sum side of the explicit formula: zeros are
never computed.  Local moments sum the m-th powers of the four spin local
parameters; prime sums weight them by log(p) p^(-m/2) Phi_hat(m log p/log C);
the archimedean term is a digamma quadrature.  The Monte Carlo mode draws
local parameters from the Bessel-model measure and reports its standard
errors alongside every deterministic piece.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import digamma

from .bessel_measure import sample
from .quadform import kronecker

PAPER_SUPPORT_LIMIT = 2.0 / 9.0
DEFAULT_THETA = 0.4375  # 1/2 - 1/16 - ...: transfer-shaped default, configurable


@dataclass(frozen=True)
class TestFunction:
    """Even Schwartz test function with compactly supported transform."""
    alpha: float
    phi: object
    phi_hat: object
    label: str = ""

    @property
    def paper_regime(self) -> bool:
        return self.alpha < PAPER_SUPPORT_LIMIT


def fejer_test_function(beta: float) -> TestFunction:
    """Phi(x) = (sin(pi beta x)/(pi beta x))^2, Phi_hat = triangle on [-b, b]."""
    if beta <= 0:
        raise ValueError("beta must be positive")

    def phi(x):
        x = np.asarray(x, dtype=float)
        u = np.pi * beta * x
        out = np.ones_like(u)
        nz = u != 0
        out[nz] = (np.sin(u[nz]) / u[nz]) ** 2
        return out if out.ndim else float(out)

    def phi_hat(t):
        t = np.asarray(t, dtype=float)
        out = np.maximum(0.0, 1.0 - np.abs(t) / beta) / beta
        return out if out.ndim else float(out)

    return TestFunction(alpha=beta, phi=phi, phi_hat=phi_hat, label=f"fejer-{beta}")


def symplectic_kernel(x):
    """W(Sp)(x) = 1 - sin(2 pi x)/(2 pi x), with the removable singularity."""
    x = np.asarray(x, dtype=float)
    u = 2 * np.pi * x
    out = np.empty_like(u)
    nz = u != 0
    out[nz] = 1.0 - np.sin(u[nz]) / u[nz]
    out[~nz] = 0.0
    return out if out.ndim else float(out)


def symplectic_prediction(tf: TestFunction) -> float:
    """integral of Phi W(Sp) = Phi_hat(0) - (1/2) integral of Phi_hat on [-1,1]."""
    if tf.alpha <= 1.0:
        half = float(quad(lambda t: tf.phi_hat(t), 0.0, tf.alpha)[0])
        return float(tf.phi_hat(0.0)) - half
    raise NotImplementedError("prediction implemented for support inside [-1, 1]")


# ----------------------------------------------------------- local L-data

@dataclass(frozen=True)
class LFunctionLocalData:
    """Spin local parameters at one prime (zeros allowed at ramified places)."""
    alphas: tuple
    p: int
    ramified: bool = False

    def __post_init__(self):
        if len(self.alphas) != 4:
            raise ValueError("need exactly 4 local parameters")
        nonzero = [a for a in self.alphas if a != 0]
        limit = math.sqrt(self.p) * (1 + 1e-9)
        for a in nonzero:
            if abs(a) > limit:
                raise ValueError(f"|alpha| = {abs(a)} exceeds sqrt(p) at p = {self.p}")
        # self-dual: nonzero multiset closed under inversion
        inv = sorted((round(abs(1 / a), 9), round(_arg_mod(1 / a), 9)) for a in nonzero)
        fwd = sorted((round(abs(a), 9), round(_arg_mod(a), 9)) for a in nonzero)
        if inv != fwd:
            raise ValueError("local parameters are not closed under inversion")

    def satisfies_theta_bound(self, theta: float) -> bool:
        limit = self.p ** theta * (1 + 1e-12)
        return all(abs(a) <= limit for a in self.alphas if a != 0)


def _arg_mod(z):
    ph = math.atan2(complex(z).imag, complex(z).real)
    return abs(ph)


def local_data_from_satake(params, p: int) -> LFunctionLocalData:
    return LFunctionLocalData(alphas=params.alphas(), p=p)


def moment(local: LFunctionLocalData, m: int) -> float:
    """c(pi, p^m) = sum of m-th powers (real for self-dual data)."""
    if m < 1:
        raise ValueError("moment order must be >= 1")
    total = sum(complex(a) ** m for a in local.alphas)
    assert abs(total.imag) < 1e-8 * max(1.0, abs(total.real)), "non-real moment"
    return total.real


# ------------------------------------------------------------- archimedean

def gamma_term(k: int, log_c: float, tf: TestFunction, cutoff: float = 1e4):
    """(1/logC) integral of the gamma-factor logarithmic derivative vs Phi.

    gamma(s) = (2 pi)^(-2s) Gamma(s + 1/2) Gamma(s + k - 3/2).  The line
    integral is summed over panels of width ~1/alpha out to `cutoff` (the
    integrand decays like log(x) Phi(x)); a crude analytic bound on the
    dropped tail guards the convergence claim.  Returns the quadrature value
    with the leading approximation Phi_hat(0) log(k^2)/logC.
    """
    if log_c <= 0:
        raise ValueError("need logC > 0")

    def integrand(x):
        s = 0.5 + 2j * math.pi * x / log_c
        val = (-2 * math.log(2 * math.pi) + digamma(s + 0.5)
               + digamma(s + k - 1.5))
        return 2 * val.real * float(tf.phi(x))

    width = 1.0 / max(tf.alpha, 1e-3)
    total = 0.0
    err_total = 0.0
    x = 0.0
    while x < cutoff:
        hi = min(x + width, cutoff)
        val, err = quad(integrand, x, hi, limit=100)
        total += val
        err_total += err
        x = hi
    # tail bound: |integrand| <= (2 log(2 pi cutoff k / logC) + C) * Phi(x),
    # and the Phi-tail mass past the cutoff is at most 1/(pi^2 alpha^2 cutoff)
    tail = ((2 * abs(math.log(2 * math.pi * cutoff * k / log_c)) + 8.0)
            / (math.pi ** 2 * tf.alpha ** 2 * cutoff))
    if err_total + tail > 1e-3 * max(1.0, abs(total)):
        raise ArithmeticError(
            f"gamma-term quadrature failed to converge: {err_total} + {tail}")
    exact = 2.0 * total / log_c
    leading = float(tf.phi_hat(0.0)) * math.log(k * k) / log_c
    return {"exact": exact, "leading": leading,
            "quadrature_error": (2.0 * err_total + tail) / log_c}


# -------------------------------------------------------------- prime sums

class SupportCoverageError(ValueError):
    pass


def _primes_up_to(n):
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = bytearray(len(sieve[p * p::p]))
    return [i for i, v in enumerate(sieve) if v]


def required_p_max(tf: TestFunction, log_c: float) -> int:
    return int(math.floor(math.exp(tf.alpha * log_c))) + 1


def _check_support(tf, log_c, p_max):
    need = math.exp(tf.alpha * log_c)
    if p_max < need:
        raise SupportCoverageError(
            f"p_max = {p_max} does not cover the transform support "
            f"(need >= {need:.1f})")


def prime_sum_family(family_moments, m: int, tf: TestFunction, log_c: float,
                     p_max: int) -> float:
    """(2/logC) sum_p log p <moment_m>_p p^(-m/2) Phi_hat(m log p / logC).

    family_moments maps p -> the omega-averaged m-th moment at p.
    """
    _check_support(tf, log_c, p_max)
    total = 0.0
    for p in _primes_up_to(p_max):
        weight = float(tf.phi_hat(m * math.log(p) / log_c))
        if weight == 0.0:
            continue
        if p not in family_moments:
            raise SupportCoverageError(f"family lacks local data at p = {p}")
        total += math.log(p) * family_moments[p] * p ** (-m / 2) * weight
    return 2.0 * total / log_c


@dataclass
class MCPrimeData:
    """Per-prime Monte Carlo draws of tempered local angles."""
    p: int
    theta: np.ndarray  # shape (n, 2)

    def moments(self, m: int):
        vals = 2 * np.cos(m * self.theta[:, 0]) + 2 * np.cos(m * self.theta[:, 1])
        return vals


class MeasureFamilySampler:
    """Synthetic family: per prime, n draws from the Bessel-model measure."""

    def __init__(self, d: int, character, n: int, seed: int):
        self.d = d
        self.character = character
        self.n = n
        self.seed = seed
        self._cache = {}

    def prime_data(self, p: int) -> MCPrimeData:
        if p not in self._cache:
            draws = sample(p, self.d, self.character, self.n,
                           seed=(self.seed * 1_000_003 + p) % (2 ** 63))
            self._cache[p] = MCPrimeData(p=p, theta=draws)
        return self._cache[p]


def prime_sum_mc(sampler: MeasureFamilySampler, m: int, tf: TestFunction,
                 log_c: float, p_max: int):
    """MC estimate of the m-th prime sum with its standard error."""
    _check_support(tf, log_c, p_max)
    total = 0.0
    variance = 0.0
    for p in _primes_up_to(p_max):
        weight = float(tf.phi_hat(m * math.log(p) / log_c))
        if weight == 0.0:
            continue
        coeff = 2.0 / log_c * math.log(p) * p ** (-m / 2) * weight
        vals = sampler.prime_data(p).moments(m)
        total += coeff * float(vals.mean())
        variance += coeff ** 2 * float(vals.var(ddof=1)) / len(vals)
    return total, math.sqrt(variance)


# --------------------------------------------------------------- reports

@dataclass
class DensityRunReport:
    mode: str
    log_c: float
    phi_hat0: float
    archimedean: float
    m1: float
    m2: float
    m3_plus: float
    m3_plus_bound: float
    total: float
    predicted: float
    mc_sigma: float = 0.0
    mc_sigma_m1: float = 0.0
    mc_sigma_m2: float = 0.0
    params: dict = field(default_factory=dict)

    def to_json(self):
        payload = dict(self.__dict__)
        return json.dumps(payload, indent=2, sort_keys=True, default=str)


def log_conductor(members, k: int) -> float:
    """omega-weighted average of log(q(pi) k^2) over family members."""
    mass = sum(m.omega for m in members)
    if mass <= 0:
        raise ValueError("family has zero total weight")
    avg = sum(m.omega * math.log(m.conductor * k * k) for m in members) / mass
    return avg


def _max_moment_order(tf: TestFunction, log_c: float) -> int:
    return max(1, int(math.floor(tf.alpha * log_c / math.log(2))))


def one_level_density_mc(sampler: MeasureFamilySampler, tf: TestFunction,
                         log_c: float, p_max: int | None = None) -> DensityRunReport:
    """Monte Carlo density run: D = Phi_hat(0) - sum_m S_m, with MC errors.

    The archimedean and conductor terms of a synthetic family are folded
    into the exact Phi_hat(0) (the log-average conductor is the yardstick).
    """
    p_max = required_p_max(tf, log_c) if p_max is None else p_max
    phi_hat0 = float(tf.phi_hat(0.0))
    m_top = _max_moment_order(tf, log_c)
    sums = {}
    sigmas = {}
    for m in range(1, m_top + 1):
        sums[m], sigmas[m] = prime_sum_mc(sampler, m, tf, log_c, p_max)
    m3p = sum(sums.get(m, 0.0) for m in range(3, m_top + 1))
    m3p_bound = _m3_bound(tf, log_c, p_max)
    total = phi_hat0 - sum(sums.values())
    sigma = math.sqrt(sum(s ** 2 for s in sigmas.values()))
    return DensityRunReport(
        mode="mc", log_c=log_c, phi_hat0=phi_hat0, archimedean=phi_hat0,
        m1=sums.get(1, 0.0), m2=sums.get(2, 0.0), m3_plus=m3p,
        m3_plus_bound=m3p_bound, total=total,
        predicted=symplectic_prediction(tf),
        mc_sigma=sigma, mc_sigma_m1=sigmas.get(1, 0.0),
        mc_sigma_m2=sigmas.get(2, 0.0),
        params={"d": sampler.d, "n": sampler.n, "seed": sampler.seed,
                "p_max": p_max, "alpha": tf.alpha,
                "paper_regime": tf.paper_regime})


def one_level_density_family(members, k: int, tf: TestFunction,
                             log_c: float | None = None,
                             theta: float = DEFAULT_THETA,
                             include_sk: bool = True) -> DensityRunReport:
    """Family-mode density run from per-member local data.

    Each member carries omega, conductor, satake (unramified) and optional
    ramified local data; members flagged as lifts can be excluded to measure
    their contribution against the budget scale.
    """
    used = [m for m in members if include_sk or not m.sk_flagged]
    if not used:
        raise ValueError("family is empty after filtering")
    log_c = log_conductor(used, k) if log_c is None else log_c
    p_max = required_p_max(tf, log_c)
    mass = sum(m.omega for m in used)
    m_top = _max_moment_order(tf, log_c)
    sums = {}
    for m in range(1, m_top + 1):
        fam_moments = {}
        for p in _primes_up_to(p_max):
            acc = 0.0
            for member in used:
                local = _member_local_data(member, p)
                term = moment(local, m)
                if local.ramified and not member.sk_flagged:
                    if not local.satisfies_theta_bound(theta):
                        raise ValueError(
                            f"{member.label}: ramified data violates the "
                            f"theta = {theta} bound at p = {p}")
                acc += member.omega * term
            fam_moments[p] = acc / mass
        sums[m] = prime_sum_family(fam_moments, m, tf, log_c, p_max)
    arch = gamma_term(k, log_c, tf)
    phi_hat0 = float(tf.phi_hat(0.0))
    avg_logq = sum(m.omega * math.log(m.conductor) for m in used) / mass
    total = (phi_hat0 * (avg_logq + math.log(k * k)) / log_c
             + (arch["exact"] - arch["leading"])
             - sum(sums.values()))
    m3p = sum(sums.get(m, 0.0) for m in range(3, m_top + 1))
    return DensityRunReport(
        mode="family", log_c=log_c, phi_hat0=phi_hat0,
        archimedean=arch["exact"],
        m1=sums.get(1, 0.0), m2=sums.get(2, 0.0), m3_plus=m3p,
        m3_plus_bound=_m3_bound(tf, log_c, p_max),
        total=total, predicted=symplectic_prediction(tf),
        params={"k": k, "members": len(used), "p_max": p_max,
                "alpha": tf.alpha, "theta": theta,
                "paper_regime": tf.paper_regime, "include_sk": include_sk})


def _member_local_data(member, p: int) -> LFunctionLocalData:
    if member.satake and p in member.satake:
        return local_data_from_satake(member.satake[p], p)
    local = getattr(member, "local_data", None)
    if local and p in local:
        return local[p]
    raise SupportCoverageError(
        f"{member.label}: no local data at p = {p}")


def _m3_bound(tf: TestFunction, log_c: float, p_max: int) -> float:
    """Crude tempered bound 4 p^(-m/2) on every m >= 3 term, summed."""
    total = 0.0
    m_top = _max_moment_order(tf, log_c)
    for m in range(3, m_top + 1):
        for p in _primes_up_to(p_max):
            weight = float(tf.phi_hat(m * math.log(p) / log_c))
            if weight:
                total += 2.0 / log_c * math.log(p) * 4.0 * p ** (-m / 2) * weight
    return total


def density_curve_rows(tf: TestFunction, xs) -> list:
    """Rows (x, W(Sp)(x), Phi(x) W(Sp)(x)) for CSV export."""
    return [(float(x), float(symplectic_kernel(x)),
             float(tf.phi(x)) * float(symplectic_kernel(x))) for x in xs]
