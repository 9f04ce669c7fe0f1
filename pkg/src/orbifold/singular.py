"""Singular series, predictions and the orbifold leading constant.

The singular series is computed two ways: as the truncated sum over q of
the normalised complete exponential sums, and as a product over primes of
stabilised p-adic densities. Majorants for the truncation tails follow

    E2 = H^(n+1) * sum_q q^(1 - Gamma + eps) * prod_j gcd(gamma_j, q)^(1/m_j)

with eps = 0.01; they are infinite whenever 1 - Gamma + eps >= -1.
"""

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NotStabilized
from .expsums import complete_sums_table, local_factor
from .integral import L_DEFAULT, singular_integral_numeric
from .mfull import _v_tuples
from .numtheory import factorize, primes_up_to, squarefree_sieve, iroot

EPS = 0.01


@dataclass(frozen=True)
class ProblemInstance:
    """sum_j c_j gamma_j u_j^m_j = N with gamma_j u_j^m_j <= B, u = h mod H.

    Coordinates are stored sorted by exponent (stable), so m is ascending.
    """

    m: tuple
    c: tuple
    gamma: tuple = None
    H: int = 1
    h: tuple = None
    N: int = 0
    B: int = 1

    def __post_init__(self):
        k = len(self.m)
        gamma = self.gamma if self.gamma is not None else (1,) * k
        h = self.h if self.h is not None else (0,) * k
        if not (len(self.c) == len(gamma) == len(h) == k) or k == 0:
            raise ValueError("m, c, gamma and h must have the same nonzero length")
        if any(mj < 2 for mj in self.m):
            raise ValueError("all exponents must be >= 2")
        if any(cj == 0 for cj in self.c) or any(g < 1 for g in gamma):
            raise ValueError("c must be nonzero and gamma positive")
        if self.H < 1 or any(not 0 <= hj < self.H for hj in h):
            raise ValueError("need H >= 1 and 0 <= h_j < H")
        if self.B < 1:
            raise ValueError("B must be >= 1")
        order = sorted(range(k), key=lambda j: self.m[j])
        object.__setattr__(self, "m", tuple(int(self.m[j]) for j in order))
        object.__setattr__(self, "c", tuple(int(self.c[j]) for j in order))
        object.__setattr__(self, "gamma", tuple(int(gamma[j]) for j in order))
        object.__setattr__(self, "h", tuple(int(h[j]) for j in order))

    @property
    def n(self):
        return len(self.m) - 1

    def gamma_exponent(self):
        return sum(1.0 / mj for mj in self.m) - 1.0

    def with_(self, **changes):
        fields = dict(m=self.m, c=self.c, gamma=self.gamma, H=self.H, h=self.h, N=self.N, B=self.B)
        fields.update(changes)
        return ProblemInstance(**fields)


@dataclass(frozen=True)
class SingularSeriesValue:
    value: float
    Q: int
    tail_bound: float
    method: str
    imag: float = 0.0


@dataclass(frozen=True)
class Prediction:
    exponent: float
    series: SingularSeriesValue
    integral: float
    main_term: float
    B: float
    normaliser: float = 1.0

    def main_term_at(self, B):
        """Main term with series and integral held fixed: value * B^Gamma / normaliser."""
        return self.series.value * self.integral * B**self.exponent / self.normaliser


def _tail_sum(s, Q, G, m):
    """Upper bound for sum_{q > Q} q^s prod_j gcd(g_j, q)^(1/m_j), s < -1.

    q is split by d = gcd(q, G) over divisors d of G; the sum over multiples
    of d is compared with an integral.
    """
    if s >= -1.0:
        return math.inf
    total = 0.0
    for d in _divisors(G):
        weight = math.prod(math.gcd(g, d) ** (1.0 / mj) for g, mj in m)
        K = Q // d
        if K >= 1:
            inner = K ** (s + 1.0) / (-s - 1.0)
        else:
            inner = 1.0 + 1.0 / (-s - 1.0)
        total += weight * d**s * inner
    return total


def _relative_tail(value, log_bound):
    """|value| * (exp(log_bound) - 1): the product tail when each missing factor is within exp(.)."""
    if not math.isfinite(log_bound) or log_bound > 700:
        return math.inf
    return abs(value) * math.expm1(log_bound)


def _divisors(n):
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def _majorant_exponent(inst):
    return 1.0 - inst.gamma_exponent() + EPS


def series_tail_bound(inst, Q):
    G = math.lcm(*inst.gamma)
    pairs = list(zip(inst.gamma, inst.m))
    return inst.H ** (inst.n + 1) * _tail_sum(_majorant_exponent(inst), Q, G, pairs)


def singular_series_qsum(inst, Q):
    """sum_{q <= Q} q^-(n+1) sum_{(a,q)=1} e(-aN/q) prod_j S_j(a/q)."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    total = 0j
    for q in range(1, Q + 1):
        if q == 1:
            total += 1.0
            continue
        a = np.arange(1, q, dtype=np.int64)
        a = a[np.gcd(a, q) == 1]
        term = np.exp(-2j * np.pi * ((a * (inst.N % q)) % q) / q)
        for cj, gj, mj, hj in zip(inst.c, inst.gamma, inst.m, inst.h):
            table = complete_sums_table(q, mj, inst.H, hj)
            term = term * table[(a * ((cj * gj) % q)) % q]
        total += term.sum() / q ** (inst.n + 1)
    return SingularSeriesValue(
        value=float(total.real),
        Q=Q,
        tail_bound=series_tail_bound(inst, Q),
        method="q-sum",
        imag=float(total.imag),
    )


def singular_series_euler(inst, p_max, T_max=None):
    """prod_{p <= p_max} lim_T N(p^T) / p^(nT) with exact stabilisation."""
    value = 1.0
    coeffs = [cj * gj for cj, gj in zip(inst.c, inst.gamma)]
    for p in primes_up_to(p_max):
        try:
            lf = local_factor(p, coeffs, inst.m, inst.H, inst.h, inst.N, T_max=T_max)
        except NotStabilized as exc:
            raise NotStabilized(f"singular series: {exc}", p=p, value=exc.value) from exc
        value *= lf.value
    G = math.lcm(*inst.gamma)
    pairs = list(zip(inst.gamma, inst.m))
    prime_tail = inst.H ** (inst.n + 1) * _tail_sum(_majorant_exponent(inst), max(p_max, 1), G, pairs)
    return SingularSeriesValue(value=value, Q=p_max, tail_bound=_relative_tail(value, prime_tail),
                               method="euler-product")


def gamma_ratio(m):
    """prod_i Gamma(1 + 1/m_i) / Gamma(sum_i 1/m_i)."""
    if not m or any(mi < 2 for mi in m):
        raise ValueError("all exponents must be >= 2")
    s = sum(1.0 / mi for mi in m)
    return math.exp(sum(math.lgamma(1.0 + 1.0 / mi) for mi in m) - math.lgamma(s))


def predict(inst, Q=200, L=L_DEFAULT):
    """Main term S * J * B^Gamma / (H^(n+1) prod gamma_j^(1/m_j))."""
    series = singular_series_qsum(inst, Q)
    integral = float(singular_integral_numeric(inst.c, inst.m, inst.N / inst.B, L=L))
    norm = inst.H ** (inst.n + 1) * math.prod(g ** (1.0 / mj) for g, mj in zip(inst.gamma, inst.m))
    gamma_exp = inst.gamma_exponent()
    main = series.value * integral * inst.B**gamma_exp / norm
    return Prediction(gamma_exp, series, integral, main, inst.B, norm)


def waring_main_term(N, m, Q=200):
    """gamma_ratio(m) * S(N) * N^Gamma for representations as sum x_i^m_i."""
    if N < 1:
        raise ValueError("N must be positive")
    inst = ProblemInstance(m=tuple(m), c=(1,) * len(m), N=N, B=N)
    series = singular_series_qsum(inst, Q)
    integral = gamma_ratio(m)
    gamma_exp = inst.gamma_exponent()
    return Prediction(gamma_exp, series, integral, series.value * integral * N**gamma_exp, N)


# --- orbifold leading constant -------------------------------------------


@dataclass
class LeadingConstant:
    value: float
    v_tail: float
    p_tail: float
    integrals: dict = field(default_factory=dict)
    v_count: int = 0


@lru_cache(maxsize=None)
def _zeta_like(m, prime_cut=10**6):
    """sum over squarefree pairwise-coprime (v_1..v_{m-1}) of prod v_r^(-(m+r)/m)."""
    exps = [(m + r) / m for r in range(1, m)]
    logz = 0.0
    for p in primes_up_to(prime_cut):
        logz += math.log1p(sum(p ** (-e) for e in exps))
    # prime tail: sum_{p > X} p^-e <= X^(1-e) / ((e-1) log X)
    logz += sum(prime_cut ** (1 - e) / ((e - 1) * math.log(prime_cut)) for e in exps)
    return math.exp(logz)


def _coordinate_strata(m, V):
    flags = squarefree_sieve(max(1, iroot(V, m + 1)))
    out = []
    for v, w in _v_tuples(V, m, flags):
        out.append((math.prod(v), w, w ** (-1.0 / m)))
    return out


def leading_constant(c, m, V, p_max, T_max=None, L=L_DEFAULT):
    """Truncated leading constant of the orbifold count.

    (1/2) sum_eps J_{eps c} sum_{v: w_j <= V} prod_j w_j^(-1/m_j)
          * prod_{p <= p_max} lim_T M_{eps,T}(v, p) / p^(nT)

    ``c`` must end with -1. Sign vectors eps and -eps give equal terms, so
    only eps_0 = +1 is summed (which absorbs the factor 1/2).
    """
    c = tuple(int(x) for x in c)
    m = tuple(int(x) for x in m)
    if len(c) != len(m) or len(c) < 2:
        raise ValueError("c and m must be aligned with at least two coordinates")
    if c[-1] != -1:
        raise ValueError("the last coefficient must be -1")
    k = len(m)
    strata = [_coordinate_strata(mj, V) for mj in m]
    primes = primes_up_to(p_max)
    integrals = {}
    lf_cache = {}
    total = 0.0
    max_local = 0.0
    abs_J = 0.0
    n_vectors = 0
    for eps_tail in itertools.product((1, -1), repeat=k - 1):
        eps = (1,) + eps_tail
        ec = tuple(e * cj for e, cj in zip(eps, c))
        key = tuple(sorted(zip(ec, m)))
        if key not in integrals:
            integrals[key] = float(singular_integral_numeric(ec, m, 0.0, L=L))
        J = integrals[key]
        if J == 0.0:
            continue
        abs_J += abs(J)
        inner = 0.0
        for combo in itertools.product(*strata):
            n_vectors += 1
            weight = math.prod(item[2] for item in combo)
            coeffs = [ecj * item[1] for ecj, item in zip(ec, combo)]
            vprod = [item[0] for item in combo]
            local = 1.0
            for p in primes:
                mod = p ** 12
                ck = (p, tuple(x % mod for x in coeffs), tuple(x % p == 0 for x in vprod))
                if ck not in lf_cache:
                    lf_cache[ck] = local_factor(p, coeffs, m, primitivity=True, v=vprod, T_max=T_max).value
                local *= lf_cache[ck]
            max_local = max(max_local, abs(local))
            inner += weight * local
        total += J * inner
    z_full = math.prod(_zeta_like(mj) for mj in m)
    z_trunc = math.prod(sum(item[2] for item in s) for s in strata)
    v_tail = abs_J * max_local * max(0.0, z_full - z_trunc)
    gamma_exp = sum(1.0 / mj for mj in m) - 1.0
    prime_tail = _tail_sum(1.0 - gamma_exp + EPS, max(p_max, 1), 1, [(1, mj) for mj in m])
    p_tail = _relative_tail(total, prime_tail)
    return LeadingConstant(total, v_tail, p_tail, integrals, n_vectors)
