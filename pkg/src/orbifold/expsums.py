"""Complete exponential sums mod q and solution counts mod prime powers."""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ModulusTooLarge, NotPrime, NotStabilized
from .numtheory import is_prime, val_p

MAX_MODULUS = 10**6
MAX_COORDS = 8
T_MAX_DEFAULT = 6


@dataclass(frozen=True)
class CompleteSumSpec:
    q: int
    a: int
    A: int
    H: int = 1
    h: int = 0
    m: int = 2

    def __post_init__(self):
        if self.q < 1 or self.H < 1 or self.m < 1:
            raise ValueError("q, H and m must be positive")
        if math.gcd(self.a, self.q) != 1:
            raise ValueError(f"gcd(a, q) = gcd({self.a}, {self.q}) != 1")


@dataclass(frozen=True)
class LocalFactor:
    p: int
    T: int
    numerator: int
    denominator: int
    stabilized: bool

    @property
    def value(self):
        return self.numerator / self.denominator

    def as_fraction(self):
        return Fraction(self.numerator, self.denominator)


def power_residues(q, m, H=1, h=0):
    """(H*k + h)^m mod q for k = 0..q-1, as an int64 array."""
    if q > 3_000_000_000:
        raise ModulusTooLarge(f"modulus {q} too large for int64 residues")
    base = (H % q) * np.arange(q, dtype=np.int64) % q
    base = (base + h % q) % q
    out = np.ones(q, dtype=np.int64) % q
    e = m
    while e:
        if e & 1:
            out = out * base % q
        base = base * base % q
        e >>= 1
    return out


def complete_sum(s):
    """sum_{k mod q} e(a*A*(H*k + h)^m / q) with the phase reduced exactly."""
    if s.q == 1:
        return complex(1.0)
    x = power_residues(s.q, s.m, s.H, s.h)
    x = (x * ((s.a * s.A) % s.q)) % s.q  # exact residues < q
    return complex(np.exp(2j * np.pi * x.astype(np.float64) / s.q).sum())


def complete_sums_table(q, m, H=1, h=0):
    """S[x] = sum_{k mod q} e(x*(H*k+h)^m / q) for every x mod q.

    The residue histogram is exact; the transform is a length-q DFT.
    """
    counts = np.bincount(power_residues(q, m, H, h), minlength=q)
    return np.fft.ifft(counts.astype(np.float64)) * q


LIMB_BITS = 8
DIRECT_WORK = 4_000_000


def _limbs(f, count):
    if f.dtype == object:
        return [np.array([(int(x) >> (LIMB_BITS * i)) & 0xFF for x in f], dtype=np.float64)
                for i in range(count)]
    return [((f >> (LIMB_BITS * i)) & 0xFF).astype(np.float64) for i in range(count)]


def _fft_convolve(f, g, M):
    """Exact cyclic convolution through float FFTs on 8-bit limbs.

    Every limb product sum stays below 2^53 by a wide margin; the rounding
    residual is checked and an ArithmeticError raised if it is not small.
    """
    bf = max(int(f.max()).bit_length(), 1)
    bg = max(int(g.max()).bit_length(), 1)
    lf, lg = -(-bf // LIMB_BITS), -(-bg // LIMB_BITS)
    F = [np.fft.rfft(x) for x in _limbs(f, lf)]
    G = [np.fft.rfft(x) for x in _limbs(g, lg)]
    wide = f.dtype == object or g.dtype == object or bf + bg + M.bit_length() >= 62
    out = np.zeros(M, dtype=object if wide else np.int64)
    for s in range(lf + lg - 1):
        acc = sum(F[i] * G[s - i] for i in range(max(0, s - lg + 1), min(s, lf - 1) + 1))
        part = np.fft.irfft(acc, n=M)
        rounded = np.rint(part)
        if np.max(np.abs(part - rounded)) > 0.2:
            raise ArithmeticError("FFT convolution lost exactness")
        rounded = rounded.astype(np.int64)
        if wide:
            out += rounded.astype(object) * (1 << (LIMB_BITS * s))
        else:
            out += rounded << (LIMB_BITS * s)
    return out


def _cyclic_convolve(f, g, M):
    """Exact cyclic convolution of nonnegative integer histograms of length M."""
    support = np.flatnonzero(f)
    if len(support) > np.count_nonzero(g):
        f, g = g, f
        support = np.flatnonzero(f)
    if len(support) * M > DIRECT_WORK:
        return _fft_convolve(f, g, M)
    out = np.zeros(M, dtype=f.dtype)
    for r in support:
        out += f[r] * np.roll(g, r)
    return out


def _histograms(M, coeffs, exponents, H, h, zero_mod=None):
    """Per-coordinate residue histograms of coeff*(H*k + h)^m mod M.

    Coordinates listed in ``zero_mod`` (a pair (p, indices)) only admit
    k divisible by p.
    """
    dtype = np.int64 if M ** (len(coeffs)) < 2**62 else object
    hists = []
    for j, (A, m) in enumerate(zip(coeffs, exponents)):
        x = power_residues(M, m, H, h[j]) * (A % M) % M
        if zero_mod is not None and j in zero_mod[1]:
            x = x[:: zero_mod[0]]
        hist = np.bincount(x, minlength=M)
        hists.append(hist.astype(dtype))
    return hists


def _count_from_histograms(hists, M, N):
    acc = hists[0]
    for hist in hists[1:-1]:
        acc = _cyclic_convolve(acc, hist, M)
    if len(hists) == 1:
        return int(acc[N % M])
    last = hists[-1]
    idx = (N - np.arange(M)) % M
    return int((acc * last[idx]).sum())


def _check_args(p, T, coeffs, exponents):
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if T < 1:
        raise ValueError("T must be >= 1")
    if len(coeffs) != len(exponents) or not coeffs:
        raise ValueError("coeffs and exponents must be nonempty and aligned")
    if len(coeffs) > MAX_COORDS:
        raise ValueError(f"at most {MAX_COORDS} coordinates")
    if p**T > MAX_MODULUS:
        raise ModulusTooLarge(f"{p}^{T} exceeds {MAX_MODULUS}")


def count_solutions_mod(p, T, coeffs, exponents, H=1, h=None, N=0):
    """#{k mod p^T : sum_j coeffs[j]*(H*k_j + h_j)^m_j == N mod p^T}.

    Exact: the per-coordinate residue histograms are convolved cyclically.
    """
    _check_args(p, T, coeffs, exponents)
    h = tuple(h) if h is not None else (0,) * len(coeffs)
    M = p**T
    return _count_from_histograms(_histograms(M, coeffs, exponents, H, h), M, N)


def count_primitive_mod(p, T, coeffs, exponents, v, H=1, h=None, N=0):
    """Solutions mod p^T having some j with p not dividing k_j * v_j."""
    _check_args(p, T, coeffs, exponents)
    h = tuple(h) if h is not None else (0,) * len(coeffs)
    M = p**T
    total = _count_from_histograms(_histograms(M, coeffs, exponents, H, h), M, N)
    forced = tuple(j for j, vj in enumerate(v) if vj % p != 0)
    hists = _histograms(M, coeffs, exponents, H, h, zero_mod=(p, forced))
    return total - _count_from_histograms(hists, M, N)


def _start_level(p, coeffs, exponents, H, N, v):
    """First level from which exact agreement of consecutive levels is trusted.

    Hensel: a solution whose relevant partial derivative has p-valuation
    delta lifts uniformly once T >= 2*delta + 1.
    """
    idx = range(len(coeffs)) if v is None else [j for j, vj in enumerate(v) if vj % p]
    delta = 0
    for j in idx:
        A = coeffs[j] * exponents[j]
        if A == 0:
            continue
        delta = max(delta, val_p(A, p))
    t0 = 2 * delta + 1
    if H % p == 0:
        t0 += 1
    if v is None and N != 0:
        t0 = max(t0, val_p(N, p) + 1)
    return t0


def local_factor(p, coeffs, exponents, H=1, h=None, N=0, primitivity=False, v=None,
                 T_max=None):
    """Stabilised p-adic density N(p^T) / p^(nT).

    With ``primitivity`` the all-divisible class (p | k_j v_j for every j) is
    excluded, ``v[j]`` being the product v_{j,1}...v_{j,m_j-1}. The level T is
    raised until two consecutive levels agree exactly; NotStabilized is raised
    when T_max is reached first. By default T_max is the larger of
    T_MAX_DEFAULT and the Hensel start level plus 3.
    """
    n = len(coeffs) - 1
    if primitivity:
        v = tuple(v) if v is not None else (1,) * len(coeffs)
        count = lambda T: count_primitive_mod(p, T, coeffs, exponents, v, H, h, N)  # noqa: E731
    else:
        count = lambda T: count_solutions_mod(p, T, coeffs, exponents, H, h, N)  # noqa: E731
    T = _start_level(p, coeffs, exponents, H, N, v if primitivity else None)
    if T_max is None:
        T_max = max(T_MAX_DEFAULT, T + 3)
    current = count(T)
    while T < T_max:
        nxt = count(T + 1)
        if nxt == current * p**n:
            return LocalFactor(p, T, current, p ** (n * T), True)
        T += 1
        current = nxt
    raise NotStabilized(
        f"local factor at p={p} not stable by T={T_max}",
        p=p,
        value=LocalFactor(p, T, current, p ** (n * T), False),
    )
