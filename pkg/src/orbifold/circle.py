"""Circle-method instrumentation: exponential sums, arcs, mean values."""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DeltaOutOfRange, TooLarge
from .expsums import _cyclic_convolve
from .numtheory import iroot

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
CHUNK = 1 << 22
VMV_MAX_X = 1000
VMV_MAX_S = 8


def coordinate_range(B, gamma, m):
    """Largest u with gamma * u^m <= B."""
    return iroot(int(B) // int(gamma), m)


def _residue_class(U, H, h):
    """u in [1, U] with u = h mod H."""
    start = h % H if h % H else H
    return np.arange(start, U + 1, H, dtype=np.int64)


def incomplete_sum(alpha, A, m, U, H=1, h=0):
    """sum_{1 <= u <= U, u = h mod H} e(alpha * A * u^m).

    ``alpha`` may be a float, an array of floats or a Fraction; rational
    arguments are reduced exactly, floats in extended precision.
    """
    u = _residue_class(U, H, h)
    if isinstance(alpha, Fraction):
        q, a = alpha.denominator, alpha.numerator
        x = [(a * A * pow(int(k), m, q)) % q for k in u]
        return complex(np.exp(2j * np.pi * np.asarray(x, dtype=np.float64) / q).sum())
    scalar = np.ndim(alpha) == 0
    alpha = np.atleast_1d(np.asarray(alpha, dtype=np.longdouble))
    powers = np.array([int(k) ** m * A for k in u], dtype=np.longdouble)
    out = np.empty(alpha.shape, dtype=complex)
    step = max(1, CHUNK // max(1, len(u)))
    for i in range(0, len(alpha), step):
        ph = np.outer(alpha[i : i + step], powers)
        ph = (ph - np.floor(ph)).astype(np.float64)
        out[i : i + step] = np.exp(2j * np.pi * ph).sum(axis=1)
    return complex(out[0]) if scalar else out


def generating_function(alpha, inst):
    """prod_j S_j(alpha) * e(-alpha N) for a ProblemInstance."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    out = np.exp(-2j * np.pi * np.mod(alpha * inst.N, 1.0))
    for cj, gj, mj, hj in zip(inst.c, inst.gamma, inst.m, inst.h):
        U = coordinate_range(inst.B, gj, mj)
        out = out * incomplete_sum(alpha, cj * gj, mj, U, inst.H, hj)
    return out


def delta_upper(n, m_n):
    return 1.0 / ((2 * n + 5) * m_n * (m_n + 1))


@dataclass(frozen=True)
class ArcDissection:
    B: float
    delta: float
    majors: tuple
    radius: float
    Q: int

    def measure(self):
        """Sum of arc lengths (overlaps counted twice)."""
        return 2.0 * self.radius * len(self.majors)

    def intervals(self):
        """Union of the major arcs inside [0, 1) as sorted disjoint intervals."""
        pieces = []
        for a, q in self.majors:
            lo, hi = a / q - self.radius, a / q + self.radius
            for shift in (-1.0, 0.0, 1.0):
                l, h = max(lo + shift, 0.0), min(hi + shift, 1.0)
                if l < h:
                    pieces.append((l, h))
        pieces.sort()
        merged = []
        for l, h in pieces:
            if merged and l <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], h))
            else:
                merged.append((l, h))
        return merged

    def in_major(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        hit = np.zeros(alpha.shape, dtype=bool)
        for a, q in self.majors:
            d = np.abs(alpha - a / q)
            d = np.minimum(d, 1.0 - d)
            hit |= d < self.radius
        return hit


def dissect(B, delta, n, m_n, enforce_range=True):
    """Major arcs |alpha - a/q| < B^(-1+delta), 0 <= a <= q <= B^delta, (a,q)=1."""
    if B < 2:
        raise ValueError("B must be >= 2")
    if enforce_range and not 0.0 < delta < delta_upper(n, m_n):
        raise DeltaOutOfRange(f"delta={delta} outside (0, {delta_upper(n, m_n):.6g})")
    if not delta > 0:
        raise DeltaOutOfRange("delta must be positive")
    Q = int(math.floor(B**delta * (1 + 1e-12)))
    majors = tuple((a, q) for q in range(1, Q + 1) for a in range(q + 1) if math.gcd(a, q) == 1)
    return ArcDissection(B, delta, majors, B ** (-1.0 + delta), Q)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def major_arc_integral(inst, dissection, nodes_per_period=1.0):
    """Real part of int over the union of major arcs of the generating function.

    Each arc gets Gauss-Legendre panels, their number set by the largest
    frequency in the integrand so that each panel spans at most one period.
    """
    freq = sum(abs(cj) * gj * coordinate_range(inst.B, gj, mj) ** mj
               for cj, gj, mj in zip(inst.c, inst.gamma, inst.m)) + abs(inst.N)
    total = 0.0
    for lo, hi in dissection.intervals():
        panels = max(1, math.ceil((hi - lo) * freq * nodes_per_period))
        edges = np.linspace(lo, hi, panels + 1)
        half = (edges[1:] - edges[:-1]) / 2
        mid = (edges[1:] + edges[:-1]) / 2
        x = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
        w = (half[:, None] * _GL_W[None, :]).ravel()
        total += float((w * generating_function(x, inst)).sum().real)
    return total


def minor_sup_sample(inst, dissection, samples=10_000):
    """max |S_n(alpha)| over Weyl-sequence points alpha lying on the minor arcs."""
    if samples < 1000:
        raise ValueError("use at least 1000 samples")
    j = inst.n
    A = inst.c[j] * inst.gamma[j]
    U = coordinate_range(inst.B, inst.gamma[j], inst.m[j])
    k = np.arange(1, samples + 1, dtype=np.float64)
    alpha = np.mod(k * GOLDEN, 1.0)
    alpha = alpha[~dissection.in_major(alpha)]
    if alpha.size == 0:
        return 0.0
    return float(np.abs(incomplete_sum(alpha, A, inst.m[j], U, inst.H, inst.h[j])).max())


def _linear_convolve(f, g):
    M = len(f) + len(g) - 1
    fp = np.zeros(M, dtype=f.dtype)
    gp = np.zeros(M, dtype=g.dtype)
    fp[: len(f)] = f
    gp[: len(g)] = g
    return _cyclic_convolve(fp, gp, M)


def _power_histogram(values, weight=1):
    values = np.asarray(values, dtype=np.int64)
    lo = int(values.min())
    return lo, np.bincount(values - lo).astype(np.int64)


def vinogradov_mean_value(X, k, s, A=1, H=1, h=0):
    """#{sum_{i<=s/2} A x_i^k = sum_{i<=s/2} A y_i^k}, x, y in [1, X], x = h mod H."""
    if s < 2 or s % 2:
        raise ValueError("s must be a positive even integer")
    if s > VMV_MAX_S or X > VMV_MAX_X:
        raise TooLarge(f"need s <= {VMV_MAX_S} and X <= {VMV_MAX_X}")
    if (s // 2) * X**k > 10**8:
        raise TooLarge("power histogram would exceed 10^8 entries")
    u = _residue_class(X, H, h)
    if u.size == 0:
        return 0
    _, base = _power_histogram(u.astype(object) ** k)
    r = base
    for _ in range(s // 2 - 1):
        r = _linear_convolve(r, base)
    return int(sum(int(x) * int(x) for x in r[np.flatnonzero(r)]))


def full_circle_integral(inst):
    """int_0^1 of the generating function, exactly, via frequency histograms.

    The product of the per-coordinate frequency polynomials is formed by
    exact integer convolution and the coefficient at N is returned.
    """
    offset = 0
    acc = np.ones(1, dtype=np.int64)
    for cj, gj, mj, hj in zip(inst.c, inst.gamma, inst.m, inst.h):
        U = coordinate_range(inst.B, gj, mj)
        u = _residue_class(U, inst.H, hj)
        if u.size == 0:
            return 0
        lo, hist = _power_histogram([cj * gj * int(x) ** mj for x in u])
        acc = _linear_convolve(acc, hist)
        offset += lo
    idx = inst.N - offset
    if not 0 <= idx < len(acc):
        return 0
    return int(acc[idx])
