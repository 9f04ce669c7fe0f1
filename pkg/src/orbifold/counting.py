"""Exact counters used as ground truth for every prediction."""

import itertools
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import combinatorics as comb
from .circle import _linear_convolve, _residue_class, coordinate_range
from .errors import DegenerateInput, IntegerOverflow, TooLarge
from .mfull import enumerate_decomposed
from .numtheory import MAX_ABS, primes_up_to
from .singular import ProblemInstance


def max_ops():
    return int(float(os.environ.get("ORBIFOLD_MAX_OPS", "1e9")))


@dataclass
class CountResult:
    count: int
    method: str
    elapsed: float
    instance: object = None
    extra: dict = field(default_factory=dict)


def _guard(ops):
    if ops > max_ops():
        raise TooLarge(f"estimated {ops:.3g} operations exceeds {max_ops():.3g}")


def _check_sums(values, coeffs):
    top = sum(abs(c) * max((abs(int(v)) for v in vals), default=0) for c, vals in zip(coeffs, values))
    if top >= MAX_ABS:
        raise IntegerOverflow("partial sums may exceed 2^63")


def _partial_sums(values, coeffs):
    """All sums sum_j coeffs[j] * x_j over the product of value lists, with indices."""
    sums = np.zeros(1, dtype=np.int64)
    idx = np.zeros((1, 0), dtype=np.int64)
    for c, vals in zip(coeffs, values):
        v = np.asarray(vals, dtype=np.int64) * c
        sums = (sums[:, None] + v[None, :]).ravel()
        k = len(v)
        idx = np.concatenate([np.repeat(idx, k, axis=0), np.tile(np.arange(k), len(idx))[:, None]], axis=1)
    return sums, idx


def _split_balanced(sizes):
    """Order coordinates by size and cut where the products are closest."""
    order = sorted(range(len(sizes)), key=lambda j: sizes[j])
    best, cut = None, 1
    for k in range(1, len(order)):
        left = math.prod(sizes[j] for j in order[:k])
        right = math.prod(sizes[j] for j in order[k:])
        if best is None or max(left, right) < best:
            best, cut = max(left, right), k
    return order[:cut], order[cut:]


def solve_linear(values, coeffs, N=0, want_solutions=False):
    """Count (or list) tuples x_j in values[j] with sum_j coeffs[j] x_j = N.

    Meet in the middle: partial sums of two halves are sorted and joined.
    """
    k = len(values)
    sizes = [len(v) for v in values]
    if min(sizes, default=0) == 0:
        return (0, np.zeros((0, k), dtype=np.int64)) if want_solutions else 0
    _check_sums(values, coeffs)
    if k == 1:
        vals = np.asarray(values[0], dtype=np.int64) * coeffs[0]
        hit = np.flatnonzero(vals == N)
        return (len(hit), np.asarray(values[0], dtype=np.int64)[hit][:, None]) if want_solutions else len(hit)
    left, right = _split_balanced(sizes)
    _guard(math.prod(sizes[j] for j in left) + math.prod(sizes[j] for j in right))
    ls, li = _partial_sums([values[j] for j in left], [coeffs[j] for j in left])
    rs, ri = _partial_sums([values[j] for j in right], [coeffs[j] for j in right])
    rs = N - rs
    order = np.argsort(rs, kind="stable")
    rs_sorted = rs[order]
    lo = np.searchsorted(rs_sorted, ls, side="left")
    hi = np.searchsorted(rs_sorted, ls, side="right")
    counts = hi - lo
    total = int(counts.sum())
    if not want_solutions:
        return total
    li_rep = np.repeat(np.arange(len(ls)), counts)
    starts = np.repeat(lo, counts)
    offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    ri_pick = order[starts + offs]
    sol = np.empty((total, k), dtype=np.int64)
    for pos, j in enumerate(left):
        sol[:, j] = np.asarray(values[j], dtype=np.int64)[li[li_rep, pos]]
    for pos, j in enumerate(right):
        sol[:, j] = np.asarray(values[j], dtype=np.int64)[ri[ri_pick, pos]]
    return total, sol


def _count_nested(values, coeffs, N):
    *head, last = values
    _guard(math.prod(len(v) for v in head))
    cl = coeffs[-1]
    target = {}
    for x in last:
        target[cl * x] = target.get(cl * x, 0) + 1
    total = 0
    for combo in itertools.product(*head):
        total += target.get(N - sum(c * x for c, x in zip(coeffs, combo)), 0)
    return total


def _coordinate_values(inst):
    """gamma_j u^m_j for admissible u (u <= B_j, u = h_j mod H)."""
    out = []
    for gj, mj, hj in zip(inst.gamma, inst.m, inst.h):
        U = coordinate_range(inst.B, gj, mj)
        out.append([gj * int(u) ** mj for u in _residue_class(U, inst.H, hj)])
    return out


def count_M(inst, method="auto"):
    """#{u : gamma_j u_j^m_j <= B, u = h mod H, sum c_j gamma_j u_j^m_j = N}."""
    t0 = time.perf_counter()
    values = _coordinate_values(inst)
    if method == "auto":
        method = "nested" if math.prod(len(v) for v in values[:-1]) <= 10**4 else "meet-in-middle"
    if method == "nested":
        count = _count_nested(values, inst.c, inst.N)
    elif method == "meet-in-middle":
        count = solve_linear(values, inst.c, inst.N)
    else:
        raise ValueError(f"unknown method {method!r}")
    return CountResult(count, method, time.perf_counter() - t0, inst)


def representation_table(N_lo, N_hi, m):
    """R(N) for N_lo <= N <= N_hi: ordered x_i >= 1 with sum x_i^m_i = N.

    Per-coordinate indicator arrays truncated at N_hi are convolved exactly.
    """
    if N_lo < 1 or N_hi < N_lo:
        raise ValueError("need 1 <= N_lo <= N_hi")
    _guard(len(m) * N_hi * math.log2(N_hi + 2) * 40)
    acc = np.zeros(N_hi + 1, dtype=np.int64)
    acc[0] = 1
    for mi in m:
        ind = np.zeros(N_hi + 1, dtype=np.int64)
        x = np.arange(1, coordinate_range(N_hi, 1, mi) + 1, dtype=np.int64) ** mi
        ind[x] = 1
        acc = _linear_convolve(acc, ind)[: N_hi + 1]
    return {N: int(acc[N]) for N in range(N_lo, N_hi + 1)}


def count_R(N, m, method="auto"):
    inst = ProblemInstance(m=tuple(m), c=(1,) * len(m), N=N, B=N)
    res = count_M(inst, method)
    res.instance = (N, tuple(m))
    return res


# --- Campana points ------------------------------------------------------


def _normalise_campana(c, m):
    c, m = tuple(int(x) for x in c), tuple(int(x) for x in m)
    if len(c) == len(m):
        if c[-1] != -1:
            raise ValueError("with n+1 coefficients the last must be -1")
        c = c[:-1]
    if len(c) != len(m) - 1 or len(c) < 1:
        raise ValueError("need n coefficients for n+1 exponents")
    if any(x == 0 for x in c):
        raise ValueError("coefficients must be nonzero")
    return c, m


def signed_mfull(B, m):
    pos = [d.u**d.m * d.weight() for d in enumerate_decomposed(B, m)]
    return sorted([-x for x in pos] + pos)


def count_campana(c, m, B, gcd_over="head"):
    """(1/2) #{x nonzero, |x| <= B, x_i m_i-full, sum_{i<n} c_i x_i = x_n, gcd = 1}.

    ``gcd_over`` chooses gcd(x_0..x_{n-1}) ("head") or gcd(x_0..x_n)
    ("all"); both agree because x_n is a combination of the others.
    """
    t0 = time.perf_counter()
    c, m = _normalise_campana(c, m)
    values = [signed_mfull(B, mj) for mj in m]
    coeffs = list(c) + [-1]
    _, sol = solve_linear(values, coeffs, 0, want_solutions=True)
    cols = sol if gcd_over == "all" else sol[:, :-1]
    if gcd_over not in ("head", "all"):
        raise ValueError("gcd_over must be 'head' or 'all'")
    g = np.gcd.reduce(np.abs(cols), axis=1) if len(sol) else np.zeros(0, dtype=np.int64)
    raw = int(np.count_nonzero(g == 1))
    if raw % 2:
        raise AssertionError("signed count is odd; x -> -x symmetry broken")
    return CountResult(raw // 2, "meet-in-middle", time.perf_counter() - t0, (c, m, B), {"raw": raw})


# --- strata N_c(B; s, t) -------------------------------------------------


def _stratum_values(B, m, s_j, t_j):
    out = []
    for d in enumerate_decomposed(B, m):
        if d.u % s_j:
            continue
        if any(vr % tr for vr, tr in zip(d.v, t_j)):
            continue
        out.append(d.u**m * d.weight())
    return out


def stratum_solutions(c, m, B, pattern=None):
    """Solutions of N_c(B; s, t): positive x_j <= B, sum_j c_j x_j = 0.

    ``c`` has n+1 entries here (no sign normalisation).
    """
    pattern = pattern or comb.DivisorPattern.ones(m)
    values = [_stratum_values(B, mj, pattern.s[j], pattern.t[j]) for j, mj in enumerate(m)]
    return solve_linear(values, list(c), 0, want_solutions=True)[1]


def count_stratum(c, m, B, pattern=None):
    t0 = time.perf_counter()
    c, m = tuple(c), tuple(m)
    pattern = pattern or comb.DivisorPattern.ones(m)
    if any(tau > B for tau in pattern.sizes(m)):
        return CountResult(0, "empty", time.perf_counter() - t0, (c, m, B, pattern))
    values = [_stratum_values(B, mj, pattern.s[j], pattern.t[j]) for j, mj in enumerate(m)]
    count = solve_linear(values, list(c), 0)
    return CountResult(count, "meet-in-middle", time.perf_counter() - t0, (c, m, B, pattern))


def count_primitive(c, m, B):
    """#(N_c(B; 1, 1) intersected with primitive vectors)."""
    sol = stratum_solutions(c, m, B)
    if len(sol) == 0:
        return 0
    return int(np.count_nonzero(np.gcd.reduce(sol, axis=1) == 1))


def admissible_patterns(m, B):
    """Patterns (s, t) != (1, 1) with nonzero varpi and every tau_j <= B.

    A prime p can only appear if it touches every block, so p^min(m) <= B.
    Patterns are built prime by prime from the nonzero local shapes; any
    pattern outside this set has varpi = 0 or an empty stratum.
    """
    m = tuple(m)
    shapes = comb.nonzero_local_shapes(m)
    out = []

    def rec(primes, start, current, weight):
        for i in range(start, len(primes)):
            p = primes[i]
            for T, w in shapes:
                local = comb.pattern_from_positions(T, p, m)
                nxt = comb.combine([current, local])
                if all(tau <= B for tau in nxt.sizes(m)):
                    out.append((nxt, weight * w))
                    rec(primes, i + 1, nxt, weight * w)

    rec(primes_up_to(int(B ** (1.0 / min(m))) + 1), 0, comb.DivisorPattern.ones(m), 1)
    return out


def inclusion_exclusion(c, m, B):
    """Both sides of the primitive-count identity, enumerated independently."""
    base = count_stratum(c, m, B).count
    weighted = 0
    terms = 0
    for pattern, w in admissible_patterns(m, B):
        n_st = count_stratum(c, m, B, pattern).count
        if n_st:
            weighted += w * n_st
            terms += 1
    return {"primitive": count_primitive(c, m, B), "strata_sum": base + weighted, "base": base,
            "patterns": terms}


def exponent_fit(points):
    """Least-squares line through (log B, log count): (slope, intercept, rms residual)."""
    pts = [(float(b), float(n)) for b, n in points]
    if len(pts) < 3:
        raise DegenerateInput("need at least three points")
    if any(b <= 0 or n <= 0 for b, n in pts):
        raise DegenerateInput("B and counts must be positive")
    x = np.log([b for b, _ in pts])
    y = np.log([n for _, n in pts])
    if np.ptp(x) == 0:
        raise DegenerateInput("all B values are equal")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))
