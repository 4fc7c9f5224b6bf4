"""Nonparametric statistics for the paired experiment comparison.

shapiro_wilk follows the classic approximation route: normal order-statistic
scores, polynomial-corrected and renormalized weights, W as the squared
correlation between weights and sorted data, and a normalizing transform of
W whose tail probability gives p.  Valid for 3 <= n <= 5000.

wilcoxon_signed_rank drops zero differences, ranks |d| with average ranks
for ties, and reports W = min(W+, W-).  For effective n <= 25 the p-value
is exact, from the full distribution of W+ over sign assignments (computed
by dynamic programming with ranks scaled to integers); beyond that a normal
approximation with tie and continuity corrections is used.
"""

from __future__ import annotations

import math
from statistics import NormalDist

from ..errors import DegenerateSampleError, InvalidArgumentError, SampleTooSmallError

_ND = NormalDist()

# Ascending-power polynomial coefficients for the weight corrections and the
# W -> z normalizing maps (small-sample in n, large-sample in log n).
_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_C3 = (0.5440, -0.39978, 0.025054, -6.714e-4)
_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_C6 = (-0.4803, -0.082676, 0.0030302)
_G = (-2.273, 0.459)

_PI6 = 6.0 / math.pi
_STQR = math.asin(math.sqrt(0.75))


def _poly(coeffs, x: float) -> float:
    r = 0.0
    for c in reversed(coeffs):
        r = r * x + c
    return r


def _norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _sw_weights(n: int) -> list[float]:
    """Upper-half weights, largest first (index 0 pairs with the extremes)."""
    n2 = n // 2
    if n == 3:
        return [math.sqrt(0.5)]
    an25 = n + 0.25
    m = [_ND.inv_cdf((i - 0.375) / an25) for i in range(1, n2 + 1)]  # negative
    summ2 = 2.0 * sum(v * v for v in m)
    ssumm2 = math.sqrt(summ2)
    rsn = 1.0 / math.sqrt(n)
    a1 = _poly(_C1, rsn) - m[0] / ssumm2
    if n > 5:
        i1 = 2
        a2 = _poly(_C2, rsn) - m[1] / ssumm2
        fac = math.sqrt(
            (summ2 - 2.0 * m[0] ** 2 - 2.0 * m[1] ** 2)
            / (1.0 - 2.0 * a1**2 - 2.0 * a2**2)
        )
        head = [a1, a2]
    else:
        i1 = 1
        fac = math.sqrt((summ2 - 2.0 * m[0] ** 2) / (1.0 - 2.0 * a1**2))
        head = [a1]
    return head + [-v / fac for v in m[i1:]]


def shapiro_wilk(data) -> tuple[float, float]:
    """Normality test; returns (W, p).  Requires 3 <= n <= 5000."""
    n = len(data)
    if n < 3:
        raise SampleTooSmallError(f"shapiro_wilk needs n >= 3, got {n}")
    if n > 5000:
        raise InvalidArgumentError(f"shapiro_wilk supports n <= 5000, got {n}")
    x = sorted(float(v) for v in data)
    if not all(math.isfinite(v) for v in x):
        raise InvalidArgumentError("data must be finite")
    if x[-1] == x[0]:
        raise DegenerateSampleError("all observations are equal")

    a = _sw_weights(n)
    n2 = n // 2
    # W is the squared correlation between the antisymmetric weight vector
    # (-a[0], ..., +a[0]) and the order statistics.
    mean = math.fsum(x) / n
    sax = math.fsum(a[k] * (x[n - 1 - k] - x[k]) for k in range(n2))
    ssx = math.fsum((v - mean) ** 2 for v in x)
    ssa = 2.0 * math.fsum(v * v for v in a)
    w1 = (math.sqrt(ssa * ssx) - sax) * (math.sqrt(ssa * ssx) + sax) / (ssa * ssx)
    w = 1.0 - w1
    w = min(max(w, 0.0), 1.0)

    if w >= 1.0:
        return 1.0, 1.0
    if n == 3:
        p = _PI6 * (math.asin(math.sqrt(w)) - _STQR)
        return w, min(max(p, 0.0), 1.0)
    y = math.log(w1)
    if n <= 11:
        gamma = _poly(_G, n)
        if y >= gamma:
            return w, 1e-19  # beyond the transform's domain: vanishing p
        y = -math.log(gamma - y)
        mu = _poly(_C3, n)
        sigma = math.exp(_poly(_C4, n))
    else:
        u = math.log(n)
        mu = _poly(_C5, u)
        sigma = math.exp(_poly(_C6, u))
    return w, _norm_sf((y - mu) / sigma)


def _average_ranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _exact_wplus_counts(scaled_ranks: list[int]) -> list[int]:
    """counts[s] = number of sign assignments with scaled W+ equal to s."""
    total = sum(scaled_ranks)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in scaled_ranks:
        for s in range(total, r - 1, -1):
            counts[s] += counts[s - r]
    return counts


EXACT_N_CUTOFF = 25


def wilcoxon_signed_rank(x, y, alternative: str = "two-sided") -> tuple[float, float]:
    """Paired signed-rank test; returns (W, p) with W = min(W+, W-).

    ``alternative`` is "two-sided" (default), "greater" (x tends above y) or
    "less".  Zero differences are dropped; all-zero input is degenerate.
    """
    if alternative not in ("two-sided", "greater", "less"):
        raise InvalidArgumentError(f"unknown alternative {alternative!r}")
    if len(x) != len(y):
        raise InvalidArgumentError("paired samples must have equal length")
    if len(x) == 0:
        raise SampleTooSmallError("empty sample")
    d = [float(a) - float(b) for a, b in zip(x, y)]
    if not all(math.isfinite(v) for v in d):
        raise InvalidArgumentError("data must be finite")
    d = [v for v in d if v != 0.0]
    n = len(d)
    if n == 0:
        raise DegenerateSampleError("all paired differences are zero")

    ranks = _average_ranks([abs(v) for v in d])
    w_plus = math.fsum(r for r, v in zip(ranks, d) if v > 0)
    w_minus = math.fsum(r for r, v in zip(ranks, d) if v < 0)
    w = min(w_plus, w_minus)

    if n <= EXACT_N_CUTOFF:
        scaled = [int(round(2.0 * r)) for r in ranks]
        counts = _exact_wplus_counts(scaled)
        total = sum(scaled)
        denom = float(2**n)
        wp = int(round(2.0 * w_plus))
        if alternative == "greater":
            p = sum(counts[wp:]) / denom
        elif alternative == "less":
            p = sum(counts[: wp + 1]) / denom
        else:
            lo = int(round(2.0 * w))
            p = (sum(counts[: lo + 1]) + sum(counts[total - lo :])) / denom
        return w, min(p, 1.0)

    # Normal approximation with tie and continuity corrections.
    mn = n * (n + 1) / 4.0
    tie_term = 0.0
    seen: dict[float, int] = {}
    for v in d:
        seen[abs(v)] = seen.get(abs(v), 0) + 1
    for t in seen.values():
        tie_term += t**3 - t
    se = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0)
    diff = w_plus - mn
    if alternative == "greater":
        z = (diff - 0.5) / se
        p = _norm_sf(z)
    elif alternative == "less":
        z = (diff + 0.5) / se
        p = 1.0 - _norm_sf(z)
    else:
        z = (abs(diff) - 0.5) / se
        p = 2.0 * _norm_sf(z)
    return w, min(p, 1.0)
