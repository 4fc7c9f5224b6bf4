import math
import random

import pytest

from beaconnav.errors import DegenerateSampleError, InvalidArgumentError, SampleTooSmallError
from beaconnav.evalkit.stats import shapiro_wilk, wilcoxon_signed_rank

from shapiro_fixtures import SHAPIRO_FIXTURES


# --- Shapiro-Wilk -------------------------------------------------------------


def test_shapiro_matches_reference_fixtures():
    for data, want_w, want_p in SHAPIRO_FIXTURES:
        w, p = shapiro_wilk(data)
        assert abs(w - want_w) <= 1e-3, f"n={len(data)}"
        assert abs(math.log(p) - math.log(want_p)) <= 0.02, f"n={len(data)}"
        assert 0.0 < w <= 1.0


def test_shapiro_degenerate_and_small():
    with pytest.raises(DegenerateSampleError):
        shapiro_wilk([2.0, 2.0, 2.0, 2.0])
    with pytest.raises(SampleTooSmallError):
        shapiro_wilk([1.0, 2.0])
    with pytest.raises(InvalidArgumentError):
        shapiro_wilk(list(range(5001)))


def test_shapiro_affine_invariance():
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randrange(5, 60)
        x = [rng.gauss(0, 1) for _ in range(n)]
        w0, p0 = shapiro_wilk(x)
        a = rng.uniform(0.1, 10.0)
        b = rng.uniform(-100, 100)
        w1, p1 = shapiro_wilk([a * v + b for v in x])
        assert abs(w0 - w1) <= 1e-9
        assert abs(p0 - p1) <= 1e-9


# --- Wilcoxon signed rank -----------------------------------------------------


def _oracle_ranks(absd):
    """Average ranks, computed by grouping equal values over a sorted copy."""
    pairs = sorted((v, i) for i, v in enumerate(absd))
    ranks = [0.0] * len(absd)
    k = 0
    while k < len(pairs):
        j = k
        while j + 1 < len(pairs) and pairs[j + 1][0] == pairs[k][0]:
            j += 1
        r = sum(range(k + 1, j + 2)) / (j - k + 1)
        for m in range(k, j + 1):
            ranks[pairs[m][1]] = r
        k = j + 1
    return ranks


def wilcoxon_brute_force(x, y, alternative="two-sided"):
    """Exhaustive 2^n enumeration over sign assignments."""
    d = [a - b for a, b in zip(x, y) if a - b != 0.0]
    n = len(d)
    ranks = _oracle_ranks([abs(v) for v in d])
    w_plus = sum(r for r, v in zip(ranks, d) if v > 0)
    w_minus = sum(r for r, v in zip(ranks, d) if v < 0)
    w_obs = min(w_plus, w_minus)
    total = sum(ranks)
    hits = 0
    for mask in range(2**n):
        wp = sum(ranks[i] for i in range(n) if mask >> i & 1)
        if alternative == "two-sided":
            ok = wp <= w_obs + 1e-9 or wp >= total - w_obs - 1e-9
        elif alternative == "greater":
            ok = wp >= w_plus - 1e-9
        else:
            ok = wp <= w_plus + 1e-9
        hits += ok
    return w_obs, min(1.0, hits / 2**n)


def test_wilcoxon_all_positive_n5():
    w, p = wilcoxon_signed_rank([2.0, 3.0, 4.0, 5.0, 6.0], [1.0, 1.0, 1.0, 1.0, 1.0])
    assert w == 0.0
    assert p == 0.0625  # 2 / 2^5, exactly


def test_wilcoxon_identical_samples_degenerate():
    with pytest.raises(DegenerateSampleError):
        wilcoxon_signed_rank([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])


def test_wilcoxon_input_validation():
    with pytest.raises(InvalidArgumentError):
        wilcoxon_signed_rank([1.0], [1.0, 2.0])
    with pytest.raises(SampleTooSmallError):
        wilcoxon_signed_rank([], [])
    with pytest.raises(InvalidArgumentError):
        wilcoxon_signed_rank([1.0], [2.0], alternative="sideways")


def test_wilcoxon_exact_matches_brute_force():
    rng = random.Random(11)
    for trial in range(60):
        n = rng.randrange(1, 13)
        if trial % 3 == 0:
            # integer-valued data forces ties and zero differences
            x = [float(rng.randrange(0, 4)) for _ in range(n)]
            y = [float(rng.randrange(0, 4)) for _ in range(n)]
        else:
            x = [rng.gauss(0, 1) for _ in range(n)]
            y = [rng.gauss(0.4, 1) for _ in range(n)]
        if all(a == b for a, b in zip(x, y)):
            continue
        for alternative in ("two-sided", "greater", "less"):
            w, p = wilcoxon_signed_rank(x, y, alternative=alternative)
            w_o, p_o = wilcoxon_brute_force(x, y, alternative=alternative)
            assert abs(w - w_o) <= 1e-9
            assert abs(p - p_o) <= 1e-12, (n, alternative)


def test_wilcoxon_invariant_under_monotone_transform():
    rng = random.Random(13)
    for _ in range(20):
        n = rng.randrange(4, 12)
        x = [rng.uniform(0.1, 5.0) for _ in range(n)]
        y = [rng.uniform(0.1, 5.0) for _ in range(n)]
        if all(a == b for a, b in zip(x, y)):
            continue
        _, p0 = wilcoxon_signed_rank(x, y)
        # strictly monotone map applied to both samples preserves signs of
        # differences and the ordering of their magnitudes only if it is
        # applied to the differences' ranks; use a shared affine map, which
        # is the transform family the rank statistic is invariant under
        a, b = rng.uniform(0.5, 3.0), rng.uniform(-2.0, 2.0)
        _, p1 = wilcoxon_signed_rank([a * v + b for v in x], [a * v + b for v in y])
        assert abs(p0 - p1) <= 1e-12


def test_wilcoxon_normal_approximation_reference():
    # Frozen reference from an established statistics package (n=30, ties,
    # continuity correction); the approximation path must reproduce it.
    x = [0.4278, -0.5708, 2.6545, -1.6085, 0.6617, -0.1434, -0.3545, 1.0664,
         -1.8179, -0.9847, -0.1142, 1.7413, 0.089, 0.8957, -1.8633, -1.2389,
         0.9695, -0.6282, -0.063, 0.7309, -2.205, -1.2012, -0.0938, -1.5465,
         -0.7106, -0.0424, -0.6651, -0.2688, 0.0411, 1.3302]
    y = [1.9407, -0.6365, 2.2423, -0.647, 1.3201, 0.3059, -0.8311, 1.8324,
         -0.8701, -2.1625, 0.9498, 1.9331, -0.2558, -0.116, -1.8867, -1.0378,
         0.9197, -1.3417, -0.7693, 1.5452, -1.9168, -0.7235, 0.6595, -0.7224,
         0.9275, 0.1505, -0.6227, -0.7854, 0.4906, 1.7918]
    w, p = wilcoxon_signed_rank(x, y)
    assert w == 148.0
    assert abs(p - 0.08403475800202959) <= 1e-9


def test_wilcoxon_one_sided_directions_make_sense():
    x = [5.0, 6.0, 7.0, 8.0, 9.0, 10.0]
    y = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    _, p_greater = wilcoxon_signed_rank(x, y, alternative="greater")
    _, p_less = wilcoxon_signed_rank(x, y, alternative="less")
    assert p_greater < 0.05 < p_less
