"""Compiled inner loops for the swap chains.

Multiplicities are kept in an open-addressing table (linear probing,
backward-shift deletion) keyed by ``a * n + b`` with ``a <= b``.
"""
import math

import numba as nb
import numpy as np

OUT_OF_SPACE, NON_CHANGING, ACCEPTED, REJECTED, LAZY_HOLD = range(5)
N_OUTCOMES = 5

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@nb.njit(cache=True, inline="always")
def _home(key, shift):
    return np.int64((np.uint64(key) * _GOLDEN) >> np.uint64(shift))


@nb.njit(cache=True)
def _find(keys, key, mask, shift):
    i = _home(key, shift)
    while keys[i] != -1 and keys[i] != key:
        i = (i + 1) & mask
    return i


@nb.njit(cache=True)
def ht_get(keys, vals, key, mask, shift):
    i = _find(keys, key, mask, shift)
    if keys[i] == key:
        return vals[i]
    return 0


@nb.njit(cache=True)
def ht_add(keys, vals, key, delta, mask, shift):
    i = _find(keys, key, mask, shift)
    if keys[i] == -1:
        keys[i] = key
        vals[i] = delta
    else:
        vals[i] += delta
    if vals[i] == 0:
        j = i
        while True:
            j = (j + 1) & mask
            if keys[j] == -1:
                break
            k = _home(keys[j], shift)
            if (j > i and (k <= i or k > j)) or (j < i and k <= i and k > j):
                keys[i] = keys[j]
                vals[i] = vals[j]
                i = j
        keys[i] = -1
        vals[i] = 0


def build_table(src, dst, n):
    """Allocate and fill a multiplicity table for the given occurrences."""
    m = len(src)
    bits = max(4, int(math.ceil(math.log2(max(2 * m, 2)))) + 1)
    size = 1 << bits
    keys = np.full(size, -1, dtype=np.int64)
    vals = np.zeros(size, dtype=np.int64)
    _fill(keys, vals, src, dst, n, size - 1, 64 - bits)
    return keys, vals, size - 1, 64 - bits


@nb.njit(cache=True)
def _fill(keys, vals, src, dst, n, mask, shift):
    for s in range(len(src)):
        ht_add(keys, vals, _key(src[s], dst[s], n), 1, mask, shift)


@nb.njit(cache=True, inline="always")
def _key(a, b, n):
    if a <= b:
        return a * n + b
    return b * n + a


@nb.njit(cache=True, inline="always")
def _mult(keys, vals, a, b, n, mask, shift):
    return ht_get(keys, vals, _key(a, b, n), mask, shift)


@nb.njit(cache=True)
def _write(src, dst, color, slot, a, b):
    if color[a] < color[b] or (color[a] == color[b] and a <= b):
        src[slot] = a
        dst[slot] = b
    else:
        src[slot] = b
        dst[slot] = a


@nb.njit(cache=True)
def _non_changing(u, v, x, y):
    a0, a1 = min(u, v), max(u, v)
    b0, b1 = min(x, y), max(x, y)
    c0, c1 = min(u, x), max(u, x)
    d0, d1 = min(v, y), max(v, y)
    return (a0 == c0 and a1 == c1 and b0 == d0 and b1 == d1) or (
        a0 == d0 and a1 == d1 and b0 == c0 and b1 == c1
    )


@nb.njit(cache=True)
def rho_of(u, v, x, y, keys, vals, n, mask, shift):
    """Proposal ratio for a changing swap; -1.0 marks a skipped proposal."""
    loops = (u == v) + (x == y)
    if u == v and v == x and x == y:
        return -1.0
    # distinct-vertex count of {u, v, x, y}
    k = 1
    if v != u:
        k += 1
    if x != u and x != v:
        k += 1
    if y != u and y != v and y != x:
        k += 1
    if k == 4:
        return ((_mult(keys, vals, u, x, n, mask, shift) + 1.0)
                * (_mult(keys, vals, v, y, n, mask, shift) + 1.0)
                / (_mult(keys, vals, u, v, n, mask, shift)
                   * _mult(keys, vals, x, y, n, mask, shift)))
    if k == 3:
        base = ((_mult(keys, vals, u, x, n, mask, shift) + 1.0)
                * (_mult(keys, vals, v, y, n, mask, shift) + 1.0)
                / (_mult(keys, vals, u, v, n, mask, shift)
                   * _mult(keys, vals, x, y, n, mask, shift)))
        if loops > 0:
            return base / 2.0
        return 2.0 * base
    if k == 2:
        if loops == 1:
            return -1.0
        if loops == 2:
            wux = _mult(keys, vals, u, x, n, mask, shift)
            return ((wux + 2.0) * (wux + 1.0)
                    / (4.0 * _mult(keys, vals, u, u, n, mask, shift)
                       * _mult(keys, vals, x, x, n, mask, shift)))
        wuv = _mult(keys, vals, u, v, n, mask, shift)
        return (4.0 * (_mult(keys, vals, u, u, n, mask, shift) + 1.0)
                * (_mult(keys, vals, v, v, n, mask, shift) + 1.0)
                / (wuv * (wuv - 1.0)))
    return -1.0


@nb.njit(cache=True)
def _try_swap(i, j, u, v, x, y, src, dst, color, keys, vals, n, mask, shift,
              loop_logw, rng, tallies):
    """MH step for the swap <(u,v),(x,y)> -> <(u,x),(v,y)> on slots i, j."""
    loops = (u == v) + (x == y)
    k2_one_loop = loops == 1 and ((u == v and (x == u or y == u)) or (x == y and (u == x or v == x)))
    if (u == v and v == x and x == y) or k2_one_loop or _non_changing(u, v, x, y):
        tallies[NON_CHANGING] += 1
        return
    rho = rho_of(u, v, x, y, keys, vals, n, mask, shift)
    if rho < 0.0:
        tallies[NON_CHANGING] += 1
        return
    acc = rho
    if loop_logw != 0.0:
        acc *= math.exp(loop_logw * ((u == x) + (v == y) - loops))
    if acc >= 1.0 or rng.random() < acc:
        ht_add(keys, vals, _key(u, v, n), -1, mask, shift)
        ht_add(keys, vals, _key(x, y, n), -1, mask, shift)
        ht_add(keys, vals, _key(u, x, n), 1, mask, shift)
        ht_add(keys, vals, _key(v, y, n), 1, mask, shift)
        _write(src, dst, color, i, u, x)
        _write(src, dst, color, j, v, y)
        tallies[ACCEPTED] += 1
    else:
        tallies[REJECTED] += 1


@nb.njit(cache=True, nogil=True)
def run_sirius(src, dst, cstart, csize, color, keys, vals, n, mask, shift,
               n_active, steps, loop_logw, cum_weights, rng, tallies):
    """Refined chain: the partner edge always comes from the same color class.

    With an empty ``cum_weights`` the first occurrence is uniform over the
    active slots.  Otherwise ``cum_weights`` is a cumulative distribution over
    the active slots used for the first draw instead.
    """
    if n_active == 0:
        tallies[NON_CHANGING] += steps
        return
    weighted = len(cum_weights) > 0
    for _ in range(steps):
        if weighted:
            i = np.searchsorted(cum_weights, rng.random() * cum_weights[-1], side="right")
            if i >= n_active:
                i = n_active - 1
        else:
            i = rng.integers(0, n_active)
        s = cstart[i]
        j = s + rng.integers(0, csize[i] - 1)
        if j >= i:
            j += 1
        u = src[i]
        v = dst[i]
        x = src[j]
        y = dst[j]
        p = rng.random()
        if color[u] != color[v] or p < 0.5:
            u, v = v, u
        _try_swap(i, j, u, v, x, y, src, dst, color, keys, vals, n, mask, shift,
                  loop_logw, rng, tallies)


@nb.njit(cache=True, nogil=True)
def run_des(src, dst, color, keys, vals, n, mask, shift, steps, check_colors,
            count_valid_only, loop_logw, rng, tallies):
    """Baseline chain: a uniform ordered pair of distinct occurrences and a coin.

    With ``check_colors`` the swap must keep the colored degrees (otherwise
    the step is out of space); without it this is the plain degree-preserving
    chain.  ``count_valid_only`` keeps drawing until ``steps`` in-space
    proposals have been processed.
    """
    m = len(src)
    if m < 2:
        tallies[NON_CHANGING] += steps
        return
    done = 0
    while done < steps:
        i = rng.integers(0, m)
        j = rng.integers(0, m - 1)
        if j >= i:
            j += 1
        u = src[i]
        v = dst[i]
        x = src[j]
        y = dst[j]
        if rng.random() < 0.5:
            u, v = v, u
        if check_colors and not (color[x] == color[v] and color[y] == color[u]):
            tallies[OUT_OF_SPACE] += 1
            if not count_valid_only:
                done += 1
            continue
        _try_swap(i, j, u, v, x, y, src, dst, color, keys, vals, n, mask, shift,
                  loop_logw, rng, tallies)
        done += 1


@nb.njit(cache=True)
def endpoint_degree_assortativity(src, dst, deg):
    """Pearson correlation of endpoint degrees over both orientations of every edge."""
    m = len(src)
    s1 = 0.0
    s2 = 0.0
    sxy = 0.0
    for e in range(m):
        a = float(deg[src[e]])
        b = float(deg[dst[e]])
        s1 += a + b
        s2 += a * a + b * b
        sxy += 2.0 * a * b
    cnt = 2.0 * m
    mean = s1 / cnt
    var = s2 / cnt - mean * mean
    cov = sxy / cnt - mean * mean
    if var <= 1e-12 * max(1.0, mean * mean):
        return np.nan
    return cov / var
