import numpy as np
from numba import njit


@njit(cache=True)
def generator_walk(p, alpha):
    """index[h] = k with alpha^k = h (mod p); index[0] = -1"""
    index = np.empty(p, dtype=np.int32)
    index[0] = -1
    h = 1
    for k in range(p - 1):
        index[h] = k
        h = (h * alpha) % p
    return index


@njit(cache=True)
def class_walk(p, alpha, n):
    """cls[h] = (log_alpha h) mod n; cls[0] = -1"""
    cls = np.empty(p, dtype=np.int32)
    cls[0] = -1
    h = 1
    c = 0
    for _ in range(p - 1):
        cls[h] = c
        c += 1
        if c == n:
            c = 0
        h = (h * alpha) % p
    return cls


@njit(cache=True, nogil=True)
def direct_correlation(a, b):
    """out[s + lb - 1] = sum_j a[j + s] * b[j] for s in -(lb-1)..la-1, exact int64"""
    la = a.shape[0]
    lb = b.shape[0]
    out = np.zeros(la + lb - 1, dtype=np.int64)
    for idx in range(la + lb - 1):
        s = idx - (lb - 1)
        lo = max(0, -s)
        hi = min(lb, la - s)
        acc = 0
        for j in range(lo, hi):
            acc += a[j + s] * b[j]
        out[idx] = acc
    return out


@njit(cache=True)
def lfsr_walk(degree, taps, seed, count):
    """First count output bits of s_{t+m} = sum_i c_i s_{t+i} and the state period (-1 if > count)

    State bit i holds s_{t+i}; taps bit i is c_i.
    """
    mask = (1 << degree) - 1
    feedback = taps & mask
    bits = np.empty(count, dtype=np.int8)
    state = seed
    period = -1
    for t in range(count):
        bits[t] = state & 1
        x = state & feedback
        parity = 0
        while x:
            parity ^= 1
            x &= x - 1
        state = (state >> 1) | (parity << (degree - 1))
        if period < 0 and state == seed:
            period = t + 1
    return bits, period
