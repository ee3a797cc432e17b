"""Discrete Fourier transforms: iterative radix-2 plus chirp-z for arbitrary lengths

All transforms act on the last axis and accept batches.
"""

from functools import lru_cache
import numpy as np
from cyclocode.core.errors import ValidationError


def next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@lru_cache(maxsize=64)
def _bit_reversal(size: int) -> np.ndarray:
    bits = size.bit_length() - 1
    idx = np.arange(size)
    rev = np.zeros(size, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


@lru_cache(maxsize=64)
def _twiddles(size: int) -> tuple[np.ndarray, ...]:
    stages = []
    block = 2
    while block <= size:
        stages.append(np.exp(-2j * np.pi * np.arange(block // 2) / block))
        block *= 2
    return tuple(stages)


def fft_pow2(x, inverse: bool = False) -> np.ndarray:
    """Unnormalized DFT of power-of-two length; inverse uses the conjugate kernel"""
    x = np.asarray(x, dtype=np.complex128)
    size = x.shape[-1]
    if not is_pow2(size):
        raise ValidationError(f"radix-2 transform needs a power-of-two length, got {size}")
    batch = x.shape[:-1]
    a = x[..., _bit_reversal(size)]
    block = 2
    for w in _twiddles(size):
        half = block // 2
        a = a.reshape(batch + (size // block, block))
        even = a[..., :half]
        odd = a[..., half:] * (np.conj(w) if inverse else w)
        a = np.concatenate((even + odd, even - odd), axis=-1)
        block *= 2
    return a.reshape(x.shape)


def ifft_pow2(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    return fft_pow2(x, inverse=True) / x.shape[-1]


def bluestein_dft(x, inverse: bool = False) -> np.ndarray:
    """Unnormalized DFT of any length via chirp-z convolution"""
    x = np.asarray(x, dtype=np.complex128)
    size = x.shape[-1]
    if size == 0:
        raise ValidationError("cannot transform an empty vector")
    k = np.arange(size)
    sign = 1.0 if inverse else -1.0
    chirp = np.exp(sign * 1j * np.pi * ((k * k) % (2 * size)) / size)

    m = next_pow2(2 * size - 1)
    a = np.zeros(x.shape[:-1] + (m,), dtype=np.complex128)
    a[..., :size] = x * chirp
    b = np.zeros(m, dtype=np.complex128)
    b[:size] = np.conj(chirp)
    if size > 1:
        b[m - size + 1:] = np.conj(chirp[1:])[::-1]

    conv = ifft_pow2(fft_pow2(a) * fft_pow2(b))
    return conv[..., :size] * chirp


def dft(x, inverse: bool = False) -> np.ndarray:
    """Unnormalized DFT of any length, radix-2 when possible"""
    x = np.asarray(x, dtype=np.complex128)
    if is_pow2(x.shape[-1]):
        return fft_pow2(x, inverse=inverse)
    return bluestein_dft(x, inverse=inverse)
