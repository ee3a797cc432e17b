import numpy as np
import pytest
from cyclocode.core.errors import ValidationError
from cyclocode.services.transforms import bluestein_dft, dft, fft_pow2, ifft_pow2, is_pow2, next_pow2


def test_powers_of_two():
    assert [next_pow2(n) for n in (1, 2, 3, 17, 1024, 1025)] == [1, 2, 4, 32, 1024, 2048]
    assert is_pow2(1) and is_pow2(4096) and not is_pow2(0) and not is_pow2(12)


@pytest.mark.parametrize("size", [1, 2, 8, 64, 2048])
def test_fft_pow2_matches_numpy(rng, size):
    x = rng.normal(size=size) + 1j * rng.normal(size=size)
    assert np.allclose(fft_pow2(x), np.fft.fft(x), atol=1e-9)
    assert np.allclose(ifft_pow2(fft_pow2(x)), x, atol=1e-12)


def test_fft_pow2_is_batched(rng):
    x = rng.normal(size=(3, 5, 16))
    assert np.allclose(fft_pow2(x), np.fft.fft(x, axis=-1), atol=1e-9)


def test_fft_pow2_rejects_other_lengths():
    with pytest.raises(ValidationError):
        fft_pow2(np.ones(12))


@pytest.mark.parametrize("size", [1, 3, 17, 100, 1009])
def test_bluestein_matches_numpy(rng, size):
    x = rng.normal(size=size) + 1j * rng.normal(size=size)
    assert np.allclose(bluestein_dft(x), np.fft.fft(x), atol=1e-8)
    assert np.allclose(bluestein_dft(x, inverse=True), size * np.fft.ifft(x), atol=1e-8)


def test_dft_dispatch(rng):
    for size in (16, 15):
        x = rng.normal(size=(2, size))
        assert np.allclose(dft(x), np.fft.fft(x, axis=-1), atol=1e-9)
