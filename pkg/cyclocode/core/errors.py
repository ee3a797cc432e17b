class CyclocodeError(Exception):
    """Base class for all library errors"""


class ValidationError(CyclocodeError, ValueError):
    """Input rejected: non-prime modulus, index mismatch, zero sequence and the like"""


class PrecisionLossError(CyclocodeError, ArithmeticError):
    """Floating-point correlation drifted too far from the integer lattice"""

    def __init__(self, deviation: float, threshold: float):
        self.deviation = deviation
        self.threshold = threshold
        super().__init__(
            f"FFT rounding deviation {deviation:.3e} exceeds threshold {threshold:.3e}"
        )
