import math
import zlib

import numpy as np

from . import constant
from .errors import PrecisionLimitError


def substream(seed: int, name: str) -> np.random.Generator:
    """
    Independent random stream derived from a master seed and a stream name.

    Streams with different names never share draws, so changing how many
    numbers one consumer takes leaves every other consumer untouched.

    :param int seed: master seed
    :param str name: stream label, e.g. 'A', 'C', 'perturb-A'
    :rtype: numpy.random.Generator
    """
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def digits_for(unit_roundoff: float) -> int:
    """
    Decimal digits needed to reach the given unit roundoff.

    :param float unit_roundoff: target roundoff, > 0
    :return: digits clamped from below at double precision
    """
    if not unit_roundoff > 0 or math.isnan(unit_roundoff):
        raise PrecisionLimitError(f"unit roundoff {unit_roundoff} cannot be reached with finite precision")
    digits = max(constant.MIN_DIGITS, math.ceil(-math.log10(unit_roundoff)))
    if digits > constant.MAX_DIGITS:
        raise PrecisionLimitError(f"{digits} digits requested, limit is {constant.MAX_DIGITS}")
    return digits


def is_confluent(a: complex, b: complex) -> bool:
    return abs(a - b) <= constant.CONFLUENCE_TOLERANCE * max(1.0, abs(a), abs(b))
