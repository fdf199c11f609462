"""Iris fuzzy sketches on Reed-Muller product codes with min-sum decoding."""

from .capacity import (
    CapacityQuery,
    ChannelSample,
    best_theoretical_frr,
    binary_entropy,
    entropy_inverse,
    is_decodable_in_principle,
    theta,
)
from .codes import ERASED, ReedMullerCode, masked_relative_distance, ml_decode_oracle, rm_encode, rotated_best_distance
from .minsum import DecodeResult, DecodeStatus, ProductCode, min_sum_decode, product_encode
from .sketch import Interleaver, Sketch, Template, enroll, verify

__version__ = "0.1.0"
