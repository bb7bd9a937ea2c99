"""sRGB transfer functions, Rec.709 luma and 8-bit quantization.

Every module that touches pixel values goes through these helpers so the
encode/decode pair and the rounding rule stay bit-identical everywhere.
"""

import numpy as np

# Rec.709 luma weights, used on both encoded and linear channels.
LUMA_R = 0.2126
LUMA_G = 0.7152
LUMA_B = 0.0722


def srgb_encode(linear):
    """Linear light -> sRGB display value, both in [0, 1]."""
    linear = np.asarray(linear, dtype=np.float64)
    lo = 12.92 * linear
    hi = 1.055 * np.power(np.maximum(linear, 1e-12), 1.0 / 2.4) - 0.055
    return np.where(linear <= 0.0031308, lo, hi)


def srgb_decode(encoded):
    """sRGB display value -> linear light, both in [0, 1]."""
    encoded = np.asarray(encoded, dtype=np.float64)
    lo = encoded / 12.92
    hi = np.power((encoded + 0.055) / 1.055, 2.4)
    return np.where(encoded <= 0.04045, lo, hi)


def quantize_u8(encoded):
    """Round-half-up quantization of encoded values in [0, 1] to uint8."""
    v = np.clip(np.asarray(encoded, dtype=np.float64), 0.0, 1.0)
    return np.floor(v * 255.0 + 0.5).astype(np.uint8)


def dequantize(pixels):
    """uint8 (or float) pixel array -> encoded floats in [0, 1]."""
    return np.asarray(pixels, dtype=np.float64) / 255.0


def luma(img01):
    """Per-pixel Rec.709 luma of an (..., 3) array of [0, 1] values."""
    img01 = np.asarray(img01, dtype=np.float64)
    return (LUMA_R * img01[..., 0]
            + LUMA_G * img01[..., 1]
            + LUMA_B * img01[..., 2])


def mean_encoded_luma(pixels):
    """Mean Rec.709 luma of a uint8 frame, on the encoded 0..1 scale."""
    return float(np.mean(luma(dequantize(pixels))))


def mean_linear_luma(pixels):
    """Mean Rec.709 luma of a uint8 frame after decoding to linear light."""
    return float(np.mean(luma(srgb_decode(dequantize(pixels)))))
