"""Wavelet-domain image watermarking toolkit.

Embeds a 16x16 bipolar mark into perceptually significant detail
coefficients of a grayscale image, extracts it non-blindly with
majority-vote detectors, and benchmarks robustness under a catalog of
image attacks.
"""

__version__ = "0.1.0"
