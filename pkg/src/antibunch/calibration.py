"""Back-solving simulator knobs from the published counting rates.

None of the knobs below is a measured quantity of the original setup; each
one is pinned to a single observable of the results table by inverting the
forward model.
"""
from __future__ import annotations

import math

from .source import calibrate_pair_rate

FWHM_PER_SIGMA = 2 * math.sqrt(2 * math.log(2))

# counts per measurement, as published (doubles and noise over 600 s)
TABLE1 = {
    "SL": {"R_HA": 94.8e3, "R_H(A)": 5570e3, "P_A": 1.703e-2,
           "R_HB": 63.8e3, "R_H(B)": 5860e3, "P_B": 1.090e-2,
           "R_HAB": 4, "R_H(AB)": 17145e3, "P(1,1)": 2.3e-7,
           "R_HN": 50, "R_H(N)": 5500e3, "P_N": 9.0e-6},
    "TL": {"R_HA": 99.0e3, "R_H(A)": 6130e3, "P_A": 1.616e-2,
           "R_HB": 62.2e3, "R_H(B)": 6100e3, "P_B": 1.019e-2,
           "R_HAB": 4, "R_H(AB)": 18345e3, "P(1,1)": 2.2e-7},
}
DOUBLES_SECONDS = 600
TRIPLES_SECONDS = 1800


def fwhm_to_sigma(fwhm):
    return fwhm / FWHM_PER_SIGMA


def delay_sigma(jitter_h, jitter_x, resolution=0):
    """Std. dev. of a quantized herald-to-target delay: both jitters plus two floors."""
    return math.sqrt(jitter_h**2 + jitter_x**2 + 2 * resolution**2 / 12)


def window_capture(sigma, width, offset=0.0):
    """Fraction of a Gaussian delay peak inside a window of ``width`` ps.

    ``offset`` is the distance between peak and window centre.
    """
    if sigma == 0:
        return 1.0 if abs(offset) < width / 2 else 0.0
    s = sigma * math.sqrt(2)
    return 0.5 * (math.erf((width / 2 - offset) / s) + math.erf((width / 2 + offset) / s))


def signal_efficiency(target_p, noise_p, coupling, split, capture):
    """End-of-arm transmission x detector efficiency giving heralded probability ``target_p``.

    The accidental contribution ``noise_p`` (background per herald per window)
    is removed first.
    """
    return (target_p - noise_p) / (coupling * split * capture)


def dark_rate_for(noise_p, window_ps, signal_singles):
    """Dark rate (1/s) so that total uncorrelated singles give ``noise_p`` per window."""
    return noise_p / (window_ps * 1e-12) - signal_singles


def herald_pair_rate(block, coupling, herald_efficiency, seconds=DOUBLES_SECONDS):
    return calibrate_pair_rate(TABLE1[block]["R_H(A)"] / seconds, coupling * herald_efficiency)
