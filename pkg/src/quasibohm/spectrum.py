"""Spectral verification of quasiperiodicity: Hann-windowed FFT peak
extraction and matching of peaks to integer combinations of the base
angular frequencies."""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

TWO_PI = 2.0 * np.pi


@dataclass
class Peak:
    frequency: float       # angular, rad / time
    amplitude: float
    combo: tuple | None    # integer vector k, or None if unmatched
    residual: float

    @property
    def matched(self):
        return self.combo is not None


@dataclass
class SpectrumReport:
    peaks: list
    resolution: float
    threshold: float
    omegas: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def unmatched(self):
        return [p for p in self.peaks if not p.matched]


def power_spectrum(series, sample_dt):
    """Peaks of the amplitude spectrum of a uniformly sampled real signal.

    Mean is removed and a Hann window applied over the actual record; the
    windowed record is zero-padded to the next power of two so a radix-2 FFT
    applies regardless of input length.  Peak frequencies (angular) are
    refined by quadratic interpolation on the log magnitude.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or len(x) < 64:
        raise InvalidParameterError("series must be 1D with at least 64 samples")
    if sample_dt <= 0:
        raise InvalidParameterError("sample_dt must be positive")
    n = len(x)
    w = np.hanning(n)
    xw = (x - np.mean(x)) * w
    n_fft = 1 << (n - 1).bit_length()
    mag = np.abs(np.fft.rfft(xw, n=n_fft)) * 2.0 / np.sum(w)
    df = TWO_PI / (n_fft * sample_dt)
    if np.max(mag) == 0.0:
        return []
    floor = 1e-6 * np.max(mag)
    peaks = []
    for k in range(1, len(mag) - 1):
        if mag[k] > mag[k - 1] and mag[k] >= mag[k + 1] and mag[k] > floor:
            lm, lc, lp = np.log(mag[k - 1 : k + 2] + 1e-300)
            denom = lm - 2.0 * lc + lp
            delta = 0.5 * (lm - lp) / denom if denom < 0 else 0.0
            delta = float(np.clip(delta, -0.5, 0.5))
            freq = (k + delta) * df
            amp = float(np.exp(lc - 0.25 * (lm - lp) * delta))
            peaks.append((freq, amp))
    peaks.sort(key=lambda p: -p[1])
    return peaks


def match_combinations(peaks, omegas, k_max=4, tol=None, threshold=0.01,
                       resolution=None):
    """Assign each retained peak the integer vector k minimizing
    |f - sum_i k_i w_i| over |k_i| <= k_max; ties broken by smallest sum |k_i|,
    then lexicographically.

    threshold is a fraction of the maximum spectral power: peaks whose squared
    amplitude falls below threshold * max(amplitude)^2 are dropped.  (Power,
    not amplitude, so window sidelobes of strong lines never register.)
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    n = len(omegas)
    if resolution is None:
        resolution = 0.0
    if tol is None:
        tol = 2.0 * resolution if resolution > 0 else 1e-6
    if not peaks:
        return SpectrumReport([], resolution, threshold, omegas)
    max_amp = max(a for _, a in peaks)
    kept = [(f, a) for f, a in peaks if a * a >= threshold * max_amp * max_amp]
    kept.sort(key=lambda p: -p[1])

    if n == 0:
        out = [
            Peak(f, a, (), abs(f)) if abs(f) <= tol else Peak(f, a, None, abs(f))
            for f, a in kept
        ]
        return SpectrumReport(out, resolution, threshold, omegas)

    combos = sorted(
        itertools.product(range(-k_max, k_max + 1), repeat=n),
        key=lambda k: (sum(abs(c) for c in k), k),
    )
    combos_arr = np.array(combos)
    sums = combos_arr @ omegas
    out = []
    for f, a in kept:
        r = np.abs(f - sums)
        rmin = float(np.min(r))
        idx = int(np.flatnonzero(r <= rmin + 1e-12)[0])  # combos pre-sorted for ties
        if rmin <= tol:
            out.append(Peak(f, a, tuple(int(c) for c in combos_arr[idx]), rmin))
        else:
            out.append(Peak(f, a, None, rmin))
    return SpectrumReport(out, resolution, threshold, omegas)


def analyze_trajectory(positions, sample_dt, omegas, k_max=4, threshold=0.01):
    """Full pipeline: spectrum of x(t) matched against the frequency lattice."""
    resolution = TWO_PI / (len(positions) * sample_dt)
    peaks = power_spectrum(positions, sample_dt)
    return match_combinations(
        peaks, omegas, k_max=k_max, tol=2.0 * resolution,
        threshold=threshold, resolution=resolution,
    )
