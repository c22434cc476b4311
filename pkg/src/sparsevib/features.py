"""Scale-invariant condition indicators.

Convolutional filtering loses the absolute amplitude scale of the input,
so every feature here is invariant to multiplying the signal by any
nonzero constant: the generalized lp/lq sparsity ratio, kurtosis (its
p=2, q=4 member, up to the ``N / J^2`` mapping), and the band-limited
envelope harmonic-to-noise ratio (BLEHNR) evaluated at the bearing
defect frequencies.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core_signal import autocorrelation, hilbert_envelope
from .errors import DegenerateInputError

__all__ = [
    "BearingGeometry",
    "FaultFrequencies",
    "FeatureVector",
    "lp_lq_norm",
    "kurtosis",
    "fault_frequencies",
    "blehnr",
    "extract_feature_vector",
]

FEATURE_NAMES = ("kurtosis", "l1_l2", "blehnr_bpfo", "blehnr_bpfi", "blehnr_bsf")

DEFAULT_BAND_FRACTION = 0.02


@dataclass(frozen=True)
class BearingGeometry:
    """Rolling-element bearing geometry for defect-frequency kinematics."""

    n_rolling_elements: int
    roller_diameter: float
    pitch_diameter: float
    contact_angle_rad: float = 0.0

    def __post_init__(self):
        if self.n_rolling_elements < 2:
            raise ValueError("need at least 2 rolling elements")
        if not (0 < self.roller_diameter < self.pitch_diameter):
            raise ValueError("require 0 < roller_diameter < pitch_diameter")
        ratio = self.roller_diameter / self.pitch_diameter
        if abs(ratio * math.cos(self.contact_angle_rad)) >= 1.0:
            raise ValueError("invalid geometry: |cos(angle) * d/D| must be < 1")


@dataclass(frozen=True)
class FaultFrequencies:
    """Characteristic defect frequencies in Hz (outer race, inner race, roller)."""

    bpfo_hz: float
    bpfi_hz: float
    bsf_hz: float

    def __post_init__(self):
        for name in ("bpfo_hz", "bpfi_hz", "bsf_hz"):
            if not (getattr(self, name) > 0):
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class FeatureVector:
    """The five-feature snapshot descriptor used by the health models."""

    kurtosis: float
    l1_l2: float
    blehnr_bpfo: float
    blehnr_bpfi: float
    blehnr_bsf: float

    def as_array(self):
        return np.array(
            [self.kurtosis, self.l1_l2, self.blehnr_bpfo, self.blehnr_bpfi, self.blehnr_bsf]
        )


def lp_lq_norm(f, p, q):
    """Generalized sparsity ratio ``(||f||_p / ||f||_q)^p`` for ``0 < p < q``.

    Scale-invariant by construction; computed on magnitudes normalized by
    their maximum so that rescaled inputs reproduce the same value to
    machine precision.
    """
    f = np.asarray(f, dtype=np.float64)
    if not (0 < p < q):
        raise ValueError("require 0 < p < q")
    mags = np.abs(f)
    peak = mags.max(initial=0.0)
    if peak == 0.0:
        raise DegenerateInputError("lp/lq norm of the zero vector is undefined")
    mags = mags / peak
    norm_p = np.sum(mags**p) ** (1.0 / p)
    norm_q = np.sum(mags**q) ** (1.0 / q)
    return float((norm_p / norm_q) ** p)


def kurtosis(f):
    """Non-excess sample kurtosis ``N * sum((f-m)^4) / (sum((f-m)^2))^2``.

    Mean is removed first; a Gaussian sequence scores about 3.
    """
    f = np.asarray(f, dtype=np.float64)
    if f.size < 4:
        raise ValueError("kurtosis needs at least 4 samples")
    fc = f - f.mean()
    peak = np.abs(fc).max(initial=0.0)
    if peak == 0.0:
        raise DegenerateInputError("kurtosis of a zero-variance vector is undefined")
    fc = fc / peak
    m2 = np.dot(fc, fc)
    return float(f.size * np.sum(fc**4) / (m2 * m2))


def fault_frequencies(geometry, shaft_hz):
    """Defect frequencies from bearing kinematics at a given shaft speed."""
    if not (shaft_hz > 0):
        raise ValueError("shaft_hz must be positive")
    n = geometry.n_rolling_elements
    ratio = geometry.roller_diameter / geometry.pitch_diameter
    cos_term = ratio * math.cos(geometry.contact_angle_rad)
    bpfo = 0.5 * n * shaft_hz * (1.0 - cos_term)
    bpfi = 0.5 * n * shaft_hz * (1.0 + cos_term)
    bsf = shaft_hz / (2.0 * ratio) * (1.0 - cos_term**2)
    return FaultFrequencies(bpfo_hz=bpfo, bpfi_hz=bpfi, bsf_hz=bsf)


def _band_lags(n_samples, sample_rate_hz, fault_hz, band_fraction):
    if not (0 < band_fraction <= 0.2):
        raise ValueError("band_fraction must lie in (0, 0.2]")
    period_samples = sample_rate_hz / fault_hz
    if period_samples < 2.0:
        raise ValueError(f"fault period {fault_hz} Hz spans fewer than 2 samples")
    lo = math.ceil((1.0 - band_fraction) * period_samples)
    hi = math.floor((1.0 + band_fraction) * period_samples)
    if lo > hi:
        raise ValueError("search band is empty after rounding to integer lags")
    if hi >= n_samples:
        raise ValueError("search band extends past the available signal length")
    return lo, hi


def _blehnr_from_acf(acf_values, lo, hi, ratio_form):
    peak = float(np.max(acf_values[lo : hi + 1]))
    if ratio_form:
        return peak / (1.0 - peak) if peak < 1.0 else math.inf
    return peak


def blehnr(signal, fault_hz, band_fraction=DEFAULT_BAND_FRACTION, ratio_form=False):
    """Band-limited envelope harmonic-to-noise ratio at a fault frequency.

    Highest value of the envelope's normalized autocorrelation over integer
    lags within ``(1 ± band_fraction) / fault_hz``.  With ``ratio_form``
    the peak ``r`` is mapped to the harmonic-to-noise quotient
    ``r / (1 - r)``; the default reports the raw peak, bounded in [-1, 1].
    """
    lo, hi = _band_lags(len(signal), signal.sample_rate_hz, fault_hz, band_fraction)
    env = hilbert_envelope(signal)
    acf = autocorrelation(env.samples, hi)
    return _blehnr_from_acf(acf.values, lo, hi, ratio_form)


def extract_feature_vector(signal, faults, band_fraction=DEFAULT_BAND_FRACTION):
    """Assemble the five-feature vector for one signal snapshot.

    Kurtosis and the l1/l2 ratio come from the raw samples; the three
    BLEHNR features share a single envelope autocorrelation evaluated out
    to the largest requested lag.
    """
    targets = (faults.bpfo_hz, faults.bpfi_hz, faults.bsf_hz)
    bands = [
        _band_lags(len(signal), signal.sample_rate_hz, hz, band_fraction) for hz in targets
    ]
    env = hilbert_envelope(signal)
    acf = autocorrelation(env.samples, max(hi for _, hi in bands))
    values = [_blehnr_from_acf(acf.values, lo, hi, ratio_form=False) for lo, hi in bands]
    return FeatureVector(
        kurtosis=kurtosis(signal.samples),
        l1_l2=lp_lq_norm(signal.samples, 1, 2),
        blehnr_bpfo=values[0],
        blehnr_bpfi=values[1],
        blehnr_bsf=values[2],
    )
