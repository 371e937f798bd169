"""Summary statistics of error time series: per-revolution envelopes, trends and peak phases."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elements import TWO_PI

DAY = 86400.0


def _complete(rev):
    """Indices of the revolutions fully covered by the samples."""
    ids = np.unique(rev)
    return ids[1:-1] if len(ids) > 2 else ids


@dataclass(frozen=True)
class Envelope:
    """Per-revolution statistics of a series."""

    day: np.ndarray  # mid time of each revolution (days)
    mean: np.ndarray
    peak_to_peak: np.ndarray
    peak_phase: np.ndarray  # distance of the largest |deviation| from perigee, in periods (0..0.5)

    @property
    def amplitude(self) -> float:
        """Median peak-to-peak oscillation over the revolutions."""
        return float(np.median(self.peak_to_peak))

    @property
    def trend_per_day(self) -> float:
        """Slope of a linear fit to the per-revolution means, per day."""
        if len(self.day) < 2:
            return 0.0
        return float(np.polyfit(self.day, self.mean, 1)[0])


def envelope(times, values, mean_anomaly) -> Envelope:
    """Per-revolution mean, peak-to-peak and phase of the largest deviation from the revolution median."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    ell = np.unwrap(np.asarray(mean_anomaly, dtype=float))
    rev = np.floor(ell / TWO_PI).astype(int)
    rows = []
    for r in _complete(rev):
        i = np.flatnonzero(rev == r)
        v = values[i]
        j = i[np.argmax(np.abs(v - np.median(v)))]
        phase = (ell[j] / TWO_PI) % 1.0
        rows.append((times[i].mean() / DAY, v.mean(), np.ptp(v), min(phase, 1.0 - phase)))
    day, mean, ptp, phase = (np.array(c) for c in zip(*rows))
    return Envelope(day, mean, ptp, phase)


def maximum_phase(values, mean_anomaly) -> np.ndarray:
    """Distance from perigee (periods, 0..0.5) of the maximum of each complete revolution."""
    values = np.asarray(values, dtype=float)
    ell = np.unwrap(np.asarray(mean_anomaly, dtype=float))
    rev = np.floor(ell / TWO_PI).astype(int)
    out = []
    for r in _complete(rev):
        i = np.flatnonzero(rev == r)
        phase = (ell[i[np.argmax(values[i])]] / TWO_PI) % 1.0
        out.append(min(phase, 1.0 - phase))
    return np.array(out)
