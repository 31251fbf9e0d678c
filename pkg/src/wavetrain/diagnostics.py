"""Chaos diagnostics for scalar series and phase-space point clouds.

Covers the Welch power spectral density, spectral flatness, the biased
autocorrelation, and a cluster fractal dimension built from nearest
neighbor counts: n points enclosed within mean radius R(n) scale as
n = k R(n)^D on an attractor of dimension D, and D is read off the
plateau of the local slope d log n / d log R(n).
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy.signal import welch

from .integrate import Trajectory


class DiagnosticsError(Exception):
    """Precondition failures: short series, unbounded input, degenerate data."""


@dataclasses.dataclass
class Spectrum:
    frequencies: np.ndarray
    power: np.ndarray
    window: str
    segment_length: int
    overlap: int
    sample_interval: float

    def dominant_frequency(self) -> float:
        """Location of the strongest bin above DC."""
        return float(self.frequencies[1 + int(np.argmax(self.power[1:]))])


def default_segment_length(n: int) -> int:
    seg = int(2 ** np.floor(np.log2(n / 8)))
    return max(256, min(4096, seg))


def power_spectral_density(series, sample_interval: float,
                           segment_length: int | None = None) -> Spectrum:
    """One-sided Welch density with a Hann taper and 50% overlap.

    The density normalization preserves total power, so the sum of
    power times the bin width recovers the series variance to a few
    percent.
    """
    x = np.asarray(series, float)
    if not np.all(np.isfinite(x)):
        raise DiagnosticsError("series contains non-finite values")
    n = len(x)
    if segment_length is None:
        if n < 512:
            raise DiagnosticsError(
                f"series too short for a spectral estimate ({n} samples, "
                "need at least 512)")
        segment_length = default_segment_length(n)
    segment_length = int(segment_length)
    if n < 2 * segment_length:
        raise DiagnosticsError(
            f"series length {n} is below twice the segment length "
            f"{segment_length}")
    overlap = segment_length // 2
    freqs, power = welch(x, fs=1.0 / sample_interval, window="hann",
                         nperseg=segment_length, noverlap=overlap,
                         detrend="constant", scaling="density")
    return Spectrum(frequencies=freqs, power=power, window="hann",
                    segment_length=segment_length, overlap=overlap,
                    sample_interval=sample_interval)


def spectral_flatness(spectrum: Spectrum) -> float:
    """Geometric over arithmetic mean of the power bins above DC.

    Close to 1 for broadband signals, tiny for line spectra.
    """
    p = np.maximum(spectrum.power[1:], 1e-300)
    return float(np.exp(np.mean(np.log(p))) / np.mean(p))


def autocorrelation(series, max_lag: int | None = None) -> np.ndarray:
    """Biased autocorrelation normalized to ACF(0) = 1, lags 0..max_lag
    (default length/4)."""
    x = np.asarray(series, float)
    n = len(x)
    if n < 4:
        raise DiagnosticsError("series too short for autocorrelation")
    d = x - x.mean()
    c0 = float(np.dot(d, d))
    if c0 <= 0.0:
        raise DiagnosticsError("series has zero variance")
    if max_lag is None:
        max_lag = n // 4
    max_lag = min(int(max_lag), n - 1)
    c = np.correlate(d, d, "full")[n - 1:n + max_lag]
    return c / c0


@dataclasses.dataclass
class FractalEstimate:
    D: float | None               # plateau slope, None when no plateau found
    log_n: np.ndarray             # log of the neighbor-count grid
    log_R: np.ndarray             # log of the mean enclosing radius
    local_slopes: np.ndarray      # centered differences, NaN at the ends
    plateau_range: tuple | None   # (n_lo, n_hi) neighbor counts
    cluster_prefactor: float | None  # k in n = k R^D over the plateau


def cluster_fractal_dimension(points, n_refs: int = 200, n_grid: int = 48,
                              n_min: int = 4, max_frac: float = 0.25,
                              min_decade: float = 1.0,
                              max_spread: float = 0.3) -> FractalEstimate:
    """Neighbor-count scaling dimension of a point cloud.

    From each of n_refs evenly strided reference points, distances to
    every other point are sorted; R(n) is the mean over references of
    the distance to the n-th neighbor, for n on a log grid from n_min to
    max_frac of the cloud. D is the median local slope over the widest
    window spanning at least min_decade in n with slope spread below
    max_spread. Zero distances (duplicate points) are excluded. When no
    window qualifies, D is None and the full slope curve is still
    returned.
    """
    pts = np.asarray(points, float)
    if pts.ndim != 2 or pts.shape[1] not in (2, 3, 4):
        raise DiagnosticsError("points must be an (n, dim) array with "
                               "dim in {2, 3, 4}")
    npts = len(pts)
    if npts < 2000:
        raise DiagnosticsError(
            f"need at least 2000 points for a dimension estimate, got {npts}")
    refs = np.unique(np.linspace(0, npts - 1, n_refs).astype(int))
    n_max = max(int(npts * max_frac), n_min + 1)
    grid = np.unique(np.round(
        np.logspace(np.log10(n_min), np.log10(n_max), n_grid)).astype(int))
    rows = []
    for r in refs:
        d = np.linalg.norm(pts - pts[r], axis=1)
        d = np.sort(d[d > 0.0])
        if len(d) < grid[-1]:
            continue  # heavy duplication around this reference
        rows.append(d[grid - 1])
    if not rows:
        raise DiagnosticsError("too many duplicate points")
    R = np.asarray(rows).mean(axis=0)
    ln = np.log(grid.astype(float))
    lR = np.log(R)
    slopes = np.full(len(grid), np.nan)
    slopes[1:-1] = (ln[2:] - ln[:-2]) / (lR[2:] - lR[:-2])
    best = None
    idx = np.arange(1, len(grid) - 1)
    for a in idx:
        for b in idx[idx >= a]:
            w = slopes[a:b + 1]
            if np.any(~np.isfinite(w)):
                continue
            if w.max() - w.min() >= max_spread:
                continue
            width = (ln[b] - ln[a]) / np.log(10)
            if width >= min_decade and (best is None or width > best[0]):
                best = (width, a, b)
    if best is None:
        return FractalEstimate(D=None, log_n=ln, log_R=lR,
                               local_slopes=slopes, plateau_range=None,
                               cluster_prefactor=None)
    _, a, b = best
    D = float(np.median(slopes[a:b + 1]))
    prefactor = float(np.exp(np.mean(ln[a:b + 1] - D * lR[a:b + 1])))
    return FractalEstimate(D=D, log_n=ln, log_R=lR, local_slopes=slopes,
                           plateau_range=(int(grid[a]), int(grid[b])),
                           cluster_prefactor=prefactor)


_EMBED_COLUMNS = {2: (0, 2), 3: (0, 1, 2), 4: (0, 1, 2, 3)}


def attractor_points(traj: Trajectory, embed_dim: int = 3,
                     drop_fraction: float = 0.2) -> np.ndarray:
    """Post-transient phase-space points for dimension estimation.

    embed_dim 3 keeps (N, M, P), the default view; 2 keeps (N, P); 4
    keeps the full state. The leading drop_fraction of samples is
    discarded so the cloud sits on the attractor.
    """
    if embed_dim not in _EMBED_COLUMNS:
        raise DiagnosticsError("embed_dim must be 2, 3 or 4")
    if traj.termination != "completed":
        raise DiagnosticsError(
            "attractor embedding needs a bounded trajectory; this one "
            f"blows up at zeta = {traj.zeta_star!r}")
    start = int(len(traj.zetas) * drop_fraction)
    cols = list(_EMBED_COLUMNS[embed_dim])
    return traj.states[start:, cols]


def write_spectrum_csv(spectrum: Spectrum, path):
    with open(path, "w") as fh:
        fh.write("frequency,power\n")
        for f, p in zip(spectrum.frequencies, spectrum.power):
            fh.write("%.17g,%.17g\n" % (f, p))


def write_scaling_csv(est: FractalEstimate, path):
    with open(path, "w") as fh:
        fh.write("log_n,log_R,local_slope\n")
        for lnv, lrv, sv in zip(est.log_n, est.log_R, est.local_slopes):
            fh.write("%.17g,%.17g,%.17g\n" % (lnv, lrv, sv))
