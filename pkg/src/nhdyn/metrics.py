"""Information-theoretic measures and time-series feature extraction."""

import enum
from dataclasses import dataclass

import numpy as np
from scipy import signal, stats

from . import _kernels
from .errors import (InsufficientOscillationsError, NoDecayError,
                     WindowTooShortError)
from .linalg import trace_norm
from .models import SIGMA_Y

SPIN_FLIP = np.kron(SIGMA_Y, SIGMA_Y)

# relative disagreement between peak spacing and spectral estimate that
# flags a period extraction
PERIOD_CROSSCHECK_RTOL = 0.02
# minimum peak prominence, as a fraction of the signal's range
PEAK_PROMINENCE = 0.05
# samples within this fraction of the range of a maximum count as one flat top
PLATEAU_RTOL = 1e-9
RELAX_UPPER = 1e-1
RELAX_LOWER = 1e-6
MIN_WINDOW = 10
VALUE_SLACK = 1e-9


class MetricKind(str, enum.Enum):
    TRACE_DISTANCE = "trace_distance"
    CONCURRENCE = "concurrence"


class ExtractionKind(str, enum.Enum):
    PERIOD = "Period"
    RELAX_TIME = "RelaxTime"


def trace_distance(rho1, rho2):
    """``Tr|rho1 - rho2| / 2``."""
    rho1 = np.asarray(rho1, dtype=np.complex128)
    rho2 = np.asarray(rho2, dtype=np.complex128)
    if rho1.shape != rho2.shape:
        raise ValueError(f"shape mismatch {rho1.shape} vs {rho2.shape}")
    return 0.5 * trace_norm(rho1 - rho2)


def concurrence(rho):
    """Two-qubit concurrence from the eigenvalues of ``rho (Y x Y) rho* (Y x Y)``."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (4, 4):
        raise ValueError("concurrence is defined for two-qubit states only")
    return float(_kernels.concurrence_kernel(rho, SPIN_FLIP))


def trace_distance_series(states1, states2):
    s1 = np.asarray(states1, dtype=np.complex128)
    s2 = np.asarray(states2, dtype=np.complex128)
    d = s1.shape[-1]
    # kernels expect column-stacked rows
    v1 = np.ascontiguousarray(s1.transpose(0, 2, 1).reshape(len(s1), d * d))
    v2 = np.ascontiguousarray(s2.transpose(0, 2, 1).reshape(len(s2), d * d))
    return _kernels.trace_distance_series(v1, v2, d)


def concurrence_series(states):
    s = np.asarray(states, dtype=np.complex128)
    if s.shape[1:] != (4, 4):
        raise ValueError("concurrence is defined for two-qubit states only")
    v = np.ascontiguousarray(s.transpose(0, 2, 1).reshape(len(s), 16))
    return _kernels.concurrence_series(v, SPIN_FLIP)


@dataclass
class Trajectory:
    times: np.ndarray
    values: np.ndarray
    metric_kind: MetricKind

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly ascending")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("trajectory values must be finite")
        if self.values.size and (self.values.min() < -VALUE_SLACK
                                 or self.values.max() > 1 + VALUE_SLACK):
            raise ValueError("trajectory values must lie in [0, 1]")
        self.metric_kind = MetricKind(self.metric_kind)


@dataclass
class ExtractionResult:
    kind: ExtractionKind
    value: float
    fit_quality: float
    window: tuple
    flagged: bool = False
    note: str = ""


def _refine_peak(y, k):
    """Vertex offset of the parabola through samples ``k-1, k, k+1``."""
    y0, y1, y2 = y[k - 1], y[k], y[k + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return 0.0
    return 0.5 * (y0 - y2) / denom


def _peak_times(t, y, peaks, tol):
    """One time per maximum; round-off ripples on a flat top are merged.

    Maxima not separated by a dip deeper than ``tol`` form one group.  A group
    whose top spans three or more samples within ``tol`` is placed at the
    centre of that plateau, otherwise at the parabolic vertex.
    """
    groups = []
    for k in peaks:
        if groups:
            j = groups[-1][-1]
            if y[j:k + 1].min() >= min(y[j], y[k]) - tol:
                groups[-1].append(k)
                continue
        groups.append([k])
    out = []
    for g in groups:
        k = max(g, key=lambda i: y[i])
        lo, hi = g[0], g[-1]
        while lo > 0 and y[lo - 1] >= y[k] - tol:
            lo -= 1
        while hi < y.size - 1 and y[hi + 1] >= y[k] - tol:
            hi += 1
        if hi - lo >= 2:
            out.append(0.5 * (t[lo] + t[hi]))
        else:
            out.append(t[k] + _refine_peak(y, k) * (t[k + 1] - t[k]))
    return np.array(out)


def dominant_period(times, values, oversample=16):
    """Period of the strongest Fourier component (zero-padded, interpolated)."""
    dt = times[1] - times[0]
    y = values - values.mean()
    n = oversample * y.size
    spec = np.abs(np.fft.rfft(y * np.hanning(y.size), n))
    spec[0] = 0.0
    k = int(np.argmax(spec))
    if 0 < k < spec.size - 1:
        k = k + _refine_peak(spec, k)
    if k <= 0:
        return np.inf
    return n * dt / k


def extract_period(traj):
    """Oscillation period from the spacing of interior maxima.

    Maxima come from ``scipy.signal.find_peaks`` with a prominence floor of 5%
    of the signal range and are refined by three-point parabolic
    interpolation; flat tops broken up by round-off count once, at the
    plateau centre.  The spread of the spacings sets ``fit_quality``; the
    result is flagged when it disagrees with the dominant Fourier period by
    more than 2%.

    Raises:
        InsufficientOscillationsError: fewer than three maxima.
    """
    t, y = traj.times, traj.values
    span = np.ptp(y)
    peaks, _ = signal.find_peaks(y, prominence=PEAK_PROMINENCE * span if span > 0 else None)
    tp = _peak_times(t, y, peaks, PLATEAU_RTOL * span)
    if tp.size < 3:
        raise InsufficientOscillationsError(
            f"found {tp.size} maxima, need at least 3")
    dt = np.diff(t)
    spacing = np.diff(tp)
    period = float(spacing.mean())
    quality = float(max(0.0, 1.0 - spacing.std() / period))
    uniform = np.allclose(dt, dt[0], rtol=1e-9)
    flagged = False
    note = ""
    if uniform:
        spectral = dominant_period(t, y)
        if abs(spectral - period) > PERIOD_CROSSCHECK_RTOL * period:
            flagged = True
            note = f"Fourier estimate {spectral:.6g} disagrees with peak spacing"
    return ExtractionResult(ExtractionKind.PERIOD, period, quality,
                            (float(tp[0]), float(tp[-1])), flagged, note)


def extract_relax_time(traj, floor=1e-8):
    """Relaxation time from a log-linear fit of the decaying tail.

    The asymptote is the mean of the last 5% of samples.  Samples whose
    distance from it lies in ``[max(floor, 1e-6), 1e-1]`` are fitted with a
    straight line in ``log`` scale and ``tau = -1 / slope``.

    Raises:
        NoDecayError: the final value is not below half the initial one, or
            the fitted slope is not negative.
        WindowTooShortError: fewer than 10 samples fall into the window.
    """
    t, y = traj.times, traj.values
    if not y[-1] < 0.5 * y[0]:
        raise NoDecayError(f"final value {y[-1]:.3g} is not below half of {y[0]:.3g}")
    tail = max(1, int(round(0.05 * y.size)))
    asym = y[-tail:].mean()
    resid = np.abs(y - asym)
    lo = max(floor, RELAX_LOWER)
    mask = (resid >= lo) & (resid <= RELAX_UPPER)
    if mask.sum() < MIN_WINDOW:
        raise WindowTooShortError(f"only {mask.sum()} samples in the fit window")
    fit = stats.linregress(t[mask], np.log(resid[mask]))
    if fit.slope >= 0:
        raise NoDecayError("residual does not decrease inside the fit window")
    tw = t[mask]
    return ExtractionResult(ExtractionKind.RELAX_TIME, float(-1.0 / fit.slope),
                            float(fit.rvalue ** 2), (float(tw[0]), float(tw[-1])))
