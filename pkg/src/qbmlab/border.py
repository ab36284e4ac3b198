"""Lindblad / non-Lindblad classification of reservoir parameters.

A parameter point is Lindblad-type when delta(t) - gamma(t) and
delta(t) + gamma(t) stay nonnegative over the classification horizon.
The diffusion coefficient alone is profiled as well, since the
high-temperature analysis is usually phrased in terms of its sign.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .coefficients import ReservoirSpec, delta_at, gamma_at, write_csv
from .errors import BracketFailure, ValidationError

QUANTITIES = ("delta", "delta_minus_gamma", "delta_plus_gamma")
T_TOL = 1e-8
ZERO_TOL = 1e-13


class LindbladType(enum.Enum):
    LINDBLAD = "lindblad-type"
    NON_LINDBLAD = "non-lindblad-type"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SignProfile:
    """Maximal subintervals of [0, horizon] where ``quantity`` is negative."""

    quantity: str
    negative_intervals: tuple
    horizon: float

    @property
    def ever_negative(self):
        return len(self.negative_intervals) > 0


def default_horizon(r: float) -> float:
    """max(20/wc, 20 * 2 pi) in units of 1/omega_0."""
    return max(20.0 / r, 40.0 * math.pi)


def _field(spec, quantity):
    def f(t):
        t = np.asarray(t, dtype=float)
        if quantity == "gamma":
            return gamma_at(spec, t)
        d = delta_at(spec, t)
        if quantity == "delta":
            return d
        g = gamma_at(spec, t)
        return d - g if quantity == "delta_minus_gamma" else d + g
    return f


def _negative_intervals(f, t, values, scale, tol=T_TOL):
    """Bracket sign changes of sampled ``values`` and refine them by bisection."""
    neg = values < -ZERO_TOL * scale
    neg[0] = False
    intervals = []
    i = 1
    n = len(t)

    def edge(a, b, a_neg):
        # a and b straddle the sign change; a_neg gives the sign at a
        while b - a > tol * max(1.0, abs(b)):
            m = 0.5 * (a + b)
            if (float(f(m)) < -ZERO_TOL * scale) == a_neg:
                a = m
            else:
                b = m
        return 0.5 * (a + b)

    while i < n:
        if neg[i]:
            j = i
            while j + 1 < n and neg[j + 1]:
                j += 1
            start = edge(t[i - 1], t[i], False)
            end = t[-1] if j == n - 1 else edge(t[j], t[j + 1], True)
            intervals.append((float(start), float(end)))
            i = j + 1
        else:
            i += 1
    return tuple(intervals)


def sign_profile(spec: ReservoirSpec, horizon: float | None = None,
                 n_points: int = 4000):
    """Negative intervals of delta, delta - gamma and delta + gamma.

    Returns a dict keyed by quantity name.
    """
    horizon = default_horizon(spec.r) if horizon is None else float(horizon)
    if horizon <= 0 or n_points < 2:
        raise ValidationError("need horizon > 0 and n_points >= 2")
    t = np.linspace(0.0, horizon, n_points)
    d = delta_at(spec, t)
    g = gamma_at(spec, t)
    vals = {"delta": d, "delta_minus_gamma": d - g, "delta_plus_gamma": d + g}
    scale = max(np.max(np.abs(d)), np.max(np.abs(g)), 1e-300)
    return {q: SignProfile(q, _negative_intervals(_field(spec, q), t, vals[q], scale),
                           horizon)
            for q in QUANTITIES}


def classify(spec: ReservoirSpec, horizon: float | None = None,
             n_points: int = 4000) -> LindbladType:
    """Lindblad-type iff delta -/+ gamma never go negative within the horizon."""
    prof = sign_profile(spec, horizon, n_points)
    if prof["delta_minus_gamma"].ever_negative or prof["delta_plus_gamma"].ever_negative:
        return LindbladType.NON_LINDBLAD
    return LindbladType.LINDBLAD


# ---------------------------------------------------------------------------
# high-temperature field
# ---------------------------------------------------------------------------
def normalized_high_t(r, t):
    """Delta^HT / (2 alpha^2 theta); independent of coupling and temperature."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    return r**2 / (1.0 + r**2) * (1.0 - np.exp(-r * t) * (np.cos(t) - np.sin(t) / r))


def min_normalized_high_t(r: float, horizon: float | None = None,
                          n_points: int = 20000) -> float:
    """Minimum over (0, horizon] of the normalised high-temperature field."""
    horizon = default_horizon(r) if horizon is None else horizon
    t = np.linspace(0.0, horizon, n_points)
    v = normalized_high_t(r, t)
    i = int(np.argmin(v[1:])) + 1
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, n_points - 1)]
    res = optimize.minimize_scalar(lambda s: float(normalized_high_t(r, s)),
                                   bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12})
    return float(min(res.fun, v[i]))


def critical_r_high_t(horizon: float | None = None, tol_r: float = 1e-3,
                      bracket=(0.05, 1.0)) -> float:
    """Largest cutoff ratio whose high-temperature diffusion goes negative."""
    lo, hi = bracket
    neg = lambda r: min_normalized_high_t(r, horizon) < 0.0
    if not neg(lo) or neg(hi):
        raise BracketFailure(f"no sign change of min_t delta_HT on r in [{lo}, {hi}]")
    while hi - lo > tol_r:
        mid = 0.5 * (lo + hi)
        if neg(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# contour data
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ContourData:
    """Field on the (r, wc t) plane; rows follow ``r``, columns ``wct``."""

    regime: str
    r: np.ndarray
    wct: np.ndarray
    values: np.ndarray

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"regime={self.regime}"])
            w.writerow(["r\\wct"] + [f"{x:.17g}" for x in self.wct])
            for r, row in zip(self.r, self.values):
                w.writerow([f"{r:.17g}"] + [f"{x:.17g}" for x in row])


def general_spec(r: float, rc_times_2pi: float = 10.0, alpha: float = 0.1):
    """Spec with 2 pi rc = wc / kT held fixed, so theta = r / rc_times_2pi."""
    return ReservoirSpec(alpha, r, r / rc_times_2pi)


def contour_grid(regime: str, r_values, wct_values, rc_times_2pi: float = 10.0,
                 alpha: float = 0.1) -> ContourData:
    """Normalised field over (r, wc t).

    ``regime="high_t"``: delta^HT / (2 alpha^2 kT).
    ``regime="general"``: (delta - gamma) / alpha^2 at fixed 2 pi rc.
    """
    r_values = np.asarray(r_values, dtype=float)
    wct = np.asarray(wct_values, dtype=float)
    if np.any(r_values <= 0) or np.any(wct < 0):
        raise ValidationError("r must be > 0 and wc t >= 0")
    out = np.empty((len(r_values), len(wct)))
    for i, r in enumerate(r_values):
        t = wct / r
        if regime == "high_t":
            out[i] = normalized_high_t(r, t)
        elif regime == "general":
            spec = general_spec(r, rc_times_2pi, alpha)
            out[i] = (delta_at(spec, t) - gamma_at(spec, t)) / alpha**2
        else:
            raise ValidationError(f"unknown regime {regime!r}")
    return ContourData(regime, r_values, wct, out)


def border_polyline(regime: str, r_values, wct_max: float, rc_times_2pi: float = 10.0,
                    alpha: float = 0.1, n_points: int = 2000):
    """First wc t at which the contour field turns negative, per r (NaN if never)."""
    r_values = np.asarray(r_values, dtype=float)
    wct = np.linspace(0.0, wct_max, n_points)
    data = contour_grid(regime, r_values, wct, rc_times_2pi, alpha)
    first = np.full(len(r_values), np.nan)
    for i, r in enumerate(r_values):
        if regime == "high_t":
            f = lambda x, r=r: normalized_high_t(r, x / r)
        else:
            spec = general_spec(r, rc_times_2pi, alpha)
            f = lambda x, spec=spec: ((delta_at(spec, x / spec.r)
                                       - gamma_at(spec, x / spec.r)) / alpha**2)
        row = data.values[i]
        scale = max(np.max(np.abs(row)), 1e-300)
        iv = _negative_intervals(f, wct, row, scale)
        if iv:
            first[i] = iv[0][0]
    return r_values, first


def write_polyline_csv(path, r, t_first):
    write_csv(path, ("r", "t_first_negative"), [r, t_first])
