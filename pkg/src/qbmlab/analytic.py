"""Secular-approximation observables of the damped oscillator.

All functions read a :class:`~qbmlab.coefficients.CoefficientGrid` and
interpolate linearly between its nodes. Quadratures X, P are the
dimensionless ones with [X, P] = i, so the vacuum has var X = 1/2.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientGrid, ReservoirSpec, markov_limits, write_csv
from .errors import DegenerateState, ValidationError

WIDTH_EPS = 1e-9
UNCERTAINTY_EPS = 1e-12


class ShortTimeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class InitialStateMoments:
    """First and second moments of the initial oscillator state.

    Attributes
    ----------
    n0 : mean occupation
    q0 : Mandel Q parameter
    var_x0, var_p0, cov0 : quadrature variances and symmetrised covariance
    center : coherent amplitude (0 when not applicable)
    """

    n0: float
    q0: float
    var_x0: float
    var_p0: float
    cov0: float = 0.0
    center: complex = 0j

    def __post_init__(self):
        if self.n0 < 0:
            raise ValidationError("n0 must be >= 0")
        if self.q0 < -1:
            raise ValidationError("q0 must be >= -1")
        if self.var_x0 <= 0 or self.var_p0 <= 0:
            raise ValidationError("variances must be > 0")
        if self.var_x0 * self.var_p0 - self.cov0**2 < 0.25 - UNCERTAINTY_EPS:
            raise ValidationError("moments violate the uncertainty relation")

    @classmethod
    def ground(cls):
        # Q of the vacuum is 0/0; 0 by convention
        return cls(0.0, 0.0, 0.5, 0.5)

    @classmethod
    def fock(cls, n: int):
        if n < 0 or int(n) != n:
            raise ValidationError("Fock index must be a nonnegative integer")
        if n == 0:
            return cls.ground()
        return cls(float(n), -1.0, n + 0.5, n + 0.5)

    @classmethod
    def coherent(cls, alpha0: complex):
        alpha0 = complex(alpha0)
        return cls(abs(alpha0) ** 2, 0.0, 0.5, 0.5, 0.0, alpha0)

    @classmethod
    def squeezed(cls, s: float):
        """Squeezed vacuum with var X = s/2, var P = 1/(2s)."""
        if s <= 0:
            raise ValidationError("squeezing parameter must be > 0")
        n0 = (s + 1.0 / s) / 4.0 - 0.5
        if n0 <= 0:
            return cls.ground()
        # <n^2> - <n>^2 = 2 sinh^2 cosh^2 = 2 n0 (n0 + 1)
        q0 = 2.0 * n0 * (n0 + 1.0) / n0 - 1.0
        return cls(n0, q0, s / 2.0, 1.0 / (2.0 * s))

    @classmethod
    def thermal(cls, nbar: float):
        if nbar < 0:
            raise ValidationError("nbar must be >= 0")
        if nbar == 0:
            return cls.ground()
        return cls(nbar, nbar, nbar + 0.5, nbar + 0.5)


@dataclass(frozen=True)
class GaussianWigner:
    """Isotropic Gaussian Wigner function in the complex amplitude plane."""

    center: complex
    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise ValidationError("width must be > 0")

    def __call__(self, alpha):
        """W(alpha) = exp(-|center - alpha|^2 / width) / (pi width)."""
        d2 = np.abs(self.center - np.asarray(alpha)) ** 2
        return np.exp(-d2 / self.width) / (math.pi * self.width)

    def field(self, re, im):
        """W on the outer-product grid of real parts ``re`` and imaginary ``im``."""
        a = np.asarray(re)[None, :] + 1j * np.asarray(im)[:, None]
        return self(a)


def _damping(grid, t):
    return grid.interp("big_gamma", t), grid.interp("delta_big_gamma", t)


def heating_at(grid: CoefficientGrid, n0: float, t):
    """Mean occupation <n(t)>."""
    g, dg = _damping(grid, t)
    eg = np.exp(-np.asarray(g))
    out = eg * n0 + (eg - 1.0) / 2.0 + dg
    return float(out) if np.ndim(out) == 0 else out


def thermal_n(spec: ReservoirSpec) -> float:
    """Bose occupation 1/(exp(1/theta) - 1)."""
    x = 1.0 / spec.theta
    return math.exp(-x) / -math.expm1(-x)


def heating_markov(spec: ReservoirSpec, n0: float, t):
    """Markovian heating from the stationary coefficients.

    The occupation relaxes at 2 gamma_M = 2 alpha^2 r^2/(1+r^2), the late-time
    rate of :func:`heating_at`.
    """
    _, gamma_m = markov_limits(spec)
    rate = 2.0 * gamma_m
    e = np.exp(-rate * np.asarray(t, dtype=float))
    out = e * n0 + thermal_n(spec) * (1.0 - e)
    return float(out) if np.ndim(out) == 0 else out


def heating_short_time(grid: CoefficientGrid, t):
    """Ground-state heating to first order: int_0^t (delta - gamma)."""
    if np.any(np.asarray(grid.interp("big_gamma", t)) > 0.05):
        warnings.warn("short-time form used where big_gamma > 0.05",
                      ShortTimeWarning, stacklevel=2)
    return grid.interp("i_minus", t)


def position_variance_at(grid: CoefficientGrid, m: InitialStateMoments, t):
    """Variance of X at time t."""
    g, dg = _damping(grid, t)
    t = np.asarray(t, dtype=float)
    rot = (m.var_x0 * np.cos(t) ** 2 + m.var_p0 * np.sin(t) ** 2
           + m.cov0 * np.sin(2.0 * t))
    out = np.exp(-np.asarray(g)) * rot + dg
    return float(out) if np.ndim(out) == 0 else out


def mandel_q_at(grid: CoefficientGrid, n0: float, q0: float, t):
    """Mandel Q parameter at time t."""
    n = np.asarray(heating_at(grid, n0, t))
    if np.any(np.abs(n) < 1e-300):
        raise DegenerateState("mean occupation vanishes; Q is undefined")
    g = np.asarray(grid.interp("big_gamma", t))
    out = (n**2 + np.exp(-2.0 * g) * n0 * (q0 - n0)) / n
    return float(out) if out.ndim == 0 else out


def wigner_coherent(grid: CoefficientGrid, alpha0: complex, t) -> GaussianWigner:
    """Wigner function at time t of an initially coherent state."""
    g, dg = _damping(grid, t)
    center = complex(alpha0) * math.exp(-g / 2.0) * complex(math.cos(t), -math.sin(t))
    return GaussianWigner(center, dg + 0.5)


def qcf_at(grid: CoefficientGrid, chi0, t, x, p):
    """Quantum characteristic function at time t.

    ``chi0(x, p)`` is the initial characteristic function. Its arguments
    are rotated by the free evolution and damped by exp(-big_gamma/2).
    """
    g, dg = _damping(grid, t)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    c, s = math.cos(t), math.sin(t)
    k = math.exp(-g / 2.0)
    xt = k * (x * c + p * s)
    pt = k * (-x * s + p * c)
    return np.exp(-dg * (x**2 + p**2) / 2.0) * chi0(xt, pt)


def thermal_qcf(nbar: float):
    """Symmetric characteristic function of a thermal state."""
    return lambda x, p: np.exp(-(nbar + 0.5) * (np.asarray(x)**2 + np.asarray(p)**2) / 2.0)


OBSERVABLE_COLUMNS = ("t", "n_mean", "var_x", "mandel_q", "wigner_center_re",
                      "wigner_center_im", "wigner_width")


def observables_table(grid: CoefficientGrid, m: InitialStateMoments, t=None):
    """All observables on ``t`` (default: the grid nodes) as a column dict.

    Mandel Q is NaN where <n> vanishes.
    """
    t = grid.t if t is None else np.asarray(t, dtype=float)
    n = np.asarray(heating_at(grid, m.n0, t), dtype=float)
    g, dg = _damping(grid, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = (n**2 + np.exp(-2.0 * g) * m.n0 * (m.q0 - m.n0)) / n
    q = np.where(np.abs(n) < 1e-300, np.nan, q)
    center = m.center * np.exp(-np.asarray(g) / 2.0) * np.exp(-1j * t)
    return {
        "t": t,
        "n_mean": n,
        "var_x": np.asarray(position_variance_at(grid, m, t), dtype=float),
        "mandel_q": q,
        "wigner_center_re": center.real,
        "wigner_center_im": center.imag,
        "wigner_width": np.asarray(dg) + 0.5,
    }


def write_observables_csv(path, table):
    write_csv(path, OBSERVABLE_COLUMNS, [table[c] for c in OBSERVABLE_COLUMNS])
