"""Second-order master-equation coefficients for an Ohmic Lorentz-Drude bath.

Units: hbar = k_B = omega_0 = 1. Times are in 1/omega_0, rates in omega_0,
``theta = kT/omega_0``. With

    kappa(tau) = 4 a^2 theta wc^2 sum_n (wc e^{-wc tau} - |nu_n| e^{-|nu_n| tau})
                                        / (wc^2 - nu_n^2)
    mu(tau)    = 2 a^2 wc^2 e^{-wc tau}

the coefficients are

    delta(t)  = 1/2 int_0^t kappa cos,      gamma(t)  = 1/2 int_0^t mu sin,
    pi(t)     = 1/2 int_0^t kappa sin,      rshift(t) =     int_0^t mu cos.

The factor 1/2 is what makes ``gamma`` match its closed form and the
long-time limits ``delta -> a^2 r^2/(1+r^2) coth(1/2theta)``,
``gamma -> a^2 r^2/(1+r^2)``, i.e. a thermal steady state.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field, fields

import numpy as np
from scipy import integrate, special

from . import specfun
from .errors import (DomainError, QuadratureFailure, ResonantCutoff,
                     ValidationError)

Z_SWITCH = 0.999
RESONANCE_ROUTE_TOL = 1e-3
RESONANCE_CLOSED_TOL = 1e-6
IMAG_RESIDUE_TOL = 1e-10


class WeakCouplingWarning(UserWarning):
    pass


class GridResolutionWarning(UserWarning):
    pass


class ResonanceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ReservoirSpec:
    """Dimensionless bath parameters.

    alpha : coupling constant (0 means a decoupled oscillator)
    r     : cutoff ratio omega_c / omega_0
    theta : temperature kT / omega_0
    """

    alpha: float
    r: float
    theta: float

    def __post_init__(self):
        for name in ("alpha", "r", "theta"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValidationError(f"{name} must be finite, got {v}")
        if self.alpha < 0:
            raise ValidationError(f"alpha must be >= 0, got {self.alpha}")
        if self.r <= 0:
            raise ValidationError(f"r must be > 0, got {self.r}")
        if self.theta <= 0:
            raise ValidationError(f"theta must be > 0, got {self.theta}")
        if self.alpha > 0.1:
            warnings.warn(f"alpha={self.alpha} is outside the weak-coupling "
                          "regime (alpha <= 0.1)", WeakCouplingWarning,
                          stacklevel=3)

    @classmethod
    def from_r0(cls, alpha, r, r0, convention="appendix"):
        """Build from the reduced inverse temperature r0.

        ``convention="appendix"``: r0 = omega_0 / (2 pi kT).
        ``convention="fig1"``:     r0 = omega_0 / kT.
        """
        if r0 <= 0:
            raise ValidationError("r0 must be > 0")
        if convention == "appendix":
            theta = 1.0 / (2.0 * math.pi * r0)
        elif convention == "fig1":
            theta = 1.0 / r0
        else:
            raise ValidationError(f"unknown temperature convention {convention!r}")
        return cls(alpha, r, theta)

    @classmethod
    def from_rc(cls, alpha, r, rc):
        """Build from rc = omega_c / (2 pi kT)."""
        if rc <= 0:
            raise ValidationError("rc must be > 0")
        return cls(alpha, r, r / (2.0 * math.pi * rc))

    @property
    def omega_c(self):
        return self.r

    @property
    def r0(self):
        return 1.0 / (2.0 * math.pi * self.theta)

    @property
    def rc(self):
        return self.r / (2.0 * math.pi * self.theta)

    @property
    def nu1(self):
        return 2.0 * math.pi * self.theta

    def nu(self, n):
        """Matsubara frequencies 2 pi n theta."""
        return 2.0 * math.pi * np.asarray(n) * self.theta

    @property
    def prefactor(self):
        """alpha^2 r^2 / (1 + r^2), the Markovian damping rate."""
        return self.alpha**2 * self.r**2 / (1.0 + self.r**2)

    def is_resonant(self, tol=RESONANCE_ROUTE_TOL):
        rc = self.rc
        k = round(rc)
        return k >= 1 and abs(rc - k) < tol

    def default_n_matsubara(self):
        return max(100, int(math.ceil(20.0 * self.rc)))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------
def gamma_at(spec: ReservoirSpec, t):
    """Dissipation coefficient gamma(t)."""
    t = np.asarray(t, dtype=float)
    r = spec.r
    e = np.exp(-r * t)
    out = spec.prefactor * (1.0 - e * np.cos(t) - r * e * np.sin(t))
    return float(out) if out.ndim == 0 else out


def markov_limits(spec: ReservoirSpec):
    """Stationary (delta_M, gamma_M)."""
    g = spec.prefactor
    return g / math.tanh(0.5 / spec.theta), g


def delta_high_t_at(spec: ReservoirSpec, t):
    """Caldeira-Leggett high-temperature diffusion coefficient."""
    t = np.asarray(t, dtype=float)
    r = spec.r
    out = 2.0 * spec.alpha**2 * spec.theta * r**2 / (1.0 + r**2) * (
        1.0 - np.exp(-r * t) * (np.cos(t) - np.sin(t) / r))
    return float(out) if out.ndim == 0 else out


def delta_closed_at(spec: ReservoirSpec, t, tol=specfun.DEFAULT_TOL,
                    z_max=Z_SWITCH):
    """Diffusion coefficient from the hypergeometric closed form.

    Valid where ``z = exp(-nu_1 t) <= z_max``; raises :class:`DomainError`
    otherwise so the caller can fall back to :func:`delta_quad_at`.
    The sine bracket uses ``(F(i r0) - F(-i r0)) / (i r0)`` and ``1/r_c``,
    the forms that agree with direct Matsubara summation.
    """
    rc, r0, r = spec.rc, spec.r0, spec.r
    k = round(rc)
    if k >= 1 and abs(rc - k) < RESONANCE_CLOSED_TOL:
        raise ResonantCutoff(f"rc={rc} is within {RESONANCE_CLOSED_TOL} of "
                             f"the integer {k}; use the quadrature path")
    t_arr = np.asarray(t, dtype=float)
    z = np.exp(-spec.nu1 * t_arr)
    if np.any(z > z_max) or np.any(t_arr < 0):
        raise DomainError(f"closed form needs exp(-nu_1 t) <= {z_max}; "
                          f"smallest t={t_arr.min():.3g}")

    fm_mrc = specfun.fbar_minus_one(-rc, z, tol)
    fm_prc = specfun.fbar_minus_one(rc, z, tol)
    fm_pi0 = specfun.fbar_minus_one(1j * r0, z, tol)
    fm_mi0 = specfun.fbar_minus_one(-1j * r0, z, tol)

    cos_t, sin_t = np.cos(t_arr), np.sin(t_arr)
    cos_br = fm_mrc + fm_prc - fm_pi0 - fm_mi0
    sin_br = (fm_pi0 - fm_mi0) / (1j * r0) + (fm_mrc - fm_prc) / rc
    body = (1.0 / math.tanh(math.pi * r0)
            - np.exp(-r * t_arr) * (r * cos_t - sin_t) / math.tan(math.pi * rc)
            + cos_t * cos_br / (math.pi * r0)
            - sin_t * sin_br / math.pi)
    scale = np.maximum(np.abs(body.real), 1.0 / math.tanh(math.pi * r0))
    if np.any(np.abs(body.imag) > IMAG_RESIDUE_TOL * scale):
        raise ArithmeticError("closed-form diffusion coefficient has an "
                              "imaginary residue above tolerance")
    out = spec.prefactor * body.real
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# kernels and the quadrature route
# ---------------------------------------------------------------------------
def kernel_mu(spec: ReservoirSpec, tau):
    """Dissipation kernel 2 alpha^2 wc^2 exp(-wc tau)."""
    tau = np.asarray(tau, dtype=float)
    out = 2.0 * spec.alpha**2 * spec.r**2 * np.exp(-spec.r * tau)
    return float(out) if out.ndim == 0 else out


class _Kappa:
    """Vectorised noise kernel with optional analytic Matsubara tail.

    The pair terms n and -n are combined. A term whose denominator
    wc^2 - nu_n^2 nearly vanishes is replaced by its finite limit.
    """

    def __init__(self, spec, n_matsubara, tail):
        if n_matsubara < 1:
            raise ValidationError("n_matsubara must be >= 1")
        self.spec = spec
        self.N = int(n_matsubara)
        self.tail = tail
        wc = spec.r
        self.wc = wc
        self.nu = spec.nu(np.arange(1, self.N + 1))
        self.den = wc**2 - self.nu**2
        self.near = np.abs(wc - self.nu) <= 1e-6 * wc
        self.amp = 4.0 * spec.alpha**2 * spec.theta * wc**2
        if tail:
            rc = spec.rc
            ks = np.arange(0, 8)
            # sum_{n>N} 1/(rc^2 - n^2) = -sum_k rc^{2k} zeta(2k+2, N+1)
            self.wc_tail = -np.sum(rc ** (2 * ks) *
                                   special.zeta(2.0 * ks + 2, self.N + 1)) / spec.nu1**2
            self.rc2 = rc**2

    def __call__(self, tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        wc, nu = self.wc, self.nu
        ewc = np.exp(-wc * tau)
        enu = np.exp(-np.outer(tau, nu))
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = (wc * ewc[:, None] - nu * enu) / self.den
        if np.any(self.near):
            m = 0.5 * (wc + nu[self.near])
            lim = np.exp(-np.outer(tau, m)) * (1.0 - np.outer(tau, m)) / (2.0 * m)
            terms[:, self.near] = lim
        s = ewc / wc + 2.0 * terms.sum(axis=1)
        if self.tail:
            s += 2.0 * wc * ewc * self.wc_tail
            nu1 = self.spec.nu1
            z = np.exp(-nu1 * tau)
            n = np.arange(1, self.N + 1)
            with np.errstate(divide="ignore"):
                full = -np.log1p(-z)
            partial = (np.power.outer(z, n) / n).sum(axis=1)
            log_tail = np.where(z ** (self.N + 1) > 1e-300, full - partial, 0.0)
            log_tail = np.maximum(log_tail, 0.0)
            s += (2.0 / nu1) * (log_tail + self._power_tail(nu1 * tau))
        return self.amp * s

    def _power_tail(self, a):
        # sum_{n>N} e^{-a n} sum_{k>=1} rc^{2k} / n^{2k+1}, each inner sum by
        # the midpoint integral M^{1-s} E_s(a M), M = N + 1/2
        m = self.N + 0.5
        out = np.zeros_like(a)
        for k in range(1, 8):
            s = 2 * k + 1
            out += self.rc2**k * m ** (1 - s) * special.expn(s, a * m)
        return out

    def last_term_weight(self, t):
        """|integral of the last retained pair term| over [0, t]."""
        nu = self.nu[-1]
        wc = self.wc
        bound = 2.0 * (wc * min(t, 1.0 / wc) + 1.0 / nu) / abs(wc**2 - nu**2)
        return 0.5 * self.amp * bound


def kernel_kappa(spec: ReservoirSpec, tau, n_matsubara=None, tail=False,
                 at_resonance="raise"):
    """Noise kernel from the Matsubara sum truncated at |n| <= n_matsubara.

    With ``tail=True`` the discarded terms |n| > n_matsubara are added
    back from their large-n asymptotics (Hurwitz zeta and a logarithm).
    A retained term with wc^2 - nu_n^2 vanishing within 1e-10 relative
    raises :class:`ResonantCutoff` unless ``at_resonance="limit"``, which
    substitutes the finite limit of that term.
    """
    n_matsubara = spec.default_n_matsubara() if n_matsubara is None else n_matsubara
    kap = _Kappa(spec, n_matsubara, tail)
    if at_resonance == "raise" and np.any(np.abs(kap.den) <= 1e-10 * spec.r**2):
        raise ResonantCutoff(f"wc = {spec.r} coincides with a Matsubara frequency")
    out = kap(tau)
    return float(out[0]) if np.ndim(tau) == 0 else out


def _cumulative_quad(f, t, abs_tol, rel_tol, limit=400):
    """Running integral of ``f`` from 0 to each entry of ascending ``t``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    errs = np.zeros(t.shape)
    acc = err_acc = 0.0
    prev = 0.0
    for i, ti in enumerate(t):
        if ti > prev:
            val, err, info = _quad(f, prev, ti, abs_tol, rel_tol, limit)
            acc += val
            err_acc += err
            prev = ti
        out[i] = acc
        errs[i] = err_acc
    return out, errs


def _quad(f, a, b, abs_tol, rel_tol, limit):
    res = integrate.quad(f, a, b, epsabs=abs_tol, epsrel=rel_tol, limit=limit,
                         full_output=1)
    val, err = res[0], res[1]
    if len(res) > 3 and err > max(abs_tol, rel_tol * abs(val)) * 100:
        raise QuadratureFailure(f"quadrature on [{a:.6g}, {b:.6g}] stopped "
                                f"at error {err:.3g}: {res[3].splitlines()[0]}")
    return val, err, res[2]


def _rate_scale(spec):
    dm, gm = markov_limits(spec)
    return max(dm, gm, 1e-300)


def _kernel_quad(spec, t, weight, n_matsubara, quad_tol, full_output, which):
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValidationError("t must be >= 0")
    if which == "mu":
        f = lambda tau: kernel_mu(spec, tau) * weight(tau)
        kap = None
    else:
        n_matsubara = spec.default_n_matsubara() if n_matsubara is None else n_matsubara
        kap = _Kappa(spec, n_matsubara, tail=True)
        f = lambda tau: 0.5 * kap(tau)[0] * weight(tau)
    flat = t_arr.ravel()
    order = np.argsort(flat, kind="stable")
    vals, errs = _cumulative_quad(f, flat[order], quad_tol * _rate_scale(spec),
                                  quad_tol)
    out = np.empty_like(flat)
    err = np.empty_like(flat)
    out[order] = vals
    err[order] = errs
    out = out.reshape(t_arr.shape)
    err = err.reshape(t_arr.shape)
    if t_arr.ndim == 0:
        out, err = float(out), float(err)
    if not full_output:
        return out
    trunc = 0.0 if kap is None else kap.last_term_weight(float(np.max(t_arr)))
    return out, err, trunc


def delta_quad_at(spec: ReservoirSpec, t, n_matsubara=None, quad_tol=1e-11,
                  full_output=False):
    """Diffusion coefficient by adaptive quadrature of the noise kernel.

    Independent of the hypergeometric route. ``t`` may be an array; the
    integral is accumulated interval by interval. With ``full_output``
    returns ``(value, quad_error, truncation_estimate)`` where the last
    entry is the integrated size of the last retained Matsubara pair.
    """
    return _kernel_quad(spec, t, np.cos, n_matsubara, quad_tol, full_output,
                        "kappa")


def pi_at(spec: ReservoirSpec, t, quad_tol=1e-11, n_matsubara=None,
          full_output=False):
    """Anomalous-diffusion coefficient Pi(t) (quadrature only)."""
    return _kernel_quad(spec, t, np.sin, n_matsubara, quad_tol, full_output,
                        "kappa")


def rshift_at(spec: ReservoirSpec, t, quad_tol=1e-11, full_output=False):
    """Frequency-renormalisation coefficient r(t) (quadrature only)."""
    return _kernel_quad(spec, t, np.cos, None, quad_tol, full_output, "mu")


def delta_at(spec: ReservoirSpec, t, z_max=Z_SWITCH, quad_tol=1e-11):
    """Diffusion coefficient choosing the closed form where it is valid.

    Points with exp(-nu_1 t) > z_max, and every point when rc sits within
    1e-3 of a positive integer, go through :func:`delta_quad_at`.
    """
    t_arr = np.asarray(t, dtype=float)
    flat = t_arr.ravel()
    out = np.zeros(flat.shape)
    if spec.alpha == 0.0:
        return float(out[0]) if t_arr.ndim == 0 else out.reshape(t_arr.shape)
    if spec.is_resonant():
        warnings.warn(f"rc={spec.rc:.6g} is near an integer; using quadrature "
                      "for the diffusion coefficient", ResonanceWarning,
                      stacklevel=2)
        closed = np.zeros(flat.shape, dtype=bool)
    else:
        closed = np.exp(-spec.nu1 * flat) <= z_max
    pos = flat > 0
    if np.any(closed & pos):
        out[closed & pos] = delta_closed_at(spec, flat[closed & pos], z_max=z_max)
    quad = ~closed & pos
    if np.any(quad):
        out[quad] = delta_quad_at(spec, flat[quad], quad_tol=quad_tol)
    return float(out[0]) if t_arr.ndim == 0 else out.reshape(t_arr.shape)


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------
CSV_COLUMNS = ("t", "delta", "gamma", "pi", "rshift", "big_gamma",
               "delta_big_gamma", "i_plus", "i_minus")


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CoefficientGrid:
    """Coefficients and their running integrals on an ascending time grid.

    ``big_gamma = 2 int gamma``, ``i_plus/i_minus = int (delta +/- gamma)``
    and ``delta_big_gamma = exp(-big_gamma) int exp(big_gamma) delta``.
    """

    t: np.ndarray
    delta: np.ndarray
    gamma: np.ndarray
    pi_coef: np.ndarray
    rshift: np.ndarray
    big_gamma: np.ndarray
    delta_big_gamma: np.ndarray
    i_plus: np.ndarray
    i_minus: np.ndarray
    spec: ReservoirSpec | None = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.t)
        for f in fields(self):
            if f.name == "spec":
                continue
            arr = _frozen(getattr(self, f.name))
            if arr.shape != (n,):
                raise ValidationError(f"{f.name} must have shape ({n},)")
            object.__setattr__(self, f.name, arr)
        if n < 2 or self.t[0] != 0.0 or np.any(np.diff(self.t) <= 0):
            raise ValidationError("t must be strictly ascending and start at 0")

    @classmethod
    def from_coefficients(cls, t, delta, gamma, pi_coef=None, rshift=None,
                          spec=None):
        """Assemble a grid, integrating the running quantities by Simpson."""
        t = np.asarray(t, dtype=float)
        delta = np.asarray(delta, dtype=float)
        gamma = np.asarray(gamma, dtype=float)
        nan = np.full(t.shape, np.nan)
        big_gamma = 2.0 * _cumsimpson(gamma, t)
        eg = np.exp(big_gamma)
        delta_big_gamma = _cumsimpson(eg * delta, t) / eg
        return cls(t=t, delta=delta, gamma=gamma,
                   pi_coef=nan if pi_coef is None else pi_coef,
                   rshift=nan if rshift is None else rshift,
                   big_gamma=big_gamma, delta_big_gamma=delta_big_gamma,
                   i_plus=_cumsimpson(delta + gamma, t),
                   i_minus=_cumsimpson(delta - gamma, t), spec=spec)

    @classmethod
    def free(cls, t):
        """Zero-coupling grid: every coefficient vanishes."""
        z = np.zeros(len(t))
        return cls.from_coefficients(t, z, z, z, z)

    def __len__(self):
        return len(self.t)

    def _index(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.t[0], self.t[-1]
        slack = 1e-12 * max(hi, 1.0)
        if np.any(t < lo - slack) or np.any(t > hi + slack):
            from .errors import OutOfGrid
            raise OutOfGrid(f"time outside grid range [{lo}, {hi}]")
        return np.clip(t, lo, hi)

    def interp(self, name, t):
        """Linear interpolation of column ``name`` at time(s) ``t``."""
        tq = self._index(t)
        out = np.interp(tq, self.t, getattr(self, name))
        return float(out) if np.ndim(out) == 0 else out

    def to_csv(self, path):
        """Write all columns with 17 significant digits."""
        cols = [self.t, self.delta, self.gamma, self.pi_coef, self.rshift,
                self.big_gamma, self.delta_big_gamma, self.i_plus, self.i_minus]
        write_csv(path, CSV_COLUMNS, cols)

    @classmethod
    def from_csv(cls, path, spec=None):
        data = read_csv(path)
        return cls(t=data["t"], delta=data["delta"], gamma=data["gamma"],
                   pi_coef=data["pi"], rshift=data["rshift"],
                   big_gamma=data["big_gamma"],
                   delta_big_gamma=data["delta_big_gamma"],
                   i_plus=data["i_plus"], i_minus=data["i_minus"], spec=spec)


def _cumsimpson(y, t):
    if len(t) < 3:
        return integrate.cumulative_trapezoid(y, t, initial=0.0)
    return integrate.cumulative_simpson(y, x=t, initial=0.0)


def build_grid(spec: ReservoirSpec, t_grid, diagnostics=False,
               z_max=Z_SWITCH, quad_tol=1e-11):
    """Evaluate all coefficients on ``t_grid`` (must start at 0).

    ``diagnostics=True`` also fills ``pi_coef`` and ``rshift`` by
    quadrature; otherwise they are NaN.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) < 2 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ValidationError("t_grid must be strictly ascending, start at 0 "
                              "and have at least two points")
    h_max = np.max(np.diff(t))
    h_adv = min(1.0 / spec.r, 1.0) / 20.0
    if h_max > h_adv * (1.0 + 1e-9):
        warnings.warn(f"grid step {h_max:.6g} exceeds the advisory "
                      f"{h_adv:.6g} = min(1/wc, 1)/20", GridResolutionWarning,
                      stacklevel=2)
    delta = delta_at(spec, t, z_max=z_max, quad_tol=quad_tol)
    gamma = gamma_at(spec, t)
    pi_coef = rshift = None
    if diagnostics:
        pi_coef = pi_at(spec, t, quad_tol=quad_tol)
        rshift = rshift_at(spec, t, quad_tol=quad_tol)
    return CoefficientGrid.from_coefficients(t, delta, gamma, pi_coef, rshift,
                                             spec=spec)


def time_grid(t_max, n, spacing="linear", t_first=None, knee=None):
    """Grid of ``n`` points on [0, t_max], always starting at t = 0.

    ``linear``: uniform. ``log``: geometric from ``t_first``.
    ``graded``: step proportional to t below ``knee`` and constant above
    it, with a smooth transition. It resolves the logarithmic steepness
    of the diffusion coefficient at t -> 0 without refining late times.
    """
    if n < 2 or t_max <= 0:
        raise ValidationError("need n >= 2 and t_max > 0")
    if spacing == "linear":
        return np.linspace(0.0, t_max, n)
    if spacing == "log":
        t_first = t_max * 1e-4 if t_first is None else t_first
        return np.concatenate([[0.0], np.geomspace(t_first, t_max, n - 1)])
    if spacing == "graded":
        if n < 3:
            raise ValidationError("graded spacing needs n >= 3")
        t_first = t_max * 1e-7 if t_first is None else t_first
        knee = t_max / 50.0 if knee is None else knee
        # u(t) = t/knee + ln t is uniform on the nodes; w + ln w = u - ln knee
        # with w = t/knee is inverted by the Wright omega function
        u = np.linspace(t_first / knee + math.log(t_first),
                        t_max / knee + math.log(t_max), n - 1)
        t = knee * special.wrightomega(u - math.log(knee)).real
        t[0], t[-1] = t_first, t_max
        return np.concatenate([[0.0], t])
    raise ValidationError(f"unknown spacing {spacing!r}")


# ---------------------------------------------------------------------------
# CSV helpers shared with the other modules
# ---------------------------------------------------------------------------
def _fmt(x):
    return repr(float(x)) if not np.isfinite(x) else f"{x:.17g}"


def write_csv(path, header, columns):
    """Header row plus rows of 17-significant-digit decimals."""
    columns = [np.asarray(c, dtype=float) for c in columns]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([_fmt(v) for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array(body, dtype=float).reshape(len(body), len(header))
    return {name: data[:, j] for j, name in enumerate(header)}
