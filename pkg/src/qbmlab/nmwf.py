"""Stochastic unravelling of the secular master equation in a doubled Hilbert space.

A trajectory carries a pair (phi, psi) of Fock-basis amplitude vectors with
``|phi|^2 + |psi|^2 = 2``. Between jumps both evolve under the diagonal
drift ``exp(-i n dt - 1/2 [n dI+ + (n+1) dI-])``, where ``dI+/-`` are
increments of the beta-scaled integrals of delta +/- gamma, followed by
renormalisation. Jumps raise (channel 1, rate ``beta |delta - gamma| <n+1>``)
or lower (channel 2, rate ``beta |delta + gamma| <n>``) both vectors; the
sign of the coefficient goes on phi only, so phi = +/- psi at all times.

Renormalising the drift is exact only while both coefficients are
nonnegative. When one is negative the jump rate uses its modulus and the
unnormalised process gains norm at the rate
``2 beta [(delta+gamma)^- <n> + (delta-gamma)^- <n+1>]`` (``x^- = max(-x, 0)``).
Each trajectory therefore carries a multiplicative weight integrating that
rate, and estimates are ``E[w <psi|n|phi>]``. The weight is identically 1
in the Lindblad-type regime.

The engine is vectorised over trajectories. Every trajectory draws from
its own counter-based stream keyed by (seed, index), and rows never mix,
so results do not depend on batching or the number of worker processes.
"""
from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .coefficients import CoefficientGrid, write_csv
from .errors import (CutoffTooSmall, NullJump, TruncationBreach,
                     ValidationError)

log = logging.getLogger(__name__)

NORM2 = 2.0
BISECT_ITERS = 48
STEPS_PER_UNIT = 40
BATCH = 2048


@dataclass(frozen=True)
class Fock:
    n: int


@dataclass(frozen=True)
class Coherent:
    alpha0: complex


@dataclass
class DoubledState:
    """Stochastic pair of Fock amplitude vectors at time ``t``.

    ``log_weight`` is the log of the trajectory weight (0 in the
    Lindblad-type regime).
    """

    phi: np.ndarray
    psi: np.ndarray
    t: float = 0.0
    log_weight: float = 0.0

    @property
    def norm2(self):
        return float(np.sum(np.abs(self.phi) ** 2) + np.sum(np.abs(self.psi) ** 2))

    @property
    def n_max(self):
        return len(self.phi) - 1

    def sign(self, tol=1e-12):
        """+1 or -1 if phi = sign * psi componentwise, else 0."""
        for s in (1.0, -1.0):
            if np.max(np.abs(self.phi - s * self.psi), initial=0.0) <= tol:
                return int(s)
        return 0

    def n_element(self):
        """<psi| n |phi>."""
        n = np.arange(len(self.phi))
        return complex(np.sum(n * np.conj(self.psi) * self.phi))


@dataclass
class TrajectoryConfig:
    """Monte Carlo settings.

    ``t_grid`` are the output sample times; the engine steps at most
    ``min(1/wc, 1)/40`` between them. ``seed`` keys the per-trajectory
    random streams together with the trajectory index.
    """

    initial: Fock | Coherent = field(default_factory=lambda: Fock(0))
    n_max: int = 30
    beta: float = 1.0
    t_grid: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 10.0, 51))
    eps_trunc: float = 1e-8
    seed: int = 0
    n_traj: int = 1000
    max_step: float | None = None

    def __post_init__(self):
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        if self.beta <= 0:
            raise ValidationError("beta must be > 0")
        if self.n_max < 1:
            raise ValidationError("n_max must be >= 1")
        if self.n_traj < 1:
            raise ValidationError("n_traj must be >= 1")
        t = self.t_grid
        if t.ndim != 1 or len(t) < 1 or t[0] < 0 or np.any(np.diff(t) <= 0):
            raise ValidationError("t_grid must be ascending and nonnegative")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must fit in 64 bits")

    def echo(self):
        d = asdict(self)
        d["initial"] = _initial_echo(self.initial)
        d["t_grid"] = [float(x) for x in self.t_grid]
        return d


def _initial_echo(initial):
    if isinstance(initial, Fock):
        return {"fock": initial.n}
    a = complex(initial.alpha0)
    return {"coherent": [a.real, a.imag]}


@dataclass
class TrajectoryRecord:
    """Output of a single trajectory.

    values : complex w <psi|n|phi> at each sample time
    jumps_at_sample : cumulative jump count at each sample time
    jump_times, jump_channels : jump log
    norms, alignment : audit data when requested (norm^2 after every drift
        step and jump; phi = +/- psi residual at each sample time)
    """

    values: np.ndarray
    jumps_at_sample: np.ndarray
    jump_times: list
    jump_channels: list
    norms: list | None = None
    alignment: list | None = None

    @property
    def n_jumps(self):
        return len(self.jump_times)


@dataclass
class EnsembleEstimate:
    """Ensemble averages at the sample times.

    ``n_mean = n0 + (raw_mean - raw_mean[0]) / beta`` and
    ``n_stderr = raw_stderr / beta``. ``jump_histogram[k]`` counts the
    trajectories with exactly k jumps.
    """

    t: np.ndarray
    n_mean: np.ndarray
    n_stderr: np.ndarray
    raw_mean: np.ndarray
    raw_stderr: np.ndarray
    raw_imag_max: float
    jumps_mean: np.ndarray
    jump_histogram: np.ndarray
    multi_jump_fraction: float
    n_traj: int
    beta: float
    seed: int
    wall_time: float = 0.0

    def to_csv(self, path, n_analytic=None):
        header = ["t", "n_mc", "n_stderr"]
        cols = [self.t, self.n_mean, self.n_stderr]
        if n_analytic is not None:
            header.append("n_analytic")
            cols.append(n_analytic)
        header.append("jumps_mean")
        cols.append(self.jumps_mean)
        write_csv(path, header, cols)

    def summary(self, config: TrajectoryConfig | None = None):
        d = {
            "n_traj": self.n_traj,
            "beta": self.beta,
            "seed": self.seed,
            "multi_jump_fraction": self.multi_jump_fraction,
            "jump_histogram": [int(c) for c in self.jump_histogram],
            "raw_imag_max": self.raw_imag_max,
            "wall_time": self.wall_time,
        }
        if config is not None:
            d["config"] = config.echo()
        return d

    def to_json(self, path, config=None, extra=None):
        d = self.summary(config)
        if extra:
            d.update(extra)
        with open(path, "w") as fh:
            json.dump(d, fh, indent=2)


# ---------------------------------------------------------------------------
# single-state operations
# ---------------------------------------------------------------------------
def init_state(initial, n_max: int) -> DoubledState:
    """phi = psi = normalised initial amplitudes."""
    levels = np.arange(n_max + 1)
    if isinstance(initial, Fock):
        if initial.n < 0:
            raise ValidationError("Fock index must be >= 0")
        if initial.n > n_max - 4:
            raise CutoffTooSmall(f"Fock({initial.n}) needs n_max >= {initial.n + 4}")
        c = np.zeros(n_max + 1, dtype=complex)
        c[initial.n] = 1.0
    elif isinstance(initial, Coherent):
        a = complex(initial.alpha0)
        if abs(a) ** 2 + 6.0 * abs(a) > n_max:
            raise CutoffTooSmall(f"Coherent({a}) needs n_max >= "
                                 f"{abs(a) ** 2 + 6 * abs(a):.1f}")
        from scipy.special import gammaln
        logmag = -0.5 * abs(a) ** 2 - 0.5 * gammaln(levels + 1.0)
        if a != 0:
            logmag = logmag + levels * math.log(abs(a))
            c = np.exp(logmag) * np.exp(1j * levels * np.angle(a))
        else:
            c = np.zeros(n_max + 1, dtype=complex)
            c[0] = 1.0
        c = c / np.linalg.norm(c)
    else:
        raise ValidationError(f"unsupported initial state {initial!r}")
    return DoubledState(c.copy(), c.copy(), 0.0, 0.0)


def rates(state: DoubledState, delta: float, gamma_: float, beta: float = 1.0):
    """Jump rates (P1 raising, P2 lowering) with beta-scaled coefficients."""
    p1, p2 = _rates(state.phi[None], state.psi[None],
                    np.array([beta * (delta + gamma_)]),
                    np.array([beta * (delta - gamma_)]))
    return float(p1[0]), float(p2[0])


def apply_jump(state: DoubledState, channel: int, delta: float, gamma_: float,
               eps_trunc: float | None = None) -> DoubledState:
    """Apply the raising (1) or lowering (2) jump and restore the norm."""
    coef = (delta - gamma_) if channel == 1 else (delta + gamma_)
    phi, psi = _jump(state.phi[None].copy(), state.psi[None].copy(),
                     np.array([channel]), np.array([np.sign(coef)]))
    if eps_trunc is not None:
        _check_truncation(phi, psi, eps_trunc)
    return DoubledState(phi[0], psi[0], state.t, state.log_weight)


def drift_propagate(state: DoubledState, grid: CoefficientGrid, t1: float,
                    beta: float = 1.0, eps_trunc: float | None = 1e-8,
                    n_sub: int = 64) -> DoubledState:
    """Deterministic flow from ``state.t`` to ``t1``.

    The integrals of delta +/- gamma are taken on ``n_sub`` linear
    sub-intervals of the grid interpolant.
    """
    t0 = state.t
    if t1 < t0:
        raise ValidationError("t1 must be >= state.t")
    grid.interp("delta", [t0, t1])
    s = np.linspace(t0, t1, n_sub + 1)
    cp = beta * (grid.interp("delta", s) + grid.interp("gamma", s))
    cm = beta * (grid.interp("delta", s) - grid.interp("gamma", s))
    dip = np.trapezoid(cp, s) if len(s) > 1 else 0.0
    dim = np.trapezoid(cm, s) if len(s) > 1 else 0.0
    phi, psi = state.phi[None].copy(), state.psi[None].copy()
    phi, psi, _ = _drift(phi, psi, np.array([t1 - t0]), np.array([dip]),
                         np.array([dim]))
    if eps_trunc is not None:
        _check_truncation(phi, psi, eps_trunc)
    wr = _weight_rate(phi, psi, cp[-1:], cm[-1:])
    wr0 = _weight_rate(state.phi[None], state.psi[None], cp[:1], cm[:1])
    lw = state.log_weight + 0.5 * (t1 - t0) * float(wr0[0] + wr[0])
    return DoubledState(phi[0], psi[0], t1, lw)


def sample_jump_time(state: DoubledState, grid: CoefficientGrid, t_from: float,
                     eta: float, beta: float = 1.0, horizon: float | None = None,
                     max_step: float | None = None, eps_trunc: float = 1e-8):
    """First time the integrated jump rate along the flow reaches -ln(1 - eta).

    The rate integral is accumulated by trapezoid on engine steps of at
    most ``max_step`` and the crossing is bisected. Returns None when
    ``horizon`` (default: end of grid) comes first.
    """
    t = sample_jump_times(state, grid, t_from, [eta], beta, horizon, max_step,
                          eps_trunc)[0]
    return None if np.isnan(t) else float(t)


def sample_jump_times(state: DoubledState, grid: CoefficientGrid, t_from: float,
                      etas, beta: float = 1.0, horizon: float | None = None,
                      max_step: float | None = None, eps_trunc: float = 1e-8):
    """Vectorised :func:`sample_jump_time` over many draws; NaN marks no jump."""
    etas = np.asarray(etas, dtype=float)
    if np.any(etas < 0.0) or np.any(etas >= 1.0):
        raise ValidationError("eta must lie in [0, 1)")
    horizon = grid.t[-1] if horizon is None else horizon
    if horizon <= t_from:
        return np.full(len(etas), np.nan)
    nodes = _step_grid(np.array([t_from, horizon]), _default_step(grid, max_step))
    eng = _Engine(grid, beta, nodes, eps_trunc, state.n_max)
    B = len(etas)
    b = eng.start(np.tile(state.phi, (B, 1)), np.tile(state.psi, (B, 1)),
                  -np.log1p(-etas))
    out = np.full(B, np.nan)
    for k in range(len(nodes) - 1):
        hit = eng.advance_until_jump(b, k)
        if hit.any():
            out[hit] = b.t[hit]
            b.t[hit] = np.inf  # retired rows are skipped by later steps
        if not np.isnan(out).any():
            break
    return out


# ---------------------------------------------------------------------------
# batched kernels
# ---------------------------------------------------------------------------
def _norm2(phi, psi):
    return np.sum(phi.real**2 + phi.imag**2, axis=1) + np.sum(psi.real**2 + psi.imag**2, axis=1)


def _mean_n(phi, psi):
    n = np.arange(phi.shape[1])
    w = phi.real**2 + phi.imag**2 + psi.real**2 + psi.imag**2
    return np.sum(w * n, axis=1) / np.sum(w, axis=1)


def _rates(phi, psi, cp, cm, nbar=None):
    nbar = _mean_n(phi, psi) if nbar is None else nbar
    return np.abs(cm) * (nbar + 1.0), np.abs(cp) * nbar


def _weight_rate(phi, psi, cp, cm, nbar=None):
    nbar = _mean_n(phi, psi) if nbar is None else nbar
    return 2.0 * (np.maximum(-cp, 0.0) * nbar + np.maximum(-cm, 0.0) * (nbar + 1.0))


def _drift(phi, psi, dt, dip, dim):
    # factor_n = exp(-1/2 dim) z^n with z = exp(-i dt - 1/2 (dip + dim)); the
    # common prefactor drops out on renormalising
    L = phi.shape[1]
    logz = -1j * dt - 0.5 * (dip + dim)
    if np.max(np.abs(logz.real), initial=0.0) * L < 300.0:
        f = np.empty((len(dt), L), dtype=complex)
        f[:, 0] = 1.0
        f[:, 1:] = np.exp(logz)[:, None]
        np.cumprod(f, axis=1, out=f)
    else:
        expo = np.outer(logz, np.arange(L))
        expo -= expo.real.max(axis=1, keepdims=True)
        f = np.exp(expo)
    phi = phi * f
    psi = psi * f
    scale = np.sqrt(NORM2 / _norm2(phi, psi))[:, None]
    return phi * scale, psi * scale, f


def _jump(phi, psi, channel, sign):
    L = phi.shape[1]
    sq = np.sqrt(np.arange(1, L, dtype=float))
    up = channel == 1
    new_phi = np.zeros_like(phi)
    new_psi = np.zeros_like(psi)
    # a^dagger |n> = sqrt(n+1) |n+1>, a |n> = sqrt(n) |n-1>
    new_phi[up, 1:] = phi[up, :-1] * sq
    new_psi[up, 1:] = psi[up, :-1] * sq
    dn = ~up
    new_phi[dn, :-1] = phi[dn, 1:] * sq
    new_psi[dn, :-1] = psi[dn, 1:] * sq
    new_phi *= sign[:, None]
    n2 = _norm2(new_phi, new_psi)
    if np.any(n2 <= 0.0):
        raise NullJump("jump operator annihilates the state")
    scale = np.sqrt(NORM2 / n2)[:, None]
    return new_phi * scale, new_psi * scale


def _check_truncation(phi, psi, eps):
    top = (np.sum(np.abs(phi[:, -2:]) ** 2, axis=1)
           + np.sum(np.abs(psi[:, -2:]) ** 2, axis=1))
    if np.any(top >= eps):
        raise TruncationBreach(f"population {top.max():.3g} in the top two Fock "
                               f"levels exceeds {eps:g}; raise n_max")


def _default_step(grid, max_step):
    if max_step is not None:
        return max_step
    r = grid.spec.r if grid.spec is not None else 1.0
    return min(1.0 / r, 1.0) / STEPS_PER_UNIT


def _step_grid(sample_t, h):
    """Engine nodes: each sample interval split into equal steps <= h."""
    pieces = [np.array([sample_t[0]])]
    for a, b in zip(sample_t[:-1], sample_t[1:]):
        m = max(1, int(math.ceil((b - a) / h - 1e-9)))
        pieces.append(np.linspace(a, b, m + 1)[1:])
    return np.concatenate(pieces)


class _Streams:
    """Per-trajectory uniform streams with a small refill buffer."""

    def __init__(self, seed, indices, chunk=8):
        self.gens = [np.random.Generator(np.random.Philox(key=(int(seed) << 64) | int(i)))
                     for i in indices]
        self.chunk = chunk
        self.buf = np.stack([g.random(chunk) for g in self.gens]) if self.gens else np.zeros((0, chunk))
        self.pos = np.zeros(len(self.gens), dtype=int)

    def draw(self, rows):
        out = np.empty(len(rows))
        for j, r in enumerate(rows):
            if self.pos[r] == self.chunk:
                self.buf[r] = self.gens[r].random(self.chunk)
                self.pos[r] = 0
            out[j] = self.buf[r, self.pos[r]]
            self.pos[r] += 1
        return out


@dataclass
class _Batch:
    phi: np.ndarray
    psi: np.ndarray
    t: np.ndarray
    log_weight: np.ndarray
    hazard: np.ndarray
    threshold: np.ndarray
    rate: np.ndarray
    wrate: np.ndarray
    n_jumps: np.ndarray
    jump_log: list


class _Engine:
    """Steps a batch across the engine nodes with linear coefficients per step."""

    def __init__(self, grid, beta, nodes, eps_trunc, n_max):
        self.nodes = nodes
        d = grid.interp("delta", nodes)
        g = grid.interp("gamma", nodes)
        self.cp = beta * (d + g)
        self.cm = beta * (d - g)
        self.eps = eps_trunc
        self.audit = None

    def coef(self, k, t):
        """Coefficients at times ``t`` inside step k (linear interpolation)."""
        t0, t1 = self.nodes[k], self.nodes[k + 1]
        u = (t - t0) / (t1 - t0)
        return (self.cp[k] + u * (self.cp[k + 1] - self.cp[k]),
                self.cm[k] + u * (self.cm[k + 1] - self.cm[k]))

    def integral(self, k, ta, tb):
        """Integrals of cp and cm over [ta, tb] inside step k."""
        t0, h = self.nodes[k], self.nodes[k + 1] - self.nodes[k]

        def prim(c, t):
            s = t - t0
            return c[k] * s + 0.5 * s * s * (c[k + 1] - c[k]) / h

        return (prim(self.cp, tb) - prim(self.cp, ta),
                prim(self.cm, tb) - prim(self.cm, ta))

    def start(self, phi, psi, threshold):
        B = len(phi)
        t = np.full(B, self.nodes[0])
        cp = np.full(B, self.cp[0])
        cm = np.full(B, self.cm[0])
        p1, p2 = _rates(phi, psi, cp, cm)
        return _Batch(phi.astype(complex), psi.astype(complex), t, np.zeros(B),
                      np.zeros(B), threshold.astype(float), p1 + p2,
                      _weight_rate(phi, psi, cp, cm), np.zeros(B, dtype=int),
                      [[] for _ in range(B)])

    def _flow(self, b, rows, k, t_end):
        """Drifted state, rates and weight rate of ``rows`` at ``t_end``."""
        t_end = np.broadcast_to(t_end, rows.shape).astype(float)
        dip, dim = self.integral(k, b.t[rows], t_end)
        phi, psi, _ = _drift(b.phi[rows], b.psi[rows], t_end - b.t[rows], dip, dim)
        cp, cm = self.coef(k, t_end)
        nbar = _mean_n(phi, psi)
        p1, p2 = _rates(phi, psi, cp, cm, nbar)
        return phi, psi, p1, p2, _weight_rate(phi, psi, cp, cm, nbar), t_end

    def _commit(self, b, rows, phi, psi, p, wr, t_end):
        dt = t_end - b.t[rows]
        b.hazard[rows] += 0.5 * dt * (b.rate[rows] + p)
        b.log_weight[rows] += 0.5 * dt * (b.wrate[rows] + wr)
        b.phi[rows], b.psi[rows] = phi, psi
        b.rate[rows], b.wrate[rows], b.t[rows] = p, wr, t_end
        if self.audit is not None:
            self.audit.extend(_norm2(phi, psi).tolist())

    def advance_until_jump(self, b, k):
        """Drift every row to node k+1 unless its threshold is reached first.

        Rows that reach their threshold stop at the jump time and are
        flagged in the returned mask; the jump itself is left to the caller.
        """
        B = len(b.t)
        hit = np.zeros(B, dtype=bool)
        rows = np.nonzero(b.t < self.nodes[k + 1])[0]
        if rows.size == 0:
            return hit
        t1 = self.nodes[k + 1]
        phi, psi, p1, p2, wr, te = self._flow(b, rows, k, t1)
        p = p1 + p2
        reach = ((b.hazard[rows] + 0.5 * (te - b.t[rows]) * (b.rate[rows] + p)
                  >= b.threshold[rows]) & (b.rate[rows] + p > 0.0))
        ok = ~reach
        self._commit(b, rows[ok], phi[ok], psi[ok], p[ok], wr[ok], te[ok])
        if np.any(reach):
            jr = rows[reach]
            lo = b.t[jr].copy()
            hi = np.full(len(jr), t1)
            immediate = b.hazard[jr] >= b.threshold[jr]
            hi[immediate] = lo[immediate]
            for _ in range(BISECT_ITERS):
                mid = 0.5 * (lo + hi)
                _, _, q1, q2, _, _ = self._flow(b, jr, k, mid)
                f = b.hazard[jr] + 0.5 * (mid - b.t[jr]) * (b.rate[jr] + q1 + q2) - b.threshold[jr]
                up = f >= 0.0
                hi = np.where(up, mid, hi)
                lo = np.where(up, lo, mid)
            phi, psi, q1, q2, wr, te = self._flow(b, jr, k, hi)
            self._commit(b, jr, phi, psi, q1 + q2, wr, te)
            hit[jr] = True
        _check_truncation(b.phi[rows], b.psi[rows], self.eps)
        return hit

    def jump(self, b, rows, k, u_channel, new_threshold):
        cp, cm = self.coef(k, b.t[rows])
        p1, p2 = _rates(b.phi[rows], b.psi[rows], cp, cm)
        tot = p1 + p2
        if np.any(tot <= 0.0):
            raise NullJump("jump requested where both rates vanish")
        channel = np.where(u_channel * tot < p1, 1, 2)
        sign = np.where(channel == 1, np.sign(cm), np.sign(cp))
        sign[sign == 0] = 1.0
        phi, psi = _jump(b.phi[rows], b.psi[rows], channel, sign)
        _check_truncation(phi, psi, self.eps)
        b.phi[rows], b.psi[rows] = phi, psi
        q1, q2 = _rates(phi, psi, cp, cm)
        b.rate[rows] = q1 + q2
        b.wrate[rows] = _weight_rate(phi, psi, cp, cm)
        b.hazard[rows] = 0.0
        b.threshold[rows] = new_threshold
        b.n_jumps[rows] += 1
        for r, c, t in zip(rows, channel, b.t[rows]):
            b.jump_log[r].append((float(t), int(c)))
        if self.audit is not None:
            self.audit.extend(_norm2(phi, psi).tolist())
        return channel


def _run_batch(config: TrajectoryConfig, grid: CoefficientGrid, indices,
               audit=False):
    sample_t = config.t_grid
    nodes = _step_grid(sample_t, _default_step(grid, config.max_step))
    is_sample = np.isin(nodes, sample_t)
    st = init_state(config.initial, config.n_max)
    B = len(indices)
    streams = _Streams(config.seed, indices)
    all_rows = np.arange(B)
    eng = _Engine(grid, config.beta, nodes, config.eps_trunc, config.n_max)
    if audit:
        eng.audit = []
    eta = streams.draw(all_rows)
    b = eng.start(np.tile(st.phi, (B, 1)), np.tile(st.psi, (B, 1)),
                  -np.log1p(-eta))
    n_levels = np.arange(config.n_max + 1)
    values = np.zeros((B, len(sample_t)), dtype=complex)
    jumps_at = np.zeros((B, len(sample_t)), dtype=int)
    alignment = []

    def record(j):
        el = np.sum(n_levels * np.conj(b.psi) * b.phi, axis=1)
        values[:, j] = np.exp(b.log_weight) * el
        jumps_at[:, j] = b.n_jumps
        if audit:
            d = np.minimum(np.max(np.abs(b.phi - b.psi), axis=1),
                           np.max(np.abs(b.phi + b.psi), axis=1))
            alignment.append(float(d.max()))

    j = 0
    record(j)
    j += 1
    for k in range(len(nodes) - 1):
        while True:
            hit = eng.advance_until_jump(b, k)
            if not hit.any():
                break
            rows = np.nonzero(hit)[0]
            u = streams.draw(rows)
            eta = streams.draw(rows)
            eng.jump(b, rows, k, u, -np.log1p(-eta))
        if is_sample[k + 1]:
            record(j)
            j += 1
    return values, jumps_at, b.jump_log, (eng.audit, alignment)


def run_trajectory(config: TrajectoryConfig, grid: CoefficientGrid, index: int = 0,
                   audit: bool = False) -> TrajectoryRecord:
    """Simulate trajectory ``index`` of the ensemble defined by ``config``.

    The random stream is keyed by (config.seed, index), so this reproduces
    the same row of :func:`run_ensemble`.
    """
    values, jumps_at, log_, (norms, align) = _run_batch(config, grid, [index], audit)
    return TrajectoryRecord(values[0], jumps_at[0],
                            [t for t, _ in log_[0]], [c for _, c in log_[0]],
                            norms, align if audit else None)


def _chunk_worker(args):
    config, grid, lo, hi = args
    values, jumps_at, _, _ = _run_batch(config, grid, range(lo, hi))
    return lo, values, jumps_at


def run_ensemble(config: TrajectoryConfig, grid: CoefficientGrid, workers: int = 1,
                 batch: int = BATCH) -> EnsembleEstimate:
    """Ensemble average of <psi|n|phi> over ``config.n_traj`` trajectories."""
    if config.n_traj < 2:
        raise ValidationError("n_traj must be >= 2 for a standard error")
    grid.interp("delta", [config.t_grid[0], config.t_grid[-1]])
    start = time.perf_counter()
    N = config.n_traj
    jobs = [(config, grid, lo, min(lo + batch, N)) for lo in range(0, N, batch)]
    values = np.zeros((N, len(config.t_grid)), dtype=complex)
    jumps_at = np.zeros((N, len(config.t_grid)), dtype=int)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_chunk_worker, jobs))
    else:
        results = map(_chunk_worker, jobs)
    for lo, v, ja in results:
        values[lo:lo + len(v)] = v
        jumps_at[lo:lo + len(v)] = ja

    raw = values.real
    raw_mean = raw.mean(axis=0)
    raw_stderr = raw.std(axis=0, ddof=1) / math.sqrt(N)
    n0 = float(init_state(config.initial, config.n_max).n_element().real)
    total = jumps_at[:, -1]
    hist = np.bincount(total)
    at_least_one = int(np.sum(total >= 1))
    multi = float(np.sum(total >= 2)) / at_least_one if at_least_one else 0.0
    wall = time.perf_counter() - start
    log.info("ensemble of %d trajectories in %.1f s, multi-jump fraction %.3g",
             N, wall, multi)
    return EnsembleEstimate(
        t=config.t_grid.copy(),
        n_mean=n0 + (raw_mean - raw_mean[0]) / config.beta,
        n_stderr=raw_stderr / config.beta,
        raw_mean=raw_mean,
        raw_stderr=raw_stderr,
        raw_imag_max=float(np.max(np.abs(values.imag))),
        jumps_mean=jumps_at.mean(axis=0),
        jump_histogram=hist,
        multi_jump_fraction=multi,
        n_traj=N,
        beta=config.beta,
        seed=config.seed,
        wall_time=wall,
    )
