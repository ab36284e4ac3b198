"""Power-series evaluation of the two Gauss hypergeometric functions

    fbar(x, z) = 2F1(x, 1; 1 + x; z)   = sum_k  x / (x + k)               z**k
    gbar(x, z) = 2F1(2, 1 + x; 2 + x; z) = sum_k (k + 1)(1 + x)/(1 + x + k) z**k

for complex first parameter ``x`` and real ``0 <= z < 1``.

Only the direct series is implemented. The arguments used by the
diffusion coefficient are ``z = exp(-nu_1 t)``, which never leaves the unit
interval, so no analytic continuation is needed. Close to ``z = 1`` the
series needs O(1/(1 - z)) terms; callers switch to quadrature there.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError, NoConvergence, PoleAtNonpositiveInteger

DEFAULT_TOL = 1e-14
DEFAULT_KMAX = 10**6
POLE_TOL = 1e-12

_FIRST_CHUNK = 64


def _check_pole(shift: complex, x: complex) -> None:
    # shift + k == 0 for some integer k >= 0
    k = np.rint(-shift.real)
    if k >= 0 and abs(shift + k) <= POLE_TOL * max(abs(x), 1.0):
        raise PoleAtNonpositiveInteger(
            f"parameter x={x!r} puts a pole at series index k={int(k)}")


def _as_z(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)) or np.any(z < 0.0) or np.any(z >= 1.0):
        raise DomainError("series argument z must satisfy 0 <= z < 1")
    return z


def _sum_series(coef, growth, x, z, k_start, tol, kmax):
    """Sum ``coef(k) * z**k`` for ``k >= k_start`` elementwise over ``z``.

    ``growth(k)`` bounds the ratio |c_{k+1}/c_k| once ``k > |x| + 2`` so the
    remainder after the last summed term ``T`` is at most
    ``|T| rho / (1 - rho)`` with ``rho = z * growth(k)``.
    Returns (sums, error_bounds).
    """
    zf = z.ravel()
    total = np.zeros(zf.shape, dtype=complex)
    err = np.zeros(zf.shape, dtype=float)
    active = np.nonzero(zf > 0.0)[0]
    if k_start == 0:
        total += coef(np.array([0.0]))[0]
        k0 = 1
    else:
        k0 = k_start
    if active.size == 0:
        return total.reshape(z.shape), err.reshape(z.shape)

    logz = np.log(zf[active])
    k_safe = abs(x) + 2.0
    chunk = _FIRST_CHUNK
    while active.size:
        if k0 > kmax:
            raise NoConvergence(
                f"series for x={x!r} not converged within {kmax} terms "
                f"(largest z={zf[active].max():.6g})")
        k = np.arange(k0, min(k0 + chunk, kmax + 1), dtype=float)
        c = coef(k)
        terms = c[None, :] * np.exp(np.outer(logz, k))
        total[active] += terms.sum(axis=1)

        k_last = k[-1]
        rho = zf[active] * growth(k_last)
        last = np.abs(terms[:, -1])
        with np.errstate(divide="ignore"):
            bound = np.where(rho < 1.0, last * rho / (1.0 - rho), np.inf)
        if k_last <= k_safe:
            bound[:] = np.inf
        done = bound <= tol * np.maximum(np.abs(total[active]), 1e-300)
        err[active[done]] = bound[done]
        keep = ~done
        active, logz = active[keep], logz[keep]
        k0 = int(k_last) + 1
        chunk = min(chunk * 2, 1 << 15)
    return total.reshape(z.shape), err.reshape(z.shape)


def _fbar(x, z, tol, kmax, k_start):
    x = complex(x)
    _check_pole(x, x)
    z = _as_z(z)
    return _sum_series(lambda k: x / (x + k), lambda k: 1.0,
                       x, z, k_start, tol, kmax)


def fbar(x, z, tol=DEFAULT_TOL, kmax=DEFAULT_KMAX, full_output=False):
    """2F1(x, 1; 1 + x; z) by direct summation.

    Parameters
    ----------
    x : complex
        First parameter; must not be 0 or a negative integer.
    z : float or array_like
        Argument(s) in ``[0, 1)``.
    tol : float
        Relative truncation tolerance on the geometric tail bound.
    kmax : int
        Term budget per argument.
    full_output : bool
        Also return the bound on the discarded tail.

    Returns
    -------
    value : complex or ndarray of complex
    err : float or ndarray, only if ``full_output``.
    """
    val, err = _fbar(x, z, tol, kmax, 0)
    if np.ndim(val) == 0:
        val, err = complex(val), float(err)
    return (val, err) if full_output else val


def fbar_minus_one(x, z, tol=DEFAULT_TOL, kmax=DEFAULT_KMAX):
    """``fbar(x, z) - 1`` summed from k = 1, without the cancellation."""
    val, _ = _fbar(x, z, tol, kmax, 1)
    return complex(val) if np.ndim(val) == 0 else val


def gbar(x, z, tol=DEFAULT_TOL, kmax=DEFAULT_KMAX, full_output=False):
    """2F1(2, 1 + x; 2 + x; z) by direct summation.

    Same contract as :func:`fbar`; here ``1 + x`` must not be 0 or a
    negative integer.
    """
    x = complex(x)
    a = 1.0 + x
    _check_pole(a, x)
    z = _as_z(z)
    val, err = _sum_series(lambda k: (k + 1.0) * a / (a + k),
                           lambda k: (k + 2.0) / (k + 1.0),
                           x, z, 0, tol, kmax)
    if np.ndim(val) == 0:
        val, err = complex(val), float(err)
    return (val, err) if full_output else val
