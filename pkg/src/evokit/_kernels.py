"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The package spends essentially all of its runtime in three loops:

* per-frequency dense solves ``(i xi + nu) M(z_k) + A`` (spectral solver),
* sequential implicit time steps with time-dependent matrices (stepper),
* O(n^2) causal convolution quadrature (oracle for the frequency path).

Each kernel exists twice: a ``@njit(parallel=...)`` version and a numpy
version with identical semantics.  The active backend is chosen once at
import time from the environment variable ``EVOKIT_BACKEND``:

* ``EVOKIT_BACKEND=numpy``  force the pure-numpy path,
* ``EVOKIT_BACKEND=numba``  require numba (raise if unavailable),
* unset                     use numba when importable, else numpy.

``benchmarks/bench_kernels.py`` compares the two paths.
"""

import os

import numpy as np

_REQUESTED = os.environ.get("EVOKIT_BACKEND", "").strip().lower()

if _REQUESTED not in ("", "numpy", "numba"):
    raise ValueError(f"EVOKIT_BACKEND must be 'numpy' or 'numba', got {_REQUESTED!r}")

_HAVE_NUMBA = False
if _REQUESTED != "numpy":
    try:
        from numba import njit, prange

        _HAVE_NUMBA = True
    except ImportError:
        if _REQUESTED == "numba":
            raise

BACKEND = "numba" if _HAVE_NUMBA else "numpy"


def backend():
    """Name of the active kernel backend ('numba' or 'numpy')."""
    return BACKEND


# ---------------------------------------------------------------------------
# per-frequency solve:  ((i xi_k + nu) * expand(M_k) + A) u_k = f_k
#
# M_k is the material-law symbol evaluated per frequency at block level
# (shape (n, nb, nb)); expansion places entry (i, j) on the diagonal of the
# (i, j) block of the full d x d matrix.  offsets has length nb + 1.
# ---------------------------------------------------------------------------

def _expand_blocks_numpy(msmall, scale, a_full, offsets):
    n = msmall.shape[0]
    d = a_full.shape[0]
    nb = len(offsets) - 1
    mats = np.broadcast_to(a_full, (n, d, d)).copy()
    for bi in range(nb):
        i0, i1 = offsets[bi], offsets[bi + 1]
        for bj in range(nb):
            j0, j1 = offsets[bj], offsets[bj + 1]
            col = msmall[:, bi, bj] * scale
            if not np.any(col):
                continue
            if (i1 - i0) != (j1 - j0):
                raise ValueError("off-diagonal law block couples spaces of different size")
            idx = np.arange(i1 - i0)
            mats[:, i0 + idx, j0 + idx] += col[:, None]
    return mats


def _solve_freq_numpy(a_full, msmall, scale, offsets, rhs, chunk=512):
    n, d = rhs.shape
    out = np.empty((n, d), np.complex128)
    for s in range(0, n, chunk):
        e = min(s + chunk, n)
        mats = _expand_blocks_numpy(msmall[s:e], scale[s:e], a_full, offsets)
        out[s:e] = np.linalg.solve(mats, rhs[s:e][..., None])[..., 0]
    return out


if _HAVE_NUMBA:

    @njit(parallel=True, cache=True)
    def _solve_freq_numba(a_full, msmall, scale, offsets, rhs):  # pragma: no cover
        n, d = rhs.shape
        nb = offsets.shape[0] - 1
        out = np.empty((n, d), np.complex128)
        for k in prange(n):
            mat = a_full.copy()
            for bi in range(nb):
                i0 = offsets[bi]
                ni = offsets[bi + 1] - i0
                for bj in range(nb):
                    j0 = offsets[bj]
                    v = msmall[k, bi, bj] * scale[k]
                    if v != 0:
                        for s in range(ni):
                            mat[i0 + s, j0 + s] += v
            out[k] = np.linalg.solve(mat, rhs[k])
        return out


def solve_frequency_systems(a_full, msmall, scale, offsets, rhs):
    """Solve ``(scale_k * expand(msmall_k) + a_full) x_k = rhs_k`` for all k.

    Parameters
    ----------
    a_full : (d, d) complex ndarray
        Frequency-independent part (the spatial operator).
    msmall : (n, nb, nb) complex ndarray
        Block-level law symbol per frequency.
    scale : (n,) complex ndarray
        Multiplier per frequency (``i xi_k + nu``).
    offsets : (nb + 1,) int ndarray
        Block offsets into the full dimension d.
    rhs : (n, d) complex ndarray

    Returns
    -------
    (n, d) complex ndarray
    """
    a_full = np.ascontiguousarray(a_full, np.complex128)
    msmall = np.ascontiguousarray(msmall, np.complex128)
    scale = np.ascontiguousarray(scale, np.complex128)
    offsets = np.ascontiguousarray(offsets, np.int64)
    rhs = np.ascontiguousarray(rhs, np.complex128)
    if BACKEND == "numba":
        # validate incompatible off-diagonal coupling up front; the jitted
        # loop assumes it was rejected here
        nb = len(offsets) - 1
        sizes = np.diff(offsets)
        for bi in range(nb):
            for bj in range(nb):
                if sizes[bi] != sizes[bj] and np.any(msmall[:, bi, bj]):
                    raise ValueError(
                        "off-diagonal law block couples spaces of different size"
                    )
        return _solve_freq_numba(a_full, msmall, scale, offsets, rhs)
    return _solve_freq_numpy(a_full, msmall, scale, offsets, rhs)


# ---------------------------------------------------------------------------
# implicit time stepping:
#   (M0[k+1]/dt + M1[k+1] + A) u[k+1] = f[k+1] + M0[k]/dt u[k] - delay term
#
# m0, m1 are (n, d, d) series (already sampled on the grid).  q >= 1 adds an
# exact grid-shift history read  tau * u[k+1-q]  on the left-hand side.
# ---------------------------------------------------------------------------

def _step_numpy(m0, m1, a_full, f, dt, q, tau):
    n, d = f.shape
    u = np.zeros((n, d), np.complex128)
    for k in range(n - 1):
        lhs = m0[k + 1] / dt + m1[k + 1] + a_full
        rhs = f[k + 1] + m0[k] @ u[k] / dt
        if q > 0 and k + 1 - q >= 0:
            rhs = rhs - tau * u[k + 1 - q]
        u[k + 1] = np.linalg.solve(lhs, rhs)
    return u


if _HAVE_NUMBA:

    @njit(cache=True)
    def _step_numba(m0, m1, a_full, f, dt, q, tau):  # pragma: no cover
        n, d = f.shape
        u = np.zeros((n, d), np.complex128)
        for k in range(n - 1):
            lhs = m0[k + 1] / dt + m1[k + 1] + a_full
            rhs = f[k + 1] + m0[k] @ u[k] / dt
            if q > 0 and k + 1 - q >= 0:
                rhs = rhs - tau * u[k + 1 - q]
            u[k + 1] = np.linalg.solve(lhs, rhs)
        return u


def backward_step_series(m0, m1, a_full, f, dt, delay_steps=0, delay_coeff=0.0):
    """Backward implicit sweep for ``d/dt (M0 u) + M1 u + A u (+ tau_h u) = f``.

    The sweep starts from rest (u[0] = 0); the grid is expected to start
    before the data support.  Strictly causal: u[k] never reads f or u beyond
    index k.
    """
    m0 = np.ascontiguousarray(m0, np.complex128)
    m1 = np.ascontiguousarray(m1, np.complex128)
    a_full = np.ascontiguousarray(a_full, np.complex128)
    f = np.ascontiguousarray(f, np.complex128)
    if BACKEND == "numba":
        return _step_numba(m0, m1, a_full, f, float(dt), int(delay_steps),
                           complex(delay_coeff))
    return _step_numpy(m0, m1, a_full, f, float(dt), int(delay_steps),
                       complex(delay_coeff))


# ---------------------------------------------------------------------------
# O(n^2) causal convolution quadrature (time-domain oracle)
#   y[j] = dt * sum_m k[m] u[j - m],   m over kernel samples at t >= 0
# ---------------------------------------------------------------------------

def _convolve_numpy(kern, u, dt):
    n, d = u.shape
    out = np.empty((n, d), np.complex128)
    for p in range(d):
        out[:, p] = np.convolve(kern, u[:, p])[:n]
    return dt * out


if _HAVE_NUMBA:

    @njit(parallel=True, cache=True)
    def _convolve_numba(kern, u, dt):  # pragma: no cover
        n, d = u.shape
        nk = kern.shape[0]
        out = np.zeros((n, d), np.complex128)
        for j in prange(n):
            top = min(j + 1, nk)
            for m in range(top):
                out[j] += kern[m] * u[j - m]
        return dt * out


def causal_convolve_direct(kern, u, dt):
    """Direct quadrature of ``(k * u)(t_j) = dt sum_m k(t_m) u(t_j - t_m)``.

    ``kern`` holds the kernel samples starting at t = 0.  Used as the
    independent cross-check for the frequency-domain convolution.
    """
    kern = np.ascontiguousarray(kern, np.complex128)
    u = np.ascontiguousarray(u, np.complex128)
    if BACKEND == "numba":
        return _convolve_numba(kern, u, float(dt))
    return _convolve_numpy(kern, u, float(dt))
