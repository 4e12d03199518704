"""Discrete calculus in the exponentially weighted space L2_nu(R, H).

A :class:`Signal` holds samples of a vector-valued function on a uniform
time window.  All operators of the weighted calculus (time derivative,
its causal inverse, fractional powers, translations, causal convolutions)
are realized as frequency multipliers under the weighted transform

    u_hat(xi_k) = dt * sum_j u(t_j) exp(-(nu + i xi_k) t_j),

which is a phase-shifted FFT of the weighted samples exp(-nu t) u(t).
The transform pair is exact on the grid, so operator identities that hold
for the multipliers (inverse pairs, semigroup laws, Plancherel) hold to
rounding error.

The discrete transform is periodic while the underlying calculus lives on
the whole real line.  Operators whose continuum kernels are causal and
exponentially damped (integration, negative fractional powers, causal
convolution) therefore zero-pad the window by ``ln(1e10)/nu`` time units
before multiplying, and discard the pad afterwards; the retained window is
then contaminated by at most a relative 1e-10 wrap-around.  Requesting a
pad beyond the size cap raises :class:`~evokit.errors.WrapMarginError`.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import EdgeSupportError, SupportEscapeError, WrapMarginError

# target wrap-around suppression exp(-margin) <= 1e-10
WRAP_LOG_TOL = math.log(1e10)
# hard cap on padded transform sizes
MAX_PADDED_N = 2 ** 22
# relative threshold treating samples as numerically zero for support checks
SUPPORT_RTOL = 1e-12


def _is_pow2(n):
    return n >= 2 and (n & (n - 1)) == 0


def _next_pow2(n):
    return 1 << (int(n) - 1).bit_length()


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time window with an exponential weight.

    Parameters
    ----------
    t0 : float
        Window start.  Must lie on the grid (t0/dt integer) so that
        translations and convolution index arithmetic are exact.
    dt : float
        Step size, > 0.
    n : int
        Number of nodes, a power of two (>= 2).
    nu : float
        Exponential weight, > 0.
    """

    t0: float
    dt: float
    n: int
    nu: float

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.nu <= 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if not _is_pow2(self.n):
            raise ValueError(f"n must be a power of two >= 2, got {self.n}")
        ratio = self.t0 / self.dt
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("t0 must be an integer multiple of dt")

    @property
    def length(self):
        """Window length n * dt."""
        return self.n * self.dt

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.n)

    @property
    def freqs(self):
        """Angular frequencies xi_k = 2 pi k' / (n dt), signed index k'."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, self.dt)

    def wrap_margin(self, support_fraction):
        """Suppression exponent nu * T * (1 - support_fraction)."""
        return self.nu * self.length * (1.0 - support_fraction)

    def pad_steps(self):
        """Grid steps needed past the window end for 1e-10 wrap suppression."""
        return int(math.ceil(WRAP_LOG_TOL / (self.nu * self.dt)))

    def padded(self):
        """Grid extended past the window end to the next admissible size."""
        n2 = _next_pow2(self.n + self.pad_steps())
        if n2 > MAX_PADDED_N:
            raise WrapMarginError(
                f"suppressing wrap-around to 1e-10 at nu={self.nu} needs "
                f"{n2} nodes, cap is {MAX_PADDED_N}; enlarge nu or dt"
            )
        return TimeGrid(self.t0, self.dt, n2, self.nu)


@dataclass
class Signal:
    """Sampled element of L2_nu(R, H) on a :class:`TimeGrid`.

    ``values`` has shape (n, dim), one complex state vector per node.
    ``pad_tail`` optionally stores the signal's continuation on the padded
    part of the window; operators that pad internally stash the tail they
    computed, which makes operator compositions exact.  It is dropped by
    :meth:`copy` because mutated values would invalidate it.
    """

    grid: TimeGrid
    values: np.ndarray
    pad_tail: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, np.complex128))
        if self.values.shape[0] == 1 and self.grid.n != 1 and self.values.shape[1] == self.grid.n:
            self.values = self.values.T
        if self.values.shape[0] != self.grid.n:
            raise ValueError(
                f"values has {self.values.shape[0]} rows, grid has {self.grid.n} nodes"
            )

    @property
    def dim(self):
        return self.values.shape[1]

    @classmethod
    def from_callable(cls, grid, func, dim=None):
        """Sample ``func(t)`` (scalar or vector valued) on the grid."""
        rows = [np.atleast_1d(func(t)) for t in grid.times]
        vals = np.asarray(rows, np.complex128)
        if dim is not None and vals.shape[1] != dim:
            raise ValueError(f"profile returned dim {vals.shape[1]}, expected {dim}")
        return cls(grid, vals)

    def copy(self):
        return Signal(self.grid, self.values.copy())

    def support_bounds(self, rtol=SUPPORT_RTOL):
        """First and last node index with |u| above rtol * max, or None."""
        mags = np.max(np.abs(self.values), axis=1)
        peak = mags.max()
        if peak == 0.0:
            return None
        idx = np.nonzero(mags > rtol * peak)[0]
        return int(idx[0]), int(idx[-1])


@dataclass
class Spectrum:
    """Weighted transform of a :class:`Signal` (same layout, frequency side)."""

    grid: TimeGrid
    values: np.ndarray
    freqs: np.ndarray = field(default=None)

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, np.complex128))
        if self.freqs is None:
            self.freqs = self.grid.freqs

    @property
    def dim(self):
        return self.values.shape[1]


# ---------------------------------------------------------------------------
# transform pair
# ---------------------------------------------------------------------------

def fourier_laplace(u: Signal) -> Spectrum:
    """Weighted transform, ``u_hat_k = dt sum_j u_j exp(-(nu + i xi_k) t_j)``."""
    g = u.grid
    w = u.values * np.exp(-g.nu * g.times)[:, None]
    phase = np.exp(-1j * g.freqs * g.t0)
    vals = g.dt * phase[:, None] * np.fft.fft(w, axis=0)
    return Spectrum(g, vals)


def inv_fourier_laplace(s: Spectrum) -> Signal:
    """Exact inverse of :func:`fourier_laplace` on the grid."""
    g = s.grid
    phase = np.exp(1j * g.freqs * g.t0)
    w = np.fft.ifft(s.values * phase[:, None] / g.dt, axis=0)
    return Signal(g, w * np.exp(g.nu * g.times)[:, None])


def weighted_norm(u: Signal, space_weights=None) -> float:
    """Discrete L2_nu norm ``sqrt(dt sum_j exp(-2 nu t_j) |u_j|^2)``.

    ``space_weights`` optionally weights the state-space inner product
    (quadrature weights of a spatial discretization).
    """
    w = np.exp(-2.0 * u.grid.nu * u.grid.times)
    sq = np.abs(u.values) ** 2
    if space_weights is not None:
        sq = sq * np.asarray(space_weights)[None, :]
    return math.sqrt(u.grid.dt * float(np.sum(w[:, None] * sq)))


def weighted_inner(u: Signal, v: Signal, space_weights=None) -> complex:
    """Discrete L2_nu inner product (conjugate-linear in the first slot)."""
    if u.grid != v.grid:
        raise ValueError("signals live on different grids")
    w = np.exp(-2.0 * u.grid.nu * u.grid.times)
    prod = np.conj(u.values) * v.values
    if space_weights is not None:
        prod = prod * np.asarray(space_weights)[None, :]
    return complex(u.grid.dt * np.sum(w[:, None] * prod))


# ---------------------------------------------------------------------------
# multiplier machinery
# ---------------------------------------------------------------------------

def _extend(u: Signal, mode) -> Signal:
    """Extend onto the padded grid.

    A stashed ``pad_tail`` (the continuation a previous operator computed)
    takes precedence; otherwise the pad is filled with zeros or with the
    last value, depending on ``mode``.
    """
    g2 = u.grid.padded()
    vals = np.empty((g2.n, u.dim), np.complex128)
    vals[: u.grid.n] = u.values
    if u.pad_tail is not None and u.pad_tail.shape == (g2.n - u.grid.n, u.dim):
        vals[u.grid.n:] = u.pad_tail
    elif mode == "zero":
        vals[u.grid.n:] = 0.0
    elif mode == "const":
        vals[u.grid.n:] = u.values[-1]
    else:
        raise ValueError(f"pad mode must be 'zero' or 'const', got {mode!r}")
    return Signal(g2, vals)


def apply_multiplier(u: Signal, multiplier, pad="zero") -> Signal:
    """Conjugate a frequency multiplier by the weighted transform.

    ``multiplier(xi)`` receives the (padded) angular frequencies and returns
    per-frequency factors, either shape (n,) applied to every component or
    (n, dim).  The window is extended before multiplying and the result
    restricted back:

    * ``pad="zero"``   zero extension; right for causal multipliers, whose
      response to the inconsistency at the old window end stays in the
      discarded pad region,
    * ``pad="const"``  last-value extension; right for derivative-type
      multipliers applied to signals that have settled,
    * ``pad=None``     operate on the window as is.

    The computed continuation on the pad is stashed on the result as
    ``pad_tail``, so chains of multiplier operators compose exactly.
    """
    if pad is None:
        work = u.copy()
    else:
        work = _extend(u, pad)
    n0 = u.grid.n
    spec = fourier_laplace(work)
    m = np.asarray(multiplier(spec.freqs))
    if m.ndim == 1:
        m = m[:, None]
    spec.values = spec.values * m
    out = inv_fourier_laplace(spec)
    if pad is None:
        return out
    return Signal(u.grid, out.values[:n0].copy(), pad_tail=out.values[n0:].copy())


def _check_edge_support(u: Signal, op_name, width=2, rtol=1e-10):
    # the transform acts on the weighted representative exp(-nu t) u, so
    # wrap-around contamination is governed by ITS edge values
    w = np.max(np.abs(u.values), axis=1) * np.exp(-u.grid.nu * u.grid.times)
    peak = w.max()
    if peak == 0.0:
        return
    if w[:width].max() > rtol * peak:
        raise EdgeSupportError(
            f"{op_name}: weighted input exceeds {rtol:g} * max at the window "
            "start; spectral differentiation needs edge-negligible data"
        )
    if u.pad_tail is not None:
        return  # continuation past the window end is known
    # at the window end either the weighted signal is negligible or the
    # signal has settled, so the constant continuation is consistent
    settled = np.max(np.abs(u.values[-1] - u.values[-4])) \
        <= 1e-7 * np.max(np.abs(u.values))
    if w[-width:].max() > rtol * peak and not settled:
        raise EdgeSupportError(
            f"{op_name}: input neither negligible nor settled at the window "
            "end; spectral differentiation would see a wrap-around seam"
        )


# ---------------------------------------------------------------------------
# the weighted calculus
# ---------------------------------------------------------------------------

def derive(u: Signal) -> Signal:
    """Weighted time derivative, the multiplier ``i xi + nu``.

    Requires the weighted input to be negligible (<= 1e-10 relative) near
    both window edges; raises :class:`EdgeSupportError` otherwise.
    """
    _check_edge_support(u, "derive")
    nu = u.grid.nu
    return apply_multiplier(u, lambda xi: 1j * xi + nu, pad="const")


def integrate(u: Signal) -> Signal:
    """Causal antiderivative, the multiplier ``1 / (i xi + nu)``.

    For nu > 0 this realizes integration from -infinity up to t; the output
    at t_j depends on inputs at t <= t_j up to the wrap tolerance.
    """
    nu = u.grid.nu
    return apply_multiplier(u, lambda xi: 1.0 / (1j * xi + nu))


def fractional_power(u: Signal, alpha: float) -> Signal:
    """Fractional derivative (alpha > 0) or integral (alpha < 0).

    The multiplier is the principal branch of ``(i xi + nu)**alpha``, which
    is well defined because the symbol's real part equals nu > 0.  Positive
    powers inherit the edge-support precondition of :func:`derive`; negative
    powers are causal and padded like :func:`integrate`.
    """
    if not (0.0 < abs(alpha) <= 1.0):
        raise ValueError(f"alpha must lie in [-1, 0) or (0, 1], got {alpha}")
    nu = u.grid.nu
    if alpha > 0:
        _check_edge_support(u, "fractional_power")
        return apply_multiplier(u, lambda xi: (1j * xi + nu) ** alpha, pad="const")
    return apply_multiplier(u, lambda xi: (1j * xi + nu) ** alpha, pad="zero")


def translate(u: Signal, h: float) -> Signal:
    """Time translation ``(tau_h u)(t) = u(t + h)`` for grid-aligned h.

    Realized in the frequency domain by the multiplier ``exp((i xi + nu) h)``
    on the padded window, which reproduces the exact index shift.  Raises
    :class:`SupportEscapeError` if the shifted support leaves the window and
    ValueError for off-grid h (off-grid shifts are rejected, not
    interpolated).
    """
    g = u.grid
    q = h / g.dt
    if abs(q - round(q)) > 1e-9:
        raise ValueError(f"h = {h} is not an integer multiple of dt = {g.dt}")
    q = int(round(q))
    # escape check on the content actually leaving the window
    peak = np.max(np.abs(u.values))
    if peak > 0 and q != 0:
        escaping = u.values[:q] if q > 0 else u.values[q:]
        if np.max(np.abs(escaping)) > 1e-9 * peak:
            raise SupportEscapeError(
                f"translation by h = {h} moves non-negligible support "
                "outside the window"
            )
    nu = g.nu
    return apply_multiplier(u, lambda xi: np.exp((1j * xi + nu) * h))


def translate_index(u: Signal, h: float) -> Signal:
    """Index-shift implementation of :func:`translate` (cross-check path)."""
    g = u.grid
    q = h / g.dt
    if abs(q - round(q)) > 1e-9:
        raise ValueError(f"h = {h} is not an integer multiple of dt = {g.dt}")
    q = int(round(q))
    vals = np.zeros_like(u.values)
    if q >= 0:
        vals[: g.n - q] = u.values[q:]
    else:
        vals[-q:] = u.values[: g.n + q]
    return Signal(g, vals)


def convolve(kernel: Signal, u: Signal) -> Signal:
    """Causal convolution ``(k * u)(t) = int_0^inf k(s) u(t - s) ds``.

    The kernel must be supported on t >= 0 (within the window) and is applied
    through its sampled weighted transform, so the result agrees with the
    rectangle-rule quadrature ``dt sum_m k(t_m) u(t_j - t_m)`` up to wrap
    suppression.  A scalar kernel acts componentwise; a kernel with the
    signal's dimension acts diagonally.
    """
    g = u.grid
    if kernel.grid != g:
        raise ValueError("kernel and signal must share a grid")
    if kernel.dim not in (1, u.dim):
        raise ValueError("kernel dim must be 1 or match the signal")
    tneg = g.times < -0.5 * g.dt
    peak = np.max(np.abs(kernel.values))
    if peak > 0 and np.max(np.abs(kernel.values[tneg])) > SUPPORT_RTOL * peak:
        raise ValueError("convolution kernel must vanish for t < 0")

    n0 = g.n
    up = _extend(u, "zero")
    kp = _extend(kernel, "zero")
    khat = fourier_laplace(kp).values  # dt sum k_j exp(-(nu+i xi) t_j)
    spec = fourier_laplace(up)
    spec.values = spec.values * khat if kernel.dim == u.dim else spec.values * khat[:, [0]]
    out = inv_fourier_laplace(spec)
    return Signal(g, out.values[:n0].copy(), pad_tail=out.values[n0:].copy())


def convolve_direct(kernel: Signal, u: Signal) -> Signal:
    """O(n^2) time-domain quadrature of the causal convolution (oracle)."""
    g = u.grid
    if kernel.grid != g:
        raise ValueError("kernel and signal must share a grid")
    start = int(round(-g.t0 / g.dt))  # index of t = 0
    kern = kernel.values[start:, 0]
    out = _kernels.causal_convolve_direct(kern, u.values, g.dt)
    return Signal(g, out)


# ---------------------------------------------------------------------------
# CSV serialization
# ---------------------------------------------------------------------------

def signal_to_csv(u: Signal, path):
    """Write ``t, re_0, im_0, ..., re_{d-1}, im_{d-1}`` rows, full precision."""
    d = u.dim
    header = "t," + ",".join(f"re_{p},im_{p}" for p in range(d))
    cols = [u.grid.times]
    for p in range(d):
        cols.append(u.values[:, p].real)
        cols.append(u.values[:, p].imag)
    data = np.column_stack(cols)
    np.savetxt(path, data, delimiter=",", header=header, comments="",
               fmt="%.17g")


def signal_from_csv(path, nu):
    """Read a signal written by :func:`signal_to_csv` (weight supplied)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    t = data[:, 0]
    dt = t[1] - t[0]
    grid = TimeGrid(float(t[0]), float(dt), len(t), nu)
    d = (data.shape[1] - 1) // 2
    vals = np.empty((len(t), d), np.complex128)
    for p in range(d):
        vals[:, p] = data[:, 1 + 2 * p] + 1j * data[:, 2 + 2 * p]
    return Signal(grid, vals)
