"""Composable symbols z -> M(z) for material laws.

A law is a small expression tree over matrix-valued nodes, evaluable at any
complex z != 0 (vectorized over arrays of z).  The declared disc B(r, r)
(center r, radius r) is where the solvability checks sample; evaluation
itself only needs z in the tree's own domain (Neumann nodes contract,
kernel transforms converge for Re(1/z) > 0).

Checks are sampled, not proved: the positivity conditions quantify over a
disc, and we estimate the infimum on a polar grid.  The functions involved
are smooth, so this is adequate for experiment-grade certification;
reports carry the sample count and the argmin.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DivergenceError,
    ProjectorInvalidError,
    ShapeMismatchError,
    SpdViolationError,
)

NEUMANN_TOL = 1e-14
NEUMANN_MAX_TERMS = 200
# offset replacing z = 0 in z^-1 evaluations, relative to the disc radius
ZERO_OFFSET = 1e-9


def _as_matrix(b):
    b = np.atleast_2d(np.asarray(b, np.complex128))
    if b.shape[0] != b.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ValueError("matrix entries must be finite")
    return b


def _eye_like(z, d):
    out = np.zeros(np.shape(z) + (d, d), np.complex128)
    out[..., np.arange(d), np.arange(d)] = 1.0
    return out


class SymbolExpr:
    """Base node; subclasses implement ``eval(z, dim)`` with broadcasting."""

    def eval(self, z, dim):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Const(SymbolExpr):
    """Constant operator coefficient."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_matrix(self.matrix))

    def eval(self, z, dim):
        return np.broadcast_to(self.matrix, np.shape(z) + self.matrix.shape).copy()

    def to_dict(self):
        return {"kind": "const",
                "matrix_re": self.matrix.real.tolist(),
                "matrix_im": self.matrix.imag.tolist()}


@dataclass(frozen=True)
class ScalarPower(SymbolExpr):
    """z**alpha times the identity (principal branch; alpha >= 0)."""

    alpha: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("ScalarPower exponent must be >= 0")

    def eval(self, z, dim):
        zp = np.asarray(z, np.complex128) ** self.alpha
        return zp[..., None, None] * _eye_like(z, dim)

    def to_dict(self):
        return {"kind": "scalar_power", "alpha": self.alpha}


@dataclass(frozen=True)
class Sum(SymbolExpr):
    children: tuple

    def eval(self, z, dim):
        acc = self.children[0].eval(z, dim)
        for c in self.children[1:]:
            acc = acc + c.eval(z, dim)
        return acc

    def to_dict(self):
        return {"kind": "sum", "children": [c.to_dict() for c in self.children]}


@dataclass(frozen=True)
class Product(SymbolExpr):
    children: tuple

    def eval(self, z, dim):
        acc = self.children[0].eval(z, dim)
        for c in self.children[1:]:
            acc = acc @ c.eval(z, dim)
        return acc

    def to_dict(self):
        return {"kind": "product", "children": [c.to_dict() for c in self.children]}


@dataclass(frozen=True)
class NeumannInverse(SymbolExpr):
    """(1 + E(z))^-1 through the Neumann series sum (-E)^j.

    ``bound`` is the certified sup of ||E(z)|| over the declared disc,
    sampled at build time by :func:`certify_neumann`; it must be < 1.
    The series truncates when the term norm drops below 1e-14 or after 200
    terms, giving a remainder of at most q^(J+1)/(1-q).
    """

    child: SymbolExpr
    bound: float = None

    def eval(self, z, dim):
        e = self.child.eval(z, dim)
        acc = _eye_like(z, dim)
        term = acc.copy()
        for j in range(NEUMANN_MAX_TERMS):
            term = -term @ e
            norm = np.max(np.sqrt(np.sum(np.abs(term) ** 2, axis=(-2, -1))))
            acc = acc + term
            if norm < NEUMANN_TOL:
                return acc
        raise DivergenceError(
            "Neumann series did not reach 1e-14 within 200 terms; "
            f"certified bound was {self.bound}, evaluation point outside "
            "the contraction region"
        )

    def to_dict(self):
        return {"kind": "neumann_inverse", "child": self.child.to_dict(),
                "bound": self.bound}


@dataclass(frozen=True)
class ExpDelay(SymbolExpr):
    """exp(h / z) times the identity; h <= 0 is a delay."""

    h: float

    def __post_init__(self):
        if self.h > 0:
            raise ValueError("ExpDelay requires h <= 0 (delays only)")

    def eval(self, z, dim):
        w = np.exp(self.h / np.asarray(z, np.complex128))
        return w[..., None, None] * _eye_like(z, dim)

    def to_dict(self):
        return {"kind": "exp_delay", "h": self.h}


@dataclass(frozen=True)
class KernelHat(SymbolExpr):
    """sqrt(2 pi) k_hat(-i / z) of a tabulated kernel on t >= 0.

    Realized as the quadrature ``sum_j w_j k(t_j) exp(-t_j / z)``, which for
    z on the spectral circle coincides with the weighted transform of the
    sampled kernel.  Scalar tables act as multiples of the identity; a
    (m, d, d) table gives the matrix-valued transform.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, float)
        v = np.asarray(self.values, np.complex128)
        if t.ndim != 1 or len(t) < 2 or np.any(t < 0):
            raise ValueError("kernel table needs 1d times on t >= 0")
        if v.shape[0] != len(t):
            raise ValueError("kernel values must match the time table")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def weight(self):
        return float(self.times[1] - self.times[0])

    def eval(self, z, dim):
        z = np.asarray(z, np.complex128)
        flat = z.reshape(-1)
        out = np.empty((flat.size,) + (dim, dim), np.complex128)
        chunk = max(1, 2 ** 22 // max(len(self.times), 1))
        for s in range(0, flat.size, chunk):
            e = min(s + chunk, flat.size)
            damp = np.exp(-np.multiply.outer(1.0 / flat[s:e], self.times))
            if self.values.ndim == 1:
                scal = self.weight * damp @ self.values
                out[s:e] = scal[:, None, None] * np.eye(dim)
            else:
                out[s:e] = self.weight * np.tensordot(damp, self.values, axes=(1, 0))
        return out.reshape(np.shape(z) + (dim, dim))

    def to_dict(self):
        return {"kind": "kernel_hat", "times": self.times.tolist(),
                "values_re": np.asarray(self.values).real.tolist(),
                "values_im": np.asarray(self.values).imag.tolist()}


# ---------------------------------------------------------------------------
# the law object
# ---------------------------------------------------------------------------

def disc_samples(r, n_rad=32, n_ang=128):
    """Polar sample grid of B(r, r), z = 0 replaced by a tiny real offset."""
    rho = (np.arange(n_rad) + 1.0) / n_rad
    theta = 2.0 * np.pi * np.arange(n_ang) / n_ang
    z = r + r * np.multiply.outer(rho, np.exp(1j * theta))
    z = z.reshape(-1)
    tiny = np.abs(z) < ZERO_OFFSET * r
    z[tiny] = ZERO_OFFSET * r
    return z


def certify_neumann(child, r, dim, q_max=0.999, n_rad=8, n_ang=32):
    """Sample sup ||E(z)|| over B(r, r) and wrap E in a certified inverse."""
    z = disc_samples(r, n_rad, n_ang)
    vals = child.eval(z, dim)
    q = float(np.max(np.linalg.norm(vals, ord=2, axis=(-2, -1))))
    if q >= q_max:
        raise DivergenceError(
            f"Neumann child has sampled sup norm {q:.4g} >= {q_max} on "
            f"B({r}, {r}); shrink the disc radius"
        )
    return NeumannInverse(child, bound=q)


@dataclass(frozen=True)
class MaterialLaw:
    """Holomorphic symbol with its declared disc B(r, r) and dimension."""

    expr: SymbolExpr
    r: float
    dim: int
    is_real: bool = True

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("disc radius must be positive")
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")

    def eval(self, z):
        """M(z), shape (d, d), or (..., d, d) for array z."""
        scalar = np.isscalar(z) or np.ndim(z) == 0
        out = self.expr.eval(np.asarray(z, np.complex128), self.dim)
        return out[()] if not scalar else out.reshape(self.dim, self.dim)

    def __add__(self, other):
        if not isinstance(other, MaterialLaw):
            return NotImplemented
        if other.dim != self.dim:
            raise ShapeMismatchError("cannot add laws of different dimension")
        return MaterialLaw(Sum((self.expr, other.expr)), min(self.r, other.r),
                           self.dim, self.is_real and other.is_real)


def eval_law(law, z):
    return law.eval(z)


@dataclass
class PositivityReport:
    """Sampled estimate of the best constant in Re z^-1 M(z) >= c."""

    c_est: float
    argmin_z: complex
    samples: int
    passed: bool

    def lines(self):
        return [f"c_est={self.c_est:.12g}",
                f"argmin_z={self.argmin_z.real:.12g}{self.argmin_z.imag:+.12g}j",
                f"samples={self.samples}",
                f"pass={'true' if self.passed else 'false'}"]


def _min_hermitian_eig(law, z):
    """Minimum over z of lambda_min of the Hermitian part of z^-1 M(z)."""
    vals = law.eval(z)
    vals = vals / z[:, None, None]
    herm = 0.5 * (vals + np.conj(np.swapaxes(vals, -2, -1)))
    eigs = np.linalg.eigvalsh(herm)
    mins = eigs[..., 0]
    k = int(np.argmin(mins))
    return float(mins[k]), complex(z[k])


def check_positivity(law, r=None, n_rad=32, n_ang=128):
    """Sample Re z^-1 M(z) >= c over the disc B(r, r).

    Returns a :class:`PositivityReport` with the sampled minimum of the
    smallest eigenvalue of the Hermitian part; ``passed`` is c_est > 0.
    """
    r = law.r if r is None else float(r)
    if n_rad < 8 or n_ang < 8:
        raise ValueError("need at least 8 radial and angular samples")
    z = disc_samples(r, n_rad, n_ang)
    c_est, argmin = _min_hermitian_eig(law, z)
    return PositivityReport(c_est, argmin, z.size, c_est > 0.0)


def check_stability(law, nu0, nu_prime, samples=256):
    """Sample the exponential-stability condition at probe rate nu_prime.

    The condition asks for Re z^-1 M(z) >= c > 0 outside the closed ball
    B(-1/(2 nu'), 1/(2 nu')); we sample its boundary circle plus far-field
    rings |z| in {10, 100}.
    """
    if not (0.0 < nu_prime < nu0):
        raise ValueError("need 0 < nu_prime < nu0")
    a = 1.0 / (2.0 * nu_prime)
    theta = 2.0 * np.pi * (np.arange(samples) + 0.5) / samples
    ring = np.exp(1j * theta)
    z = np.concatenate([-a + a * ring, 10.0 * ring, 100.0 * ring])
    z = z[np.abs(z) > ZERO_OFFSET]
    c_est, argmin = _min_hermitian_eig(law, z)
    return PositivityReport(c_est, argmin, z.size, c_est > 0.0)


# ---------------------------------------------------------------------------
# builders for the shipped law families
# ---------------------------------------------------------------------------

def _require_spd(m, name):
    m = _as_matrix(m)
    if np.max(np.abs(m - m.conj().T)) > 1e-12 * max(np.max(np.abs(m)), 1.0):
        raise SpdViolationError(f"{name} must be selfadjoint")
    if np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))) <= 0:
        raise SpdViolationError(f"{name} must be positive definite")
    return m


def _block_diag(a, b):
    d1, d2 = a.shape[0], b.shape[0]
    out = np.zeros((d1 + d2, d1 + d2), np.complex128)
    out[:d1, :d1] = a
    out[d1:, d1:] = b
    return out


def _is_real(*mats):
    return all(np.max(np.abs(np.asarray(m).imag)) == 0 for m in mats)


def build_heat(kappa, r=1.0):
    """Heat-conduction law diag(1, 0) + z diag(0, kappa^-1).

    ``kappa`` may be a positive scalar or an spd conductivity matrix; the
    state is (temperature block, flux block).
    """
    if np.isscalar(kappa):
        if kappa <= 0:
            raise SpdViolationError("kappa must be positive")
        kinv = np.array([[1.0 / kappa]], np.complex128)
    else:
        kinv = np.linalg.inv(_require_spd(kappa, "kappa"))
    dk = kinv.shape[0]
    m0 = _block_diag(np.eye(1), np.zeros((dk, dk)))
    m1 = _block_diag(np.zeros((1, 1)), kinv)
    expr = Sum((Const(m0), Product((ScalarPower(1.0), Const(m1)))))
    return MaterialLaw(expr, r, 1 + dk, is_real=_is_real(kinv))


def build_maxwell(eps, mu, sigma, r=None):
    """Maxwell law diag(eps, mu) + z diag(sigma, 0).

    eps = 0 with Re sigma positive definite gives the eddy-current form.
    Scalars are promoted to 1x1 blocks.
    """
    eps_m = _as_matrix(eps if not np.isscalar(eps) else [[eps]])
    mu_m = _require_spd(mu if not np.isscalar(mu) else [[mu]], "mu")
    sig_m = _as_matrix(sigma if not np.isscalar(sigma) else [[sigma]])
    if eps_m.shape != sig_m.shape:
        raise ShapeMismatchError("eps and sigma blocks must match")
    if np.max(np.abs(eps_m)) == 0.0:
        if np.min(np.linalg.eigvalsh(0.5 * (sig_m + sig_m.conj().T))) <= 0:
            raise SpdViolationError(
                "eddy-current form (eps = 0) needs Re sigma positive definite")
    else:
        _require_spd(eps_m, "eps")
    m0 = _block_diag(eps_m, mu_m)
    m1 = _block_diag(sig_m, np.zeros_like(mu_m))
    expr = Sum((Const(m0), Product((ScalarPower(1.0), Const(m1)))))
    if r is None:
        # zero-order block only helps; the z-term is controlled on small discs
        r = 1.0 if np.max(np.abs(eps_m)) == 0.0 else 0.45 / max(
            np.linalg.norm(sig_m, 2) / max(np.min(np.linalg.eigvalsh(
                0.5 * (eps_m + eps_m.conj().T))), 1e-30), 1e-30)
        r = min(max(r, 1e-3), 1.0)
    return MaterialLaw(expr, r, m0.shape[0], is_real=_is_real(eps_m, mu_m, sig_m))


def build_elastic(c_tensor, r=1.0):
    """Elasticity law diag(1, C^-1) for spd C (velocity, stress blocks)."""
    c_m = _require_spd(c_tensor if not np.isscalar(c_tensor) else [[c_tensor]],
                       "C")
    cinv = np.linalg.inv(c_m)
    expr = Const(_block_diag(np.eye(1), cinv))
    return MaterialLaw(expr, r, 1 + cinv.shape[0], is_real=_is_real(cinv))


def build_kelvin_voigt(c_tensor, d_tensor, r=None):
    """Kelvin-Voigt law diag(1, z (1 + z D^-1 C)^-1 D^-1), D spd.

    The disc radius defaults to the largest one on which the Neumann child
    z D^-1 C is certified to contract.
    """
    d_m = _require_spd(d_tensor if not np.isscalar(d_tensor) else [[d_tensor]],
                       "D")
    c_m = _as_matrix(c_tensor if not np.isscalar(c_tensor) else [[c_tensor]])
    if c_m.shape != d_m.shape:
        raise ShapeMismatchError("C and D must have equal shape")
    dinv = np.linalg.inv(d_m)
    dinv_c = dinv @ c_m
    if r is None:
        r = 0.45 / max(np.linalg.norm(dinv_c, 2), 0.5)
    dk = d_m.shape[0]
    child = Product((ScalarPower(1.0), Const(dinv_c)))
    inv = certify_neumann(child, r, dk)
    bottom = Product((ScalarPower(1.0), inv, Const(dinv)))
    expr = Sum((
        Const(_block_diag(np.eye(1), np.zeros((dk, dk)))),
        _BlockEmbed(bottom, 1, dk),
    ))
    return MaterialLaw(expr, r, 1 + dk, is_real=_is_real(c_m, d_m))


@dataclass(frozen=True)
class _BlockEmbed(SymbolExpr):
    """Inner expression on the trailing diagonal block, zero elsewhere."""

    inner: SymbolExpr
    d_top: int
    d_bot: int

    def eval(self, z, dim):
        if dim != self.d_top + self.d_bot:
            raise ShapeMismatchError("block embedding dimension mismatch")
        small = self.inner.eval(z, self.d_bot)
        out = np.zeros(np.shape(z) + (dim, dim), np.complex128)
        out[..., self.d_top:, self.d_top:] = small
        return out

    def to_dict(self):
        return {"kind": "block_embed", "child": self.inner.to_dict(),
                "d_top": self.d_top, "d_bot": self.d_bot}


def build_integro(times, values, r=0.25, dim=None):
    """Memory law 1 + sqrt(2 pi) k_hat(-i z^-1) from a tabulated kernel."""
    k = KernelHat(times, values)
    d = dim if dim is not None else (1 if np.asarray(values).ndim == 1
                                     else np.asarray(values).shape[1])
    expr = Sum((Const(np.eye(d)), k))
    return MaterialLaw(expr, r, d, is_real=_is_real(values))


def build_fractional(m0, alpha_terms, m1, r=1.0):
    """Fractional law M0 + sum_alpha z^alpha M_alpha + z M1.

    ``alpha_terms`` is a sequence of (alpha, matrix) with alpha in (0, 1).
    """
    m0_m = _as_matrix(m0)
    d = m0_m.shape[0]
    parts = [Const(m0_m)]
    mats = [m0_m]
    for alpha, mat in alpha_terms:
        if not (0.0 < alpha < 1.0):
            raise ValueError(f"fractional exponent must be in (0,1), got {alpha}")
        mat = _as_matrix(mat)
        if mat.shape != m0_m.shape:
            raise ShapeMismatchError("fractional coefficient shape mismatch")
        parts.append(Product((ScalarPower(alpha), Const(mat))))
        mats.append(mat)
    m1_m = _as_matrix(m1)
    if m1_m.shape != m0_m.shape:
        raise ShapeMismatchError("M1 shape mismatch")
    if np.max(np.abs(m1_m)) > 0:
        parts.append(Product((ScalarPower(1.0), Const(m1_m))))
    mats.append(m1_m)
    return MaterialLaw(Sum(tuple(parts)), r, d, is_real=_is_real(*mats))


def build_delay(h, b, r=0.25):
    """Pure delay term z exp(h/z) B (compose with other laws by addition)."""
    b_m = _as_matrix(b if not np.isscalar(b) else [[b]])
    expr = Product((ScalarPower(1.0), ExpDelay(h), Const(b_m)))
    return MaterialLaw(expr, r, b_m.shape[0], is_real=_is_real(b_m))


def constant_law(mat, r=1.0):
    """M(z) = const matrix."""
    m = _as_matrix(mat if not np.isscalar(mat) else [[mat]])
    return MaterialLaw(Const(m), r, m.shape[0], is_real=_is_real(m))


def zero_order_law(m0, m1, r=1.0):
    """Affine law M0 + z M1 (the workhorse shape)."""
    m0_m = _as_matrix(m0 if not np.isscalar(m0) else [[m0]])
    m1_m = _as_matrix(m1 if not np.isscalar(m1) else [[m1]])
    if m0_m.shape != m1_m.shape:
        raise ShapeMismatchError("M0 and M1 must have equal shape")
    expr = Sum((Const(m0_m), Product((ScalarPower(1.0), Const(m1_m)))))
    return MaterialLaw(expr, r, m0_m.shape[0], is_real=_is_real(m0_m, m1_m))


# ---------------------------------------------------------------------------
# kernel and fractional hypothesis checkers
# ---------------------------------------------------------------------------

def check_integro_kernel(times, values, nu0, n_freq=512):
    """Sampled hypotheses for memory kernels.

    Checks (a) selfadjoint values, (b) boundedness of t Im k_hat(t - i nu0)
    over a frequency sweep (no growth between the lower and upper half of
    the sweep), (c) pairwise commutation for matrix kernels.
    """
    t = np.asarray(times, float)
    v = np.asarray(values, np.complex128)
    if v.ndim == 1:
        v3 = v[:, None, None]
    else:
        v3 = v
    sym_ok = bool(np.max(np.abs(v3 - np.conj(np.swapaxes(v3, -2, -1))))
                  <= 1e-12 * max(1.0, np.max(np.abs(v3))))

    comm_ok = True
    if v3.shape[1] > 1:
        step = max(1, len(t) // 16)
        sel = v3[::step]
        for i in range(len(sel)):
            for j in range(i + 1, len(sel)):
                if np.max(np.abs(sel[i] @ sel[j] - sel[j] @ sel[i])) > 1e-10:
                    comm_ok = False
                    break

    if np.max(np.abs(v3)) == 0.0:
        return sym_ok and comm_ok

    dt = t[1] - t[0]
    freqs = np.linspace(0.0, np.pi / dt, n_freq)
    # k_hat(xi - i nu0) = (2 pi)^(-1/2) int k(s) exp(-i xi s - nu0 s) ds
    damp = np.exp(-np.multiply.outer(1j * freqs + nu0, t))
    hat = dt / math.sqrt(2.0 * math.pi) * np.tensordot(damp, v3, axes=(1, 0))
    im_part = (hat - np.conj(np.swapaxes(hat, -2, -1))) / 2j
    tmax = np.linalg.eigvalsh(im_part)[..., -1] * freqs
    half = n_freq // 2
    lo, hi = np.max(tmax[:half]), np.max(tmax[half:])
    bounded = bool(hi <= max(lo, 0.0) * 1.1 + 1e-10)
    return sym_ok and comm_ok and bounded


def check_fractional_conditions(p, q, f, m0, alpha_terms, m1, tol=1e-10):
    """Sampled hypotheses for fractional laws M0 + sum z^a M_a + z M1.

    P, Q, F must be orthogonal projectors resolving the identity; the
    coefficients must be selfadjoint, commute with the projectors, satisfy
    P M_a P >= 0 and Q M_a Q >= 0 and M0 >= 0, and M0, Re M1, M_{a0} must
    be strictly positive definite on the ranges of P, Q, F (a0 the smallest
    exponent).  Raises ProjectorInvalidError for a bad projector triple,
    returns the conjunction of the remaining checks.
    """
    p, q, f = _as_matrix(p), _as_matrix(q), _as_matrix(f)
    d = p.shape[0]
    for name, proj in (("P", p), ("Q", q), ("F", f)):
        if np.max(np.abs(proj @ proj - proj)) > tol or \
                np.max(np.abs(proj - proj.conj().T)) > tol:
            raise ProjectorInvalidError(f"{name} is not an orthogonal projector")
    if np.max(np.abs(p + q + f - np.eye(d))) > tol:
        raise ProjectorInvalidError("P + Q + F must resolve the identity")

    m0_m, m1_m = _as_matrix(m0), _as_matrix(m1)
    terms = sorted(((a, _as_matrix(m)) for a, m in alpha_terms),
                   key=lambda am: am[0])

    def selfadj(m):
        return np.max(np.abs(m - m.conj().T)) <= tol

    def commutes(m):
        return all(np.max(np.abs(m @ x - x @ m)) <= tol for x in (p, q, f))

    def nonneg(m):
        return np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))) >= -tol

    def strictly_positive_on(m, proj):
        rank = int(round(np.trace(proj).real))
        if rank == 0:
            return True
        w, vecs = np.linalg.eigh(proj)
        basis = vecs[:, w > 0.5]
        herm = basis.conj().T @ (0.5 * (m + m.conj().T)) @ basis
        return np.min(np.linalg.eigvalsh(herm)) > tol

    ok = selfadj(m0_m) and nonneg(m0_m) and commutes(m0_m)
    for _, mat in terms:
        ok = ok and selfadj(mat) and commutes(mat)
        ok = ok and nonneg(p @ mat @ p) and nonneg(q @ mat @ q)
    ok = ok and strictly_positive_on(m0_m, p)
    re_m1 = 0.5 * (m1_m + m1_m.conj().T)
    ok = ok and strictly_positive_on(re_m1, q)
    if int(round(np.trace(f).real)) > 0:
        # with no fractional exponents the lowest-order term left to control
        # the F range is Re M1 itself
        lowest = terms[0][1] if terms else re_m1
        ok = ok and strictly_positive_on(lowest, f)
    return bool(ok)


# ---------------------------------------------------------------------------
# JSON law files
# ---------------------------------------------------------------------------

_LAW_SCHEMA = {
    "type": "object",
    "required": ["dim", "r", "expr"],
    "additionalProperties": False,
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "r": {"type": "number", "exclusiveMinimum": 0},
        "expr": {"type": "object"},
    },
}


def _expr_from_dict(node):
    kind = node.get("kind")
    if kind == "const":
        re_m = np.asarray(node["matrix_re"], float)
        im_m = np.asarray(node.get("matrix_im", np.zeros_like(re_m)), float)
        return Const(re_m + 1j * im_m)
    if kind == "scalar_power":
        return ScalarPower(float(node["alpha"]))
    if kind == "sum":
        return Sum(tuple(_expr_from_dict(c) for c in node["children"]))
    if kind == "product":
        return Product(tuple(_expr_from_dict(c) for c in node["children"]))
    if kind == "neumann_inverse":
        return NeumannInverse(_expr_from_dict(node["child"]),
                              bound=node.get("bound"))
    if kind == "exp_delay":
        return ExpDelay(float(node["h"]))
    if kind == "kernel_hat":
        re_v = np.asarray(node["values_re"], float)
        im_v = np.asarray(node.get("values_im", np.zeros_like(re_v)), float)
        return KernelHat(np.asarray(node["times"], float), re_v + 1j * im_v)
    if kind == "block_embed":
        return _BlockEmbed(_expr_from_dict(node["child"]),
                           int(node["d_top"]), int(node["d_bot"]))
    raise ValueError(f"unknown law node kind {kind!r}")


def law_from_dict(doc):
    import jsonschema

    jsonschema.validate(doc, _LAW_SCHEMA)
    expr = _expr_from_dict(doc["expr"])
    law = MaterialLaw(expr, float(doc["r"]), int(doc["dim"]), is_real=False)
    # probe whether the law maps real axis points to real matrices
    probe = law.eval(np.array([0.3, 0.7]) * doc["r"])
    real = bool(np.max(np.abs(probe.imag)) < 1e-14)
    return MaterialLaw(expr, law.r, law.dim, is_real=real)


def load_law(path):
    with open(path) as fh:
        return law_from_dict(json.load(fh))


def save_law(law, path):
    doc = {"dim": law.dim, "r": law.r, "expr": law.expr.to_dict()}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
