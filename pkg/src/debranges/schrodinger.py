"""Shooting for -u'' + q u = w u on [0, 1] and the de Branges function.

The integrator is the fourth-order Magnus method with two Gauss nodes per
step.  For this equation the Magnus exponent of each step is a traceless 2x2
matrix, so its exponential is available in closed form and the scheme is exact
for constant potentials and stays accurate for highly oscillatory or growing
solutions (large or complex ``w``).  Error control is by global step halving.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .potential import Potential, as_potential

_GAUSS = np.sqrt(3.0) / 6.0
_CHUNK = 1 << 21
MAX_STEPS = 1 << 15


class ShootingError(RuntimeError):
    pass


@dataclass(frozen=True)
class ShootingResult:
    u_end: complex
    du_end: complex
    w: complex
    step_count: int
    est_error: float
    wronskian: complex


def default_steps(q: Potential) -> int:
    """A mesh size that resolves the potential itself."""
    if q.kind == "registry" and q.name.split(":")[0] in ("zero", "const"):
        return 1
    n = 64
    if q.kind == "registry" and q.name.startswith("cos"):
        k = abs(float(q.name.split(",")[1]))
        n = max(n, int(32 * k))
    return n


@lru_cache(maxsize=64)
def _mesh(q: Potential, n: int):
    nodes = np.union1d(np.linspace(0.0, 1.0, n + 1), q.breakpoints())
    h = np.diff(nodes)
    t1 = nodes[:-1] + h * (0.5 - _GAUSS)
    t2 = nodes[:-1] + h * (0.5 + _GAUSS)
    q1, q2 = q(t1), q(t2)
    qbar = 0.5 * (q1 + q2)
    d = np.sqrt(3.0) / 12.0 * h**2 * (q1 - q2)
    for arr in (h, qbar, d):
        arr.setflags(write=False)
    return h, qbar, d


def _sinhc(sigma, root):
    """sinh(root)/root with root**2 == sigma, safe near zero."""
    small = np.abs(sigma) < 1e-6
    safe = np.where(small, 1.0, root)
    return np.where(small, 1.0 + sigma / 6.0 + sigma**2 / 120.0, np.sinh(safe) / safe)


def _real_ch_sh(sigma):
    r = np.sqrt(np.abs(sigma))
    neg = sigma < 0
    small = r < 1e-3
    safe = np.where(small, 1.0, r)
    ch = np.where(neg, np.cos(r), np.cosh(r))
    sh = np.where(neg, np.sin(safe), np.sinh(safe)) / safe
    sh = np.where(small, 1.0 + sigma / 6.0 + sigma**2 / 120.0, sh)
    return ch, sh


def _step_matrices(h, qbar, d, w):
    """Per-step propagators, arrays of shape (nsteps, nw)."""
    h = h[:, None]
    qbar = qbar[:, None]
    d = d[:, None]
    sigma = d**2 + h**2 * (qbar - w[None, :])
    # np.where evaluates both branches; overflow in the unused one is harmless
    with np.errstate(over="ignore", invalid="ignore"):
        if np.isrealobj(sigma):
            ch, sh = _real_ch_sh(sigma)
        else:
            root = np.sqrt(sigma)
            ch = np.cosh(root)
            sh = _sinhc(sigma, root)
    m11 = ch + sh * d
    m22 = ch - sh * d
    m12 = sh * h
    m21 = sh * h * (qbar - w[None, :])
    return m11, m12, m21, m22


def _reduce(m11, m12, m21, m22):
    """Ordered product M_n ... M_1 by pairwise reduction along axis 0."""
    while m11.shape[0] > 1:
        if m11.shape[0] % 2:
            pad = [np.ones_like(m11[:1]), np.zeros_like(m11[:1]),
                   np.zeros_like(m11[:1]), np.ones_like(m11[:1])]
            m11, m12, m21, m22 = (np.concatenate([x, p]) for x, p in
                                  zip((m11, m12, m21, m22), pad))
        a11, a12, a21, a22 = m11[0::2], m12[0::2], m21[0::2], m22[0::2]
        b11, b12, b21, b22 = m11[1::2], m12[1::2], m21[1::2], m22[1::2]
        m11, m12, m21, m22 = (b11 * a11 + b12 * a21, b11 * a12 + b12 * a22,
                              b21 * a11 + b22 * a21, b21 * a12 + b22 * a22)
    return m11[0], m12[0], m21[0], m22[0]


def fundamental_matrix(q: Potential, w, n: int):
    """Monodromy [[v, u], [v', u']] at t = 1 for a fixed mesh of ``n`` steps.

    ``u`` solves u(0)=0, u'(0)=1 and ``v`` solves v(0)=1, v'(0)=0.
    """
    w = np.atleast_1d(np.asarray(w))
    w = w.real.astype(float) if np.all(np.imag(w) == 0) else w.astype(complex)
    h, qbar, d = _mesh(q, n)
    out = [np.empty(w.shape, w.dtype) for _ in range(4)]
    chunk = max(1, _CHUNK // len(h))
    for s in range(0, len(w), chunk):
        sl = slice(s, s + chunk)
        res = _reduce(*_step_matrices(h, qbar, d, w[sl]))
        for o, r in zip(out, res):
            o[sl] = r
    return tuple(out)


def _scaled_error(u_a, du_a, u_b, du_b, w):
    k = np.sqrt(np.abs(w))
    scale = np.maximum.reduce([np.ones(np.shape(w)), k * np.abs(u_b), np.abs(du_b)])
    diff = np.maximum(k * np.abs(u_b - u_a), np.abs(du_b - du_a)) / 15.0
    return diff / scale


def shoot(q, w, tol: float = 1e-10, n0: int | None = None):
    """Vectorized adaptive shooting.

    Returns ``(u_end, du_end, est_error, steps, wronskian)`` for the solution
    with u(0)=0, u'(0)=1.  ``est_error`` is the step-halving estimate relative
    to the local solution scale max(1, |sqrt(w) u|, |u'|); each entry of ``w``
    is refined independently, ``steps`` holds the final mesh size per entry.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    q = as_potential(q)
    w = np.atleast_1d(np.asarray(w))
    if np.all(np.imag(w) == 0):
        w = np.real(w).astype(float)
    else:
        w = w.astype(complex)
    n = n0 or default_steps(q)
    _, u_a, _, du_a = fundamental_matrix(q, w, n)
    u = np.empty_like(u_a)
    du = np.empty_like(u_a)
    wr = np.empty_like(u_a)
    err = np.full(w.shape, np.inf)
    steps = np.zeros(w.shape, dtype=int)
    todo = np.arange(len(w))
    while len(todo):
        n *= 2
        v_b, u_b, dv_b, du_b = fundamental_matrix(q, w[todo], n)
        e = _scaled_error(u_a, du_a, u_b, du_b, w[todo])
        if not np.all(np.isfinite(e)):
            raise ShootingError("non-finite solution; spectral parameter outside usable range")
        done = (e <= tol) | (n >= MAX_STEPS)
        idx = todo[done]
        u[idx], du[idx], err[idx], steps[idx] = u_b[done], du_b[done], e[done], n
        wr[idx] = (v_b * du_b - u_b * dv_b)[done]
        todo = todo[~done]
        u_a, du_a = u_b[~done], du_b[~done]
    if np.any(err > tol):
        raise ShootingError(f"step-size underflow: error {err.max():.2e} > tol at {MAX_STEPS} steps")
    return u, du, err, steps, wr


def solve_shooting(q, w: complex, tol: float = 1e-10) -> ShootingResult:
    """u(1), u'(1) for -u'' + q u = w u, u(0) = 0, u'(0) = 1."""
    u, du, err, n, wr = shoot(q, w, tol)
    return ShootingResult(complex(u[0]), complex(du[0]), complex(w), int(n[0]),
                          float(err[0]), complex(wr[0]))


def evaluate_AB(q, z, tol: float = 1e-10):
    """A(z) = z u_{z^2}(1), B(z) = u'_{z^2}(1); vectorized over ``z``."""
    z = np.asarray(z)
    if np.iscomplexobj(z) and np.all(z.imag == 0):
        z = z.real
    u, du, *_ = shoot(q, (z * z).ravel(), tol)
    A = z * u.reshape(z.shape)
    B = du.reshape(z.shape)
    return A + 0j, B + 0j


def propagate_path(q: Potential, w, n: int):
    """States (u, u') at every mesh node for real or complex ``w``.

    Sequential propagation; arrays have shape (nnodes, nw).
    """
    w = np.atleast_1d(np.asarray(w))
    h, qbar, d = _mesh(q, n)
    m11, m12, m21, m22 = _step_matrices(h, qbar, d, w)
    u = np.empty((len(h) + 1, len(w)), m11.dtype)
    du = np.empty_like(u)
    u[0], du[0] = 0.0, 1.0
    for j in range(len(h)):
        u[j + 1] = m11[j] * u[j] + m12[j] * du[j]
        du[j + 1] = m21[j] * u[j] + m22[j] * du[j]
    return u, du


def prufer_angle(q, w, n: int | None = None, scaled: bool = False) -> np.ndarray:
    """Continuous Prufer angle arg(u' + i u) at t = 1 for real ``w``.

    The angle starts at 0, increases strictly with ``w``; Dirichlet
    eigenvalues sit where it equals k*pi (k >= 1) and the zeros of u'(1) where
    it equals pi/2 + k*pi (k >= 0).  Unwrapping uses the scaled angle
    arg(u' + i kappa u), kappa = sqrt(max(|w - min q|, 1)), which always lies
    in the same quadrant; ``scaled=True`` returns it instead.  It varies
    much more evenly in ``w`` and gives the same counts.
    """
    q = as_potential(q)
    w = np.atleast_1d(np.asarray(w, dtype=float))
    lo, hi = q.bounds()
    kappa = np.sqrt(np.maximum(np.abs(w - lo), 1.0))
    if n is None:
        span = np.sqrt(max(float(np.max(np.abs(w - lo))), 1.0))
        n = max(default_steps(q), int(4 * span) + 8)
    h, qbar, d = _mesh(q, n)
    u = np.zeros(w.shape)
    du = np.ones(w.shape)
    psi = np.zeros(w.shape)
    for j in range(len(h)):
        m11, m12, m21, m22 = (m[0] for m in _step_matrices(h[j:j + 1], qbar[j:j + 1],
                                                            d[j:j + 1], w))
        u, du = m11 * u + m12 * du, m21 * u + m22 * du
        new = np.arctan2(kappa * u, du)
        # steps turn the scaled angle by well under pi, so wrap the increment
        psi += np.angle(np.exp(1j * (new - psi)))
        # rescale to keep growing (classically forbidden) solutions finite
        norm = np.hypot(kappa * u, du)
        u, du = u / norm, du / norm
    if scaled:
        return psi
    corr = np.angle((du + 1j * u) * (du - 1j * kappa * u))
    return psi + corr


def count_below(q, w) -> tuple[np.ndarray, np.ndarray]:
    """Numbers of zeros of u(1) and of u'(1) in (-inf, w), as functions of w."""
    theta = prufer_angle(q, w)
    dd = np.floor(theta / np.pi).astype(int)
    nd = np.floor(theta / np.pi + 0.5).astype(int)
    return np.maximum(dd, 0), np.maximum(nd, 0)


def positivity_shift(q, margin: float = 1.0) -> Potential:
    """Return ``q`` plus a constant making both spectra strictly positive.

    The lowest eigenvalue is that of the mixed problem (zeros of u'(1)); when
    it is positive the potential is returned unchanged.
    """
    from .spectra import _lowest_nd  # local import: spectra depends on this module

    q = as_potential(q)
    count_dd, count_nd = count_below(q, 0.0)
    if count_dd[0] == 0 and count_nd[0] == 0:
        return q
    mu1 = _lowest_nd(q)
    extra = -mu1 + margin
    shifted = q.with_shift(q.shift + extra)
    _, check = count_below(shifted, 0.0)
    if check[0] != 0:
        raise ShootingError("positivity shift failed verification")
    return shifted
