"""Dirichlet and mixed spectra, the phase function and the Weyl functions.

Spectra are returned in the spectral parameter ``w`` (``dd[n-1] = lambda_n**2``
and ``nd[n-1] = mu_n**2``).  The mixed spectrum is taken as the zero set of
B(z) = u'_{z^2}(1), which keeps it aligned with E = A + iB.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .functions import DeBrangesFunction, central_difference
from .potential import Potential, as_potential
from .products import ZeroSequence
from .schrodinger import fundamental_matrix, prufer_angle, shoot


class SpectrumError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectrumPair:
    dd: np.ndarray
    nd: np.ndarray
    shift: float = 0.0
    mean: float | None = None

    @property
    def N(self) -> int:
        return len(self.dd)

    def interlaces(self) -> bool:
        merged = np.empty(2 * self.N)
        merged[0::2] = self.nd
        merged[1::2] = self.dd
        return bool(np.all(np.diff(merged) > 0))


@dataclass(frozen=True)
class AsymptoticFit:
    C_hat: float
    residuals_a: np.ndarray
    residuals_b: np.ndarray
    l2_partial_sums: tuple[np.ndarray, np.ndarray]
    expected_C: float | None = None
    fit_indices: tuple[int, int] = (0, 0)

    def tail_fraction(self, start: int) -> tuple[float, float]:
        """Share of sum a_n**2 (and b_n**2) contributed by indices n >= start."""
        out = []
        for cs in self.l2_partial_sums:
            total = cs[-1]
            before = cs[start - 2] if start >= 2 else 0.0
            out.append(0.0 if total == 0 else float((total - before) / total))
        return out[0], out[1]

    def to_dict(self) -> dict:
        return {
            "C_hat": self.C_hat,
            "expected_C": self.expected_C,
            "C_minus_expected": None if self.expected_C is None else self.C_hat - self.expected_C,
            "fit_indices": list(self.fit_indices),
            "residuals_a": self.residuals_a.tolist(),
            "residuals_b": self.residuals_b.tolist(),
            "l2_partial_sums_a": self.l2_partial_sums[0].tolist(),
            "l2_partial_sums_b": self.l2_partial_sums[1].tolist(),
        }


def _working_steps(q: Potential, w, tol: float) -> int:
    _, _, _, steps, _ = shoot(q, w, tol)
    return int(np.max(steps))


def _eigenvalues(q: Potential, count: int, which: str, tol: float = 1e-12) -> np.ndarray:
    """First ``count`` zeros in w of u(1, w) ("dd") or u'(1, w) ("nd")."""
    lo, hi = q.bounds()
    w_lo = lo - 1.0
    w_hi = np.pi**2 * count**2 + hi + 1.0
    span = np.sqrt(w_hi - w_lo)
    density = 4.0
    while True:
        s = np.linspace(0.0, span, int(density * span) + 2)
        grid = w_lo + s**2
        theta = prufer_angle(q, grid, scaled=True)
        if np.all(np.diff(theta) < 0.5 * np.pi):
            break
        density *= 2
        if density > 256:
            raise SpectrumError("oscillation count did not stabilize")
    offset = 0.0 if which == "dd" else -0.5
    targets = (np.arange(1, count + 1) + offset) * np.pi
    if theta[0] >= targets[0]:
        raise SpectrumError("eigenvalue below the bracketing range")
    if theta[-1] < targets[-1]:
        raise SpectrumError(f"bracketing failure: only {int(theta[-1] / np.pi)} eigenvalues found")
    n = _working_steps(q, grid[:: max(1, len(grid) // 64)], tol * 1e2)
    col = 1 if which == "dd" else 3

    def f(w):
        return fundamental_matrix(q, np.array([w]), n)[col][0]

    out = np.empty(count)
    for k, target in enumerate(targets):
        j = int(np.searchsorted(theta, target))
        a, b = grid[j - 1], grid[j]
        fa, fb = f(a), f(b)
        if fb == 0:
            out[k] = b
            continue
        if fa * fb > 0:
            raise SpectrumError(f"bracketing failure at index {k + 1}")
        out[k] = brentq(f, a, b, xtol=1e-14 * max(1.0, abs(a)), rtol=4 * np.finfo(float).eps,
                        maxiter=200)
    return out


def _lowest_nd(q: Potential) -> float:
    return float(_eigenvalues(q, 1, "nd")[0])


def compute_spectra(q, N: int, tol: float = 1e-12) -> SpectrumPair:
    """First ``N`` Dirichlet and mixed eigenvalues of a positive potential."""
    q = as_potential(q)
    if N < 1:
        raise ValueError("N must be positive")
    nd = _eigenvalues(q, N, "nd", tol)
    if nd[0] <= 0:
        raise SpectrumError("operator is not positive; apply positivity_shift first")
    dd = _eigenvalues(q, N, "dd", tol)
    pair = SpectrumPair(dd=dd, nd=nd, shift=q.shift, mean=q.mean)
    if not pair.interlaces():
        raise SpectrumError("spectra do not interlace (integrator failure)")
    return pair


def asymptotic_fit(s: SpectrumPair, model: str = "inverse-square") -> AsymptoticFit:
    """Fit lambda_n^2 - pi^2 n^2 and mu_n^2 - pi^2 (n - 1/2)^2 to a constant.

    Both residual sequences over the top half of indices enter one least
    squares problem.  With ``model="inverse-square"`` a common c/n^2 term is
    fitted alongside the constant (smooth potentials have residuals of that
    order, which otherwise biases the constant); ``model="mean"`` fits the
    constant alone.
    """
    if s.N < 5:
        raise ValueError("need at least five eigenvalue pairs")
    if model not in ("inverse-square", "mean"):
        raise ValueError(f"unknown fit model {model!r}")
    n = np.arange(1, s.N + 1)
    ra = s.dd - np.pi**2 * n**2
    rb = s.nd - np.pi**2 * (n - 0.5) ** 2
    top = n > s.N // 2
    y = np.concatenate([ra[top], rb[top]])
    cols = [np.ones_like(y)]
    if model == "inverse-square":
        cols.append(np.concatenate([1.0 / n[top] ** 2, 1.0 / (n[top] - 0.5) ** 2]))
    coef, *_ = np.linalg.lstsq(np.column_stack(cols), y, rcond=None)
    C_hat = float(coef[0])
    a = ra - C_hat
    b = rb - C_hat
    expected = None if s.mean is None else s.mean + s.shift
    return AsymptoticFit(C_hat, a, b, (np.cumsum(a**2), np.cumsum(b**2)), expected,
                         (int(n[top][0]), s.N))


def sqrt_transform(s: SpectrumPair, C_tail: float | None = None) -> tuple[ZeroSequence, ZeroSequence]:
    """Positive square roots; the sequences are extended by symmetry."""
    if np.any(s.dd <= 0) or np.any(s.nd <= 0):
        raise ValueError("square-root transform needs positive spectra")
    return (ZeroSequence(np.sqrt(s.dd), "sine", C_tail),
            ZeroSequence(np.sqrt(s.nd), "cosine", C_tail))


def write_spectra_csv(path, s: SpectrumPair, fit: AsymptoticFit) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["n", "lambda_sq", "mu_sq", "a_n", "b_n"])
        for k in range(s.N):
            wr.writerow([k + 1, repr(float(s.dd[k])), repr(float(s.nd[k])),
                         repr(float(fit.residuals_a[k])), repr(float(fit.residuals_b[k]))])


# -- Weyl functions -----------------------------------------------------

def weyl_m(ev: DeBrangesFunction, x):
    """Modified Weyl function m = A/B."""
    A, B = ev.AB(x)
    if np.any(B == 0):
        raise ZeroDivisionError("evaluation at a pole of m")
    return A / B


def weyl_m_series(mu, v, z):
    """Partial-fraction form sum_n 2 z v_n / (mu_n**2 - z**2) over mu_n > 0."""
    mu = np.asarray(mu, dtype=float)
    v = np.asarray(v, dtype=float)
    z = np.asarray(z, dtype=complex)
    return np.sum(2 * z[..., None] * v / (mu**2 - z[..., None] ** 2), axis=-1)


def weyl_coefficients(ev: DeBrangesFunction, mu) -> np.ndarray:
    """v_n = -A(mu_n) / B'(mu_n)."""
    mu = np.asarray(mu, dtype=float)
    return -(ev.A(mu) / central_difference(ev.B, mu)).real


def theta(ev: DeBrangesFunction, z):
    """Weyl inner function E#/E."""
    E = ev.E(z)
    if np.any(E == 0):
        raise ZeroDivisionError("E vanishes")
    return ev.E_sharp(z) / E


# -- phase ----------------------------------------------------------------

@dataclass(frozen=True)
class PhaseData:
    grid: np.ndarray
    phi: np.ndarray
    phi_prime: np.ndarray
    a_const: float = field(default=0.0)

    @property
    def sup_phi_prime(self) -> float:
        return float(np.max(self.phi_prime))

    @property
    def delta_gap(self) -> float:
        """Width of the zero-free band below the real axis: 1 / sup phi'."""
        return 1.0 / self.sup_phi_prime


def _unwrap_adaptive(ev, x, max_refine):
    """Continuous -arg E on a grid refined until every jump is below pi/2."""
    vals = ev.E(x)
    for _ in range(max_refine):
        jumps = np.abs(np.angle(vals[1:] / vals[:-1]))
        bad = np.nonzero(jumps >= 0.5 * np.pi)[0]
        if not len(bad):
            break
        mids = 0.5 * (x[bad] + x[bad + 1])
        x = np.insert(x, bad + 1, mids)
        vals = np.insert(vals, bad + 1, ev.E(mids))
    else:
        raise SpectrumError("phase unwrap ambiguous after maximum refinement")
    return x, -np.unwrap(np.angle(vals)), vals


def phase(ev: DeBrangesFunction, grid, zeros=None, max_refine: int = 12) -> PhaseData:
    """Phase function phi(x) = pi/2 - arg E(x), continuous, phi(0) = 0.

    With this anchoring phi = k*pi exactly at zeros of A and k*pi + pi/2 at
    zeros of B.  ``zeros`` (optional) are known zeros of E used to estimate
    the constant ``a`` in phi' = sum |Im z_n|/|x - z_n|^2 + a.
    """
    grid = np.asarray(grid, dtype=float)
    work = np.union1d(grid, [0.0])
    work, phi, vals = _unwrap_adaptive(ev, work, max_refine)
    i0 = int(np.searchsorted(work, 0.0))
    phi = phi - phi[i0]
    idx = np.searchsorted(work, grid)
    phi = phi[idx]
    E = vals[idx]
    # second order is enough here: E'''/E is O(1) on the real line
    h = 1e-4
    dE = (ev.E(grid + h) - ev.E(grid - h)) / (2 * h)
    phi_prime = -(dE / E).imag
    tail = np.abs(grid) >= np.quantile(np.abs(grid), 0.9)
    resid = phi_prime.copy()
    if zeros is not None and len(zeros):
        zs = np.asarray(zeros, dtype=complex)
        resid = resid - np.sum(np.abs(zs.imag) / np.abs(grid[:, None] - zs) ** 2, axis=1)
    a_const = float(max(np.median(resid[tail]), 0.0))
    return PhaseData(grid, phi, phi_prime, a_const)


def spectra_from_phase(pd: PhaseData, ev: DeBrangesFunction, tol: float = 1e-13):
    """Positive crossings of pi*Z (zeros of A) and pi*Z + pi/2 (zeros of B).

    Crossings bracket the roots; these are refined on A and B.  Returned in
    the spectral parameter (squares), like :func:`compute_spectra`.
    """
    x, phi = pd.grid, pd.phi
    pos = x > 0
    x, phi = x[pos], phi[pos]

    def roots(level_offset, fun):
        out = []
        k = np.floor((phi - level_offset) / np.pi)
        for j in np.nonzero(np.diff(k) > 0)[0]:
            a, b = x[j], x[j + 1]
            g = lambda t: fun(np.array([t]))[0].real
            ga, gb = g(a), g(b)
            if ga == 0:
                out.append(a)
            elif ga * gb < 0:
                out.append(brentq(g, a, b, xtol=tol, rtol=4 * np.finfo(float).eps))
        return np.array(out)

    lam = roots(0.0, ev.A)
    mu = roots(0.5 * np.pi, ev.B)
    return lam**2, mu**2


def phase_bound_violation(pd: PhaseData, zeros) -> float:
    """max over the grid of sum_n |Im z_n|/|x - z_n|^2 - phi'(x); <= 0 expected."""
    zs = np.asarray(zeros, dtype=complex)
    if not len(zs):
        return float(-np.min(pd.phi_prime))
    poles = np.sum(np.abs(zs.imag) / np.abs(pd.grid[:, None] - zs) ** 2, axis=1)
    return float(np.max(poles - pd.phi_prime))


def fit_report_json(fit: AsymptoticFit, extra: dict | None = None) -> str:
    d = fit.to_dict()
    if extra:
        d.update(extra)
    return json.dumps(d, sort_keys=True, indent=1)
