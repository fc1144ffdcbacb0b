"""Canonical products with real symmetric zeros close to a trigonometric lattice.

A sine-type sequence has zeros 0, +-lambda_n with lambda_n ~ pi n, a
cosine-type sequence has zeros +-mu_n with mu_n ~ pi (n - 1/2).  Only the
positive zeros n = 1..N are stored; beyond N the zeros follow the tail model
sqrt(pi^2 (n - off)^2 + C_tail).  Products are always formed over symmetric
pairs, which equals the principal-value product.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .functions import DeBrangesFunction

_NTERMS = 160


def _offset(parity: str) -> float:
    return 0.0 if parity == "sine" else 0.5


@dataclass(frozen=True, eq=False)
class ZeroSequence:
    """Positive zeros of a sine- or cosine-type function plus a tail model."""

    positive: np.ndarray
    parity: str = "sine"
    C_tail: float | None = None

    def __post_init__(self):
        if self.parity not in ("sine", "cosine"):
            raise ValueError("parity must be 'sine' or 'cosine'")
        pos = np.asarray(self.positive, dtype=float)
        if pos.ndim != 1 or len(pos) == 0:
            raise ValueError("need a non-empty 1-d array of positive zeros")
        if np.any(pos <= 0) or np.any(np.diff(pos) <= 0):
            raise ValueError("zeros must be positive and strictly increasing")
        if not np.all(np.isfinite(pos)):
            raise ValueError("zeros must be finite")
        pos.setflags(write=False)
        object.__setattr__(self, "positive", pos)

    @property
    def N(self) -> int:
        return len(self.positive)

    @property
    def offset(self) -> float:
        return _offset(self.parity)

    def lattice(self) -> np.ndarray:
        n = np.arange(1, len(self.positive) + 1)
        return np.pi * (n - _offset(self.parity))

    def max_deviation(self) -> float:
        """sup_n |zeros_n - lattice_n|, finite for the sequences handled here."""
        return float(np.max(np.abs(self.positive - self.lattice())))

    def entries(self) -> np.ndarray:
        """All zeros in increasing order (including 0 for sine type)."""
        mid = [0.0] if self.parity == "sine" else []
        return np.concatenate([-self.positive[::-1], mid, self.positive])

    def to_dict(self) -> dict:
        return {"positive": self.positive.tolist(), "parity": self.parity, "C_tail": self.C_tail}

    @classmethod
    def from_dict(cls, d: dict) -> "ZeroSequence":
        return cls(np.asarray(d["positive"], dtype=float), d.get("parity", "sine"), d.get("C_tail"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def lattice_sequence(cls, N: int, parity: str = "sine", C: float = 0.0) -> "ZeroSequence":
        n = np.arange(1, N + 1)
        return cls(np.sqrt(np.pi**2 * (n - _offset(parity)) ** 2 + C), parity, C)


# -- tails --------------------------------------------------------------

@lru_cache(maxsize=32)
def _hurwitz_coeffs(a: float) -> np.ndarray:
    """t_j = zeta(2j, a) a^(2j) / j for j = 1.._NTERMS."""
    out = np.empty(_NTERMS)
    # mpmath's Hurwitz zeta loses digits at working precision; pad it
    with mpmath.workdps(40):
        for j in range(1, _NTERMS + 1):
            out[j - 1] = float(mpmath.zeta(2 * j, a) * mpmath.mpf(a) ** (2 * j) / j)
    out.setflags(write=False)
    return out


def _hurwitz_tail(x, a: float):
    """exp(-sum_j t_j (x / (pi a)^2)^j), valid for |x| < 0.64 (pi a)^2."""
    r = x / (np.pi * a) ** 2
    coeffs = _hurwitz_coeffs(a)
    acc = np.zeros(r.shape, dtype=complex)
    power = np.ones(r.shape, dtype=complex)
    for c in coeffs:
        power = power * r
        term = c * power
        acc += term
        if np.all(np.abs(term) < 1e-18 * np.maximum(np.abs(acc), 1e-300)):
            break
    return np.exp(-acc)


def tail_factor(x, N: int, parity: str):
    """prod_{n>N} (1 - x / (pi^2 (n - off)^2)).

    Factors are multiplied directly up to an index beyond which |x| sits
    inside 0.64 of the radius of convergence of the Hurwitz-zeta power
    series, which then supplies the rest.
    """
    x = np.asarray(x, dtype=complex)
    off = _offset(parity)
    xmax = float(np.max(np.abs(x))) if x.size else 0.0
    need = int(np.ceil(np.sqrt(xmax / 0.64) / np.pi + off)) if xmax > 0 else 0
    M = max(N, need)
    out = _hurwitz_tail(x, M + 1 - off)
    if M > N:
        lat2 = (np.pi * (np.arange(N + 1, M + 1) - off)) ** 2
        flat = x.ravel()
        head = np.empty(flat.shape, complex)
        rows = max(1, (1 << 22) // len(lat2))
        with np.errstate(divide="ignore"):
            for s in range(0, len(flat), rows):
                blk = flat[s:s + rows]
                head[s:s + rows] = np.exp(np.log(1 - blk[:, None] / lat2).sum(axis=1))
        out = out * head.reshape(x.shape)
    return out


# -- products -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CanonicalProduct:
    """K z^{[sine]} prod_n (1 - z^2 / zeros_n^2); C1 is computed eagerly."""

    zeros: ZeroSequence
    K: float = 1.0
    C1: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "C1", leading_constant(self))

    def __call__(self, z):
        return eval_product(self, z)


def _tail_C(zs: ZeroSequence) -> float:
    return 0.0 if zs.C_tail is None else float(zs.C_tail)


def eval_product(p: CanonicalProduct, z):
    """Symmetric canonical product with closed-form tail correction."""
    zs = p.zeros
    z = np.asarray(z, dtype=complex)
    if zs.C_tail is None and np.any(np.abs(z) > zs.N / 2):
        raise ValueError("tail model missing; |z| too large for the truncated product")
    flat = z.ravel()
    lam2 = zs.positive**2
    C = _tail_C(zs)
    with np.errstate(divide="ignore"):
        logs = np.log(1 - flat[:, None] ** 2 / lam2).sum(axis=1)
    val = np.exp(logs)
    if zs.C_tail is not None:
        val = val * tail_factor(flat**2 - C, zs.N, zs.parity) / tail_factor(np.array([-C]), zs.N, zs.parity)
    if zs.parity == "sine":
        val = val * flat
    return (p.K * val).reshape(z.shape)


def leading_constant(p: CanonicalProduct) -> float:
    """C1 = K prod_k (pi (k - off))^2 / zeros_k^2, with tail correction."""
    zs = p.zeros
    logs = np.sum(np.log(zs.lattice() ** 2 / zs.positive**2))
    if not np.isfinite(logs):
        raise ValueError("divergent leading-constant product")
    val = np.exp(logs)
    if zs.C_tail is not None:
        val = val / tail_factor(np.array([-zs.C_tail]), zs.N, zs.parity)[0].real
    return float(p.K * val)


def _ratio_factors(zs: ZeroSequence, z):
    """log of (zeros_k^2 - z^2)/(lattice_k^2 - z^2) for k = 1..N, shape (nz, N)."""
    lam = zs.positive
    lat = zs.lattice()
    z = z[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log((lam - z) * (lam + z) / ((lat - z) * (lat + z)))


def _ratio_tail(zs: ZeroSequence, z):
    if zs.C_tail is None:
        return np.ones(z.shape, complex)
    z2 = z**2
    return tail_factor(z2 - zs.C_tail, zs.N, zs.parity) / tail_factor(z2, zs.N, zs.parity)


def ratio_to_trig(p: CanonicalProduct, z):
    """A(z)/sin z (sine type) or B(z)/cos z (cosine type) in factored form."""
    zs = p.zeros
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    step = (flat / np.pi) + zs.offset
    on_lattice = (np.abs(step - np.round(step)) < 1e-15) & (np.round(step) != 0 if zs.parity == "sine" else True)
    if np.any(on_lattice):
        raise ValueError("z on the excluded lattice")
    val = p.C1 * np.exp(_ratio_factors(zs, flat).sum(axis=1)) * _ratio_tail(zs, flat)
    return val.reshape(z.shape)


def _sinc(d):
    return np.sinc(d / np.pi)


def derivative_at_zeros(p: CanonicalProduct) -> np.ndarray:
    """p'(zeros_n) for n = 1..N via the product over k != n."""
    zs = p.zeros
    lam = zs.positive
    lat = zs.lattice()
    d = lam - lat
    logs = _ratio_factors(zs, lam + 0j)
    np.fill_diagonal(logs, 0.0)
    rest = np.exp(logs.sum(axis=1)) * _ratio_tail(zs, lam + 0j)
    n = np.arange(1, zs.N + 1)
    sign = (-1.0) ** n
    return (sign * p.C1 * _sinc(d) * 2 * lam / (lat + lam) * rest).real


@dataclass(frozen=True)
class ZeroValueReport:
    derivative: np.ndarray
    cross_values: np.ndarray
    derivative_deviation: np.ndarray
    cross_deviation: np.ndarray

    def l2(self, which: str = "derivative"):
        dev = self.derivative_deviation if which == "derivative" else self.cross_deviation
        return np.cumsum(dev**2)

    def tail_fraction(self, which: str = "derivative", start_fraction: float = 0.5) -> float:
        cs = self.l2(which)
        total = cs[-1]
        k = int(np.ceil(start_fraction * len(cs))) - 1
        before = cs[k - 1] if k >= 1 else 0.0
        return 0.0 if total == 0 else float((total - before) / total)


def value_and_derivative_at_zeros(p: CanonicalProduct, other: CanonicalProduct) -> ZeroValueReport:
    """Derivative of ``p`` and values of ``other`` at the zeros of ``p``.

    Deviations are measured against the trigonometric patterns, with
    lambda_n ~ pi n and mu_n ~ pi (n - 1/2) (n >= 1):
    A'(lambda_n) ~ C1 (-1)^n, B(lambda_n) ~ C2 (-1)^n,
    B'(mu_n) ~ C2 (-1)^n,     A(mu_n) ~ C1 (-1)^(n+1).
    """
    n = np.arange(1, p.zeros.N + 1)
    deriv = derivative_at_zeros(p)
    cross = eval_product(other, p.zeros.positive + 0j).real
    sign = (-1.0) ** n
    dev_d = deriv - p.C1 * sign
    cross_sign = sign if p.zeros.parity == "sine" else -sign
    dev_c = cross - other.C1 * cross_sign
    return ZeroValueReport(deriv, cross, dev_d, dev_c)


class ProductDB(DeBrangesFunction):
    """E = A + iB with A, B canonical products."""

    def __init__(self, A: CanonicalProduct, B: CanonicalProduct, label: str = "products"):
        if A.zeros.parity != "sine" or B.zeros.parity != "cosine":
            raise ValueError("A must be sine type and B cosine type")
        self.Ap = A
        self.Bp = B
        self.label = label

    def AB(self, z):
        return eval_product(self.Ap, z), eval_product(self.Bp, z)


def canonical_products(q, N: int = 200, tol: float = 1e-12):
    """Products built from the computed spectra of a positive potential.

    Normalizations K_A = A'(0) = u_0(1) and K_B = B(0) = u'_0(1); the tail
    model uses the fitted asymptotic constant.
    """
    from .schrodinger import shoot
    from .spectra import asymptotic_fit, compute_spectra, sqrt_transform

    s = compute_spectra(q, N, tol)
    fit = asymptotic_fit(s)
    lam, mu = sqrt_transform(s, C_tail=fit.C_hat)
    u0, du0, *_ = shoot(q, 0.0, 1e-13)
    A = CanonicalProduct(lam, float(np.real(u0[0])))
    B = CanonicalProduct(mu, float(np.real(du0[0])))
    return A, B, s, fit


def perturbed_sine_sequence(N: int = 2000, moved: float = 1.25) -> ZeroSequence:
    """Zeros pi n except lambda_1 = moved * pi."""
    pos = np.pi * np.arange(1, N + 1, dtype=float)
    pos[0] = moved * np.pi
    return ZeroSequence(pos, "sine", 0.0)


def imaginary_axis_profile(p: CanonicalProduct, ys) -> np.ndarray:
    """y (A(iy) / (C1 sin iy) - 1) for sine type (cos for cosine type).

    The limit as y -> infinity is half the integral of the potential for
    products coming from a Schrodinger operator.
    """
    ys = np.asarray(ys, dtype=float)
    return ys * (ratio_to_trig(p, 1j * ys).real / p.C1 - 1)


def richardson_limits(ys, values) -> np.ndarray:
    """Limits 2 v(2y) - v(y) assuming v(y) = L + a/y + O(1/y^2), ys doubling."""
    ys = np.asarray(ys, dtype=float)
    v = np.asarray(values, dtype=float)
    if not np.allclose(ys[1:], 2 * ys[:-1]):
        raise ValueError("ys must double")
    return 2 * v[1:] - v[:-1]


def two_sided_ratio(p: CanonicalProduct, z) -> np.ndarray:
    """|A(z)/sin z| dist(z, lattice) / dist(z, zeros), bounded above and below.

    Zeros beyond the stored ones are not searched, so |Re z| should stay
    well inside the stored range.
    """
    zs = p.zeros
    z = np.asarray(z, dtype=complex)
    off = zs.offset
    k = np.round(z.real / np.pi + off)
    d_lat = np.abs(z - np.pi * (k - off))
    ent = zs.entries()
    j = np.clip(np.searchsorted(ent, z.real), 1, len(ent) - 1)
    d_zero = np.minimum(np.abs(z - ent[j - 1]), np.abs(z - ent[j]))
    return np.abs(ratio_to_trig(p, z)) * d_lat / d_zero
