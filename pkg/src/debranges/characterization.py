"""Tests and constructions for de Branges functions of L2 Schrodinger type.

The pairing function ``F(z) = z (A cos z - B sin z)`` (or, against a
reference pair, ``z (A B~ - A~ B)``) must be a constant plus an L2 function of
exponential type 2.  The direct tests sample F on the critical lattices
``pi m / 2`` and ``pi m / 2 + pi / 4``.  The inverse construction builds
``A = sin + g``, ``B = cos + h`` from a small even real ``f`` in PW_2 so that
``z (A cos z - B sin z) = f(z) - f(0)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .functions import DeBrangesFunction, sinc_c
from .paley_wiener import BandlimitedSamples, MembershipReport, cardinal_eval, pw_membership_test
from .products import CanonicalProduct, ZeroSequence


class ConstructionError(RuntimeError):
    pass


# -- pairing function -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PairingFunction:
    source: DeBrangesFunction
    reference: DeBrangesFunction | None = None
    mode: str = "trig"

    def __post_init__(self):
        if self.mode not in ("trig", "pair"):
            raise ValueError("mode must be 'trig' or 'pair'")
        if self.mode == "pair" and self.reference is None:
            raise ValueError("pair mode needs a reference")

    def __call__(self, z):
        return pairing_eval(self, z)


def pairing_eval(p: PairingFunction, z):
    z = np.asarray(z)
    A, B = p.source.AB(z)
    if p.mode == "trig":
        At, Bt = np.sin(z + 0j), np.cos(z + 0j)
    else:
        At, Bt = p.reference.AB(z)
    return z * (A * Bt - At * B)


# -- direct tests -------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    verdict: bool
    C_hat: float
    report: MembershipReport
    shifted_report: MembershipReport
    f_samples: np.ndarray
    evenness_error: float
    realness_error: float
    growth: dict
    checks: dict = field(default_factory=dict)

    def to_dict(self, include_profile: bool = True) -> dict:
        main = self.report.to_dict()
        shifted = self.shifted_report.to_dict()
        if not include_profile:
            main.pop("cumsum")
            shifted.pop("cumsum")
        return {
            "verdict": self.verdict,
            "C_hat": self.C_hat,
            "membership": main,
            "membership_shifted": shifted,
            "evenness_error": self.evenness_error,
            "realness_error": self.realness_error,
            "growth": self.growth,
            "checks": self.checks,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _growth(F: Callable, ys) -> dict:
    """log|F(iy)|/y; an exponential-type diagnostic, not a certificate."""
    out = {}
    vals = np.asarray(F(1j * np.asarray(ys, dtype=float)))
    for y, v in zip(ys, vals):
        a = abs(complex(v))
        out[str(y)] = None if a == 0 else float(np.log(a) / y)
    return out


def _check(F: Callable, M: int, tail_fraction: float, atol: float, even_tol: float,
           growth_y) -> Verdict:
    main = pw_membership_test(F, 2.0, M, tail_fraction, 0.0, atol)
    shifted = pw_membership_test(F, 2.0, M, tail_fraction, np.pi / 4, atol)
    x = np.pi / 2 * np.arange(-M, M + 1)
    vals = np.asarray(F(x), dtype=complex)
    scale = max(1.0, float(np.max(np.abs(vals))))
    evenness = float(np.max(np.abs(vals - vals[::-1]))) / scale
    realness = float(np.max(np.abs(vals.imag))) / scale
    checks = {
        "membership": main.verdict,
        "membership_shifted": shifted.verdict,
        "even": evenness <= even_tol,
        "real": realness <= even_tol,
    }
    ok = all(checks.values())
    return Verdict(ok, main.C_hat, main, shifted, vals.real - main.C_hat, evenness,
                   realness, _growth(F, growth_y), checks)


def check_schrodinger_L2(source: DeBrangesFunction, M: int = 2000, tail_fraction: float = 0.1,
                         atol: float = 1e-6, even_tol: float = 1e-6,
                         growth_y=(10, 20, 40)) -> Verdict:
    """Is z (A cos z - B sin z) a constant plus an even real L2 function?

    The pairing function is sampled on pi Z / 2 and on pi Z / 2 + pi / 4;
    both profiles must pass the membership test.  Evenness and realness are
    compared relative to max(1, sup |F|) on the lattice.
    """
    return _check(PairingFunction(source), M, tail_fraction, atol, even_tol, growth_y)


def check_pair(source: DeBrangesFunction, reference: DeBrangesFunction, M: int = 2000,
               tail_fraction: float = 0.1, atol: float = 1e-6, even_tol: float = 1e-6,
               growth_y=(10, 20, 40)) -> Verdict:
    """Same test for z (A B~ - A~ B) against a reference of the class."""
    return _check(PairingFunction(source, reference, "pair"), M, tail_fraction, atol,
                  even_tol, growth_y)


# -- test functions for the construction ------------------------------------

def _sinc(z):
    return sinc_c(z)


def sinc_prime(z):
    """Derivative of sin z / z, (z cos z - sin z) / z^2."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-2
    safe = np.where(small, 1.0, z)
    series = -z / 3 + z**3 / 30 - z**5 / 840
    return np.where(small, series, (safe * np.cos(safe) - np.sin(safe)) / safe**2)


@dataclass(frozen=True)
class EvenPWFunction:
    """An even real function of exponential type <= 2, square integrable."""

    name: str
    fun: Callable
    derivative_at_0: float | None
    norm: float  # L2 norm on the line at amplitude 1

    def scaled(self, amp: float) -> "EvenPWFunction":
        d0 = None if self.derivative_at_0 is None else amp * self.derivative_at_0
        return EvenPWFunction(self.name, lambda z, f=self.fun: amp * f(z), d0, abs(amp) * self.norm)


PW_FUNCTIONS = {
    "zero": EvenPWFunction("zero", lambda z: np.zeros(np.shape(z), dtype=complex), 0.0, 0.0),
    "sinc2": EvenPWFunction("sinc2", lambda z: _sinc(z) ** 2, 0.0, float(np.sqrt(2 * np.pi / 3))),
    "sinc": EvenPWFunction("sinc", lambda z: _sinc(2 * z), 0.0, float(np.sqrt(np.pi / 2))),
    "sinc4": EvenPWFunction("sinc4", lambda z: _sinc(z / 2) ** 4, 0.0,
                          float(np.sqrt(2 * 151 * np.pi / 315))),
}


def even_pw_function(name: str, amp: float = 1.0) -> EvenPWFunction:
    if name not in PW_FUNCTIONS:
        raise KeyError(f"unknown test function {name!r}; choose from {sorted(PW_FUNCTIONS)}")
    return PW_FUNCTIONS[name].scaled(amp)



def five_point_derivative(f: Callable, x: float = 0.0, h: float = 1e-3) -> float:
    vals = np.asarray(f(np.array([x - 2 * h, x - h, x + h, x + 2 * h], dtype=float)))
    return float(np.real((vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)))


# -- safeguarded Newton on many brackets ------------------------------------

def bracketed_newton(fun: Callable, lo, hi, x0=None, tol: float = 1e-13, maxiter: int = 80,
                     h: float = 1e-6):
    """Vectorized safeguarded Newton for real roots in the brackets [lo, hi].

    ``fun`` maps an array of reals to an array of reals.  Newton steps with a
    central-difference derivative are kept when they stay inside the current
    bracket, otherwise the bracket is bisected.  Returns ``(roots, ok)``;
    ``ok`` is False where the bracket holds no sign change.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    flo, fhi = fun(lo), fun(hi)
    ok = np.sign(flo) * np.sign(fhi) <= 0
    x = 0.5 * (lo + hi) if x0 is None else np.array(x0, dtype=float)
    x = np.clip(x, lo, hi)
    done = ~ok
    for _ in range(maxiter):
        act = ~done
        if not act.any():
            break
        xa = x[act]
        fx = fun(xa)
        dfx = (fun(xa + h) - fun(xa - h)) / (2 * h)
        l, r, fl = lo[act], hi[act], flo[act]
        left = np.sign(fx) == np.sign(fl)
        l = np.where(left, xa, l)
        fl = np.where(left, fx, fl)
        r = np.where(left, r, xa)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = fx / dfx
        xn = xa - step
        # a step below tolerance is accepted before the bracket test: near
        # the root it may round onto the bracket end
        conv = (np.abs(step) <= tol * np.maximum(1.0, np.abs(xa))) | (fx == 0)
        bad = ~conv & (~np.isfinite(xn) | (xn <= l) | (xn >= r))
        xn = np.where(bad, 0.5 * (l + r), xn)
        lo[act], hi[act], flo[act], x[act] = l, r, fl, np.where(fx == 0, xa, xn)
        idx = np.nonzero(act)[0]
        done[idx[conv]] = True
    x[~ok] = np.nan
    return x, ok & done


# -- construction -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConstructedDB(DeBrangesFunction):
    """A = sin + g, B = cos + h with g, h in PW_1 given by cardinal series."""

    g_samples: BandlimitedSamples
    h_samples: BandlimitedSamples
    f0: float
    fprime0: float
    lam: np.ndarray | None = None
    mu: np.ndarray | None = None
    interlacing_ok: bool = False
    C1: float | None = None
    C2: float | None = None
    report: dict = field(default_factory=dict)
    label: str = "constructed"

    def g(self, z):
        z = np.asarray(z)
        return (cardinal_eval(self.g_samples, z) - self.f0 * sinc_prime(z)
                + self.fprime0 * sinc_c(z))

    def h(self, z):
        z = np.asarray(z)
        return cardinal_eval(self.h_samples, z) + self.f0 * sinc_c(z)

    def A(self, z):
        return np.sin(np.asarray(z) + 0j) + self.g(z)

    def B(self, z):
        return np.cos(np.asarray(z) + 0j) + self.h(z)

    def AB(self, z):
        return self.A(z), self.B(z)

    def Q(self, z):
        """z (A cos z - B sin z); equals f(z) - f(0) by construction."""
        return pairing_eval(PairingFunction(self), z)

    def zero_sequences(self, C_tail: float | None = None) -> tuple[ZeroSequence, ZeroSequence]:
        return ZeroSequence(self.lam, "sine", C_tail), ZeroSequence(self.mu, "cosine", C_tail)

    def to_dict(self) -> dict:
        return {
            "f0": self.f0,
            "fprime0": self.fprime0,
            "lambda": None if self.lam is None else self.lam.tolist(),
            "mu": None if self.mu is None else self.mu.tolist(),
            "interlacing_ok": self.interlacing_ok,
            "C1": self.C1,
            "C2": self.C2,
            "report": self.report,
        }


def _gh_samples(f: Callable, M: int):
    """Cardinal samples of the lattice parts of g and h.

    g(pi n) = (-1)^n (f(pi n) - f(0)) / (pi n), g(0) = f'(0); the -f(0)/(pi n)
    part is carried by -f(0) sinc'(z) and g(0) by f'(0) sin z / z, so the
    remaining samples decay with f.  Likewise h(nu_n) = (-1)^(n+1) (f(nu_n) -
    f(0)) / nu_n with nu_n = pi n + pi/2, the f(0) part being f(0) sin z / z.
    """
    m = np.arange(-M, M + 1)
    t = np.pi * m
    safe = np.where(m == 0, 1.0, t)
    fg = np.real(np.asarray(f(t)))
    gs = np.where(m == 0, 0.0, (-1.0) ** m * fg / safe)
    nu = np.pi * m + np.pi / 2
    fh = np.real(np.asarray(f(nu)))
    hs = (-1.0) ** (m + 1) * fh / nu
    return (BandlimitedSamples(np.pi, 0.0, gs, 1.0, 0.0),
            BandlimitedSamples(np.pi, np.pi / 2, hs, 1.0, 0.0))


def construct_from_f(f, amp: float = 1.0, n_zeros: int = 100, M: int = 2000,
                     smallness: float = 0.1, delta: float = np.pi / 3,
                     check_points: int = 400, check_range: float = 50.0,
                     fprime0: float | None = None) -> ConstructedDB:
    """Build E = A + iB with z (A cos z - B sin z) = f - f(0).

    ``f`` is a registry name (scaled by ``amp``), a :class:`EvenPWFunction`, or
    a plain callable (then f'(0) is taken by a five-point difference with step
    1e-3 unless given).  Zeros of A near pi n and of B near pi n + pi/2
    (n = 1..n_zeros, the negative ones follow by symmetry) are found by
    safeguarded Newton in windows of half-width ``delta``.  A failed window
    or a zero further than 1/2 from its lattice point clears
    ``interlacing_ok``; that is a regime outcome, not an error.
    """
    if isinstance(f, str):
        tf = even_pw_function(f, amp)
        fun, d0, norm = tf.fun, tf.derivative_at_0, tf.norm
    elif isinstance(f, EvenPWFunction):
        fun, d0, norm = f.fun, f.derivative_at_0, f.norm
    else:
        fun, d0, norm = f, None, None
    if fprime0 is not None:
        d0 = float(fprime0)
    if d0 is None:
        d0 = five_point_derivative(fun)
    f0 = float(np.real(np.asarray(fun(np.array([0.0])))[0]))
    if norm is None:
        x = np.pi / 2 * np.arange(-M, M + 1)
        norm = float(np.sqrt(np.pi / 2 * np.sum(np.abs(np.asarray(fun(x))) ** 2)))
    gs, hs = _gh_samples(fun, M)
    base = ConstructedDB(gs, hs, f0, d0)

    n = np.arange(1, n_zeros + 1)
    lat_a = np.pi * n
    lat_b = np.pi * n - np.pi / 2
    lam, ok_a = bracketed_newton(lambda x: base.A(x).real, lat_a - delta, lat_a + delta, lat_a)
    mu, ok_b = bracketed_newton(lambda x: base.B(x).real, lat_b - delta, lat_b + delta, lat_b)
    near = (np.abs(lam - lat_a) < 0.5) & (np.abs(mu - lat_b) < 0.5)
    interlacing = bool(np.all(ok_a) and np.all(ok_b) and np.all(near))
    if interlacing:
        merged = np.empty(2 * n_zeros)
        merged[0::2], merged[1::2] = mu, lam
        interlacing = bool(np.all(np.diff(merged) > 0) and mu[0] > 0)

    xs = np.linspace(-check_range, check_range, check_points)
    Qx = base.Q(xs)
    target = np.real(np.asarray(fun(xs))) - f0
    q_err = float(np.max(np.abs(Qx - target)))

    C1 = C2 = None
    fit = {}
    if interlacing:
        ct = n * (lam - lat_a)
        sel = (n >= 10) & (n <= 50)
        C_tilde = float(np.median(ct[sel])) if sel.any() else None
        fit = {"C_tilde": C_tilde,
               "profile_spread": None if not C_tilde else
               float(np.max(np.abs(ct[sel] - C_tilde)) / abs(C_tilde))}
        C_tail = 2 * np.pi * C_tilde if C_tilde is not None else 0.0
        KA = float(np.real(1.0 + (base.g(np.array([1e-4])) - base.g(np.array([-1e-4])))[0] / 2e-4))
        KB = float(np.real(base.B(np.array([0.0]))[0]))
        lam_seq, mu_seq = ZeroSequence(lam, "sine", C_tail), ZeroSequence(mu, "cosine", C_tail)
        C1 = CanonicalProduct(lam_seq, KA).C1
        C2 = CanonicalProduct(mu_seq, KB).C1
    report = {
        "f_norm": norm,
        "smallness_threshold": smallness,
        "within_regime": bool(norm <= smallness),
        "zeros_found_A": int(np.sum(ok_a)),
        "zeros_found_B": int(np.sum(ok_b)),
        "max_offset_A": float(np.nanmax(np.abs(lam - lat_a))) if np.any(ok_a) else None,
        "max_offset_B": float(np.nanmax(np.abs(mu - lat_b))) if np.any(ok_b) else None,
        "Q_sup_error": q_err,
        "check_points": check_points,
        "check_range": check_range,
        **fit,
    }
    return ConstructedDB(gs, hs, f0, d0, lam, mu, interlacing, C1, C2, report)


# -- perturbed zero equation ----------------------------------------------

@dataclass(frozen=True)
class PerturbedZero:
    root: float
    residual: float
    first_order: float


def _cot_minus_inv(r):
    """cot r - 1/r, smooth through r = 0."""
    r = float(r)
    if abs(r) < 1e-3:
        return -r / 3 - r**3 / 45
    return 1 / np.tan(r) - 1 / r


def _lattice_tail(x: float, K: int) -> float:
    """sum_{|k| > K} 1 / (pi k (x - pi k)) in closed form.

    Uses sum_{k != 0} 1/(pi k (x - pi k)) = (cot x - 1/x)/x with the pole of
    the nearest lattice point cancelled analytically.
    """
    m = int(np.round(x / np.pi))
    r = x - np.pi * m
    if m == 0:
        full = _cot_minus_inv(x) / x if x != 0 else -1 / 3
        skip = None
    else:
        # cot x / x - 1/(pi m r) - 1/x^2, regularized
        full = (np.pi * m * _cot_minus_inv(r) - 1) / (np.pi * m * x) - 1 / x**2
        skip = m
    kk = np.arange(1, K + 1, dtype=float)
    lat = np.concatenate([-np.pi * kk, np.pi * kk])
    keep = np.ones(len(lat), bool)
    if skip is not None and abs(skip) <= K:
        keep[-skip - 1 if skip < 0 else K + skip - 1] = False
    head = np.sum(1 / (lat[keep] * (x - lat[keep])))
    return float(full - head)


def perturbed_zero_solve(t, coeffs, n: int, weights=None, tail_const: float = 0.0,
                         delta: float | None = None, tol: float = 1e-14) -> PerturbedZero:
    """Root near t[n] of 1 + sum_k c_k / (w_k (x - t_k)) = 0.

    ``t`` are the reference zeros (sorted), ``coeffs`` the c_k, ``weights``
    the products w_k = A~'(t_k) B~(t_k) (ones for the sin/cos reference).
    ``tail_const`` adds the terms C / (pi k (x - pi k)) for the integers k
    beyond the supplied ones (sin/cos reference only), in closed form.  The
    equation is multiplied by (x - t_n) and solved in (t_n - delta, t_n +
    delta), delta defaulting to one third of the smaller neighbouring gap;
    ``first_order`` is the one-step value t_n - c_n/w_n.
    """
    from scipy.optimize import brentq

    t = np.asarray(t, dtype=float)
    c = np.asarray(coeffs, dtype=float)
    w = np.ones_like(t) if weights is None else np.asarray(weights, dtype=float)
    if not 0 <= n < len(t):
        raise IndexError("index outside the supplied sequence")
    if delta is None:
        gaps = np.diff(t)
        left = gaps[n - 1] if n > 0 else gaps[0]
        right = gaps[n] if n < len(gaps) else gaps[-1]
        delta = min(left, right) / 3
    cw = c / w
    K = None
    if tail_const:
        k = np.round(t / np.pi)
        if (not np.allclose(t, np.pi * k, rtol=0, atol=1e-12)
                or not np.array_equal(k, np.arange(k[0], k[-1] + 1)) or k[0] != -k[-1]):
            raise ValueError("closed-form tail needs the symmetric integer lattice as reference")
        K = int(k[-1])
    others = np.arange(len(t)) != n

    def H(x):
        rest = 1.0 + np.sum(cw[others] / (x - t[others]))
        if K is not None:
            rest += tail_const * _lattice_tail(x, K)
        return (x - t[n]) * rest + cw[n]

    a, b = t[n] - delta, t[n] + delta
    first = float(t[n] - cw[n])
    if not np.any(cw) and K is None:
        return PerturbedZero(float(t[n]), 0.0, first)
    ha, hb = H(a), H(b)
    if ha * hb > 0:
        raise ConstructionError(f"no sign change in ({a}, {b}); outside the perturbative regime")
    root = brentq(H, a, b, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)
    return PerturbedZero(float(root), abs(H(root)), first)
