"""Paley-Wiener functions on critical lattices.

A function of exponential type ``tau`` that is square integrable on the line
is determined by its samples on ``offset + (pi/tau) Z`` through the cardinal
series.  This module samples, reconstructs, tests lattice l2 membership of
``F - const`` and expands in the Riesz basis attached to a complete
interpolating sequence.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .products import CanonicalProduct, ZeroSequence, derivative_at_zeros, eval_product


@dataclass(frozen=True, eq=False)
class BandlimitedSamples:
    """Samples f(offset + m*step), m = -M..M, with step = pi / type_bound."""

    step: float
    offset: float
    samples: np.ndarray
    type_bound: float
    tail_l2: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 1 or len(s) % 2 != 1:
            raise ValueError("samples must be indexed symmetrically, m = -M..M")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        if not self.step > 0 or abs(self.step * self.type_bound - np.pi) > 1e-12:
            raise ValueError("step must equal pi / type_bound")
        s = s.copy()
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def M(self) -> int:
        return (len(self.samples) - 1) // 2

    @property
    def nodes(self) -> np.ndarray:
        return self.offset + self.step * np.arange(-self.M, self.M + 1)

    def plancherel_norm(self) -> float:
        """L2 norm on the line of the cardinal interpolant."""
        return float(np.sqrt(self.step * np.sum(np.abs(self.samples) ** 2)))


def _tail_estimate(samples: np.ndarray) -> float:
    """l2 mass of the outermost dyadic block, used as a proxy for the rest.

    A heuristic: exact for nothing, but a decent bound for monotonically
    decaying samples.
    """
    M = (len(samples) - 1) // 2
    if M < 2:
        return float(np.sqrt(np.sum(np.abs(samples) ** 2)))
    m = np.abs(np.arange(-M, M + 1))
    block = m > M // 2
    return float(np.sqrt(np.sum(np.abs(samples[block]) ** 2)))


def sample(f: Callable, type_bound: float, M: int, offset: float = 0.0) -> BandlimitedSamples:
    step = np.pi / type_bound
    x = offset + step * np.arange(-M, M + 1)
    vals = np.asarray(f(x))
    if np.iscomplexobj(vals) and np.all(vals.imag == 0):
        vals = vals.real
    return BandlimitedSamples(step, offset, vals, type_bound, _tail_estimate(vals))


def cardinal_eval(s: BandlimitedSamples, z, return_bound: bool = False,
                  summation: str = "symmetric"):
    """Cardinal series sum_m s_m sinc((z - offset)/step - m).

    Terms are summed in symmetric pairs (m, -m) from the outside in.
    ``summation="averaged"`` returns the mean of the symmetric partial sums
    with cut-offs M/2..M (a linear taper on the outer half), which tames the
    conditionally convergent series of bounded, non-L2 functions sampled
    above their critical rate (no gain at the critical rate itself).  With
    ``return_bound`` a Cauchy-Schwarz estimate of the truncation error,
    driven by ``tail_l2``, is returned as well.
    """
    if summation not in ("symmetric", "averaged"):
        raise ValueError(f"unknown summation {summation!r}")
    z = np.asarray(z)
    x = ((z - s.offset) / s.step).ravel()
    x = x.astype(complex) if np.iscomplexobj(x) else x.astype(float)
    M = s.M
    m0 = np.round(x.real)
    r = x - m0
    sr = np.sin(np.pi * r)
    sgn0 = np.where(m0 % 2 == 0, 1.0, -1.0)
    samp = s.samples
    total = float(np.sum(np.abs(samp) ** 2))
    if summation == "symmetric" and total > 0 and s.tail_l2**2 > 1e-3 * total:
        warnings.warn("samples decay slowly; truncated cardinal series may be inaccurate",
                      RuntimeWarning, stacklevel=2)
    weights = np.ones(M + 1)
    if summation == "averaged":
        half = M // 2
        mm = np.arange(half + 1, M + 1)
        weights[half + 1:] = (M - mm + 1) / (M - half + 1)

    m = np.arange(1, M + 1)
    sgn_m = np.where(m % 2 == 0, 1.0, -1.0)
    coef = weights[1:]
    acc = np.empty(x.shape, dtype=np.result_type(x, samp, float))
    chunk = max(1, (1 << 22) // max(M, 1))
    for c in range(0, len(x), chunk):
        xc, src, sg = x[c:c + chunk, None], sr[c:c + chunk, None], sgn0[c:c + chunk, None]
        dp, dm = xc - m, xc + m
        with np.errstate(divide="ignore", invalid="ignore"):
            # sin(pi (x - m)) = (-1)^(m0 + m) sin(pi r): no large-argument sine
            tp = np.where(dp == 0, 1.0, sg * sgn_m * src / (np.pi * dp))
            tm = np.where(dm == 0, 1.0, sg * sgn_m * src / (np.pi * dm))
            d0 = xc[:, 0]
            t0 = np.where(d0 == 0, 1.0, sg[:, 0] * src[:, 0] / (np.pi * d0))
        pairs = coef * (samp[M + m] * tp + samp[M - m] * tm)
        # outside in, fixed order
        acc[c:c + chunk] = pairs[:, ::-1].sum(axis=1) + samp[M] * t0
    out = acc.reshape(z.shape)
    if not return_bound:
        return out
    gap = M - np.abs(x.real)
    with np.errstate(divide="ignore", invalid="ignore"):
        kern = np.abs(np.sin(np.pi * x)) / np.pi * np.sqrt(2.0 / np.maximum(gap - 1, 0))
    bound = np.where(gap > 1, s.tail_l2 * kern, np.inf)
    return out, bound.reshape(z.shape)


# -- lattice l2 membership ------------------------------------------------

@dataclass(frozen=True)
class MembershipReport:
    C_hat: float
    cumsum: np.ndarray
    verdict: bool
    M: int
    tail_fraction: float
    step: float
    offset: float
    tail_increment: float
    tail_rms: float
    atol: float

    @property
    def total(self) -> float:
        return float(self.cumsum[-1])

    def to_dict(self) -> dict:
        return {
            "C_hat": self.C_hat,
            "cumsum": self.cumsum.tolist(),
            "verdict": self.verdict,
            "M": self.M,
            "tail_fraction": self.tail_fraction,
            "step": self.step,
            "offset": self.offset,
            "tail_increment": self.tail_increment,
            "tail_rms": self.tail_rms,
            "atol": self.atol,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def membership_from_samples(values, step: float, offset: float = 0.0,
                            tail_fraction: float = 0.1, atol: float = 1e-6) -> MembershipReport:
    """Diagnose whether lattice samples (m = -M..M) lie in Const + l2.

    C_hat is the median of the samples with M/2 <= |m| <= M.  The profile is
    the cumulative sum of (F - C_hat)^2 over |m| <= k, k = 0..M.  The verdict
    is positive when the increment over the last quarter of indices is below
    ``tail_fraction`` of the total, or when the root mean square deviation on
    that quarter is below ``atol`` (samples at noise level).
    """
    v = np.asarray(values)
    if np.iscomplexobj(v):
        v = v.real
    M = (len(v) - 1) // 2
    if len(v) != 2 * M + 1 or M < 4:
        raise ValueError("need samples for m = -M..M with M >= 4")
    m = np.arange(-M, M + 1)
    am = np.abs(m)
    C_hat = float(np.median(v[am >= M / 2]))
    dev2 = (v - C_hat) ** 2
    per_k = np.bincount(am, weights=dev2, minlength=M + 1)
    cumsum = np.cumsum(per_k)
    total = float(cumsum[-1])
    q = int(np.floor(0.75 * M))
    increment = float(total - cumsum[q])
    tail_rms = float(np.sqrt(np.mean(dev2[am > q])))
    verdict = bool(increment <= tail_fraction * total or tail_rms <= atol)
    if not np.isfinite(total):
        verdict = False
    return MembershipReport(C_hat, cumsum, verdict, M, tail_fraction, step, offset,
                            increment, tail_rms, atol)


def pw_membership_test(F: Callable, type_bound: float = 2.0, M: int = 2000,
                       tail_fraction: float = 0.1, offset: float = 0.0,
                       atol: float = 1e-6) -> MembershipReport:
    """Sample F on offset + (pi/type_bound) Z and test F - C in l2."""
    step = np.pi / type_bound
    x = offset + step * np.arange(-M, M + 1)
    vals = np.asarray(F(x))
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("non-finite samples of F")
    return membership_from_samples(vals, step, offset, tail_fraction, atol)


# -- Riesz basis expansion ------------------------------------------------

def generator_derivative(generator: CanonicalProduct) -> np.ndarray:
    """G'(t) at every entry of the generator's zero sequence (sorted)."""
    zs = generator.zeros
    pos = derivative_at_zeros(generator)
    if zs.parity == "sine":
        # G odd => G' even; G'(0) = K
        return np.concatenate([pos[::-1], [generator.K], pos])
    return np.concatenate([-pos[::-1], pos])


class RieszExpansion:
    """g(z) = sum_n G(z) / (G'(t_n) (z - t_n)) w_n over the zeros t_n of G."""

    def __init__(self, cis: ZeroSequence, generator: CanonicalProduct, values,
                 tail_l2: float | None = None):
        if generator.zeros is not cis and not (
                generator.zeros.parity == cis.parity
                and np.array_equal(generator.zeros.positive, cis.positive)):
            raise ValueError("generator must vanish exactly on the interpolating sequence")
        self.nodes = cis.entries()
        w = np.asarray(values, dtype=float)
        if w.shape != self.nodes.shape:
            raise ValueError(f"need {len(self.nodes)} values, got {len(w)}")
        self.values = w
        self.generator = generator
        self.dG = generator_derivative(generator)
        self.coef = w / self.dG
        self.tail_l2 = _tail_estimate(self.coef) if tail_l2 is None else float(tail_l2)

    def __call__(self, z, return_bound: bool = False):
        z = np.asarray(z)
        flat = z.ravel().astype(complex)
        G = eval_product(self.generator, flat)
        d = flat[:, None] - self.nodes[None, :]
        hit = d == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(hit, 0.0, self.coef / np.where(hit, 1.0, d))
        # symmetric pairing, outside in
        n = len(self.nodes)
        order = np.argsort(-np.abs(np.arange(n) - (n - 1) / 2), kind="stable")
        val = G * terms[:, order].sum(axis=1)
        rows, cols = np.nonzero(hit)
        val[rows] = self.values[cols]
        out = val.reshape(z.shape)
        if np.isrealobj(z):
            out = out.real
        if not return_bound:
            return out
        # Cauchy-Schwarz with sum_{|t| > t_max} 1/|z - t|^2 <= 2/(t_max - |z| - pi)
        reach = self.nodes[-1] - np.abs(flat.real) - np.pi
        with np.errstate(divide="ignore", invalid="ignore"):
            kern = np.abs(G) * np.sqrt(2.0 / (np.pi * np.maximum(reach, 0)))
        bound = np.where(reach > 0, self.tail_l2 * kern, np.inf)
        return out, bound.reshape(z.shape)


def riesz_expand(cis: ZeroSequence, generator: CanonicalProduct, values,
                 tail_l2: float | None = None) -> RieszExpansion:
    return RieszExpansion(cis, generator, values, tail_l2)
