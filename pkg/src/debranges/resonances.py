"""Resonances: zeros of E in the lower half-plane.

Zeros are located by the argument principle on rectangles (phase tracked
along the boundary with steps below pi/2) and polished by Newton's method.
The zero-free strip {-log(|x| + 2)/2 + C <= Im z < 0} is certified by
rectangle windings away from the real axis and, in a thin band below it, by
the bound |Im z_n| >= 1 / sup phi'.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .functions import ClosedFormDB, DeBrangesFunction, sinc_c
from .spectra import phase


class ResonanceError(RuntimeError):
    pass


# -- argument principle -------------------------------------------------------

def _boundary(rect, s):
    """Counter-clockwise boundary point for parameter s in [0, 4)."""
    x0, x1, y0, y1 = rect
    s = np.asarray(s, dtype=float)
    side = np.minimum(np.floor(s), 3).astype(int)
    t = s - side
    pts = np.empty(s.shape, dtype=complex)
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1), complex(x0, y0)]
    for k in range(4):
        m = side == k
        pts[m] = corners[k] + t[m] * (corners[k + 1] - corners[k])
    return pts


def _winding(E: Callable, rect, per_side: int, max_refine: int):
    s = np.linspace(0.0, 4.0, 4 * per_side + 1)
    vals = E(_boundary(rect, s))
    for _ in range(max_refine):
        if not np.all(np.isfinite(vals)):
            return None
        jumps = np.abs(np.angle(vals[1:] / vals[:-1]))
        bad = np.nonzero(jumps >= 0.5 * np.pi)[0]
        if not len(bad):
            total = np.sum(np.angle(vals[1:] / vals[:-1]))
            w = total / (2 * np.pi)
            n = int(np.round(w))
            if abs(w - n) > 1e-3:
                return None
            return n
        mids = 0.5 * (s[bad] + s[bad + 1])
        s = np.insert(s, bad + 1, mids)
        vals = np.insert(vals, bad + 1, E(_boundary(rect, mids)))
    return None


def count_zeros_rect(E, rect, per_side: int = 16, max_refine: int = 30,
                     max_nudge: int = 5, nudge: float = 1e-3) -> int:
    """Number of zeros of E inside ``rect = (x0, x1, y0, y1)``.

    The boundary is walked counter-clockwise; intervals are halved until the
    argument changes by less than pi/2 between neighbours.  When that fails
    (a zero on or very close to the boundary) the rectangle is enlarged by
    ``nudge`` times its size, up to ``max_nudge`` times.
    """
    fun = E.E if isinstance(E, DeBrangesFunction) else E
    x0, x1, y0, y1 = (float(v) for v in rect)
    if not (x1 > x0 and y1 > y0):
        raise ValueError("degenerate rectangle")
    for k in range(max_nudge + 1):
        d = k * nudge * max(x1 - x0, y1 - y0)
        n = _winding(fun, (x0 - d, x1 + d, y0 - d, y1 + d), per_side, max_refine)
        if n is not None:
            return n
    raise ResonanceError(f"zero on the boundary of {rect} after {max_nudge} nudges")


# -- resonance search ---------------------------------------------------------

@dataclass(frozen=True)
class ResonanceSet:
    zeros: np.ndarray
    residuals: np.ndarray
    counts: list
    strip_C: float | None
    delta_gap: float | None
    unresolved: list = field(default_factory=list)
    region: dict = field(default_factory=dict)

    @property
    def max_imag(self) -> float | None:
        """Imaginary part of the highest zero found (closest to the axis)."""
        return float(self.zeros.imag.max()) if len(self.zeros) else None

    def to_dict(self) -> dict:
        return {
            "zeros": [[float(z.real), float(z.imag)] for z in self.zeros],
            "residuals": [float(r) for r in self.residuals],
            "counts": self.counts,
            "strip_C": self.strip_C,
            "delta_gap": self.delta_gap,
            "max_imag": self.max_imag,
            "unresolved": self.unresolved,
            "region": self.region,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def write_csv(self, path) -> None:
        cell_of = {}
        for c in self.counts:
            for z in c.get("zeros", []):
                cell_of[tuple(z)] = c["count"]
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["x", "y", "residual", "cell_count"])
            for z, r in zip(self.zeros, self.residuals):
                key = (float(z.real), float(z.imag))
                wr.writerow([repr(key[0]), repr(key[1]), repr(float(r)), cell_of.get(key, 1)])


def strip_constant(zeros) -> float | None:
    """Smallest C with every zero on or below y = -log(|x| + 2)/2 + C."""
    zs = np.asarray(zeros, dtype=complex)
    if not len(zs):
        return None
    return float(np.max(zs.imag + 0.5 * np.log(np.abs(zs.real) + 2)))


def _newton(fun, z0, lo, hi, h, tol: float = 1e-14, maxiter: int = 60):
    """Vectorized complex Newton with a central-difference derivative.

    Iterates leaving their (slightly enlarged) cell are marked failed.
    """
    z = np.array(z0, dtype=complex)
    ok = np.zeros(z.shape, bool)
    live = np.ones(z.shape, bool)
    for _ in range(maxiter):
        if not live.any():
            break
        zl = z[live]
        hl = h[live]
        f = fun(zl)
        df = (fun(zl + hl) - fun(zl - hl)) / (2 * hl)
        with np.errstate(divide="ignore", invalid="ignore"):
            dz = f / df
        zn = zl - dz
        idx = np.nonzero(live)[0]
        inside = ((zn.real >= lo[live].real) & (zn.real <= hi[live].real)
                  & (zn.imag >= lo[live].imag) & (zn.imag <= hi[live].imag) & np.isfinite(zn))
        conv = inside & (np.abs(dz) <= tol * np.maximum(1.0, np.abs(zl)))
        z[idx] = np.where(inside, zn, zl)
        ok[idx[conv]] = True
        live[idx[conv | ~inside]] = False
    return z, ok


def find_resonances(E: DeBrangesFunction, x_max: float = 60.0, y_min: float = -8.0,
                    y_max: float | None = None, tol: float = 1e-9, cell_width: float = 2.0,
                    max_depth: int = 14, min_size: float = 0.5, phase_points: int = 4001,
                    x_min: float | None = None) -> ResonanceSet:
    """Zeros of E in [x_min, x_max] x [y_min, y_max], x_min defaulting to -x_max.

    The top edge defaults to -delta_gap/2, with delta_gap = 1 / sup phi' on
    [-x_max - 5, x_max + 5]; no zero can lie above -delta_gap.  The region is
    cut into columns of ``cell_width``; cells holding more than one zero, or
    one zero but larger than ``min_size``, are split along the longer side.
    Single-zero cells are polished by Newton and the root must stay in the
    cell with |E| <= tol * max(1, |z|).
    """
    fun = E.E
    lo_x = -x_max if x_min is None else x_min
    span = max(abs(lo_x), abs(x_max)) + 5
    pd = phase(E, np.linspace(-span, span, phase_points))
    delta_gap = pd.delta_gap
    top = -0.5 * delta_gap if y_max is None else y_max
    if not top > y_min:
        raise ValueError("empty search region")
    ncol = max(1, int(np.ceil((x_max - lo_x) / cell_width)))
    edges = np.linspace(lo_x, x_max, ncol + 1)
    stack = [((edges[i], edges[i + 1], y_min, top), 0) for i in range(ncol)]
    singles = []
    counts = []
    unresolved = []
    while stack:
        rect, depth = stack.pop(0)
        n = count_zeros_rect(fun, rect)
        if n == 0:
            counts.append({"rect": list(map(float, rect)), "count": 0})
            continue
        x0, x1, y0, y1 = rect
        big = max(x1 - x0, y1 - y0) > min_size
        if n > 1 or big:
            if depth >= max_depth:
                unresolved.append({"rect": list(map(float, rect)), "count": n})
                continue
            if x1 - x0 >= y1 - y0:
                xm = 0.5 * (x0 + x1)
                stack += [((x0, xm, y0, y1), depth + 1), ((xm, x1, y0, y1), depth + 1)]
            else:
                ym = 0.5 * (y0 + y1)
                stack += [((x0, x1, y0, ym), depth + 1), ((x0, x1, ym, y1), depth + 1)]
            continue
        singles.append(rect)
    zeros, residuals = [], []
    if singles:
        r = np.array(singles)
        lo = r[:, 0] + 1j * r[:, 2]
        hi = r[:, 1] + 1j * r[:, 3]
        size = np.maximum(r[:, 1] - r[:, 0], r[:, 3] - r[:, 2])
        pad = 0.05 * size * (1 + 1j)
        z, ok = _newton(fun, 0.5 * (lo + hi), lo - pad, hi + pad, 1e-5 * size)
        res = np.abs(fun(z))
        for k, rect in enumerate(singles):
            good = ok[k] and res[k] <= tol * max(1.0, abs(z[k]))
            rec = {"rect": list(map(float, rect)), "count": 1}
            if good:
                rec["zeros"] = [[float(z[k].real), float(z[k].imag)]]
                zeros.append(z[k])
                residuals.append(res[k])
                counts.append(rec)
            else:
                unresolved.append(rec)
    order = np.argsort(np.real(zeros), kind="stable") if zeros else []
    zs = np.array(zeros, dtype=complex)[order] if zeros else np.empty(0, complex)
    rs = np.array(residuals)[order] if zeros else np.empty(0)
    counts.sort(key=lambda c: (c["rect"][0], c["rect"][2]))
    region = {"x_min": float(lo_x), "x_max": float(x_max), "y_min": float(y_min),
              "y_max": float(top), "sup_phi_prime": pd.sup_phi_prime}
    return ResonanceSet(zs, rs, counts, strip_constant(zs), float(delta_gap), unresolved, region)


# -- strip certification ----------------------------------------------------

@dataclass(frozen=True)
class StripCertificate:
    certified: bool
    C: float
    x_max: float
    delta_gap: float
    band: float
    rectangles: list
    violations: list

    def to_dict(self) -> dict:
        return {"certified": self.certified, "C": self.C, "x_max": self.x_max,
                "delta_gap": self.delta_gap, "band": self.band,
                "rectangles": self.rectangles, "violations": self.violations}


def certify_strip(E: DeBrangesFunction, C: float, x_max: float = 100.0, width: float = 1.0,
                  delta_gap: float | None = None, phase_points: int = 4001) -> StripCertificate:
    """Certify {-log(|x| + 2)/2 + C <= Im z < 0, |Re z| <= x_max} zero-free.

    Columns of width <= ``width`` are covered by rectangles from the lowest
    point of the curve over the column up to -delta_gap/2; each must have
    winding number 0.  The band (-delta_gap, 0) is zero-free because a zero
    z_n forces phi'(Re z_n) >= 1/|Im z_n|.
    """
    fun = E.E
    if delta_gap is None:
        pd = phase(E, np.linspace(-x_max - 5, x_max + 5, phase_points))
        delta_gap = pd.delta_gap
    band = 0.5 * delta_gap
    ncol = max(1, int(np.ceil(2 * x_max / width)))
    edges = np.linspace(-x_max, x_max, ncol + 1)
    rects, violations = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        far = max(abs(a), abs(b))
        bottom = -0.5 * np.log(far + 2) + C
        if bottom >= -band:
            continue
        rect = (float(a), float(b), float(bottom), float(-band))
        try:
            n = count_zeros_rect(fun, rect)
        except ResonanceError as exc:
            violations.append({"rect": list(rect), "error": str(exc)})
            continue
        rects.append({"rect": list(rect), "winding": n})
        if n != 0:
            violations.append({"rect": list(rect), "winding": n})
    ok = not violations and delta_gap > 0
    return StripCertificate(ok, float(C), float(x_max), float(delta_gap), float(band), rects,
                            violations)


def strip_curve(C: float, x_max: float, n: int = 401):
    x = np.linspace(-x_max, x_max, n)
    return x, -0.5 * np.log(np.abs(x) + 2) + C


# -- the sharpness example --------------------------------------------------

_P2 = np.pi**2


def remark5_A(z):
    """(z^2 - 9 pi^2/16) sin z / (z^2 - pi^2), with the poles at +-pi removed."""
    z = np.asarray(z, dtype=complex)
    ratio = (sinc_c(z + np.pi) - sinc_c(z - np.pi)) / (2 * np.pi)
    return (z * z - 9 * _P2 / 16) * ratio


def remark5_B(z):
    return np.cos(np.asarray(z, dtype=complex))


def remark5_pairing(z):
    """z (A cos z - B sin z) = (7 pi^2/32) z sin 2z / (z^2 - pi^2)."""
    z = np.asarray(z, dtype=complex)
    ratio = (sinc_c(z + np.pi) - sinc_c(z - np.pi)) / (2 * np.pi)
    return (7 * _P2 / 16) * z * np.cos(z) * ratio


def remark5_oracle(x_max: float, tol: float = 1e-15, maxiter: int = 100) -> np.ndarray:
    """Zeros with 0 < Re z <= x_max from e^{2iz} = (32 z^2 - 25 pi^2) / (7 pi^2).

    Damped Newton on the entire function 7 pi^2 e^{2iz} - 32 z^2 + 25 pi^2,
    seeded per branch k at pi k + i y0 and pi k - pi/2 + i y0 with
    y0 = -log(32 x^2 / (7 pi^2))/2; the spurious roots +-pi (cancelled in A)
    are dropped.
    """
    def H(z):
        return 7 * _P2 * np.exp(2j * z) - 32 * z * z + 25 * _P2

    def dH(z):
        return 14j * _P2 * np.exp(2j * z) - 64 * z

    found = []
    kmax = int(np.ceil(x_max / np.pi)) + 1
    for k in range(1, kmax + 1):
        for x in (np.pi * k, np.pi * k - np.pi / 2):
            y0 = -0.5 * np.log(max(32 * x * x / (7 * _P2), 1.5))
            z = complex(x, y0)
            for _ in range(maxiter):
                step = H(z) / dH(z)
                lam = 1.0
                while lam > 1e-4 and abs(H(z - lam * step)) > abs(H(z)) and abs(step) > tol:
                    lam *= 0.5
                z = z - lam * step
                if abs(step) <= tol * max(1.0, abs(z)):
                    break
            if abs(H(z)) > 1e-8 * max(1.0, abs(z) ** 2) or abs(abs(z) - np.pi) < 1e-6:
                continue
            if 0 < z.real <= x_max and z.imag < 0 and all(abs(z - w) > 1e-8 for w in found):
                found.append(z)
    return np.array(sorted(found, key=lambda w: w.real), dtype=complex)


@dataclass(frozen=True)
class Remark5Fixture:
    E: ClosedFormDB
    A: Callable
    B: Callable
    pairing: Callable
    oracle: Callable


def remark5_fixture() -> Remark5Fixture:
    ev = ClosedFormDB(remark5_A, remark5_B, label="fixture:remark5")
    return Remark5Fixture(ev, remark5_A, remark5_B, remark5_pairing, remark5_oracle)


def log_asymptote(zeros) -> dict:
    """Fit Im z_n = -log|Re z_n| + M (slope fixed).

    ``M_fit`` is the least-squares intercept, ``spread`` the standard
    deviation of the residuals, ``M_sup`` the smallest M with every zero on or
    below the curve and ``range`` the max-min of the residuals.
    """
    zs = np.asarray(zeros, dtype=complex)
    v = zs.imag + np.log(np.abs(zs.real))
    return {"M_fit": float(np.mean(v)), "spread": float(np.std(v)), "M_sup": float(np.max(v)),
            "range": float(np.max(v) - np.min(v))}
