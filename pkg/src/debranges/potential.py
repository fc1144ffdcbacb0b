"""Real potentials on [0, 1].

Three representations are supported:

* ``registry`` -- closed-form entries addressed by name (``zero``, ``const:c``,
  ``cos:a,k`` for ``a*cos(2*pi*k*t)``, ``linear:a,b`` for ``a + b*t``);
* ``grid`` -- uniform samples with linear or cubic interpolation;
* ``piecewise`` -- polynomial pieces, coefficients ascending in the local
  variable ``t - start``.

A :class:`Potential` is immutable.  ``shift`` is a constant already added to
the represented function; ``mean`` is the integral of the unshifted function.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.interpolate import CubicSpline


class PotentialError(ValueError):
    pass


def _parse_registry(name: str) -> tuple[str, tuple[float, ...]]:
    head, _, tail = name.partition(":")
    head = head.strip().lower()
    args = tuple(float(a) for a in tail.split(",")) if tail else ()
    arity = {"zero": 0, "const": 1, "cos": 2, "linear": 2}
    if head not in arity:
        raise PotentialError(f"unknown registry potential {name!r}")
    if len(args) != arity[head]:
        raise PotentialError(f"{head!r} expects {arity[head]} parameter(s), got {name!r}")
    return head, args


@dataclass(frozen=True)
class Potential:
    kind: str
    name: str | None = None
    samples: tuple[float, ...] | None = None
    order: int = 3
    pieces: tuple[tuple[float, float, tuple[float, ...]], ...] | None = None
    shift: float = 0.0
    mean: float = field(init=False)

    def __post_init__(self):
        if self.kind == "registry":
            if self.name is None:
                raise PotentialError("registry potential needs a name")
            _parse_registry(self.name)
        elif self.kind == "grid":
            if self.samples is None or len(self.samples) < 2:
                raise PotentialError("grid potential needs at least two samples")
            s = np.asarray(self.samples, dtype=float)
            if not np.all(np.isfinite(s)):
                raise PotentialError("grid samples must be finite")
            if self.order not in (1, 3):
                raise PotentialError("interpolation order must be 1 or 3")
            if self.order == 3 and len(s) < 4:
                raise PotentialError("cubic interpolation needs at least four samples")
            object.__setattr__(self, "samples", tuple(float(v) for v in s))
        elif self.kind == "piecewise":
            if not self.pieces:
                raise PotentialError("piecewise potential needs pieces")
            pieces = tuple(sorted((float(a), float(b), tuple(float(c) for c in cs))
                                  for a, b, cs in self.pieces))
            if abs(pieces[0][0]) > 1e-14 or abs(pieces[-1][1] - 1.0) > 1e-14:
                raise PotentialError("pieces must cover [0, 1]")
            for (a0, b0, _), (a1, _, _) in zip(pieces, pieces[1:]):
                if abs(b0 - a1) > 1e-14:
                    raise PotentialError("pieces must be contiguous")
            for a, b, cs in pieces:
                if not b > a or not cs or not np.all(np.isfinite(cs)):
                    raise PotentialError("invalid piece")
            object.__setattr__(self, "pieces", pieces)
        else:
            raise PotentialError(f"unknown potential kind {self.kind!r}")
        if not np.isfinite(self.shift):
            raise PotentialError("shift must be finite")
        object.__setattr__(self, "mean", float(self._integral()))

    # -- constructors ---------------------------------------------------
    @classmethod
    def registry(cls, name: str, shift: float = 0.0) -> "Potential":
        return cls(kind="registry", name=name, shift=shift)

    @classmethod
    def grid(cls, samples: Sequence[float], order: int = 3, shift: float = 0.0) -> "Potential":
        return cls(kind="grid", samples=tuple(samples), order=order, shift=shift)

    @classmethod
    def piecewise(cls, pieces, shift: float = 0.0) -> "Potential":
        return cls(kind="piecewise", pieces=tuple(pieces), shift=shift)

    def with_shift(self, shift: float) -> "Potential":
        return Potential(kind=self.kind, name=self.name, samples=self.samples,
                         order=self.order, pieces=self.pieces, shift=float(shift))

    # -- evaluation -----------------------------------------------------
    def base(self, t):
        """The represented function without ``shift``."""
        t = np.asarray(t, dtype=float)
        if self.kind == "registry":
            head, args = _parse_registry(self.name)
            if head == "zero":
                return np.zeros_like(t)
            if head == "const":
                return np.full_like(t, args[0])
            if head == "cos":
                return args[0] * np.cos(2 * np.pi * args[1] * t)
            return args[0] + args[1] * t
        if self.kind == "grid":
            return self._interpolant()(t)
        out = np.zeros_like(t)
        for i, (a, b, cs) in enumerate(self.pieces):
            last = i == len(self.pieces) - 1
            mask = (t >= a) & ((t <= b) if last else (t < b))
            out[mask] = P.polyval(t[mask] - a, cs)
        return out

    def __call__(self, t):
        return self.base(t) + self.shift

    def _interpolant(self):
        s = np.asarray(self.samples)
        nodes = np.linspace(0.0, 1.0, len(s))
        if self.order == 1:
            return lambda t: np.interp(t, nodes, s)
        return CubicSpline(nodes, s, bc_type="not-a-knot")

    def _integral(self) -> float:
        if self.kind == "registry":
            head, args = _parse_registry(self.name)
            if head == "zero":
                return 0.0
            if head == "const":
                return args[0]
            if head == "cos":
                a, k = args
                return a if k == 0 else a * np.sin(2 * np.pi * k) / (2 * np.pi * k)
            return args[0] + args[1] / 2
        if self.kind == "grid":
            s = np.asarray(self.samples)
            if self.order == 1:
                h = 1.0 / (len(s) - 1)
                return h * (s.sum() - 0.5 * (s[0] + s[-1]))
            return float(self._interpolant().integrate(0.0, 1.0))
        total = 0.0
        for a, b, cs in self.pieces:
            total += P.polyval(b - a, P.polyint(cs))
        return total

    def breakpoints(self) -> np.ndarray:
        """Points inside (0, 1) where the potential may lose smoothness."""
        if self.kind == "grid":
            return np.linspace(0.0, 1.0, len(self.samples))[1:-1]
        if self.kind == "piecewise":
            return np.array([p[0] for p in self.pieces[1:]])
        return np.empty(0)

    def bounds(self, n: int = 4001) -> tuple[float, float]:
        t = np.union1d(np.linspace(0.0, 1.0, n), self.breakpoints())
        v = self(t)
        return float(v.min()), float(v.max())

    # -- serialization --------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind}
        if self.kind == "registry":
            d["name"] = self.name
        elif self.kind == "grid":
            d["samples"] = list(self.samples)
            d["order"] = self.order
        else:
            d["pieces"] = [{"start": a, "end": b, "coeffs": list(cs)} for a, b, cs in self.pieces]
        d["shift"] = self.shift
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Potential":
        kind = d.get("kind")
        shift = float(d.get("shift", 0.0))
        if kind == "registry":
            return cls.registry(d["name"], shift=shift)
        if kind == "grid":
            return cls.grid(d["samples"], order=int(d.get("order", 3)), shift=shift)
        if kind == "piecewise":
            pieces = [(p["start"], p["end"], p["coeffs"]) for p in d["pieces"]]
            return cls.piecewise(pieces, shift=shift)
        raise PotentialError(f"unknown potential kind {kind!r}")

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Potential":
        return cls.from_dict(json.loads(text))

    def label(self) -> str:
        if self.kind == "registry":
            base = self.name
        else:
            base = self.kind
        return base if self.shift == 0 else f"{base}+{self.shift:g}"


def as_potential(q) -> Potential:
    """Accept a Potential, a registry name, or a JSON-style dict."""
    if isinstance(q, Potential):
        return q
    if isinstance(q, str):
        return Potential.registry(q)
    if isinstance(q, dict):
        return Potential.from_dict(q)
    raise PotentialError(f"cannot interpret {q!r} as a potential")
