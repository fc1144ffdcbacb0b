"""Evaluators for de Branges functions E = A + iB with A, B real entire."""
from __future__ import annotations

from typing import Callable

import numpy as np

from .potential import as_potential
from .schrodinger import evaluate_AB


class DeBrangesFunction:
    """Base class.  Subclasses implement :meth:`AB` (vectorized)."""

    label = "E"

    def AB(self, z):
        raise NotImplementedError

    def A(self, z):
        return self.AB(z)[0]

    def B(self, z):
        return self.AB(z)[1]

    def E(self, z):
        A, B = self.AB(z)
        return A + 1j * B

    __call__ = E

    def E_sharp(self, z):
        # A, B real entire: conj(E(conj z)) = A(z) - i B(z)
        A, B = self.AB(z)
        return A - 1j * B


class SchrodingerDB(DeBrangesFunction):
    """E(z) = z u_{z^2}(1) + i u'_{z^2}(1) for a potential on [0, 1]."""

    def __init__(self, q, tol: float = 1e-11):
        self.q = as_potential(q)
        self.tol = tol
        self.label = f"q:{self.q.label()}"

    def AB(self, z):
        return evaluate_AB(self.q, z, self.tol)


class ClosedFormDB(DeBrangesFunction):
    def __init__(self, A: Callable, B: Callable, label: str = "closed-form"):
        self._A = A
        self._B = B
        self.label = label

    def AB(self, z):
        z = np.asarray(z, dtype=complex)
        return np.asarray(self._A(z), dtype=complex), np.asarray(self._B(z), dtype=complex)


def free_db() -> ClosedFormDB:
    """q = 0: A = sin, B = cos, E = i exp(-iz)."""
    return ClosedFormDB(np.sin, np.cos, label="free")


def central_difference(fun: Callable, z, h: float = 1e-5):
    """Fourth-order central difference of a holomorphic or real function."""
    z = np.asarray(z, dtype=complex)
    return (8 * (fun(z + h) - fun(z - h)) - (fun(z + 2 * h) - fun(z - 2 * h))) / (12 * h)


def sinc_c(w):
    """sin(w)/w for complex ``w``."""
    w = np.asarray(w, dtype=complex)
    small = np.abs(w) < 1e-4
    safe = np.where(small, 1.0, w)
    return np.where(small, 1 - w**2 / 6 + w**4 / 120, np.sin(safe) / safe)
