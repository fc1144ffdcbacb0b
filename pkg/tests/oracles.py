"""Independent reference computations used by the tests.

Nothing here touches the integrators of the package.
"""
import numpy as np
from scipy.linalg import eigh_tridiagonal


def fd_dirichlet(q, k, cells):
    """Lowest k eigenvalues of -u'' + q u, u(0) = u(1) = 0, three-point stencil."""
    h = 1.0 / cells
    t = h * np.arange(1, cells)
    d = 2.0 / h**2 + q(t)
    e = -np.ones(cells - 2) / h**2
    return eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1))[0]


def fd_richardson(q, k, cells=(4000, 8000, 16000)):
    """Two Richardson steps on the O(h^2) + O(h^4) error expansion."""
    a, b, c = (fd_dirichlet(q, k, m) for m in cells)
    r1 = (4 * b - a) / 3
    r2 = (4 * c - b) / 3
    return (16 * r2 - r1) / 15


def rk4_shoot(q, w, steps=4000):
    """u(1), u'(1) for u(0) = 0, u'(0) = 1 by classical Runge-Kutta (complex w)."""
    h = 1.0 / steps
    y = np.array([0.0, 1.0], dtype=complex)

    def f(t, y):
        return np.array([y[1], (q(np.array([t]))[0] - w) * y[0]])

    t = 0.0
    for _ in range(steps):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y


def remark5_residual(z):
    """7 pi^2 e^{2iz} - 32 z^2 + 25 pi^2."""
    return 7 * np.pi**2 * np.exp(2j * z) - 32 * z**2 + 25 * np.pi**2
