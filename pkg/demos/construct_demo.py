"""Build E = A + iB from a small even function f of exponential type 2.

The zeros of A settle as lambda_n = pi n + C/n + (l2)/n.

    python demos/construct_demo.py
"""
import numpy as np

from debranges import check_schrodinger_L2, construct_from_f

for amp in (0.05, 0.5, 50.0):
    db = construct_from_f("sinc2", amp, n_zeros=100)
    r = db.report
    print(f"amp {amp:5.2f}: |f| = {r['f_norm']:.3f}, interlacing {db.interlacing_ok}, "
          f"sup|Q - (f - f(0))| = {r['Q_sup_error']:.1e}")
    if db.interlacing_ok:
        n = np.arange(1, 101)
        print("   n (lambda_n - pi n) at n = 10, 50, 100:",
              np.round((n * (db.lam - np.pi * n))[[9, 49, 99]], 7), " C1, C2:", db.C1, db.C2)
        print("   round trip verdict:", check_schrodinger_L2(db).verdict)
