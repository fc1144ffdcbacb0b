"""Two spectra of a Schrodinger operator and their asymptotics.

    python demos/spectra_demo.py
"""
import numpy as np

from debranges import asymptotic_fit, compute_spectra, positivity_shift
from debranges.spectra import phase
from debranges import SchrodingerDB

for name in ["zero", "const:5", "cos:10,1", "linear:-3,6"]:
    q = positivity_shift(name)
    s = compute_spectra(q, 30)
    fit = asymptotic_fit(s)
    late = max(np.abs(fit.residuals_a[22:]).max(), np.abs(fit.residuals_b[22:]).max())
    print(f"{name:12s} lambda_1^2 = {s.dd[0]:9.5f}  mu_1^2 = {s.nd[0]:9.5f}  "
          f"C_hat = {fit.C_hat:+.2e}  (mean of q: {q.mean + q.shift:+.2f})  "
          f"max |a_n|, |b_n| for n >= 23: {late:.1e}")

# the phase of E climbs by pi between consecutive Dirichlet eigenvalues
ev = SchrodingerDB("cos:10,1")
lam = np.sqrt(compute_spectra("cos:10,1", 6).dd)
print("phi at sqrt(lambda_n) / pi:", np.round(phase(ev, lam).phi / np.pi, 9))
pd = phase(ev, np.linspace(-30, 30, 2001))
print(f"sup phi' = {pd.sup_phi_prime:.4f}, zero-free band below the axis: {pd.delta_gap:.4f}")
