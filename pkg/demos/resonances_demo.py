"""Resonances and the logarithmic zero-free strip.

The rational-trig example has resonances along Im z = -log|Re z| + M,
showing that a strip of half-logarithmic width is the best one can hope
for; the cos potential has resonances much deeper down.

    python demos/resonances_demo.py     (about 40 s)
"""
import numpy as np

from debranges import SchrodingerDB, certify_strip, find_resonances, remark5_fixture
from debranges.resonances import log_asymptote

fx = remark5_fixture()
rs = find_resonances(fx.E, x_max=40)
pos = rs.zeros[rs.zeros.real > 0]
print("rational-trig example, first resonances:", np.round(pos[:4], 6))
print("log fit:", {k: round(v, 4) for k, v in log_asymptote(rs.zeros).items()})
cert = certify_strip(fx.E, rs.strip_C + 0.5, x_max=100, delta_gap=rs.delta_gap)
print(f"strip with C = {rs.strip_C + 0.5:.4f} zero-free up to |Re z| = 100: {cert.certified}")

ev = SchrodingerDB("cos:10,1")
rs = find_resonances(ev, x_max=60, y_min=-8)
print(f"cos potential: {len(rs.zeros)} resonances, highest Im = {rs.zeros.imag.max():.4f}, "
      f"strip_C = {rs.strip_C:.4f}, delta_gap = {rs.delta_gap:.4f}")
cert = certify_strip(ev, rs.strip_C + 0.5, x_max=100, delta_gap=rs.delta_gap)
print("certified:", cert.certified)
