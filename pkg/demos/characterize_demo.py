"""Is z (A cos z - B sin z) a constant plus an L2 function?

Potentials on [0, 1] pass; a sine-type zero set with one zero moved to
1.25 pi does not, and only the shifted lattice pi Z / 2 + pi / 4 sees it.

    python demos/characterize_demo.py
"""
from debranges import SchrodingerDB, check_schrodinger_L2, positivity_shift
from debranges.products import CanonicalProduct, ProductDB, ZeroSequence, perturbed_sine_sequence
from debranges.resonances import remark5_fixture

sources = {name: SchrodingerDB(positivity_shift(name))
           for name in ["zero", "const:5", "cos:10,1", "linear:-3,6"]}
sources["rational-trig example"] = remark5_fixture().E
sources["moved zero"] = ProductDB(CanonicalProduct(perturbed_sine_sequence(2000), 1.0),
                                  CanonicalProduct(ZeroSequence.lattice_sequence(2000, "cosine")))

for name, ev in sources.items():
    v = check_schrodinger_L2(ev, M=2000)
    print(f"{name:24s} verdict {str(v.verdict):5s}  C_hat = {v.C_hat:+.5f}  "
          f"tail increments {v.report.tail_increment:.1e} / {v.shifted_report.tail_increment:.1e}")
