"""Best L^2_a approximation by formal polynomials.

The projection errors decrease with the order for smooth targets, which is
the numerical face of the completeness of the formal powers.

Run with ``python3 demos/completeness.py``.
"""

from impspps import Grid, affine_impedance, approximation_study, exponential_impedance, target_function

grid = Grid.uniform_grid(0.0, 1.0, 2001)
Ns = [0, 3, 6, 9, 12, 15]

for a in (affine_impedance(), exponential_impedance(1.0)):
    print(a.label)
    for name in ("exp", "C_pi", "smooth_abs"):
        rep = approximation_study(target_function(name, a, grid), a, Ns, (2, "inf"))
        errs = "  ".join(f"{e:.1e}" for e in rep["l2a"])
        print(f"  {name:10s} L2_a error for N={Ns}: {errs}")
    # the Gram matrix grows ill conditioned quickly, hence the QR solve
    print(f"  Gram condition number at N=15: {rep['cond'][-1]:.1e}")
