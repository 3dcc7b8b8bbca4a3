"""Transmutation kernels for a = 1 + x and e^x, their mapping property and
the two inverse routes.

Run with ``python3 demos/transmutation_kernels.py``.
"""

import numpy as np

from impspps import (
    Grid,
    affine_impedance,
    apply_T,
    apply_T_inverse,
    build_kernel_pair,
    check_kernel_relations,
    check_mapping_property,
    exponential_impedance,
)

# K_a(x, t) = (x + t) / (2 (1 + x)) for a = 1 + x
pair = build_kernel_pair(affine_impedance())
k = pair.direct
t = k.x[:, None] * k.tau[None, :]
print(f"a = 1 + x: kernel vs closed form {np.max(np.abs(k.values - (k.x[:, None] + t) / (2 * (1 + k.x[:, None])))):.1e}")
print("T[x^k] - phi^(k), k <= 6:", " ".join(f"{e:.0e}" for e in check_mapping_property(k, 6)))
for name, val in check_kernel_relations(pair).items():
    print(f"  {name}: {val:.1e}")

# inversion on a symmetric interval; route 1 uses the marched reciprocal kernel
pair = build_kernel_pair(exponential_impedance(1.0), 128, 101, "rectangle", 1.0)
k = pair.direct
n = int(np.sum(k.x > 0))
fine = Grid.uniform_grid(-1.0, 1.0, 10 * n + 1, 0.0)
v = apply_T(k, fine.sample(np.sin))
for route in ("darboux-representation", "volterra"):
    back = apply_T_inverse(pair, v, route=route)
    print(f"a = e^x, T^-1 T sin via {route}: {np.max(np.abs(back.values - np.sin(k.x))):.1e}")
