"""The 2D Dirac system with the Case-2 potential symmetry.

With V21 = -conj(V12) and V22 = -conj(V11) the combination S = U1 + conj(U2)
satisfies one scalar equation i dbar S = W S.  Where S does not vanish,
|W| <= |V21| + |V22| pointwise.

    python demos/case2_reduction.py
"""

from diraclab import GridSpec
from diraclab.reduction2d import case2_reduce, equivalence_gap, manufacture_case2, system_residual

grid = GridSpec(2, 5.0, 64)
for seed in range(3):
    sys_ = manufacture_case2(grid, seed)
    red = case2_reduce(sys_)
    print(f"seed {seed}: system residual {max(system_residual(sys_)):.1e}, "
          f"operator gap {equivalence_gap(sys_):.1e}, scalar residual {red.residual:.1e}, "
          f"sup|W| {red.w_sup:.3f} vs sup bound {red.bound_sup:.3f}, bound holds: {red.bound_ok}")
