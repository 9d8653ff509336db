"""Radial modes of the Dirac operator with a Coulomb potential alpha/|x|.

In y = log r the mode pair (g, h) solves a 2x2 linear system whose
coefficients are constant for Coulomb coupling, so solutions grow like
e^{mu y} with mu = -(n-1)/2 +- sqrt(lambda^2 + alpha^2).  Integrating
forward picks out mu+, integrating backward picks out mu-.

    python demos/coulomb_modes.py
"""

from diraclab.polar import RadialPotential, asymptotic_slope, coulomb_exponents, radial_ode_solve

n, lam = 2, 0.5
for alpha in (0.0, 0.5, 2.0):
    mu_plus, mu_minus = coulomb_exponents(n, lam, alpha)
    pot = RadialPotential.coulomb(alpha)
    g, h = radial_ode_solve(n, lam, pot, (1.0, 0.3), (0.0, 30.0), 3000)
    fwd = asymptotic_slope(g, h, "right")
    g, h = radial_ode_solve(n, lam, pot, (1.0, 0.3), (0.0, -30.0), 3000)
    bwd = asymptotic_slope(g, h, "left")
    print(f"alpha = {alpha:3.1f}: mu+ = {mu_plus:+.10f} (measured {fwd:+.10f})   "
          f"mu- = {mu_minus:+.10f} (measured {bwd:+.10f})")
