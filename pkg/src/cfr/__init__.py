"""Numerical reconstruction of bordered complex curves in CP2 from boundary data.

The library is organized around the stages of the reconstruction pipeline:

- ``geometry``    projective-plane primitives, boundary loops, admissible lines
- ``indicators``  Cauchy-Fantappie indicators G_k, winding integer, Laurent data
- ``infinity``    germs at {w0 = 0}, the polynomial B_inf, rational corrections P_k
- ``symmetric``   Newton identities, polynomial assembly, root finding
- ``shock``       shock-wave verification and the operator calculus (P, D, E, e^H)
- ``linsys``      assembly/solution of the linear differential systems (E0)/(E1)/(E2)
- ``reconstruct`` per-line fibers, curve sweep, algebraicity detection
- ``green``       Green-function kernel/quadrature and the Fredholm boundary solve
- ``genus``       Chern-connection boundary integrals and genus bookkeeping
- ``oracles``     analytic boundary-data fixtures used by tests and the CLI
"""

__version__ = "0.1.0"
