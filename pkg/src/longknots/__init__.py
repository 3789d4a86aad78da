"""Exact computations around the Hochschild homology of the Poisson operad.

Modules
-------
linalg       exact sparse linear algebra over Q with a modular cross-check
confalg      cohomology of configuration spaces (Arnold algebra) and its
             cosimplicial/operadic structure maps
hochschild   E1/E2 pages, normalised columns, knot Betti series
fans         fan posets Phi[n], theta_n, phi_n and cofinality checks
graphcx      admissible graph complex and its cohomology windows
cosimp       cosimplicial vector spaces, diagrams and derived limits
fanic        operads in vector spaces and fanic diagrams
cli          command-line front end
"""
__version__ = "0.1.0"
