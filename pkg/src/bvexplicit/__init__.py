"""Numerical verification of an explicit Bombieri-Vinogradov inequality.

Modules:

* :mod:`bvexplicit.arith_tables` -- sieved von Mangoldt, Moebius and related tables
* :mod:`bvexplicit.dirichlet`    -- Dirichlet character groups, conductors, twisted sums
* :mod:`bvexplicit.vaughan`      -- Vaughan's identity and the S_i decomposition
* :mod:`bvexplicit.bounds`       -- explicit constants and right-hand-side formulas
* :mod:`bvexplicit.verifier`     -- inequality checks producing :class:`BoundReport` rows
* :mod:`bvexplicit.cli`          -- command line front end
"""

__version__ = "0.1.0"
