"""
Algebra Package

Finite fields F_q with q an odd prime power, the Heisenberg groups H^n(F_q)
built on them, linear algebra over F_q and subgroup enumeration.

Modules:
    - field: Field contexts and vectorized arithmetic on element codes
    - group: Group law, projections, fibers and straightening maps
    - linalg: Row reduction, subspace enumeration and symplectic forms
    - subgroups: Subgroup lattice, classification and counting formulas
"""
