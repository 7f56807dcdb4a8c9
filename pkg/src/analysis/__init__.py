"""
Analysis Package

Loomis-Whitney forms and their ratios on H^n(F_q).

Modules:
    - functions: Functions on F_q^{2n}, norms, the LW form and the point-line form
    - constants: Exponent regions, sharp-constant search and mixed exponents
    - sets: Set inequalities, incidences and hyperplane covering families
"""
