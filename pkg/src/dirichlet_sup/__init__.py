"""Random Dirichlet polynomials over smooth numbers: suprema, bounds and Monte Carlo."""

__version__ = "0.1.0"
