"""Brown measures of R-diagonal variables, their free-compression semigroup,
and the stable family mu_beta, with a random-matrix Monte Carlo check."""

__version__ = "0.1.0"
