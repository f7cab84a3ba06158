"""Numerical toolkit for spectral characteristics of Bloch functions.

Subpackages
-----------
core        interval arithmetic and hyperbolic geometry
blochlib    concrete Bloch functions and Taylor coefficients of b'
spectra     asymptotic variance, integral means, LIL statistic, ball averages
transforms  Bergman projection, modified Beurling transform, n-adic boxes
martingale  n-adic martingales induced by Bloch functions
certify     interval certificate for the bound on the Bloch-ball variance
"""

__version__ = "0.1.0"
