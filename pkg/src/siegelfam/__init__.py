"""siegelfam: spectral statistics of degree-2 Siegel cusp form families."""

__version__ = "0.1.0"
