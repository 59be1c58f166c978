"""
pmls: penalized modified least squares for multiplicative spatial errors.

The ``pmls`` console script (``pmls.cli:main``) binds the library packages
for batch use: single fits and lambda paths, Monte Carlo studies, and the
point-cloud surface pipeline. Every run directory gets a run manifest from
which the run can be replayed.
"""

__version__ = "0.1.0"
