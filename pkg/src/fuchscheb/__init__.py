"""Period integrals of plane Hamiltonian ovals as 2x2 Fuchsian systems.

Exact catalog data, oval quadrature, local solution germs, analytic
continuation with argument-principle zero counts, moment recurrences, and
the associated Chebyshev-type bounds.
"""

__version__ = "0.1.0"

from .catalog import case_ids, get_case  # noqa: F401
