"""Time-dependent Landau levels via the invariant-operator method.

Subpackages by concern:

* :mod:`landau_td.profiles` — time-dependent system parameters M, omega, E.
* :mod:`landau_td.specfun` — Laguerre/Hermite/Bessel/pFq/Meijer-G numerics.
* :mod:`landau_td.auxode` — classical motion and the nonlinear auxiliary ODE.
* :mod:`landau_td.spectrum` — invariant eigensystem, wavefunctions, phases,
  operator matrices for the U(1)/SU(2)/SU(1,1) structures.
* :mod:`landau_td.coherent` — coherent-state families, overlaps, weights.
* :mod:`landau_td.verify` — quadrature/PDE/algebra/moment check battery.
* :mod:`landau_td.cli` — the ``landau-td`` command line front end.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
