"""Numerical toolkit for a truncated infinite-dimensional symplectic group.

Subpackages of functionality:

* :mod:`sympinf.fourier` - H^1/2 Fourier analysis on the circle;
* :mod:`sympinf.operators` - operator matrices, involutions, group predicates;
* :mod:`sympinf.diffeo` - circle diffeomorphisms and their embedding;
* :mod:`sympinf.lie_algebra` - the Lie algebra sp_HS, covariances, Ito drift;
* :mod:`sympinf.sde` - Brownian motion on the group;
* :mod:`sympinf.io`, :mod:`sympinf.cli` - artifacts and command line;
* :mod:`sympinf.estimators` - scikit-learn style wrappers.
"""

from .diffeo import embed, make_diffeo, rotation
from .fourier import FourierVector, inner_omega, omega
from .lie_algebra import CovarianceSpec, canonical_basis, drift_D, is_in_sp, project_pi
from .operators import predicates, sharp
from .sde import defect, simulate

__version__ = "0.1.0"

__all__ = [
    "CovarianceSpec",
    "FourierVector",
    "canonical_basis",
    "defect",
    "drift_D",
    "embed",
    "inner_omega",
    "is_in_sp",
    "make_diffeo",
    "omega",
    "predicates",
    "project_pi",
    "rotation",
    "sharp",
    "simulate",
]
