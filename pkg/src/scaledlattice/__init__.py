"""Scaled rank-1 lattice rules for integration over R^d.

A lattice rule on the unit cube is mapped onto a box whose size follows
from the decay of the integrand.  The package also provides the Korobov and
Sobolev kernels, the Bernoulli-polynomial periodization used to analyse the
method, Gauss-Hermite baselines and the test integrands used in the
experiments.
"""

from .bernoulli import (
    Interval,
    bernoulli_poly,
    periodic_bernoulli_poly,
    periodic_scaled_bernoulli_poly,
    scaled_bernoulli_poly,
)
from .decay import DecayCondition, DecayKind
from .errors import CapabilityError, ComputationError, DomainError, ResourceError, ScaledLatticeError
from .integrator import IntegrandSpec, QuadratureResult, integrate, select_box, total_error_bound_report, truncation_bound
from .lattice import (
    BoxDomain,
    GeneratingVector,
    cbc_construct,
    lattice_points,
    scale_points,
    wce_korobov_bruteforce,
    wce_korobov_closed_form,
    wce_scaled_box_bound,
)
from .projection import MixedPartialOracle, periodize_on_box, projection_error_bound

__all__ = [
    "BoxDomain",
    "CapabilityError",
    "ComputationError",
    "DecayCondition",
    "DecayKind",
    "DomainError",
    "GeneratingVector",
    "IntegrandSpec",
    "Interval",
    "MixedPartialOracle",
    "QuadratureResult",
    "ResourceError",
    "ScaledLatticeError",
    "bernoulli_poly",
    "cbc_construct",
    "integrate",
    "lattice_points",
    "periodic_bernoulli_poly",
    "periodic_scaled_bernoulli_poly",
    "periodize_on_box",
    "projection_error_bound",
    "scale_points",
    "scaled_bernoulli_poly",
    "select_box",
    "total_error_bound_report",
    "truncation_bound",
    "wce_korobov_bruteforce",
    "wce_korobov_closed_form",
    "wce_scaled_box_bound",
]
