"""Python bindings for the bohr library."""
from ._core import (  # noqa: F401
    BohrError,
    DimensionMismatch,
    DissociationFailure,
    NumericalFailure,
    ParseError,
    Poly,
    PreconditionError,
    RouteInapplicable,
    __version__,
    certify,
    certify_gap,
    complex_roots,
    divides,
    falsify,
    fundamental_homoclinic,
    gap_radius,
    kronecker_factor,
    mahler_measure,
    mobius_sieve,
    orbit,
    padic_escape,
    parse,
    riesz_fourier_coeff,
    verify_certificate,
    weighted_average,
)
