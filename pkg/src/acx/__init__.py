"""Exact and sampled anti-concentration for polynomials of Bernoulli vectors."""
from .dist import (CapExceeded, DiscreteDistribution, concentration_function, exact_distribution,
                   interval_probability, linear_distribution, max_point_mass, open_window_max,
                   point_probability)
from .poly import MultilinearPolynomial, SymmetricPolynomial, from_dict, linear, load
from .rank import rank_certificate

__version__ = "0.1.0"

__all__ = [
    "CapExceeded", "DiscreteDistribution", "MultilinearPolynomial", "SymmetricPolynomial",
    "concentration_function", "exact_distribution", "from_dict", "interval_probability",
    "linear", "linear_distribution", "load", "max_point_mass", "open_window_max",
    "point_probability", "rank_certificate",
]
