"""Thin adaptive-quadrature helpers on top of scipy's QUADPACK bindings."""

from __future__ import annotations

from typing import Callable

from scipy.integrate import quad

from .errors import QuadratureFailure

DEFAULT_ABS_TOL = 1e-10


def real_quad(f: Callable[[float], float], a: float, b: float,
              abs_tol: float = DEFAULT_ABS_TOL) -> float:
    """Adaptive Gauss-Kronrod integral of a real integrand; raises on non-convergence."""
    result = quad(f, a, b, epsabs=abs_tol, epsrel=1e-12, limit=400, full_output=1)
    if len(result) > 3:
        raise QuadratureFailure(f"quadrature on [{a:.6g}, {b:.6g}]: {result[3]}")
    return float(result[0])


def complex_quad(f: Callable[[float], complex], a: float, b: float,
                 abs_tol: float = DEFAULT_ABS_TOL) -> complex:
    """Adaptive integral of a complex integrand (real and imaginary parts separately)."""
    re = real_quad(lambda t: f(t).real, a, b, abs_tol)
    im = real_quad(lambda t: f(t).imag, a, b, abs_tol)
    return complex(re, im)
