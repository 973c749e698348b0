"""Hot numerical kernels with a compiled core and an interchangeable fallback.

Two implementations of the same small API live here:

* ``_core`` — Cython extension (Thomas tridiagonal solves, fused
  semi-implicit stepping loop). Built by setup.py when a compiler is
  available.
* ``_fallback`` — NumPy/SciPy implementation with identical signatures
  and semantics.

The compiled backend is selected at import time when present; set the
environment variable ``CGLWAVES_FORCE_FALLBACK=1`` to force the fallback.
Both backends agree to rounding error and are cross-checked in the test
suite; ``benchmarks/bench_kernels.py`` compares their speed.

API (identical in both backends):

``tridiag_factor(dl, d, du)``
    LU-factor a tridiagonal matrix given by its bands (``dl[0]`` and
    ``du[-1]`` are ignored). Real or complex. Returns an opaque factor.

``tridiag_solve(fact, b)``
    Solve with a previously computed factor.

``cn_evolve(sub, diag, sup, w, rho, theta, nl_coef, alpha, phi0, dt,
            n_steps, sample_stride, ref_u, ref_omega, blowup_factor)``
    Fused time-stepping loop, see the fallback docstring for the contract.
"""

import os

from . import _fallback

if os.environ.get("CGLWAVES_FORCE_FALLBACK", "") not in ("", "0"):
    backend = _fallback
    BACKEND_NAME = "fallback"
else:
    try:
        from . import _core as backend

        BACKEND_NAME = "compiled"
    except ImportError:
        backend = _fallback
        BACKEND_NAME = "fallback"

__all__ = ["backend", "BACKEND_NAME", "_fallback"]
