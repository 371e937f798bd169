"""Closed-form third-order analytical solution of the J2 main problem.

The theory removes the argument of perigee first and the mean anomaly
second, each by a Lie transform, and is checked against a high-precision
numerical integration of the untruncated dynamics.
"""

import jax

jax.config.update("jax_enable_x64", True)

__version__ = "0.1.0"
