"""dipsim: dipolar XY spin models on superconducting-qubit arrays.

Geometry -> coupling law -> sparse spin Hamiltonians -> exact
diagonalization and open-system ramps, with disorder ensembles and a
config-driven CLI.  A compiled stepper backs the Lindblad integrator when
the extension is built; a numpy twin is selected otherwise.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend  # noqa: F401
