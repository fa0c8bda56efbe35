"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set DIPSIM_KERNEL=python (or =cython) to force a backend; the cython
request fails loudly if the extension was not built.
"""

import os

from . import lindblad_py

_requested = os.environ.get("DIPSIM_KERNEL", "auto").lower()

if _requested == "python":
    _impl = lindblad_py
else:
    try:
        from . import _lindblad_cy as _impl
    except ImportError:
        if _requested == "cython":
            raise
        _impl = lindblad_py

step_interval = _impl.step_interval
BACKEND = _impl.BACKEND


def get_backend(name="auto"):
    """Return (step_interval, backend_name) for an explicit backend choice."""
    name = (name or "auto").lower()
    if name == "python":
        return lindblad_py.step_interval, lindblad_py.BACKEND
    if name == "cython":
        from . import _lindblad_cy

        return _lindblad_cy.step_interval, _lindblad_cy.BACKEND
    return step_interval, BACKEND
