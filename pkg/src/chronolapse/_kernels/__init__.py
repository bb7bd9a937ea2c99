"""Ray-cast kernel backends.

The compiled Cython kernel and the pure-numpy fallback implement the same
per-pixel arithmetic; which one runs is decided here at import time. Set
CHRONO_KERNEL=python or CHRONO_KERNEL=cython to force a backend (forcing
cython raises if the extension is missing).
"""

import os

from . import raycast_py

_forced = os.environ.get("CHRONO_KERNEL", "").strip().lower()

if _forced == "python":
    _backend = raycast_py
    _backend_name = "python"
else:
    try:
        from . import raycast_cy as _cy
        _backend = _cy
        _backend_name = "cython"
    except ImportError:
        if _forced == "cython":
            raise ImportError(
                "CHRONO_KERNEL=cython but the compiled kernel is not built; "
                "run pip install -e . --no-build-isolation")
        _backend = raycast_py
        _backend_name = "python"

render_linear = _backend.render_linear


def active_backend() -> str:
    """Name of the kernel backend in use: 'cython' or 'python'."""
    return _backend_name


def get_backend(name: str):
    """Fetch a backend module by name, for parity tests and benchmarks."""
    if name == "python":
        return raycast_py
    if name == "cython":
        from . import raycast_cy
        return raycast_cy
    raise ValueError(f"unknown kernel backend {name!r}")
