"""Kernel backend selection.

The compiled core is used when importable; otherwise the NumPy fallback.
CICRL_NUMKIT_BACKEND=py forces the fallback, =c requires the compiled core.
"""

from __future__ import annotations

import os

from . import _core_py

try:
    from . import _core_c
except ImportError:
    _core_c = None

_forced = os.environ.get("CICRL_NUMKIT_BACKEND")
if _forced not in (None, "", "c", "py"):
    raise RuntimeError(f"CICRL_NUMKIT_BACKEND must be 'c' or 'py', got {_forced!r}")
if _forced == "c" and _core_c is None:
    raise RuntimeError("CICRL_NUMKIT_BACKEND=c but the compiled core is not built")

active = _core_py if (_forced == "py" or _core_c is None) else _core_c


def backend_name() -> str:
    return active.NAME


def available_backends() -> tuple[str, ...]:
    return ("py",) if _core_c is None else ("py", "c")


def get_backend(name: str):
    if name == "py":
        return _core_py
    if name == "c":
        if _core_c is None:
            raise RuntimeError("compiled core is not built; run pip install -e . --no-build-isolation")
        return _core_c
    raise ValueError(f"unknown backend {name!r}")
