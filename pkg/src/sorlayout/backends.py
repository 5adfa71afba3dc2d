"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python
fallback is always available. ``SORLAYOUT_BACKEND`` forces a choice
(``c``, ``python``, or ``auto``) at import time.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _kernel_py

try:
    from . import _kernel  # type: ignore[attr-defined]
except ImportError:
    _kernel = None

_BACKENDS: dict[str, ModuleType] = {"python": _kernel_py}
if _kernel is not None:
    _BACKENDS["c"] = _kernel


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_kernel(name: str | None = None) -> ModuleType:
    """Resolve a backend by name; None or "auto" picks the default."""
    if name is None or name == "auto":
        return _DEFAULT
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown backend {name!r}; available: {available_backends()}"
        ) from None


def default_backend_name() -> str:
    return "c" if _DEFAULT is _kernel else "python"


_forced = os.environ.get("SORLAYOUT_BACKEND", "auto").strip().lower()
if _forced in ("", "auto"):
    _DEFAULT = _kernel if _kernel is not None else _kernel_py
elif _forced in _BACKENDS:
    _DEFAULT = _BACKENDS[_forced]
else:
    raise ImportError(
        f"SORLAYOUT_BACKEND={_forced!r} not available; choices: {available_backends()}"
    )
